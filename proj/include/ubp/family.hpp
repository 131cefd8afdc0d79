#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ubp/geometry.hpp"

namespace ubp {

using Rule = std::vector<Site>;

class UpdateFamily {
 public:
  UpdateFamily() = default;
  // Sorts and deduplicates; throws InvalidRule on an empty rule or one containing the origin.
  explicit UpdateFamily(std::vector<Rule> rules, std::string name = "");

  const std::vector<Rule>& rules() const { return rules_; }
  const std::string& name() const { return name_; }
  bool empty() const { return rules_.empty(); }
  std::size_t size() const { return rules_.size(); }

  // Union of all rule sites, sorted.
  std::vector<Site> support() const;
  // max |x|_inf over rule sites.
  i64 reach() const;

  // Image of the family under a linear lattice map.
  UpdateFamily mapped(i64 m00, i64 m01, i64 m10, i64 m11) const;

  bool operator==(const UpdateFamily& o) const { return rules_ == o.rules_; }

 private:
  std::vector<Rule> rules_;
  std::string name_;
};

namespace families {
UpdateFamily two_neighbour();
UpdateFamily duarte();
UpdateFamily van_enter_hulshof();
UpdateFamily all_singletons();
UpdateFamily three_of_four();
// All r-subsets of a site list.
UpdateFamily threshold(const std::vector<Site>& nbhd, int r, std::string name);
}  // namespace families

enum class Side { Plus, Minus };

double nu(const UpdateFamily& U);
bool is_stable(Direction u, const UpdateFamily& U);

struct StableSet {
  ArcSet set;
  std::vector<Arc> arcs;

  bool contains(Direction u) const { return set.contains(u); }
  std::vector<Direction> isolated() const;
  // Union of the arcs of positive length.
  ArcSet nondegenerate() const;
};

StableSet stable_set(const UpdateFamily& U);

enum class DiffStatus { Finite, InfiniteWithinWindow, Infinite };

struct DifficultyResult {
  DiffStatus status = DiffStatus::Finite;
  int value = 0;
  int window = 0;
  std::vector<Site> witness;

  bool finite() const { return status == DiffStatus::Finite; }
  // Orders finite values first, then unresolved, then proven infinite.
  bool operator<(const DifficultyResult& o) const;
};

std::string to_string(const DifficultyResult& r);

struct Difficulty {
  DifficultyResult plus;
  DifficultyResult minus;
  DifficultyResult alpha;      // both sides finite: min, else infinite
  DifficultyResult alpha_bar;  // min of the sides
};

struct DifficultyOptions {
  int window = 8;
  int max_size = 4;
  std::size_t candidate_cap = 1000000;
  // When false, a size whose candidate count exceeds the cap ends the search as unresolved.
  bool throw_on_cap = true;
};

DifficultyResult difficulty_side(Direction u, Side side, const UpdateFamily& U, int window);
DifficultyResult difficulty_side(Direction u, Side side, const UpdateFamily& U, const DifficultyOptions& opt);
Difficulty difficulty(Direction u, const UpdateFamily& U, int window);
Difficulty difficulty(Direction u, const UpdateFamily& U, const DifficultyOptions& opt);

enum class Kind { Subcritical, Critical, Supercritical };
std::string to_string(Kind k);

struct DirectionEvidence {
  Direction u;
  Difficulty difficulty;
};

struct Classification {
  Kind kind = Kind::Supercritical;
  StableSet stable;
  int alpha = 0;
  bool alpha_resolved = false;
  bool balanced = false;
  std::optional<Direction> u_star;
  std::optional<Direction> u_left;
  std::optional<Direction> u_right;
  std::vector<Direction> droplet_directions;
  bool drift = false;
  std::vector<DirectionEvidence> evidence;

  const Difficulty* evidence_for(Direction u) const;
};

Classification classify(const UpdateFamily& U, int window = 8);
Classification classify(const UpdateFamily& U, const DifficultyOptions& opt);

std::vector<Direction> quasi_stable_set(const UpdateFamily& U);

// Consecutive pairs (u, v) of S u Q, i.e. endpoints of the gaps of S u Q.
std::vector<std::pair<Direction, Direction>> consecutive_pairs(const StableSet& S, const std::vector<Direction>& Q);
// Some rule lies in (H_u u l_u) n (H_v u l_v).
bool closed_double_half_plane_rule(const UpdateFamily& U, Direction u, Direction v);

bool voracious_check(const std::vector<Site>& Z, Direction u, const UpdateFamily& U, int alpha_cap);

DifficultyResult alpha_star(const UpdateFamily& U, Direction u_star, int window);

struct RangeBound {
  double value = 0.0;
  std::vector<Site> witness;
  std::optional<Direction> direction;
  std::size_t sets_examined = 0;
};

RangeBound rho_bound(const UpdateFamily& U, const std::vector<Direction>& S_B, int alpha, int window);
// Same enumeration with sets of size gamma-1 and the u-norm of each direction (for rho(u, gamma)).
RangeBound rho_u_bound(const UpdateFamily& U, Direction u, Direction u_star, bool drift, int gamma, int window);

double kappa(const UpdateFamily& U, const Classification& c, double rho_hat);

Direction iceberg_u0(const UpdateFamily& U, Direction u_star, const StableSet& S);

// Side of u_star on which the stable interval extends (+1 counterclockwise, -1 clockwise, 0 none).
int stable_interval_side(const StableSet& S, Direction u);

}  // namespace ubp
