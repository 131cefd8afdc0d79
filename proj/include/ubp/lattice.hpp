#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ubp/family.hpp"
#include "ubp/geometry.hpp"

namespace ubp {

struct HalfPlane {
  Direction u;
  i64 offset = 0;  // sites with line_index < offset are permanently infected
};

struct Window {
  enum class Shape { Box, Torus };
  Shape shape = Shape::Box;
  BoundingBox box{0, 0, 0, 0};  // inclusive; for a torus [0,n-1]^2
  std::optional<HalfPlane> half_plane;

  static Window make_box(i64 x0, i64 y0, i64 x1, i64 y1);
  static Window make_box(BoundingBox b, std::optional<HalfPlane> hp = std::nullopt);
  static Window torus(i64 n);

  bool contains(Site p) const;
  i64 width() const { return box.x1 - box.x0 + 1; }
  i64 height() const { return box.y1 - box.y0 + 1; }
};

// Bit-addressed infected set over a window with a frontier queue.
class LatticeState {
 public:
  LatticeState(const UpdateFamily& U, const Window& w);

  const Window& window() const { return w_; }
  void clear();
  // Marks p infected and queues it; false if already infected or outside the window.
  bool infect(Site p);
  bool infected(Site p) const;
  // Closure: runs the frontier until no rule applies.
  void run();
  // Synchronous generations until target is infected; returns its time or nullopt past t_max.
  std::optional<i64> run_timed(Site target, i64 t_max);
  // Synchronous generations until stable or t_max; entry t lists the sites infected at step t+1.
  std::vector<std::vector<Site>> run_generations(i64 t_max);
  // Infected sites of the window, excluding the half-plane sites.
  std::vector<Site> sites(bool sorted = true) const;
  std::size_t count() const { return count_; }
  std::size_t window_sites() const { return std::size_t(w_.width()) * std::size_t(w_.height()); }
  i64 steps() const { return steps_; }

  // Seeds by window-linear index y*width + x relative to the box corner.
  void infect_index(std::size_t idx);

 private:
  bool on(std::size_t idx) const { return (bits_[idx >> 6] >> (idx & 63)) & 1; }
  bool get(i64 x, i64 y) const;
  // Absolute site to storage index; false outside a box window.
  bool locate(i64 x, i64 y, std::size_t& idx) const;
  Site site_of(std::size_t idx) const;
  void mark(std::size_t idx);
  bool box_rule_holds(std::size_t rule, std::size_t idx) const;
  bool torus_rule_holds(std::size_t rule, i64 x, i64 y) const;
  void examine(std::size_t idx, std::vector<std::uint32_t>* next_gen);

  UpdateFamily U_;
  Window w_;
  bool torus_;
  i64 W_, H_;
  i64 pad_ = 0;     // box windows carry a margin of reach cells on each side
  i64 stride_ = 0;  // row length of the storage grid
  std::vector<std::uint64_t> bits_;
  std::vector<std::uint64_t> fixed_;  // half-plane cells (box windows)
  std::vector<std::uint64_t> pending_;
  std::vector<std::uint32_t> queue_;
  std::size_t count_ = 0;
  i64 steps_ = 0;
  std::vector<std::vector<Site>> rules_;
  std::vector<std::vector<std::int64_t>> rule_delta_;
  std::vector<Site> offsets_;
  std::vector<std::int64_t> offset_delta_;
  std::vector<std::vector<std::size_t>> rules_by_offset_;
};

std::vector<Site> closure(const std::vector<Site>& A, const Window& w, const UpdateFamily& U);

enum class StripVerdict { InfiniteLine, FiniteLine, BandExceeded };
std::string to_string(StripVerdict v);

// Coordinates adapted to direction u: i runs rightward along l_u (looking along u), j = line_index.
struct LineFrame {
  explicit LineFrame(Direction u);
  Site to_frame(Site p) const;
  Site from_frame(Site q) const;
  Direction u;
  Site right;  // step along the line, to the right when looking along u
  Site up;     // vector with line_index 1
};

struct StripOptions {
  int band_height = 0;  // 0: default 4*ceil(nu)*(|Z|+1)
  int max_band = 1024;
  int max_extent_doublings = 4;
  std::optional<Side> side;  // stop once this side is decided
};

struct StripReport {
  StripVerdict plus = StripVerdict::BandExceeded;
  StripVerdict minus = StripVerdict::BandExceeded;
  int band_used = 0;
  int period_plus = 0;
  int period_minus = 0;
};

StripVerdict strip_line_decision(Direction u, const std::vector<Site>& Z, const UpdateFamily& U, int band_height,
                                 Side side);
// Decides both sides, escalating the band as configured.
StripReport strip_decision(Direction u, const std::vector<Site>& Z, const UpdateFamily& U,
                           const StripOptions& opt = {});

bool percolates(const std::vector<Site>& A, i64 n, const UpdateFamily& U);

std::optional<i64> infection_time(const std::vector<Site>& A, const UpdateFamily& U, i64 t_max, const Window& w);

// Radius of the light cone of t steps: every rule site has |x|_inf <= reach.
i64 light_cone_radius(const UpdateFamily& U, i64 t);

struct UStrip {
  Direction u;
  Direction v;
  i64 bound_u;        // line_index(., u) < bound_u
  i64 bound_minus_u;  // line_index(., -u) < bound_minus_u
  i64 bound_v;
  i64 bound_minus_v;

  LatticePolygon polygon() const;
};

bool is_u_crossed(const UStrip& S, const std::vector<Site>& A, const UpdateFamily& U, double kappa);

// Connected components of sites under the relation |p - q| <= kappa.
std::vector<std::vector<Site>> strong_components(const std::vector<Site>& sites, double kappa);
// Lattice vectors of Euclidean length at most kappa.
std::vector<Site> disc(double kappa);

}  // namespace ubp
