#pragma once

#include <optional>
#include <vector>

#include "ubp/family.hpp"
#include "ubp/geometry.hpp"
#include "ubp/lattice.hpp"

namespace ubp {

// Finite lattice set as disjoint closed intervals per row.
class RowSet {
 public:
  using Interval = std::pair<i64, i64>;

  RowSet() = default;
  static RowSet from_sites(const std::vector<Site>& sites);
  static RowSet from_polygon(const LatticePolygon& P);

  bool empty() const { return rows_.empty(); }
  bool contains(Site p) const;
  std::size_t size() const;
  std::vector<Site> sites() const;
  BoundingBox bbox() const;

  // {a + b : a in this, b in o}
  RowSet minkowski(const RowSet& o) const;
  RowSet reflected() const;
  RowSet intersect(const RowSet& o) const;
  bool intersects(const RowSet& o) const;
  std::optional<i64> min_index(Direction u) const;

  const std::vector<std::pair<i64, std::vector<Interval>>>& rows() const { return rows_; }

 private:
  static void normalize(std::vector<Interval>& v);
  std::vector<std::pair<i64, std::vector<Interval>>> rows_;  // sorted by y
};

struct Droplet {
  std::vector<Direction> directions;  // angle-sorted
  std::vector<i64> offsets;           // line_index(., u_k) < offsets[k]

  LatticePolygon polygon() const;
  bool contains(Site p) const;
  std::vector<Site> sites() const;
  bool empty() const { return polygon().empty(); }
  double diameter() const { return polygon().diameter(); }
  // Width of the u-projection, with u taken as a unit vector.
  double projection(Direction u) const;
  Droplet translated(Site x) const;
  // Offsets lowered until every face is non-empty.
  Droplet tightened() const;

  bool operator==(const Droplet& o) const { return directions == o.directions && offsets == o.offsets; }
};

std::string to_string(const Droplet& D);

double projection(const std::vector<Site>& K, Direction u);
double diameter(const std::vector<Site>& K);

Droplet minimal_droplet(const std::vector<Site>& K, const std::vector<Direction>& T);
// Minimal T-droplet containing the Euclidean ball of the given radius around the origin.
Droplet ball_droplet(double radius, const std::vector<Direction>& T);

// sup over segments s of diam(hull_T(s)) / |s|, from the continuous T-polygon of a segment.
double hull_stretch(const std::vector<Direction>& T);

// Triangle {line_index(., u0) < a, line_index(., u_star) < b, line_index(., u) >= 0}.
struct Iceberg {
  Direction u;
  Direction u0;
  Direction u_star;
  i64 bound_u0 = 0;
  i64 bound_u_star = 0;

  LatticePolygon polygon() const;
  bool contains(Site p) const { return polygon().contains(p); }
  std::vector<Site> sites() const { return polygon().sites(); }
};

// J_u(X): smallest u-iceberg J with X inside H_u u J. Throws InvalidDirection unless u lies
// strictly between u_star and u0, and InvalidRule if X lies inside H_u.
Iceberg smallest_iceberg(const std::vector<Site>& X, Direction u, Direction u0, Direction u_star);

std::vector<std::vector<Site>> alpha_clusters(const std::vector<Site>& K, int alpha, double kappa);

struct MergeEvent {
  std::size_t step;
  int rule;  // algorithm step number that fired
  std::size_t first;
  std::size_t second;  // equal to first for single-set steps
  std::size_t result;
};

struct CoverNode {
  Droplet droplet;
  std::vector<std::size_t> parents;
  std::size_t clusters = 0;  // initial clusters below this node
};

struct CoverResult {
  std::vector<Droplet> droplets;
  std::vector<std::vector<Site>> clusters;
  std::vector<Site> dust;
  std::vector<MergeEvent> merge_log;
  std::vector<CoverNode> nodes;  // nodes[0..clusters.size()) are the initial copies
  std::vector<std::size_t> final_nodes;
};

// D_hat carries the direction set S_B and is positioned by translation onto each cluster.
CoverResult covering_algorithm(const std::vector<Site>& K, int alpha, double kappa, const Droplet& D_hat);

struct SpanNode {
  std::vector<Site> members;  // K_i^t
  std::vector<Site> closure;  // [K_i^t]
  Droplet droplet;            // D([K_i^t])
  std::vector<std::size_t> parents;
};

struct SpanResult {
  std::vector<Droplet> droplets;
  std::vector<std::vector<Site>> components;  // K_i^T
  std::vector<std::vector<Site>> closures;    // [K_i^T]
  std::vector<MergeEvent> merge_log;
  std::vector<SpanNode> nodes;
  std::vector<std::size_t> final_nodes;
};

// Pairwise merge loop; closures are computed inside w.
SpanResult spanning_algorithm(const std::vector<Site>& K, const UpdateFamily& U, double kappa,
                              const std::vector<Direction>& T, const Window& w);
// {D(L) : L a strong component of [K]}, sorted.
std::vector<Droplet> span_by_components(const std::vector<Site>& K, const UpdateFamily& U, double kappa,
                                        const std::vector<Direction>& T, const Window& w);

bool is_internally_filled(const std::vector<Site>& X, const std::vector<Site>& A, const UpdateFamily& U);
bool is_internally_spanned(const Droplet& D, const std::vector<Site>& A, const UpdateFamily& U, double kappa);
// The same decision through the merge loop.
bool is_internally_spanned_by_algorithm(const Droplet& D, const std::vector<Site>& A, const UpdateFamily& U,
                                        double kappa);

struct Region {
  bool is_iceberg = false;
  Droplet droplet;
  Iceberg iceberg;

  LatticePolygon polygon() const { return is_iceberg ? iceberg.polygon() : droplet.polygon(); }
};

struct IcebergNode {
  Region region;
  std::vector<std::size_t> parents;
  std::size_t leaves = 0;  // initial sites below this node
};

struct IcebergResult {
  std::vector<Region> regions;
  std::vector<MergeEvent> merge_log;
  std::vector<IcebergNode> nodes;
  std::vector<std::size_t> final_nodes;
};

struct IcebergContext {
  Direction u_star;
  Direction u0;
};

// Requires a drift family context; u strictly between u_star and u0, K outside H_u.
IcebergResult iceberg_algorithm(const std::vector<Site>& K, Direction u, const IcebergContext& ctx,
                                const UpdateFamily& U, double kappa, const Droplet& D_hat);

// h = projection on u_star, w = projection on its perpendicular.
double height(const LatticePolygon& P, Direction u_star);
double width(const LatticePolygon& P, Direction u_star);

enum class CriticalType { TypeT, TypeL, NotCritical };
std::string to_string(CriticalType t);
CriticalType is_critical_droplet(const Droplet& D, double p, double xi, int alpha, Direction u_star);

}  // namespace ubp
