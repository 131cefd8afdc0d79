#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ubp {

using i64 = std::int64_t;

struct Site {
  i64 x = 0;
  i64 y = 0;
  auto operator<=>(const Site&) const = default;
};

inline Site operator+(Site p, Site q) { return {p.x + q.x, p.y + q.y}; }
inline Site operator-(Site p, Site q) { return {p.x - q.x, p.y - q.y}; }
inline Site operator-(Site p) { return {-p.x, -p.y}; }
inline i64 norm2(Site p) { return p.x * p.x + p.y * p.y; }
double norm(Site p);

std::string to_string(Site p);

// Reduced integer normal vector (a,b) with gcd(|a|,|b|) = 1.
class Direction {
 public:
  Direction() : a_(1), b_(0) {}
  Direction(i64 a, i64 b);

  i64 a() const { return a_; }
  i64 b() const { return b_; }
  Site vec() const { return {a_, b_}; }
  double length() const;

  Direction operator-() const { return Direction(-a_, -b_); }
  Direction rot_ccw() const { return Direction(-b_, a_); }
  Direction rot_cw() const { return Direction(b_, -a_); }

  bool operator==(const Direction& o) const { return a_ == o.a_ && b_ == o.b_; }
  bool operator!=(const Direction& o) const { return !(*this == o); }

 private:
  i64 a_;
  i64 b_;
};

std::string to_string(Direction u);

// Sign of <p,u>.
int dot_sign(Site p, Direction u);
// a*x + b*y; the lines {line_index = j} partition Z^2.
i64 line_index(Site p, Direction u);

i64 cross(Site p, Site q);
i64 dot(Site p, Site q);

// Counterclockwise angle order starting at e1 = (1,0), for any non-zero vectors.
bool angle_less(Site p, Site q);
inline bool angle_less(Direction u, Direction v) { return angle_less(u.vec(), v.vec()); }
struct AngleLess {
  bool operator()(Direction u, Direction v) const { return angle_less(u, v); }
};

// True iff p lies strictly inside the ccw arc from s to e (s != e), or p != s when s == e.
bool strictly_between(Direction s, Direction p, Direction e);

// A direction strictly inside the ccw arc (s, e); for s == e any direction other than s.
Direction interior_direction(Direction s, Direction e);

// Angle (radians, in [0, pi]) between two directions.
double angle_between(Direction u, Direction v);

struct Arc {
  Direction start;
  Direction end;
  bool closed_start = true;
  bool closed_end = true;
  bool full = false;

  static Arc point(Direction d) { return {d, d, true, true, false}; }
  static Arc full_circle() { return {Direction(1, 0), Direction(1, 0), true, true, true}; }
  static Arc closed(Direction s, Direction e) { return {s, e, true, true, false}; }
  static Arc open(Direction s, Direction e) { return {s, e, false, false, false}; }

  bool is_point() const { return !full && start == end && closed_start && closed_end; }
  bool contains(Direction d) const;
  bool operator==(const Arc& o) const;
};

std::string to_string(const Arc& a);

// Finite union of arcs, stored as cyclically ordered breakpoints with membership of
// each breakpoint and of each open gap following it.
class ArcSet {
 public:
  ArcSet() = default;
  static ArcSet whole();
  static ArcSet from_arcs(const std::vector<Arc>& arcs);
  static ArcSet from_arc(const Arc& a);

  bool contains(Direction d) const;
  // Membership of directions immediately counterclockwise of d.
  bool after(Direction d) const;
  bool empty() const { return pts_.empty() && !all_; }
  bool is_whole() const { return pts_.empty() && all_; }

  ArcSet complement() const;
  static ArcSet combine(const ArcSet& a, const ArcSet& b, const std::function<bool(bool, bool)>& op);

  std::vector<Arc> arcs() const;
  const std::vector<Direction>& breakpoints() const { return pts_; }

  bool operator==(const ArcSet& o) const;

 private:
  void normalize();
  std::vector<Direction> pts_;
  std::vector<bool> at_;
  std::vector<bool> gap_;
  bool all_ = false;
};

enum class ArcOp { Union, Intersect, Complement, Difference };

// Complement ignores b; Difference is a \ b.
std::vector<Arc> arc_boolean(const std::vector<Arc>& a, const std::vector<Arc>& b, ArcOp op);

struct UNormContext {
  Direction u;
  Direction u_star;
  double sigma = 0.0;
  bool drift = false;

  static UNormContext make(Direction u, Direction u_star, bool drift);
};

double u_norm(Site p, const UNormContext& ctx);

i64 floor_div(i64 a, i64 b);
i64 ceil_div(i64 a, i64 b);

// True iff every open semicircle contains one of dirs.
bool positively_spanning(const std::vector<Direction>& dirs);

struct Row {
  i64 y;
  i64 lo;
  i64 hi;
};

struct BoundingBox {
  i64 x0, y0, x1, y1;
};

// {p : line_index(p, u_k) < bound_k for all k}, a bounded lattice polygon.
class LatticePolygon {
 public:
  struct Constraint {
    Direction u;
    i64 bound;
  };

  LatticePolygon() = default;
  explicit LatticePolygon(std::vector<Constraint> cs);

  const std::vector<Constraint>& constraints() const { return cs_; }
  bool contains(Site p) const;
  // Non-empty rows in increasing y.
  std::vector<Row> rows() const;
  std::vector<Site> sites() const;
  std::size_t size() const;
  bool empty() const;
  BoundingBox bbox() const;
  i64 max_index(Direction u) const;
  i64 min_index(Direction u) const;
  double diameter() const;

 private:
  bool real_y_range(i64& lo, i64& hi) const;
  std::vector<Constraint> cs_;
};

}  // namespace ubp
