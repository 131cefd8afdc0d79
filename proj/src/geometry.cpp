#include "ubp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ubp/errors.hpp"

namespace ubp {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::EmptyFamily: return "EmptyFamily";
    case Errc::InvalidRule: return "InvalidRule";
    case Errc::InvalidDirection: return "InvalidDirection";
    case Errc::DifficultyWindowExhausted: return "DifficultyWindowExhausted";
    case Errc::SearchBudgetExceeded: return "SearchBudgetExceeded";
    case Errc::StripHeightExceeded: return "StripHeightExceeded";
    case Errc::NotCritical: return "NotCritical";
    case Errc::NoDriftDirection: return "NoDriftDirection";
    case Errc::UnboundedDroplet: return "UnboundedDroplet";
    case Errc::NotDriftFamily: return "NotDriftFamily";
    case Errc::OriginOutsideWindow: return "OriginOutsideWindow";
    case Errc::BudgetExhausted: return "BudgetExhausted";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

double norm(Site p) { return std::hypot(double(p.x), double(p.y)); }

std::string to_string(Site p) {
  return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")";
}

Direction::Direction(i64 a, i64 b) {
  if (a == 0 && b == 0) throw Error(Errc::InvalidDirection, "zero vector");
  i64 g = std::gcd(a < 0 ? -a : a, b < 0 ? -b : b);
  a_ = a / g;
  b_ = b / g;
}

double Direction::length() const { return std::hypot(double(a_), double(b_)); }

std::string to_string(Direction u) {
  return "(" + std::to_string(u.a()) + "," + std::to_string(u.b()) + ")";
}

int dot_sign(Site p, Direction u) {
  i64 v = line_index(p, u);
  return (v > 0) - (v < 0);
}

i64 line_index(Site p, Direction u) { return u.a() * p.x + u.b() * p.y; }

i64 cross(Site p, Site q) { return p.x * q.y - p.y * q.x; }
i64 dot(Site p, Site q) { return p.x * q.x + p.y * q.y; }

static int half(Site p) { return (p.y < 0 || (p.y == 0 && p.x < 0)) ? 1 : 0; }

bool angle_less(Site p, Site q) {
  int hp = half(p), hq = half(q);
  if (hp != hq) return hp < hq;
  return cross(p, q) > 0;
}

static Site relative(Direction s, Direction v) {
  return {dot(s.vec(), v.vec()), cross(s.vec(), v.vec())};
}

bool strictly_between(Direction s, Direction p, Direction e) {
  if (p == s) return false;
  if (s == e) return true;
  return angle_less(relative(s, p), relative(s, e));
}

Direction interior_direction(Direction s, Direction e) {
  if (s == e) return -s;
  i64 c = cross(s.vec(), e.vec());
  if (c > 0) return Direction(s.a() + e.a(), s.b() + e.b());
  if (c == 0) return s.rot_ccw();
  return Direction(-(s.a() + e.a()), -(s.b() + e.b()));
}

double angle_between(Direction u, Direction v) {
  double c = double(cross(u.vec(), v.vec()));
  double d = double(dot(u.vec(), v.vec()));
  return std::atan2(std::fabs(c), d);
}

bool Arc::contains(Direction d) const {
  if (full) return true;
  if (start == end) {
    if (closed_start && closed_end) return d == start;
    if (!closed_start && !closed_end) return d != start;
    return true;
  }
  if (d == start) return closed_start;
  if (d == end) return closed_end;
  return strictly_between(start, d, end);
}

bool Arc::operator==(const Arc& o) const {
  if (full || o.full) return full == o.full;
  return start == o.start && end == o.end && closed_start == o.closed_start &&
         closed_end == o.closed_end;
}

std::string to_string(const Arc& a) {
  if (a.full) return "S1";
  if (a.is_point()) return "{" + to_string(a.start) + "}";
  return std::string(a.closed_start ? "[" : "(") + to_string(a.start) + " -> " +
         to_string(a.end) + (a.closed_end ? "]" : ")");
}

ArcSet ArcSet::whole() {
  ArcSet s;
  s.all_ = true;
  return s;
}

ArcSet ArcSet::from_arc(const Arc& a) {
  ArcSet s;
  if (a.full) return whole();
  if (a.start == a.end) {
    s.pts_ = {a.start};
    if (a.closed_start && a.closed_end) {
      s.at_ = {true};
      s.gap_ = {false};
    } else {
      s.at_ = {a.closed_start || a.closed_end};
      s.gap_ = {true};
    }
  } else if (angle_less(a.start, a.end)) {
    s.pts_ = {a.start, a.end};
    s.at_ = {a.closed_start, a.closed_end};
    s.gap_ = {true, false};
  } else {
    s.pts_ = {a.end, a.start};
    s.at_ = {a.closed_end, a.closed_start};
    s.gap_ = {false, true};
  }
  s.normalize();
  return s;
}

ArcSet ArcSet::from_arcs(const std::vector<Arc>& arcs) {
  ArcSet acc;
  for (const Arc& a : arcs)
    acc = combine(acc, from_arc(a), [](bool x, bool y) { return x || y; });
  return acc;
}

static std::ptrdiff_t find_point(const std::vector<Direction>& pts, Direction d) {
  auto it = std::lower_bound(pts.begin(), pts.end(), d, AngleLess{});
  if (it != pts.end() && *it == d) return it - pts.begin();
  return -1;
}

// Index of the gap containing a non-breakpoint direction d.
static std::size_t gap_of(const std::vector<Direction>& pts, Direction d) {
  auto it = std::lower_bound(pts.begin(), pts.end(), d, AngleLess{});
  std::size_t i = it - pts.begin();
  return i == 0 ? pts.size() - 1 : i - 1;
}

bool ArcSet::contains(Direction d) const {
  if (pts_.empty()) return all_;
  auto i = find_point(pts_, d);
  if (i >= 0) return at_[i];
  return gap_[gap_of(pts_, d)];
}

bool ArcSet::after(Direction d) const {
  if (pts_.empty()) return all_;
  auto i = find_point(pts_, d);
  if (i >= 0) return gap_[i];
  return gap_[gap_of(pts_, d)];
}

ArcSet ArcSet::complement() const {
  ArcSet s = *this;
  s.all_ = !all_;
  for (std::size_t i = 0; i < s.at_.size(); ++i) {
    s.at_[i] = !s.at_[i];
    s.gap_[i] = !s.gap_[i];
  }
  return s;
}

ArcSet ArcSet::combine(const ArcSet& a, const ArcSet& b, const std::function<bool(bool, bool)>& op) {
  ArcSet s;
  s.pts_ = a.pts_;
  s.pts_.insert(s.pts_.end(), b.pts_.begin(), b.pts_.end());
  std::sort(s.pts_.begin(), s.pts_.end(), AngleLess{});
  s.pts_.erase(std::unique(s.pts_.begin(), s.pts_.end()), s.pts_.end());
  if (s.pts_.empty()) {
    s.all_ = op(a.all_, b.all_);
    return s;
  }
  for (Direction p : s.pts_) {
    s.at_.push_back(op(a.contains(p), b.contains(p)));
    s.gap_.push_back(op(a.after(p), b.after(p)));
  }
  s.normalize();
  return s;
}

void ArcSet::normalize() {
  std::size_t k = pts_.size();
  if (k == 0) return;
  std::vector<Direction> p;
  std::vector<bool> at, gap;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t prev = (i + k - 1) % k;
    if (at_[i] == gap_[i] && gap_[i] == gap_[prev]) continue;
    p.push_back(pts_[i]);
    at.push_back(at_[i]);
    gap.push_back(gap_[i]);
  }
  if (p.empty()) {
    all_ = gap_[0];
    pts_.clear();
    at_.clear();
    gap_.clear();
    return;
  }
  pts_ = std::move(p);
  at_ = std::move(at);
  gap_ = std::move(gap);
  all_ = false;
}

std::vector<Arc> ArcSet::arcs() const {
  std::vector<Arc> out;
  if (pts_.empty()) {
    if (all_) out.push_back(Arc::full_circle());
    return out;
  }
  std::size_t k = pts_.size(), m = 2 * k;
  auto elem = [&](std::size_t e) { return (e % 2 == 0) ? bool(at_[e / 2]) : bool(gap_[e / 2]); };
  std::size_t f = 0;
  while (f < m && elem(f)) ++f;
  for (std::size_t i = 1; i <= m;) {
    if (!elem((f + i) % m)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 <= m && elem((f + j + 1) % m)) ++j;
    std::size_t s = (f + i) % m, t = (f + j) % m;
    i = j + 1;
    Arc a;
    a.start = pts_[s / 2];
    a.closed_start = (s % 2 == 0);
    if (t % 2 == 0) {
      a.end = pts_[t / 2];
      a.closed_end = true;
    } else {
      a.end = pts_[(t / 2 + 1) % k];
      a.closed_end = false;
    }
    out.push_back(a);
  }
  std::sort(out.begin(), out.end(), [](const Arc& x, const Arc& y) { return angle_less(x.start, y.start); });
  return out;
}

bool ArcSet::operator==(const ArcSet& o) const {
  return pts_ == o.pts_ && at_ == o.at_ && gap_ == o.gap_ && all_ == o.all_;
}

std::vector<Arc> arc_boolean(const std::vector<Arc>& a, const std::vector<Arc>& b, ArcOp op) {
  ArcSet sa = ArcSet::from_arcs(a);
  switch (op) {
    case ArcOp::Complement: return sa.complement().arcs();
    case ArcOp::Union:
      return ArcSet::combine(sa, ArcSet::from_arcs(b), [](bool x, bool y) { return x || y; }).arcs();
    case ArcOp::Intersect:
      return ArcSet::combine(sa, ArcSet::from_arcs(b), [](bool x, bool y) { return x && y; }).arcs();
    case ArcOp::Difference:
      return ArcSet::combine(sa, ArcSet::from_arcs(b), [](bool x, bool y) { return x && !y; }).arcs();
  }
  return {};
}

UNormContext UNormContext::make(Direction u, Direction u_star, bool drift) {
  UNormContext c;
  c.u = u;
  c.u_star = u_star;
  c.sigma = angle_between(u, u_star);
  c.drift = drift;
  return c;
}

double u_norm(Site p, const UNormContext& ctx) {
  if (ctx.drift && ctx.sigma > 0.0) {
    double len = ctx.u_star.length();
    double along = double(line_index(p, ctx.u_star)) / len;
    double across = double(line_index(p, ctx.u_star.rot_ccw())) / len;
    return std::fabs(along) + ctx.sigma * std::fabs(across);
  }
  return norm(p);
}

}  // namespace ubp

namespace ubp {

i64 floor_div(i64 a, i64 b) {
  i64 q = a / b, r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) --q;
  return q;
}

i64 ceil_div(i64 a, i64 b) { return -floor_div(-a, b); }

bool positively_spanning(const std::vector<Direction>& dirs) {
  if (dirs.empty()) return false;
  std::vector<Direction> d = dirs;
  std::sort(d.begin(), d.end(), AngleLess{});
  d.erase(std::unique(d.begin(), d.end()), d.end());
  if (d.size() < 3) return false;
  for (std::size_t i = 0; i < d.size(); ++i) {
    Direction s = d[i], e = d[(i + 1) % d.size()];
    if (cross(s.vec(), e.vec()) <= 0) return false;
  }
  return true;
}

LatticePolygon::LatticePolygon(std::vector<Constraint> cs) : cs_(std::move(cs)) {}

bool LatticePolygon::contains(Site p) const {
  for (const auto& c : cs_)
    if (line_index(p, c.u) >= c.bound) return false;
  return true;
}

bool LatticePolygon::real_y_range(i64& lo, i64& hi) const {
  using i128 = __int128;
  bool any = false;
  std::size_t k = cs_.size();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      i128 ai = cs_[i].u.a(), bi = cs_[i].u.b(), ci = cs_[i].bound - 1;
      i128 aj = cs_[j].u.a(), bj = cs_[j].u.b(), cj = cs_[j].bound - 1;
      i128 det = ai * bj - aj * bi;
      if (det == 0) continue;
      i128 xn = ci * bj - cj * bi, yn = ai * cj - aj * ci;
      if (det < 0) {
        det = -det;
        xn = -xn;
        yn = -yn;
      }
      bool ok = true;
      for (std::size_t m = 0; m < k && ok; ++m) {
        i128 am = cs_[m].u.a(), bm = cs_[m].u.b(), cm = cs_[m].bound - 1;
        if (am * xn + bm * yn > cm * det) ok = false;
      }
      if (!ok) continue;
      i64 d = i64(det), y = i64(yn);
      i64 ylo = ceil_div(y, d), yhi = floor_div(y, d);
      if (!any) {
        lo = ylo;
        hi = yhi;
        any = true;
      } else {
        lo = std::min(lo, ylo);
        hi = std::max(hi, yhi);
      }
    }
  }
  return any;
}

std::vector<Row> LatticePolygon::rows() const {
  std::vector<Row> out;
  i64 ylo = 0, yhi = -1;
  if (!real_y_range(ylo, yhi)) return out;
  for (i64 y = ylo; y <= yhi; ++y) {
    i64 lo = std::numeric_limits<i64>::min(), hi = std::numeric_limits<i64>::max();
    bool ok = true;
    for (const auto& c : cs_) {
      i64 a = c.u.a(), b = c.u.b(), rhs = c.bound - 1 - b * y;
      if (a > 0) {
        hi = std::min(hi, floor_div(rhs, a));
      } else if (a < 0) {
        lo = std::max(lo, ceil_div(rhs, a));
      } else if (rhs < 0) {
        ok = false;
        break;
      }
    }
    if (ok && lo <= hi) out.push_back({y, lo, hi});
  }
  return out;
}

std::vector<Site> LatticePolygon::sites() const {
  std::vector<Site> out;
  for (const Row& r : rows())
    for (i64 x = r.lo; x <= r.hi; ++x) out.push_back({x, r.y});
  return out;
}

std::size_t LatticePolygon::size() const {
  std::size_t n = 0;
  for (const Row& r : rows()) n += std::size_t(r.hi - r.lo + 1);
  return n;
}

bool LatticePolygon::empty() const { return rows().empty(); }

BoundingBox LatticePolygon::bbox() const {
  auto rs = rows();
  BoundingBox b{0, 0, -1, -1};
  if (rs.empty()) return b;
  b = {rs.front().lo, rs.front().y, rs.front().hi, rs.back().y};
  for (const Row& r : rs) {
    b.x0 = std::min(b.x0, r.lo);
    b.x1 = std::max(b.x1, r.hi);
  }
  return b;
}

i64 LatticePolygon::max_index(Direction u) const {
  i64 best = std::numeric_limits<i64>::min();
  for (const Row& r : rows())
    best = std::max({best, line_index({r.lo, r.y}, u), line_index({r.hi, r.y}, u)});
  return best;
}

i64 LatticePolygon::min_index(Direction u) const {
  i64 best = std::numeric_limits<i64>::max();
  for (const Row& r : rows())
    best = std::min({best, line_index({r.lo, r.y}, u), line_index({r.hi, r.y}, u)});
  return best;
}

double LatticePolygon::diameter() const {
  std::vector<Site> ends;
  for (const Row& r : rows()) {
    ends.push_back({r.lo, r.y});
    if (r.hi != r.lo) ends.push_back({r.hi, r.y});
  }
  i64 best = 0;
  for (std::size_t i = 0; i < ends.size(); ++i)
    for (std::size_t j = i + 1; j < ends.size(); ++j) best = std::max(best, norm2(ends[i] - ends[j]));
  return std::sqrt(double(best));
}

}  // namespace ubp
