#include "ubp/family.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "ubp/errors.hpp"
#include "ubp/lattice.hpp"

namespace ubp {

UpdateFamily::UpdateFamily(std::vector<Rule> rules, std::string name) : name_(std::move(name)) {
  for (Rule& r : rules) {
    if (r.empty()) throw Error(Errc::InvalidRule, "empty rule");
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    if (std::binary_search(r.begin(), r.end(), Site{0, 0})) throw Error(Errc::InvalidRule, "rule contains the origin");
  }
  std::sort(rules.begin(), rules.end());
  rules.erase(std::unique(rules.begin(), rules.end()), rules.end());
  rules_ = std::move(rules);
}

std::vector<Site> UpdateFamily::support() const {
  std::vector<Site> s;
  for (const Rule& r : rules_) s.insert(s.end(), r.begin(), r.end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

i64 UpdateFamily::reach() const {
  i64 r = 0;
  for (const Rule& rule : rules_)
    for (Site p : rule) r = std::max({r, p.x < 0 ? -p.x : p.x, p.y < 0 ? -p.y : p.y});
  return r;
}

UpdateFamily UpdateFamily::mapped(i64 m00, i64 m01, i64 m10, i64 m11) const {
  std::vector<Rule> out;
  for (const Rule& rule : rules_) {
    Rule r;
    for (Site p : rule) r.push_back({m00 * p.x + m01 * p.y, m10 * p.x + m11 * p.y});
    out.push_back(r);
  }
  return UpdateFamily(out, name_);
}

namespace families {

UpdateFamily threshold(const std::vector<Site>& nbhd, int r, std::string name) {
  std::vector<Rule> rules;
  std::size_t n = nbhd.size();
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + std::min<std::size_t>(std::size_t(r), n), true);
  do {
    Rule rule;
    for (std::size_t i = 0; i < n; ++i)
      if (pick[i]) rule.push_back(nbhd[i]);
    rules.push_back(rule);
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return UpdateFamily(rules, std::move(name));
}

UpdateFamily two_neighbour() { return threshold({{1, 0}, {-1, 0}, {0, 1}, {0, -1}}, 2, "two_neighbour"); }

UpdateFamily duarte() { return threshold({{-1, 0}, {0, 1}, {0, -1}}, 2, "duarte"); }

UpdateFamily van_enter_hulshof() {
  return threshold({{-2, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 0}, {2, 0}}, 3, "van_enter_hulshof");
}

UpdateFamily all_singletons() { return threshold({{1, 0}, {-1, 0}, {0, 1}, {0, -1}}, 1, "all_singletons"); }

UpdateFamily three_of_four() { return threshold({{1, 0}, {-1, 0}, {0, 1}, {0, -1}}, 3, "three_of_four"); }

}  // namespace families

double nu(const UpdateFamily& U) {
  if (U.empty()) throw Error(Errc::EmptyFamily, "family has no rules");
  i64 best = 0;
  for (const Rule& rule : U.rules()) {
    std::vector<Site> pts = rule;
    pts.push_back({0, 0});
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::max(best, norm2(pts[i] - pts[j]));
  }
  return std::sqrt(double(best));
}

bool is_stable(Direction u, const UpdateFamily& U) {
  for (const Rule& rule : U.rules()) {
    bool inside = true;
    for (Site x : rule)
      if (dot_sign(x, u) >= 0) {
        inside = false;
        break;
      }
    if (inside) return false;
  }
  return true;
}

std::vector<Direction> StableSet::isolated() const {
  std::vector<Direction> out;
  for (const Arc& a : arcs)
    if (a.is_point()) out.push_back(a.start);
  return out;
}

ArcSet StableSet::nondegenerate() const {
  std::vector<Arc> keep;
  for (const Arc& a : arcs)
    if (!a.is_point()) keep.push_back(a);
  return ArcSet::from_arcs(keep);
}

StableSet stable_set(const UpdateFamily& U) {
  if (U.empty()) throw Error(Errc::EmptyFamily, "family has no rules");
  auto orf = [](bool x, bool y) { return x || y; };
  auto andf = [](bool x, bool y) { return x && y; };
  ArcSet bad;
  for (const Rule& rule : U.rules()) {
    ArcSet inter = ArcSet::whole();
    for (Site x : rule) {
      Direction d(x.x, x.y);
      inter = ArcSet::combine(inter, ArcSet::from_arc(Arc::open(d.rot_ccw(), d.rot_cw())), andf);
    }
    bad = ArcSet::combine(bad, inter, orf);
  }
  StableSet s;
  s.set = bad.complement();
  s.arcs = s.set.arcs();
  return s;
}

bool DifficultyResult::operator<(const DifficultyResult& o) const {
  if (status != o.status) return int(status) < int(o.status);
  return status == DiffStatus::Finite && value < o.value;
}

std::string to_string(const DifficultyResult& r) {
  switch (r.status) {
    case DiffStatus::Finite: return std::to_string(r.value);
    case DiffStatus::InfiniteWithinWindow:
      return "INFINITE_WITHIN_WINDOW(window=" + std::to_string(r.window) + ",size<=" + std::to_string(r.value) + ")";
    case DiffStatus::Infinite: return "INFINITE";
  }
  return "?";
}

namespace {

// Canonical candidate sets in line-frame coordinates: j in [0,w], i-span <= 2w,
// first site in (j,i) order at i = 0.
class CandidateSets {
 public:
  explicit CandidateSets(int w) : w_(w) {
    for (i64 j = 0; j <= w; ++j)
      for (i64 i = -2 * w; i <= 2 * w; ++i) pos_.push_back({i, j});
  }

  // Number of canonical sets of size k, stopping once it exceeds cap.
  std::size_t count(int k, std::size_t cap) const {
    std::size_t n = 0;
    visit(k, [&](const std::vector<Site>&) { return ++n > cap; });
    return n;
  }

  // Calls f on each canonical set of size k in lexicographic order; f returns true to stop.
  bool visit(int k, const std::function<bool(const std::vector<Site>&)>& f) const {
    std::vector<Site> cur;
    for (std::size_t s = 0; s < pos_.size(); ++s) {
      if (pos_[s].x != 0) continue;
      cur = {pos_[s]};
      if (rec(s + 1, k - 1, 0, 0, cur, f)) return true;
    }
    return false;
  }

 private:
  bool rec(std::size_t from, int left, i64 lo, i64 hi, std::vector<Site>& cur,
           const std::function<bool(const std::vector<Site>&)>& f) const {
    if (left == 0) return f(cur);
    for (std::size_t s = from; s < pos_.size(); ++s) {
      i64 nlo = std::min(lo, pos_[s].x), nhi = std::max(hi, pos_[s].x);
      if (nhi - nlo > 2 * w_) continue;
      cur.push_back(pos_[s]);
      bool stop = rec(s + 1, left - 1, nlo, nhi, cur, f);
      cur.pop_back();
      if (stop) return true;
    }
    return false;
  }

  int w_;
  std::vector<Site> pos_;
};

bool side_infinite(const StripReport& r, Side side) {
  return (side == Side::Plus ? r.plus : r.minus) == StripVerdict::InfiniteLine;
}

}  // namespace

DifficultyResult difficulty_side(Direction u, Side side, const UpdateFamily& U, int window) {
  DifficultyOptions opt;
  opt.window = window;
  return difficulty_side(u, side, U, opt);
}

DifficultyResult difficulty_side(Direction u, Side side, const UpdateFamily& U, const DifficultyOptions& opt) {
  DifficultyResult res;
  res.window = opt.window;
  if (!is_stable(u, U)) return res;
  LineFrame frame(u);
  CandidateSets sets(opt.window);
  StripOptions sopt;
  sopt.side = side;
  for (int k = 1; k <= opt.max_size; ++k) {
    if (sets.count(k, opt.candidate_cap) > opt.candidate_cap) {
      if (opt.throw_on_cap)
        throw Error(Errc::SearchBudgetExceeded, "more than " + std::to_string(opt.candidate_cap) +
                                                    " candidate sets of size " + std::to_string(k));
      res.status = DiffStatus::InfiniteWithinWindow;
      res.value = k - 1;
      return res;
    }
    std::vector<Site> found;
    sets.visit(k, [&](const std::vector<Site>& zf) {
      std::vector<Site> z;
      for (Site q : zf) z.push_back(frame.from_frame(q));
      if (!side_infinite(strip_decision(u, z, U, sopt), side)) return false;
      found = z;
      return true;
    });
    if (!found.empty()) {
      std::sort(found.begin(), found.end());
      res.value = k;
      res.witness = found;
      return res;
    }
  }
  res.status = DiffStatus::InfiniteWithinWindow;
  res.value = opt.max_size;
  return res;
}

namespace {

Difficulty combine_sides(DifficultyResult plus, DifficultyResult minus) {
  Difficulty d;
  d.plus = plus;
  d.minus = minus;
  d.alpha_bar = std::min(plus, minus);
  if (plus.finite() && minus.finite())
    d.alpha = d.alpha_bar;
  else
    d.alpha = std::max(plus, minus);
  return d;
}

}  // namespace

Difficulty difficulty(Direction u, const UpdateFamily& U, int window) {
  DifficultyOptions opt;
  opt.window = window;
  return difficulty(u, U, opt);
}

Difficulty difficulty(Direction u, const UpdateFamily& U, const DifficultyOptions& opt) {
  return combine_sides(difficulty_side(u, Side::Plus, U, opt), difficulty_side(u, Side::Minus, U, opt));
}

std::string to_string(Kind k) {
  switch (k) {
    case Kind::Subcritical: return "Subcritical";
    case Kind::Critical: return "Critical";
    case Kind::Supercritical: return "Supercritical";
  }
  return "?";
}

const Difficulty* Classification::evidence_for(Direction u) const {
  for (const auto& e : evidence)
    if (e.u == u) return &e.difficulty;
  return nullptr;
}

namespace {

// Membership of directions immediately clockwise of d.
bool before(const ArcSet& S, Direction d) {
  const auto& pts = S.breakpoints();
  if (pts.empty()) return S.is_whole();
  auto it = std::lower_bound(pts.begin(), pts.end(), d, AngleLess{});
  std::size_t i = std::size_t(it - pts.begin());
  std::size_t prev = (i == 0 ? pts.size() : i) - 1;
  return S.after(pts[prev]);
}

bool has_gap_of_half_circle(const ArcSet& S) {
  for (const Arc& g : S.complement().arcs()) {
    if (g.full) return true;
    if (cross(g.start.vec(), g.end.vec()) <= 0) return true;
  }
  return false;
}

ArcSet open_semicircle(Direction c) { return ArcSet::from_arc(Arc::open(c.rot_cw(), c.rot_ccw())); }

bool in_open_semicircle(Direction c, Direction p) { return strictly_between(c.rot_cw(), p, c.rot_ccw()); }

bool in_closed_semicircle(Direction c, Direction p) { return dot(c.vec(), p.vec()) >= 0; }

bool disjoint(const ArcSet& a, const ArcSet& b) {
  return ArcSet::combine(a, b, [](bool x, bool y) { return x && y; }).empty();
}

DifficultyResult infinite() {
  DifficultyResult r;
  r.status = DiffStatus::Infinite;
  return r;
}

class Evaluator {
 public:
  Evaluator(const UpdateFamily& U, const StableSet& S, const DifficultyOptions& opt, Classification& c)
      : U_(U), S_(S), opt_(opt), c_(c), iso_(S.isolated()) {}

  bool isolated(Direction u) const { return std::find(iso_.begin(), iso_.end(), u) != iso_.end(); }

  // Both sides, with sides forced infinite next to a stable arc.
  const Difficulty& sided(Direction u) {
    if (const Difficulty* d = c_.evidence_for(u)) return *d;
    Difficulty d;
    if (!S_.contains(u) || isolated(u)) {
      d = difficulty(u, U_, opt_);
    } else {
      bool minus_inf = S_.set.after(u), plus_inf = before(S_.set, u);
      DifficultyResult plus = plus_inf ? infinite() : difficulty_side(u, Side::Plus, U_, opt_);
      DifficultyResult minus = minus_inf ? infinite() : difficulty_side(u, Side::Minus, U_, opt_);
      d = combine_sides(plus, minus);
    }
    c_.evidence.push_back({u, d});
    return c_.evidence.back().difficulty;
  }

  // alpha(u) without searching non-isolated directions.
  DifficultyResult alpha(Direction u) {
    if (!S_.contains(u)) {
      DifficultyResult r;
      r.window = opt_.window;
      return r;
    }
    if (!isolated(u)) return infinite();
    return sided(u).alpha;
  }

 private:
  const UpdateFamily& U_;
  const StableSet& S_;
  DifficultyOptions opt_;
  Classification& c_;
  std::vector<Direction> iso_;
};

std::vector<Direction> sorted_unique(std::vector<Direction> v) {
  std::sort(v.begin(), v.end(), AngleLess{});
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<Direction> arc_samples(const Arc& a, int depth) {
  std::vector<Direction> out;
  if (a.full) {
    out = {Direction(1, 0), Direction(0, 1), Direction(-1, 0), Direction(0, -1)};
    return out;
  }
  Direction mid = interior_direction(a.start, a.end);
  out.push_back(mid);
  Direction lo = mid, hi = mid;
  for (int i = 0; i < depth; ++i) {
    lo = interior_direction(a.start, lo);
    hi = interior_direction(hi, a.end);
    out.push_back(lo);
    out.push_back(hi);
  }
  return out;
}

}  // namespace

Classification classify(const UpdateFamily& U, int window) {
  DifficultyOptions opt;
  opt.window = window;
  return classify(U, opt);
}

Classification classify(const UpdateFamily& U, const DifficultyOptions& opt_in) {
  if (U.empty()) throw Error(Errc::EmptyFamily, "family has no rules");
  DifficultyOptions opt = opt_in;
  opt.throw_on_cap = false;
  Classification c;
  c.stable = stable_set(U);
  const ArcSet& S = c.stable.set;
  if (S.empty() || has_gap_of_half_circle(S)) {
    c.kind = Kind::Supercritical;
    return c;
  }
  ArcSet Sp = c.stable.nondegenerate();
  if (!Sp.empty() && !has_gap_of_half_circle(Sp)) {
    c.kind = Kind::Subcritical;
    return c;
  }
  c.kind = Kind::Critical;
  Evaluator ev(U, c.stable, opt, c);
  std::vector<Direction> iso = c.stable.isolated();
  for (Direction p : iso) ev.sided(p);

  std::vector<Direction> crit;
  std::vector<Direction> marks = iso;
  for (Direction p : Sp.breakpoints()) marks.push_back(p);
  for (Direction p : marks) {
    crit.push_back(p.rot_ccw());
    crit.push_back(p.rot_cw());
  }
  crit = sorted_unique(crit);
  std::vector<Direction> centres = crit;
  for (std::size_t i = 0; i < crit.size(); ++i)
    centres.push_back(interior_direction(crit[i], crit[(i + 1) % crit.size()]));
  centres = sorted_unique(centres);

  struct Candidate {
    Direction c;
    DifficultyResult max;
    DifficultyResult resolved_max;
    bool unresolved = false;
  };
  std::vector<Candidate> valid;
  for (Direction ctr : centres) {
    if (!disjoint(Sp, open_semicircle(ctr))) continue;
    Candidate cand{ctr, {}, {}, false};
    for (Direction p : iso) {
      if (!in_open_semicircle(ctr, p)) continue;
      DifficultyResult a = ev.alpha(p);
      cand.max = std::max(cand.max, a);
      if (a.finite())
        cand.resolved_max = std::max(cand.resolved_max, a);
      else if (a.status == DiffStatus::InfiniteWithinWindow)
        cand.unresolved = true;
    }
    valid.push_back(cand);
  }
  if (valid.empty()) throw Error(Errc::NotCritical, "no open semicircle avoids the stable arcs");
  DifficultyResult best = valid.front().max;
  for (const auto& v : valid) best = std::min(best, v.max);
  if (!best.finite()) {
    std::string ev_text;
    for (const auto& e : c.evidence) ev_text += " " + to_string(e.u) + ":" + to_string(e.difficulty.alpha);
    throw Error(Errc::DifficultyWindowExhausted, "no semicircle with resolved difficulty;" + ev_text);
  }
  c.alpha = best.value;
  c.alpha_resolved = true;
  for (const auto& v : valid)
    if (v.unresolved && v.resolved_max.value < best.value) c.alpha_resolved = false;

  for (Direction ctr : centres) {
    if (!disjoint(Sp, ArcSet::from_arc(Arc::closed(ctr.rot_cw(), ctr.rot_ccw())))) continue;
    bool ok = true;
    for (Direction p : iso)
      if (in_closed_semicircle(ctr, p)) {
        DifficultyResult a = ev.alpha(p);
        if (!a.finite() || a.value > c.alpha) ok = false;
      }
    if (ok) {
      c.balanced = true;
      break;
    }
  }

  if (c.balanced) {
    std::vector<Direction> pool_iso, pool_arc;
    for (Direction p : iso) {
      const Difficulty& d = ev.sided(p);
      if (!d.alpha_bar.finite() || d.alpha_bar.value >= c.alpha) pool_iso.push_back(p);
    }
    std::vector<Arc> nd;
    for (const Arc& a : c.stable.arcs)
      if (!a.is_point()) nd.push_back(a);
    auto all = [&] {
      std::vector<Direction> v = pool_iso;
      v.insert(v.end(), pool_arc.begin(), pool_arc.end());
      return v;
    };
    for (int depth = 0; depth <= 12; ++depth) {
      pool_arc.clear();
      for (const Arc& a : nd) {
        auto s = arc_samples(a, depth);
        pool_arc.insert(pool_arc.end(), s.begin(), s.end());
      }
      pool_arc = sorted_unique(pool_arc);
      if (positively_spanning(all())) break;
    }
    if (!positively_spanning(all())) throw Error(Errc::NotCritical, "no spanning set of hard directions found");
    for (std::size_t i = pool_arc.size(); i-- > 0;) {
      Direction d = pool_arc[i];
      pool_arc.erase(pool_arc.begin() + std::ptrdiff_t(i));
      if (!positively_spanning(all())) pool_arc.insert(pool_arc.begin() + std::ptrdiff_t(i), d);
    }
    for (std::size_t i = pool_iso.size(); i-- > 0;) {
      Direction d = pool_iso[i];
      pool_iso.erase(pool_iso.begin() + std::ptrdiff_t(i));
      if (!positively_spanning(all())) pool_iso.insert(pool_iso.begin() + std::ptrdiff_t(i), d);
    }
    c.droplet_directions = sorted_unique(all());
    return c;
  }

  for (const auto& v : valid) {
    if (v.max.status != DiffStatus::Finite || v.max.value != c.alpha) continue;
    Direction us = v.c.rot_ccw();
    DifficultyResult a1 = ev.alpha(us), a2 = ev.alpha(-us);
    auto exceeds = [&](const DifficultyResult& a) { return !a.finite() || a.value >= c.alpha + 1; };
    if (!exceeds(a1) || !exceeds(a2)) continue;
    Direction cs = v.c;
    std::optional<Direction> ur, ul;
    double best_r = 1e9, best_l = 1e9;
    for (Direction p : iso)
      if (in_open_semicircle(cs, p)) {
        DifficultyResult a = ev.alpha(p);
        double ang = angle_between(p, cs);
        if (a.finite() && a.value == c.alpha && ang < best_r) {
          best_r = ang;
          ur = p;
        }
      }
    std::vector<Direction> left = iso;
    if (S.contains(-cs)) left.push_back(-cs);
    ArcSet pieces = ArcSet::combine(Sp, open_semicircle(-cs), [](bool x, bool y) { return x && y; });
    for (const Arc& a : pieces.arcs()) {
      if (a.full) continue;
      left.push_back(interior_direction(a.start, a.end));
      if (a.closed_start) left.push_back(a.start);
      if (a.closed_end) left.push_back(a.end);
    }
    for (Direction p : sorted_unique(left)) {
      if (!in_open_semicircle(-cs, p) || !S.contains(p)) continue;
      double ang = angle_between(p, -cs);
      if (ang >= best_l) continue;
      const Difficulty& d = ev.sided(p);
      if (d.alpha_bar.finite() && d.alpha_bar.value < c.alpha) continue;
      best_l = ang;
      ul = p;
    }
    if (!ur || !ul) continue;
    auto drifts = [&](Direction u) {
      const Difficulty& d = ev.sided(u);
      return d.plus.finite() != d.minus.finite();
    };
    bool d_star = drifts(us), d_anti = drifts(-us);
    c.drift = d_star || d_anti;
    if (d_anti && !d_star) {
      us = -us;
      std::swap(ur, ul);
    }
    c.u_star = us;
    c.u_left = ul;
    c.u_right = ur;
    c.droplet_directions = sorted_unique({us, -us, *ul, *ur});
    break;
  }
  return c;
}

std::vector<Direction> quasi_stable_set(const UpdateFamily& U) {
  if (U.empty()) throw Error(Errc::EmptyFamily, "family has no rules");
  std::vector<Direction> q;
  for (Site x : U.support()) {
    Direction d(x.x, x.y);
    q.push_back(d.rot_ccw());
    q.push_back(d.rot_cw());
  }
  return sorted_unique(q);
}

std::vector<std::pair<Direction, Direction>> consecutive_pairs(const StableSet& S, const std::vector<Direction>& Q) {
  std::vector<Arc> pts;
  for (Direction q : Q) pts.push_back(Arc::point(q));
  ArcSet all = ArcSet::combine(S.set, ArcSet::from_arcs(pts), [](bool x, bool y) { return x || y; });
  std::vector<std::pair<Direction, Direction>> out;
  for (const Arc& g : all.complement().arcs())
    if (!g.full) out.emplace_back(g.start, g.end);
  return out;
}

bool closed_double_half_plane_rule(const UpdateFamily& U, Direction u, Direction v) {
  for (const Rule& rule : U.rules()) {
    bool ok = true;
    for (Site x : rule)
      if (line_index(x, u) > 0 || line_index(x, v) > 0) {
        ok = false;
        break;
      }
    if (ok) return true;
  }
  return false;
}

bool voracious_check(const std::vector<Site>& Z, Direction u, const UpdateFamily& U, int alpha_cap) {
  if (int(Z.size()) > alpha_cap) throw Error(Errc::InvalidRule, "set larger than alpha_cap");
  StripReport r = strip_decision(u, Z, U);
  if (r.plus == StripVerdict::InfiniteLine || r.minus == StripVerdict::InfiniteLine) return true;
  if (r.plus == StripVerdict::BandExceeded || r.minus == StripVerdict::BandExceeded)
    throw Error(Errc::StripHeightExceeded, "closure escaped the band");
  return false;
}

DifficultyResult alpha_star(const UpdateFamily& U, Direction u_star, int window) {
  DifficultyResult res;
  res.window = window;
  if (!is_stable(u_star, U)) return res;
  LineFrame frame(u_star);
  UpdateFamily Uf = U.mapped(frame.up.y, -frame.up.x, u_star.a(), u_star.b());
  i64 reach = std::max<i64>(1, Uf.reach());
  for (int k = 1; k <= window; ++k) {
    std::vector<Site> z;
    for (int i = 0; i < k; ++i) z.push_back({i, 0});
    i64 band = 4 * i64(std::ceil(nu(U))) * (k + 1) + reach;
    Window w = Window::make_box(BoundingBox{-8 * reach - 2 * band, 0, k + 8 * reach + 2 * band, band},
                                HalfPlane{Direction(0, 1), 0});
    LatticeState st(Uf, w);
    for (Site p : z) st.infect(p);
    st.run();
    if (st.infected({k, 0})) {
      res.value = k;
      for (Site p : z) res.witness.push_back(frame.from_frame(p));
      std::sort(res.witness.begin(), res.witness.end());
      return res;
    }
  }
  res.status = DiffStatus::InfiniteWithinWindow;
  res.value = window;
  return res;
}

namespace {

RangeBound range_search(const UpdateFamily& U, Direction u, int set_size, int window,
                        const std::function<double(Site)>& metric) {
  RangeBound rb;
  rb.direction = u;
  if (set_size <= 0) {
    rb.sets_examined = 1;
    return rb;
  }
  LineFrame frame(u);
  CandidateSets sets(window);
  i64 reach = std::max<i64>(1, U.reach());
  sets.visit(set_size, [&](const std::vector<Site>& zf) {
    std::vector<Site> z;
    for (Site q : zf) z.push_back(frame.from_frame(q));
    ++rb.sets_examined;
    i64 x0 = z[0].x, x1 = z[0].x, y0 = z[0].y, y1 = z[0].y;
    for (Site p : z) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
    for (i64 margin = 8 * reach + 8;; margin *= 2) {
      if (margin > 4096) throw Error(Errc::StripHeightExceeded, "closure of H_u with a small set does not stabilize");
      Window w = Window::make_box(BoundingBox{x0 - margin, y0 - margin, x1 + margin, y1 + margin}, HalfPlane{u, 0});
      std::vector<Site> cl = closure(z, w, U);
      bool edge = false;
      for (Site p : cl)
        if (p.x < w.box.x0 + 2 * reach || p.x > w.box.x1 - 2 * reach || p.y < w.box.y0 + 2 * reach ||
            p.y > w.box.y1 - 2 * reach)
          edge = true;
      if (edge) continue;
      for (Site y : cl) {
        double d = std::numeric_limits<double>::infinity();
        for (Site q : z) d = std::min(d, metric(y - q));
        if (d > rb.value) {
          rb.value = d;
          rb.witness = z;
          rb.direction = u;
        }
      }
      break;
    }
    return false;
  });
  return rb;
}

}  // namespace

RangeBound rho_bound(const UpdateFamily& U, const std::vector<Direction>& S_B, int alpha, int window) {
  RangeBound total;
  for (Direction u : S_B) {
    RangeBound r = range_search(U, u, alpha - 1, window, [](Site d) { return norm(d); });
    total.sets_examined += r.sets_examined;
    if (!total.direction || r.value > total.value) {
      total.value = r.value;
      total.witness = r.witness;
      total.direction = r.direction;
    }
  }
  return total;
}

RangeBound rho_u_bound(const UpdateFamily& U, Direction u, Direction u_star, bool drift, int gamma, int window) {
  UNormContext ctx = UNormContext::make(u, u_star, drift);
  return range_search(U, u, gamma - 1, window, [&](Site d) { return u_norm(d, ctx); });
}

double kappa(const UpdateFamily& U, const Classification& c, double rho_hat) {
  if (c.kind != Kind::Critical) throw Error(Errc::NotCritical, "kappa is defined for critical families only");
  double n = nu(U);
  return c.balanced ? 2.0 * (rho_hat + n) : 3.0 * n;
}

int stable_interval_side(const StableSet& S, Direction u) {
  bool a = S.set.after(u), b = before(S.set, u);
  if (a && !b) return +1;
  if (b && !a) return -1;
  return 0;
}

Direction iceberg_u0(const UpdateFamily& U, Direction u_star, const StableSet& S) {
  if (!S.contains(u_star) || stable_interval_side(S, u_star) != +1)
    throw Error(Errc::NoDriftDirection, "no stable interval counterclockwise of " + to_string(u_star));
  DifficultyOptions opt;
  opt.window = 4;
  opt.max_size = 3;
  opt.throw_on_cap = false;
  if (!difficulty_side(u_star, Side::Plus, U, opt).finite())
    throw Error(Errc::NoDriftDirection, "plus side of " + to_string(u_star) + " is not finite");
  std::vector<Site> pts = U.support();
  pts.push_back({0, 0});
  std::vector<Direction> forbidden;
  for (Site x : pts)
    for (Site y : pts) {
      if (x == y) continue;
      Direction d((x - y).x, (x - y).y);
      forbidden.push_back(d.rot_ccw());
      forbidden.push_back(d.rot_cw());
    }
  // End of the stable interval counterclockwise of u_star.
  Direction bound = -u_star;
  for (const Arc& a : S.arcs)
    if (!a.is_point() && a.contains(u_star)) bound = a.end;
  for (Direction v : forbidden)
    if (v != u_star && strictly_between(u_star, v, bound)) bound = v;
  return interior_direction(u_star, bound);
}

}  // namespace ubp
