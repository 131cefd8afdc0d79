#include "ubp/droplets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "ubp/errors.hpp"

namespace ubp {

// ---- RowSet

void RowSet::normalize(std::vector<Interval>& v) {
  std::sort(v.begin(), v.end());
  std::vector<Interval> out;
  for (const Interval& iv : v) {
    if (!out.empty() && iv.first <= out.back().second + 1)
      out.back().second = std::max(out.back().second, iv.second);
    else
      out.push_back(iv);
  }
  v = std::move(out);
}

RowSet RowSet::from_sites(const std::vector<Site>& sites) {
  std::vector<Site> s = sites;
  std::sort(s.begin(), s.end(), [](Site p, Site q) { return std::tie(p.y, p.x) < std::tie(q.y, q.x); });
  RowSet r;
  for (Site p : s) {
    if (r.rows_.empty() || r.rows_.back().first != p.y) r.rows_.push_back({p.y, {}});
    auto& iv = r.rows_.back().second;
    if (!iv.empty() && p.x <= iv.back().second + 1)
      iv.back().second = std::max(iv.back().second, p.x);
    else
      iv.push_back({p.x, p.x});
  }
  return r;
}

RowSet RowSet::from_polygon(const LatticePolygon& P) {
  RowSet r;
  for (const Row& row : P.rows()) r.rows_.push_back({row.y, {{row.lo, row.hi}}});
  return r;
}

bool RowSet::contains(Site p) const {
  auto it = std::lower_bound(rows_.begin(), rows_.end(), p.y, [](const auto& row, i64 y) { return row.first < y; });
  if (it == rows_.end() || it->first != p.y) return false;
  for (const Interval& iv : it->second)
    if (p.x >= iv.first && p.x <= iv.second) return true;
  return false;
}

std::size_t RowSet::size() const {
  std::size_t n = 0;
  for (const auto& row : rows_)
    for (const Interval& iv : row.second) n += std::size_t(iv.second - iv.first + 1);
  return n;
}

std::vector<Site> RowSet::sites() const {
  std::vector<Site> out;
  for (const auto& row : rows_)
    for (const Interval& iv : row.second)
      for (i64 x = iv.first; x <= iv.second; ++x) out.push_back({x, row.first});
  std::sort(out.begin(), out.end());
  return out;
}

BoundingBox RowSet::bbox() const {
  BoundingBox b{0, 0, -1, -1};
  if (rows_.empty()) return b;
  b = {rows_.front().second.front().first, rows_.front().first, rows_.front().second.back().second,
       rows_.back().first};
  for (const auto& row : rows_) {
    b.x0 = std::min(b.x0, row.second.front().first);
    b.x1 = std::max(b.x1, row.second.back().second);
  }
  return b;
}

RowSet RowSet::minkowski(const RowSet& o) const {
  std::map<i64, std::vector<Interval>> acc;
  for (const auto& ra : rows_)
    for (const auto& rb : o.rows_) {
      auto& dst = acc[ra.first + rb.first];
      for (const Interval& a : ra.second)
        for (const Interval& b : rb.second) dst.push_back({a.first + b.first, a.second + b.second});
    }
  RowSet r;
  for (auto& [y, v] : acc) {
    normalize(v);
    r.rows_.push_back({y, std::move(v)});
  }
  return r;
}

RowSet RowSet::reflected() const {
  RowSet r;
  for (auto it = rows_.rbegin(); it != rows_.rend(); ++it) {
    std::vector<Interval> v;
    for (auto iv = it->second.rbegin(); iv != it->second.rend(); ++iv) v.push_back({-iv->second, -iv->first});
    r.rows_.push_back({-it->first, std::move(v)});
  }
  return r;
}

RowSet RowSet::intersect(const RowSet& o) const {
  RowSet r;
  auto a = rows_.begin(), b = o.rows_.begin();
  while (a != rows_.end() && b != o.rows_.end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      std::vector<Interval> v;
      auto p = a->second.begin(), q = b->second.begin();
      while (p != a->second.end() && q != b->second.end()) {
        i64 lo = std::max(p->first, q->first), hi = std::min(p->second, q->second);
        if (lo <= hi) v.push_back({lo, hi});
        if (p->second < q->second)
          ++p;
        else
          ++q;
      }
      if (!v.empty()) r.rows_.push_back({a->first, std::move(v)});
      ++a;
      ++b;
    }
  }
  return r;
}

bool RowSet::intersects(const RowSet& o) const { return !intersect(o).empty(); }

std::optional<i64> RowSet::min_index(Direction u) const {
  std::optional<i64> best;
  for (const auto& row : rows_)
    for (const Interval& iv : row.second) {
      i64 v = std::min(line_index({iv.first, row.first}, u), line_index({iv.second, row.first}, u));
      if (!best || v < *best) best = v;
    }
  return best;
}

// ---- Droplets

namespace {

std::vector<Direction> sorted_directions(std::vector<Direction> T) {
  std::sort(T.begin(), T.end(), AngleLess());
  T.erase(std::unique(T.begin(), T.end()), T.end());
  return T;
}

double set_projection(const std::vector<Row>& rows, Direction u) {
  if (rows.empty()) return 0.0;
  i64 lo = std::numeric_limits<i64>::max(), hi = std::numeric_limits<i64>::min();
  for (const Row& r : rows)
    for (i64 x : {r.lo, r.hi}) {
      i64 v = line_index({x, r.y}, u);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  return double(hi - lo) / u.length();
}

std::vector<Row> rows_of(const std::vector<Site>& K) {
  std::vector<Row> out;
  for (Site p : K) out.push_back({p.y, p.x, p.x});
  return out;
}

}  // namespace

LatticePolygon Droplet::polygon() const {
  std::vector<LatticePolygon::Constraint> cs;
  for (std::size_t k = 0; k < directions.size(); ++k) cs.push_back({directions[k], offsets[k]});
  return LatticePolygon(std::move(cs));
}

bool Droplet::contains(Site p) const {
  for (std::size_t k = 0; k < directions.size(); ++k)
    if (line_index(p, directions[k]) >= offsets[k]) return false;
  return true;
}

std::vector<Site> Droplet::sites() const { return polygon().sites(); }

double Droplet::projection(Direction u) const { return set_projection(polygon().rows(), u); }

Droplet Droplet::translated(Site x) const {
  Droplet d = *this;
  for (std::size_t k = 0; k < directions.size(); ++k) d.offsets[k] += line_index(x, directions[k]);
  return d;
}

Droplet Droplet::tightened() const {
  LatticePolygon P = polygon();
  if (P.empty()) return *this;
  Droplet d = *this;
  for (std::size_t k = 0; k < directions.size(); ++k) d.offsets[k] = P.max_index(directions[k]) + 1;
  return d;
}

std::string to_string(const Droplet& D) {
  std::ostringstream os;
  os << "{";
  for (std::size_t k = 0; k < D.directions.size(); ++k)
    os << (k ? ", " : "") << to_string(D.directions[k]) << "<" << D.offsets[k];
  os << "}";
  return os.str();
}

double projection(const std::vector<Site>& K, Direction u) { return set_projection(rows_of(K), u); }

double diameter(const std::vector<Site>& K) {
  i64 best = 0;
  for (std::size_t i = 0; i < K.size(); ++i)
    for (std::size_t j = i + 1; j < K.size(); ++j) best = std::max(best, norm2(K[i] - K[j]));
  return std::sqrt(double(best));
}

Droplet minimal_droplet(const std::vector<Site>& K, const std::vector<Direction>& T) {
  if (!positively_spanning(T)) throw Error(Errc::UnboundedDroplet, "droplet directions are not positively spanning");
  if (K.empty()) throw Error(Errc::InvalidRule, "droplet of an empty set");
  Droplet d;
  d.directions = sorted_directions(T);
  for (Direction u : d.directions) {
    i64 m = std::numeric_limits<i64>::min();
    for (Site p : K) m = std::max(m, line_index(p, u));
    d.offsets.push_back(m + 1);
  }
  return d;
}

Droplet ball_droplet(double radius, const std::vector<Direction>& T) {
  if (!positively_spanning(T)) throw Error(Errc::UnboundedDroplet, "droplet directions are not positively spanning");
  Droplet d;
  d.directions = sorted_directions(T);
  for (Direction u : d.directions) d.offsets.push_back(i64(std::floor(radius * u.length())) + 1);
  return d.tightened();
}

double hull_stretch(const std::vector<Direction>& T) {
  if (!positively_spanning(T)) throw Error(Errc::UnboundedDroplet, "droplet directions are not positively spanning");
  std::vector<std::pair<double, double>> n;
  for (Direction u : T) n.push_back({double(u.a()) / u.length(), double(u.b()) / u.length()});
  const int steps = 2048;
  double best = 1.0;
  for (int s = 0; s < steps; ++s) {
    double th = 2 * M_PI * s / steps, vx = std::cos(th), vy = std::sin(th);
    std::vector<double> h;
    for (auto [a, b] : n) h.push_back(std::max(0.0, a * vx + b * vy));
    std::vector<std::pair<double, double>> verts;
    for (std::size_t i = 0; i < n.size(); ++i)
      for (std::size_t j = i + 1; j < n.size(); ++j) {
        double det = n[i].first * n[j].second - n[j].first * n[i].second;
        if (std::abs(det) < 1e-12) continue;
        double x = (h[i] * n[j].second - h[j] * n[i].second) / det;
        double y = (n[i].first * h[j] - n[j].first * h[i]) / det;
        bool ok = true;
        for (std::size_t m = 0; m < n.size() && ok; ++m) ok = n[m].first * x + n[m].second * y <= h[m] + 1e-9;
        if (ok) verts.push_back({x, y});
      }
    for (std::size_t i = 0; i < verts.size(); ++i)
      for (std::size_t j = i + 1; j < verts.size(); ++j)
        best = std::max(best, std::hypot(verts[i].first - verts[j].first, verts[i].second - verts[j].second));
  }
  return best * (1 + 1e-6);
}

// ---- Icebergs

LatticePolygon Iceberg::polygon() const {
  return LatticePolygon({{u0, bound_u0}, {u_star, bound_u_star}, {-u, 1}});
}

Iceberg smallest_iceberg(const std::vector<Site>& X, Direction u, Direction u0, Direction u_star) {
  if (u == u_star || u == u0 || !positively_spanning({u0, u_star, -u}))
    throw Error(Errc::InvalidDirection, "iceberg direction must lie strictly between u* and u0");
  Iceberg J{u, u0, u_star, std::numeric_limits<i64>::min(), std::numeric_limits<i64>::min()};
  bool any = false;
  for (Site p : X) {
    if (line_index(p, u) < 0) continue;
    any = true;
    J.bound_u0 = std::max(J.bound_u0, line_index(p, u0) + 1);
    J.bound_u_star = std::max(J.bound_u_star, line_index(p, u_star) + 1);
  }
  if (!any) throw Error(Errc::InvalidRule, "set lies inside the half-plane");
  return J;
}

double height(const LatticePolygon& P, Direction u_star) { return set_projection(P.rows(), u_star); }
double width(const LatticePolygon& P, Direction u_star) { return set_projection(P.rows(), u_star.rot_ccw()); }

// ---- Covering

std::vector<std::vector<Site>> alpha_clusters(const std::vector<Site>& K, int alpha, double kappa) {
  std::vector<Site> rest = K;
  std::sort(rest.begin(), rest.end());
  rest.erase(std::unique(rest.begin(), rest.end()), rest.end());
  std::vector<std::vector<Site>> out;
  if (alpha < 1) return out;
  std::vector<Site> nb = disc(kappa);
  while (true) {
    bool found = false;
    for (const auto& comp : strong_components(rest, kappa)) {
      if (comp.size() < std::size_t(alpha)) continue;
      // Breadth-first prefix from the smallest site is connected.
      std::vector<Site> cluster{comp.front()};
      for (std::size_t h = 0; h < cluster.size() && cluster.size() < std::size_t(alpha); ++h)
        for (Site e : nb) {
          Site q = cluster[h] + e;
          if (!std::binary_search(comp.begin(), comp.end(), q)) continue;
          if (std::find(cluster.begin(), cluster.end(), q) != cluster.end()) continue;
          cluster.push_back(q);
          if (cluster.size() == std::size_t(alpha)) break;
        }
      std::sort(cluster.begin(), cluster.end());
      for (Site p : cluster) rest.erase(std::lower_bound(rest.begin(), rest.end(), p));
      out.push_back(std::move(cluster));
      found = true;
      break;
    }
    if (!found) break;
  }
  return out;
}

namespace {

RowSet disc_set(double kappa) { return RowSet::from_sites(disc(kappa)); }

}  // namespace

CoverResult covering_algorithm(const std::vector<Site>& K, int alpha, double kappa, const Droplet& D_hat) {
  CoverResult res;
  res.clusters = alpha_clusters(K, alpha, kappa);
  std::vector<Site> used;
  for (const auto& c : res.clusters) used.insert(used.end(), c.begin(), c.end());
  std::sort(used.begin(), used.end());
  std::vector<Site> all = K;
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::set_difference(all.begin(), all.end(), used.begin(), used.end(), std::back_inserter(res.dust));

  RowSet hat = RowSet::from_polygon(D_hat.polygon());
  RowSet B = disc_set(kappa);
  RowSet delta = hat.minkowski(hat.reflected()).minkowski(B).minkowski(B);

  struct Live {
    std::size_t node;
    RowSet set;
    RowSet grown;
  };
  std::vector<Live> live;
  auto add = [&](Droplet d, std::vector<std::size_t> parents, std::size_t clusters) {
    res.nodes.push_back({d, std::move(parents), clusters});
    RowSet s = RowSet::from_polygon(d.polygon());
    RowSet g = s.minkowski(delta);
    return Live{res.nodes.size() - 1, std::move(s), std::move(g)};
  };
  for (const auto& c : res.clusters) {
    Droplet d = D_hat.translated(c.front());
    for (Site p : c)
      if (!d.contains(p)) throw Error(Errc::InvalidRule, "D_hat is too small to hold an alpha-cluster");
    live.push_back(add(d, {}, 1));
  }
  std::size_t step = 0;
  while (true) {
    bool merged = false;
    for (std::size_t i = 0; i < live.size() && !merged; ++i)
      for (std::size_t j = i + 1; j < live.size() && !merged; ++j) {
        if (!live[i].set.intersects(live[j].grown)) continue;
        const Droplet& a = res.nodes[live[i].node].droplet;
        const Droplet& b = res.nodes[live[j].node].droplet;
        Droplet d = a;
        for (std::size_t k = 0; k < d.offsets.size(); ++k) d.offsets[k] = std::max(a.offsets[k], b.offsets[k]);
        std::size_t ni = live[i].node, nj = live[j].node;
        Live m = add(d, {ni, nj}, res.nodes[ni].clusters + res.nodes[nj].clusters);
        res.merge_log.push_back({++step, 1, ni, nj, m.node});
        live[i] = std::move(m);
        live.erase(live.begin() + std::ptrdiff_t(j));
        merged = true;
      }
    if (!merged) break;
  }
  for (const Live& l : live) {
    res.final_nodes.push_back(l.node);
    res.droplets.push_back(res.nodes[l.node].droplet);
  }
  return res;
}

// ---- Spanning

namespace {

bool within(const std::vector<Site>& a, const std::vector<Site>& b, const std::vector<Site>& nb) {
  // a and b sorted.
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& big = a.size() <= b.size() ? b : a;
  for (Site p : small)
    for (Site e : nb)
      if (std::binary_search(big.begin(), big.end(), p + e)) return true;
  return false;
}

BoundingBox box_of(const std::vector<Site>& s) {
  BoundingBox b{s.front().x, s.front().y, s.front().x, s.front().y};
  for (Site p : s) {
    b.x0 = std::min(b.x0, p.x);
    b.y0 = std::min(b.y0, p.y);
    b.x1 = std::max(b.x1, p.x);
    b.y1 = std::max(b.y1, p.y);
  }
  return b;
}

bool boxes_near(const BoundingBox& a, const BoundingBox& b, double kappa) {
  i64 k = i64(std::floor(kappa));
  return a.x0 <= b.x1 + k && b.x0 <= a.x1 + k && a.y0 <= b.y1 + k && b.y0 <= a.y1 + k;
}

}  // namespace

SpanResult spanning_algorithm(const std::vector<Site>& K, const UpdateFamily& U, double kappa,
                              const std::vector<Direction>& T, const Window& w) {
  SpanResult res;
  std::vector<Site> base = K;
  std::sort(base.begin(), base.end());
  base.erase(std::unique(base.begin(), base.end()), base.end());
  std::vector<Site> nb = disc(kappa);
  struct Live {
    std::size_t node;
    BoundingBox box;
  };
  std::vector<Live> live;
  auto add = [&](std::vector<Site> members, std::vector<std::size_t> parents) {
    std::vector<Site> cl = closure(members, w, U);
    if (cl.empty()) cl = members;
    Droplet d = minimal_droplet(cl, T);
    res.nodes.push_back({std::move(members), std::move(cl), d, std::move(parents)});
    return Live{res.nodes.size() - 1, box_of(res.nodes.back().closure)};
  };
  for (Site p : base) live.push_back(add({p}, {}));
  std::size_t step = 0;
  while (true) {
    bool merged = false;
    for (std::size_t i = 0; i < live.size() && !merged; ++i)
      for (std::size_t j = i + 1; j < live.size() && !merged; ++j) {
        if (!boxes_near(live[i].box, live[j].box, kappa)) continue;
        const auto& ci = res.nodes[live[i].node].closure;
        const auto& cj = res.nodes[live[j].node].closure;
        if (!within(ci, cj, nb)) continue;
        std::size_t ni = live[i].node, nj = live[j].node;
        std::vector<Site> members;
        std::merge(res.nodes[ni].members.begin(), res.nodes[ni].members.end(), res.nodes[nj].members.begin(),
                   res.nodes[nj].members.end(), std::back_inserter(members));
        Live m = add(std::move(members), {ni, nj});
        res.merge_log.push_back({++step, 1, ni, nj, m.node});
        live[i] = m;
        live.erase(live.begin() + std::ptrdiff_t(j));
        merged = true;
      }
    if (!merged) break;
  }
  for (const Live& l : live) {
    const SpanNode& n = res.nodes[l.node];
    res.final_nodes.push_back(l.node);
    res.droplets.push_back(n.droplet);
    res.components.push_back(n.members);
    res.closures.push_back(n.closure);
  }
  return res;
}

std::vector<Droplet> span_by_components(const std::vector<Site>& K, const UpdateFamily& U, double kappa,
                                        const std::vector<Direction>& T, const Window& w) {
  std::vector<Droplet> out;
  for (const auto& comp : strong_components(closure(K, w, U), kappa)) out.push_back(minimal_droplet(comp, T));
  return out;
}

namespace {

Window box_window(const LatticePolygon& P) {
  BoundingBox b = P.bbox();
  if (b.x1 < b.x0) b = {0, 0, 0, 0};
  return Window::make_box(b);
}

std::vector<Site> inside(const std::vector<Site>& A, const Droplet& D) {
  std::vector<Site> out;
  for (Site p : A)
    if (D.contains(p)) out.push_back(p);
  return out;
}

}  // namespace

bool is_internally_filled(const std::vector<Site>& X, const std::vector<Site>& A, const UpdateFamily& U) {
  if (X.empty()) return true;
  std::vector<Site> xs = X;
  std::sort(xs.begin(), xs.end());
  std::vector<Site> seeds;
  for (Site p : A)
    if (std::binary_search(xs.begin(), xs.end(), p)) seeds.push_back(p);
  std::vector<Site> cl = closure(seeds, Window::make_box(box_of(xs)), U);
  return std::includes(cl.begin(), cl.end(), xs.begin(), xs.end());
}

bool is_internally_spanned(const Droplet& D, const std::vector<Site>& A, const UpdateFamily& U, double kappa) {
  LatticePolygon P = D.polygon();
  if (P.empty()) return false;
  std::vector<Site> seeds = inside(A, D);
  if (seeds.empty()) return false;
  Droplet tight = D.tightened();
  for (const auto& comp : strong_components(closure(seeds, box_window(P), U), kappa))
    if (minimal_droplet(comp, D.directions) == tight) return true;
  return false;
}

bool is_internally_spanned_by_algorithm(const Droplet& D, const std::vector<Site>& A, const UpdateFamily& U,
                                        double kappa) {
  LatticePolygon P = D.polygon();
  if (P.empty()) return false;
  std::vector<Site> seeds = inside(A, D);
  if (seeds.empty()) return false;
  Droplet tight = D.tightened();
  SpanResult r = spanning_algorithm(seeds, U, kappa, D.directions, box_window(P));
  return std::any_of(r.droplets.begin(), r.droplets.end(), [&](const Droplet& d) { return d == tight; });
}

// ---- Iceberg algorithm

IcebergResult iceberg_algorithm(const std::vector<Site>& K, Direction u, const IcebergContext& ctx,
                                const UpdateFamily& U, double kappa, const Droplet& D_hat) {
  (void)U;
  if (u == ctx.u_star || u == ctx.u0 || !positively_spanning({ctx.u0, ctx.u_star, -u}))
    throw Error(Errc::InvalidDirection, "iceberg direction must lie strictly between u* and u0");
  std::vector<Site> base = K;
  std::sort(base.begin(), base.end());
  base.erase(std::unique(base.begin(), base.end()), base.end());
  for (Site p : base)
    if (line_index(p, u) < 0) throw Error(Errc::InvalidRule, "initial set meets the half-plane");

  std::vector<Site> nb = disc(kappa);
  i64 reach_h = 0;  // dist(p, H_u) <= kappa iff line_index(p, u) < reach_h
  for (Site e : nb) reach_h = std::max(reach_h, line_index(e, u));
  LatticePolygon hatP = D_hat.polygon();
  i64 hat_lo = hatP.min_index(u), hat_hi = hatP.max_index(u);
  RowSet hat = RowSet::from_polygon(hatP);
  RowSet B = disc_set(kappa);
  RowSet delta = hat.minkowski(hat.reflected()).minkowski(B).minkowski(B);
  RowSet ext = B.minkowski(hat.reflected());  // x + D_hat within kappa of p iff x in p + ext

  IcebergResult res;
  struct Live {
    std::size_t node;
    RowSet set, near, grown, bridge;
    i64 low;  // min line_index(., u)
  };
  auto add = [&](Region r, std::vector<std::size_t> parents, std::size_t leaves) {
    res.nodes.push_back({r, std::move(parents), leaves});
    Live l;
    l.node = res.nodes.size() - 1;
    l.set = RowSet::from_polygon(r.polygon());
    l.near = l.set.minkowski(B);
    l.grown = l.set.minkowski(delta);
    l.bridge = l.set.minkowski(ext);
    l.low = l.set.min_index(u).value_or(0);
    return l;
  };
  std::vector<Live> live;
  for (Site p : base) {
    Region r;
    r.droplet = D_hat.translated(p);
    live.push_back(add(r, {}, 1));
  }
  auto touches_h = [&](const Live& l) { return l.low < reach_h; };
  auto bridge_h = [&](const Live& l) { return l.low < 2 * reach_h + (hat_hi - hat_lo); };
  auto adjacent = [&](const Live& a, const Live& b) { return a.set.intersects(b.near); };
  auto bridged = [&](const Live& a, const Live& b) { return a.set.intersects(b.grown); };
  auto bridged_h = [&](const Live& a, const Live& b) {
    auto m = a.bridge.intersect(b.bridge).min_index(u);
    return m && *m < reach_h - hat_lo;
  };
  auto region_sites = [&](std::size_t node) { return res.nodes[node].region.polygon().sites(); };

  std::size_t step = 0;
  while (true) {
    int fired = 0;
    std::size_t fi = 0, fj = 0;
    for (std::size_t i = 0; i < live.size() && !fired; ++i)
      if (!res.nodes[live[i].node].region.is_iceberg && bridge_h(live[i])) {
        fired = 1;
        fi = fj = i;
      }
    for (std::size_t i = 0; i < live.size() && !fired; ++i)
      for (std::size_t j = i + 1; j < live.size() && !fired; ++j) {
        const Live &a = live[i], &b = live[j];
        bool ok;
        if (adjacent(a, b))
          ok = touches_h(a) || touches_h(b) || bridge_h(a) || bridge_h(b);
        else
          ok = bridged(a, b) && (touches_h(a) || touches_h(b) || bridged_h(a, b));
        if (ok) {
          fired = 2;
          fi = i;
          fj = j;
        }
      }
    for (std::size_t i = 0; i < live.size() && !fired; ++i)
      for (std::size_t j = i + 1; j < live.size() && !fired; ++j) {
        if (res.nodes[live[i].node].region.is_iceberg || res.nodes[live[j].node].region.is_iceberg) continue;
        if (bridged(live[i], live[j])) {
          fired = 3;
          fi = i;
          fj = j;
        }
      }
    if (!fired) break;
    std::size_t ni = live[fi].node, nj = live[fj].node;
    std::vector<Site> pts = region_sites(ni);
    std::size_t leaves = res.nodes[ni].leaves;
    std::vector<std::size_t> parents{ni};
    if (fired != 1) {
      auto more = region_sites(nj);
      pts.insert(pts.end(), more.begin(), more.end());
      leaves += res.nodes[nj].leaves;
      parents.push_back(nj);
    }
    Region r;
    if (fired == 3) {
      const Droplet &a = res.nodes[ni].region.droplet, &b = res.nodes[nj].region.droplet;
      r.droplet = a;
      for (std::size_t k = 0; k < a.offsets.size(); ++k) r.droplet.offsets[k] = std::max(a.offsets[k], b.offsets[k]);
    } else {
      r.is_iceberg = true;
      r.iceberg = smallest_iceberg(pts, u, ctx.u0, ctx.u_star);
    }
    Live m = add(r, parents, leaves);
    res.merge_log.push_back({++step, fired, ni, nj, m.node});
    live[fi] = std::move(m);
    if (fired != 1) live.erase(live.begin() + std::ptrdiff_t(fj));
  }
  for (const Live& l : live) {
    res.final_nodes.push_back(l.node);
    res.regions.push_back(res.nodes[l.node].region);
  }
  return res;
}

// ---- Critical droplets

std::string to_string(CriticalType t) {
  switch (t) {
    case CriticalType::TypeT: return "T";
    case CriticalType::TypeL: return "L";
    case CriticalType::NotCritical: return "none";
  }
  return "?";
}

CriticalType is_critical_droplet(const Droplet& D, double p, double xi, int alpha, Direction u_star) {
  LatticePolygon P = D.polygon();
  double w = width(P, u_star), h = height(P, u_star);
  double wcap = std::pow(p, -alpha - 0.2);
  double hcap = xi * std::pow(p, -alpha) * std::log(1 / p);
  if (w <= wcap && h >= hcap && h <= 3 * hcap) return CriticalType::TypeT;
  if (w >= wcap && w <= 3 * wcap && h <= hcap) return CriticalType::TypeL;
  return CriticalType::NotCritical;
}

}  // namespace ubp
