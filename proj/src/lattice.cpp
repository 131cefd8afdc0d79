#include "ubp/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <unordered_map>

#include "ubp/errors.hpp"

namespace ubp {

namespace {

struct SiteHash {
  std::size_t operator()(Site p) const {
    std::uint64_t h = std::uint64_t(p.x) * 0x9E3779B97F4A7C15ULL ^ (std::uint64_t(p.y) + 0x632BE59BD9B4E019ULL);
    h ^= h >> 29;
    return std::size_t(h * 0xBF58476D1CE4E5B9ULL);
  }
};

}  // namespace

Window Window::make_box(i64 x0, i64 y0, i64 x1, i64 y1) { return make_box(BoundingBox{x0, y0, x1, y1}); }

Window Window::make_box(BoundingBox b, std::optional<HalfPlane> hp) {
  if (b.x1 < b.x0 || b.y1 < b.y0) throw Error(Errc::InvalidRule, "degenerate window");
  Window w;
  w.shape = Shape::Box;
  w.box = b;
  w.half_plane = hp;
  return w;
}

Window Window::torus(i64 n) {
  if (n < 1) throw Error(Errc::InvalidRule, "torus size must be positive");
  Window w;
  w.shape = Shape::Torus;
  w.box = {0, 0, n - 1, n - 1};
  return w;
}

bool Window::contains(Site p) const {
  return p.x >= box.x0 && p.x <= box.x1 && p.y >= box.y0 && p.y <= box.y1;
}

LatticeState::LatticeState(const UpdateFamily& U, const Window& w)
    : U_(U), w_(w), torus_(w.shape == Window::Shape::Torus), W_(w.width()), H_(w.height()) {
  i64 reach = U.reach();
  pad_ = torus_ ? 0 : reach;
  stride_ = W_ + 2 * pad_;
  std::size_t n = std::size_t(stride_) * std::size_t(H_ + 2 * pad_);
  if (n >= (std::size_t(1) << 32)) throw Error(Errc::InvalidRule, "window too large");
  bits_.assign((n + 63) / 64, 0);
  rules_ = U.rules();
  offsets_ = U.support();
  for (Site o : offsets_) offset_delta_.push_back(o.y * stride_ + o.x);
  rules_by_offset_.resize(offsets_.size());
  for (std::size_t r = 0; r < rules_.size(); ++r) {
    std::vector<std::int64_t> d;
    for (Site s : rules_[r]) {
      auto k = std::lower_bound(offsets_.begin(), offsets_.end(), s) - offsets_.begin();
      rules_by_offset_[k].push_back(r);
      d.push_back(s.y * stride_ + s.x);
    }
    rule_delta_.push_back(d);
  }
  if (w_.half_plane && !torus_) {
    fixed_.assign(bits_.size(), 0);
    i64 a = w_.half_plane->u.a(), b = w_.half_plane->u.b(), off = w_.half_plane->offset;
    for (i64 ly = -pad_; ly < H_ + pad_; ++ly) {
      // a*x < off - b*y
      i64 rhs = off - b * (w_.box.y0 + ly), lo = -pad_, hi = W_ + pad_ - 1;
      if (a > 0)
        hi = std::min(hi, ceil_div(rhs, a) - 1 - w_.box.x0);
      else if (a < 0)
        lo = std::max(lo, floor_div(rhs, a) + 1 - w_.box.x0);
      else if (rhs <= 0)
        continue;
      for (i64 lx = lo; lx <= hi; ++lx) {
        std::size_t idx = std::size_t((ly + pad_) * stride_ + lx + pad_);
        fixed_[idx >> 6] |= std::uint64_t(1) << (idx & 63);
      }
    }
    bits_ = fixed_;
  }
}

void LatticeState::clear() {
  if (fixed_.empty())
    std::fill(bits_.begin(), bits_.end(), 0);
  else
    bits_ = fixed_;
  queue_.clear();
  count_ = 0;
  steps_ = 0;
}

bool LatticeState::locate(i64 x, i64 y, std::size_t& idx) const {
  x -= w_.box.x0;
  y -= w_.box.y0;
  if (torus_) {
    if (x < 0 || x >= W_) x = ((x % W_) + W_) % W_;
    if (y < 0 || y >= H_) y = ((y % H_) + H_) % H_;
  } else if (x < -pad_ || x >= W_ + pad_ || y < -pad_ || y >= H_ + pad_) {
    return false;
  }
  idx = std::size_t((y + pad_) * stride_ + x + pad_);
  return true;
}

Site LatticeState::site_of(std::size_t idx) const {
  i64 i = i64(idx);
  return {w_.box.x0 + i % stride_ - pad_, w_.box.y0 + i / stride_ - pad_};
}

bool LatticeState::get(i64 x, i64 y) const {
  std::size_t idx;
  if (locate(x, y, idx)) return on(idx);
  if (w_.half_plane) return line_index({x, y}, w_.half_plane->u) < w_.half_plane->offset;
  return false;
}

bool LatticeState::infected(Site p) const { return get(p.x, p.y); }

void LatticeState::mark(std::size_t idx) {
  bits_[idx >> 6] |= std::uint64_t(1) << (idx & 63);
  queue_.push_back(std::uint32_t(idx));
  ++count_;
}

bool LatticeState::infect(Site p) {
  if (!torus_ && !w_.contains(p)) return false;
  std::size_t idx;
  locate(p.x, p.y, idx);
  if (on(idx)) return false;
  mark(idx);
  return true;
}

void LatticeState::infect_index(std::size_t i) {
  std::size_t idx = std::size_t((i64(i) / W_ + pad_) * stride_ + i64(i) % W_ + pad_);
  if (!on(idx)) mark(idx);
}

bool LatticeState::box_rule_holds(std::size_t rule, std::size_t idx) const {
  for (std::int64_t d : rule_delta_[rule])
    if (!on(std::size_t(std::int64_t(idx) + d))) return false;
  return true;
}

bool LatticeState::torus_rule_holds(std::size_t rule, i64 x, i64 y) const {
  for (Site o : rules_[rule]) {
    i64 px = x + o.x, py = y + o.y;
    if (px < 0 || px >= W_) px = ((px % W_) + W_) % W_;
    if (py < 0 || py >= H_) py = ((py % H_) + H_) % H_;
    if (!on(std::size_t(py * W_ + px))) return false;
  }
  return true;
}

void LatticeState::examine(std::size_t idx, std::vector<std::uint32_t>* next_gen) {
  i64 sx = i64(idx) % stride_ - pad_, sy = i64(idx) / stride_ - pad_;
  for (std::size_t k = 0; k < offsets_.size(); ++k) {
    i64 zx = sx - offsets_[k].x, zy = sy - offsets_[k].y;
    std::size_t z;
    if (torus_) {
      if (zx < 0 || zx >= W_) zx = ((zx % W_) + W_) % W_;
      if (zy < 0 || zy >= H_) zy = ((zy % H_) + H_) % H_;
      z = std::size_t(zy * W_ + zx);
    } else {
      if (std::uint64_t(zx) >= std::uint64_t(W_) || std::uint64_t(zy) >= std::uint64_t(H_)) continue;
      z = std::size_t(std::int64_t(idx) - offset_delta_[k]);
    }
    std::uint64_t mask = std::uint64_t(1) << (z & 63);
    if (bits_[z >> 6] & mask) continue;
    if (next_gen && (pending_[z >> 6] & mask)) continue;
    for (std::size_t r : rules_by_offset_[k]) {
      if (torus_ ? !torus_rule_holds(r, zx, zy) : !box_rule_holds(r, z)) continue;
      if (next_gen) {
        pending_[z >> 6] |= mask;
        next_gen->push_back(std::uint32_t(z));
      } else {
        mark(z);
      }
      break;
    }
  }
}

void LatticeState::run() {
  if (w_.half_plane && !is_stable(w_.half_plane->u, U_)) {
    // Rules lying entirely inside the half-plane are never triggered by an infection event.
    for (i64 y = w_.box.y0; y <= w_.box.y1; ++y)
      for (i64 x = w_.box.x0; x <= w_.box.x1; ++x) {
        std::size_t idx;
        locate(x, y, idx);
        if (on(idx)) continue;
        for (std::size_t r = 0; r < rules_.size(); ++r)
          if (torus_ ? torus_rule_holds(r, x - w_.box.x0, y - w_.box.y0) : box_rule_holds(r, idx)) {
            mark(idx);
            break;
          }
      }
  }
  std::size_t head = 0;
  while (head < queue_.size()) examine(queue_[head++], nullptr);
  queue_.clear();
}

std::optional<i64> LatticeState::run_timed(Site target, i64 t_max) {
  if (infected(target)) return 0;
  std::size_t tidx;
  if (!torus_ && !w_.contains(target)) return std::nullopt;
  locate(target.x, target.y, tidx);
  pending_.assign(bits_.size(), 0);
  std::vector<std::uint32_t> cur = std::move(queue_), next;
  queue_.clear();
  for (i64 t = 0; t < t_max && !cur.empty(); ++t) {
    next.clear();
    for (std::uint32_t idx : cur) examine(idx, &next);
    bool hit = false;
    for (std::uint32_t idx : next) {
      bits_[idx >> 6] |= std::uint64_t(1) << (idx & 63);
      pending_[idx >> 6] &= ~(std::uint64_t(1) << (idx & 63));
      ++count_;
      hit = hit || idx == tidx;
    }
    steps_ = t + 1;
    if (hit) return t + 1;
    std::swap(cur, next);
  }
  return std::nullopt;
}

std::vector<std::vector<Site>> LatticeState::run_generations(i64 t_max) {
  std::vector<std::vector<Site>> out;
  pending_.assign(bits_.size(), 0);
  std::vector<std::uint32_t> cur = std::move(queue_), next;
  queue_.clear();
  for (i64 t = 0; t < t_max && !cur.empty(); ++t) {
    next.clear();
    for (std::uint32_t idx : cur) examine(idx, &next);
    if (next.empty()) break;
    std::vector<Site> gen;
    for (std::uint32_t idx : next) {
      bits_[idx >> 6] |= std::uint64_t(1) << (idx & 63);
      pending_[idx >> 6] &= ~(std::uint64_t(1) << (idx & 63));
      ++count_;
      gen.push_back(site_of(idx));
    }
    std::sort(gen.begin(), gen.end());
    out.push_back(std::move(gen));
    steps_ = t + 1;
    std::swap(cur, next);
  }
  return out;
}

std::vector<Site> LatticeState::sites(bool sorted) const {
  std::vector<Site> out;
  for (std::size_t w = 0; w < bits_.size(); ++w) {
    std::uint64_t word = bits_[w];
    if (!fixed_.empty()) word &= ~fixed_[w];
    while (word) {
      int b = __builtin_ctzll(word);
      word &= word - 1;
      out.push_back(site_of(w * 64 + std::size_t(b)));
    }
  }
  if (sorted) std::sort(out.begin(), out.end());
  return out;
}

std::vector<Site> closure(const std::vector<Site>& A, const Window& w, const UpdateFamily& U) {
  LatticeState st(U, w);
  for (Site p : A) st.infect(p);
  st.run();
  return st.sites();
}

std::string to_string(StripVerdict v) {
  switch (v) {
    case StripVerdict::InfiniteLine: return "InfiniteLine";
    case StripVerdict::FiniteLine: return "FiniteLine";
    case StripVerdict::BandExceeded: return "BandExceeded";
  }
  return "?";
}

LineFrame::LineFrame(Direction d) : u(d), right{d.b(), -d.a()} {
  // Extended Euclid for a*s + b*t = 1.
  i64 a = d.a(), b = d.b();
  i64 old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    i64 q = old_r / r;
    std::tie(old_r, r) = std::make_pair(r, old_r - q * r);
    std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
    std::tie(old_t, t) = std::make_pair(t, old_t - q * t);
  }
  if (old_r < 0) {
    old_s = -old_s;
    old_t = -old_t;
  }
  up = {old_s, old_t};
}

Site LineFrame::to_frame(Site p) const { return {up.y * p.x - up.x * p.y, line_index(p, u)}; }

Site LineFrame::from_frame(Site q) const {
  return {q.x * right.x + q.y * up.x, q.x * right.y + q.y * up.y};
}

namespace {

struct StripRun {
  std::unique_ptr<LatticeState> st;
  std::vector<Site> infected;  // frame coordinates, j >= 0, unsorted
  i64 i0, i1;                  // window columns
  int band;
};

StripRun run_strip(const UpdateFamily& Uf, const std::vector<Site>& seeds, i64 i0, i64 i1, int band) {
  Window w = Window::make_box(BoundingBox{i0, 0, i1, band - 1}, HalfPlane{Direction(0, 1), 0});
  StripRun r;
  r.st = std::make_unique<LatticeState>(Uf, w);
  for (Site p : seeds) r.st->infect(p);
  r.st->run();
  r.infected = r.st->sites(false);
  r.i0 = i0;
  r.i1 = i1;
  r.band = band;
  return r;
}

bool contains_all(const LatticeState& st, const std::vector<Site>& pts, i64 shift) {
  for (Site p : pts)
    if (!st.infected({p.x + shift, p.y})) return false;
  return true;
}

// H u seeds is closed: no site outside can be infected in one step.
bool closed_with_half_plane(const UpdateFamily& Uf, const std::vector<Site>& seeds) {
  std::vector<Site> sorted = seeds;
  std::sort(sorted.begin(), sorted.end());
  auto on = [&](Site p) { return p.y < 0 || std::binary_search(sorted.begin(), sorted.end(), p); };
  for (Site s : seeds)
    for (const Rule& rule : Uf.rules())
      for (Site o : rule) {
        Site z = s - o;
        if (on(z)) continue;
        bool all = true;
        for (Site q : rule)
          if (!on(z + q)) {
            all = false;
            break;
          }
        if (all) return false;
      }
  return true;
}

// Proves [H u seeds] n (row 0) is infinite in direction d by a translation certificate.
bool infinite_certificate(const UpdateFamily& Uf, const StripRun& run, const std::vector<Site>& seeds, int d,
                          i64 reach, int* period) {
  const auto& W = run.infected;
  bool row0 = std::any_of(W.begin(), W.end(), [](Site p) { return p.y == 0; });
  if (!row0) return false;
  i64 span = run.i1 - run.i0;
  i64 rmax = std::max<i64>(1, span / 3);
  for (i64 r = 1; r <= rmax; ++r)
    if (contains_all(*run.st, seeds, d * r)) {
      if (period) *period = int(r);
      return true;
    }
  // Block certificate: a column block B of the closure whose translate B + d*r is generated by H u B.
  i64 zlo = seeds.front().x, zhi = seeds.front().x;
  for (Site p : seeds) {
    zlo = std::min(zlo, p.x);
    zhi = std::max(zhi, p.x);
  }
  i64 width = 4 * reach;
  for (int attempt = 1; attempt <= 3; ++attempt) {
    i64 c = d > 0 ? zhi + attempt * (run.i1 - zhi) / 5 : zlo - attempt * (zlo - run.i0) / 5 - width;
    std::vector<Site> block;
    for (Site p : W)
      if (p.x >= c && p.x < c + width) block.push_back(p);
    if (block.empty() || std::none_of(block.begin(), block.end(), [](Site p) { return p.y == 0; })) continue;
    i64 room = d > 0 ? run.i1 - (c + width) : c - run.i0;
    for (i64 r = 1; r <= room / 2; ++r) {
      if (!contains_all(*run.st, block, d * r)) continue;
      i64 lo = std::min(c, c + d * r) - 8 * reach - r, hi = std::max(c + width, c + width + d * r) + 8 * reach + r;
      StripRun check = run_strip(Uf, block, lo, hi, run.band);
      if (contains_all(*check.st, block, d * r)) {
        if (period) *period = int(r);
        return true;
      }
      break;
    }
  }
  return false;
}

}  // namespace

StripReport strip_decision(Direction u, const std::vector<Site>& Z, const UpdateFamily& U, const StripOptions& opt) {
  LineFrame frame(u);
  UpdateFamily Uf = U.mapped(frame.up.y, -frame.up.x, u.a(), u.b());
  std::vector<Site> seeds;
  for (Site p : Z) {
    Site q = frame.to_frame(p);
    if (q.y < 0) throw Error(Errc::InvalidRule, "strip seed inside the half-plane");
    seeds.push_back(q);
  }
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

  StripReport rep;
  if (is_stable(Direction(0, 1), Uf) == false) {
    rep.plus = rep.minus = StripVerdict::InfiniteLine;
    return rep;
  }
  if (seeds.empty() || closed_with_half_plane(Uf, seeds)) {
    rep.plus = rep.minus = StripVerdict::FiniteLine;
    return rep;
  }
  i64 reach = std::max<i64>(1, Uf.reach());
  i64 jmax = 0, ilo = seeds.front().x, ihi = seeds.front().x;
  for (Site q : seeds) {
    jmax = std::max(jmax, q.y);
    ilo = std::min(ilo, q.x);
    ihi = std::max(ihi, q.x);
  }
  int band = opt.band_height > 0 ? opt.band_height
                                 : int(4 * std::ceil(nu(U)) * double(seeds.size() + 1));
  band = std::max<int>(band, int(jmax + reach + 1));

  for (; band <= opt.max_band; band *= 2) {
    i64 ext = 2 * band + 8 * reach;
    std::optional<i64> prev_lo, prev_hi;
    bool need_band = false;
    for (int dbl = 0; dbl <= opt.max_extent_doublings; ++dbl, ext *= 2) {
      StripRun run = run_strip(Uf, seeds, ilo - ext, ihi + ext, band);
      const auto& W = run.infected;
      bool top = false;
      i64 lo = ilo, hi = ihi;
      for (Site p : W) {
        top = top || p.y >= band - reach;
        lo = std::min(lo, p.x);
        hi = std::max(hi, p.x);
      }
      i64 margin = 2 * reach;
      bool lo_edge = lo < run.i0 + margin, hi_edge = hi > run.i1 - margin;
      int per = 0;
      bool want_plus = !opt.side || *opt.side == Side::Plus, want_minus = !opt.side || *opt.side == Side::Minus;
      if (want_plus && rep.plus != StripVerdict::InfiniteLine && infinite_certificate(Uf, run, seeds, +1, reach, &per)) {
        rep.plus = StripVerdict::InfiniteLine;
        rep.period_plus = per;
      }
      if (want_minus && rep.minus != StripVerdict::InfiniteLine && infinite_certificate(Uf, run, seeds, -1, reach, &per)) {
        rep.minus = StripVerdict::InfiniteLine;
        rep.period_minus = per;
      }
      rep.band_used = band;
      bool plus_done = rep.plus == StripVerdict::InfiniteLine;
      bool minus_done = rep.minus == StripVerdict::InfiniteLine;
      if (opt.side && (*opt.side == Side::Plus ? plus_done : minus_done)) return rep;
      if (top) {
        if (plus_done && minus_done) return rep;
        need_band = true;
        break;
      }
      if (!lo_edge && !hi_edge) {
        // H u W is closed in Z^2, so W is the whole closure.
        if (!plus_done) rep.plus = StripVerdict::FiniteLine;
        if (!minus_done) rep.minus = StripVerdict::FiniteLine;
        return rep;
      }
      if (!plus_done && !hi_edge && prev_hi && *prev_hi == hi) {
        rep.plus = StripVerdict::FiniteLine;
        plus_done = true;
      }
      if (!minus_done && !lo_edge && prev_lo && *prev_lo == lo) {
        rep.minus = StripVerdict::FiniteLine;
        minus_done = true;
      }
      if (plus_done && minus_done) return rep;
      if (opt.side && (*opt.side == Side::Plus ? plus_done : minus_done)) return rep;
      prev_lo = lo;
      prev_hi = hi;
    }
    if (!need_band) break;
  }
  if (rep.plus != StripVerdict::InfiniteLine && rep.plus != StripVerdict::FiniteLine)
    rep.plus = StripVerdict::BandExceeded;
  if (rep.minus != StripVerdict::InfiniteLine && rep.minus != StripVerdict::FiniteLine)
    rep.minus = StripVerdict::BandExceeded;
  return rep;
}

StripVerdict strip_line_decision(Direction u, const std::vector<Site>& Z, const UpdateFamily& U, int band_height,
                                 Side side) {
  StripOptions opt;
  opt.band_height = band_height;
  opt.max_band = std::max(band_height, 1);
  StripReport r = strip_decision(u, Z, U, opt);
  return side == Side::Plus ? r.plus : r.minus;
}

bool percolates(const std::vector<Site>& A, i64 n, const UpdateFamily& U) {
  LatticeState st(U, Window::torus(n));
  for (Site p : A) st.infect(p);
  st.run();
  return st.count() == std::size_t(n * n);
}

std::optional<i64> infection_time(const std::vector<Site>& A, const UpdateFamily& U, i64 t_max, const Window& w) {
  if (!w.contains({0, 0})) throw Error(Errc::OriginOutsideWindow, "window must contain the origin");
  LatticeState st(U, w);
  for (Site p : A) st.infect(p);
  return st.run_timed({0, 0}, t_max);
}

i64 light_cone_radius(const UpdateFamily& U, i64 t) { return std::max<i64>(1, U.reach()) * t; }

LatticePolygon UStrip::polygon() const {
  return LatticePolygon({{u, bound_u}, {-u, bound_minus_u}, {v, bound_v}, {-v, bound_minus_v}});
}

std::vector<Site> disc(double kappa) {
  std::vector<Site> out;
  i64 r = i64(std::floor(kappa + 1e-9));
  double k2 = kappa * kappa + 1e-9;
  for (i64 y = -r; y <= r; ++y)
    for (i64 x = -r; x <= r; ++x)
      if (double(x * x + y * y) <= k2) out.push_back({x, y});
  return out;
}

std::vector<std::vector<Site>> strong_components(const std::vector<Site>& sites, double kappa) {
  std::unordered_map<Site, std::size_t, SiteHash> index;
  for (std::size_t i = 0; i < sites.size(); ++i) index.emplace(sites[i], i);
  std::vector<std::size_t> parent(sites.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  std::vector<Site> nb = disc(kappa);
  for (std::size_t i = 0; i < sites.size(); ++i)
    for (Site e : nb) {
      if (e <= Site{0, 0}) continue;
      auto it = index.find(sites[i] + e);
      if (it == index.end()) continue;
      std::size_t a = find(i), b = find(it->second);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::vector<std::vector<Site>> comps;
  std::unordered_map<std::size_t, std::size_t> slot;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    std::size_t r = find(i);
    auto [it, fresh] = slot.emplace(r, comps.size());
    if (fresh) comps.emplace_back();
    comps[it->second].push_back(sites[i]);
  }
  for (auto& c : comps) std::sort(c.begin(), c.end());
  std::sort(comps.begin(), comps.end());
  return comps;
}

bool is_u_crossed(const UStrip& S, const std::vector<Site>& A, const UpdateFamily& U, double kappa) {
  LatticePolygon P = S.polygon();
  BoundingBox bb = P.bbox();
  if (bb.x1 < bb.x0) return false;
  i64 collar = i64(std::ceil(nu(U)));
  i64 offset = 1 - S.bound_minus_u;
  Window w = Window::make_box(BoundingBox{bb.x0 - collar, bb.y0 - collar, bb.x1 + collar, bb.y1 + collar},
                              HalfPlane{S.u, offset});
  std::vector<Site> seeds;
  for (Site p : A)
    if (P.contains(p)) seeds.push_back(p);
  std::vector<Site> cl = closure(seeds, w, U);
  i64 reach_h = 0;
  for (Site e : disc(kappa)) reach_h = std::max(reach_h, line_index(e, S.u));
  for (const auto& comp : strong_components(cl, kappa)) {
    bool near_h = false, top = false;
    for (Site p : comp) {
      near_h = near_h || line_index(p, S.u) < offset + reach_h;
      top = top || (line_index(p, S.u) == S.bound_u - 1 && P.contains(p));
    }
    if (near_h && top) return true;
  }
  return false;
}

}  // namespace ubp
