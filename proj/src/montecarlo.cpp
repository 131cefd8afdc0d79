#include "ubp/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "ubp/errors.hpp"

namespace ubp {

namespace {

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t zigzag(i64 v) { return (std::uint64_t(v) << 1) ^ std::uint64_t(v >> 63); }

}  // namespace

SiteRng::SiteRng(std::uint64_t seed, std::uint64_t trial) : stream_(splitmix(splitmix(seed) ^ trial)) {}

std::uint64_t SiteRng::bits(std::uint64_t site) const { return splitmix(stream_ ^ site); }

double SiteRng::uniform(std::uint64_t site) const { return double(bits(site) >> 11) * 0x1.0p-53; }

std::uint64_t SiteRng::site_key(Site p) { return (zigzag(p.x) << 32) ^ zigzag(p.y); }

unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("UBP_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return unsigned(v);
  }
  return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task) {
  std::size_t workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (std::size_t i = next++; i < n; i = next++) task(i);
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
}

Proportion wilson(std::size_t successes, std::size_t trials, double z) {
  Proportion r;
  r.successes = successes;
  r.trials = trials;
  if (trials == 0) return r;
  double n = double(trials), ph = double(successes) / n, z2 = z * z;
  double centre = (ph + z2 / (2 * n)) / (1 + z2 / n);
  double half = z * std::sqrt(ph * (1 - ph) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  r.fraction = ph;
  r.ci_low = std::max(0.0, std::min(ph, centre - half));
  r.ci_high = std::min(1.0, std::max(ph, centre + half));
  return r;
}

std::vector<std::size_t> random_torus_set(i64 n, double p, const SiteRng& rng) {
  std::vector<std::size_t> out;
  for (i64 y = 0; y < n; ++y)
    for (i64 x = 0; x < n; ++x)
      if (rng.uniform(SiteRng::site_key({x, y})) < p) out.push_back(std::size_t(y * n + x));
  return out;
}

bool torus_trial(const UpdateFamily& U, i64 n, double p, const SiteRng& rng) {
  LatticeState st(U, Window::torus(n));
  for (std::size_t idx : random_torus_set(n, p, rng)) st.infect_index(idx);
  st.run();
  return st.count() == std::size_t(n * n);
}

Proportion percolation_probability(const TrialConfig& cfg, std::size_t first, std::size_t count) {
  if (cfg.p < 0 || cfg.p > 1) throw Error(Errc::InvalidRule, "p must lie in [0,1]");
  std::vector<char> hit(count, 0);
  parallel_for(count, [&](std::size_t i) {
    hit[i] = torus_trial(cfg.family, cfg.n, cfg.p, SiteRng{cfg.seed, first + i}) ? 1 : 0;
  });
  std::size_t s = std::size_t(std::count(hit.begin(), hit.end(), 1));
  return wilson(s, count);
}

Proportion percolation_probability(const TrialConfig& cfg) {
  if (cfg.trials < 1) throw Error(Errc::InvalidRule, "trials must be positive");
  return percolation_probability(cfg, 0, std::size_t(cfg.trials));
}

PcEstimate estimate_pc(const UpdateFamily& U, i64 n, const PcOptions& opt) {
  if (opt.tol <= 0) throw Error(Errc::InvalidRule, "tolerance must be positive");
  PcEstimate est;
  est.n = n;
  double lo = opt.lo, hi = opt.hi;
  TrialConfig cfg;
  cfg.family = U;
  cfg.n = n;
  cfg.seed = opt.seed;
  while (hi - lo > opt.tol) {
    double p = 0.5 * (lo + hi);
    cfg.p = p;
    std::size_t s = 0, t = 0;
    Proportion pr;
    for (int b = 0; b < opt.max_batches; ++b) {
      if (est.trials_used + std::size_t(opt.batch) > opt.budget)
        throw Error(Errc::BudgetExhausted, "trial budget exhausted with bracket [" + std::to_string(lo) + ", " +
                                               std::to_string(hi) + "]");
      // Batches reuse the same trial indices at every p, so the curve is monotone in p.
      Proportion part = percolation_probability(cfg, t, std::size_t(opt.batch));
      s += part.successes;
      t += std::size_t(opt.batch);
      est.trials_used += std::size_t(opt.batch);
      pr = wilson(s, t);
      if (pr.ci_low > 0.5 || pr.ci_high < 0.5) break;
    }
    est.probes.push_back({p, pr});
    if (pr.fraction >= 0.5)
      hi = p;
    else
      lo = p;
  }
  est.p_hat = 0.5 * (lo + hi);
  est.ci_low = lo;
  est.ci_high = hi;
  return est;
}

BoundingBox tau_window(const UpdateFamily& U, i64 t, std::size_t max_sites, bool* clipped) {
  i64 x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  for (Site s : U.support()) {
    x0 = std::min(x0, s.x);
    y0 = std::min(y0, s.y);
    x1 = std::max(x1, s.x);
    y1 = std::max(y1, s.y);
  }
  BoundingBox b{x0 * t - 1, y0 * t - 1, x1 * t + 1, y1 * t + 1};
  double area = double(b.x1 - b.x0 + 1) * double(b.y1 - b.y0 + 1);
  if (clipped) *clipped = false;
  if (area > double(max_sites)) {
    double f = std::sqrt(double(max_sites) / area);
    b = {i64(std::ceil(double(b.x0) * f)), i64(std::ceil(double(b.y0) * f)), i64(std::floor(double(b.x1) * f)),
         i64(std::floor(double(b.y1) * f))};
    if (clipped) *clipped = true;
  }
  return b;
}

TauSample tau_trial(const UpdateFamily& U, double p, std::uint64_t seed, std::uint64_t trial, const TauOptions& opt) {
  SiteRng rng{seed, trial};
  TauSample out;
  for (i64 t = std::min<i64>(64, opt.t_max);; t = std::min(2 * t, opt.t_max)) {
    bool clipped = false;
    BoundingBox b = tau_window(U, t, opt.max_sites, &clipped);
    if (clipped) t = opt.t_max;
    LatticeState st(U, Window::make_box(b));
    i64 W = b.x1 - b.x0 + 1;
    for (i64 y = b.y0; y <= b.y1; ++y)
      for (i64 x = b.x0; x <= b.x1; ++x)
        if (rng.uniform(SiteRng::site_key({x, y})) < p) st.infect_index(std::size_t((y - b.y0) * W + (x - b.x0)));
    out.window_radius = std::max({-b.x0, -b.y0, b.x1, b.y1});
    out.exact = !clipped;
    out.tau = st.run_timed({0, 0}, t);
    if (out.tau || t >= opt.t_max) return out;
  }
}

TauStats sample_tau(const UpdateFamily& U, double p, int trials, const TauOptions& opt) {
  TauStats s;
  s.p = p;
  s.trials = trials;
  s.samples.resize(std::size_t(std::max(trials, 0)));
  parallel_for(s.samples.size(), [&](std::size_t i) { s.samples[i] = tau_trial(U, p, opt.seed, i, opt); });
  std::vector<double> v;
  for (const auto& x : s.samples) {
    if (!x.tau) ++s.timeouts;
    v.push_back(x.tau ? double(*x.tau) : std::numeric_limits<double>::infinity());
  }
  std::sort(v.begin(), v.end());
  auto quantile = [&](double q) {
    if (v.empty()) return 0.0;
    double pos = q * double(v.size() - 1);
    std::size_t a = std::size_t(std::floor(pos)), b = std::size_t(std::ceil(pos));
    if (std::isinf(v[b]) || std::isinf(v[a])) return v[b];
    return v[a] + (pos - double(a)) * (v[b] - v[a]);
  };
  s.median = quantile(0.5);
  s.q1 = quantile(0.25);
  s.q3 = quantile(0.75);
  // log 0 is kept finite so that p = 1 reports log tau = 0.
  s.median_log = s.median <= 1 ? 0.0 : std::log(s.median);
  return s;
}

ScalingReport scaling_fit(const std::vector<std::pair<double, double>>& points, int alpha, bool unbalanced,
                          Statistic stat, double bound) {
  if (points.size() < 3) throw Error(Errc::InsufficientData, "scaling fit needs at least three points");
  if (alpha < 1) throw Error(Errc::NotCritical, "scaling transforms need a finite positive alpha");
  ScalingReport r;
  r.points = points;
  r.bound = bound;
  double a = alpha;
  for (auto [x, y] : points) {
    double v;
    if (stat == Statistic::LogTau) {
      v = std::pow(x, a) * y;
      if (unbalanced) v /= std::pow(std::log(1 / x), 2);
    } else {
      double ln = std::log(x);
      v = unbalanced ? y * std::pow(ln / std::pow(std::log(ln), 2), 1 / a) : y * std::pow(ln, 1 / a);
    }
    r.transformed.push_back(v);
  }
  if (stat == Statistic::LogTau)
    r.transform = unbalanced ? "p^alpha*(log 1/p)^-2*log tau" : "p^alpha*log tau";
  else
    r.transform = unbalanced ? "p_c*(log n/(log log n)^2)^(1/alpha)" : "p_c*(log n)^(1/alpha)";
  auto [mn, mx] = std::minmax_element(r.transformed.begin(), r.transformed.end());
  r.spread = (*mn > 0 && std::isfinite(*mx)) ? *mx / *mn : std::numeric_limits<double>::infinity();
  r.pass = r.spread <= bound;
  return r;
}

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

void write_csv_header(std::ostream& os) { os << "family,n,p,trials,statistic,ci_low,ci_high,seed\n"; }

void write_csv_row(std::ostream& os, const CsvRow& r) {
  os << r.family << ',' << r.n << ',' << num(r.p) << ',' << r.trials << ',' << num(r.statistic) << ','
     << num(r.ci_low) << ',' << num(r.ci_high) << ',' << r.seed << '\n';
}

std::string to_json(const ScalingReport& r) {
  nlohmann::ordered_json j;
  j["transform"] = r.transform;
  j["points"] = nlohmann::json::array();
  for (std::size_t i = 0; i < r.points.size(); ++i)
    j["points"].push_back({{"x", r.points[i].first}, {"statistic", r.points[i].second}, {"transformed", r.transformed[i]}});
  j["spread"] = std::isfinite(r.spread) ? nlohmann::json(r.spread) : nlohmann::json(nullptr);
  j["bound"] = r.bound;
  j["pass"] = r.pass;
  return j.dump(2);
}

}  // namespace ubp
