#include <doctest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "support.hpp"
#include "ubp/errors.hpp"
#include "ubp/montecarlo.hpp"

using namespace ubp;
using namespace testing_support;

namespace {

std::vector<Site> torus_sites(i64 n, double p, const SiteRng& rng) {
  std::vector<Site> out;
  for (std::size_t idx : random_torus_set(n, p, rng)) out.push_back({i64(idx) % n, i64(idx) / n});
  return out;
}

// Synchronous steps on a box of radius R; returns the step at which the origin turns on.
std::optional<i64> naive_tau(const UpdateFamily& U, double p, const SiteRng& rng, i64 R, i64 t_max) {
  i64 W = 2 * R + 1;
  std::vector<char> on(std::size_t(W * W), 0);
  auto at = [&](i64 x, i64 y) -> char& { return on[std::size_t((y + R) * W + (x + R))]; };
  for (i64 y = -R; y <= R; ++y)
    for (i64 x = -R; x <= R; ++x) at(x, y) = rng.uniform(SiteRng::site_key({x, y})) < p;
  for (i64 t = 0; t <= t_max; ++t) {
    if (at(0, 0)) return t;
    std::vector<char> next = on;
    for (i64 y = -R; y <= R; ++y)
      for (i64 x = -R; x <= R; ++x) {
        if (at(x, y)) continue;
        for (const auto& rule : U.rules()) {
          bool all = true;
          for (Site d : rule) {
            i64 a = x + d.x, b = y + d.y;
            all = all && a >= -R && a <= R && b >= -R && b <= R && at(a, b);
          }
          if (all) {
            next[std::size_t((y + R) * W + (x + R))] = 1;
            break;
          }
        }
      }
    on.swap(next);
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("wilson interval known values") {
  Proportion a = wilson(50, 100);
  CHECK(a.fraction == doctest::Approx(0.5));
  CHECK(a.ci_low == doctest::Approx(0.403831).epsilon(1e-5));
  CHECK(a.ci_high == doctest::Approx(0.596169).epsilon(1e-5));
  Proportion b = wilson(0, 10);
  CHECK(b.ci_low == 0.0);
  CHECK(b.ci_high == doctest::Approx(0.277533).epsilon(1e-5));
  Proportion c = wilson(10, 10);
  CHECK(c.ci_high == 1.0);
  CHECK(c.ci_low == doctest::Approx(0.722467).epsilon(1e-5));
  CHECK(wilson(0, 0).trials == 0);
}

TEST_CASE("site rng is deterministic and keyed") {
  SiteRng a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  int same_c = 0, same_d = 0;
  for (std::uint64_t k = 0; k < 1000; ++k) {
    CHECK(a.bits(k) == b.bits(k));
    same_c += a.bits(k) == c.bits(k);
    same_d += a.bits(k) == d.bits(k);
    double u = a.uniform(k);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(same_c == 0);
  CHECK(same_d == 0);
  CHECK(SiteRng::site_key({1, 2}) != SiteRng::site_key({2, 1}));
  CHECK(SiteRng::site_key({-1, 0}) != SiteRng::site_key({1, 0}));
  double mean = 0;
  for (std::uint64_t k = 0; k < 100000; ++k) mean += a.uniform(k);
  CHECK(mean / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("percolation probability at p = 0 and p = 1") {
  TrialConfig cfg;
  cfg.family = families::two_neighbour();
  cfg.n = 16;
  cfg.trials = 20;
  cfg.p = 1.0;
  CHECK(percolation_probability(cfg).fraction == 1.0);
  cfg.p = 0.0;
  CHECK(percolation_probability(cfg).fraction == 0.0);
  cfg.p = 1.5;
  CHECK_THROWS_AS(percolation_probability(cfg), Error);
}

TEST_CASE("torus trials agree with the naive simulator") {
  for (const auto& U : {families::two_neighbour(), families::duarte(), families::van_enter_hulshof()}) {
    for (std::uint64_t trial = 0; trial < 40; ++trial) {
      i64 n = 8 + i64(trial % 5) * 2;
      double p = 0.05 + 0.01 * double(trial % 10);
      SiteRng rng(11, trial);
      CHECK(torus_trial(U, n, p, rng) == naive_percolates(torus_sites(n, p, rng), n, U));
    }
  }
}

TEST_CASE("two-neighbour percolates readily at n = 64, p = 0.2") {
  TrialConfig cfg;
  cfg.family = families::two_neighbour();
  cfg.n = 64;
  cfg.p = 0.2;
  cfg.trials = 100;
  CHECK(percolation_probability(cfg).fraction >= 0.95);
}

TEST_CASE("p_c bisection") {
  PcOptions opt;
  opt.batch = 50;
  opt.tol = 0.01;
  PcEstimate e = estimate_pc(families::two_neighbour(), 16, opt);
  CHECK(e.ci_low <= e.p_hat);
  CHECK(e.p_hat <= e.ci_high);
  CHECK(e.ci_high - e.ci_low <= opt.tol);
  for (const auto& pr : e.probes) {
    if (pr.result.fraction >= 0.5)
      CHECK(e.ci_high <= pr.p);
    else
      CHECK(e.ci_low >= pr.p);
  }
  // Common random numbers: percolation is monotone in p trial by trial.
  TrialConfig cfg;
  cfg.family = families::two_neighbour();
  cfg.n = 16;
  double last = 0;
  for (double p = 0.02; p <= 0.3; p += 0.02) {
    cfg.p = p;
    double f = percolation_probability(cfg, 0, 50).fraction;
    CHECK(f >= last);
    last = f;
  }
  opt.budget = 100;
  CHECK_THROWS_AS(estimate_pc(families::two_neighbour(), 16, opt), Error);
}

TEST_CASE("p_c decreases with n for the two-neighbour family") {
  PcOptions opt;
  opt.batch = 100;
  opt.tol = 0.005;
  double small = estimate_pc(families::two_neighbour(), 8, opt).p_hat;
  double large = estimate_pc(families::two_neighbour(), 64, opt).p_hat;
  CHECK(large < small);
}

TEST_CASE("tau extremes") {
  TauOptions opt;
  opt.t_max = 64;
  TauStats one = sample_tau(families::two_neighbour(), 1.0, 5, opt);
  CHECK(one.timeouts == 0);
  CHECK(one.median == 0.0);
  CHECK(one.median_log == 0.0);
  TauStats none = sample_tau(families::two_neighbour(), 0.0, 5, opt);
  CHECK(none.timeouts == 5);
  CHECK(std::isinf(none.median));
}

TEST_CASE("tau agrees with a larger naive window") {
  TauOptions opt;
  opt.t_max = 24;
  opt.seed = 5;
  for (const auto& U : {families::two_neighbour(), families::duarte()}) {
    for (std::uint64_t trial = 0; trial < 30; ++trial) {
      double p = 0.08 + 0.01 * double(trial % 8);
      TauSample s = tau_trial(U, p, opt.seed, trial, opt);
      CHECK(s.exact);
      CHECK(s.tau == naive_tau(U, p, SiteRng(opt.seed, trial), 60, opt.t_max));
    }
  }
}

TEST_CASE("tau window clipping") {
  bool clipped = false;
  BoundingBox b = tau_window(families::two_neighbour(), 10, 1 << 20, &clipped);
  CHECK_FALSE(clipped);
  CHECK(b.x0 == -11);
  CHECK(b.x1 == 11);
  b = tau_window(families::two_neighbour(), 100000, 10000, &clipped);
  CHECK(clipped);
  CHECK(double(b.x1 - b.x0 + 1) * double(b.y1 - b.y0 + 1) <= 10000);
}

TEST_CASE("scaling transforms invert synthetic data") {
  for (int alpha : {1, 2}) {
    std::vector<std::pair<double, double>> tau_bal, tau_unb, pc_bal, pc_unb;
    for (double p : {0.02, 0.05, 0.1, 0.2}) {
      double L = std::log(1 / p);
      tau_bal.push_back({p, 3.0 / std::pow(p, alpha)});
      tau_unb.push_back({p, 3.0 * L * L / std::pow(p, alpha)});
    }
    for (double n : {64.0, 256.0, 1024.0}) {
      double ln = std::log(n);
      pc_bal.push_back({n, 0.7 * std::pow(ln, -1.0 / alpha)});
      pc_unb.push_back({n, 0.7 * std::pow(ln / std::pow(std::log(ln), 2), -1.0 / alpha)});
    }
    CHECK(scaling_fit(tau_bal, alpha, false, Statistic::LogTau, 1.5).spread == doctest::Approx(1.0));
    CHECK(scaling_fit(tau_unb, alpha, true, Statistic::LogTau, 1.5).spread == doctest::Approx(1.0));
    CHECK(scaling_fit(pc_bal, alpha, false, Statistic::Pc, 1.5).spread == doctest::Approx(1.0));
    CHECK(scaling_fit(pc_unb, alpha, true, Statistic::Pc, 1.5).spread == doctest::Approx(1.0));
    CHECK(scaling_fit(tau_unb, alpha, false, Statistic::LogTau, 1.5).spread > 1.5);
  }
  CHECK_THROWS_AS(scaling_fit({{0.1, 1.0}, {0.2, 1.0}}, 1, false, Statistic::LogTau, 1.5), Error);
  CHECK_THROWS_AS(scaling_fit({{0.1, 1.0}, {0.2, 1.0}, {0.3, 1.0}}, 0, false, Statistic::LogTau, 1.5), Error);
}

TEST_CASE("csv and json output") {
  std::ostringstream os;
  write_csv_header(os);
  write_csv_row(os, {"two_neighbour", 64, 0.125, 100, 0.5, 0.4, 0.6, 7});
  CHECK(os.str() == "family,n,p,trials,statistic,ci_low,ci_high,seed\ntwo_neighbour,64,0.125,100,0.5,0.4,0.6,7\n");
  ScalingReport r = scaling_fit({{0.1, 10.0}, {0.2, 5.0}, {0.4, 2.5}}, 1, false, Statistic::LogTau, 1.5);
  auto j = nlohmann::json::parse(to_json(r));
  CHECK(j["points"].size() == 3);
  CHECK(j["spread"].get<double>() == doctest::Approx(1.0));
  CHECK(j["pass"].get<bool>());
  CHECK(j["transform"].get<std::string>() == "p^alpha*log tau");
}
