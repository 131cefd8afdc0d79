#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ubp/family.hpp"
#include "ubp/lattice.hpp"

namespace ubp {

// Counter-based uniform variates keyed by (seed, trial, site); order and thread independent.
class SiteRng {
 public:
  SiteRng(std::uint64_t seed, std::uint64_t trial);

  std::uint64_t bits(std::uint64_t site) const;
  double uniform(std::uint64_t site) const;
  // Index of a site of Z^2 that does not depend on any window.
  static std::uint64_t site_key(Site p);

 private:
  std::uint64_t stream_;
};

// Worker count from UBP_THREADS, defaulting to the hardware concurrency.
unsigned worker_count();
// Runs task(i) for i in [0, n) on the worker pool.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task);

struct TrialConfig {
  UpdateFamily family;
  i64 n = 64;
  double p = 0.1;
  std::uint64_t seed = 1;
  i64 t_max = 0;
  int trials = 100;
};

struct Proportion {
  std::size_t successes = 0;
  std::size_t trials = 0;
  double fraction = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
};

// Wilson score interval at normal quantile z.
Proportion wilson(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

// The p-random subset of the n-torus for the given trial.
std::vector<std::size_t> random_torus_set(i64 n, double p, const SiteRng& rng);
bool torus_trial(const UpdateFamily& U, i64 n, double p, const SiteRng& rng);

Proportion percolation_probability(const TrialConfig& cfg);
// Trials [first, first + count) only.
Proportion percolation_probability(const TrialConfig& cfg, std::size_t first, std::size_t count);

struct PcOptions {
  int batch = 100;        // trials per sequential batch
  int max_batches = 8;    // per bisection point
  double tol = 0.002;     // final bracket width
  std::size_t budget = 200000;  // total trials
  std::uint64_t seed = 1;
  double lo = 0.0;
  double hi = 1.0;
};

struct PcEstimate {
  i64 n = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  std::size_t trials_used = 0;
  struct Probe {
    double p;
    Proportion result;
  };
  std::vector<Probe> probes;
};

PcEstimate estimate_pc(const UpdateFamily& U, i64 n, const PcOptions& opt = {});

struct TauOptions {
  std::uint64_t seed = 1;
  i64 t_max = 4096;
  std::size_t max_sites = std::size_t(1) << 24;
};

struct TauSample {
  std::optional<i64> tau;  // nullopt: timeout
  i64 window_radius = 0;   // largest half-extent of the window used
  bool exact = true;       // false once the window was clipped by max_sites
};

struct TauStats {
  double p = 0.0;
  std::size_t trials = 0;
  int timeouts = 0;
  double median = 0.0;  // of tau; timeouts count as +infinity
  double q1 = 0.0;
  double q3 = 0.0;
  double median_log = 0.0;
  std::vector<TauSample> samples;
};

// Bounding box of the sites that can influence the origin within t steps, t * hull(support u {0}),
// scaled down about the origin if it holds more than max_sites sites.
BoundingBox tau_window(const UpdateFamily& U, i64 t, std::size_t max_sites, bool* clipped = nullptr);
TauSample tau_trial(const UpdateFamily& U, double p, std::uint64_t seed, std::uint64_t trial, const TauOptions& opt);
TauStats sample_tau(const UpdateFamily& U, double p, int trials, const TauOptions& opt);

enum class Statistic { LogTau, Pc };

struct ScalingReport {
  std::vector<std::pair<double, double>> points;  // (p or n, raw statistic)
  std::vector<double> transformed;
  std::string transform;
  double spread = 1.0;
  double bound = 0.0;
  bool pass = false;
};

// LogTau points are (p, median log tau); Pc points are (n, p_c). unbalanced picks the transform.
ScalingReport scaling_fit(const std::vector<std::pair<double, double>>& points, int alpha, bool unbalanced,
                          Statistic stat, double bound);

struct CsvRow {
  std::string family;
  i64 n = 0;
  double p = 0.0;
  std::size_t trials = 0;
  double statistic = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t seed = 0;
};

void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const CsvRow& r);
std::string to_json(const ScalingReport& r);

}  // namespace ubp
