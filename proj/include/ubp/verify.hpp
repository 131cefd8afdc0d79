#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ubp/droplets.hpp"
#include "ubp/family.hpp"

namespace ubp {

struct VerifyOptions {
  int window = 8;  // difficulty search window
  double lambda = 16.0;
  std::optional<double> d_hat_radius;  // default max(3 kappa, (alpha - 1) kappa)
};

// Constants shared by the droplet suites.
struct DropletContext {
  Classification classification;
  double rho_hat = 0.0;
  double kappa = 0.0;
  std::vector<Direction> directions;  // S_B or S_U
  double stretch = 1.0;               // hull_stretch(directions)
  Droplet d_hat;
  double d_hat_radius = 0.0;
};

// Throws NotCritical for families that are not critical.
DropletContext droplet_context(const UpdateFamily& U, const VerifyOptions& opt = {});

struct LemmaTally {
  std::string name;
  std::size_t passed = 0;
  std::size_t failed = 0;
};

struct VerifyReport {
  std::string suite;
  std::string family;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::vector<LemmaTally> lemmas;
  std::vector<std::string> counterexamples;
  std::vector<std::pair<std::string, double>> constants;

  bool ok() const;
  LemmaTally& tally(const std::string& name);
  const LemmaTally* find(const std::string& name) const;
  std::string text() const;
  std::string json() const;
};

const std::vector<std::string>& verify_suites();

// Deterministic given (suite, U, trials, seed, opt). Throws InvalidRule for an unknown suite.
VerifyReport run_verify_suite(const std::string& suite, const UpdateFamily& U, std::size_t trials, std::uint64_t seed,
                              const VerifyOptions& opt = {});

}  // namespace ubp
