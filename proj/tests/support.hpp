#pragma once

// Shared helpers for the unit tests: a seeded generator and small naive oracles.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "ubp/family.hpp"
#include "ubp/geometry.hpp"

namespace testing_support {

using ubp::i64;
using ubp::Site;

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(20240611);
  return g;
}

inline i64 uniform(i64 lo, i64 hi) { return std::uniform_int_distribution<i64>(lo, hi)(rng()); }

inline ubp::Direction random_direction(i64 r) {
  for (;;) {
    i64 a = uniform(-r, r), b = uniform(-r, r);
    if (a || b) return ubp::Direction(a, b);
  }
}

inline std::vector<Site> random_sites(std::size_t count, i64 x0, i64 y0, i64 x1, i64 y1) {
  std::set<Site> s;
  for (std::size_t i = 0; i < count; ++i) s.insert({uniform(x0, x1), uniform(y0, y1)});
  return {s.begin(), s.end()};
}

// Repeated full sweeps until nothing changes; outside the box counts as healthy.
inline std::vector<Site> naive_closure(const std::vector<Site>& A, i64 x0, i64 y0, i64 x1, i64 y1,
                                       const ubp::UpdateFamily& U) {
  std::set<Site> on(A.begin(), A.end());
  for (bool changed = true; changed;) {
    changed = false;
    for (i64 y = y0; y <= y1; ++y)
      for (i64 x = x0; x <= x1; ++x) {
        if (on.count({x, y})) continue;
        for (const auto& rule : U.rules()) {
          bool all = true;
          for (Site d : rule) all = all && on.count({x + d.x, y + d.y});
          if (all) {
            on.insert({x, y});
            changed = true;
            break;
          }
        }
      }
  }
  return {on.begin(), on.end()};
}

// Naive torus closure on an n x n grid.
inline bool naive_percolates(const std::vector<Site>& A, i64 n, const ubp::UpdateFamily& U) {
  std::vector<char> on(std::size_t(n * n), 0);
  auto wrap = [n](i64 v) { return ((v % n) + n) % n; };
  for (Site p : A) on[std::size_t(wrap(p.y) * n + wrap(p.x))] = 1;
  for (bool changed = true; changed;) {
    changed = false;
    for (i64 y = 0; y < n; ++y)
      for (i64 x = 0; x < n; ++x) {
        if (on[std::size_t(y * n + x)]) continue;
        for (const auto& rule : U.rules()) {
          bool all = true;
          for (Site d : rule) all = all && on[std::size_t(wrap(y + d.y) * n + wrap(x + d.x))];
          if (all) {
            on[std::size_t(y * n + x)] = 1;
            changed = true;
            break;
          }
        }
      }
  }
  return std::all_of(on.begin(), on.end(), [](char c) { return c; });
}

}  // namespace testing_support
