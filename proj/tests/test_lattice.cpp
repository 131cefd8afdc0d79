#include <doctest.h>

#include <map>
#include <queue>

#include "support.hpp"
#include "ubp/errors.hpp"
#include "ubp/lattice.hpp"

using namespace ubp;
using namespace testing_support;

namespace {

UpdateFamily skew_critical() {
  return UpdateFamily({{{-1, 0}, {0, 1}}, {{0, 1}, {0, -1}}, {{-1, 0}, {0, -1}}, {{2, 0}, {1, 1}}}, "skew_critical");
}

std::vector<UpdateFamily> test_families() {
  return {families::two_neighbour(), families::duarte(), families::van_enter_hulshof(), families::all_singletons(),
          families::three_of_four(), skew_critical()};
}

// One synchronous step inside a box, outside healthy.
std::set<Site> naive_step(const std::set<Site>& on, i64 x0, i64 y0, i64 x1, i64 y1, const UpdateFamily& U) {
  std::set<Site> next = on;
  for (i64 y = y0; y <= y1; ++y)
    for (i64 x = x0; x <= x1; ++x) {
      if (on.count({x, y})) continue;
      for (const auto& rule : U.rules()) {
        bool all = true;
        for (Site d : rule) all = all && on.count({x + d.x, y + d.y});
        if (all) {
          next.insert({x, y});
          break;
        }
      }
    }
  return next;
}

std::vector<std::vector<Site>> naive_components(const std::vector<Site>& s, double kappa) {
  std::vector<int> label(s.size(), -1);
  std::vector<std::vector<Site>> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (label[i] >= 0) continue;
    std::vector<Site> comp;
    std::queue<std::size_t> q;
    q.push(i);
    label[i] = int(out.size());
    while (!q.empty()) {
      std::size_t a = q.front();
      q.pop();
      comp.push_back(s[a]);
      for (std::size_t b = 0; b < s.size(); ++b)
        if (label[b] < 0 && norm(s[a] - s[b]) <= kappa + 1e-9) {
          label[b] = label[i];
          q.push(b);
        }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(comp);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("closure examples") {
  auto U = families::two_neighbour();
  Window w = Window::make_box(-5, -5, 5, 5);
  CHECK(closure({}, w, U).empty());
  CHECK(closure({{0, 0}}, w, U) == std::vector<Site>{{0, 0}});
  CHECK(closure({{0, 0}, {1, 1}}, w, U) == std::vector<Site>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
}

TEST_CASE("frontier closure equals naive fixed point") {
  for (const auto& U : test_families())
    for (int t = 0; t < 60; ++t) {
      i64 W = uniform(4, 48), H = uniform(4, 48);
      auto A = random_sites(std::size_t(uniform(0, 3 * (W + H))), 0, 0, W - 1, H - 1);
      auto fast = closure(A, Window::make_box(0, 0, W - 1, H - 1), U);
      CHECK(fast == naive_closure(A, 0, 0, W - 1, H - 1, U));
    }
}

TEST_CASE("closure is monotone, idempotent and a fixed point") {
  for (const auto& U : test_families())
    for (int t = 0; t < 40; ++t) {
      i64 n = uniform(6, 40);
      Window w = Window::make_box(0, 0, n - 1, n - 1);
      auto B = random_sites(std::size_t(uniform(2, 3 * n)), 0, 0, n - 1, n - 1);
      std::vector<Site> A;
      for (Site p : B)
        if (uniform(0, 1)) A.push_back(p);
      auto cA = closure(A, w, U), cB = closure(B, w, U);
      CHECK(std::includes(cB.begin(), cB.end(), cA.begin(), cA.end()));
      CHECK(closure(cB, w, U) == cB);
      std::set<Site> on(cB.begin(), cB.end());
      CHECK(naive_step(on, 0, 0, n - 1, n - 1, U) == on);
    }
}

TEST_CASE("half-plane windows do not materialise the half-plane") {
  auto U = families::two_neighbour();
  Window w = Window::make_box(BoundingBox{-6, -6, 6, 6}, HalfPlane{Direction(0, 1), 0});
  CHECK(closure({}, w, U).empty());
  auto cl = closure({{0, 0}}, w, U);
  CHECK(cl.size() == 13);
  for (Site p : cl) CHECK(p.y == 0);
  // Unstable direction: the half-plane grows through the whole box.
  Window diag = Window::make_box(BoundingBox{-6, -6, 6, 6}, HalfPlane{Direction(1, 1), 0});
  auto grown = closure({}, diag, U);
  std::size_t outside = 0;
  for (i64 y = -6; y <= 6; ++y)
    for (i64 x = -6; x <= 6; ++x) outside += x + y >= 0 ? 1 : 0;
  CHECK(grown.size() == outside);
}

TEST_CASE("strip_line_decision examples") {
  auto U = families::two_neighbour();
  CHECK(strip_line_decision(Direction(1, 0), {{0, 0}}, U, 4, Side::Plus) == StripVerdict::InfiniteLine);
  CHECK(strip_line_decision(Direction(1, 0), {}, U, 4, Side::Plus) == StripVerdict::FiniteLine);
  auto D = families::duarte();
  CHECK(strip_line_decision(Direction(0, 1), {{0, 0}}, D, 4, Side::Minus) == StripVerdict::FiniteLine);
  CHECK(strip_line_decision(Direction(0, 1), {{0, 0}}, D, 4, Side::Plus) == StripVerdict::InfiniteLine);
}

TEST_CASE("strip verdicts agree with a long direct simulation") {
  struct Case {
    UpdateFamily U;
    Direction u;
  };
  std::vector<Case> cases{{families::two_neighbour(), Direction(1, 0)},
                          {families::duarte(), Direction(0, 1)},
                          {families::duarte(), Direction(1, 0)},
                          {families::van_enter_hulshof(), Direction(0, 1)},
                          {skew_critical(), Direction(1, 0)}};
  for (const auto& c : cases) {
    LineFrame frame(c.u);
    for (int t = 0; t < 40; ++t) {
      std::vector<Site> Z;
      std::size_t k = std::size_t(uniform(0, 3));
      for (std::size_t i = 0; i < k; ++i) Z.push_back(frame.from_frame({uniform(-2, 2), uniform(0, 2)}));
      std::sort(Z.begin(), Z.end());
      Z.erase(std::unique(Z.begin(), Z.end()), Z.end());
      StripReport rep = strip_decision(c.u, Z, c.U);
      // Direct closure in a long frame-aligned box: far sites of l_u on each side.
      const i64 L = 120;
      BoundingBox bb{0, 0, -1, -1};
      for (i64 i : {-L, L})
        for (i64 j : {-2, 40}) {
          Site q = frame.from_frame({i, j});
          if (bb.x1 < bb.x0) bb = {q.x, q.y, q.x, q.y};
          bb = {std::min(bb.x0, q.x), std::min(bb.y0, q.y), std::max(bb.x1, q.x), std::max(bb.y1, q.y)};
        }
      auto cl = closure(Z, Window::make_box(bb, HalfPlane{c.u, 0}), c.U);
      i64 right = 0, left = 0;
      for (Site p : cl) {
        Site f = frame.to_frame(p);
        if (f.y != 0) continue;
        if (f.x > L / 2) ++right;
        if (f.x < -L / 2) ++left;
      }
      if (rep.plus == StripVerdict::InfiniteLine) CHECK(right > 0);
      if (rep.plus == StripVerdict::FiniteLine) CHECK(right == 0);
      if (rep.minus == StripVerdict::InfiniteLine) CHECK(left > 0);
      if (rep.minus == StripVerdict::FiniteLine) CHECK(left == 0);
    }
  }
}

TEST_CASE("voracious witnesses need few translates to fill a long stretch of the line") {
  int checked = 0;
  for (const auto& U : {families::two_neighbour(), families::duarte(), families::van_enter_hulshof(), skew_critical()}) {
    auto c = classify(U);
    for (const auto& ev : c.evidence) {
      const DifficultyResult& r = ev.difficulty.alpha;
      if (!r.finite() || r.witness.empty() || r.value > c.alpha) continue;
      LineFrame frame(ev.u);
      bool filled = false;
      for (int copies = 1; copies <= 8 && !filled; ++copies)
        for (i64 gap = 1; gap <= 6 && !filled; ++gap) {
          std::vector<Site> A;
          for (int k = 0; k < copies; ++k)
            for (Site z : r.witness) {
              Site f = frame.to_frame(z);
              A.push_back(frame.from_frame({f.x - 30 + k * gap, f.y}));
            }
          BoundingBox bb{0, 0, -1, -1};
          for (i64 i : {-40, 40})
            for (i64 j : {-2, 30}) {
              Site q = frame.from_frame({i, j});
              if (bb.x1 < bb.x0) bb = {q.x, q.y, q.x, q.y};
              bb = {std::min(bb.x0, q.x), std::min(bb.y0, q.y), std::max(bb.x1, q.x), std::max(bb.y1, q.y)};
            }
          auto cl = closure(A, Window::make_box(bb, HalfPlane{ev.u, 0}), U);
          std::set<Site> on(cl.begin(), cl.end());
          bool all = true;
          for (i64 i = -20; i <= 20; ++i) all = all && on.count(frame.from_frame({i, 0}));
          filled = all;
        }
      CHECK_MESSAGE(filled, U.name() << " " << to_string(ev.u));
      ++checked;
    }
  }
  CHECK(checked >= 8);
}

TEST_CASE("percolates examples") {
  auto U = families::two_neighbour();
  std::vector<Site> all, diag;
  for (i64 y = 0; y < 8; ++y)
    for (i64 x = 0; x < 8; ++x) all.push_back({x, y});
  for (i64 i = 0; i < 8; ++i) diag.push_back({i, i});
  CHECK(percolates(all, 8, U));
  CHECK_FALSE(percolates({}, 8, U));
  CHECK(percolates(diag, 8, U));
}

TEST_CASE("torus percolation agrees with a naive simulator") {
  for (const auto& U : test_families())
    for (int t = 0; t < 30; ++t) {
      i64 n = uniform(4, 20);
      auto A = random_sites(std::size_t(uniform(0, n * n / 3)), 0, 0, n - 1, n - 1);
      CHECK(percolates(A, n, U) == naive_percolates(A, n, U));
    }
}

TEST_CASE("infection_time examples") {
  auto U = families::two_neighbour();
  Window w = Window::make_box(-10, -10, 10, 10);
  CHECK(infection_time({{0, 0}}, U, 100, w) == 0);
  CHECK(infection_time({{0, 1}, {1, 0}, {-1, 0}}, U, 100, w) == 1);
  CHECK_FALSE(infection_time({}, U, 100, w).has_value());
  CHECK_THROWS_AS(infection_time({}, U, 10, Window::make_box(1, 1, 5, 5)), Error);
}

TEST_CASE("infection_time and generations match naive synchronous updates") {
  for (const auto& U : test_families())
    for (int t = 0; t < 30; ++t) {
      i64 r = uniform(3, 12);
      auto A = random_sites(std::size_t(uniform(1, 4 * r)), -r, -r, r, r);
      std::set<Site> on(A.begin(), A.end());
      std::optional<i64> expect;
      std::vector<std::vector<Site>> gens;
      for (i64 s = 0; s <= 200; ++s) {
        if (on.count({0, 0})) {
          expect = s;
          break;
        }
        auto next = naive_step(on, -r, -r, r, r, U);
        if (next == on) break;
        std::vector<Site> fresh;
        std::set_difference(next.begin(), next.end(), on.begin(), on.end(), std::back_inserter(fresh));
        gens.push_back(fresh);
        on = next;
      }
      Window w = Window::make_box(-r, -r, r, r);
      CHECK(infection_time(A, U, 200, w) == expect);

      std::set<Site> all(A.begin(), A.end());
      std::vector<std::vector<Site>> full;
      for (;;) {
        auto next = naive_step(all, -r, -r, r, r, U);
        if (next == all) break;
        std::vector<Site> fresh;
        std::set_difference(next.begin(), next.end(), all.begin(), all.end(), std::back_inserter(fresh));
        full.push_back(fresh);
        all = next;
      }
      LatticeState st(U, w);
      for (Site p : A) st.infect(p);
      CHECK(st.run_generations(1000) == full);
    }
}

TEST_CASE("strong components agree with breadth-first search") {
  for (int t = 0; t < 200; ++t) {
    auto s = random_sites(std::size_t(uniform(0, 40)), 0, 0, 30, 30);
    double kappa = double(uniform(1, 8)) / 2.0;
    auto got = strong_components(s, kappa);
    for (auto& c : got) std::sort(c.begin(), c.end());
    std::sort(got.begin(), got.end());
    CHECK(got == naive_components(s, kappa));
  }
}

TEST_CASE("disc contents") {
  CHECK(disc(1.0).size() == 5);
  CHECK(disc(std::sqrt(2.0)).size() == 9);
  CHECK(disc(2.0).size() == 13);
}

TEST_CASE("is_u_crossed examples") {
  auto U = families::two_neighbour();
  UStrip S{Direction(0, 1), Direction(1, 0), 6, 1, 10, 1};
  std::vector<Site> column;
  for (i64 y = 0; y < 6; ++y) column.push_back({3, y});
  CHECK(is_u_crossed(S, column, U, 4.0));
  CHECK_FALSE(is_u_crossed(S, {}, U, 4.0));
  std::vector<Site> stair;
  for (i64 y = 0; y < 6; ++y) stair.push_back({y, y});
  CHECK(is_u_crossed(S, stair, U, 4.0));
  // Sites that stay near the bottom do not cross.
  CHECK_FALSE(is_u_crossed(S, {{2, 0}, {7, 0}}, U, 4.0));
}
