#include <doctest.h>

#include <json.hpp>

#include "support.hpp"
#include "ubp/errors.hpp"
#include "ubp/verify.hpp"

using namespace ubp;

TEST_CASE("zero trials give an empty passing report") {
  for (const auto& suite : {"stable", "quasi", "voracity"}) {
    VerifyReport r = run_verify_suite(suite, families::two_neighbour(), 0, 1);
    CHECK(r.ok());
    CHECK(r.trials == 0);
    CHECK(r.counterexamples.empty());
    for (const auto& l : r.lemmas) CHECK(l.failed == 0);
  }
}

TEST_CASE("unknown suite") {
  CHECK_THROWS_AS(run_verify_suite("nonsense", families::two_neighbour(), 1, 1), Error);
}

TEST_CASE("suites that do not apply throw") {
  auto code = [](const std::string& suite, const UpdateFamily& U) {
    try {
      run_verify_suite(suite, U, 1, 1);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::ParseError;
  };
  CHECK(code("cover", families::three_of_four()) == Errc::NotCritical);
  CHECK(code("cover", families::duarte()) == Errc::NotCritical);
  CHECK(code("iceberg", families::two_neighbour()) == Errc::NotDriftFamily);
}

TEST_CASE("every suite passes on a few trials") {
  struct Case {
    std::string suite;
    UpdateFamily family;
  };
  std::vector<Case> cases{{"stable", families::duarte()},       {"quasi", families::van_enter_hulshof()},
                          {"voracity", families::duarte()},     {"cover", families::two_neighbour()},
                          {"span", families::duarte()},         {"iceberg", families::duarte()},
                          {"scaling", families::two_neighbour()}};
  for (const auto& c : cases) {
    VerifyReport r = run_verify_suite(c.suite, c.family, 4, 3);
    CHECK_MESSAGE(r.ok(), r.text());
    CHECK(r.suite == c.suite);
    CHECK(r.trials == 4);
    std::size_t checked = 0;
    for (const auto& l : r.lemmas) checked += l.passed;
    CHECK(checked > 0);
    auto j = nlohmann::json::parse(r.json());
    CHECK(j["suite"] == c.suite);
  }
}

TEST_CASE("reports are deterministic") {
  for (const auto& suite : {"cover", "span"}) {
    auto U = std::string(suite) == "cover" ? families::two_neighbour() : families::duarte();
    CHECK(run_verify_suite(suite, U, 3, 9).json() == run_verify_suite(suite, U, 3, 9).json());
  }
}
