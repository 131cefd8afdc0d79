#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "ubp/errors.hpp"
#include "ubp/rulefile.hpp"

using namespace ubp;
using namespace testing_support;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_of(const std::string& text) {
  try {
    parse_rule_file(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

Errc code_of(const std::string& text) {
  try {
    parse_rule_file(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error for " << text);
  return Errc::ParseError;
}

}  // namespace

TEST_CASE("corpus files are canonical") {
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(UBP_CORPUS_DIR)) {
    if (entry.path().extension() != ".json") continue;
    std::string text = slurp(entry.path());
    RuleFile f = parse_rule_file(text);
    CHECK_MESSAGE(write_rule_file(f) == text, entry.path());
    CHECK(f.name == entry.path().stem().string());
    ++seen;
  }
  CHECK(seen >= 6);
}

TEST_CASE("parse and write round trip") {
  for (int t = 0; t < 200; ++t) {
    RuleFile f;
    f.name = "random_" + std::to_string(t);
    std::size_t nrules = std::size_t(uniform(1, 6));
    for (std::size_t r = 0; r < nrules; ++r) {
      Rule rule;
      while (rule.empty()) {
        for (Site p : random_sites(std::size_t(uniform(1, 4)), -3, -3, 3, 3))
          if (p != Site{0, 0}) rule.push_back(p);
      }
      f.rules.push_back(rule);
    }
    if (t % 2) f.metadata = {{"class", "Critical"}, {"alpha", t}};
    std::string once = write_rule_file(f);
    RuleFile back = parse_rule_file(once);
    CHECK(back.name == f.name);
    CHECK(back.rules == f.rules);
    CHECK(back.metadata == f.metadata);
    CHECK(write_rule_file(back) == once);
  }
  RuleFile g = rule_file_of(families::duarte());
  CHECK(parse_rule_file(write_rule_file(g)).family().rules() == families::duarte().rules());
}

TEST_CASE("syntax errors carry line and column") {
  std::string text = "{\n  \"name\": \"x\",\n  \"rules\": [[[1, 0]]\n}\n";
  std::string msg = error_of(text);
  CHECK(msg.find("ParseError") == 0);
  CHECK(msg.find("line 4, column 1") != std::string::npos);
  CHECK(error_of("{\"name\": \"x\", \"rules\": [[[1, 0]]], }").find("line 1, column 36 (offset 35)") != std::string::npos);
}

TEST_CASE("value errors carry a json path") {
  CHECK(error_of(R"({"name": "x", "rules": [[[1, 0]], [[0, 0]]]})").find("$.rules[1][0]: rule contains the origin") !=
        std::string::npos);
  CHECK(error_of(R"({"name": "x", "rules": [[[1, 0.5]]]})").find("$.rules[0][0][1]: expected an integer") !=
        std::string::npos);
  CHECK(error_of(R"({"name": "x", "rules": [[[1, 0, 2]]]})").find("$.rules[0][0]: expected [x, y]") !=
        std::string::npos);
  CHECK(error_of(R"({"name": "x", "rules": [[]]})").find("$.rules[0]") != std::string::npos);
  CHECK(error_of(R"({"name": "x", "rules": [[[1, 0]]], "extra": 1})").find("$.extra: unknown field") !=
        std::string::npos);
  CHECK(error_of(R"({"rules": [[[1, 0]]]})").find("$.name") != std::string::npos);
  CHECK(error_of(R"([1, 2])").find("$: expected an object") != std::string::npos);
  CHECK(code_of(R"({"name": "x", "rules": []})") == Errc::EmptyFamily);
  CHECK(code_of(R"({"name": "x", "rules": [[[0, 0]]]})") == Errc::ParseError);
}

TEST_CASE("load reports the path") {
  std::string missing = "/nonexistent/none.json";
  CHECK_THROWS_WITH_AS(load_rule_file(missing), doctest::Contains(missing.c_str()), Error);
  auto tmp = std::filesystem::temp_directory_path() / "ubp_bad_rules.json";
  std::ofstream(tmp) << "{\"name\": \"x\", \"rules\": [[[0, 0]]]}";
  try {
    load_rule_file(tmp.string());
    FAIL("expected an error");
  } catch (const Error& e) {
    std::string msg = e.what();
    CHECK(msg == "ParseError: " + tmp.string() + ": $.rules[0][0]: rule contains the origin");
  }
  std::filesystem::remove(tmp);
  RuleFile d = load_rule_file(std::string(UBP_CORPUS_DIR) + "/duarte.json");
  CHECK(d.family().rules().size() == 3);
  CHECK(d.metadata["class"] == "Critical");
}
