#include "ubp/rulefile.hpp"

#include <fstream>
#include <sstream>

#include "ubp/errors.hpp"

namespace ubp {

namespace {

std::string location(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col) + " (offset " + std::to_string(byte) + ")";
}

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw Error(Errc::ParseError, path + ": " + what);
}

i64 integer(const nlohmann::ordered_json& v, const std::string& path) {
  if (!v.is_number_integer()) bad(path, "expected an integer");
  return v.get<i64>();
}

}  // namespace

RuleFile parse_rule_file(const std::string& text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::string msg = e.what();
    auto pos = msg.find(": ", msg.find("parse error"));
    throw Error(Errc::ParseError, location(text, e.byte > 0 ? e.byte - 1 : 0) + ": " +
                                      (pos == std::string::npos ? msg : msg.substr(pos + 2)));
  }
  if (!j.is_object()) bad("$", "expected an object");
  RuleFile f;
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "name" && it.key() != "rules" && it.key() != "metadata") bad("$." + it.key(), "unknown field");
  if (!j.contains("name") || !j["name"].is_string()) bad("$.name", "expected a string");
  f.name = j["name"].get<std::string>();
  if (!j.contains("rules") || !j["rules"].is_array()) bad("$.rules", "expected an array");
  const auto& rs = j["rules"];
  for (std::size_t r = 0; r < rs.size(); ++r) {
    std::string rp = "$.rules[" + std::to_string(r) + "]";
    if (!rs[r].is_array() || rs[r].empty()) bad(rp, "expected a non-empty array of sites");
    Rule rule;
    for (std::size_t s = 0; s < rs[r].size(); ++s) {
      std::string sp = rp + "[" + std::to_string(s) + "]";
      const auto& site = rs[r][s];
      if (!site.is_array() || site.size() != 2) bad(sp, "expected [x, y]");
      Site p{integer(site[0], sp + "[0]"), integer(site[1], sp + "[1]")};
      if (p == Site{0, 0}) bad(sp, "rule contains the origin");
      rule.push_back(p);
    }
    f.rules.push_back(rule);
  }
  if (f.rules.empty()) throw Error(Errc::EmptyFamily, "$.rules: no rules");
  if (j.contains("metadata")) {
    if (!j["metadata"].is_object()) bad("$.metadata", "expected an object");
    f.metadata = j["metadata"];
  }
  return f;
}

RuleFile load_rule_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_rule_file(ss.str());
  } catch (const Error& e) {
    std::string msg = e.what();
    std::string prefix = std::string(errc_name(e.code())) + ": ";
    if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
    throw Error(e.code(), path + ": " + msg);
  }
}

std::string write_rule_file(const RuleFile& f) {
  std::ostringstream os;
  os << "{\n  \"name\": " << nlohmann::json(f.name).dump() << ",\n  \"rules\": [\n";
  for (std::size_t r = 0; r < f.rules.size(); ++r) {
    os << "    [";
    for (std::size_t s = 0; s < f.rules[r].size(); ++s)
      os << (s ? ", " : "") << "[" << f.rules[r][s].x << ", " << f.rules[r][s].y << "]";
    os << "]" << (r + 1 < f.rules.size() ? "," : "") << "\n";
  }
  os << "  ]";
  if (!f.metadata.is_null()) os << ",\n  \"metadata\": " << f.metadata.dump();
  os << "\n}\n";
  return os.str();
}

RuleFile rule_file_of(const UpdateFamily& U) {
  RuleFile f;
  f.name = U.name();
  f.rules = U.rules();
  return f;
}

}  // namespace ubp
