#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ubp/family.hpp"

namespace ubp {

struct RuleFile {
  std::string name;
  std::vector<Rule> rules;
  nlohmann::ordered_json metadata;  // null when absent

  UpdateFamily family() const { return UpdateFamily(rules, name); }
};

// Throws ParseError with line and column for malformed JSON and a JSON path for bad values.
RuleFile parse_rule_file(const std::string& text);
RuleFile load_rule_file(const std::string& path);
// Canonical form: one rule per line, sites in the stored order.
std::string write_rule_file(const RuleFile& f);
RuleFile rule_file_of(const UpdateFamily& U);

}  // namespace ubp
