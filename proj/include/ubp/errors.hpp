#pragma once

#include <stdexcept>
#include <string>

namespace ubp {

enum class Errc {
  EmptyFamily,
  InvalidRule,
  InvalidDirection,
  DifficultyWindowExhausted,
  SearchBudgetExceeded,
  StripHeightExceeded,
  NotCritical,
  NoDriftDirection,
  UnboundedDroplet,
  NotDriftFamily,
  OriginOutsideWindow,
  BudgetExhausted,
  InsufficientData,
  ParseError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace ubp
