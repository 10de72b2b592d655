#pragma once

#include <stdexcept>
#include <string>

namespace fate421 {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Negative occupation number, malformed text form, or face out of range.
class InvalidCombination : public Error {
 public:
  using Error::Error;
};

/// Hierarchic comparison of combinations with different norms.
class InvalidComparison : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

/// A move that breaks a rule of the round. `rule()` names the violated rule
/// so that callers (HTTP API, terminal advisor) can report it verbatim.
class RuleViolation : public Error {
 public:
  RuleViolation(std::string rule, const std::string& what)
      : Error(what), rule_(std::move(rule)) {}
  const std::string& rule() const noexcept { return rule_; }

 private:
  std::string rule_;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class UtilityUndefined : public Error {
 public:
  using Error::Error;
};

/// A strategy has no decision at a (time, state, event) the chain reaches.
class StrategyHole : public Error {
 public:
  using Error::Error;
};

/// A -infinity utility reached a solved or evaluated value.
class Diagnostic : public Error {
 public:
  using Error::Error;
};

/// Query of a next-player result probability that dilemmas leave undefined.
class UndefinedCell : public Error {
 public:
  using Error::Error;
};

class TableMismatch : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

/// Unknown advice session.
class NotFound : public Error {
 public:
  using Error::Error;
};

}  // namespace fate421
