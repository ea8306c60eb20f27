#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fexec {

/// Position in source text, 1-based. A zero line means "unknown".
struct SourceLoc {
  std::size_t line = 0;
  std::size_t column = 0;

  std::string str() const {
    if (line == 0) return "?:?";
    return std::to_string(line) + ":" + std::to_string(column);
  }
};

/// Base of every error raised by the language implementation.
class Error : public std::exception {
 public:
  Error(std::string kind, std::string message, SourceLoc loc = {})
      : kind_(std::move(kind)), message_(std::move(message)), loc_(loc) {
    render();
  }

  const char* what() const noexcept override { return full_.c_str(); }
  const std::string& kind() const noexcept { return kind_; }
  const std::string& message() const noexcept { return message_; }
  SourceLoc loc() const noexcept { return loc_; }

  /// Records where the error surfaced, unless a location is already known.
  void attach(SourceLoc loc) {
    if (loc_.line || !loc.line) return;
    loc_ = loc;
    render();
  }

 private:
  void render() { full_ = kind_ + ": " + message_ + (loc_.line ? " at " + loc_.str() : ""); }

  std::string kind_;
  std::string message_;
  SourceLoc loc_;
  std::string full_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, SourceLoc loc) : Error("SyntaxError", message, loc) {}
};

/// Errors raised while evaluating a well-formed program.
class LanguageError : public Error {
 public:
  using Error::Error;
};

class UnboundVariable : public LanguageError {
 public:
  explicit UnboundVariable(const std::string& name, SourceLoc loc = {})
      : LanguageError("UnboundVariable", name, loc) {}
};

class TypeError : public LanguageError {
 public:
  explicit TypeError(const std::string& message, SourceLoc loc = {})
      : LanguageError("TypeError", message, loc) {}
};

class ArityError : public LanguageError {
 public:
  explicit ArityError(const std::string& message, SourceLoc loc = {})
      : LanguageError("ArityError", message, loc) {}
};

/// A label policy produced a faceted or lazy-failure decision.
class PolicyError : public LanguageError {
 public:
  explicit PolicyError(const std::string& message, SourceLoc loc = {})
      : LanguageError("PolicyError", message, loc) {}
};

/// An effectful primitive was handed the lazy-failure value.
class StarObserved : public LanguageError {
 public:
  explicit StarObserved(const std::string& message, SourceLoc loc = {})
      : LanguageError("StarObserved", message, loc) {}
};

/// A faceted value (or a privileged context) reached an effect that cannot hold facets.
class FacetEscape : public LanguageError {
 public:
  explicit FacetEscape(const std::string& message, SourceLoc loc = {})
      : LanguageError("FacetEscape", message, loc) {}
};

/// Raised by the `error` primitive.
class UserError : public LanguageError {
 public:
  explicit UserError(const std::string& message, SourceLoc loc = {})
      : LanguageError("Error", message, loc) {}
};

/// The program counter would hold both +l and -l. Indicates an evaluator bug.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class NotOracleSafe : public Error {
 public:
  NotOracleSafe(const std::string& message, SourceLoc loc = {})
      : Error("NotOracleSafe", message, loc) {}
};

class MissingLabel : public Error {
 public:
  explicit MissingLabel(const std::string& message) : Error("MissingLabel", message) {}
};

}  // namespace fexec
