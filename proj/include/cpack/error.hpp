#pragma once

#include <stdexcept>
#include <string>

namespace cpack {

// Failure classes; the CLI maps each one onto its own exit code.
enum class ErrorKind { kFormat, kMembership, kSolver, kDegeneracy };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Malformed input. `line` and `column` are 1-based; 0 means "not applicable".
class FormatError : public Error {
 public:
  FormatError(const std::string& what, int line = 0, int column = 0)
      : Error(ErrorKind::kFormat, Decorate(what, line, column)),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string Decorate(const std::string& what, int line, int column) {
    if (line <= 0) return what;
    std::string s = "line " + std::to_string(line);
    if (column > 0) s += ", column " + std::to_string(column);
    return s + ": " + what;
  }
  int line_;
  int column_;
};

class DegeneracyError : public Error {
 public:
  explicit DegeneracyError(const std::string& what)
      : Error(ErrorKind::kDegeneracy, what) {}
};

class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what)
      : Error(ErrorKind::kSolver, what) {}
};

}  // namespace cpack
