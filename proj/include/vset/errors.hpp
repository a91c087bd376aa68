#ifndef VSET_ERRORS_HPP
#define VSET_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace vset {

// Bad inputs: malformed files, violated preconditions, incompatible
// interpretations. CLI maps these to exit code 2.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Parse failures carry the offending line number.
class ParseError : public ValidationError {
public:
  ParseError(const std::string& msg, long line)
      : ValidationError(msg + " (line " + std::to_string(line) + ")"),
        line_(line) {}
  long line() const { return line_; }

private:
  long line_;
};

// Solver breakdowns: non-convergence, iteration limits. CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace vset

#endif
