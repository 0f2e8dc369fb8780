#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mapleja {

/// Violated precondition of a library call (caller bug, not bad data).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace detail {
inline std::string format_point(const std::vector<double>& y) {
  std::string s = "(";
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(y[i]);
  }
  return s + ")";
}
}  // namespace detail

/// A model evaluation failed at a collocation node.
class ModelEvaluationError : public std::runtime_error {
 public:
  ModelEvaluationError(std::vector<double> node, const std::string& what)
      : std::runtime_error("model evaluation failed at " + detail::format_point(node) + ": " +
                           what),
        node_(std::move(node)) {}

  const std::vector<double>& node() const noexcept { return node_; }

 private:
  std::vector<double> node_;
};

/// Singular or ill-conditioned linear system.
class SolveError : public std::runtime_error {
 public:
  SolveError(std::vector<double> node, double rcond, const std::string& what)
      : std::runtime_error(what + " at " + detail::format_point(node) +
                           " (reciprocal condition estimate " + std::to_string(rcond) + ")"),
        node_(std::move(node)),
        rcond_(rcond) {}

  const std::vector<double>& node() const noexcept { return node_; }
  double rcond() const noexcept { return rcond_; }

 private:
  std::vector<double> node_;
  double rcond_;
};

/// Malformed serialized input. `location` is a JSON pointer or a byte offset.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string location, const std::string& what)
      : std::runtime_error("parse error at " + location + ": " + what),
        location_(std::move(location)) {}

  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

class VersionError : public ParseError {
 public:
  VersionError(int found, int expected)
      : ParseError("/version", "unsupported format version " + std::to_string(found) +
                                   " (expected " + std::to_string(expected) + ")"),
        found_(found) {}

  int found() const noexcept { return found_; }

 private:
  int found_;
};

}  // namespace mapleja
