#pragma once

#include <stdexcept>
#include <string>

namespace bfm {

/// Caller passed something that violates a precondition.
class argument_error : public std::invalid_argument {
 public:
  explicit argument_error(const std::string& what) : std::invalid_argument(what) {}
};

/// A quantity that is guaranteed real/bounded by construction came out wrong.
/// Indicates a bug in this library, not in the caller.
class consistency_error : public std::logic_error {
 public:
  explicit consistency_error(const std::string& what) : std::logic_error(what) {}
};

/// A least-squares fit could not be carried out (singular design, divergence).
class fit_error : public std::runtime_error {
 public:
  explicit fit_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bfm
