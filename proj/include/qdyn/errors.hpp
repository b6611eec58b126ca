#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qdyn {

// Bad argument or violated precondition on a caller-supplied value.
class argument_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// An orbit left the declared state space. Carries the first offending
// iterate index.
class domain_escape_error : public std::runtime_error {
public:
  domain_escape_error(const std::string& what, std::size_t index)
      : std::runtime_error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

private:
  std::size_t index_;
};

// A structural precondition on the system failed (e.g. more than one
// cycle where a uniquely ergodic system is required).
class precondition_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// An internal consistency invariant broke; indicates a bug, not bad input.
class internal_error : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

}  // namespace qdyn
