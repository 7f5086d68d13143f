#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

namespace gradientlab {

enum class FailureKind {
  indeterminate,        // enumeration limits exhausted before closure
  cap_exceeded,         // a configured desk-scale cap would be exceeded
  embedding_violation,  // user-supplied subgroup presentation contradicts the ambient action
};

const char* to_string(FailureKind k);

struct Failure {
  FailureKind kind = FailureKind::indeterminate;
  std::string detail;
};

// Either a value or a recoverable failure. Failures are ordinary outcomes of
// batch work, so they are returned rather than thrown.
template <class T>
class Outcome {
public:
  Outcome(T value) : v_(std::move(value)) {}
  Outcome(Failure f) : v_(std::move(f)) {}

  bool ok() const { return v_.index() == 0; }
  explicit operator bool() const { return ok(); }

  const T& value() const& {
    if (!ok()) throw std::logic_error("Outcome::value on failure: " + failure().detail);
    return std::get<0>(v_);
  }
  T value() && {
    if (!ok()) throw std::logic_error("Outcome::value on failure: " + failure().detail);
    return std::get<0>(std::move(v_));
  }
  const Failure& failure() const { return std::get<1>(v_); }

private:
  std::variant<T, Failure> v_;
};

} // namespace gradientlab
