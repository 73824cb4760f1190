#pragma once

#include <stdexcept>
#include <string>

namespace perclab {

enum class ErrorKind {
  invalid_argument,  // malformed input, bad parameters
  size_cap,          // explicit size or enumeration cap exceeded
  frontier,          // computation would touch the truncation frontier
  exhausted,         // a search finished without a valid answer
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::invalid_argument, what);
}

}  // namespace perclab
