#pragma once

#include <stdexcept>
#include <string>

namespace rudu {

// Each category maps onto a distinct CLI exit code.
enum class ErrorKind {
  invalid_argument = 6,
  missing_file = 3,
  incompatible_checkpoint = 4,
  unknown_solver = 5,
  infeasible = 7,
  budget_exceeded = 8,
  numeric = 9,
  io = 10,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorKind::invalid_argument, what);
}

}  // namespace rudu
