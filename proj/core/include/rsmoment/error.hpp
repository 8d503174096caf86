#pragma once

#include <stdexcept>
#include <string>

namespace rsm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when a truncated sum or integral cannot be certified below the
// requested tolerance. `achieved` is the best bound that was obtained.
class UncertifiedError : public Error {
 public:
  UncertifiedError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

// A value together with a bound on |value - exact|.
struct Certified {
  double value = 0.0;
  double cert = 0.0;
};

}  // namespace rsm
