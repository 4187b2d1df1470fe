#pragma once

// Absolute-tolerance comparator for doctest (whose Approx is purely
// relative). Usage: CHECK(x == near(9.00, 0.01));

#include <cmath>
#include <ostream>

namespace syncstab::test {

struct AbsApprox {
  double value;
  double tol;
};

inline AbsApprox near(double value, double tol) { return {value, tol}; }

inline bool operator==(double lhs, const AbsApprox& rhs) {
  return std::fabs(lhs - rhs.value) <= rhs.tol;
}

inline bool operator==(const AbsApprox& lhs, double rhs) {
  return rhs == lhs;
}

inline std::ostream& operator<<(std::ostream& os, const AbsApprox& a) {
  return os << a.value << " (+- " << a.tol << ")";
}

}  // namespace syncstab::test
