#include "gasket/constants.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "gasket/errors.hpp"

namespace gasket {

std::string describe(const OpenInterval& iv) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "(%.5f, %.5f)", std::ceil(iv.lo * 1e5) / 1e5, std::floor(iv.hi * 1e5) / 1e5);
  return buf;
}

void require_admissible_order(double s) {
  if (!kAdmissibleOrder.contains(s)) {
    throw ParameterError("s must lie in " + describe(kAdmissibleOrder) + ", got " + std::to_string(s));
  }
}

void require_admissible_hurst(double hurst) {
  if (!kAdmissibleHurst.contains(hurst)) {
    throw ParameterError("H must lie in " + describe(kAdmissibleHurst) + ", got " + std::to_string(hurst));
  }
}

}  // namespace gasket
