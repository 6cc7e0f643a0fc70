#pragma once

#include <cmath>
#include <span>

#include "gupsim/error.hpp"

namespace gupsim {

// Least-squares slope of log|y| against log x.
inline double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DomainError("loglog_slope: need at least two paired samples");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || y[i] == 0.0) {
      throw DomainError("loglog_slope: non-positive sample");
    }
    const double lx = std::log(x[i]);
    const double ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(x.size());
  const double den = n * sxx - sx * sx;
  if (den == 0.0) {
    throw DomainError("loglog_slope: degenerate abscissae");
  }
  return (n * sxy - sx * sy) / den;
}

}  // namespace gupsim
