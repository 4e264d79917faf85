#pragma once

// Extended-precision scalar used for the cumulant/Padé path. The Hankel
// systems behind a [16,17] continuation of a Stieltjes-type series have
// condition numbers of 1e17..1e25, so both the series coefficients and the
// solve are carried with 50 significant digits.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <complex>
#include <span>
#include <vector>

namespace clutter {

using wide = boost::multiprecision::cpp_bin_float_50;

inline double to_double(const wide& x) { return x.convert_to<double>(); }

inline std::vector<double> to_doubles(std::span<const wide> xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(to_double(x));
  return out;
}

inline std::vector<wide> to_wide(std::span<const double> xs) {
  return {xs.begin(), xs.end()};
}

}  // namespace clutter
