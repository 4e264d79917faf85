#pragma once

#include "clutter/error.hpp"

#include <doctest.h>

#include <complex>
#include <vector>

namespace testing {

template <typename Fn>
clutter::ErrorKind error_kind(Fn&& fn) {
  try {
    fn();
  } catch (const clutter::Error& e) {
    return e.kind();
  }
  FAIL("expected a clutter::Error");
  return clutter::ErrorKind::InvalidArgument;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

}  // namespace testing

#define CHECK_ERROR(kind, expr) CHECK(testing::error_kind([&] { (void)(expr); }) == (kind))
