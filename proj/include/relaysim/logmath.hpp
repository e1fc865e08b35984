#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>

namespace relaysim {

using cdouble = std::complex<double>;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Exact ln(e^a + e^b). Safe when either argument is -inf.
inline double log_add(double a, double b) {
    if (a < b) std::swap(a, b);
    if (a == kNegInf) return kNegInf;
    return a + std::log1p(std::exp(b - a));
}

/// Exact ln(sum_i e^{v_i}).
inline double log_sum_exp(std::span<const double> v) {
    double top = kNegInf;
    for (double x : v) top = std::max(top, x);
    if (top == kNegInf) return kNegInf;
    double acc = 0.0;
    for (double x : v) acc += std::exp(x - top);
    return top + std::log(acc);
}

inline double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

} // namespace relaysim
