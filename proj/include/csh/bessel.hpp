#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace csh {

namespace detail {

// I0 power series; all terms positive, usable up to moderate arguments.
inline double i0_series(double x) {
  const double z = 0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= z / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

// Asymptotic series sum_k a_k / x^k with a_k = a_{k-1} (2k-1)^2 / (8k),
// truncated at the smallest term.
inline double ik_asymptotic_sum(double x, bool alternating) {
  double a = 1.0, sum = 1.0, prev = 1.0;
  for (int k = 1; k < 40; ++k) {
    a *= (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k);
    const double t = a / std::pow(x, k);
    if (t > prev) break;  // series started diverging
    sum += alternating && (k % 2 == 1) ? -t : t;
    prev = t;
    if (t < 1e-17) break;
  }
  return sum;
}

// Chebyshev coefficients of K0(x) e^x sqrt(x) on x in [1,18], in the
// variable 1/x mapped linearly to [-1,1]; c[0] is halved on evaluation.
inline constexpr std::array<double, 30> k0_cheb = {
    2.3818185292096225955,     -0.049767009159571243539,  0.0036920352165441478088,
    -0.00042435609336172050406, 6.2098721455535026576e-5, -1.0649997850702011463e-5,
    2.0482527018944634059e-6,  -4.3009492596065321401e-7, 9.6874972343841959397e-8,
    -2.3117154358787828365e-8,  5.79128794620508236e-9,   -1.5126072325808181772e-9,
    4.0967295997789832517e-10, -1.1455929018200818953e-10, 3.2959122372080821719e-11,
    -9.7276452914352616223e-12, 2.9380890889219660713e-12, -9.0624791245129108069e-13,
    2.8495686109847954891e-13, -9.1199869788201856933e-14, 2.9671313674530115554e-14,
    -9.8005412448117576785e-15, 3.2829702923985702185e-15, -1.1158998528031803458e-15,
    3.8413981467997002998e-16, -1.3136720485527434109e-16, 4.6613482479701433252e-17,
    -1.7775096668375457314e-17, 6.3212208083110427098e-18, -1.916095343307169974e-18};

inline double k0_cheb_eval(double x) {
  const double wa = 1.0 / 18.0, wb = 1.0;
  const double t = (2.0 / x - (wa + wb)) / (wb - wa);
  double b0 = 0.0, b1 = 0.0;
  for (int j = static_cast<int>(k0_cheb.size()) - 1; j >= 1; --j) {
    const double tmp = 2.0 * t * b0 - b1 + k0_cheb[j];
    b1 = b0;
    b0 = tmp;
  }
  return (t * b0 - b1 + 0.5 * k0_cheb[0]) * std::exp(-x) / std::sqrt(x);
}

}  // namespace detail

/// Modified Bessel function I0, x >= 0.
inline double bessel_i0(double x) {
  if (!(x >= 0.0)) throw std::invalid_argument("I0 domain");
  if (x > 650.0) throw std::overflow_error("argument out of Bessel range");
  if (x <= 15.0) return detail::i0_series(x);
  return std::exp(x) / std::sqrt(2.0 * std::numbers::pi * x) * detail::ik_asymptotic_sum(x, false);
}

/// Modified Bessel function K0, x > 0.
inline double bessel_k0(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("K0 domain");
  if (x >= 18.0)
    return std::exp(-x) * std::sqrt(std::numbers::pi / (2.0 * x)) *
           detail::ik_asymptotic_sum(x, true);
  if (x > 1.0) return detail::k0_cheb_eval(x);
  // small-argument series: both parts are positive for x <= 1
  const double z = 0.25 * x * x;
  double term = 1.0, harmonic = 0.0, sum = 0.0;
  for (int k = 1; k < 60; ++k) {
    term *= z / (static_cast<double>(k) * k);
    harmonic += 1.0 / k;
    sum += term * harmonic;
    if (term * harmonic < 1e-18 * (sum + 1.0)) break;
  }
  constexpr double euler_gamma = 0.57721566490153286060651209;
  return -(std::log(0.5 * x) + euler_gamma) * detail::i0_series(x) + sum;
}

}  // namespace csh
