#ifndef TERNSTAB_UNIMODULAR_HPP
#define TERNSTAB_UNIMODULAR_HPP

#include <cmath>
#include <complex>
#include <utility>

#include "scalar.hpp"

namespace ternstab {

/**
 * Writes 2 gamma / N as lambda1 + lambda2 with |lambda1| = |lambda2| = 1.
 * With mu = gamma / N, t = |mu| and u = mu / |mu|: lambda = u (t +- i sqrt(1 - t^2)).
 */
inline std::pair<std::complex<double>, std::complex<double>> unimodular_split(std::complex<double> gamma, long n)
{
   if (gamma == 0.0) throw Error(ErrorCode::invalid_argument, "unimodular_split requires gamma != 0");
   if (n <= 0 || static_cast<double>(n) <= std::abs(gamma))
      throw Error(ErrorCode::invalid_argument, "unimodular_split requires N > |gamma|");
   const std::complex<double> mu = gamma / static_cast<double>(n);
   const double t = std::abs(mu);
   const std::complex<double> u = mu / t;
   const double s = std::sqrt((1.0 - t) * (1.0 + t));
   return {u * std::complex<double>(t, s), u * std::complex<double>(t, -s)};
}

} // namespace ternstab

#endif
