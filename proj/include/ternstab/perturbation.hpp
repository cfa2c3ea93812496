#ifndef TERNSTAB_PERTURBATION_HPP
#define TERNSTAB_PERTURBATION_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>

#include "control.hpp"
#include "evaluable_map.hpp"

namespace ternstab {

enum class DirectionKind { fixed, hashed };

inline std::string_view to_string(DirectionKind k) { return k == DirectionKind::fixed ? "fixed" : "hashed"; }

/// Perturbation b(x) = theta ||x||^p u(x) with u(x) a unit vector; b(0) = 0.
template <FieldScalar S>
struct PerturbationSpec {
   double theta = 0.0;
   double p = 0.5;
   DirectionKind direction = DirectionKind::fixed;
   std::uint64_t seed = 0;
   std::optional<Vector<S>> fixed_direction; // defaults to a seeded unit vector

   void validate() const
   {
      if (!(theta >= 0.0) || !std::isfinite(theta)) throw Error(ErrorCode::invalid_argument, "perturbation theta must be >= 0");
      if (!(p >= 0.0 && p < 1.0)) throw Error(ErrorCode::invalid_argument, "perturbation p must lie in [0, 1)");
   }
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t z)
{
   z += 0x9e3779b97f4a7c15ULL;
   z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
   z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
   return z ^ (z >> 31);
}

/// Uniform in (0, 1) from the top 53 bits.
inline double unit_interval(std::uint64_t bits) { return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53; }

template <FieldScalar S>
std::uint64_t hash_point(std::uint64_t seed, const Vector<S>& x)
{
   std::uint64_t h = mix64(seed);
   const auto absorb = [&h](double v) { h = mix64(h ^ std::bit_cast<std::uint64_t>(v + 0.0)); };
   for (Eigen::Index i = 0; i < x.size(); ++i) {
      if constexpr (is_complex_v<S>) {
         absorb(x(i).real());
         absorb(x(i).imag());
      } else {
         absorb(x(i));
      }
   }
   return h;
}

/// Counter-based Gaussian draw normalised to unit length in the given norm.
template <FieldScalar S>
Vector<S> unit_direction(std::uint64_t key, Eigen::Index dim, const Norm& norm)
{
   Vector<S> v(dim);
   for (std::uint64_t attempt = 0;; ++attempt) {
      for (Eigen::Index i = 0; i < dim; ++i) {
         const std::uint64_t ctr = key + 0x632be59bd9b4e019ULL * (static_cast<std::uint64_t>(i) + 1) + attempt * 0xa0761d6478bd642fULL;
         const double r = std::sqrt(-2.0 * std::log(unit_interval(mix64(ctr))));
         const double angle = 2.0 * std::numbers::pi * unit_interval(mix64(ctr ^ 0xe7037ed1a0b428dbULL));
         if constexpr (is_complex_v<S>)
            v(i) = S(r * std::cos(angle), r * std::sin(angle));
         else
            v(i) = r * std::cos(angle);
      }
      const double n = norm(v);
      if (n > 0.0) return v / S(n);
   }
}

} // namespace detail

/// x -> D(x) + theta ||x||^p u(x); deterministic for a fixed spec.
template <FieldScalar S>
EvaluableMap<S> perturb_map(const LinearMap<S>& d, const PerturbationSpec<S>& spec, Norm in_norm = {}, Norm out_norm = {})
{
   spec.validate();
   const auto out_dim = static_cast<Eigen::Index>(d.out_dim());
   if (spec.direction == DirectionKind::fixed) {
      Vector<S> u;
      if (spec.fixed_direction) {
         require_dim(static_cast<std::size_t>(spec.fixed_direction->size()), d.out_dim(), "perturbation direction");
         const double n = out_norm(*spec.fixed_direction);
         if (n == 0.0) throw Error(ErrorCode::invalid_argument, "perturbation direction must be nonzero");
         u = *spec.fixed_direction / S(n);
      } else {
         u = detail::unit_direction<S>(detail::mix64(spec.seed), out_dim, out_norm);
      }
      return EvaluableMap<S>(
         d.in_dim(), d.out_dim(), MapKind::perturbed_linear,
         [d, u, theta = spec.theta, p = spec.p, in_norm](const Vector<S>& x) -> Vector<S> {
            return d(x) + S(theta * norm_power(in_norm(x), p)) * u;
         },
         d);
   }
   return EvaluableMap<S>(
      d.in_dim(), d.out_dim(), MapKind::perturbed_linear,
      [d, spec, in_norm, out_norm, out_dim](const Vector<S>& x) -> Vector<S> {
         const double mag = spec.theta * norm_power(in_norm(x), spec.p);
         if (mag == 0.0) return d(x);
         return d(x) + S(mag) * detail::unit_direction<S>(detail::hash_point(spec.seed, x), out_dim, out_norm);
      },
      d);
}

} // namespace ternstab

#endif
