#ifndef TERNSTAB_HYPOTHESIS_HPP
#define TERNSTAB_HYPOTHESIS_HPP

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "bracket.hpp"
#include "control.hpp"
#include "evaluable_map.hpp"
#include "stabilize.hpp"

namespace ternstab {

template <FieldScalar S>
struct InequalityStats {
   std::string name;
   std::size_t evaluated = 0;
   std::size_t violations = 0;
   double max_residual = 0.0;
   double min_slack = std::numeric_limits<double>::infinity(); // min(phi - residual)
   // Worst tuple (smallest slack): the sampled points and lambda.
   std::vector<Vector<S>> worst_points;
   S worst_lambda = S(1);
};

template <FieldScalar S>
struct HypothesisReport {
   DerivationMode mode = DerivationMode::lie;
   std::size_t lambda_grid = 0;
   std::size_t samples = 0;
   InequalityStats<S> main, g, h, k;

   std::size_t total_violations() const { return main.violations + g.violations + h.violations + k.violations; }
};

/// lambda over the unit circle: L equispaced points for complex scalars, {+1, -1} for real ones.
template <FieldScalar S>
std::vector<S> unit_circle_grid(std::size_t grid)
{
   if constexpr (is_complex_v<S>) {
      std::vector<S> out;
      for (std::size_t j = 0; j < grid; ++j)
         out.push_back(std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(grid)));
      return out;
   } else {
      return {1.0, -1.0};
   }
}

namespace detail {

template <FieldScalar S>
void record(InequalityStats<S>& st, double residual, double bound, const std::vector<Vector<S>>& pts, S lambda)
{
   ++st.evaluated;
   st.max_residual = std::max(st.max_residual, residual);
   const double slack = bound - residual;
   if (slack < st.min_slack) {
      st.min_slack = slack;
      st.worst_points = pts;
      st.worst_lambda = lambda;
   }
   if (residual > bound + 1e-12 * (1.0 + bound)) ++st.violations;
}

} // namespace detail

/**
 * Samples the approximate-derivation hypothesis
 *   |f(l x + l y + [uvw]) - l f(x) - l f(y) - sum_i s_i Br_(g,h,k)(...)| <= phi(x, y, u, v, w)
 * and the approximate additivity of g, h, k against phi(x, y, 0, 0, 0).
 * Jordan mode collapses u = v = w and uses a 3-ary control phi(x, y, u).
 * Violations are findings, not errors.
 */
template <FieldScalar S>
HypothesisReport<S> check_hypothesis(const EvaluableMap<S>& f, const EvaluableMap<S>& g, const EvaluableMap<S>& h,
                                     const EvaluableMap<S>& k, const ControlFunction<S>& phi, const TernaryModule<S>& mod,
                                     const SignConvention& signs, DerivationMode mode, std::size_t lambda_grid,
                                     std::size_t samples, std::uint64_t seed)
{
   if (lambda_grid < 2) throw Error(ErrorCode::invalid_argument, "lambda grid needs at least 2 points");
   const std::size_t want_arity = mode == DerivationMode::lie ? 5 : 3;
   if (phi.arity() != want_arity)
      throw Error(ErrorCode::invalid_argument, std::string(to_string(mode)) + " hypothesis needs a control of arity " +
                                                  std::to_string(want_arity));
   const auto da = static_cast<Eigen::Index>(mod.algebra().dim());
   const Norm an = mod.algebra().norm();
   const Norm xn = mod.norm();
   const auto lambdas = unit_circle_grid<S>(lambda_grid);

   HypothesisReport<S> rep;
   rep.mode = mode;
   rep.lambda_grid = lambdas.size();
   rep.samples = samples;
   rep.main.name = mode == DerivationMode::lie ? "derivation" : "jordan_derivation";
   rep.g.name = "g_additivity";
   rep.h.name = "h_additivity";
   rep.k.name = "k_additivity";

   std::mt19937_64 rng(seed);
   std::uniform_real_distribution<double> log_radius(-1.0, 1.0);
   const auto draw = [&]() {
      Vector<S> v = random_vector<S>(da, rng);
      return Vector<S>(v * S(std::pow(10.0, log_radius(rng)) / an(v)));
   };
   const Vector<S> zero = Vector<S>::Zero(da);

   for (std::size_t s = 0; s < samples; ++s) {
      const Vector<S> x = draw(), y = draw(), u = draw();
      const Vector<S> v = mode == DerivationMode::lie ? draw() : u;
      const Vector<S> w = mode == DerivationMode::lie ? draw() : u;
      std::vector<Vector<S>> main_args = mode == DerivationMode::lie ? std::vector<Vector<S>>{x, y, u, v, w}
                                                                     : std::vector<Vector<S>>{x, y, u};
      std::vector<Vector<S>> add_args = mode == DerivationMode::lie ? std::vector<Vector<S>>{x, y, zero, zero, zero}
                                                                    : std::vector<Vector<S>>{x, y, zero};
      const double phi_main = phi(std::span<const Vector<S>>(main_args));
      const double phi_add = phi(std::span<const Vector<S>>(add_args));
      const Vector<S> uvw = mod.algebra().product(u, v, w);
      const Vector<S> fu = f(u), fv = f(v), fw = f(w), fx = f(x), fy = f(y);
      const Vector<S> brackets = S(signs[0]) * sigma_tau_xi_bracket(mod, fu, v, w, g, h, k) +
                                 S(signs[1]) * sigma_tau_xi_bracket(mod, fv, u, w, g, h, k) +
                                 S(signs[2]) * sigma_tau_xi_bracket(mod, fw, v, u, g, h, k);
      for (const S& lam : lambdas) {
         const Vector<S> lxy = lam * x + lam * y;
         const double r = xn(f(Vector<S>(lxy + uvw)) - lam * fx - lam * fy - brackets);
         detail::record(rep.main, r, phi_main, main_args, lam);
         const auto additivity = [&](InequalityStats<S>& st, const EvaluableMap<S>& m) {
            detail::record(st, an(m(lxy) - lam * m(x) - lam * m(y)), phi_add, add_args, lam);
         };
         additivity(rep.g, g);
         additivity(rep.h, h);
         additivity(rep.k, k);
      }
   }
   return rep;
}

} // namespace ternstab

#endif
