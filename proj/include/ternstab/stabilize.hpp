#ifndef TERNSTAB_STABILIZE_HPP
#define TERNSTAB_STABILIZE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bracket.hpp"
#include "hyers.hpp"
#include "unimodular.hpp"

namespace ternstab {

enum class DerivationMode { lie, jordan };

inline std::string_view to_string(DerivationMode m) { return m == DerivationMode::lie ? "lie" : "jordan"; }

inline DerivationMode derivation_mode_from_string(std::string_view s)
{
   if (s == "lie") return DerivationMode::lie;
   if (s == "jordan") return DerivationMode::jordan;
   throw Error(ErrorCode::invalid_argument, "mode must be 'lie' or 'jordan'");
}

template <FieldScalar S>
struct StabilizeOptions {
   double tol = 1e-10;
   int max_iter = kMaxDoublings;
   DerivationMode mode = DerivationMode::lie;
   std::uint64_t seed = 1;
   std::size_t linearity_samples = 10;
   std::size_t bound_samples = 100;
   std::size_t identity_samples = 100;
   double identity_threshold = 1e-8;
   bool record_traces = false;
   // Exact limits, when known; only used for trace errors.
   std::optional<LinearMap<S>> reference_D, reference_sigma, reference_tau, reference_xi;
};

/// One recovered map with its per-basis-vector iteration record and checks.
template <FieldScalar S>
struct RecoveredMap {
   std::string name;
   std::optional<LinearMap<S>> map;
   std::vector<int> iterations;
   StoppingRule rule = StoppingRule::a_priori;
   std::vector<std::vector<HyersTraceEntry>> traces;
   std::optional<std::string> error;
   std::optional<ErrorCode> error_code;

   double max_linearity_defect = 0.0; // |M x - limit(x)| at non-basis points
   double linearity_threshold = 0.0;
   double max_bound_ratio = 0.0;      // |g(x) - M x| / phi~(x, x, 0, ...)
   double max_bound_excess = -std::numeric_limits<double>::infinity();
   std::size_t bound_violations = 0;
   double convergence_rate = std::numeric_limits<double>::quiet_NaN();

   bool ok() const { return map.has_value() && !error && max_linearity_defect <= linearity_threshold && bound_violations == 0; }
};

template <FieldScalar S>
struct StabilizationReport {
   RecoveredMap<S> D, sigma, tau, xi;
   DerivationMode mode = DerivationMode::lie;
   SignConvention signs;
   double tol = 0.0;

   std::vector<double> sample_norms;      // ||x|| at the bound sample points
   std::vector<double> phi_tilde_values;  // phi~(x, x, 0, ...) at the same points
   double max_identity_residual = std::numeric_limits<double>::quiet_NaN(); // normalised by 1 + |a||b||c|
   double identity_threshold = 0.0;
   std::size_t identity_samples = 0;
   double lie_jordan_discrepancy = std::numeric_limits<double>::quiet_NaN();
   std::optional<double> homogeneity_defect; // complex scalars only
   double homogeneity_threshold = 0.0;
   bool partial = false;

   bool identity_ok() const { return !std::isnan(max_identity_residual) && max_identity_residual <= identity_threshold; }
   bool homogeneity_ok() const { return !homogeneity_defect || *homogeneity_defect <= homogeneity_threshold; }
   bool passed() const
   {
      return !partial && D.ok() && sigma.ok() && tau.ok() && xi.ok() && identity_ok() && homogeneity_ok();
   }
};

namespace detail {

/// Geometric mean of successive ratios over n in [3, 10], from reference errors when present, else steps.
inline double convergence_rate(const std::vector<std::vector<HyersTraceEntry>>& traces)
{
   double log_sum = 0.0;
   std::size_t count = 0;
   for (const auto& tr : traces) {
      for (std::size_t i = 1; i < tr.size(); ++i) {
         if (tr[i - 1].n < 3 || tr[i].n > 10) continue;
         const bool use_err = !std::isnan(tr[i].error) && !std::isnan(tr[i - 1].error);
         const double a = use_err ? tr[i - 1].error : tr[i - 1].step;
         const double b = use_err ? tr[i].error : tr[i].step;
         if (!(a > 0.0) || !(b > 0.0) || std::isnan(a) || std::isnan(b)) continue;
         log_sum += std::log(b / a);
         ++count;
      }
   }
   return count ? std::exp(log_sum / static_cast<double>(count)) : std::numeric_limits<double>::quiet_NaN();
}

template <FieldScalar S, class Rng>
Vector<S> random_unit(Eigen::Index d, const Norm& norm, Rng& rng)
{
   Vector<S> v = random_vector<S>(d, rng);
   return v / S(norm(v));
}

template <FieldScalar S>
RecoveredMap<S> recover_map(const std::string& name, const EvaluableMap<S>& f, const ControlFunction<S>& phi, Norm out_norm,
                            const StabilizeOptions<S>& opts, const std::optional<LinearMap<S>>& reference)
{
   RecoveredMap<S> rec;
   rec.name = name;
   const auto din = static_cast<Eigen::Index>(f.in_dim());
   const auto dout = static_cast<Eigen::Index>(f.out_dim());
   Matrix<S> m(dout, din);
   try {
      for (Eigen::Index i = 0; i < din; ++i) {
         HyersOptions<S> ho;
         ho.tol = opts.tol;
         ho.max_iter = opts.max_iter;
         ho.out_norm = out_norm;
         ho.record_trace = opts.record_traces;
         if (reference) ho.reference = reference->matrix().col(i);
         auto r = hyers_limit(f, phi, basis_vector<S>(din, i), ho);
         m.col(i) = r.value;
         rec.iterations.push_back(r.iterations);
         rec.rule = r.rule;
         if (opts.record_traces) rec.traces.push_back(std::move(r.trace));
      }
      rec.map.emplace(std::move(m));
   } catch (const Error& e) {
      rec.error = e.what();
      rec.error_code = e.code();
   }
   if (opts.record_traces) rec.convergence_rate = convergence_rate(rec.traces);
   return rec;
}

/// Linearity at random unit points and the bound |f(x) - M x| <= phi~(x, x, 0, ...).
template <FieldScalar S>
void check_recovered(RecoveredMap<S>& rec, const EvaluableMap<S>& f, const ControlFunction<S>& phi, Norm in_norm, Norm out_norm,
                     const StabilizeOptions<S>& opts, const std::vector<Vector<S>>& bound_points, std::uint64_t seed)
{
   rec.linearity_threshold = 10.0 * opts.tol;
   if (!rec.map) return;
   const auto din = static_cast<Eigen::Index>(f.in_dim());
   std::mt19937_64 rng(seed);
   HyersOptions<S> ho;
   ho.tol = opts.tol;
   ho.max_iter = opts.max_iter;
   ho.out_norm = out_norm;
   try {
      for (std::size_t s = 0; s < opts.linearity_samples; ++s) {
         const Vector<S> x = random_unit<S>(din, in_norm, rng);
         const auto lim = hyers_limit(f, phi, x, ho);
         rec.max_linearity_defect = std::max(rec.max_linearity_defect, out_norm((*rec.map)(x) - lim.value));
      }
   } catch (const Error& e) {
      rec.error = e.what();
      rec.error_code = e.code();
      return;
   }
   for (const auto& x : bound_points) {
      const auto args = diagonal_args(x, phi.arity());
      const double bound = phi_tilde(phi, std::span<const Vector<S>>(args)).value;
      const double dist = out_norm(f(x) - (*rec.map)(x));
      const double slack = 10.0 * opts.tol * (1.0 + x.template lpNorm<1>());
      rec.max_bound_excess = std::max(rec.max_bound_excess, dist - bound);
      if (bound > 0.0) rec.max_bound_ratio = std::max(rec.max_bound_ratio, dist / bound);
      if (dist > bound + slack) ++rec.bound_violations;
   }
}

} // namespace detail

/**
 * Recovers D, sigma, tau, xi as dyadic limits of f, g, h, k on each basis
 * vector, then checks linearity off the basis, the distance bounds against
 * phi~, and the derivation identity (Lie, or its diagonal Jordan form) of
 * the recovered D with the recovered sigma, tau, xi.
 */
template <FieldScalar S>
StabilizationReport<S> direct_method_stabilize(const EvaluableMap<S>& f, const EvaluableMap<S>& g, const EvaluableMap<S>& h,
                                               const EvaluableMap<S>& k, const ControlFunction<S>& phi,
                                               const TernaryModule<S>& mod, const SignConvention& signs,
                                               const StabilizeOptions<S>& opts)
{
   const std::size_t da = mod.algebra().dim();
   const std::size_t dx = mod.dim();
   require_dim(f.in_dim(), da, "f domain");
   require_dim(f.out_dim(), dx, "f codomain");
   for (const auto* m : {&g, &h, &k}) {
      require_dim(m->in_dim(), da, "g/h/k domain");
      require_dim(m->out_dim(), da, "g/h/k codomain");
   }
   const Vector<S> zero_a = Vector<S>::Zero(static_cast<Eigen::Index>(da));
   for (const auto* m : {&f, &g, &h, &k})
      if (!(*m)(zero_a).isZero(0.0)) throw Error(ErrorCode::nonzero_at_origin, "approximate maps must vanish at 0");

   const Norm an = mod.algebra().norm();
   const Norm xn = mod.norm();
   StabilizationReport<S> rep;
   rep.mode = opts.mode;
   rep.signs = signs;
   rep.tol = opts.tol;
   rep.identity_threshold = opts.identity_threshold;

   rep.D = detail::recover_map("D", f, phi, xn, opts, opts.reference_D);
   rep.sigma = detail::recover_map("sigma", g, phi, an, opts, opts.reference_sigma);
   rep.tau = detail::recover_map("tau", h, phi, an, opts, opts.reference_tau);
   rep.xi = detail::recover_map("xi", k, phi, an, opts, opts.reference_xi);

   // Bound sample points: random directions with norms spread over [0.1, 10].
   std::mt19937_64 rng(opts.seed);
   std::vector<Vector<S>> points;
   std::uniform_real_distribution<double> log_radius(-1.0, 1.0);
   for (std::size_t s = 0; s < opts.bound_samples; ++s) {
      Vector<S> x = detail::random_unit<S>(static_cast<Eigen::Index>(da), an, rng);
      x *= S(std::pow(10.0, log_radius(rng)));
      rep.sample_norms.push_back(an(x));
      const auto args = diagonal_args(x, phi.arity());
      rep.phi_tilde_values.push_back(phi_tilde(phi, std::span<const Vector<S>>(args)).value);
      points.push_back(std::move(x));
   }
   detail::check_recovered(rep.D, f, phi, an, xn, opts, points, opts.seed ^ 0x11);
   detail::check_recovered(rep.sigma, g, phi, an, an, opts, points, opts.seed ^ 0x22);
   detail::check_recovered(rep.tau, h, phi, an, an, opts, points, opts.seed ^ 0x33);
   detail::check_recovered(rep.xi, k, phi, an, an, opts, points, opts.seed ^ 0x44);

   rep.partial = !(rep.D.map && rep.sigma.map && rep.tau.map && rep.xi.map);
   if (rep.partial) return rep;

   const LinearMap<S>& dh = *rep.D.map;
   const LinearMap<S>& sh = *rep.sigma.map;
   const LinearMap<S>& th = *rep.tau.map;
   const LinearMap<S>& xh = *rep.xi.map;
   std::mt19937_64 irng(opts.seed ^ 0x1de);
   rep.identity_samples = opts.identity_samples;
   rep.max_identity_residual = 0.0;
   rep.lie_jordan_discrepancy = 0.0;
   for (std::size_t s = 0; s < opts.identity_samples; ++s) {
      const Vector<S> a = random_vector<S>(static_cast<Eigen::Index>(da), irng);
      const Vector<S> b = random_vector<S>(static_cast<Eigen::Index>(da), irng);
      const Vector<S> c = random_vector<S>(static_cast<Eigen::Index>(da), irng);
      double r;
      if (opts.mode == DerivationMode::lie) {
         r = xn(lie_derivation_residual(mod, dh, a, b, c, sh, th, xh, signs)) / (1.0 + an(a) * an(b) * an(c));
      } else {
         const Vector<S> jr = jordan_residual(mod, dh, a, sh, th, xh, signs);
         r = xn(jr) / (1.0 + std::pow(an(a), 3));
      }
      rep.max_identity_residual = std::max(rep.max_identity_residual, r);
      const Vector<S> diag_lie = lie_derivation_residual(mod, dh, a, a, a, sh, th, xh, signs);
      const Vector<S> diag_jordan = jordan_residual(mod, dh, a, sh, th, xh, signs);
      rep.lie_jordan_discrepancy = std::max(rep.lie_jordan_discrepancy, xn(diag_lie - diag_jordan));
   }

   if constexpr (is_complex_v<S>) {
      // Complex homogeneity through the unimodular splitting:
      // D(gamma x) = (N/2)(D(l1 x) + D(l2 x)) with l1 + l2 = 2 gamma / N.
      HyersOptions<S> ho;
      ho.tol = opts.tol;
      ho.max_iter = opts.max_iter;
      ho.out_norm = xn;
      std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
      std::uniform_real_distribution<double> modulus(0.25, 3.0);
      double defect = 0.0, threshold = 0.0;
      try {
         for (int s = 0; s < 4; ++s) {
            const std::complex<double> gamma = std::polar(modulus(irng), angle(irng));
            const long n = static_cast<long>(std::ceil(std::abs(gamma))) + 1;
            const auto [l1, l2] = unimodular_split(gamma, n);
            const Vector<S> x = detail::random_unit<S>(static_cast<Eigen::Index>(da), an, irng);
            const Vector<S> direct = hyers_limit(f, phi, Vector<S>(gamma * x), ho).value;
            const Vector<S> split = (static_cast<double>(n) / 2.0) *
                                    (hyers_limit(f, phi, Vector<S>(l1 * x), ho).value + hyers_limit(f, phi, Vector<S>(l2 * x), ho).value);
            defect = std::max({defect, xn(direct - split), xn(direct - gamma * dh(x))});
            threshold = std::max(threshold, 10.0 * opts.tol * (static_cast<double>(n) + std::abs(gamma) * static_cast<double>(da)));
         }
         rep.homogeneity_defect = defect;
         rep.homogeneity_threshold = threshold;
      } catch (const Error&) {
         rep.homogeneity_defect = std::numeric_limits<double>::infinity();
         rep.homogeneity_threshold = threshold;
      }
   }
   return rep;
}

} // namespace ternstab

#endif
