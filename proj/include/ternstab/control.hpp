#ifndef TERNSTAB_CONTROL_HPP
#define TERNSTAB_CONTROL_HPP

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "scalar.hpp"

namespace ternstab {

enum class ControlKind { power, custom };

/// ||x||^p with the convention 0^p = 0 for every p, including p = 0.
inline double norm_power(double r, double p) { return r == 0.0 ? 0.0 : std::pow(r, p); }

/**
 * Control function phi of arity 3 or 5.
 *
 * The power kind is theta * sum_i ||x_i||^p with p in [0, 1). Custom kinds
 * wrap an arbitrary nonnegative evaluator and are summed numerically.
 */
template <FieldScalar S>
class ControlFunction {
public:
   using Evaluator = std::function<double(std::span<const Vector<S>>)>;

   static ControlFunction power(double theta, double p, std::size_t arity, Norm norm = {})
   {
      if (!(theta >= 0.0) || !std::isfinite(theta)) throw Error(ErrorCode::invalid_argument, "power control needs theta >= 0");
      if (!(p >= 0.0 && p < 1.0)) throw Error(ErrorCode::invalid_argument, "power control needs p in [0, 1)");
      check_arity(arity);
      ControlFunction c;
      c.kind_ = ControlKind::power;
      c.theta_ = theta;
      c.p_ = p;
      c.arity_ = arity;
      c.norm_ = norm;
      c.name_ = "power";
      return c;
   }

   static ControlFunction custom(std::string name, std::size_t arity, Evaluator fn)
   {
      check_arity(arity);
      ControlFunction c;
      c.kind_ = ControlKind::custom;
      c.arity_ = arity;
      c.name_ = std::move(name);
      c.fn_ = std::move(fn);
      return c;
   }

   ControlKind kind() const noexcept { return kind_; }
   double theta() const noexcept { return theta_; }
   double p() const noexcept { return p_; }
   std::size_t arity() const noexcept { return arity_; }
   const std::string& name() const noexcept { return name_; }
   const Norm& norm() const noexcept { return norm_; }

   double operator()(std::span<const Vector<S>> args) const
   {
      if (args.size() != arity_)
         throw Error(ErrorCode::dimension_mismatch, "control function of arity " + std::to_string(arity_) + " called with " +
                                                       std::to_string(args.size()) + " arguments");
      if (kind_ == ControlKind::power) {
         double acc = 0.0;
         for (const auto& a : args) acc += norm_power(norm_(a), p_);
         return theta_ * acc;
      }
      const double v = fn_(args);
      if (!(v >= 0.0)) throw Error(ErrorCode::invalid_argument, "custom control '" + name_ + "' returned a negative value");
      return v;
   }

private:
   static void check_arity(std::size_t arity)
   {
      if (arity != 3 && arity != 5) throw Error(ErrorCode::invalid_argument, "control arity must be 3 or 5");
   }

   ControlKind kind_ = ControlKind::power;
   double theta_ = 0.0;
   double p_ = 0.0;
   std::size_t arity_ = 5;
   Norm norm_{};
   std::string name_;
   Evaluator fn_;
};

/// Named custom controls available from configuration files.
template <FieldScalar S>
ControlFunction<S> make_custom_control(const std::string& name, std::size_t arity, Norm norm = {})
{
   using Args = std::span<const Vector<S>>;
   if (name == "zero") return ControlFunction<S>::custom(name, arity, [](Args) { return 0.0; });
   if (name == "sqrt-sum")
      return ControlFunction<S>::custom(name, arity, [norm](Args args) {
         double acc = 0.0;
         for (const auto& a : args) acc += std::sqrt(norm(a));
         return acc;
      });
   // Not summable under the damped series; used to exercise divergence reporting.
   if (name == "linear-sum")
      return ControlFunction<S>::custom(name, arity, [norm](Args args) {
         double acc = 0.0;
         for (const auto& a : args) acc += norm(a);
         return acc;
      });
   throw Error(ErrorCode::invalid_argument, "unknown custom control '" + name + "'");
}

/// (x, x, 0, ..., 0) padded to the control's arity.
template <FieldScalar S>
std::vector<Vector<S>> diagonal_args(const Vector<S>& x, std::size_t arity)
{
   std::vector<Vector<S>> args(arity, Vector<S>::Zero(x.size()));
   args[0] = x;
   args[1] = x;
   return args;
}

struct SeriesOptions {
   double tail_tol = 0.0;        // stop once a term drops to this value
   std::size_t max_terms = 1000; // 2^n must stay inside the double range
   bool closed_form = true;      // use the exact power-kind sum when available
};

struct SeriesResult {
   double value = 0.0;
   std::size_t terms = 0;
   bool closed_form = false;
};

namespace detail {

constexpr std::size_t kDivergenceWindow = 8;

/// sum_{n >= first} (1/2) 2^-n phi(2^n args), numerically, with divergence detection.
template <FieldScalar S>
SeriesResult damped_series(const ControlFunction<S>& phi, std::span<const Vector<S>> args, std::size_t first,
                           const SeriesOptions& opts)
{
   SeriesResult out;
   std::vector<Vector<S>> scaled(args.begin(), args.end());
   double previous = -1.0;
   std::size_t rising = 0;
   for (std::size_t n = first; n < first + opts.max_terms; ++n) {
      const int e = static_cast<int>(n);
      for (std::size_t i = 0; i < args.size(); ++i)
         scaled[i] = args[i].unaryExpr([e](const S& v) -> S {
            if constexpr (is_complex_v<S>)
               return S(std::ldexp(v.real(), e), std::ldexp(v.imag(), e));
            else
               return std::ldexp(v, e);
         });
      const double term = std::ldexp(phi(scaled), -e - 1);
      if (!std::isfinite(term)) throw Error(ErrorCode::divergent_control, "control series term is not finite at n = " + std::to_string(n));
      out.value += term;
      ++out.terms;
      if (term <= opts.tail_tol) break;
      rising = (previous >= 0.0 && term >= previous) ? rising + 1 : 0;
      if (rising + 1 >= kDivergenceWindow)
         throw Error(ErrorCode::divergent_control,
                     "control series terms stopped decaying (non-decreasing over " + std::to_string(kDivergenceWindow) + " terms)");
      previous = term;
   }
   return out;
}

} // namespace detail

/**
 * Summed majorant (1/2) sum_n 2^-n phi(2^n args).
 *
 * For the power kind the series is geometric with ratio 2^(p-1), giving
 * theta * sum_i ||a_i||^p / (2 (1 - 2^(p-1))) in closed form.
 */
template <FieldScalar S>
SeriesResult phi_tilde(const ControlFunction<S>& phi, std::span<const Vector<S>> args, const SeriesOptions& opts = {})
{
   if (args.size() != phi.arity()) throw Error(ErrorCode::dimension_mismatch, "phi_tilde arity mismatch");
   if (phi.kind() == ControlKind::power && opts.closed_form) {
      SeriesResult out;
      out.value = phi(args) / (2.0 * (1.0 - std::exp2(phi.p() - 1.0)));
      out.closed_form = true;
      return out;
   }
   return detail::damped_series(phi, args, 0, opts);
}

/// Tail majorant sum_{k >= q} (1/2) 2^-k phi(2^k x, 2^k x, 0, ...) of the dyadic Cauchy estimate.
template <FieldScalar S>
SeriesResult cauchy_tail_bound(const ControlFunction<S>& phi, const Vector<S>& x, std::size_t q, const SeriesOptions& opts = {})
{
   const auto args = diagonal_args(x, phi.arity());
   if (phi.kind() == ControlKind::power && opts.closed_form) {
      SeriesResult out = phi_tilde(phi, std::span<const Vector<S>>(args), opts);
      out.value *= std::exp2(static_cast<double>(q) * (phi.p() - 1.0));
      return out;
   }
   return detail::damped_series(phi, std::span<const Vector<S>>(args), q, opts);
}

} // namespace ternstab

#endif
