#ifndef TERNSTAB_HYERS_HPP
#define TERNSTAB_HYERS_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "control.hpp"
#include "evaluable_map.hpp"

namespace ternstab {

enum class StoppingRule { a_priori, empirical };

inline std::string_view to_string(StoppingRule r) { return r == StoppingRule::a_priori ? "a_priori" : "empirical"; }

/// 2^n stays comfortably inside the double exponent range below this.
inline constexpr int kMaxDoublings = 1000;

struct HyersTraceEntry {
   int n = 0;
   double step = 0.0;       // |s_n - s_{n-1}|, NaN at n = 0
   double error = 0.0;      // |s_n - reference|, NaN without a reference
   double tail_bound = 0.0; // a-priori tail at n, NaN under the empirical rule
};

template <FieldScalar S>
struct HyersOptions {
   double tol = 1e-10;
   int max_iter = kMaxDoublings;
   bool record_trace = false;
   std::optional<Vector<S>> reference; // exact limit, only used for trace errors
   Norm out_norm{};
};

template <FieldScalar S>
struct HyersResult {
   Vector<S> value;
   int iterations = 0;
   StoppingRule rule = StoppingRule::a_priori;
   bool capped = false; // max_iter was clamped to kMaxDoublings
   std::vector<HyersTraceEntry> trace;
};

namespace detail {

template <FieldScalar S>
Vector<S> ldexp_vector(const Vector<S>& v, int e)
{
   return v.unaryExpr([e](const S& c) -> S {
      if constexpr (is_complex_v<S>)
         return S(std::ldexp(c.real(), e), std::ldexp(c.imag(), e));
      else
         return std::ldexp(c, e);
   });
}

/// s_n = f(2^n x) / 2^n; both scalings are exact exponent shifts.
template <FieldScalar S>
Vector<S> dyadic_iterate(const EvaluableMap<S>& f, const Vector<S>& x, int n)
{
   return ldexp_vector<S>(f(ldexp_vector<S>(x, n)), -n);
}

} // namespace detail

/**
 * Direct-method limit D(x) = lim f(2^n x) / 2^n.
 *
 * Stops at the first n whose Cauchy tail bound is <= tol. When the control
 * has no usable tail (its series diverges) it falls back to the first n with
 * |s_{n+1} - s_n| <= tol and returns s_n.
 */
template <FieldScalar S>
HyersResult<S> hyers_limit(const EvaluableMap<S>& f, const ControlFunction<S>& phi, const Vector<S>& x, const HyersOptions<S>& opts)
{
   if (!(opts.tol > 0.0)) throw Error(ErrorCode::invalid_argument, "hyers_limit needs tol > 0");
   require_dim(static_cast<std::size_t>(x.size()), f.in_dim(), "hyers_limit point");
   HyersResult<S> res;
   int cap = opts.max_iter;
   if (cap > kMaxDoublings) {
      cap = kMaxDoublings;
      res.capped = true;
   }
   const double nan = std::numeric_limits<double>::quiet_NaN();
   const Norm& norm = opts.out_norm;

   if (x.isZero(0.0)) {
      res.value = f(x);
      if (opts.record_trace)
         res.trace.push_back({0, nan, opts.reference ? norm(res.value - *opts.reference) : nan, 0.0});
      return res;
   }

   // Tail bounds for n = 0, 1, ... until one drops to tol.
   std::vector<double> tails;
   bool apriori = true;
   try {
      SeriesOptions so;
      so.tail_tol = opts.tol * 1e-6;
      for (int n = 0;; ++n) {
         const double t = cauchy_tail_bound(phi, x, static_cast<std::size_t>(n), so).value;
         tails.push_back(t);
         if (t <= opts.tol) break;
         if (n >= cap)
            throw Error(ErrorCode::max_iter_exceeded, "a-priori iteration count exceeds " + std::to_string(cap) +
                                                          (res.capped ? " (capped to stay inside the double range)" : ""));
      }
   } catch (const Error& e) {
      if (e.code() != ErrorCode::divergent_control) throw;
      apriori = false;
      tails.clear();
   }

   const auto record = [&](int n, const Vector<S>& s, const Vector<S>* prev) {
      if (!opts.record_trace) return;
      res.trace.push_back({n, prev ? norm(s - *prev) : nan, opts.reference ? norm(s - *opts.reference) : nan,
                           apriori ? tails[static_cast<std::size_t>(n)] : nan});
   };

   if (apriori) {
      res.rule = StoppingRule::a_priori;
      const int target = static_cast<int>(tails.size()) - 1;
      if (!opts.record_trace) {
         res.value = detail::dyadic_iterate(f, x, target);
      } else {
         Vector<S> prev = detail::dyadic_iterate(f, x, 0);
         record(0, prev, nullptr);
         for (int n = 1; n <= target; ++n) {
            Vector<S> s = detail::dyadic_iterate(f, x, n);
            record(n, s, &prev);
            prev = std::move(s);
         }
         res.value = std::move(prev);
      }
      res.iterations = target;
      return res;
   }

   res.rule = StoppingRule::empirical;
   Vector<S> cur = detail::dyadic_iterate(f, x, 0);
   record(0, cur, nullptr);
   for (int n = 0;; ++n) {
      if (n + 1 > cap)
         throw Error(ErrorCode::max_iter_exceeded, "successive differences did not reach tol within " + std::to_string(cap) + " doublings");
      Vector<S> next = detail::dyadic_iterate(f, x, n + 1);
      const double step = norm(next - cur);
      if (step <= opts.tol) {
         res.value = std::move(cur);
         res.iterations = n;
         return res;
      }
      record(n + 1, next, &cur);
      cur = std::move(next);
   }
}

} // namespace ternstab

#endif
