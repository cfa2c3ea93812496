#ifndef TERNSTAB_BRACKET_HPP
#define TERNSTAB_BRACKET_HPP

#include <array>
#include <string>

#include "linear_map.hpp"
#include "module.hpp"

namespace ternstab {

/**
 * Signs (s1, s2, s3) in
 *   D([abc]) = s1 Br(D(a), b, c) + s2 Br(D(b), a, c) + s3 Br(D(c), b, a).
 *
 * The defining identity uses (+,+,+); the identity obtained in the stability
 * argument comes out as (+,-,-).
 */
struct SignConvention {
   std::array<int, 3> s{1, 1, 1};

   SignConvention() = default;
   SignConvention(int s1, int s2, int s3) : s{s1, s2, s3}
   {
      for (int v : s)
         if (v != 1 && v != -1) throw Error(ErrorCode::invalid_argument, "sign entries must be +1 or -1");
   }

   static SignConvention definition() { return {1, 1, 1}; }
   static SignConvention stability_proof() { return {1, -1, -1}; }

   double operator[](std::size_t i) const { return static_cast<double>(s[i]); }
   bool operator==(const SignConvention&) const = default;

   std::string to_string() const
   {
      std::string out;
      for (std::size_t i = 0; i < 3; ++i) out += (i ? "," : "") + std::string(s[i] > 0 ? "+1" : "-1");
      return out;
   }
};

/// [x, tau(b), xi(c)]_X - [sigma(c), tau(b), x]_X for x in X and b, c in A.
template <FieldScalar S, VectorMap<S> Sigma, VectorMap<S> Tau, VectorMap<S> Xi>
Vector<S> sigma_tau_xi_bracket(const TernaryModule<S>& mod, const Vector<S>& x, const Vector<S>& b, const Vector<S>& c,
                               const Sigma& sigma, const Tau& tau, const Xi& xi)
{
   require_dim(static_cast<std::size_t>(x.size()), mod.dim(), "bracket module slot");
   require_dim(static_cast<std::size_t>(b.size()), mod.algebra().dim(), "bracket second slot");
   require_dim(static_cast<std::size_t>(c.size()), mod.algebra().dim(), "bracket third slot");
   const Vector<S> tb = tau(b);
   return mod.xab(x, tb, xi(c)) - mod.abx(sigma(c), tb, x);
}

/**
 * D([abc]) - s1 Br(D(a),b,c) - s2 Br(D(b),a,c) - s3 Br(D(c),b,a).
 *
 * D may be any pointwise map; the stability hypothesis feeds the raw
 * approximate maps through this same routine.
 */
template <FieldScalar S, VectorMap<S> DMap, VectorMap<S> Sigma, VectorMap<S> Tau, VectorMap<S> Xi>
Vector<S> lie_derivation_residual(const TernaryModule<S>& mod, const DMap& d, const Vector<S>& a, const Vector<S>& b,
                                  const Vector<S>& c, const Sigma& sigma, const Tau& tau, const Xi& xi,
                                  const SignConvention& signs)
{
   Vector<S> r = d(mod.algebra().product(a, b, c));
   require_dim(static_cast<std::size_t>(r.size()), mod.dim(), "derivation output");
   r -= S(signs[0]) * sigma_tau_xi_bracket(mod, d(a), b, c, sigma, tau, xi);
   r -= S(signs[1]) * sigma_tau_xi_bracket(mod, d(b), a, c, sigma, tau, xi);
   r -= S(signs[2]) * sigma_tau_xi_bracket(mod, d(c), b, a, sigma, tau, xi);
   return r;
}

/// The diagonal case a = b = c of lie_derivation_residual, through the same code path.
template <FieldScalar S, VectorMap<S> DMap, VectorMap<S> Sigma, VectorMap<S> Tau, VectorMap<S> Xi>
Vector<S> jordan_residual(const TernaryModule<S>& mod, const DMap& d, const Vector<S>& a, const Sigma& sigma,
                          const Tau& tau, const Xi& xi, const SignConvention& signs)
{
   return lie_derivation_residual(mod, d, a, a, a, sigma, tau, xi, signs);
}

} // namespace ternstab

#endif
