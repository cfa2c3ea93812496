#ifndef TERNSTAB_MODULE_HPP
#define TERNSTAB_MODULE_HPP

#include <array>
#include <cstdint>
#include <random>

#include "algebra.hpp"

namespace ternstab {

/**
 * Ternary module X over A with the three mixed products
 *   [x a b]_X : X x A x A -> X   (tensor extents dX, dA, dA, dX)
 *   [a x b]_X : A x X x A -> X   (dA, dX, dA, dX)
 *   [a b x]_X : A x A x X -> X   (dA, dA, dX, dX)
 */
template <FieldScalar S>
class TernaryModule {
public:
   TernaryModule(TernaryAlgebra<S> algebra, Tensor4<S> xab, Tensor4<S> axb, Tensor4<S> abx, double norm_scale = 1.0,
                 bool valid = false)
      : algebra_(std::move(algebra)), xab_(std::move(xab)), axb_(std::move(axb)), abx_(std::move(abx)),
        norm_scale_(norm_scale), valid_(valid)
   {
      const std::size_t a = algebra_.dim();
      const std::size_t x = xab_.extent(0);
      if (x == 0) throw Error(ErrorCode::dimension_mismatch, "module dimension must be >= 1");
      const auto expect = [&](const Tensor4<S>& t, typename Tensor4<S>::Extents want, const char* name) {
         if (t.extents() != want) throw Error(ErrorCode::dimension_mismatch, std::string("module product ") + name + " has wrong extents");
      };
      expect(xab_, {x, a, a, x}, "[xab]");
      expect(axb_, {a, x, a, x}, "[axb]");
      expect(abx_, {a, a, x, x}, "[abx]");
      if (!(norm_scale > 0.0)) throw Error(ErrorCode::invalid_argument, "module norm_scale must be positive");
   }

   const TernaryAlgebra<S>& algebra() const noexcept { return algebra_; }
   std::size_t dim() const noexcept { return xab_.extent(0); }
   Norm norm() const noexcept { return Norm{norm_scale_}; }
   double norm_scale() const noexcept { return norm_scale_; }
   bool valid() const noexcept { return valid_; }

   Vector<S> xab(const Vector<S>& x, const Vector<S>& a, const Vector<S>& b) const { return xab_.contract(x, a, b); }
   Vector<S> axb(const Vector<S>& a, const Vector<S>& x, const Vector<S>& b) const { return axb_.contract(a, x, b); }
   Vector<S> abx(const Vector<S>& a, const Vector<S>& b, const Vector<S>& x) const { return abx_.contract(a, b, x); }

   const Tensor4<S>& xab_tensor() const noexcept { return xab_; }
   const Tensor4<S>& axb_tensor() const noexcept { return axb_; }
   const Tensor4<S>& abx_tensor() const noexcept { return abx_; }

private:
   TernaryAlgebra<S> algebra_;
   Tensor4<S> xab_, axb_, abx_;
   double norm_scale_;
   bool valid_;
};

/// A as a module over itself; flagged valid when A is flagged associative.
template <FieldScalar S>
TernaryModule<S> self_module(const TernaryAlgebra<S>& alg)
{
   const auto& t = alg.structure();
   return TernaryModule<S>(alg, t, t, t, alg.norm_scale(), alg.has_flag(AlgebraFlag::associative));
}

template <FieldScalar S>
TernaryModule<S> zero_module(const TernaryAlgebra<S>& alg, std::size_t dim_x)
{
   const std::size_t a = alg.dim();
   return TernaryModule<S>(alg, Tensor4<S>(dim_x, a, a, dim_x), Tensor4<S>(a, dim_x, a, dim_x),
                           Tensor4<S>(a, a, dim_x, dim_x), 1.0, true);
}

struct ModuleReport {
   std::array<double, 5> chain_residual{};
   bool chains_passed = true;
   bool exhaustive = true;
   std::size_t tuples_checked = 0;
   double norm_max_ratio = 0.0;
   std::size_t norm_samples = 0;
   bool norm_passed = true;
   bool passed = true;
};

/**
 * Evaluates the five compatibility chains on basis tuples (a, b, c, d, x),
 * each as max(|e1 - e2|, |e1 - e3|), and samples the norm bound
 * max(|[xab]|, |[axb]|, |[abx]|) <= |a| |b| |x|.
 */
template <FieldScalar S>
ModuleReport check_module_axioms(const TernaryModule<S>& mod, double tol, std::size_t samples, std::uint64_t seed = 0x6d6f64ULL,
                                 const EnumerationBudget& budget = {})
{
   const auto& alg = mod.algebra();
   const std::size_t da = alg.dim();
   const std::size_t dx = mod.dim();
   const Norm norm = mod.norm();
   const auto ea = [&](std::size_t i) { return basis_vector<S>(static_cast<Eigen::Index>(da), static_cast<Eigen::Index>(i)); };
   const auto ex = [&](std::size_t i) { return basis_vector<S>(static_cast<Eigen::Index>(dx), static_cast<Eigen::Index>(i)); };

   ModuleReport rep;
   const auto chain = [&](std::size_t which, const Vector<S>& e1, const Vector<S>& e2, const Vector<S>& e3) {
      rep.chain_residual[which] = std::max({rep.chain_residual[which], norm(e1 - e2), norm(e1 - e3)});
   };
   auto [count, exhaustive] = detail::for_each_basis_tuple<5>({da, da, da, da, dx}, budget, [&](const auto& ix) {
      const Vector<S> a = ea(ix[0]), b = ea(ix[1]), c = ea(ix[2]), d = ea(ix[3]), x = ex(ix[4]);
      const Vector<S> abc = alg.product(a, b, c);
      const Vector<S> bcd = alg.product(b, c, d);
      chain(0, mod.abx(abc, d, x), mod.abx(a, bcd, x), mod.abx(a, b, mod.abx(c, d, x)));
      chain(1, mod.axb(abc, x, d), mod.axb(a, mod.abx(b, c, x), d), mod.abx(a, b, mod.axb(c, x, d)));
      chain(2, mod.xab(mod.xab(x, a, b), c, d), mod.xab(x, abc, d), mod.xab(x, a, bcd));
      chain(3, mod.xab(mod.axb(a, x, b), c, d), mod.axb(a, mod.xab(x, b, c), d), mod.axb(a, x, bcd));
      chain(4, mod.xab(mod.abx(a, b, x), c, d), mod.axb(a, mod.axb(b, x, c), d), mod.abx(a, b, mod.xab(x, c, d)));
   });
   rep.tuples_checked = count;
   rep.exhaustive = exhaustive;
   for (double r : rep.chain_residual) rep.chains_passed = rep.chains_passed && r <= tol;

   std::mt19937_64 rng(seed);
   const Norm anorm = alg.norm();
   for (std::size_t s = 0; s < samples; ++s) {
      const Vector<S> a = random_vector<S>(static_cast<Eigen::Index>(da), rng);
      const Vector<S> b = random_vector<S>(static_cast<Eigen::Index>(da), rng);
      const Vector<S> x = random_vector<S>(static_cast<Eigen::Index>(dx), rng);
      const double denom = anorm(a) * anorm(b) * norm(x);
      if (denom == 0.0) continue;
      const double lhs = std::max({norm(mod.xab(x, a, b)), norm(mod.axb(a, x, b)), norm(mod.abx(a, b, x))});
      rep.norm_max_ratio = std::max(rep.norm_max_ratio, lhs / denom);
   }
   rep.norm_samples = samples;
   rep.norm_passed = rep.norm_max_ratio <= 1.0 + tol;
   rep.passed = rep.chains_passed && rep.norm_passed;
   return rep;
}

} // namespace ternstab

#endif
