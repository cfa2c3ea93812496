#ifndef TERNSTAB_DERIVATION_SOLVER_HPP
#define TERNSTAB_DERIVATION_SOLVER_HPP

#include <vector>

#include <Eigen/SVD>

#include "bracket.hpp"

namespace ternstab {

template <FieldScalar S>
struct DerivationSpace {
   std::vector<LinearMap<S>> basis;       // orthonormal in the Frobenius inner product
   Eigen::VectorXd singular_values;       // of the assembled system, descending
   std::size_t rows = 0, cols = 0;
};

/**
 * Assembles the identity residual as a linear system in the entries of D,
 * one block row per basis triple (e_i, e_j, e_k), and returns an orthonormal
 * basis of its null space. Directions with singular value <= rank_tol * s_max
 * count as null; a zero system makes every D admissible.
 *
 * Unknown D(r, a) sits in column r + a * dX (column-major vec).
 */
template <FieldScalar S>
DerivationSpace<S> solve_derivation_space(const TernaryModule<S>& mod, const LinearMap<S>& sigma, const LinearMap<S>& tau,
                                          const LinearMap<S>& xi, const SignConvention& signs, double rank_tol = 1e-10)
{
   const std::size_t da = mod.algebra().dim();
   const std::size_t dx = mod.dim();
   for (const auto* m : {&sigma, &tau, &xi})
      if (m->in_dim() != da || m->out_dim() != da)
         throw Error(ErrorCode::dimension_mismatch, "sigma, tau, xi must map A to A");
   const auto I = [](std::size_t n) { return static_cast<Eigen::Index>(n); };

   // br[(r * da + j) * da + k] = Br(e_r, e_j, e_k)
   std::vector<Vector<S>> br(dx * da * da);
   for (std::size_t r = 0; r < dx; ++r)
      for (std::size_t j = 0; j < da; ++j)
         for (std::size_t k = 0; k < da; ++k)
            br[(r * da + j) * da + k] = sigma_tau_xi_bracket(mod, basis_vector<S>(I(dx), I(r)), basis_vector<S>(I(da), I(j)),
                                                             basis_vector<S>(I(da), I(k)), sigma, tau, xi);
   const auto bracket_at = [&](std::size_t r, std::size_t j, std::size_t k) -> const Vector<S>& {
      return br[(r * da + j) * da + k];
   };

   const std::size_t rows = da * da * da * dx;
   const std::size_t cols = dx * da;
   Matrix<S> sys = Matrix<S>::Zero(I(rows), I(cols));
   const auto& t = mod.algebra().structure();
   for (std::size_t i = 0; i < da; ++i)
      for (std::size_t j = 0; j < da; ++j)
         for (std::size_t k = 0; k < da; ++k) {
            const std::size_t row0 = ((i * da + j) * da + k) * dx;
            for (std::size_t l = 0; l < dx; ++l) {
               const auto row = I(row0 + l);
               for (std::size_t a = 0; a < da; ++a) sys(row, I(l + a * dx)) += t(i, j, k, a);
               for (std::size_t r = 0; r < dx; ++r) {
                  sys(row, I(r + i * dx)) -= S(signs[0]) * bracket_at(r, j, k)(I(l));
                  sys(row, I(r + j * dx)) -= S(signs[1]) * bracket_at(r, i, k)(I(l));
                  sys(row, I(r + k * dx)) -= S(signs[2]) * bracket_at(r, j, i)(I(l));
               }
            }
         }

   Eigen::BDCSVD<Matrix<S>> svd(sys, Eigen::ComputeFullV);
   DerivationSpace<S> out;
   out.rows = rows;
   out.cols = cols;
   out.singular_values = svd.singularValues();
   const Eigen::Index rank_slots = out.singular_values.size();
   const double smax = rank_slots > 0 ? out.singular_values(0) : 0.0;
   const Matrix<S>& v = svd.matrixV();
   for (Eigen::Index c = 0; c < I(cols); ++c) {
      const bool is_null = c >= rank_slots || smax == 0.0 || out.singular_values(c) <= rank_tol * smax;
      if (!is_null) continue;
      Vector<S> vec = v.col(c);
      // Fix the phase so the largest entry is real positive.
      Eigen::Index arg = 0;
      vec.cwiseAbs().maxCoeff(&arg);
      if constexpr (is_complex_v<S>)
         vec *= std::conj(vec(arg)) / std::abs(vec(arg));
      else if (vec(arg) < 0.0)
         vec = -vec;
      Matrix<S> d = Eigen::Map<const Matrix<S>>(vec.data(), I(dx), I(da));
      out.basis.emplace_back(std::move(d));
   }
   return out;
}

template <FieldScalar S>
std::vector<LinearMap<S>> solve_exact_derivations(const TernaryModule<S>& mod, const LinearMap<S>& sigma,
                                                  const LinearMap<S>& tau, const LinearMap<S>& xi,
                                                  const SignConvention& signs, double rank_tol = 1e-10)
{
   return solve_derivation_space(mod, sigma, tau, xi, signs, rank_tol).basis;
}

} // namespace ternstab

#endif
