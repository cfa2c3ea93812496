#ifndef TERNSTAB_ALGEBRA_HPP
#define TERNSTAB_ALGEBRA_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "scalar.hpp"
#include "tensor.hpp"

namespace ternstab {

enum class AlgebraFlag { associative, partial };

inline std::string_view to_string(AlgebraFlag f) { return f == AlgebraFlag::associative ? "associative" : "partial"; }

inline AlgebraFlag algebra_flag_from_string(std::string_view s)
{
   if (s == "associative") return AlgebraFlag::associative;
   if (s == "partial") return AlgebraFlag::partial;
   throw Error(ErrorCode::invalid_argument, "unknown algebra flag '" + std::string(s) + "'");
}

/**
 * Finite-dimensional ternary algebra given by its structure tensor:
 * [e_i e_j e_k] = sum_l T(i, j, k, l) e_l.
 *
 * The norm is kappa times the Euclidean norm of coordinates. Nothing here
 * enforces ||[abc]|| <= ||a|| ||b|| ||c||; see rescale_norm_submultiplicative.
 */
template <FieldScalar S>
class TernaryAlgebra {
public:
   TernaryAlgebra(Tensor4<S> structure, double norm_scale = 1.0, std::set<AlgebraFlag> flags = {})
      : structure_(std::move(structure)), norm_scale_(norm_scale), flags_(std::move(flags))
   {
      const auto& e = structure_.extents();
      if (e[0] == 0 || e[0] != e[1] || e[0] != e[2] || e[0] != e[3])
         throw Error(ErrorCode::dimension_mismatch, "structure tensor must be d x d x d x d with d >= 1");
      if (!(norm_scale > 0.0) || !std::isfinite(norm_scale))
         throw Error(ErrorCode::invalid_argument, "norm_scale must be positive and finite");
   }

   std::size_t dim() const noexcept { return structure_.extent(0); }
   static constexpr Field field() noexcept { return field_of_v<S>; }
   const Tensor4<S>& structure() const noexcept { return structure_; }
   double norm_scale() const noexcept { return norm_scale_; }
   Norm norm() const noexcept { return Norm{norm_scale_}; }
   const std::set<AlgebraFlag>& flags() const noexcept { return flags_; }
   bool has_flag(AlgebraFlag f) const { return flags_.count(f) != 0; }

   Vector<S> product(const Vector<S>& a, const Vector<S>& b, const Vector<S>& c) const
   {
      return structure_.contract(a, b, c);
   }

   TernaryAlgebra with_norm_scale(double kappa) const { return TernaryAlgebra(structure_, kappa, flags_); }

private:
   Tensor4<S> structure_;
   double norm_scale_;
   std::set<AlgebraFlag> flags_;
};

template <FieldScalar S>
Vector<S> ternary_product(const TernaryAlgebra<S>& alg, const Vector<S>& a, const Vector<S>& b,
                          const Vector<S>& c)
{
   return alg.product(a, b, c);
}

/// [abc] = a b c for m x m matrices in the row-major matrix-unit basis E_{rc} -> r*m + c.
template <FieldScalar S>
TernaryAlgebra<S> build_trivial_from_matrices(std::size_t m)
{
   if (m == 0) throw Error(ErrorCode::invalid_argument, "matrix size must be >= 1");
   const std::size_t d = m * m;
   Tensor4<S> t(d, d, d, d);
   // E_{ab} E_{cd} E_{ef} = [b==c][d==e] E_{af}
   for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
         for (std::size_t dd = 0; dd < m; ++dd)
            for (std::size_t f = 0; f < m; ++f)
               t(a * m + b, b * m + dd, dd * m + f, a * m + f) = S(1);
   return TernaryAlgebra<S>(std::move(t), 1.0, {AlgebraFlag::associative});
}

/// vec(I_m) in the basis used by build_trivial_from_matrices.
template <FieldScalar S>
Vector<S> matrix_identity_element(std::size_t m)
{
   Vector<S> e = Vector<S>::Zero(static_cast<Eigen::Index>(m * m));
   for (std::size_t i = 0; i < m; ++i) e(static_cast<Eigen::Index>(i * m + i)) = S(1);
   return e;
}

/**
 * Odd polynomials x, x^3, ..., x^cap with [p1 p2 p3] = p1 p2 p3.
 * Basis index i holds x^(2i+1); products whose degree exceeds cap are dropped.
 */
template <FieldScalar S>
TernaryAlgebra<S> build_odd_polynomial_algebra(long degree_cap)
{
   if (degree_cap < 1 || degree_cap % 2 == 0)
      throw Error(ErrorCode::invalid_argument, "degree cap must be odd and >= 1, got " + std::to_string(degree_cap));
   const std::size_t d = static_cast<std::size_t>((degree_cap + 1) / 2);
   Tensor4<S> t(d, d, d, d);
   for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
         for (std::size_t k = 0; k < d; ++k)
            if (i + j + k + 1 < d) t(i, j, k, i + j + k + 1) = S(1);
   return TernaryAlgebra<S>(std::move(t), 1.0, {AlgebraFlag::partial});
}

/// Algebra of N x N x N cubic matrices under the Cayley product; basis unit cube (p,q,r) -> (p*N+q)*N+r.
template <FieldScalar S>
TernaryAlgebra<S> build_cubic_matrix_algebra(std::size_t side)
{
   if (side == 0) throw Error(ErrorCode::invalid_argument, "cubic matrix side must be >= 1");
   const std::size_t d = side * side * side;
   auto unit = [&](std::size_t idx) {
      CubicMatrix<S> c(side);
      c.entries()[idx] = S(1);
      return c;
   };
   Tensor4<S> t(d, d, d, d);
   for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
         for (std::size_t k = 0; k < d; ++k) {
            const auto prod = cubic_matrix_product(unit(i), unit(j), unit(k));
            for (std::size_t l = 0; l < d; ++l) t(i, j, k, l) = prod.entries()[l];
         }
   return TernaryAlgebra<S>(std::move(t), 1.0, {});
}

/// Exhaustive enumeration is used while the tuple count stays within max_exhaustive.
struct EnumerationBudget {
   std::size_t max_exhaustive = 1'000'000;
   std::size_t samples = 100'000;
   std::uint64_t seed = 0x5eedULL;
};

struct AssocReport {
   double max_residual = 0.0;
   bool passed = true;
   bool exhaustive = true;
   std::size_t tuples_checked = 0;
   std::array<std::size_t, 5> worst_tuple{};
};

namespace detail {

/// Visits basis index tuples of the given arity, exhaustively or by seeded sampling.
template <std::size_t Arity, class Visit>
std::pair<std::size_t, bool> for_each_basis_tuple(const std::array<std::size_t, Arity>& dims,
                                                  const EnumerationBudget& budget, Visit&& visit)
{
   std::size_t total = 1;
   for (auto d : dims) {
      if (d != 0 && total > budget.max_exhaustive) break;
      total *= d;
   }
   std::array<std::size_t, Arity> idx{};
   if (total <= budget.max_exhaustive) {
      if (total == 0) return {0, true};
      for (std::size_t n = 0; n < total; ++n) {
         std::size_t rem = n;
         for (std::size_t s = Arity; s-- > 0;) {
            idx[s] = rem % dims[s];
            rem /= dims[s];
         }
         visit(idx);
      }
      return {total, true};
   }
   std::mt19937_64 rng(budget.seed);
   for (std::size_t n = 0; n < budget.samples; ++n) {
      for (std::size_t s = 0; s < Arity; ++s) idx[s] = std::uniform_int_distribution<std::size_t>(0, dims[s] - 1)(rng);
      visit(idx);
   }
   return {budget.samples, false};
}

} // namespace detail

/// max over basis 5-tuples of ||[[e_i e_j e_k] e_l e_m] - [e_i [e_j e_k e_l] e_m]||
template <FieldScalar S>
AssocReport check_ternary_associativity(const TernaryAlgebra<S>& alg, double tol, const EnumerationBudget& budget = {})
{
   const std::size_t d = alg.dim();
   const auto& t = alg.structure();
   const Norm norm = alg.norm();
   const auto di = [](std::size_t i) { return static_cast<Eigen::Index>(i); };

   // Cache of basis triple products [e_i e_j e_k].
   std::vector<Vector<S>> triple(d * d * d);
   for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
         for (std::size_t k = 0; k < d; ++k) triple[(i * d + j) * d + k] = t.fibre(i, j, k);

   AssocReport rep;
   Vector<S> lhs(di(d)), rhs(di(d));
   auto [count, exhaustive] = detail::for_each_basis_tuple<5>({d, d, d, d, d}, budget, [&](const auto& ix) {
      const auto [i, j, k, l, m] = ix;
      const Vector<S>& inner_left = triple[(i * d + j) * d + k];
      const Vector<S>& inner_mid = triple[(j * d + k) * d + l];
      lhs.setZero();
      rhs.setZero();
      for (std::size_t p = 0; p < d; ++p) {
         const S wl = inner_left(di(p));
         const S wm = inner_mid(di(p));
         for (std::size_t q = 0; q < d; ++q) {
            if (wl != S(0)) lhs(di(q)) += wl * t(p, l, m, q);
            if (wm != S(0)) rhs(di(q)) += wm * t(i, p, m, q);
         }
      }
      const double r = norm(lhs - rhs);
      if (r > rep.max_residual) {
         rep.max_residual = r;
         rep.worst_tuple = {i, j, k, l, m};
      }
   });
   rep.tuples_checked = count;
   rep.exhaustive = exhaustive;
   rep.passed = rep.max_residual <= tol;
   return rep;
}

/// Binary product a (.) b := [a e b] induced by a verified identity e.
template <FieldScalar S>
struct BinaryReduction {
   std::size_t dim = 0;
   std::vector<Vector<S>> table; // table[i*dim + j] = e_i (.) e_j
   double associativity_residual = 0.0;

   Vector<S> product(const Vector<S>& a, const Vector<S>& b) const
   {
      require_dim(static_cast<std::size_t>(a.size()), dim, "binary product lhs");
      require_dim(static_cast<std::size_t>(b.size()), dim, "binary product rhs");
      Vector<S> out = Vector<S>::Zero(static_cast<Eigen::Index>(dim));
      for (std::size_t i = 0; i < dim; ++i)
         for (std::size_t j = 0; j < dim; ++j) {
            const S w = a(static_cast<Eigen::Index>(i)) * b(static_cast<Eigen::Index>(j));
            if (w != S(0)) out += w * table[i * dim + j];
         }
      return out;
   }
};

template <FieldScalar S>
struct IdentityReport {
   bool passed = false;
   double max_residual = 0.0;
   std::size_t worst_basis = 0;
   int worst_equation = 0; // 0: [aee], 1: [eae], 2: [eea]
   std::optional<BinaryReduction<S>> reduction;
};

/**
 * Checks a = [aee] = [eae] = [eea] on every basis vector. On success the
 * reduction holds the product table of a (.) b = [aeb] and the basis-triple
 * residual of ([[aeb]ec] - [ae[bec]]).
 */
template <FieldScalar S>
IdentityReport<S> verify_identity_and_reduce(const TernaryAlgebra<S>& alg, const Vector<S>& e, double tol)
{
   const std::size_t d = alg.dim();
   require_dim(static_cast<std::size_t>(e.size()), d, "identity candidate");
   const Norm norm = alg.norm();
   IdentityReport<S> rep;
   for (std::size_t i = 0; i < d; ++i) {
      const Vector<S> a = basis_vector<S>(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(i));
      const std::array<Vector<S>, 3> images{alg.product(a, e, e), alg.product(e, a, e), alg.product(e, e, a)};
      for (int q = 0; q < 3; ++q) {
         const double r = norm(images[static_cast<std::size_t>(q)] - a);
         if (r > rep.max_residual) {
            rep.max_residual = r;
            rep.worst_basis = i;
            rep.worst_equation = q;
         }
      }
   }
   rep.passed = rep.max_residual <= tol;
   if (!rep.passed) return rep;

   BinaryReduction<S> red;
   red.dim = d;
   red.table.resize(d * d);
   for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
         red.table[i * d + j] = alg.product(basis_vector<S>(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(i)), e,
                                            basis_vector<S>(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(j)));
   for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
         for (std::size_t k = 0; k < d; ++k) {
            const Vector<S> ek = basis_vector<S>(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k));
            const Vector<S> ei = basis_vector<S>(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(i));
            const Vector<S> left = alg.product(red.table[i * d + j], e, ek);
            const Vector<S> right = alg.product(ei, e, red.table[j * d + k]);
            red.associativity_residual = std::max(red.associativity_residual, norm(left - right));
         }
   rep.reduction = std::move(red);
   return rep;
}

struct NormReport {
   double max_ratio = 0.0; // max ||[abc]|| / (||a|| ||b|| ||c||) over the sample
   std::size_t samples = 0;
   bool passed = true;
};

/// Samples random triples and records the worst submultiplicativity ratio under the algebra's norm.
template <FieldScalar S>
NormReport check_norm_inequality(const TernaryAlgebra<S>& alg, std::size_t samples, std::uint64_t seed, double tol = 1e-9)
{
   std::mt19937_64 rng(seed);
   const auto d = static_cast<Eigen::Index>(alg.dim());
   const Norm norm = alg.norm();
   NormReport rep;
   rep.samples = samples;
   for (std::size_t s = 0; s < samples; ++s) {
      const Vector<S> a = random_vector<S>(d, rng), b = random_vector<S>(d, rng), c = random_vector<S>(d, rng);
      const double denom = norm(a) * norm(b) * norm(c);
      if (denom == 0.0) continue;
      rep.max_ratio = std::max(rep.max_ratio, norm(alg.product(a, b, c)) / denom);
   }
   rep.passed = rep.max_ratio <= 1.0 + tol;
   return rep;
}

namespace detail {

/**
 * Alternating maximisation of ||T(a,b,c)|| over unit a, b, c: with two slots
 * fixed the optimum in the third is the top right singular vector of the
 * induced d x d matrix. Returns the best value reached.
 */
template <FieldScalar S>
double refine_norm_ratio(const TernaryAlgebra<S>& alg, std::array<Vector<S>, 3> x, int rounds = 60)
{
   const auto d = static_cast<Eigen::Index>(alg.dim());
   double best = alg.product(x[0], x[1], x[2]).norm();
   for (int r = 0; r < rounds; ++r) {
      for (std::size_t slot = 0; slot < 3; ++slot) {
         Matrix<S> m(d, d);
         for (Eigen::Index i = 0; i < d; ++i) {
            std::array<Vector<S>, 3> y = x;
            y[slot] = basis_vector<S>(d, i);
            m.col(i) = alg.product(y[0], y[1], y[2]);
         }
         Eigen::JacobiSVD<Matrix<S>> svd(m, Eigen::ComputeFullV);
         if (svd.singularValues()(0) == 0.0) continue;
         x[slot] = svd.matrixV().col(0);
      }
      const double now = alg.product(x[0], x[1], x[2]).norm();
      if (now <= best * (1.0 + 1e-15)) {
         best = std::max(best, now);
         break;
      }
      best = now;
   }
   return best;
}

} // namespace detail

/**
 * Picks kappa = max(1, sqrt(c)) where c is the sampled worst ratio under the
 * unscaled Euclidean norm (refined by alternating maximisation), so the scaled
 * norm satisfies the Banach condition on the sample. A zero tensor is returned unchanged.
 */
template <FieldScalar S>
TernaryAlgebra<S> rescale_norm_submultiplicative(const TernaryAlgebra<S>& alg, std::size_t samples,
                                                 std::uint64_t seed = 0x5ca1eULL)
{
   if (samples == 0) throw Error(ErrorCode::invalid_argument, "rescale needs at least one sample");
   if (alg.structure().is_zero()) return alg;
   const TernaryAlgebra<S> base = alg.with_norm_scale(1.0);
   const auto d = static_cast<Eigen::Index>(alg.dim());
   std::mt19937_64 rng(seed);
   double c = 0.0;
   std::array<Vector<S>, 3> best;
   for (std::size_t s = 0; s < samples; ++s) {
      std::array<Vector<S>, 3> x{random_vector<S>(d, rng), random_vector<S>(d, rng), random_vector<S>(d, rng)};
      for (auto& v : x) v.normalize();
      const double r = base.product(x[0], x[1], x[2]).norm();
      if (r > c || s == 0) {
         c = std::max(c, r);
         best = x;
      }
   }
   c = std::max(c, detail::refine_norm_ratio(base, best));
   return alg.with_norm_scale(std::max(1.0, std::sqrt(c)));
}

} // namespace ternstab

#endif
