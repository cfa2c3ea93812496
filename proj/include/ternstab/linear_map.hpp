#ifndef TERNSTAB_LINEAR_MAP_HPP
#define TERNSTAB_LINEAR_MAP_HPP

#include <concepts>
#include <cstdint>
#include <random>

#include "scalar.hpp"

namespace ternstab {

/// Anything that maps coordinate vectors to coordinate vectors pointwise.
template <class F, class S>
concept VectorMap = FieldScalar<S> && requires(const F& f, const Vector<S>& v) {
   { f(v) } -> std::convertible_to<Vector<S>>;
};

/// Linear map between coordinate spaces, stored as an out_dim x in_dim matrix.
template <FieldScalar S>
class LinearMap {
public:
   explicit LinearMap(Matrix<S> m) : m_(std::move(m))
   {
      if (m_.rows() == 0 || m_.cols() == 0) throw Error(ErrorCode::dimension_mismatch, "linear map dimensions must be >= 1");
      if (!m_.allFinite()) throw Error(ErrorCode::invalid_argument, "linear map has non-finite entries");
   }

   static LinearMap identity(std::size_t n) { return LinearMap(Matrix<S>::Identity(idx(n), idx(n))); }
   static LinearMap zero(std::size_t out, std::size_t in) { return LinearMap(Matrix<S>::Zero(idx(out), idx(in))); }

   template <class Rng>
   static LinearMap random(std::size_t out, std::size_t in, Rng& rng)
   {
      Matrix<S> m(idx(out), idx(in));
      for (Eigen::Index j = 0; j < m.cols(); ++j) m.col(j) = random_vector<S>(m.rows(), rng);
      return LinearMap(std::move(m));
   }

   std::size_t in_dim() const noexcept { return static_cast<std::size_t>(m_.cols()); }
   std::size_t out_dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
   const Matrix<S>& matrix() const noexcept { return m_; }

   Vector<S> operator()(const Vector<S>& x) const
   {
      require_dim(static_cast<std::size_t>(x.size()), in_dim(), "linear map input");
      return m_ * x;
   }

   LinearMap operator+(const LinearMap& o) const { return LinearMap(m_ + o.m_); }
   LinearMap operator-(const LinearMap& o) const { return LinearMap(m_ - o.m_); }
   friend LinearMap operator*(S s, const LinearMap& f) { return LinearMap(s * f.m_); }

private:
   static Eigen::Index idx(std::size_t n) { return static_cast<Eigen::Index>(n); }
   Matrix<S> m_;
};

/// max_{ij} |A_ij - B_ij|
template <FieldScalar S>
double max_norm_distance(const LinearMap<S>& a, const LinearMap<S>& b)
{
   if (a.in_dim() != b.in_dim() || a.out_dim() != b.out_dim())
      throw Error(ErrorCode::dimension_mismatch, "cannot compare linear maps of different shapes");
   return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

} // namespace ternstab

#endif
