#ifndef TERNSTAB_TENSOR_HPP
#define TERNSTAB_TENSOR_HPP

#include <array>
#include <cstddef>
#include <vector>

#include "scalar.hpp"

namespace ternstab {

/**
 * Dense rank-4 array with row-major storage.
 *
 * Structure tensors use the convention T(i, j, k, l) = l-th coordinate of the
 * product of basis elements i, j, k, so the last index is the output slot.
 */
template <FieldScalar S>
class Tensor4 {
public:
   using Extents = std::array<std::size_t, 4>;

   Tensor4() = default;
   explicit Tensor4(Extents ext) : ext_(ext), data_(ext[0] * ext[1] * ext[2] * ext[3], S(0)) {}
   Tensor4(std::size_t n0, std::size_t n1, std::size_t n2, std::size_t n3)
      : Tensor4(Extents{n0, n1, n2, n3})
   {
   }

   const Extents& extents() const noexcept { return ext_; }
   std::size_t extent(std::size_t axis) const noexcept { return ext_[axis]; }
   std::size_t size() const noexcept { return data_.size(); }

   S& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l)
   {
      return data_[offset(i, j, k, l)];
   }
   const S& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const
   {
      return data_[offset(i, j, k, l)];
   }

   std::vector<S>& data() noexcept { return data_; }
   const std::vector<S>& data() const noexcept { return data_; }

   /// Output fibre T(i, j, k, :) as a vector.
   Vector<S> fibre(std::size_t i, std::size_t j, std::size_t k) const
   {
      Vector<S> out(static_cast<Eigen::Index>(ext_[3]));
      const std::size_t base = offset(i, j, k, 0);
      for (std::size_t l = 0; l < ext_[3]; ++l) out(static_cast<Eigen::Index>(l)) = data_[base + l];
      return out;
   }

   /// sum_{i,j,k} a_i b_j c_k T(i, j, k, :)
   Vector<S> contract(const Vector<S>& a, const Vector<S>& b, const Vector<S>& c) const
   {
      require_dim(static_cast<std::size_t>(a.size()), ext_[0], "contract slot 1");
      require_dim(static_cast<std::size_t>(b.size()), ext_[1], "contract slot 2");
      require_dim(static_cast<std::size_t>(c.size()), ext_[2], "contract slot 3");
      Vector<S> out = Vector<S>::Zero(static_cast<Eigen::Index>(ext_[3]));
      const std::size_t n3 = ext_[3];
      for (std::size_t i = 0; i < ext_[0]; ++i) {
         const S ai = a(static_cast<Eigen::Index>(i));
         if (ai == S(0)) continue;
         for (std::size_t j = 0; j < ext_[1]; ++j) {
            const S aibj = ai * b(static_cast<Eigen::Index>(j));
            if (aibj == S(0)) continue;
            for (std::size_t k = 0; k < ext_[2]; ++k) {
               const S w = aibj * c(static_cast<Eigen::Index>(k));
               if (w == S(0)) continue;
               const S* fib = &data_[offset(i, j, k, 0)];
               for (std::size_t l = 0; l < n3; ++l) out(static_cast<Eigen::Index>(l)) += w * fib[l];
            }
         }
      }
      return out;
   }

   bool is_zero() const
   {
      for (const S& v : data_)
         if (v != S(0)) return false;
      return true;
   }

   Tensor4 scaled(double s) const
   {
      Tensor4 out = *this;
      for (S& v : out.data_) v *= s;
      return out;
   }

private:
   std::size_t offset(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const noexcept
   {
      return ((i * ext_[1] + j) * ext_[2] + k) * ext_[3] + l;
   }

   Extents ext_{0, 0, 0, 0};
   std::vector<S> data_;
};

/// Cayley-style cubic matrix: an N x N x N array.
template <FieldScalar S>
class CubicMatrix {
public:
   explicit CubicMatrix(std::size_t side) : side_(side), entries_(side * side * side, S(0))
   {
      if (side == 0) throw Error(ErrorCode::invalid_argument, "cubic matrix side must be >= 1");
   }

   static CubicMatrix filled(std::size_t side, S value)
   {
      CubicMatrix m(side);
      for (S& v : m.entries_) v = value;
      return m;
   }

   std::size_t side() const noexcept { return side_; }
   S& operator()(std::size_t i, std::size_t j, std::size_t k) { return entries_[(i * side_ + j) * side_ + k]; }
   const S& operator()(std::size_t i, std::size_t j, std::size_t k) const
   {
      return entries_[(i * side_ + j) * side_ + k];
   }
   const std::vector<S>& entries() const noexcept { return entries_; }
   std::vector<S>& entries() noexcept { return entries_; }

private:
   std::size_t side_;
   std::vector<S> entries_;
};

/// {a,b,c}_{ijk} = sum_{l,m,n} a_{nil} b_{ljm} c_{mkn}
template <FieldScalar S>
CubicMatrix<S> cubic_matrix_product(const CubicMatrix<S>& a, const CubicMatrix<S>& b, const CubicMatrix<S>& c)
{
   const std::size_t n = a.side();
   if (b.side() != n || c.side() != n)
      throw Error(ErrorCode::dimension_mismatch, "cubic matrix sides differ");
   CubicMatrix<S> out(n);
   for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
         for (std::size_t k = 0; k < n; ++k) {
            S acc(0);
            for (std::size_t l = 0; l < n; ++l)
               for (std::size_t m = 0; m < n; ++m)
                  for (std::size_t q = 0; q < n; ++q) acc += a(q, i, l) * b(l, j, m) * c(m, k, q);
            out(i, j, k) = acc;
         }
   return out;
}

} // namespace ternstab

#endif
