#ifndef TERNSTAB_SCALAR_HPP
#define TERNSTAB_SCALAR_HPP

#include <complex>
#include <concepts>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace ternstab {

enum class Field { real, complex };

/// Scalars the library is instantiated over: real or complex double precision.
template <class S>
concept FieldScalar = std::same_as<S, double> || std::same_as<S, std::complex<double>>;

template <FieldScalar S>
inline constexpr bool is_complex_v = std::same_as<S, std::complex<double>>;

template <FieldScalar S>
inline constexpr Field field_of_v = is_complex_v<S> ? Field::complex : Field::real;

template <FieldScalar S>
using Vector = Eigen::Matrix<S, Eigen::Dynamic, 1>;

template <FieldScalar S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

inline std::string_view to_string(Field f) { return f == Field::real ? "real" : "complex"; }

inline Field field_from_string(std::string_view s)
{
   if (s == "real") return Field::real;
   if (s == "complex") return Field::complex;
   throw std::invalid_argument("unknown field tag '" + std::string(s) + "'");
}

/// Machine-readable failure categories; these strings appear verbatim in reports.
enum class ErrorCode {
   dimension_mismatch,
   invalid_argument,
   divergent_control,
   max_iter_exceeded,
   empty_derivation_space,
   nonzero_at_origin,
   io_error,
};

inline std::string_view to_string(ErrorCode c)
{
   switch (c) {
   case ErrorCode::dimension_mismatch: return "dimension_mismatch";
   case ErrorCode::invalid_argument: return "invalid_argument";
   case ErrorCode::divergent_control: return "divergent_control";
   case ErrorCode::max_iter_exceeded: return "max_iter_exceeded";
   case ErrorCode::empty_derivation_space: return "empty_derivation_space";
   case ErrorCode::nonzero_at_origin: return "nonzero_at_origin";
   case ErrorCode::io_error: return "io_error";
   }
   return "unknown";
}

class Error : public std::runtime_error {
public:
   Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
   {
   }
   ErrorCode code() const noexcept { return code_; }

private:
   ErrorCode code_;
};

inline void require_dim(std::size_t got, std::size_t want, const char* what)
{
   if (got != want)
      throw Error(ErrorCode::dimension_mismatch, std::string(what) + ": expected length " +
                                                    std::to_string(want) + ", got " +
                                                    std::to_string(got));
}

/// Scaled Euclidean norm kappa * ||v||_2 on coordinate vectors.
struct Norm {
   double scale = 1.0;

   template <class Derived>
   double operator()(const Eigen::MatrixBase<Derived>& v) const
   {
      return scale * v.norm();
   }
};

/// Draws standard normal coordinates; complex scalars get independent real and imaginary parts.
template <FieldScalar S, class Rng>
Vector<S> random_vector(Eigen::Index n, Rng& rng)
{
   std::normal_distribution<double> normal(0.0, 1.0);
   Vector<S> v(n);
   for (Eigen::Index i = 0; i < n; ++i) {
      if constexpr (is_complex_v<S>) {
         const double re = normal(rng);
         const double im = normal(rng);
         v(i) = S(re, im);
      } else {
         v(i) = normal(rng);
      }
   }
   return v;
}

template <FieldScalar S>
Vector<S> basis_vector(Eigen::Index n, Eigen::Index i)
{
   Vector<S> v = Vector<S>::Zero(n);
   v(i) = S(1);
   return v;
}

} // namespace ternstab

#endif
