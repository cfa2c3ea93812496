#ifndef TERNSTAB_EVALUABLE_MAP_HPP
#define TERNSTAB_EVALUABLE_MAP_HPP

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "linear_map.hpp"

namespace ternstab {

enum class MapKind { exact_linear, perturbed_linear, tabulated, custom };

/**
 * Possibly nonlinear map evaluated pointwise. Evaluators must be pure so the
 * same input always yields the same output and concurrent calls are safe.
 */
template <FieldScalar S>
class EvaluableMap {
public:
   using Fn = std::function<Vector<S>(const Vector<S>&)>;

   EvaluableMap(std::size_t in_dim, std::size_t out_dim, MapKind kind, Fn fn, std::optional<LinearMap<S>> base = std::nullopt)
      : in_dim_(in_dim), out_dim_(out_dim), kind_(kind), fn_(std::move(fn)), base_(std::move(base))
   {
   }

   static EvaluableMap from_linear(const LinearMap<S>& m)
   {
      return EvaluableMap(m.in_dim(), m.out_dim(), MapKind::exact_linear, [m](const Vector<S>& x) { return m(x); }, m);
   }

   /// Lookup table keyed on exact coordinates; evaluation off the table is an error.
   static EvaluableMap tabulated(std::size_t in_dim, std::size_t out_dim, std::vector<std::pair<Vector<S>, Vector<S>>> table)
   {
      return EvaluableMap(in_dim, out_dim, MapKind::tabulated, [table = std::move(table)](const Vector<S>& x) {
         for (const auto& [key, value] : table)
            if (key.size() == x.size() && key == x) return value;
         throw Error(ErrorCode::invalid_argument, "tabulated map evaluated outside its table");
      });
   }

   std::size_t in_dim() const noexcept { return in_dim_; }
   std::size_t out_dim() const noexcept { return out_dim_; }
   MapKind kind() const noexcept { return kind_; }
   const std::optional<LinearMap<S>>& base() const noexcept { return base_; }

   Vector<S> operator()(const Vector<S>& x) const
   {
      require_dim(static_cast<std::size_t>(x.size()), in_dim_, "evaluable map input");
      Vector<S> y = fn_(x);
      require_dim(static_cast<std::size_t>(y.size()), out_dim_, "evaluable map output");
      return y;
   }

private:
   std::size_t in_dim_, out_dim_;
   MapKind kind_;
   Fn fn_;
   std::optional<LinearMap<S>> base_;
};

} // namespace ternstab

#endif
