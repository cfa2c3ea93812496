#ifndef TERNSTAB_SERIALIZATION_HPP
#define TERNSTAB_SERIALIZATION_HPP

#include <fstream>
#include <string>

#include <json.hpp>

#include "algebra.hpp"
#include "bracket.hpp"
#include "control.hpp"
#include "perturbation.hpp"

namespace ternstab {

using json = nlohmann::ordered_json;

template <FieldScalar S>
json scalar_to_json(const S& v)
{
   if constexpr (is_complex_v<S>)
      return json::array({v.real(), v.imag()});
   else
      return v;
}

template <FieldScalar S>
S scalar_from_json(const json& j)
{
   if constexpr (is_complex_v<S>) {
      if (j.is_number()) return S(j.get<double>(), 0.0);
      if (j.is_array() && j.size() == 2) return S(j[0].get<double>(), j[1].get<double>());
      throw Error(ErrorCode::invalid_argument, "complex entries must be [re, im] pairs");
   } else {
      if (!j.is_number()) throw Error(ErrorCode::invalid_argument, "real entries must be numbers");
      return j.get<double>();
   }
}

inline json read_json_file(const std::string& path)
{
   std::ifstream in(path);
   if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path + "'");
   try {
      return json::parse(in);
   } catch (const json::parse_error& e) {
      throw Error(ErrorCode::io_error, "cannot parse '" + path + "': " + e.what());
   }
}

inline void write_text_file(const std::string& path, const std::string& text)
{
   std::ofstream out(path, std::ios::binary);
   if (!out) throw Error(ErrorCode::io_error, "cannot write '" + path + "'");
   out << text;
}

/// Field tag of a serialized algebra, defaulting to real.
inline Field field_of_json(const json& j) { return field_from_string(j.value("field", std::string("real"))); }

template <FieldScalar S>
json algebra_to_json(const TernaryAlgebra<S>& alg)
{
   const std::size_t d = alg.dim();
   json structure = json::array();
   for (std::size_t i = 0; i < d; ++i) {
      json ji = json::array();
      for (std::size_t j = 0; j < d; ++j) {
         json jj = json::array();
         for (std::size_t k = 0; k < d; ++k) {
            json jk = json::array();
            for (std::size_t l = 0; l < d; ++l) jk.push_back(scalar_to_json(alg.structure()(i, j, k, l)));
            jj.push_back(std::move(jk));
         }
         ji.push_back(std::move(jj));
      }
      structure.push_back(std::move(ji));
   }
   json flags = json::array();
   for (auto f : alg.flags()) flags.push_back(std::string(to_string(f)));
   return json{{"dim", d}, {"field", std::string(to_string(field_of_v<S>))}, {"structure", std::move(structure)},
               {"norm_scale", alg.norm_scale()}, {"flags", std::move(flags)}};
}

template <FieldScalar S>
TernaryAlgebra<S> algebra_from_json(const json& j)
{
   if (field_of_json(j) != field_of_v<S>)
      throw Error(ErrorCode::invalid_argument, "algebra field tag does not match the requested scalar type");
   const auto d = j.at("dim").get<std::size_t>();
   if (d == 0) throw Error(ErrorCode::dimension_mismatch, "algebra dim must be >= 1");
   const json& st = j.at("structure");
   Tensor4<S> t(d, d, d, d);
   const auto check = [](const json& a, std::size_t n) {
      if (!a.is_array() || a.size() != n) throw Error(ErrorCode::dimension_mismatch, "structure must be a nested [d][d][d][d] array");
   };
   check(st, d);
   for (std::size_t i = 0; i < d; ++i) {
      check(st[i], d);
      for (std::size_t jj = 0; jj < d; ++jj) {
         check(st[i][jj], d);
         for (std::size_t k = 0; k < d; ++k) {
            check(st[i][jj][k], d);
            for (std::size_t l = 0; l < d; ++l) t(i, jj, k, l) = scalar_from_json<S>(st[i][jj][k][l]);
         }
      }
   }
   std::set<AlgebraFlag> flags;
   for (const auto& f : j.value("flags", json::array())) flags.insert(algebra_flag_from_string(f.get<std::string>()));
   return TernaryAlgebra<S>(std::move(t), j.value("norm_scale", 1.0), std::move(flags));
}

template <FieldScalar S>
json cubic_to_json(const CubicMatrix<S>& c)
{
   const std::size_t n = c.side();
   json e = json::array();
   for (std::size_t i = 0; i < n; ++i) {
      json ei = json::array();
      for (std::size_t j = 0; j < n; ++j) {
         json ej = json::array();
         for (std::size_t k = 0; k < n; ++k) ej.push_back(scalar_to_json(c(i, j, k)));
         ei.push_back(std::move(ej));
      }
      e.push_back(std::move(ei));
   }
   return json{{"side", n}, {"entries", std::move(e)}};
}

template <FieldScalar S>
CubicMatrix<S> cubic_from_json(const json& j)
{
   const auto n = j.at("side").get<std::size_t>();
   CubicMatrix<S> c(n);
   const json& e = j.at("entries");
   for (std::size_t i = 0; i < n; ++i)
      for (std::size_t jj = 0; jj < n; ++jj)
         for (std::size_t k = 0; k < n; ++k) c(i, jj, k) = scalar_from_json<S>(e.at(i).at(jj).at(k));
   return c;
}

template <FieldScalar S>
json linear_map_to_json(const LinearMap<S>& m)
{
   json rows = json::array();
   for (Eigen::Index r = 0; r < m.matrix().rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < m.matrix().cols(); ++c) row.push_back(scalar_to_json(m.matrix()(r, c)));
      rows.push_back(std::move(row));
   }
   return json{{"in_dim", m.in_dim()}, {"out_dim", m.out_dim()}, {"matrix", std::move(rows)}};
}

template <FieldScalar S>
LinearMap<S> linear_map_from_json(const json& j)
{
   const auto in = j.at("in_dim").get<Eigen::Index>();
   const auto out = j.at("out_dim").get<Eigen::Index>();
   const json& rows = j.at("matrix");
   if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != out)
      throw Error(ErrorCode::dimension_mismatch, "linear map matrix must have out_dim rows");
   Matrix<S> m(out, in);
   for (Eigen::Index r = 0; r < out; ++r) {
      if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)].size()) != in)
         throw Error(ErrorCode::dimension_mismatch, "linear map rows must have in_dim entries");
      for (Eigen::Index c = 0; c < in; ++c)
         m(r, c) = scalar_from_json<S>(rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
   }
   return LinearMap<S>(std::move(m));
}

inline json signs_to_json(const SignConvention& s) { return json::array({s.s[0], s.s[1], s.s[2]}); }

inline SignConvention signs_from_json(const json& j)
{
   if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::invalid_argument, "sign convention must be a 3-element array");
   return SignConvention(j[0].get<int>(), j[1].get<int>(), j[2].get<int>());
}

template <FieldScalar S>
json control_to_json(const ControlFunction<S>& c)
{
   if (c.kind() == ControlKind::power) return json{{"kind", "power"}, {"theta", c.theta()}, {"p", c.p()}, {"arity", c.arity()}};
   return json{{"kind", "custom"}, {"name", c.name()}, {"arity", c.arity()}};
}

template <FieldScalar S>
ControlFunction<S> control_from_json(const json& j, Norm norm, std::size_t default_arity = 5)
{
   const auto kind = j.at("kind").get<std::string>();
   const auto arity = j.value("arity", default_arity);
   if (kind == "power") return ControlFunction<S>::power(j.at("theta").get<double>(), j.at("p").get<double>(), arity, norm);
   if (kind == "custom") return make_custom_control<S>(j.at("name").get<std::string>(), arity, norm);
   throw Error(ErrorCode::invalid_argument, "control kind must be 'power' or 'custom'");
}

template <FieldScalar S>
PerturbationSpec<S> perturbation_from_json(const json& j)
{
   PerturbationSpec<S> spec;
   spec.theta = j.value("theta", 0.0);
   spec.p = j.value("p", 0.5);
   spec.seed = j.value("seed", std::uint64_t{0});
   const auto dir = j.value("direction", std::string("fixed"));
   if (dir == "fixed")
      spec.direction = DirectionKind::fixed;
   else if (dir == "hashed")
      spec.direction = DirectionKind::hashed;
   else
      throw Error(ErrorCode::invalid_argument, "perturbation direction must be 'fixed' or 'hashed'");
   if (j.contains("vector")) {
      const json& v = j.at("vector");
      Vector<S> u(static_cast<Eigen::Index>(v.size()));
      for (std::size_t i = 0; i < v.size(); ++i) u(static_cast<Eigen::Index>(i)) = scalar_from_json<S>(v[i]);
      spec.fixed_direction = std::move(u);
   }
   spec.validate();
   return spec;
}

template <FieldScalar S>
json perturbation_to_json(const PerturbationSpec<S>& spec)
{
   json j{{"theta", spec.theta}, {"p", spec.p}, {"direction", std::string(to_string(spec.direction))}, {"seed", spec.seed}};
   if (spec.fixed_direction) {
      json v = json::array();
      for (Eigen::Index i = 0; i < spec.fixed_direction->size(); ++i) v.push_back(scalar_to_json((*spec.fixed_direction)(i)));
      j["vector"] = std::move(v);
   }
   return j;
}

} // namespace ternstab

#endif
