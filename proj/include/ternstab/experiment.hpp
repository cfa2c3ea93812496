#ifndef TERNSTAB_EXPERIMENT_HPP
#define TERNSTAB_EXPERIMENT_HPP

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <future>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "derivation_solver.hpp"
#include "hypothesis.hpp"
#include "module.hpp"
#include "serialization.hpp"
#include "stabilize.hpp"

namespace ternstab {

struct AlgebraSource {
   std::string builder = "trivial-matrix"; // trivial-matrix | odd-polynomial | cubic-matrix | file
   long m = 2;
   long degree_cap = 3;
   long side = 2;
   std::string file;
   bool rescale = false;
   std::size_t rescale_samples = 1000;
};

struct MapSource {
   enum class Kind { identity, zero, file, random } kind = Kind::identity;
   std::string file;
   std::uint64_t seed = 0;
   double scale = 1.0;
};

struct SampleCounts {
   std::size_t bounds = 100;
   std::size_t identity = 100;
   std::size_t linearity = 10;
   std::size_t hypothesis = 50;
   std::size_t norm = 1000;
};

/// Everything needed to reproduce one stabilization run.
struct ExperimentConfig {
   json document; // echo of the parsed configuration
   std::filesystem::path base_dir = ".";
   Field field = Field::real;
   std::uint64_t seed = 42;
   AlgebraSource algebra;
   MapSource sigma, tau, xi;
   SignConvention signs;
   DerivationMode mode = DerivationMode::lie;
   double rank_tol = 1e-10;
   std::size_t derivation_index = 0;
   double derivation_scale = 1.0;
   bool fallback_zero = true;
   json perturbation_f = json::object(), perturbation_g = json::object(), perturbation_h = json::object(),
        perturbation_k = json::object();
   json control = json{{"kind", "power"}, {"theta", 0.1}, {"p", 0.5}};
   double tol = 1e-10;
   int max_iter = kMaxDoublings;
   double axiom_tol = 1e-12;
   SampleCounts samples;
   std::size_t lambda_grid = 16;
   bool check_algebra = true;
   bool enforce_hypothesis = false;
   bool uniqueness_check = true;
   bool record_traces = true;
   std::string report_name = "report.json";
   std::string trace_prefix = "trace";

   /// Overrides applied on the command line; mirrored into the echo.
   void set_seed(std::uint64_t s)
   {
      seed = s;
      document["seed"] = s;
   }
   void set_tol(double t)
   {
      if (!(t > 0.0)) throw Error(ErrorCode::invalid_argument, "tol must be > 0");
      tol = t;
      document["tolerances"]["hyers"] = t;
   }
   void set_signs(const SignConvention& s)
   {
      signs = s;
      document["signs"] = signs_to_json(s);
   }
   /// p of every perturbation and of a power control.
   void set_p(double p)
   {
      for (json* j : {&perturbation_f, &perturbation_g, &perturbation_h, &perturbation_k}) (*j)["p"] = p;
      if (control.value("kind", std::string()) == "power") control["p"] = p;
      sync_perturbations();
   }
   void set_theta(double theta)
   {
      for (json* j : {&perturbation_f, &perturbation_g, &perturbation_h, &perturbation_k}) (*j)["theta"] = theta;
      if (control.value("kind", std::string()) == "power") control["theta"] = theta;
      sync_perturbations();
   }

private:
   void sync_perturbations()
   {
      document["perturbation"] = json{{"f", perturbation_f}, {"g", perturbation_g}, {"h", perturbation_h}, {"k", perturbation_k}};
      document["control"] = control;
   }
};

namespace detail {

inline MapSource map_source_from_json(const json& j)
{
   MapSource s;
   if (j.is_string()) {
      const auto name = j.get<std::string>();
      if (name == "identity")
         s.kind = MapSource::Kind::identity;
      else if (name == "zero")
         s.kind = MapSource::Kind::zero;
      else
         throw Error(ErrorCode::invalid_argument, "map source must be 'identity', 'zero', {\"file\"} or {\"random\"}");
      return s;
   }
   if (j.contains("file")) {
      s.kind = MapSource::Kind::file;
      s.file = j.at("file").get<std::string>();
   } else if (j.contains("random")) {
      s.kind = MapSource::Kind::random;
      s.seed = j.at("random").get<std::uint64_t>();
   } else {
      throw Error(ErrorCode::invalid_argument, "map source object needs 'file' or 'random'");
   }
   s.scale = j.value("scale", 1.0);
   return s;
}

inline void require_file(const std::filesystem::path& p)
{
   if (!std::filesystem::exists(p)) throw Error(ErrorCode::io_error, "referenced file '" + p.string() + "' does not exist");
}

} // namespace detail

/// Parses a configuration document; relative file references resolve against base_dir.
inline ExperimentConfig parse_experiment_config(const json& doc, const std::filesystem::path& base_dir = ".")
{
   ExperimentConfig c;
   c.document = doc;
   c.base_dir = base_dir;
   c.field = field_from_string(doc.value("field", std::string("real")));
   c.seed = doc.value("seed", c.seed);

   const json alg = doc.value("algebra", json{{"builder", "trivial-matrix"}, {"m", 2}});
   if (alg.contains("file")) {
      c.algebra.builder = "file";
      c.algebra.file = alg.at("file").get<std::string>();
      detail::require_file(base_dir / c.algebra.file);
   } else {
      c.algebra.builder = alg.value("builder", std::string("trivial-matrix"));
      c.algebra.m = alg.value("m", c.algebra.m);
      c.algebra.degree_cap = alg.value("degree_cap", c.algebra.degree_cap);
      c.algebra.side = alg.value("side", c.algebra.side);
   }
   c.algebra.rescale = alg.value("rescale", false);
   c.algebra.rescale_samples = alg.value("rescale_samples", c.algebra.rescale_samples);

   const json maps = doc.value("maps", json::object());
   c.sigma = detail::map_source_from_json(maps.value("sigma", json("identity")));
   c.tau = detail::map_source_from_json(maps.value("tau", json("identity")));
   c.xi = detail::map_source_from_json(maps.value("xi", json("identity")));
   for (const auto* s : {&c.sigma, &c.tau, &c.xi})
      if (s->kind == MapSource::Kind::file) detail::require_file(base_dir / s->file);

   if (doc.contains("signs")) c.signs = signs_from_json(doc.at("signs"));
   c.mode = derivation_mode_from_string(doc.value("mode", std::string("lie")));

   const json der = doc.value("derivation", json::object());
   c.rank_tol = der.value("rank_tol", c.rank_tol);
   c.derivation_index = der.value("index", c.derivation_index);
   c.derivation_scale = der.value("scale", c.derivation_scale);
   c.fallback_zero = der.value("fallback_zero", c.fallback_zero);

   const json pert = doc.value("perturbation", json::object());
   c.perturbation_f = pert.value("f", json::object());
   c.perturbation_g = pert.value("g", json::object());
   c.perturbation_h = pert.value("h", json::object());
   c.perturbation_k = pert.value("k", json::object());
   if (doc.contains("control")) c.control = doc.at("control");
   if (!c.control.contains("arity")) c.control["arity"] = c.mode == DerivationMode::lie ? 5 : 3;

   const json tols = doc.value("tolerances", json::object());
   c.tol = tols.value("hyers", c.tol);
   c.max_iter = tols.value("max_iter", c.max_iter);
   c.axiom_tol = tols.value("axioms", c.axiom_tol);
   c.rank_tol = tols.value("rank", c.rank_tol);
   if (!(c.tol > 0.0) || !(c.axiom_tol > 0.0) || !(c.rank_tol > 0.0))
      throw Error(ErrorCode::invalid_argument, "tolerances must be > 0");

   const json smp = doc.value("samples", json::object());
   c.samples.bounds = smp.value("bounds", c.samples.bounds);
   c.samples.identity = smp.value("identity", c.samples.identity);
   c.samples.linearity = smp.value("linearity", c.samples.linearity);
   c.samples.hypothesis = smp.value("hypothesis", c.samples.hypothesis);
   c.samples.norm = smp.value("norm", c.samples.norm);
   c.lambda_grid = doc.value("lambda_grid", c.lambda_grid);

   const json checks = doc.value("checks", json::object());
   c.check_algebra = checks.value("algebra", c.check_algebra);
   c.enforce_hypothesis = checks.value("enforce_hypothesis", c.enforce_hypothesis);
   c.uniqueness_check = checks.value("uniqueness", c.uniqueness_check);

   const json out = doc.value("output", json::object());
   c.record_traces = out.value("traces", c.record_traces);
   c.report_name = out.value("report", c.report_name);
   c.trace_prefix = out.value("trace_prefix", c.trace_prefix);
   return c;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path)
{
   return parse_experiment_config(read_json_file(path.string()), path.parent_path().empty() ? "." : path.parent_path());
}

struct ExperimentResult {
   json report;
   bool all_passed = false;
   std::vector<std::pair<std::string, std::string>> files; // relative name -> contents
};

namespace detail {

inline std::string format_double(double v)
{
   char buf[64];
   std::snprintf(buf, sizeof buf, "%.17g", v);
   return buf;
}

/// JSON has no NaN or infinity; they become null.
inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline std::string utc_timestamp()
{
   const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
   std::tm tm{};
   gmtime_r(&now, &tm);
   char buf[32];
   std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
   return buf;
}

template <FieldScalar S>
TernaryAlgebra<S> build_algebra(const ExperimentConfig& c)
{
   TernaryAlgebra<S> alg = [&] {
      if (c.algebra.builder == "trivial-matrix") return build_trivial_from_matrices<S>(static_cast<std::size_t>(c.algebra.m));
      if (c.algebra.builder == "odd-polynomial") return build_odd_polynomial_algebra<S>(c.algebra.degree_cap);
      if (c.algebra.builder == "cubic-matrix") return build_cubic_matrix_algebra<S>(static_cast<std::size_t>(c.algebra.side));
      if (c.algebra.builder == "file") return algebra_from_json<S>(read_json_file((c.base_dir / c.algebra.file).string()));
      throw Error(ErrorCode::invalid_argument, "unknown algebra builder '" + c.algebra.builder + "'");
   }();
   if (c.algebra.rescale) alg = rescale_norm_submultiplicative(alg, c.algebra.rescale_samples, c.seed);
   return alg;
}

template <FieldScalar S>
LinearMap<S> build_map(const MapSource& s, std::size_t d, const ExperimentConfig& c)
{
   switch (s.kind) {
   case MapSource::Kind::identity: return LinearMap<S>::identity(d);
   case MapSource::Kind::zero: return LinearMap<S>::zero(d, d);
   case MapSource::Kind::file: {
      auto m = linear_map_from_json<S>(read_json_file((c.base_dir / s.file).string()));
      if (m.in_dim() != d || m.out_dim() != d) throw Error(ErrorCode::dimension_mismatch, "map file '" + s.file + "' must be d x d");
      return S(s.scale) * m;
   }
   case MapSource::Kind::random: {
      std::mt19937_64 rng(s.seed);
      return S(s.scale) * LinearMap<S>::random(d, d, rng);
   }
   }
   throw Error(ErrorCode::invalid_argument, "bad map source");
}

template <FieldScalar S>
json matrix_to_json(const LinearMap<S>& m)
{
   return linear_map_to_json(m).at("matrix");
}

template <FieldScalar S>
json vector_to_json(const Vector<S>& v)
{
   json out = json::array();
   for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(scalar_to_json(v(i)));
   return out;
}

template <FieldScalar S>
json stats_to_json(const InequalityStats<S>& st)
{
   json pts = json::array();
   for (const auto& p : st.worst_points) pts.push_back(vector_to_json(p));
   return json{{"evaluated", st.evaluated},
               {"violations", st.violations},
               {"max_residual", number_or_null(st.max_residual)},
               {"min_slack", number_or_null(st.min_slack)},
               {"worst_lambda", scalar_to_json(st.worst_lambda)},
               {"worst_points", std::move(pts)}};
}

inline std::string trace_csv(const std::vector<std::vector<HyersTraceEntry>>& traces)
{
   std::ostringstream os;
   os << "basis_index,n,error,tail_bound\n";
   for (std::size_t i = 0; i < traces.size(); ++i)
      for (const auto& e : traces[i])
         os << i << ',' << e.n << ',' << format_double(std::isnan(e.error) ? e.step : e.error) << ',' << format_double(e.tail_bound)
            << '\n';
   return os.str();
}

} // namespace detail

/**
 * End-to-end run: build the algebra and its self-module, solve for a
 * ground-truth derivation, perturb it (and sigma, tau, xi), sample the
 * hypothesis, stabilize, and assemble the JSON report.
 */
template <FieldScalar S>
ExperimentResult run_experiment_typed(const ExperimentConfig& c)
{
   ExperimentResult out;
   json& rep = out.report;
   rep["config_echo"] = c.document;
   rep["recovered"] = json::object();
   rep["bounds"] = json::object();
   rep["hypothesis"] = json::object();
   rep["identity_residuals"] = json::object();
   rep["all_passed"] = false;
   json errors = json::array();
   bool ok = true;
   const auto fail = [&](ErrorCode code, const std::string& msg) {
      errors.push_back(json{{"code", std::string(to_string(code))}, {"message", msg}});
      ok = false;
   };

   try {
      const TernaryAlgebra<S> alg = detail::build_algebra<S>(c);
      const TernaryModule<S> mod = self_module(alg);
      const std::size_t d = alg.dim();
      const Norm an = alg.norm();

      json algebra_checks{{"dim", d}, {"norm_scale", alg.norm_scale()}, {"enabled", c.check_algebra}};
      if (c.check_algebra) {
         const auto assoc = check_ternary_associativity(alg, c.axiom_tol, EnumerationBudget{1'000'000, 100'000, c.seed});
         const auto modr = check_module_axioms(mod, c.axiom_tol, c.samples.norm, c.seed ^ 0xa5a5ULL, EnumerationBudget{1'000'000, 100'000, c.seed});
         const auto normr = check_norm_inequality(alg, c.samples.norm, c.seed ^ 0x5a5aULL);
         json chains = json::array();
         for (double r : modr.chain_residual) chains.push_back(r);
         algebra_checks["associativity"] = json{{"max_residual", assoc.max_residual}, {"exhaustive", assoc.exhaustive},
                                                {"tuples", assoc.tuples_checked}, {"passed", assoc.passed}};
         algebra_checks["module"] = json{{"chain_residuals", std::move(chains)}, {"norm_max_ratio", modr.norm_max_ratio},
                                         {"passed", modr.passed}};
         algebra_checks["norm"] = json{{"max_ratio", normr.max_ratio}, {"samples", normr.samples}, {"passed", normr.passed}};
         if (!(assoc.passed && modr.passed && normr.passed)) ok = false;
      }
      rep["recovered"]["algebra_checks"] = std::move(algebra_checks);

      const LinearMap<S> sigma = detail::build_map<S>(c.sigma, d, c);
      const LinearMap<S> tau = detail::build_map<S>(c.tau, d, c);
      const LinearMap<S> xi = detail::build_map<S>(c.xi, d, c);

      const auto space = solve_derivation_space(mod, sigma, tau, xi, c.signs, c.rank_tol);
      json ds{{"dimension", space.basis.size()}, {"rank_tol", c.rank_tol}};
      std::optional<LinearMap<S>> d_true;
      if (!space.basis.empty()) {
         if (c.derivation_index >= space.basis.size())
            throw Error(ErrorCode::invalid_argument, "derivation index " + std::to_string(c.derivation_index) + " out of range");
         d_true = S(c.derivation_scale) * space.basis[c.derivation_index];
         ds["fallback"] = "none";
         ds["index"] = c.derivation_index;
      } else if (c.fallback_zero) {
         d_true = LinearMap<S>::zero(mod.dim(), d);
         ds["fallback"] = "zero";
      } else {
         ds["fallback"] = "none";
         rep["recovered"]["derivation_space"] = std::move(ds);
         throw Error(ErrorCode::empty_derivation_space, "no nonzero derivation for the configured sigma, tau, xi and signs");
      }
      rep["recovered"]["derivation_space"] = std::move(ds);

      const Norm xn = mod.norm();
      const auto f = perturb_map(*d_true, perturbation_from_json<S>(c.perturbation_f), an, xn);
      const auto g = perturb_map(sigma, perturbation_from_json<S>(c.perturbation_g), an, an);
      const auto h = perturb_map(tau, perturbation_from_json<S>(c.perturbation_h), an, an);
      const auto k = perturb_map(xi, perturbation_from_json<S>(c.perturbation_k), an, an);
      const auto phi = control_from_json<S>(c.control, an, c.mode == DerivationMode::lie ? 5 : 3);

      // Surface a divergent control before any iteration.
      {
         const auto args = diagonal_args(basis_vector<S>(static_cast<Eigen::Index>(d), 0), phi.arity());
         SeriesOptions so;
         so.tail_tol = c.tol * 1e-6;
         (void)phi_tilde(phi, std::span<const Vector<S>>(args), so);
      }

      const auto hyp = check_hypothesis(f, g, h, k, phi, mod, c.signs, c.mode, c.lambda_grid, c.samples.hypothesis, c.seed ^ 0x4879ULL);
      rep["hypothesis"] = json{{"mode", std::string(to_string(c.mode))},
                               {"signs", signs_to_json(c.signs)},
                               {"lambda_grid", hyp.lambda_grid},
                               {"samples", hyp.samples},
                               {"enforced", c.enforce_hypothesis},
                               {"total_violations", hyp.total_violations()},
                               {"main", detail::stats_to_json(hyp.main)},
                               {"g", detail::stats_to_json(hyp.g)},
                               {"h", detail::stats_to_json(hyp.h)},
                               {"k", detail::stats_to_json(hyp.k)}};
      if (c.enforce_hypothesis && hyp.total_violations() > 0) ok = false;

      StabilizeOptions<S> so;
      so.tol = c.tol;
      so.max_iter = c.max_iter;
      so.mode = c.mode;
      so.seed = c.seed;
      so.linearity_samples = c.samples.linearity;
      so.bound_samples = c.samples.bounds;
      so.identity_samples = c.samples.identity;
      so.record_traces = c.record_traces;
      so.reference_D = d_true;
      so.reference_sigma = sigma;
      so.reference_tau = tau;
      so.reference_xi = xi;
      const auto st = direct_method_stabilize(f, g, h, k, phi, mod, c.signs, so);

      json maps = json::object();
      json per_map_bounds = json::object();
      double worst_reference = 0.0;
      const auto emit = [&](const RecoveredMap<S>& rm, const LinearMap<S>& truth) {
         json jm{{"iterations", rm.iterations}, {"rule", std::string(to_string(rm.rule))},
                 {"convergence_rate", detail::number_or_null(rm.convergence_rate)}};
         if (rm.map) {
            jm["matrix"] = detail::matrix_to_json(*rm.map);
            const double dist = max_norm_distance(*rm.map, truth);
            jm["reference_distance"] = dist;
            worst_reference = std::max(worst_reference, dist);
         }
         if (rm.error) {
            jm["error"] = *rm.error;
            fail(*rm.error_code, rm.name + ": " + *rm.error);
         }
         maps[rm.name] = std::move(jm);
         per_map_bounds[rm.name] = json{{"max_ratio", rm.max_bound_ratio},
                                        {"max_excess", detail::number_or_null(rm.max_bound_excess)},
                                        {"violations", rm.bound_violations},
                                        {"linearity_defect", rm.max_linearity_defect},
                                        {"linearity_threshold", rm.linearity_threshold},
                                        {"passed", rm.ok()}};
         if (c.record_traces && !rm.traces.empty())
            out.files.emplace_back(c.trace_prefix + "_" + rm.name + ".csv", detail::trace_csv(rm.traces));
      };
      emit(st.D, *d_true);
      emit(st.sigma, sigma);
      emit(st.tau, tau);
      emit(st.xi, xi);
      const double recovery_threshold = 10.0 * c.tol;
      rep["recovered"]["maps"] = std::move(maps);
      rep["recovered"]["reference_distance"] = json{{"max", worst_reference}, {"threshold", recovery_threshold},
                                                    {"passed", !st.partial && worst_reference <= recovery_threshold}};
      if (st.partial || worst_reference > recovery_threshold) ok = false;

      if (c.uniqueness_check && !st.partial) {
         StabilizeOptions<S> fine = so;
         fine.tol = c.tol / 10.0;
         fine.record_traces = false;
         fine.linearity_samples = 0;
         fine.bound_samples = 0;
         fine.identity_samples = 0;
         const auto st2 = direct_method_stabilize(f, g, h, k, phi, mod, c.signs, fine);
         double change = std::numeric_limits<double>::infinity();
         if (!st2.partial)
            change = std::max({max_norm_distance(*st.D.map, *st2.D.map), max_norm_distance(*st.sigma.map, *st2.sigma.map),
                               max_norm_distance(*st.tau.map, *st2.tau.map), max_norm_distance(*st.xi.map, *st2.xi.map)});
         const bool uok = change <= 2.0 * c.tol;
         rep["recovered"]["uniqueness"] = json{{"refined_tol", fine.tol}, {"max_change", detail::number_or_null(change)},
                                               {"threshold", 2.0 * c.tol}, {"passed", uok}};
         if (!uok) ok = false;
      }

      json norms = json::array(), tildes = json::array();
      for (double v : st.sample_norms) norms.push_back(v);
      for (double v : st.phi_tilde_values) tildes.push_back(v);
      rep["bounds"] = json{{"control", control_to_json(phi)},
                           {"closed_form", phi.kind() == ControlKind::power},
                           {"samples", st.sample_norms.size()},
                           {"sample_norms", std::move(norms)},
                           {"phi_tilde", std::move(tildes)},
                           {"maps", std::move(per_map_bounds)}};
      for (const auto* rm : {&st.D, &st.sigma, &st.tau, &st.xi})
         if (!rm->ok()) ok = false;

      json ir{{"mode", std::string(to_string(c.mode))},
              {"signs", signs_to_json(c.signs)},
              {"samples", st.identity_samples},
              {"max_normalized", detail::number_or_null(st.max_identity_residual)},
              {"threshold", st.identity_threshold},
              {"lie_jordan_discrepancy", detail::number_or_null(st.lie_jordan_discrepancy)},
              {"passed", st.identity_ok()}};
      if (st.homogeneity_defect) {
         ir["homogeneity_defect"] = detail::number_or_null(*st.homogeneity_defect);
         ir["homogeneity_threshold"] = st.homogeneity_threshold;
      }
      rep["identity_residuals"] = std::move(ir);
      if (!st.identity_ok() || !st.homogeneity_ok()) ok = false;
   } catch (const Error& e) {
      fail(e.code(), e.what());
   } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::invalid_argument, e.what());
   }

   rep["errors"] = std::move(errors);
   rep["all_passed"] = ok;
   rep["timestamp"] = detail::utc_timestamp();
   out.all_passed = ok;
   return out;
}

inline ExperimentResult run_experiment(const ExperimentConfig& c)
{
   return c.field == Field::real ? run_experiment_typed<double>(c) : run_experiment_typed<std::complex<double>>(c);
}

template <FieldScalar S>
json derivation_space_report_typed(const ExperimentConfig& c)
{
   const TernaryAlgebra<S> alg = detail::build_algebra<S>(c);
   const TernaryModule<S> mod = self_module(alg);
   const std::size_t d = alg.dim();
   const auto space = solve_derivation_space(mod, detail::build_map<S>(c.sigma, d, c), detail::build_map<S>(c.tau, d, c),
                                             detail::build_map<S>(c.xi, d, c), c.signs, c.rank_tol);
   json basis = json::array();
   for (const auto& b : space.basis) basis.push_back(detail::matrix_to_json(b));
   // the smallest few singular values show how close the space is to growing
   json tail = json::array();
   const auto& sv = space.singular_values;
   for (Eigen::Index i = std::max<Eigen::Index>(0, sv.size() - 6); i < sv.size(); ++i) tail.push_back(sv(i));
   return json{{"field", std::string(to_string(field_of_v<S>))},
               {"algebra_dim", d},
               {"signs", signs_to_json(c.signs)},
               {"rank_tol", c.rank_tol},
               {"system", json{{"rows", space.rows}, {"cols", space.cols}}},
               {"smallest_singular_values", std::move(tail)},
               {"dimension", space.basis.size()},
               {"basis", std::move(basis)}};
}

/// Basis of exact derivations for the configured algebra, maps and signs.
inline json derivation_space_report(const ExperimentConfig& c)
{
   return c.field == Field::real ? derivation_space_report_typed<double>(c)
                                 : derivation_space_report_typed<std::complex<double>>(c);
}

/// Report text with the timestamp removed; identical configs and seeds give identical strings.
inline std::string canonical_report(json report)
{
   report.erase("timestamp");
   return report.dump(2);
}

inline void write_experiment_outputs(const ExperimentResult& r, const std::filesystem::path& dir, const std::string& report_name)
{
   std::error_code ec;
   std::filesystem::create_directories(dir, ec);
   if (ec) throw Error(ErrorCode::io_error, "cannot create '" + dir.string() + "': " + ec.message());
   write_text_file((dir / report_name).string(), r.report.dump(2) + "\n");
   for (const auto& [name, text] : r.files) write_text_file((dir / name).string(), text);
}

/// Parallelism cap from TERNSTAB_THREADS; 0 or unset means hardware concurrency.
inline unsigned thread_budget()
{
   unsigned n = 0;
   if (const char* env = std::getenv("TERNSTAB_THREADS")) n = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
   if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
   return n;
}

struct SweepRow {
   std::string param;
   double value = 0.0;
   bool all_passed = false;
   int max_iterations = 0;
   double mean_iterations = 0.0;
   double max_reference_distance = 0.0;
   double max_bound_ratio = 0.0;
   double identity_residual = 0.0;
};

inline std::vector<double> parse_sweep_range(const std::string& spec, std::string& name)
{
   // name=start:stop:step
   const auto eq = spec.find('=');
   if (eq == std::string::npos) throw Error(ErrorCode::invalid_argument, "sweep spec must look like p=0.1:0.9:0.1");
   name = spec.substr(0, eq);
   std::vector<double> parts;
   std::stringstream ss(spec.substr(eq + 1));
   std::string tok;
   while (std::getline(ss, tok, ':')) {
      try {
         parts.push_back(std::stod(tok));
      } catch (const std::exception&) {
         throw Error(ErrorCode::invalid_argument, "bad number '" + tok + "' in sweep spec");
      }
   }
   if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0])
      throw Error(ErrorCode::invalid_argument, "sweep range must be start:stop:step with step > 0 and stop >= start");
   std::vector<double> values;
   const auto count = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
   for (long i = 0; i <= count; ++i) values.push_back(parts[0] + static_cast<double>(i) * parts[2]);
   return values;
}

/// One experiment per value; points run concurrently, rows come back in value order.
inline std::vector<SweepRow> run_sweep(const ExperimentConfig& base, const std::string& param, const std::vector<double>& values,
                                       unsigned threads = thread_budget())
{
   if (param != "p" && param != "theta" && param != "tol")
      throw Error(ErrorCode::invalid_argument, "sweep parameter must be p, theta or tol");
   std::vector<SweepRow> rows(values.size());
   std::atomic<std::size_t> next{0};
   std::mutex err_mutex;
   std::exception_ptr first_error;
   const auto worker = [&] {
      for (std::size_t i = next++; i < values.size(); i = next++) {
         try {
            ExperimentConfig c = base;
            c.record_traces = false;
            if (param == "p") c.set_p(values[i]);
            if (param == "theta") c.set_theta(values[i]);
            if (param == "tol") c.set_tol(values[i]);
            const auto r = run_experiment(c);
            SweepRow row;
            row.param = param;
            row.value = values[i];
            row.all_passed = r.all_passed;
            const json& rec = r.report.at("recovered");
            std::size_t n = 0;
            double sum = 0.0;
            if (rec.contains("maps"))
               for (const auto& [name, m] : rec.at("maps").items())
                  for (int it : m.at("iterations").get<std::vector<int>>()) {
                     row.max_iterations = std::max(row.max_iterations, it);
                     sum += it;
                     ++n;
                  }
            row.mean_iterations = n ? sum / static_cast<double>(n) : 0.0;
            if (rec.contains("reference_distance")) row.max_reference_distance = rec.at("reference_distance").at("max").get<double>();
            if (r.report.at("bounds").contains("maps"))
               for (const auto& [name, b] : r.report.at("bounds").at("maps").items())
                  row.max_bound_ratio = std::max(row.max_bound_ratio, b.at("max_ratio").get<double>());
            const json& ir = r.report.at("identity_residuals");
            row.identity_residual = ir.contains("max_normalized") && ir.at("max_normalized").is_number()
                                       ? ir.at("max_normalized").get<double>()
                                       : std::numeric_limits<double>::quiet_NaN();
            rows[i] = row;
         } catch (...) {
            std::lock_guard lock(err_mutex);
            if (!first_error) first_error = std::current_exception();
         }
      }
   };
   const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(values.size())));
   std::vector<std::thread> pool;
   for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
   worker();
   for (auto& t : pool) t.join();
   if (first_error) std::rethrow_exception(first_error);
   return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows)
{
   std::ostringstream os;
   os << "param,value,all_passed,max_iterations,mean_iterations,max_reference_distance,max_bound_ratio,identity_residual\n";
   for (const auto& r : rows)
      os << r.param << ',' << detail::format_double(r.value) << ',' << (r.all_passed ? 1 : 0) << ',' << r.max_iterations << ','
         << detail::format_double(r.mean_iterations) << ',' << detail::format_double(r.max_reference_distance) << ','
         << detail::format_double(r.max_bound_ratio) << ',' << detail::format_double(r.identity_residual) << '\n';
   return os.str();
}

} // namespace ternstab

#endif
