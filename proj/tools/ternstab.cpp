// Command-line front end: algebra checks, derivation solving, stabilization runs and sweeps.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <ternstab/ternstab.hpp>

namespace {

using namespace ternstab;

constexpr int kExitFailedChecks = 1;
constexpr int kExitUsage = 2;

struct GlobalFlags {
   std::optional<std::uint64_t> seed;
   std::optional<double> tol;
   std::string out = "ternstab_out";
   std::string sign;
};

SignConvention parse_signs(const std::string& text)
{
   std::stringstream ss(text);
   std::string tok;
   std::array<int, 3> s{};
   std::size_t n = 0;
   while (std::getline(ss, tok, ',')) {
      if (n == 3) throw Error(ErrorCode::invalid_argument, "--sign takes exactly three values");
      if (tok == "+" || tok == "+1" || tok == "1")
         s[n++] = 1;
      else if (tok == "-" || tok == "-1")
         s[n++] = -1;
      else
         throw Error(ErrorCode::invalid_argument, "--sign entries must be +1 or -1, got '" + tok + "'");
   }
   if (n != 3) throw Error(ErrorCode::invalid_argument, "--sign takes exactly three values");
   return SignConvention(s[0], s[1], s[2]);
}

ExperimentConfig load_with_overrides(const std::string& path, const GlobalFlags& g)
{
   ExperimentConfig c = load_experiment_config(path);
   if (g.seed) c.set_seed(*g.seed);
   if (g.tol) c.set_tol(*g.tol);
   if (!g.sign.empty()) c.set_signs(parse_signs(g.sign));
   return c;
}

struct AlgebraArgs {
   std::string file;
   std::string builder;
   long m = 2;
   long cap = 3;
   long side = 2;
   std::string field = "real";
   bool rescale = false;
   std::size_t samples = 1000;
};

template <FieldScalar S>
int algebra_check(const AlgebraArgs& a, const GlobalFlags& g)
{
   const double tol = g.tol.value_or(1e-12);
   const std::uint64_t seed = g.seed.value_or(42);
   TernaryAlgebra<S> alg = [&] {
      if (!a.file.empty()) return algebra_from_json<S>(read_json_file(a.file));
      if (a.builder == "trivial-matrix") return build_trivial_from_matrices<S>(static_cast<std::size_t>(a.m));
      if (a.builder == "odd-polynomial") return build_odd_polynomial_algebra<S>(a.cap);
      if (a.builder == "cubic-matrix") return build_cubic_matrix_algebra<S>(static_cast<std::size_t>(a.side));
      throw Error(ErrorCode::invalid_argument, "need an algebra file or --builder trivial-matrix|odd-polynomial|cubic-matrix");
   }();
   if (a.rescale) alg = rescale_norm_submultiplicative(alg, a.samples, seed);

   const EnumerationBudget budget{1'000'000, 100'000, seed};
   const auto assoc = check_ternary_associativity(alg, tol, budget);
   const auto mod = check_module_axioms(self_module(alg), tol, a.samples, seed, budget);
   const auto nrm = check_norm_inequality(alg, a.samples, seed ^ 0x5a5aULL);
   json chains = json::array();
   for (double r : mod.chain_residual) chains.push_back(r);
   const bool ok = assoc.passed && mod.passed && nrm.passed;
   const json rep{{"dim", alg.dim()},
                  {"field", std::string(to_string(field_of_v<S>))},
                  {"norm_scale", alg.norm_scale()},
                  {"associativity",
                   {{"max_residual", assoc.max_residual}, {"exhaustive", assoc.exhaustive}, {"tuples", assoc.tuples_checked}, {"passed", assoc.passed}}},
                  {"module", {{"chain_residuals", chains}, {"norm_max_ratio", mod.norm_max_ratio}, {"passed", mod.passed}}},
                  {"norm", {{"max_ratio", nrm.max_ratio}, {"samples", nrm.samples}, {"passed", nrm.passed}}},
                  {"passed", ok}};
   std::cout << rep.dump(2) << '\n';
   std::cerr << (ok ? "pass" : "FAIL") << ", associativity residual " << assoc.max_residual << '\n';
   return ok ? 0 : kExitFailedChecks;
}

int run_stabilize(const std::string& config, const GlobalFlags& g)
{
   const ExperimentConfig c = load_with_overrides(config, g);
   const ExperimentResult r = run_experiment(c);
   write_experiment_outputs(r, g.out, c.report_name);
   const std::filesystem::path report = std::filesystem::path(g.out) / c.report_name;
   std::cout << "report: " << report.string() << '\n';
   for (const auto& e : r.report.at("errors")) std::cerr << "error[" << e.at("code").get<std::string>() << "]: " << e.at("message").get<std::string>() << '\n';
   std::cout << "all_passed: " << (r.all_passed ? "true" : "false") << '\n';
   return r.all_passed ? 0 : kExitFailedChecks;
}

int run_sweep_cmd(const std::string& config, const std::string& param, const GlobalFlags& g)
{
   const ExperimentConfig c = load_with_overrides(config, g);
   std::string name;
   const auto values = parse_sweep_range(param, name);
   const auto rows = run_sweep(c, name, values);
   const std::string csv = sweep_csv(rows);
   std::error_code ec;
   std::filesystem::create_directories(g.out, ec);
   write_text_file((std::filesystem::path(g.out) / "sweep.csv").string(), csv);
   std::cout << csv;
   const bool ok = std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.all_passed; });
   return ok ? 0 : kExitFailedChecks;
}

} // namespace

int main(int argc, char** argv)
{
   CLI::App app{"ternstab: stability of Lie ternary (sigma,tau,xi)-derivations, numerically"};
   app.require_subcommand(1);
   GlobalFlags g;
   app.add_option("--seed", g.seed, "override the configured seed");
   app.add_option("--tol", g.tol, "override the Hyers tolerance (axiom tolerance for algebra check)");
   app.add_option("--out", g.out, "output directory")->capture_default_str();
   app.add_option("--sign", g.sign, "sign convention s1,s2,s3 with entries +1 or -1");

   auto* algebra = app.add_subcommand("algebra", "algebra utilities");
   algebra->require_subcommand(1);
   auto* check = algebra->add_subcommand("check", "associativity, module axioms and norm report");
   AlgebraArgs aa;
   check->add_option("file", aa.file, "algebra JSON file");
   check->add_option("--builder", aa.builder, "trivial-matrix | odd-polynomial | cubic-matrix");
   check->add_option("--m", aa.m, "matrix side for trivial-matrix");
   check->add_option("--cap", aa.cap, "odd degree cap for odd-polynomial");
   check->add_option("--side", aa.side, "side for cubic-matrix");
   check->add_option("--field", aa.field, "real | complex");
   check->add_flag("--rescale", aa.rescale, "rescale the norm to be submultiplicative first");
   check->add_option("--samples", aa.samples, "norm samples");

   auto* derive = app.add_subcommand("derive", "derivation spaces");
   derive->require_subcommand(1);
   auto* solve = derive->add_subcommand("solve", "print a basis of exact derivations for a config");
   std::string derive_config;
   solve->add_option("config", derive_config, "experiment config")->required();

   auto* stabilize = app.add_subcommand("stabilize", "full stabilization run");
   std::string stab_config;
   stabilize->add_option("config", stab_config, "experiment config")->required();

   auto* experiment = app.add_subcommand("experiment", "experiments");
   experiment->require_subcommand(1);
   auto* sweep = experiment->add_subcommand("sweep", "parameter sweep, one CSV row per point");
   std::string sweep_config, sweep_param;
   sweep->add_option("config", sweep_config, "experiment config")->required();
   sweep->add_option("--param", sweep_param, "name=start:stop:step, name in {p, theta, tol}")->required();

   // Global flags may appear after the subcommand too.
   for (auto* sub : {algebra, check, derive, solve, stabilize, experiment, sweep}) sub->fallthrough();

   try {
      app.parse(argc, argv);
   } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
   } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e);
   } catch (const CLI::ParseError& e) {
      std::cerr << "error: " << e.what() << "\n\n" << app.help();
      return kExitUsage;
   }

   try {
      if (*check) {
         const Field f = field_from_string(aa.field);
         return f == Field::real ? algebra_check<double>(aa, g) : algebra_check<std::complex<double>>(aa, g);
      }
      if (*solve) {
         std::cout << derivation_space_report(load_with_overrides(derive_config, g)).dump(2) << '\n';
         return 0;
      }
      if (*stabilize) return run_stabilize(stab_config, g);
      if (*sweep) return run_sweep_cmd(sweep_config, sweep_param, g);
   } catch (const Error& e) {
      std::cerr << "error[" << to_string(e.code()) << "]: " << e.what() << '\n';
      return e.code() == ErrorCode::invalid_argument || e.code() == ErrorCode::io_error ? kExitUsage : kExitFailedChecks;
   } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitUsage;
   }
   return kExitUsage;
}
