#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <ternstab/derivation_solver.hpp>
#include <ternstab/hyers.hpp>
#include <ternstab/hypothesis.hpp>
#include <ternstab/perturbation.hpp>
#include <ternstab/stabilize.hpp>
#include <ternstab/unimodular.hpp>

using namespace ternstab;

namespace {

using Cd = std::complex<double>;
using Args = std::span<const Vector<double>>;

Vector<double> scaled_unit(Eigen::Index d, double r, std::uint64_t seed)
{
   std::mt19937_64 rng(seed);
   Vector<double> v = random_vector<double>(d, rng);
   return v * (r / v.norm());
}

double closed_form(double theta, double p, double r) { return theta * norm_power(r, p) / (1.0 - std::exp2(p - 1.0)); }

// The odd-polynomial self-module with its first exact derivation.
struct OddPolyFixture {
   TernaryModule<double> mod = self_module(build_odd_polynomial_algebra<double>(5));
   LinearMap<double> id = LinearMap<double>::identity(3);
   LinearMap<double> d = solve_exact_derivations(mod, id, id, id, SignConvention()).at(0);
};

} // namespace

TEST(Control, PowerEvaluatesSumOfPowers)
{
   const auto phi = ControlFunction<double>::power(0.5, 0.5, 3);
   const std::vector<Vector<double>> args{scaled_unit(2, 4.0, 1), scaled_unit(2, 9.0, 2), Vector<double>::Zero(2)};
   EXPECT_NEAR(phi(Args(args)), 0.5 * (2.0 + 3.0), 1e-14);
}

TEST(Control, ZeroNormToZeroPowerIsZero)
{
   EXPECT_EQ(norm_power(0.0, 0.0), 0.0);
   EXPECT_EQ(norm_power(4.0, 0.0), 1.0);
   const auto phi = ControlFunction<double>::power(1.0, 0.0, 5);
   const std::vector<Vector<double>> args(5, Vector<double>::Zero(3));
   EXPECT_EQ(phi(Args(args)), 0.0);
}

TEST(Control, ValidatesParameters)
{
   EXPECT_THROW((void)ControlFunction<double>::power(-1.0, 0.5, 5), Error);
   EXPECT_THROW((void)ControlFunction<double>::power(1.0, 1.0, 5), Error);
   EXPECT_THROW((void)ControlFunction<double>::power(1.0, 0.5, 4), Error);
   EXPECT_THROW((void)make_custom_control<double>("nope", 5), Error);
   const auto phi = ControlFunction<double>::power(1.0, 0.5, 5);
   const std::vector<Vector<double>> three(3, Vector<double>::Zero(2));
   EXPECT_THROW((void)phi(Args(three)), Error);
}

TEST(PhiTilde, UnitNormHalfPower)
{
   const auto phi = ControlFunction<double>::power(1.0, 0.5, 5);
   const auto args = diagonal_args(scaled_unit(4, 1.0, 3), 5);
   const auto r = phi_tilde(phi, Args(args));
   EXPECT_TRUE(r.closed_form);
   EXPECT_NEAR(r.value, 2.0 + std::sqrt(2.0), 1e-14);
}

TEST(PhiTilde, ZeroPowerIsTwo)
{
   const auto phi = ControlFunction<double>::power(1.0, 0.0, 5);
   const auto args = diagonal_args(scaled_unit(4, 3.0, 4), 5);
   EXPECT_DOUBLE_EQ(phi_tilde(phi, Args(args)).value, 2.0);
   SeriesOptions numeric;
   numeric.closed_form = false;
   numeric.max_terms = 200;
   EXPECT_NEAR(phi_tilde(phi, Args(args), numeric).value, 2.0, 1e-14);
}

TEST(PhiTilde, ZeroControlIsZero)
{
   const auto phi = make_custom_control<double>("zero", 5);
   const auto args = diagonal_args(scaled_unit(4, 3.0, 5), 5);
   EXPECT_EQ(phi_tilde(phi, Args(args)).value, 0.0);
}

TEST(PhiTilde, TruncatedSumMatchesGeometricRemainder)
{
   // After M terms the numeric sum is closed * (1 - 2^(M (p - 1))), exactly up to rounding.
   for (double p : {0.0, 0.25, 0.5, 0.75}) {
      const auto phi = ControlFunction<double>::power(1.0, p, 5);
      for (double r : {0.3, 1.0, 7.0}) {
         const auto args = diagonal_args(scaled_unit(4, r, 6), 5);
         SeriesOptions numeric;
         numeric.closed_form = false;
         numeric.max_terms = 64;
         const auto got = phi_tilde(phi, Args(args), numeric);
         EXPECT_EQ(got.terms, 64u);
         const double want = closed_form(1.0, p, r) * (1.0 - std::exp2(64.0 * (p - 1.0)));
         EXPECT_NEAR(got.value / want, 1.0, 1e-13) << p << ' ' << r;
      }
   }
}

TEST(PhiTilde, TailDrivenSumConvergesToClosedForm)
{
   for (double p : {0.0, 0.25, 0.5, 0.75}) {
      const auto phi = ControlFunction<double>::power(1.0, p, 5);
      const auto args = diagonal_args(scaled_unit(4, 1.0, 7), 5);
      SeriesOptions numeric;
      numeric.closed_form = false;
      numeric.tail_tol = 1e-14;
      const auto got = phi_tilde(phi, Args(args), numeric);
      EXPECT_NEAR(got.value / closed_form(1.0, p, 1.0), 1.0, 1e-10) << p;
   }
}

TEST(PhiTilde, NonDecayingSeriesIsDivergent)
{
   const auto phi = make_custom_control<double>("linear-sum", 5);
   const auto args = diagonal_args(scaled_unit(4, 1.0, 8), 5);
   try {
      (void)phi_tilde(phi, Args(args));
      FAIL();
   } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::divergent_control);
   }
}

TEST(PhiTilde, CustomSqrtControlSums)
{
   // sqrt-sum is a power control with theta = 1, p = 1/2 in disguise.
   const auto custom = make_custom_control<double>("sqrt-sum", 5);
   const auto power = ControlFunction<double>::power(1.0, 0.5, 5);
   const auto args = diagonal_args(scaled_unit(4, 2.5, 9), 5);
   SeriesOptions so;
   so.tail_tol = 1e-16;
   EXPECT_NEAR(phi_tilde(custom, Args(args), so).value, phi_tilde(power, Args(args)).value, 1e-14);
}

TEST(CauchyTail, StartsAtPhiTildeAndDecays)
{
   const auto phi = ControlFunction<double>::power(1.0, 0.5, 5);
   const auto x = scaled_unit(4, 1.0, 10);
   EXPECT_NEAR(cauchy_tail_bound(phi, x, 0).value, 2.0 + std::sqrt(2.0), 1e-14);
   double prev = cauchy_tail_bound(phi, x, 0).value;
   for (std::size_t q = 1; q < 40; ++q) {
      const double t = cauchy_tail_bound(phi, x, q).value;
      EXPECT_LT(t, prev);
      EXPECT_NEAR(t, (2.0 + std::sqrt(2.0)) * std::exp2(-0.5 * static_cast<double>(q)), 1e-14);
      prev = t;
   }
   const auto zero = ControlFunction<double>::power(0.0, 0.5, 5);
   for (std::size_t q : {0u, 3u, 50u}) EXPECT_EQ(cauchy_tail_bound(zero, x, q).value, 0.0);
}

TEST(CauchyTail, NumericAndClosedFormAgree)
{
   const auto phi = ControlFunction<double>::power(0.3, 0.25, 3);
   const auto x = scaled_unit(3, 5.0, 11);
   SeriesOptions numeric;
   numeric.closed_form = false;
   numeric.tail_tol = 1e-18;
   for (std::size_t q : {0u, 5u, 20u})
      EXPECT_NEAR(cauchy_tail_bound(phi, x, q, numeric).value / cauchy_tail_bound(phi, x, q).value, 1.0, 1e-12);
}

TEST(Perturbation, ZeroThetaIsExact)
{
   std::mt19937_64 rng(12);
   const auto d = LinearMap<double>::random(3, 4, rng);
   for (auto dir : {DirectionKind::fixed, DirectionKind::hashed}) {
      PerturbationSpec<double> spec;
      spec.theta = 0.0;
      spec.direction = dir;
      const auto f = perturb_map(d, spec);
      for (int i = 0; i < 1000; ++i) {
         const auto x = random_vector<double>(4, rng);
         EXPECT_EQ(f(x), d(x));
      }
   }
}

TEST(Perturbation, FixedDirectionMagnitude)
{
   std::mt19937_64 rng(13);
   const auto d = LinearMap<double>::random(3, 3, rng);
   PerturbationSpec<double> spec;
   spec.theta = 0.1;
   spec.p = 0.5;
   spec.seed = 99;
   const auto f = perturb_map(d, spec);
   const auto x = scaled_unit(3, 4.0, 14);
   EXPECT_NEAR((f(x) - d(x)).norm(), 0.2, 1e-15);
   EXPECT_TRUE(f(Vector<double>::Zero(3)).isZero(0.0));
}

TEST(Perturbation, HashedDirectionMagnitudeAndPurity)
{
   std::mt19937_64 rng(15);
   const auto d = LinearMap<double>::random(4, 4, rng);
   PerturbationSpec<double> spec;
   spec.theta = 0.3;
   spec.p = 0.25;
   spec.direction = DirectionKind::hashed;
   spec.seed = 7;
   const auto f = perturb_map(d, spec);
   const auto g = perturb_map(d, spec);
   for (int i = 0; i < 200; ++i) {
      const auto x = random_vector<double>(4, rng);
      const Vector<double> a = f(x), b = g(x);
      EXPECT_EQ(a, b);
      EXPECT_NEAR((a - d(x)).norm(), 0.3 * std::pow(x.norm(), 0.25), 1e-14);
   }
   spec.seed = 8;
   const auto other = perturb_map(d, spec);
   const auto x = random_vector<double>(4, rng);
   EXPECT_NE(f(x), other(x));
}

TEST(Perturbation, ExplicitDirectionIsNormalised)
{
   const auto d = LinearMap<double>::zero(2, 2);
   PerturbationSpec<double> spec;
   spec.theta = 1.0;
   spec.p = 0.5;
   spec.fixed_direction = Vector<double>::Constant(2, 3.0);
   const auto f = perturb_map(d, spec);
   const auto x = scaled_unit(2, 4.0, 16);
   EXPECT_NEAR(f(x)(0), 2.0 / std::sqrt(2.0), 1e-15);
   spec.fixed_direction = Vector<double>::Zero(2);
   EXPECT_THROW((void)perturb_map(d, spec), Error);
   spec.fixed_direction.reset();
   spec.p = 1.0;
   EXPECT_THROW((void)perturb_map(d, spec), Error);
}

TEST(Hyers, ExactLinearStopsImmediately)
{
   std::mt19937_64 rng(17);
   const auto d = LinearMap<double>::random(3, 3, rng);
   const auto f = EvaluableMap<double>::from_linear(d);
   const auto phi = ControlFunction<double>::power(0.0, 0.5, 5);
   const auto x = random_vector<double>(3, rng);
   const auto r = hyers_limit(f, phi, x, HyersOptions<double>{});
   EXPECT_EQ(r.iterations, 0);
   EXPECT_EQ(r.value, d(x));
}

TEST(Hyers, OriginNeedsNoIterations)
{
   const auto f = EvaluableMap<double>::from_linear(LinearMap<double>::identity(2));
   const auto phi = ControlFunction<double>::power(1.0, 0.5, 5);
   const auto r = hyers_limit(f, phi, Vector<double>(Vector<double>::Zero(2)), HyersOptions<double>{});
   EXPECT_EQ(r.iterations, 0);
   EXPECT_TRUE(r.value.isZero(0.0));
}

TEST(Hyers, ErrorFollowsClosedForm)
{
   std::mt19937_64 rng(18);
   const auto d = LinearMap<double>::random(3, 3, rng);
   PerturbationSpec<double> spec;
   spec.theta = 0.1;
   spec.p = 0.5;
   spec.seed = 5;
   const auto f = perturb_map(d, spec);
   const auto phi = ControlFunction<double>::power(0.1, 0.5, 5);
   const auto x = scaled_unit(3, 2.0, 19);
   HyersOptions<double> opts;
   opts.record_trace = true;
   opts.reference = d(x);
   const auto r = hyers_limit(f, phi, x, opts);
   ASSERT_EQ(r.rule, StoppingRule::a_priori);
   ASSERT_EQ(r.trace.size(), static_cast<std::size_t>(r.iterations) + 1);
   for (const auto& t : r.trace) {
      const double want = 0.1 * std::exp2(t.n * -0.5) * std::sqrt(2.0);
      EXPECT_NEAR(t.error, want, 1e-14 + 1e-9 * want) << t.n;
      EXPECT_LE(t.error, t.tail_bound);
   }
   for (std::size_t n = 4; n < r.trace.size(); ++n) EXPECT_NEAR(r.trace[n].error / r.trace[n - 1].error, std::sqrt(0.5), 1e-6);
   EXPECT_LE((r.value - d(x)).norm(), opts.tol);
   EXPECT_GT(r.trace[static_cast<std::size_t>(r.iterations) - 1].tail_bound, opts.tol);
   EXPECT_LE(r.trace.back().tail_bound, opts.tol);
}

TEST(Hyers, IterationCountsScaleWithInverseGap)
{
   std::mt19937_64 rng(20);
   const auto d = LinearMap<double>::random(2, 2, rng);
   const auto x = scaled_unit(2, 1.0, 21);
   const auto count = [&](double p) {
      const auto phi = ControlFunction<double>::power(0.1, p, 5);
      PerturbationSpec<double> spec;
      spec.theta = 0.1;
      spec.p = p;
      return hyers_limit(perturb_map(d, spec), phi, x, HyersOptions<double>{}).iterations;
   };
   // First n with C 2^(n (p - 1)) <= tol, C = theta ||x||^p / (1 - 2^(p - 1)).
   const auto predicted = [](double p) {
      return std::ceil(std::log2(0.1 / (1.0 - std::exp2(p - 1.0)) / 1e-10) / (1.0 - p));
   };
   for (double p : {0.1, 0.5, 0.9}) EXPECT_NEAR(count(p), predicted(p), 1.0) << p;
   EXPECT_NEAR(static_cast<double>(count(0.9)) / count(0.1), 9.0, 1.0);
   int prev = 0;
   for (double p = 0.05; p < 0.96; p += 0.05) {
      const int n = count(p);
      EXPECT_GE(n, prev);
      prev = n;
   }
}

TEST(Hyers, DivergentControlFallsBackToEmpiricalRule)
{
   std::mt19937_64 rng(22);
   const auto d = LinearMap<double>::random(2, 2, rng);
   PerturbationSpec<double> spec;
   spec.theta = 0.1;
   spec.p = 0.5;
   const auto f = perturb_map(d, spec);
   const auto phi = make_custom_control<double>("linear-sum", 5);
   const auto x = scaled_unit(2, 1.0, 23);
   const auto r = hyers_limit(f, phi, x, HyersOptions<double>{});
   EXPECT_EQ(r.rule, StoppingRule::empirical);
   EXPECT_LE((r.value - d(x)).norm(), 1e-9);
}

TEST(Hyers, MaxIterExceededIsReported)
{
   const auto f = EvaluableMap<double>::from_linear(LinearMap<double>::identity(2));
   const auto phi = ControlFunction<double>::power(1.0, 0.5, 5);
   HyersOptions<double> opts;
   opts.max_iter = 5;
   try {
      (void)hyers_limit(f, phi, scaled_unit(2, 1.0, 24), opts);
      FAIL();
   } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::max_iter_exceeded);
   }
   opts.max_iter = 5000;
   const auto r = hyers_limit(f, phi, scaled_unit(2, 1.0, 24), opts);
   EXPECT_TRUE(r.capped);
}

TEST(Unimodular, HalfModulus)
{
   const auto [l1, l2] = unimodular_split(Cd(2.0, 0.0), 4);
   EXPECT_NEAR(l1.real(), 0.5, 1e-15);
   EXPECT_NEAR(l1.imag(), std::sqrt(3.0) / 2.0, 1e-15);
   EXPECT_NEAR(l2.imag(), -std::sqrt(3.0) / 2.0, 1e-15);
}

TEST(Unimodular, NearBoundary)
{
   const auto [l1, l2] = unimodular_split(Cd(0.999 * 7.0, 0.0), 7);
   EXPECT_NEAR(l1.real(), 0.999, 1e-12);
   EXPECT_NEAR(std::abs(l1.imag()), 0.0447, 1e-4);
   EXPECT_NEAR((l1 + l2).real(), 1.998, 1e-12);
}

TEST(Unimodular, RandomPairs)
{
   std::mt19937_64 rng(25);
   std::uniform_real_distribution<double> mod(1e-3, 50.0), ang(-3.2, 3.2);
   for (int i = 0; i < 1000; ++i) {
      const Cd g = std::polar(mod(rng), ang(rng));
      const long n = static_cast<long>(std::ceil(std::abs(g))) + 1;
      const auto [l1, l2] = unimodular_split(g, n);
      EXPECT_LE(std::abs(std::abs(l1) - 1.0), 1e-12);
      EXPECT_LE(std::abs(std::abs(l2) - 1.0), 1e-12);
      EXPECT_LE(std::abs(l1 + l2 - 2.0 * g / static_cast<double>(n)), 1e-12);
   }
}

TEST(Unimodular, RejectsBadInput)
{
   EXPECT_THROW((void)unimodular_split(Cd(0.0, 0.0), 2), Error);
   EXPECT_THROW((void)unimodular_split(Cd(3.0, 0.0), 3), Error);
   EXPECT_THROW((void)unimodular_split(Cd(1.0, 0.0), 0), Error);
}

TEST(Stabilize, ZeroPerturbationRecoversExactly)
{
   OddPolyFixture fx;
   const auto f = EvaluableMap<double>::from_linear(fx.d);
   const auto g = EvaluableMap<double>::from_linear(fx.id);
   const auto phi = make_custom_control<double>("zero", 5);
   StabilizeOptions<double> opts;
   const auto rep = direct_method_stabilize(f, g, g, g, phi, fx.mod, SignConvention(), opts);
   ASSERT_TRUE(rep.passed());
   EXPECT_LE(max_norm_distance(*rep.D.map, fx.d), 1e-12);
   EXPECT_LE(max_norm_distance(*rep.sigma.map, fx.id), 1e-12);
   EXPECT_LE(rep.max_identity_residual, 1e-12);
   for (int n : rep.D.iterations) EXPECT_EQ(n, 0);
}

TEST(Stabilize, PerturbedRunRecoversGroundTruth)
{
   OddPolyFixture fx;
   PerturbationSpec<double> spec;
   spec.theta = 0.1;
   spec.p = 0.5;
   spec.direction = DirectionKind::hashed;
   spec.seed = 3;
   const auto f = perturb_map(fx.d, spec);
   spec.direction = DirectionKind::fixed;
   const auto g = perturb_map(fx.id, spec);
   const auto phi = ControlFunction<double>::power(0.1, 0.5, 5);
   StabilizeOptions<double> opts;
   opts.record_traces = true;
   opts.reference_D = fx.d;
   const auto rep = direct_method_stabilize(f, g, g, g, phi, fx.mod, SignConvention(), opts);
   EXPECT_TRUE(rep.passed());
   EXPECT_LE(max_norm_distance(*rep.D.map, fx.d), 1e-9);
   EXPECT_LE(max_norm_distance(*rep.xi.map, fx.id), 1e-9);
   EXPECT_EQ(rep.D.bound_violations, 0u);
   EXPECT_LT(rep.D.max_bound_ratio, 1.0);
   EXPECT_NEAR(rep.D.convergence_rate, std::sqrt(0.5), 0.05 * std::sqrt(0.5));
   EXPECT_LE(rep.max_identity_residual, 1e-8);
   EXPECT_EQ(rep.lie_jordan_discrepancy, 0.0);
   EXPECT_EQ(rep.sample_norms.size(), 100u);
}

TEST(Stabilize, JordanModeUsesArityThree)
{
   OddPolyFixture fx;
   PerturbationSpec<double> spec;
   spec.theta = 0.05;
   spec.p = 0.25;
   const auto f = perturb_map(fx.d, spec);
   const auto g = perturb_map(fx.id, spec);
   const auto phi = ControlFunction<double>::power(0.05, 0.25, 3);
   StabilizeOptions<double> opts;
   opts.mode = DerivationMode::jordan;
   const auto rep = direct_method_stabilize(f, g, g, g, phi, fx.mod, SignConvention(), opts);
   EXPECT_TRUE(rep.passed());
   EXPECT_LE(rep.max_identity_residual, 1e-8);
}

TEST(Stabilize, RejectsMapsNonzeroAtOrigin)
{
   OddPolyFixture fx;
   const auto f = EvaluableMap<double>(3, 3, MapKind::custom, [](const Vector<double>& x) { return Vector<double>(x.array() + 1.0); });
   const auto g = EvaluableMap<double>::from_linear(fx.id);
   try {
      (void)direct_method_stabilize(f, g, g, g, ControlFunction<double>::power(0.1, 0.5, 5), fx.mod, SignConvention(),
                                    StabilizeOptions<double>{});
      FAIL();
   } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::nonzero_at_origin);
   }
}

TEST(Stabilize, ComplexHomogeneity)
{
   const auto mod = self_module(build_odd_polynomial_algebra<Cd>(5));
   const auto id = LinearMap<Cd>::identity(3);
   const auto d = solve_exact_derivations(mod, id, id, id, SignConvention()).at(1);
   PerturbationSpec<Cd> spec;
   spec.theta = 0.1;
   spec.p = 0.5;
   spec.direction = DirectionKind::hashed;
   const auto f = perturb_map(d, spec);
   const auto g = perturb_map(id, spec);
   const auto rep = direct_method_stabilize(f, g, g, g, ControlFunction<Cd>::power(0.1, 0.5, 5), mod, SignConvention(),
                                            StabilizeOptions<Cd>{});
   ASSERT_TRUE(rep.homogeneity_defect);
   EXPECT_TRUE(rep.homogeneity_ok()) << *rep.homogeneity_defect << " vs " << rep.homogeneity_threshold;
   EXPECT_TRUE(rep.passed());
   EXPECT_LE(max_norm_distance(*rep.D.map, d), 1e-9);
}

TEST(Hypothesis, ExactDataHasNoResidual)
{
   const auto mod = self_module(build_odd_polynomial_algebra<double>(7));
   const auto id = LinearMap<double>::identity(4);
   const auto sg = SignConvention::stability_proof();
   const auto basis = solve_exact_derivations(mod, id, id, id, sg);
   ASSERT_FALSE(basis.empty());
   const auto f = EvaluableMap<double>::from_linear(basis[0]);
   const auto g = EvaluableMap<double>::from_linear(id);
   const auto rep = check_hypothesis(f, g, g, g, make_custom_control<double>("zero", 5), mod, sg, DerivationMode::lie, 8, 50, 1);
   EXPECT_EQ(rep.total_violations(), 0u);
   EXPECT_LE(rep.main.max_residual, 1e-10);
   EXPECT_EQ(rep.main.evaluated, 100u);
   const auto jr = check_hypothesis(f, g, g, g, make_custom_control<double>("zero", 3), mod, sg, DerivationMode::jordan, 8, 50, 1);
   EXPECT_EQ(jr.total_violations(), 0u);
}

TEST(Hypothesis, PerturbationViolationsAreReportedNotThrown)
{
   OddPolyFixture fx;
   PerturbationSpec<double> spec;
   spec.theta = 0.1;
   spec.p = 0.5;
   const auto f = perturb_map(fx.d, spec);
   const auto g = perturb_map(fx.id, spec);
   const auto rep = check_hypothesis(f, g, g, g, ControlFunction<double>::power(0.1, 0.5, 5), fx.mod, SignConvention(),
                                     DerivationMode::lie, 4, 30, 2);
   EXPECT_GT(rep.g.violations, 0u);
   EXPECT_EQ(rep.g.worst_points.size(), 5u);
   EXPECT_LT(rep.g.min_slack, 0.0);
}

TEST(Hypothesis, ArityMustMatchMode)
{
   OddPolyFixture fx;
   const auto f = EvaluableMap<double>::from_linear(fx.d);
   const auto g = EvaluableMap<double>::from_linear(fx.id);
   EXPECT_THROW((void)check_hypothesis(f, g, g, g, ControlFunction<double>::power(0.1, 0.5, 3), fx.mod, SignConvention(),
                                       DerivationMode::lie, 4, 3, 1),
                Error);
}

TEST(Hypothesis, ComplexGridIsUnitCircle)
{
   const auto grid = unit_circle_grid<Cd>(16);
   ASSERT_EQ(grid.size(), 16u);
   for (const auto& l : grid) EXPECT_NEAR(std::abs(l), 1.0, 1e-15);
   EXPECT_EQ(unit_circle_grid<double>(16).size(), 2u);
}
