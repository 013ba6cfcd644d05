#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pcnrm/error.h"
#include "pcnrm/generators.h"
#include "pcnrm/simulator.h"

namespace pcnrm {
namespace {

constexpr int kU = 0, kV = 1, kW = 2;

Instance Running() { return ValidateOrThrow(RunningExampleSpec()); }

Offer Set(std::initializer_list<int> products) {
  return Offer::FromProducts(3, std::vector<int>(products));
}

ClosingTimes RoundedClosings() { return ClosingTimes{{0.0, 0.370, 0.832}}; }

TEST(Policy, ClosingExample) {
  const Instance inst = Running();
  const Policy pc = Policy::ProductClosing(RoundedClosings());
  EXPECT_EQ(pc.Available(inst, {0.5, {1, 1}, {0, 0, 0}}), Set({kW}));
  EXPECT_EQ(pc.Available(inst, {0.2, {1, 1}, {0, 0, 0}}), Set({kV, kW}));
  EXPECT_EQ(pc.Available(inst, {0.9, {1, 1}, {0, 0, 0}}), Set({}));
}

TEST(Policy, BookingLimitExample) {
  const Instance inst = Running();
  const Policy pb = Policy::BookingLimits({0, 1, 1});
  EXPECT_EQ(pb.Available(inst, {0.1, {1, 1}, {0, 1, 0}}), Set({kW}));
  EXPECT_EQ(pb.Available(inst, {0.1, {1, 1}, {0, 0, 0}}), Set({kV, kW}));
}

TEST(Policy, BookingLimitRounding) {
  const Policy floor = Policy::BookingLimits({0.999999999999, 1.5, 2.0});
  EXPECT_EQ(floor.limits(), (std::vector<int>{1, 1, 2}));
  int ups = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const Policy p = Policy::BookingLimits({1.5, 3.0}, LimitRounding::kProbabilistic, seed);
    EXPECT_TRUE(p.limits()[0] == 1 || p.limits()[0] == 2);
    EXPECT_EQ(p.limits()[1], 3);
    ups += p.limits()[0] == 2;
  }
  EXPECT_NEAR(ups / 2000.0, 0.5, 3 * std::sqrt(0.25 / 2000));
  EXPECT_THROW(Policy::BookingLimits({-1.0}), Error);
}

TEST(Policy, EmptyCapacityOffersNothing) {
  const Instance inst = Running();
  const PolicyState zero{0.1, {0, 0}, {0, 0, 0}};
  EXPECT_TRUE(Policy::ProductClosing(RoundedClosings()).Available(inst, zero).empty());
  EXPECT_TRUE(Policy::BookingLimits({5, 5, 5}).Available(inst, zero).empty());
  EXPECT_TRUE(Policy::OfferAll(3).Available(inst, zero).empty());
  OfferDurations d{{Offer::All(3), 1.0}};
  EXPECT_TRUE(OpFromDurations(d).Available(inst, zero).empty());
  auto model = std::make_shared<BidPriceModel>(SolveDecomposition(inst, {11.25, 20.0}));
  EXPECT_TRUE(Policy::OfferDynamic(model).Available(inst, zero).empty());
  auto table = std::make_shared<ValueTable>(SolveExactDp(inst));
  EXPECT_TRUE(Policy::ExactDp(table).Available(inst, zero).empty());
}

TEST(Policy, OfferPeriods) {
  const Instance inst = Running();
  const PolicyState s{0.3, {1, 1}, {0, 0, 0}};
  EXPECT_TRUE(OpFromDurations({}).Available(inst, s).empty());
  const Policy all = OpFromDurations({{Offer::All(3), 1.0}});
  EXPECT_EQ(all.Available(inst, s), Offer::All(3));
  EXPECT_EQ(all.Available(inst, {0.999, {1, 1}, {0, 0, 0}}), Offer::All(3));

  // The two CDLP offers of the running example, in both orders.
  const OfferDurations d{{Set({kV, kW}), 1 / 2.7}, {Set({kW}), 1 / 2.16}};
  const Policy lex = OpFromDurations(d);
  ASSERT_EQ(lex.periods().size(), 2u);
  EXPECT_EQ(lex.periods()[0].offer, Set({kW}));
  EXPECT_NEAR(lex.periods()[0].end, 1 / 2.16, 1e-15);
  EXPECT_NEAR(lex.periods()[1].end, 1 / 2.16 + 1 / 2.7, 1e-15);
  const Policy given = OpFromDurations(d, OfferOrder::kGiven, {Set({kV, kW}), Set({kW})});
  EXPECT_EQ(given.Available(inst, {0.2, {1, 1}, {0, 0, 0}}), Set({kV, kW}));
  EXPECT_EQ(given.Available(inst, {0.5, {1, 1}, {0, 0, 0}}), Set({kW}));
  EXPECT_TRUE(given.Available(inst, {0.9, {1, 1}, {0, 0, 0}}).empty());
  EXPECT_THROW(OpFromDurations(d, OfferOrder::kGiven, {Set({kW})}), Error);

  bool seen_both = false;
  for (std::uint64_t seed = 0; seed < 20 && !seen_both; ++seed) {
    const Policy r = OpFromDurations(d, OfferOrder::kRandom, {}, seed);
    seen_both = r.periods()[0].offer == Set({kV, kW});
  }
  EXPECT_TRUE(seen_both);
}

TEST(Policy, NoReopening) {
  EXPECT_TRUE(NoReopeningCheck({}));
  EXPECT_TRUE(NoReopeningCheck({{0.1, Set({kV, kW})}, {0.5, Set({kV, kW})}}));
  EXPECT_FALSE(NoReopeningCheck({{0.1, Set({kW})}, {0.6, Set({kV, kW})}}));
  EXPECT_TRUE(NoReopeningCheck({{0.1, Set({kV, kW})}, {0.6, Set({kW})}, {0.9, Set({})}}));

  // Any PC policy trace, sampled at random times and capacities.
  const Instance inst = Running();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Policy pc = Policy::ProductClosing(ClosingTimes{{unif(rng), unif(rng), unif(rng)}});
    std::vector<double> times(8);
    for (double& t : times) t = unif(rng);
    std::sort(times.begin(), times.end());
    OfferTrace trace;
    std::vector<int> x{1, 1};
    for (double t : times) {
      trace.emplace_back(t, pc.Available(inst, {t, x, {0, 0, 0}}));
      if (unif(rng) < 0.2) x[rng() % 2] = 0;
    }
    EXPECT_TRUE(NoReopeningCheck(trace));
  }
}

TEST(Arrivals, PoissonCount) {
  const Instance inst = Running();
  const int reps = 100000;
  double sum = 0.0;
  for (int r = 0; r < reps; ++r) sum += GenerateArrivals(inst, 1.0, 42, r).size();
  EXPECT_NEAR(sum / reps, 3.0, 3 * std::sqrt(3.0 / reps));
  EXPECT_TRUE(GenerateArrivals(inst, 0.0, 42, 0).empty());
  EXPECT_THROW(GenerateArrivals(inst, -1.0, 42, 0), Error);
}

TEST(Arrivals, SubstreamsAreStable) {
  InstanceSpec spec = RunningExampleSpec();
  const Instance one = ValidateOrThrow(spec);
  spec.segments.push_back({"extra", 2.0, {"w"}, {}});
  const Instance two = ValidateOrThrow(spec);
  for (int r = 0; r < 50; ++r) {
    const auto a = GenerateArrivals(one, 1.0, 9, r);
    std::vector<Arrival> b;
    for (const Arrival& x : GenerateArrivals(two, 1.0, 9, r)) {
      if (x.segment == 0) b.push_back(x);
    }
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      EXPECT_EQ(a[k].time, b[k].time);
      EXPECT_EQ(a[k].depth, b[k].depth);
    }
  }
}

TEST(Simulate, UncapacitatedFirstChoice) {
  const Instance inst = Running().WithCapacities({1000, 1000});
  SimConfig cfg;
  cfg.evaluations = 10000;
  cfg.seed = 11;
  const SimResult res = Simulate(inst, Policy::OfferAll(3), cfg);
  // Offering everything, every arrival buys u: Poisson(3) sales.
  EXPECT_NEAR(res.mean_sales[kU], 3.0, 3 * std::sqrt(3.0 / cfg.evaluations));
  EXPECT_EQ(res.mean_sales[kV], 0.0);
}

TEST(Simulate, NoArrivals) {
  const Instance inst = Running();
  SimConfig cfg;
  cfg.evaluations = 50;
  cfg.rate_multiplier = 0.0;
  const SimResult res = Simulate(inst, Policy::OfferAll(3), cfg);
  EXPECT_EQ(res.mean_revenue, 0.0);
  EXPECT_EQ(res.cf_remaining, 1.0);
  EXPECT_EQ(res.cf_consumed, 0.0);
  EXPECT_EQ(res.half_width, 0.0);
}

// Exact E[R] of the closing policy (0, a, b) on the running example: v sells
// at rate 2.7 on [0, a); w sells at rate 2.16 from the earlier of v's sale
// and a, until b.
double ClosingPolicyRevenue(double a, double b) {
  const double pv = 1 - std::exp(-2.7 * a);
  double pw = std::exp(-2.7 * a) * (1 - std::exp(-2.16 * (b - a)));
  const int steps = 200000;
  const double h = a / steps;
  for (int k = 0; k < steps; ++k) {
    const double s = (k + 0.5) * h;
    pw += h * 2.7 * std::exp(-2.7 * s) * (1 - std::exp(-2.16 * (b - s)));
  }
  return 25 * pv + 40 * pw;
}

TEST(Simulate, ClosingPolicyMatchesClosedForm) {
  const Instance inst = Running();
  SimConfig cfg;
  cfg.evaluations = 3000;
  const SimResult res = Simulate(inst, Policy::ProductClosing(RoundedClosings()), cfg);
  const double exact = ClosingPolicyRevenue(0.370, 0.832);
  EXPECT_NEAR(res.mean_revenue, exact, 3 * res.sd_revenue / std::sqrt(3000.0));
  EXPECT_LT(res.mean_revenue, 65.0);
  DpOptions dp;
  dp.dt = 1.0 / 300;
  EXPECT_LT(exact, SolveExactDp(inst, dp).Value(0, {1, 1}));
  EXPECT_TRUE(res.ci_valid);
  EXPECT_GE(res.cf_consumed, 0.0);
  EXPECT_LE(res.cf_consumed, 1.0);
}

TEST(Simulate, DeterministicAcrossThreads) {
  std::mt19937_64 rng(2);
  const Instance inst = ValidateOrThrow(RandomInstance(rng));
  SimConfig cfg;
  cfg.evaluations = 301;
  cfg.threads = 1;
  const SimResult a = Simulate(inst, Policy::OfferAll(inst.num_products()), cfg);
  cfg.threads = 7;
  const SimResult b = Simulate(inst, Policy::OfferAll(inst.num_products()), cfg);
  EXPECT_EQ(a.revenues, b.revenues);
  EXPECT_EQ(a.mean_revenue, b.mean_revenue);
}

TEST(Simulate, BookingLimitsRespected) {
  const Instance inst = Running().WithCapacities({5, 5});
  SimConfig cfg;
  cfg.evaluations = 500;
  cfg.rate_multiplier = 4.0;
  const Policy pb = Policy::BookingLimits({1.0, 2.0, 3.0});
  const SimResult res = Simulate(inst, pb, cfg);
  for (int j = 0; j < 3; ++j) EXPECT_LE(res.mean_sales[j], pb.limits()[j] + 1e-12);
}

TEST(Simulate, CapacityNeverNegative) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Instance inst = ValidateOrThrow(RandomInstance(rng));
    SimConfig cfg;
    cfg.evaluations = 40;
    cfg.rate_multiplier = 5.0;
    const SimResult res = Simulate(inst, Policy::OfferAll(inst.num_products()), cfg);
    // Resource usage implied by mean sales cannot exceed capacity.
    for (int i = 0; i < inst.num_resources(); ++i) {
      double used = 0.0;
      for (int j : inst.resource_products(i)) used += res.mean_sales[j];
      EXPECT_LE(used, inst.capacities()[i] + 1e-9);
    }
    EXPECT_GE(res.cf_remaining, 0.0);
  }
}

TEST(Simulate, ReoptimizingWithoutCheckpointsIsStatic) {
  const Instance inst = Running();
  const ApproxSolution sol = SolvePcmp(inst);
  const Policy pc = BuildPolicy(inst, sol, PolicyKind::kPc);
  SimConfig cfg;
  cfg.evaluations = 400;
  cfg.keep_traces = true;
  const SimResult a = Simulate(inst, pc, cfg);
  const SimResult b = SimulateReoptimizing(
      inst, pc, MakeReoptimizer(ApproxKind::kPcmp, PolicyKind::kPc, {}, {}), cfg);
  EXPECT_EQ(a.revenues, b.revenues);
  ASSERT_EQ(a.traces.size(), b.traces.size());
  for (std::size_t r = 0; r < a.traces.size(); ++r) {
    ASSERT_EQ(a.traces[r].size(), b.traces[r].size());
    for (std::size_t k = 0; k < a.traces[r].size(); ++k) {
      EXPECT_EQ(a.traces[r][k].second, b.traces[r][k].second);
    }
  }
}

TEST(Simulate, ReoptimizingKeepsClosedProductsClosed) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const Instance inst = ValidateOrThrow(RandomInstance(rng)).WithLoadFactor(1.3);
    const ApproxSolution sol = SolvePcmp(inst);
    SimConfig cfg;
    cfg.evaluations = 60;
    cfg.checkpoints = {0.25, 0.5, 0.75};
    cfg.keep_traces = true;
    const SimResult res = SimulateReoptimizing(
        inst, BuildPolicy(inst, sol, PolicyKind::kPc),
        MakeReoptimizer(ApproxKind::kPcmp, PolicyKind::kPc, {}, {}), cfg);
    for (const OfferTrace& trace : res.traces) EXPECT_TRUE(NoReopeningCheck(trace));
  }
}

TEST(Simulate, RejectsBadConfig) {
  const Instance inst = Running();
  SimConfig cfg;
  cfg.evaluations = 0;
  EXPECT_THROW(Simulate(inst, Policy::OfferAll(3), cfg), Error);
  cfg.evaluations = 5;
  cfg.checkpoints = {0.5, 0.4};
  EXPECT_THROW(Simulate(inst, Policy::OfferAll(3), cfg), Error);
  cfg.checkpoints = {1.0};
  EXPECT_THROW(Simulate(inst, Policy::OfferAll(3), cfg), Error);
}

TEST(BuildPolicy, ClosingFromReopeningCdlpIsRefused) {
  const Instance inst = Running();
  ApproxSolution sol;
  sol.durations = {{Set({kW}), 0.4}, {Set({kV, kW}), 0.3}};
  sol.sales = {0, 0, 0};
  // Lexicographic map order puts {w} before {v,w}: not a closing chain in
  // this order, but the chain by size exists, so it converts.
  EXPECT_NO_THROW(BuildPolicy(inst, sol, PolicyKind::kPc));
  sol.durations = {{Set({kU}), 0.4}, {Set({kV, kW}), 0.3}};
  EXPECT_THROW(BuildPolicy(inst, sol, PolicyKind::kPc), Error);
}

TEST(Compare, RunningExampleGrid) {
  const Instance inst = Running();
  CompareConfig cfg;
  cfg.sim.evaluations = 400;
  cfg.include_dp = true;
  cfg.deterministic = true;
  const auto rows = Compare(inst, cfg);
  EXPECT_EQ(rows.size(), 4u * 4u + 1u);
  bool pcmp_pc = false, cdlp_op = false;
  for (const BenchRow& r : rows) {
    if (r.approximation == "PCMP" && r.policy == "PC") {
      pcmp_pc = r.ok;
      EXPECT_NEAR(r.objective, 65.0, 1e-6);
    }
    if (r.approximation == "CDLP" && r.policy == "OP") {
      cdlp_op = r.ok;
      EXPECT_NEAR(r.objective, 65.0, 1e-6);
      EXPECT_NEAR(r.delta_revenue_pct, 0.0, 1e-12);
    }
  }
  EXPECT_TRUE(pcmp_pc);
  EXPECT_TRUE(cdlp_op);
  EXPECT_EQ(BenchCsv(rows, 1.0), BenchCsv(Compare(inst, cfg), 1.0));
  EXPECT_NE(BenchText(rows, 1.0).find("PCMP"), std::string::npos);

  CompareConfig one;
  one.approximations = {ApproxKind::kPcmp};
  one.policies = {PolicyKind::kPc};
  one.sim.evaluations = 50;
  EXPECT_EQ(Compare(inst, one).size(), 1u);
}

TEST(Compare, FailuresBecomeCells) {
  const Instance inst = Running();
  CompareConfig cfg;
  cfg.approximations = {ApproxKind::kCdlp};
  cfg.policies = {PolicyKind::kOd};
  cfg.policy.dp.enumeration_limit = 1;
  cfg.sim.evaluations = 10;
  const auto rows = Compare(inst, cfg);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_FALSE(rows[0].ok);
  EXPECT_EQ(rows[0].reason, "cap");
  EXPECT_NE(BenchCsv(rows, 1.0).find("n/a(cap)"), std::string::npos);
}

}  // namespace
}  // namespace pcnrm
