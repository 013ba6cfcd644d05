#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pcnrm/choice.h"
#include "pcnrm/dp.h"
#include "pcnrm/error.h"
#include "pcnrm/generators.h"

namespace pcnrm {
namespace {

constexpr int kU = 0, kV = 1, kW = 2;

Instance Running() { return ValidateOrThrow(RunningExampleSpec()); }

InstanceSpec SingleProduct(double rate, double reach, double fare, int capacity) {
  InstanceSpec spec;
  spec.resources = {{"leg", capacity}};
  spec.products = {{"a", fare, {"leg"}}, {"b", 1.0, {"leg"}}};
  spec.segments = {{"s", rate, {"b", "a"}, {reach}}};
  spec.horizon = 1.0;
  return spec;
}

// Enumerates every state of the table.
std::vector<std::vector<int>> AllStates(const std::vector<int>& caps) {
  std::vector<std::vector<int>> out{{}};
  for (int c : caps) {
    std::vector<std::vector<int>> next;
    for (const auto& prefix : out) {
      for (int x = 0; x <= c; ++x) {
        next.push_back(prefix);
        next.back().push_back(x);
      }
    }
    out = std::move(next);
  }
  return out;
}

// Straightforward recursion over all subsets, used as an oracle.
double BruteValue(const Instance& inst, int steps, double dt, std::vector<int> x) {
  const auto states = AllStates(inst.capacities());
  auto index = [&](const std::vector<int>& y) {
    return std::find(states.begin(), states.end(), y) - states.begin();
  };
  std::vector<double> next(states.size(), 0.0), cur(states.size(), 0.0);
  const int n = inst.num_products();
  for (int s = steps - 1; s >= 0; --s) {
    for (std::size_t k = 0; k < states.size(); ++k) {
      const Offer avail = AvailableProducts(inst, states[k]);
      double best = 0.0;
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        const Offer offer = Offer::FromMask(n, mask);
        if (!offer.IsSubsetOf(avail)) continue;
        const std::vector<double> rates = SalesRates(inst, offer);
        double gain = 0.0;
        for (int j : offer.products()) {
          std::vector<int> y = states[k];
          for (int i : inst.product_resources(j)) --y[i];
          gain += rates[j] * (inst.fare(j) - (next[k] - next[index(y)]));
        }
        best = std::max(best, gain);
      }
      cur[k] = next[k] + dt * best;
    }
    std::swap(cur, next);
  }
  return next[index(x)];
}

TEST(ExactDp, OneStepExpectation) {
  const Instance inst = ValidateOrThrow(SingleProduct(0.05, 0.7, 10.0, 1));
  DpOptions opts;
  opts.dt = 1.0;
  const ValueTable table = SolveExactDp(inst, opts);
  ASSERT_EQ(table.steps(), 1);
  // Offering "a" alone: the customer skips "b" and buys "a" with probability 0.7.
  EXPECT_NEAR(table.Value(0, {1}), 0.05 * 0.7 * 10.0, 1e-12);
  EXPECT_TRUE(table.BestOffer(0, {1}).contains(0));
  EXPECT_FALSE(table.BestOffer(0, {1}).contains(1));
}

TEST(ExactDp, DefaultStepKeepsArrivalsRare) {
  const Instance inst = Running();
  const double dt = DefaultTimeStep(inst);
  EXPECT_LE(inst.total_rate() * dt, 0.1 + 1e-12);
  EXPECT_NEAR(dt, 1.0 / 30.0, 1e-15);
}

TEST(ExactDp, ZeroStateAndMonotonicity) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const Instance inst = ValidateOrThrow(RandomInstance(rng));
    const ValueTable table = SolveExactDp(inst);
    const std::vector<int> zero(inst.num_resources(), 0);
    for (int s = 0; s <= table.steps(); ++s) EXPECT_EQ(table.Value(s, zero), 0.0);
    for (const auto& x : AllStates(inst.capacities())) {
      EXPECT_EQ(table.Value(table.steps(), x), 0.0);
      for (int s = 0; s < table.steps(); ++s) {
        EXPECT_GE(table.Value(s, x), table.Value(s + 1, x) - 1e-12);
      }
      for (int i = 0; i < inst.num_resources(); ++i) {
        if (x[i] == inst.capacities()[i]) continue;
        std::vector<int> y = x;
        ++y[i];
        EXPECT_GE(table.Value(0, y), table.Value(0, x) - 1e-12);
      }
    }
  }
}

TEST(ExactDp, MatchesSubsetRecursion) {
  std::mt19937_64 rng(5);
  RandomInstanceShape shape;
  shape.max_products = 4;
  shape.max_capacity = 2;
  for (int trial = 0; trial < 10; ++trial) {
    const Instance inst = ValidateOrThrow(RandomInstance(rng, shape));
    DpOptions opts;
    opts.dt = inst.horizon() / 12;
    const ValueTable table = SolveExactDp(inst, opts);
    EXPECT_NEAR(table.Value(0, inst.capacities()),
                BruteValue(inst, 12, table.dt(), inst.capacities()), 1e-9);
  }
}

TEST(ExactDp, RunningExampleBelowFluidBound) {
  const Instance inst = Running();
  DpOptions opts;
  opts.dt = 1.0 / 300;
  const ValueTable table = SolveExactDp(inst, opts);
  const double v = table.Value(0, {1, 1});
  EXPECT_GT(v, 40.0);
  EXPECT_LT(v, 65.0);
  // The threshold offer at t = 0 drops u exactly when its opportunity cost
  // exceeds its fare.
  const double du = table.Value(1, {1, 1}) - table.Value(1, {0, 1});
  EXPECT_EQ(OptimalOffer(inst, table, 0, {1, 1}).contains(kU), du <= 15.0);
  EXPECT_GT(du, 15.0);
}

TEST(ExactDp, LastStepOffersEverythingAvailable) {
  const Instance inst = Running();
  const ValueTable table = SolveExactDp(inst);
  const int last = table.steps() - 1;
  for (const auto& x : AllStates(inst.capacities())) {
    EXPECT_EQ(OptimalOffer(inst, table, last, x), AvailableProducts(inst, x));
  }
}

TEST(ExactDp, DepletedResourceExcluded) {
  const Instance inst = Running();
  const ValueTable table = SolveExactDp(inst);
  for (int s = 0; s < table.steps(); ++s) {
    const Offer threshold = OptimalOffer(inst, table, s, {0, 1});
    EXPECT_FALSE(threshold.contains(kU));
    EXPECT_FALSE(threshold.contains(kV));
    EXPECT_FALSE(table.BestOffer(s, {0, 1}).contains(kU));
    EXPECT_FALSE(table.BestOffer(s, {0, 1}).contains(kV));
    EXPECT_TRUE(OptimalOffer(inst, table, s, {0, 1}).contains(kW));
  }
}

TEST(ExactDp, StateCap) {
  const Instance inst = Running().WithCapacities({200, 200});
  DpOptions opts;
  opts.state_cap = 1000;
  try {
    SolveExactDp(inst, opts);
    FAIL() << "expected cap error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCap);
  }
}

TEST(ExactDp, EnumerationCap) {
  const Instance inst = Running();
  DpOptions opts;
  opts.enumeration_limit = 2;
  EXPECT_THROW(SolveExactDp(inst, opts), Error);
}

TEST(Decomposition, SingleResourceEqualsExactDp) {
  std::mt19937_64 rng(9);
  RandomInstanceShape shape;
  shape.max_resources = 1;
  for (int trial = 0; trial < 20; ++trial) {
    const Instance inst = ValidateOrThrow(RandomInstance(rng, shape));
    const ValueTable table = SolveExactDp(inst);
    const BidPriceModel model = SolveDecomposition(inst, {123.0});
    ASSERT_EQ(model.steps(), table.steps());
    for (int s = 0; s <= table.steps(); ++s) {
      for (int x = 0; x <= inst.capacities()[0]; ++x) {
        EXPECT_NEAR(model.ResourceValue(0, s, x), table.Value(s, {x}), 1e-9);
      }
    }
  }
}

TEST(Decomposition, BetaZeroIsStaticBidPrice) {
  const Instance inst = Running();
  const std::vector<double> duals{11.25, 20.0};
  const BidPriceModel model = SolveDecomposition(inst, duals, 0.0);
  for (int s = 0; s <= model.steps(); ++s) {
    EXPECT_DOUBLE_EQ(model.OpportunityCost(inst, kU, s, {1, 1}), 11.25);
    EXPECT_DOUBLE_EQ(model.OpportunityCost(inst, kV, s, {1, 1}), 11.25);
    EXPECT_DOUBLE_EQ(model.OpportunityCost(inst, kW, s, {1, 1}), 20.0);
  }
}

TEST(Decomposition, BlendIsLinear) {
  const Instance inst = Running();
  const std::vector<double> duals{11.25, 20.0};
  const BidPriceModel one = SolveDecomposition(inst, duals, 1.0);
  const BidPriceModel half = SolveDecomposition(inst, duals, 0.5);
  for (int j = 0; j < 3; ++j) {
    const double pi = j == kW ? 20.0 : 11.25;
    EXPECT_NEAR(half.OpportunityCost(inst, j, 3, {1, 1}),
                0.5 * one.OpportunityCost(inst, j, 3, {1, 1}) + 0.5 * pi, 1e-12);
  }
}

TEST(Decomposition, RejectsBadInput) {
  const Instance inst = Running();
  EXPECT_THROW(SolveDecomposition(inst, {1.0}), Error);
  EXPECT_THROW(SolveDecomposition(inst, {1.0, 1.0}, 1.5), Error);
  DpOptions opts;
  opts.state_cap = 10;
  EXPECT_THROW(SolveDecomposition(inst, {1.0, 1.0}, 1.0, opts), Error);
}

TEST(OfferDynamic, ExcludesDepletedAndRespectsCap) {
  const Instance inst = Running();
  const BidPriceModel model = SolveDecomposition(inst, {11.25, 20.0});
  EXPECT_TRUE(OfferDynamic(inst, model, 0.5, {0, 0}).empty());
  const Offer s = OfferDynamic(inst, model, 0.5, {0, 1});
  EXPECT_EQ(s, Offer::FromProducts(3, {kW}));
  EXPECT_THROW(OfferDynamic(inst, model, 0.0, {1, 1}, 2), Error);
}

TEST(OfferDynamic, TerminalOffersAllWithoutCannibalization) {
  // Each segment considers one product, so with zero opportunity cost adding
  // a product never lowers the objective.
  InstanceSpec spec;
  spec.resources = {{"a", 2}, {"b", 1}};
  spec.products = {{"p", 10, {"a"}}, {"q", 20, {"a", "b"}}, {"r", 5, {"b"}}};
  spec.segments = {{"s1", 1.0, {"p"}, {}}, {"s2", 2.0, {"q"}, {}}, {"s3", 1.5, {"r"}, {}}};
  spec.horizon = 1.0;
  const Instance inst = ValidateOrThrow(spec);
  const BidPriceModel model = SolveDecomposition(inst, {3.0, 4.0});
  const double t_last = inst.horizon() - 0.5 * model.dt();
  EXPECT_EQ(OfferDynamic(inst, model, t_last, {2, 1}), Offer::All(3));
  EXPECT_EQ(OfferDynamic(inst, model, t_last, {1, 0}), Offer::FromProducts(3, {0}));
}

TEST(OdPolicySize, Examples) {
  std::mt19937_64 rng(1);
  for (double lf : {0.6, 1.0, 1.2, 1.6}) {
    BusLineShape shape;
    shape.load_factor = lf;
    const Instance bus = ValidateOrThrow(BusLineInstance(rng, shape));
    EXPECT_NEAR(OdPolicySize(bus, lf), 32400.0 * lf, 1e-9);
    EXPECT_NEAR(OdPolicySize(bus), 32400.0 * lf, 1e-6);
  }
  EXPECT_EQ(OdPolicySize(Running().WithCapacities({0, 0})), 0.0);
  EXPECT_NEAR(OdPolicySize(Running()), 6.0, 1e-12);
}

}  // namespace
}  // namespace pcnrm
