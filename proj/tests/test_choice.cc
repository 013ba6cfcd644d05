#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pcnrm/choice.h"
#include "pcnrm/model.h"

namespace pcnrm {
namespace {

Instance Running() { return ValidateOrThrow(RunningExampleSpec()); }

constexpr int kU = 0, kV = 1, kW = 2;

TEST(Probability, RunningExample) {
  const Instance inst = Running();
  const Segment& l = inst.segment(0);
  const Offer vw = Offer::FromProducts(3, {kV, kW});
  EXPECT_DOUBLE_EQ(Probability(l, kU, vw), 0.0);
  EXPECT_DOUBLE_EQ(Probability(l, kV, vw), 0.9);
  EXPECT_DOUBLE_EQ(Probability(l, kW, vw), 0.0);
  const Offer w = Offer::FromProducts(3, {kW});
  EXPECT_NEAR(Probability(l, kW, w), 0.72, 1e-15);
  const Offer none(3);
  for (int j = 0; j < 3; ++j) EXPECT_EQ(Probability(l, j, none), 0.0);
}

// Random segment over n products, some outside the list.
Instance RandomInstance(std::mt19937_64& rng, int n) {
  InstanceSpec spec;
  spec.horizon = 1.0;
  spec.resources.push_back({"r", 3});
  std::vector<std::string> ids;
  for (int j = 0; j < n; ++j) {
    ids.push_back("p" + std::to_string(j));
    spec.products.push_back({ids.back(), 1.0 + j, {"r"}});
  }
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  for (int s = 0; s < 3; ++s) {
    std::vector<std::string> order = ids;
    std::shuffle(order.begin(), order.end(), rng);
    const int len = 1 + static_cast<int>(rng() % n);
    order.resize(len);
    PreferenceList l;
    l.id = "l" + std::to_string(s);
    l.rate = 1.0 + s;
    l.choices = order;
    for (int k = 1; k < len; ++k) {
      l.transitions.push_back(rng() % 4 == 0 ? 1.0 : unit(rng));
    }
    spec.segments.push_back(l);
  }
  return ValidateOrThrow(spec);
}

TEST(Probability, Properties) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const Instance inst = RandomInstance(rng, 6);
    for (const Segment& l : inst.segments()) {
      for (std::uint64_t mask = 0; mask < 64; ++mask) {
        const Offer s = Offer::FromMask(6, mask);
        double sum = 0.0;
        for (int j = 0; j < 6; ++j) {
          const double p = Probability(l, j, s);
          sum += p;
          if (!s.contains(j)) EXPECT_EQ(p, 0.0);
          // Adding a product ranked before j covers j.
          if (p > 0.0) {
            for (int k = 0; k < l.rank[j]; ++k) {
              Offer t = s;
              t.insert(l.choices[k]);
              EXPECT_EQ(Probability(l, j, t), 0.0);
            }
          }
        }
        EXPECT_LE(sum, 1.0 + 1e-15);
        // Full mass only when every transition up to the first offered
        // product is 1.
        const int first = FirstOffered(l, s);
        const bool full = first >= 0 && l.reach[first] == 1.0;
        EXPECT_EQ(sum == 1.0, full);
      }
    }
  }
}

// 10^6 draws; every outcome frequency within three binomial deviations.
void CheckFrequencies(const Segment& l, const Offer& s, int universe,
                      bool use_depth) {
  constexpr int kDraws = 1000000;
  std::mt19937_64 rng(12345);
  std::vector<int> counts(universe + 1, 0);
  for (int d = 0; d < kDraws; ++d) {
    const std::optional<int> j =
        use_depth ? ChooseWithDepth(l, s, SampleDepth(l, rng))
                  : SampleChoice(l, s, rng);
    ++counts[j ? *j : universe];
  }
  double none = 1.0;
  for (int j = 0; j <= universe; ++j) {
    double p;
    if (j < universe) {
      p = Probability(l, j, s);
      none -= p;
    } else {
      p = std::max(none, 0.0);
    }
    const double sigma = std::sqrt(kDraws * p * (1 - p));
    EXPECT_LE(std::abs(counts[j] - kDraws * p), 3 * sigma + 1e-9)
        << "outcome " << j;
  }
}

TEST(SampleChoice, FrequenciesMatchProbability) {
  const Instance inst = Running();
  const Segment& l = inst.segment(0);
  CheckFrequencies(l, Offer::FromProducts(3, {kV, kW}), 3, false);
  CheckFrequencies(l, Offer::FromProducts(3, {kW}), 3, false);
  CheckFrequencies(l, Offer::FromProducts(3, {kW}), 3, true);
  std::mt19937_64 rng(1);
  for (int d = 0; d < 1000; ++d) {
    EXPECT_EQ(SampleChoice(l, Offer::All(3), rng), std::optional<int>(kU));
  }
}

TEST(Durations, BuyingLogicCases) {
  const Instance inst = Running();
  // T_u <= T_v <= T_w.
  ChoiceDurations d = DurationsFromClosings(inst, {{0.2, 0.5, 0.9}});
  EXPECT_NEAR(d.durations[0][0], 0.2, 1e-15);
  EXPECT_NEAR(d.durations[0][1], 0.3, 1e-15);
  EXPECT_NEAR(d.durations[0][2], 0.4, 1e-15);
  // T_v <= T_u <= T_w: v is covered by u.
  d = DurationsFromClosings(inst, {{0.5, 0.2, 0.9}});
  EXPECT_NEAR(d.durations[0][0], 0.5, 1e-15);
  EXPECT_EQ(d.durations[0][1], 0.0);
  EXPECT_NEAR(d.durations[0][2], 0.4, 1e-15);
  d = DurationsFromClosings(inst, {{0, 0, 0}});
  for (double x : d.durations[0]) EXPECT_EQ(x, 0.0);
}

// Sales from an independent integration of piecewise-constant availability
// over the breakpoints of T.
std::vector<double> IntegratedSales(const Instance& inst,
                                    const ClosingTimes& t) {
  std::vector<double> points = {0.0, inst.horizon()};
  for (double x : t.times) points.push_back(x);
  std::sort(points.begin(), points.end());
  std::vector<double> sales(inst.num_products(), 0.0);
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    const double len = points[k + 1] - points[k];
    if (len <= 0) continue;
    const double mid = 0.5 * (points[k] + points[k + 1]);
    Offer s(inst.num_products());
    for (int j = 0; j < inst.num_products(); ++j) {
      if (mid < t[j]) s.insert(j);
    }
    const std::vector<double> rate = SalesRates(inst, s);
    for (int j = 0; j < inst.num_products(); ++j) sales[j] += rate[j] * len;
  }
  return sales;
}

TEST(Durations, FormsAgreeAndMatchIntegrator) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    const Instance inst = RandomInstance(rng, 5);
    ClosingTimes t;
    for (int j = 0; j < 5; ++j) {
      // Occasional exact ties and zeros.
      const int kind = static_cast<int>(rng() % 5);
      t.times.push_back(kind == 0 ? 0.0 : kind == 1 ? 0.5 : unit(rng));
    }
    const ChoiceDurations d = DurationsFromClosings(inst, t);
    const auto pos = DurationsPositivePart(inst, t);
    for (int l = 0; l < inst.num_segments(); ++l) {
      double total = 0.0, tmax = 0.0;
      for (std::size_t k = 0; k < pos[l].size(); ++k) {
        EXPECT_NEAR(d.durations[l][k], pos[l][k], 1e-15);
        EXPECT_GE(d.durations[l][k], 0.0);
        total += d.durations[l][k];
        tmax = std::max(tmax, t[inst.segment(l).choices[k]]);
      }
      EXPECT_NEAR(total, tmax, 1e-12);
    }
    const std::vector<double> q = PcpSales(inst, t);
    const std::vector<double> oracle = IntegratedSales(inst, t);
    for (int j = 0; j < 5; ++j) EXPECT_NEAR(q[j], oracle[j], 1e-12);
  }
}

TEST(PcpSales, RunningExampleOptimum) {
  const Instance inst = Running();
  const std::vector<double> q = PcpSales(inst, {{0.0, 0.370, 0.832}});
  EXPECT_EQ(q[kU], 0.0);
  EXPECT_NEAR(q[kV], 0.999, 1e-9);
  EXPECT_NEAR(q[kW], 2.16 * 0.462, 1e-9);
  EXPECT_NEAR(q[kW], 0.998, 1e-3);
  const std::vector<double> zero = PcpSales(inst, {{0, 0, 0}});
  for (double x : zero) EXPECT_EQ(x, 0.0);
}

}  // namespace
}  // namespace pcnrm
