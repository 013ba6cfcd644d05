#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "pcnrm/error.h"
#include "pcnrm/lp.h"

namespace pcnrm {
namespace {

TEST(SolveLp, SingleVariable) {
  LinearProgram lp;
  const int x = lp.AddVariable(0, kInfinity, 1.0, "x");
  lp.AddConstraint({{x, 1.0}}, Relation::kLessEqual, 1.0);
  const SolveOutcome out = SolveLp(lp);
  ASSERT_EQ(out.status, SolveStatus::kOptimal);
  EXPECT_NEAR(out.x[x], 1.0, 1e-12);
  EXPECT_NEAR(out.duals[0], 1.0, 1e-12);
  EXPECT_NEAR(out.objective, 1.0, 1e-12);
}

TEST(SolveLp, InfeasibleAndUnbounded) {
  LinearProgram inf;
  const int a = inf.AddVariable(0, kInfinity, 1.0);
  inf.AddConstraint({{a, 1.0}}, Relation::kLessEqual, 1.0);
  inf.AddConstraint({{a, 1.0}}, Relation::kGreaterEqual, 2.0);
  EXPECT_EQ(SolveLp(inf).status, SolveStatus::kInfeasible);

  LinearProgram unb;
  const int b = unb.AddVariable(0, kInfinity, 1.0);
  const int c = unb.AddVariable(0, kInfinity, 0.0);
  unb.AddConstraint({{b, 1.0}, {c, -1.0}}, Relation::kLessEqual, 1.0);
  EXPECT_EQ(SolveLp(unb).status, SolveStatus::kUnbounded);
}

TEST(SolveLp, InvalidModelRejected) {
  LinearProgram lp;
  lp.AddVariable(1.0, 0.0, 1.0);
  EXPECT_THROW(SolveLp(lp), Error);
  LinearProgram dangling;
  dangling.AddVariable(0, 1, 1);
  dangling.AddConstraint({{3, 1.0}}, Relation::kLessEqual, 1.0);
  try {
    SolveLp(dangling);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInput);
  }
}

TEST(SolveLp, DegenerateTwoOptimalBases) {
  // max x + y s.t. x + y <= 1, x <= 1, y <= 1, x + 2y <= 2.
  LinearProgram lp;
  const int x = lp.AddVariable(0, kInfinity, 1.0);
  const int y = lp.AddVariable(0, kInfinity, 1.0);
  lp.AddConstraint({{x, 1}, {y, 1}}, Relation::kLessEqual, 1);
  lp.AddConstraint({{x, 1}}, Relation::kLessEqual, 1);
  lp.AddConstraint({{y, 1}}, Relation::kLessEqual, 1);
  lp.AddConstraint({{x, 1}, {y, 2}}, Relation::kLessEqual, 2);
  const SolveOutcome out = SolveLp(lp);
  ASSERT_EQ(out.status, SolveStatus::kOptimal);
  EXPECT_NEAR(out.objective, 1.0, 1e-12);
}

// Checks the optimality certificate: primal feasibility, dual sign
// conditions, complementary slackness and strong duality.
void CheckCertificate(const LinearProgram& lp, const SolveOutcome& out) {
  ASSERT_EQ(out.status, SolveStatus::kOptimal);
  EXPECT_LE(lp.MaxViolation(out.x), 1e-8);
  double dual_obj = 0.0;
  for (int r = 0; r < lp.num_constraints(); ++r) {
    const Constraint& row = lp.constraint(r);
    const double y = out.duals[r];
    if (row.relation == Relation::kLessEqual) EXPECT_GE(y, -1e-9);
    if (row.relation == Relation::kGreaterEqual) EXPECT_LE(y, 1e-9);
    EXPECT_LE(std::abs(y * (row.rhs - lp.RowActivity(r, out.x))), 1e-6);
    dual_obj += y * row.rhs;
  }
  for (int j = 0; j < lp.num_variables(); ++j) {
    double rc = lp.objective(j);
    for (int r = 0; r < lp.num_constraints(); ++r) {
      for (const LinearTerm& t : lp.constraint(r).terms) {
        if (t.var == j) rc -= out.duals[r] * t.coef;
      }
    }
    EXPECT_NEAR(rc, out.reduced_costs[j], 1e-7);
    if (rc > 1e-7) {
      EXPECT_NEAR(out.x[j], lp.upper(j), 1e-8);
      dual_obj += rc * lp.upper(j);
    } else if (rc < -1e-7) {
      EXPECT_NEAR(out.x[j], lp.lower(j), 1e-8);
      dual_obj += rc * lp.lower(j);
    }
  }
  EXPECT_LE(std::abs(out.objective - dual_obj), 1e-6 * (1 + std::abs(out.objective)));
}

LinearProgram RandomLp(std::mt19937_64& rng, int n, int m, int binaries) {
  std::uniform_real_distribution<double> coef(-3.0, 5.0);
  std::uniform_real_distribution<double> pos(0.5, 4.0);
  LinearProgram lp;
  for (int j = 0; j < n; ++j) {
    if (j < binaries) {
      lp.AddBinary(coef(rng));
    } else {
      const double lo = rng() % 3 == 0 ? -1.0 : 0.0;
      const double hi = rng() % 2 == 0 ? pos(rng) : kInfinity;
      lp.AddVariable(lo, hi, coef(rng));
    }
  }
  for (int r = 0; r < m; ++r) {
    std::vector<LinearTerm> terms;
    for (int j = 0; j < n; ++j) {
      if (rng() % 3 != 0) terms.push_back({j, coef(rng)});
    }
    const int kind = static_cast<int>(rng() % 6);
    if (kind == 0) {
      lp.AddConstraint(terms, Relation::kGreaterEqual, -pos(rng));
    } else if (kind == 1) {
      lp.AddConstraint(terms, Relation::kEqual, coef(rng) * 0.3);
    } else {
      lp.AddConstraint(terms, Relation::kLessEqual, pos(rng) * 2);
    }
  }
  // A box row keeps the problem bounded.
  std::vector<LinearTerm> box;
  for (int j = 0; j < n; ++j) box.push_back({j, 1.0});
  lp.AddConstraint(box, Relation::kLessEqual, 10.0);
  for (int j = 0; j < n; ++j) {
    if (lp.upper(j) == kInfinity) lp.AddConstraint({{j, 1.0}}, Relation::kLessEqual, 8.0);
  }
  return lp;
}

TEST(SolveLp, RandomDualityCertificates) {
  std::mt19937_64 rng(2024);
  int optimal = 0;
  for (int rep = 0; rep < 300; ++rep) {
    const LinearProgram lp = RandomLp(rng, 2 + rep % 7, 1 + rep % 6, 0);
    const SolveOutcome out = SolveLp(lp);
    if (out.status != SolveStatus::kOptimal) {
      EXPECT_EQ(out.status, SolveStatus::kInfeasible);
      continue;
    }
    ++optimal;
    CheckCertificate(lp, out);
  }
  EXPECT_GT(optimal, 150);
}

// Exhaustive enumeration over binary assignments, each solved as an LP.
std::optional<double> BruteForceMip(const LinearProgram& lp) {
  std::vector<int> bins;
  for (int j = 0; j < lp.num_variables(); ++j) {
    if (lp.is_binary(j)) bins.push_back(j);
  }
  std::optional<double> best;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << bins.size()); ++mask) {
    LinearProgram fixed = lp;
    for (std::size_t b = 0; b < bins.size(); ++b) {
      const double v = (mask >> b) & 1 ? 1.0 : 0.0;
      fixed.SetBounds(bins[b], v, v);
    }
    const SolveOutcome out = SolveLp(fixed);
    if (out.status == SolveStatus::kOptimal && (!best || out.objective > *best)) {
      best = out.objective;
    }
  }
  return best;
}

TEST(SolveMip, KnapsackAllFit) {
  LinearProgram lp;
  for (int j = 0; j < 3; ++j) lp.AddBinary(1.0 + j);
  lp.AddConstraint({{0, 1}, {1, 2}, {2, 3}}, Relation::kLessEqual, 10);
  const SolveOutcome out = SolveMip(lp, 0.0);
  ASSERT_EQ(out.status, SolveStatus::kOptimal);
  for (int j = 0; j < 3; ++j) EXPECT_EQ(out.x[j], 1.0);
}

TEST(SolveMip, MatchesEnumeration) {
  std::mt19937_64 rng(77);
  int feasible = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const int bins = 1 + static_cast<int>(rng() % 12);
    const int cont = static_cast<int>(rng() % 4);
    const LinearProgram lp = RandomLp(rng, bins + cont, 1 + rng() % 9, bins);
    const std::optional<double> oracle = BruteForceMip(lp);
    const SolveOutcome out = SolveMip(lp, 0.0);
    if (!oracle) {
      EXPECT_EQ(out.status, SolveStatus::kInfeasible);
      continue;
    }
    ++feasible;
    ASSERT_EQ(out.status, SolveStatus::kOptimal);
    EXPECT_NEAR(out.objective, *oracle, 1e-6);
    EXPECT_LE(lp.MaxViolation(out.x), 1e-8);
    for (int j = 0; j < lp.num_variables(); ++j) {
      if (lp.is_binary(j)) {
        EXPECT_LE(std::abs(out.x[j] - std::round(out.x[j])), 1e-9);
      }
    }
  }
  EXPECT_GT(feasible, 40);
}

TEST(SolveMip, WarmStartNeverWorse) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 30; ++rep) {
    const LinearProgram lp = RandomLp(rng, 8, 4, 6);
    const SolveOutcome cold = SolveMip(lp, 1e-3);
    if (cold.status != SolveStatus::kOptimal) continue;
    const SolveOutcome warm = SolveMip(lp, 1e-3, cold.x);
    ASSERT_NE(warm.status, SolveStatus::kInfeasible);
    EXPECT_GE(warm.objective, cold.objective - 1e-9);
  }
}

TEST(SolveMip, NodeLimitWithoutIncumbentThrows) {
  std::mt19937_64 rng(3);
  SolverConfig config;
  config.max_nodes = 0;
  bool threw = false;
  for (int rep = 0; rep < 50 && !threw; ++rep) {
    const LinearProgram lp = RandomLp(rng, 10, 6, 10);
    try {
      SolveMip(lp, 0.0, std::nullopt, config);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kSolver);
      threw = true;
    }
  }
  EXPECT_TRUE(threw);
}

TEST(WriteLpText, Layout) {
  LinearProgram lp;
  const int x = lp.AddVariable(0, kInfinity, 2.0, "x");
  const int y = lp.AddBinary(-1.0, "y");
  lp.AddConstraint({{x, 1}, {y, -3}}, Relation::kLessEqual, 4, "cap");
  std::ostringstream out;
  WriteLpText(lp, out);
  EXPECT_EQ(out.str(),
            "MAXIMIZE\n obj: + 2 x - 1 y\nSUBJECT TO\n cap: + 1 x - 3 y <= 4\n"
            "BOUNDS\n 0 <= x <= +inf\nBINARY\n y\nEND\n");
}

}  // namespace
}  // namespace pcnrm
