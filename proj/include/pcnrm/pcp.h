#ifndef PCNRM_PCP_H_
#define PCNRM_PCP_H_

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pcnrm/approx.h"

namespace pcnrm {

// The family of distinct segment prefix sets C_l^{[k]} with k >= 2, each with
// a split S = S0 u S1 into an indexed set or a singleton on either side.
// Splits are canonical: S0 \ S1 is a single product.
struct PrefixSetIndex {
  std::vector<Offer> sets;  // ascending cardinality
  std::vector<Offer> s0;
  std::vector<Offer> s1;
  // prefix[l][k] = index into `sets` of C_l^{[k+1]}, or -1 for k == 0.
  std::vector<std::vector<int>> prefix;

  int size() const { return static_cast<int>(sets.size()); }
  // Index of an indexed set, or -1.
  int Find(const Offer& s) const;
};

PrefixSetIndex BuildPrefixSetIndex(const Instance& instance);

// Ordered pairs (u, v) with u in S1 \ S0 and v in S0 \ S1.
std::vector<std::pair<int, int>> CrossPairs(const Offer& s0, const Offer& s1);

// Variable layout of the product-closing mixed-integer program.
struct PcmpModel {
  LinearProgram lp;
  std::vector<int> t;                   // T_j, one per product
  std::vector<int> t_set;               // T_S, one per indexed set
  std::vector<std::vector<int>> d;      // D_l^k
  std::vector<std::pair<int, int>> pairs;  // ordered (u, v) of each binary
  std::vector<int> h;                   // H_{u,v}, parallel to `pairs`
  std::vector<int> capacity_rows;
};

struct PcpOptions {
  double gap = 1e-3;
  // Products forced to close at time 0.
  std::vector<int> closed;
  // Nesting orders, each highest closing time first.
  std::vector<std::vector<int>> nesting;
  // Hierarchy whose PCLP solution seeds the MIP incumbent.
  std::optional<Hierarchy> warm;
  bool compute_duals = false;  // finite differences, one re-solve per resource
  int threads = 0;             // 0: hardware concurrency
  SolverConfig solver;
};

PcmpModel BuildPcmp(const Instance& instance, const PrefixSetIndex& index);

// Appends T_{order[0]} >= T_{order[1]} >= ... to a model whose closing-time
// variable of product j is t_vars[j].
void AddNesting(LinearProgram& lp, const std::vector<int>& t_vars,
                const std::vector<int>& order);

ApproxSolution SolvePcmp(const Instance& instance, const PcpOptions& options = {});

// The closing-time program restricted to closing times ordered by H.
ApproxSolution SolvePclp(const Instance& instance, const Hierarchy& hierarchy,
                         const PcpOptions& options = {});

// Pure product-closing program value at fixed closing times.
double PcpRevenue(const Instance& instance, const ClosingTimes& closing);

enum class HierarchyRule { kPrice, kPricePerResource, kFromSolution, kUserNesting };

std::optional<HierarchyRule> ParseHierarchyRule(const std::string& name);

// `closing` is required by kFromSolution; `nesting` (highest closing time
// first, all products listed) by kUserNesting.
Hierarchy MakeHierarchy(const Instance& instance, HierarchyRule rule,
                        const std::optional<ClosingTimes>& closing = std::nullopt,
                        const std::vector<int>& nesting = {});

// D(T): nested offers S_k = {j : T_j >= level_k} for the distinct positive
// closing levels, each lasting level_k - level_{k-1}.
OfferDurations ClosingsToDurations(const ClosingTimes& closing);

// T_j = total time j is offered. The offers must form an inclusion chain;
// otherwise Error(kInput) "reopening detected".
ClosingTimes DurationsToClosings(const OfferDurations& durations, int universe);
// Sequenced variant: the offers, in time order, must be nested nonincreasing.
ClosingTimes DurationsToClosings(
    const std::vector<std::pair<Offer, double>>& sequence, int universe);

// pi_i = R(c_i + 1) - R(c_i), the re-solves running concurrently.
std::vector<double> FiniteDifferenceDuals(
    const Instance& instance, double base_objective,
    const std::function<double(const Instance&)>& solve, int threads = 0);

// PCMP, then column generation seeded with the D(T*) columns.
ApproxSolution SolveCdpc(const Instance& instance, const PcpOptions& pcp = {},
                         const CdlpOptions& cdlp = {});

// Dispatch by kind. PCLP uses `hierarchy`, or the price rule when absent.
ApproxSolution SolveApprox(const Instance& instance, ApproxKind kind,
                           const PcpOptions& pcp = {}, const CdlpOptions& cdlp = {},
                           const std::optional<Hierarchy>& hierarchy = std::nullopt);

}  // namespace pcnrm

#endif  // PCNRM_PCP_H_
