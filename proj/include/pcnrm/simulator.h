#ifndef PCNRM_SIMULATOR_H_
#define PCNRM_SIMULATOR_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pcnrm/approx.h"
#include "pcnrm/pcp.h"
#include "pcnrm/policy.h"

namespace pcnrm {

struct Arrival {
  double time = 0.0;
  int segment = 0;
  int depth = 1;  // ranks the customer walks, see SampleDepth
};

// splitmix64 finalizer. Substream seed of (replication r, segment l) is
// M(M(M(seed) ^ r) ^ l) with M = SplitMix64.
std::uint64_t SplitMix64(std::uint64_t x);
std::uint64_t SubstreamSeed(std::uint64_t seed, std::uint64_t replication,
                            std::uint64_t segment);

// Homogeneous Poisson arrivals with rate_l * multiplier per segment on
// [0, horizon], exponential gaps, one substream per (replication, segment).
// Depths are drawn from the same substream so every policy sees the same
// customers.
std::vector<Arrival> GenerateArrivals(const Instance& instance, double multiplier,
                                      std::uint64_t seed, std::uint64_t replication);

struct SimConfig {
  int evaluations = 1000;
  std::uint64_t seed = 1;
  std::vector<double> checkpoints;  // strictly inside (0, horizon)
  bool allow_reopening = false;
  double rate_multiplier = 1.0;
  int threads = 0;                  // 0: hardware concurrency
  bool keep_traces = false;
};

struct SimResult {
  double mean_revenue = 0.0;
  double sd_revenue = 0.0;
  double half_width = 0.0;   // 1.96 sd / sqrt(n)
  bool ci_valid = false;     // n >= 30
  double cf_consumed = 0.0;  // mean fraction of capacity sold
  double cf_remaining = 1.0; // mean sum x_i / sum c_i at the horizon
  std::vector<double> mean_sales;
  std::vector<double> revenues;  // per replication, in replication order
  int replications = 0;
  double wall_seconds = 0.0;
  double policy_seconds = 0.0;   // time spent building policies and deciding
  std::vector<OfferTrace> traces;
};

// Static evaluation of one policy.
SimResult Simulate(const Instance& instance, const Policy& policy,
                   const SimConfig& config);

// Builds the policy used after a checkpoint. `residual` has the remaining
// capacities and horizon tau - t; `closed` flags products already closed
// (only set when reopening is disallowed). The returned policy is queried
// with times relative to the checkpoint and sales counted from it.
using Reoptimizer =
    std::function<Policy(const Instance& residual, const std::vector<char>& closed)>;

// Re-optimizing evaluation. With no checkpoints this equals Simulate.
SimResult SimulateReoptimizing(const Instance& instance, const Policy& initial,
                               const Reoptimizer& reoptimize, const SimConfig& config);

// ---------------------------------------------------------------------------
// Approximation x policy grid.
// ---------------------------------------------------------------------------

struct PolicyOptions {
  LimitRounding rounding = LimitRounding::kFloor;
  OfferOrder order = OfferOrder::kLexicographic;
  std::uint64_t order_seed = 0;
  double beta = 1.0;
  DpOptions dp;
};

// Policy of the given kind derived from an approximation solution. Throws
// Error when the pair is not applicable (e.g. PC from a reopening CDLP).
Policy BuildPolicy(const Instance& instance, const ApproxSolution& solution,
                   PolicyKind kind, const PolicyOptions& options = {});

// Solves `kind` on the residual problem, honouring closed products, and turns
// it into a policy. Closed products get T_j = 0 in the PC programs and are
// masked elsewhere.
Reoptimizer MakeReoptimizer(ApproxKind kind, PolicyKind policy, const PcpOptions& pcp,
                            const CdlpOptions& cdlp, const PolicyOptions& options = {});

struct CompareConfig {
  std::vector<ApproxKind> approximations{ApproxKind::kCdlp, ApproxKind::kPcmp,
                                         ApproxKind::kPclp, ApproxKind::kCdpc};
  std::vector<PolicyKind> policies{PolicyKind::kPb, PolicyKind::kOp, PolicyKind::kPc,
                                   PolicyKind::kOd};
  bool include_dp = false;
  SimConfig sim;
  PcpOptions pcp;
  CdlpOptions cdlp;
  PolicyOptions policy;
  std::optional<Hierarchy> hierarchy;  // for PCLP; price rule when absent
  bool deterministic = false;          // zero the timing columns
};

struct BenchRow {
  std::string approximation;
  std::string policy;
  bool approx_ok = false;
  bool ok = false;     // approximation solved and policy simulated
  std::string reason;  // when !ok
  double objective = 0.0;
  double cpu_approx = 0.0;
  double cpu_policy = 0.0;
  double expected_revenue = 0.0;
  double half_width = 0.0;
  double delta_revenue_pct = 0.0;  // vs the CDLP-OP row
  bool has_delta = false;
  double cf = 0.0;                 // consumed
  double delta_cf = 0.0;           // percentage points vs the CDLP-OP row
};

// Every row shares arrival streams (same seed). The reference row is CDLP-OP.
std::vector<BenchRow> Compare(const Instance& instance, const CompareConfig& config);

std::string BenchCsv(const std::vector<BenchRow>& rows, double load_factor);
std::string BenchCsvHeader();
std::string BenchText(const std::vector<BenchRow>& rows, double load_factor);

}  // namespace pcnrm

#endif  // PCNRM_SIMULATOR_H_
