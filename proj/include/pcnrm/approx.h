#ifndef PCNRM_APPROX_H_
#define PCNRM_APPROX_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pcnrm/choice.h"
#include "pcnrm/lp.h"
#include "pcnrm/model.h"
#include "pcnrm/offer.h"

namespace pcnrm {

// Offer set -> time it is offered. Iteration order is the Offer ordering
// (bitmask value), which is also the default sequencing for OP policies.
using OfferDurations = std::map<Offer, double>;

enum class ApproxKind { kCdlp, kPcmp, kPclp, kCdpc };

const char* ToString(ApproxKind kind);
std::optional<ApproxKind> ParseApproxKind(const std::string& name);

// Total ranking of products by closing time. rank[j] is in [1, levels];
// products with a lower rank close no later than products with a higher one,
// equal ranks close together.
struct Hierarchy {
  std::vector<int> rank;
  int levels = 0;

  // groups()[k] holds the products of rank k + 1.
  std::vector<std::vector<int>> groups() const;
};

struct ApproxSolution {
  ApproxKind kind = ApproxKind::kCdlp;
  double objective = 0.0;
  OfferDurations durations;
  std::optional<ClosingTimes> closings;
  std::vector<double> sales;          // planned Q*
  std::vector<double> duals;          // per resource
  double horizon_dual = 0.0;          // CDLP kinds only
  bool duals_exact = false;           // LP duals vs finite differences
  double solve_seconds = 0.0;
  std::int64_t iterations = 0;        // column-generation rounds or simplex pivots
  std::int64_t nodes = 0;
  double gap = 0.0;
  std::vector<double> objective_history;  // restricted-master objectives
  std::optional<Hierarchy> hierarchy;
};

enum class PricingMode { kAuto, kEnumerate, kMip };

struct PricingResult {
  Offer offer;
  double value = 0.0;  // reduced value including -sigma
};

// Best column for the CDLP master: maximizes
//   sum_l rate_l sum_j P_l(j|S) (r_j - pi . A_j) - sigma.
// Enumeration runs over subsets of the union of consideration sets; kAuto
// switches to a binary program above `enumeration_limit` products. kEnumerate
// above the limit throws Error(kCap).
PricingResult PriceColumn(const Instance& instance,
                          const std::vector<double>& duals, double sigma,
                          PricingMode mode = PricingMode::kAuto,
                          int enumeration_limit = 20,
                          const SolverConfig& config = {});

struct CdlpOptions {
  PricingMode pricing = PricingMode::kAuto;
  int enumeration_limit = 20;
  int column_cap = 100000;    // generated columns before Error(kCap)
  // Extra seed columns; the durations are ignored, only the offers matter.
  std::optional<OfferDurations> initial_columns;
  SolverConfig solver;
};

// Column generation on the choice-based deterministic LP. The master starts
// from the column (J, horizon) plus any initial columns.
ApproxSolution SolveCdlp(const Instance& instance, const CdlpOptions& options = {});

}  // namespace pcnrm

#endif  // PCNRM_APPROX_H_
