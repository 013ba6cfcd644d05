#ifndef PCNRM_POLICY_H_
#define PCNRM_POLICY_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pcnrm/approx.h"
#include "pcnrm/choice.h"
#include "pcnrm/dp.h"

namespace pcnrm {

enum class PolicyKind { kPb, kOp, kPc, kOd, kDp, kOfferAll };

const char* ToString(PolicyKind kind);
std::optional<PolicyKind> ParsePolicyKind(const std::string& name);

struct PolicyState {
  double t = 0.0;
  std::vector<int> x;      // remaining capacity
  std::vector<int> sales;  // units sold per product
};

struct OfferPeriod {
  Offer offer;
  double start = 0.0;
  double end = 0.0;  // offered on [start, end)
};

enum class LimitRounding { kFloor, kProbabilistic };
enum class OfferOrder { kLexicographic, kGiven, kRandom };

class Policy {
 public:
  // Booking limits floor(Q*_j + 1e-9), or floor plus a Bernoulli(fraction)
  // draw per product when probabilistic.
  static Policy BookingLimits(const std::vector<double>& planned_sales,
                              LimitRounding rounding = LimitRounding::kFloor,
                              std::uint64_t seed = 0);
  static Policy OfferSequence(int num_products, std::vector<OfferPeriod> periods);
  static Policy ProductClosing(ClosingTimes closing);
  static Policy OfferDynamic(std::shared_ptr<const BidPriceModel> model,
                             int enumeration_limit = 16);
  static Policy ExactDp(std::shared_ptr<const ValueTable> table);
  static Policy OfferAll(int num_products);

  PolicyKind kind() const { return kind_; }
  const std::vector<int>& limits() const { return limits_; }
  const std::vector<OfferPeriod>& periods() const { return periods_; }
  const ClosingTimes& closing() const { return closing_; }

  Offer Available(const Instance& instance, const PolicyState& state) const;

 private:
  PolicyKind kind_ = PolicyKind::kOfferAll;
  int num_products_ = 0;
  std::vector<int> limits_;
  std::vector<OfferPeriod> periods_;
  ClosingTimes closing_;
  std::shared_ptr<const BidPriceModel> bid_prices_;
  std::shared_ptr<const ValueTable> table_;
  int enumeration_limit_ = 16;
};

// Consecutive periods t_k = sum_{g<=k} D_{S_g}. `given` lists the offers in
// order for kGiven (offers missing from `durations` are skipped); kRandom
// shuffles with `seed`. After the last period nothing is offered.
Policy OpFromDurations(const OfferDurations& durations,
                       OfferOrder order = OfferOrder::kLexicographic,
                       const std::vector<Offer>& given = {}, std::uint64_t seed = 0);

// Offered sets observed at increasing times.
using OfferTrace = std::vector<std::pair<double, Offer>>;

// True iff every product's offered times form an interval starting at the
// first observation (possibly empty).
bool NoReopeningCheck(const OfferTrace& trace);

}  // namespace pcnrm

#endif  // PCNRM_POLICY_H_
