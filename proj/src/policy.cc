#include "pcnrm/policy.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "pcnrm/error.h"

namespace pcnrm {

const char* ToString(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kPb: return "PB";
    case PolicyKind::kOp: return "OP";
    case PolicyKind::kPc: return "PC";
    case PolicyKind::kOd: return "OD";
    case PolicyKind::kDp: return "DP";
    case PolicyKind::kOfferAll: return "ALL";
  }
  return "?";
}

std::optional<PolicyKind> ParsePolicyKind(const std::string& name) {
  std::string lower;
  for (char c : name) lower.push_back(static_cast<char>(std::tolower(c)));
  if (lower == "pb") return PolicyKind::kPb;
  if (lower == "op") return PolicyKind::kOp;
  if (lower == "pc") return PolicyKind::kPc;
  if (lower == "od") return PolicyKind::kOd;
  if (lower == "dp") return PolicyKind::kDp;
  if (lower == "all") return PolicyKind::kOfferAll;
  return std::nullopt;
}

Policy Policy::BookingLimits(const std::vector<double>& planned_sales,
                             LimitRounding rounding, std::uint64_t seed) {
  Policy p;
  p.kind_ = PolicyKind::kPb;
  p.num_products_ = static_cast<int>(planned_sales.size());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (double q : planned_sales) {
    if (!(q >= -1e-9) || !std::isfinite(q)) throw InputError("invalid planned sales");
    const double base = std::floor(std::max(0.0, q) + 1e-9);
    int limit = static_cast<int>(base);
    if (rounding == LimitRounding::kProbabilistic && unif(rng) < q - base) ++limit;
    p.limits_.push_back(limit);
  }
  return p;
}

Policy Policy::OfferSequence(int num_products, std::vector<OfferPeriod> periods) {
  Policy p;
  p.kind_ = PolicyKind::kOp;
  p.num_products_ = num_products;
  for (const OfferPeriod& period : periods) {
    if (period.offer.universe() != num_products || !(period.end >= period.start)) {
      throw InputError("malformed offer period");
    }
  }
  p.periods_ = std::move(periods);
  return p;
}

Policy Policy::ProductClosing(ClosingTimes closing) {
  Policy p;
  p.kind_ = PolicyKind::kPc;
  p.num_products_ = closing.size();
  for (double t : closing.times) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("invalid closing time");
  }
  p.closing_ = std::move(closing);
  return p;
}

Policy Policy::OfferDynamic(std::shared_ptr<const BidPriceModel> model,
                            int enumeration_limit) {
  if (!model) throw InputError("missing bid-price model");
  Policy p;
  p.kind_ = PolicyKind::kOd;
  p.bid_prices_ = std::move(model);
  p.enumeration_limit_ = enumeration_limit;
  return p;
}

Policy Policy::ExactDp(std::shared_ptr<const ValueTable> table) {
  if (!table) throw InputError("missing value table");
  Policy p;
  p.kind_ = PolicyKind::kDp;
  p.table_ = std::move(table);
  return p;
}

Policy Policy::OfferAll(int num_products) {
  Policy p;
  p.kind_ = PolicyKind::kOfferAll;
  p.num_products_ = num_products;
  return p;
}

Offer Policy::Available(const Instance& instance, const PolicyState& state) const {
  const Offer feasible = AvailableProducts(instance, state.x);
  const int n = instance.num_products();
  switch (kind_) {
    case PolicyKind::kPb: {
      Offer s(n);
      for (int j : feasible.products()) {
        if (state.sales[j] < limits_[j]) s.insert(j);
      }
      return s;
    }
    case PolicyKind::kOp:
      for (const OfferPeriod& p : periods_) {
        if (state.t >= p.start && state.t < p.end) return p.offer.Intersect(feasible);
      }
      return Offer(n);
    case PolicyKind::kPc: {
      Offer s(n);
      for (int j : feasible.products()) {
        if (state.t <= closing_[j]) s.insert(j);
      }
      return s;
    }
    case PolicyKind::kOd:
      return pcnrm::OfferDynamic(instance, *bid_prices_, state.t, state.x,
                                 enumeration_limit_);
    case PolicyKind::kDp:
      return table_->BestOffer(table_->StepOf(state.t), state.x).Intersect(feasible);
    case PolicyKind::kOfferAll:
      return feasible;
  }
  return Offer(n);
}

Policy OpFromDurations(const OfferDurations& durations, OfferOrder order,
                       const std::vector<Offer>& given, std::uint64_t seed) {
  int n = 0;
  std::vector<std::pair<Offer, double>> seq;
  for (const auto& [offer, d] : durations) {
    if (d < 0.0) throw InputError("negative offer duration");
    n = offer.universe();
    if (d > 0.0) seq.emplace_back(offer, d);
  }
  if (order == OfferOrder::kGiven) {
    std::vector<std::pair<Offer, double>> ordered;
    for (const Offer& o : given) {
      auto it = durations.find(o);
      if (it != durations.end() && it->second > 0.0) ordered.emplace_back(o, it->second);
    }
    if (ordered.size() != seq.size()) {
      throw InputError("given order does not list every offer exactly once");
    }
    seq = std::move(ordered);
  } else if (order == OfferOrder::kRandom) {
    std::mt19937_64 rng(seed);
    std::shuffle(seq.begin(), seq.end(), rng);
  }
  std::vector<OfferPeriod> periods;
  double t = 0.0;
  for (const auto& [offer, d] : seq) {
    periods.push_back({offer, t, t + d});
    t += d;
  }
  return Policy::OfferSequence(n, std::move(periods));
}

bool NoReopeningCheck(const OfferTrace& trace) {
  if (trace.empty()) return true;
  Offer open = trace.front().second;
  for (const auto& [t, offer] : trace) {
    if (!offer.IsSubsetOf(open)) return false;
    open = offer;
  }
  return true;
}

}  // namespace pcnrm
