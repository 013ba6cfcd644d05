#include "pcnrm/model.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "pcnrm/error.h"

namespace pcnrm {

bool Instance::uses(int i, int j) const {
  const auto& res = product_resources_[j];
  return std::find(res.begin(), res.end(), i) != res.end();
}

std::optional<int> Instance::FindProduct(const std::string& id) const {
  auto it = product_index_.find(id);
  if (it == product_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> Instance::FindResource(const std::string& id) const {
  auto it = resource_index_.find(id);
  if (it == resource_index_.end()) return std::nullopt;
  return it->second;
}

double Instance::total_rate() const {
  double total = 0.0;
  for (const Segment& s : segments_) total += s.rate;
  return total;
}

int Instance::total_capacity() const {
  return std::accumulate(capacities_.begin(), capacities_.end(), 0);
}

double Instance::load_factor() const {
  const int cap = total_capacity();
  if (cap == 0) return std::numeric_limits<double>::infinity();
  return total_rate() * horizon_ / cap;
}

double Instance::potential_demand(int j) const {
  double demand = 0.0;
  for (const Segment& s : segments_) {
    const int k = s.rank[j];
    if (k >= 0) demand += s.rate * s.reach[k];
  }
  return demand;
}

Instance Instance::WithCapacities(std::vector<int> capacities) const {
  if (capacities.size() != capacities_.size()) {
    throw InputError("capacity vector has wrong dimension");
  }
  for (int c : capacities) {
    if (c < 0) throw InputError("negative capacity");
  }
  Instance copy = *this;
  copy.capacities_ = std::move(capacities);
  return copy;
}

Instance Instance::WithHorizon(double horizon) const {
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
    throw InputError("horizon must be finite and nonnegative");
  }
  Instance copy = *this;
  copy.horizon_ = horizon;
  return copy;
}

Instance Instance::WithRateMultiplier(double multiplier) const {
  if (!(multiplier >= 0.0) || !std::isfinite(multiplier)) {
    throw InputError("rate multiplier must be finite and nonnegative");
  }
  Instance copy = *this;
  for (Segment& s : copy.segments_) s.rate *= multiplier;
  return copy;
}

Instance Instance::WithLoadFactor(double target) const {
  if (!(target > 0.0)) throw InputError("load factor must be positive");
  const double arrivals = total_rate() * horizon_;
  if (arrivals <= 0.0) throw InputError("instance has no arrivals to scale");
  return WithRateMultiplier(target * total_capacity() / arrivals);
}

InstanceSpec Instance::ToSpec() const {
  InstanceSpec spec;
  spec.horizon = horizon_;
  for (int i = 0; i < num_resources(); ++i) {
    spec.resources.push_back({resource_ids_[i], capacities_[i]});
  }
  for (int j = 0; j < num_products(); ++j) {
    ProductSpec p{product_ids_[j], fares_[j], {}};
    for (int i : product_resources_[j]) p.resources.push_back(resource_ids_[i]);
    spec.products.push_back(std::move(p));
  }
  for (const Segment& s : segments_) {
    PreferenceList list{s.id, s.rate, {}, {}};
    for (int k = 0; k < s.length(); ++k) {
      list.choices.push_back(product_ids_[s.choices[k]]);
      if (k > 0) list.transitions.push_back(s.theta[k]);
    }
    spec.segments.push_back(std::move(list));
  }
  return spec;
}

ValidationResult Validate(const InstanceSpec& spec) {
  ValidationResult result;
  auto add = [&](ViolationKind kind, std::string message) {
    result.violations.push_back({kind, std::move(message)});
  };

  if (!(spec.horizon > 0.0) || !std::isfinite(spec.horizon)) {
    add(ViolationKind::kNonPositiveHorizon, "horizon must be positive");
  }

  std::unordered_map<std::string, int> resource_index;
  for (std::size_t i = 0; i < spec.resources.size(); ++i) {
    const ResourceSpec& r = spec.resources[i];
    if (!resource_index.emplace(r.id, static_cast<int>(i)).second) {
      add(ViolationKind::kDuplicateId, "duplicate resource id '" + r.id + "'");
    }
    if (r.capacity < 0) {
      add(ViolationKind::kNegativeCapacity,
          "resource '" + r.id + "' has negative capacity");
    }
  }

  std::unordered_map<std::string, int> product_index;
  for (std::size_t j = 0; j < spec.products.size(); ++j) {
    const ProductSpec& p = spec.products[j];
    if (!product_index.emplace(p.id, static_cast<int>(j)).second) {
      add(ViolationKind::kDuplicateId, "duplicate product id '" + p.id + "'");
    }
    if (!(p.fare >= 0.0) || !std::isfinite(p.fare)) {
      add(ViolationKind::kNegativeFare, "product '" + p.id + "' has invalid fare");
    }
    if (p.resources.empty()) {
      add(ViolationKind::kProductWithoutResources,
          "product '" + p.id + "' uses no resource");
    }
    std::unordered_set<std::string> seen;
    for (const std::string& r : p.resources) {
      if (!resource_index.count(r)) {
        add(ViolationKind::kDanglingReference,
            "product '" + p.id + "' references unknown resource '" + r + "'");
      }
      if (!seen.insert(r).second) {
        add(ViolationKind::kDuplicateId,
            "product '" + p.id + "' lists resource '" + r + "' twice");
      }
    }
  }

  std::unordered_set<std::string> segment_ids;
  for (const PreferenceList& l : spec.segments) {
    if (!segment_ids.insert(l.id).second) {
      add(ViolationKind::kDuplicateId, "duplicate segment id '" + l.id + "'");
    }
    if (!(l.rate >= 0.0) || !std::isfinite(l.rate)) {
      add(ViolationKind::kNegativeRate, "segment '" + l.id + "' has invalid rate");
    }
    if (l.choices.empty()) {
      add(ViolationKind::kEmptyPreferenceList,
          "segment '" + l.id + "': empty preference list");
      continue;
    }
    if (l.transitions.size() + 1 != l.choices.size()) {
      add(ViolationKind::kTransitionCount,
          "segment '" + l.id + "': expected " +
              std::to_string(l.choices.size() - 1) + " transitions, got " +
              std::to_string(l.transitions.size()));
    }
    for (double theta : l.transitions) {
      if (!(theta > 0.0 && theta <= 1.0)) {
        std::ostringstream os;
        os << "segment '" << l.id << "': transition outside (0,1]: " << theta;
        add(ViolationKind::kTransitionOutOfRange, os.str());
      }
    }
    std::unordered_set<std::string> seen;
    for (const std::string& c : l.choices) {
      if (!product_index.count(c)) {
        add(ViolationKind::kDanglingReference,
            "segment '" + l.id + "' references unknown product '" + c + "'");
      }
      if (!seen.insert(c).second) {
        add(ViolationKind::kDuplicateProductInList,
            "segment '" + l.id + "' lists product '" + c + "' twice");
      }
    }
  }

  if (!result.violations.empty()) return result;

  Instance inst;
  inst.horizon_ = spec.horizon;
  inst.resource_index_ = std::move(resource_index);
  inst.product_index_ = std::move(product_index);
  for (const ResourceSpec& r : spec.resources) {
    inst.resource_ids_.push_back(r.id);
    inst.capacities_.push_back(r.capacity);
  }
  inst.resource_products_.resize(spec.resources.size());
  for (std::size_t j = 0; j < spec.products.size(); ++j) {
    const ProductSpec& p = spec.products[j];
    inst.product_ids_.push_back(p.id);
    inst.fares_.push_back(p.fare);
    std::vector<int> res;
    for (const std::string& r : p.resources) {
      const int i = inst.resource_index_.at(r);
      res.push_back(i);
      inst.resource_products_[i].push_back(static_cast<int>(j));
    }
    std::sort(res.begin(), res.end());
    inst.product_resources_.push_back(std::move(res));
  }
  const int n = static_cast<int>(spec.products.size());
  for (const PreferenceList& l : spec.segments) {
    Segment s;
    s.id = l.id;
    s.rate = l.rate;
    s.rank.assign(n, -1);
    double reach = 1.0;
    for (std::size_t k = 0; k < l.choices.size(); ++k) {
      const int j = inst.product_index_.at(l.choices[k]);
      const double theta = k == 0 ? 1.0 : l.transitions[k - 1];
      reach *= theta;
      s.rank[j] = static_cast<int>(k);
      s.choices.push_back(j);
      s.theta.push_back(theta);
      s.reach.push_back(reach);
    }
    inst.segments_.push_back(std::move(s));
  }
  result.instance = std::move(inst);
  return result;
}

Instance ValidateOrThrow(const InstanceSpec& spec) {
  ValidationResult r = Validate(spec);
  if (!r.ok()) {
    std::string msg = "invalid instance:";
    for (const Violation& v : r.violations) msg += "\n  " + v.message;
    throw InputError(msg);
  }
  return std::move(*r.instance);
}

InstanceSpec RunningExampleSpec() {
  InstanceSpec spec;
  spec.resources = {{"leg1", 1}, {"leg2", 1}};
  spec.products = {{"u", 15.0, {"leg1"}},
                   {"v", 25.0, {"leg1"}},
                   {"w", 40.0, {"leg2"}}};
  spec.segments = {{"l", 3.0, {"u", "v", "w"}, {0.9, 0.8}}};
  spec.horizon = 1.0;
  return spec;
}

PreferenceList MergeLists(const PreferenceList& a, const PreferenceList& b) {
  for (const PreferenceList* l : {&a, &b}) {
    for (double theta : l->transitions) {
      if (theta != 1.0) {
        throw InputError("cannot merge list '" + l->id +
                         "': transitions must all equal 1");
      }
    }
    if (l->choices.empty()) throw InputError("cannot merge an empty list");
  }
  const PreferenceList& longer = a.choices.size() >= b.choices.size() ? a : b;
  const PreferenceList& shorter = &longer == &a ? b : a;
  if (!std::equal(shorter.choices.begin(), shorter.choices.end(),
                  longer.choices.begin())) {
    throw InputError("cannot merge lists '" + a.id + "' and '" + b.id +
                     "': incompatible orderings");
  }

  PreferenceList merged;
  merged.id = a.id + "+" + b.id;
  merged.rate = a.rate + b.rate;
  merged.choices = longer.choices;
  // Rate still walking at rank k (0-based).
  auto walking = [&](std::size_t k) {
    double r = 0.0;
    if (k < a.choices.size()) r += a.rate;
    if (k < b.choices.size()) r += b.rate;
    return r;
  };
  for (std::size_t k = 1; k < merged.choices.size(); ++k) {
    const double prev = walking(k - 1);
    merged.transitions.push_back(prev > 0.0 ? walking(k) / prev : 1.0);
  }
  return merged;
}

MnlConversion MnlToRanking(const MnlSegment& segment, int max_products) {
  const int n = static_cast<int>(segment.products.size());
  if (n == 0) throw InputError("MNL segment '" + segment.id + "' has no products");
  if (segment.weights.size() != segment.products.size()) {
    throw InputError("MNL segment '" + segment.id + "': weight count mismatch");
  }
  for (double w : segment.weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw InputError("MNL segment '" + segment.id +
                       "': product weights must be positive");
    }
  }
  if (!(segment.no_purchase_weight >= 0.0)) {
    throw InputError("MNL segment '" + segment.id +
                     "': no-purchase weight must be nonnegative");
  }
  if (n > max_products) {
    throw CapError("MNL segment '" + segment.id + "': path explosion (" +
                   std::to_string(n) + " products exceeds cap of " +
                   std::to_string(max_products) + ")");
  }

  const double w0 = segment.no_purchase_weight;
  MnlConversion out;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  int path = 0;
  do {
    // remaining[i] = total weight of perm[i..n-1].
    std::vector<double> remaining(n + 1, 0.0);
    for (int i = n - 1; i >= 0; --i) {
      remaining[i] = remaining[i + 1] + segment.weights[perm[i]];
    }
    // Joint probability of this product order with the no-purchase option
    // ranked right after the first k products, for k = 0..n.
    std::vector<double> joint(n + 1, 0.0);
    for (int k = 0; k <= n; ++k) {
      double p = 1.0;
      for (int i = 0; i < k; ++i) {
        p *= segment.weights[perm[i]] / (remaining[i] + w0);
      }
      if (k < n) {
        p *= w0 / (remaining[k] + w0);
        for (int i = k; i < n; ++i) {
          p *= segment.weights[perm[i]] / remaining[i];
        }
      }
      joint[k] = p;
    }
    // after[k] = P(order, no-purchase ranked after the first k products).
    std::vector<double> after(n + 1, 0.0);
    for (int k = n; k >= 0; --k) {
      after[k] = joint[k] + (k < n ? after[k + 1] : 0.0);
    }

    PreferenceList list;
    list.id = segment.id + "_p" + std::to_string(++path);
    list.rate = segment.rate * after[1];
    for (int i = 0; i < n; ++i) {
      list.choices.push_back(segment.products[perm[i]]);
      if (i > 0) list.transitions.push_back(after[i + 1] / after[i]);
    }
    out.lists.push_back(std::move(list));
    out.path_probability.push_back(after[1]);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

}  // namespace pcnrm
