#ifndef PCNRM_MODEL_H_
#define PCNRM_MODEL_H_

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace pcnrm {

// ---------------------------------------------------------------------------
// Raw (unvalidated) instance description, keyed by opaque string ids.
// ---------------------------------------------------------------------------

struct ResourceSpec {
  std::string id;
  int capacity = 0;
};

struct ProductSpec {
  std::string id;
  double fare = 0.0;
  std::vector<std::string> resources;
};

// A ranking-based segment: customers walk `choices` in order. transitions[k]
// is the probability of continuing from choices[k] to choices[k + 1], so
// transitions.size() == choices.size() - 1.
struct PreferenceList {
  std::string id;
  double rate = 0.0;
  std::vector<std::string> choices;
  std::vector<double> transitions;
};

struct InstanceSpec {
  std::vector<ResourceSpec> resources;
  std::vector<ProductSpec> products;
  std::vector<PreferenceList> segments;
  double horizon = 0.0;
};

// ---------------------------------------------------------------------------
// Validated instance on dense indices.
// ---------------------------------------------------------------------------

struct Segment {
  std::string id;
  double rate = 0.0;
  std::vector<int> choices;   // product indices in preference order
  std::vector<double> theta;  // theta[k] = transition into rank k; theta[0] = 1
  std::vector<double> reach;  // reach[k] = prod_{i<=k} theta[i]
  std::vector<int> rank;      // rank[j] = position of product j, or -1

  int length() const { return static_cast<int>(choices.size()); }
};

class Instance;
struct ValidationResult;
ValidationResult Validate(const InstanceSpec& spec);

class Instance {
 public:
  int num_resources() const { return static_cast<int>(capacities_.size()); }
  int num_products() const { return static_cast<int>(fares_.size()); }
  int num_segments() const { return static_cast<int>(segments_.size()); }

  const std::vector<int>& capacities() const { return capacities_; }
  const std::vector<double>& fares() const { return fares_; }
  double fare(int j) const { return fares_[j]; }
  // Resource indices consumed by product j (column A_j).
  const std::vector<int>& product_resources(int j) const {
    return product_resources_[j];
  }
  // Products consuming resource i.
  const std::vector<int>& resource_products(int i) const {
    return resource_products_[i];
  }
  bool uses(int i, int j) const;
  const std::vector<Segment>& segments() const { return segments_; }
  const Segment& segment(int l) const { return segments_[l]; }
  double horizon() const { return horizon_; }

  const std::string& resource_id(int i) const { return resource_ids_[i]; }
  const std::string& product_id(int j) const { return product_ids_[j]; }
  std::optional<int> FindProduct(const std::string& id) const;
  std::optional<int> FindResource(const std::string& id) const;

  double total_rate() const;
  int total_capacity() const;
  // Expected arrivals over the horizon divided by total capacity.
  double load_factor() const;
  // Demand of j if it were the only product offered: sum_l rate_l P_l(j|{j}).
  double potential_demand(int j) const;

  // Modified copies. All keep the instance valid or throw.
  Instance WithCapacities(std::vector<int> capacities) const;
  Instance WithHorizon(double horizon) const;
  Instance WithRateMultiplier(double multiplier) const;
  // Rates rescaled so that load_factor() == target.
  Instance WithLoadFactor(double target) const;

  InstanceSpec ToSpec() const;

 private:
  friend ValidationResult Validate(const InstanceSpec& spec);

  std::vector<std::string> resource_ids_;
  std::vector<std::string> product_ids_;
  std::vector<int> capacities_;
  std::vector<double> fares_;
  std::vector<std::vector<int>> product_resources_;
  std::vector<std::vector<int>> resource_products_;
  std::vector<Segment> segments_;
  double horizon_ = 0.0;
  std::unordered_map<std::string, int> product_index_;
  std::unordered_map<std::string, int> resource_index_;
};

enum class ViolationKind {
  kDuplicateId,
  kDanglingReference,
  kNonPositiveHorizon,
  kNegativeCapacity,
  kNegativeFare,
  kNegativeRate,
  kTransitionOutOfRange,
  kTransitionCount,
  kDuplicateProductInList,
  kEmptyPreferenceList,
  kProductWithoutResources,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

struct ValidationResult {
  std::optional<Instance> instance;
  std::vector<Violation> violations;

  bool ok() const { return instance.has_value(); }
};

// Checks every structural invariant; returns the dense instance only when
// there are no violations.
ValidationResult Validate(const InstanceSpec& spec);

// Like Validate but throws Error(kInput) listing the violations.
Instance ValidateOrThrow(const InstanceSpec& spec);

// Three products u, v, w with fares 15/25/40; u and v share leg 1, w uses
// leg 2, both legs have capacity 1; one segment with rate 3 and list
// u -0.9-> v -0.8-> w; horizon 1.
InstanceSpec RunningExampleSpec();

// Merges two pure rankings (all transitions 1) where one list's choices are a
// prefix of the other's. The merged list carries the combined rate and
// transitions equal to the ratio of rates still walking at consecutive ranks.
PreferenceList MergeLists(const PreferenceList& a, const PreferenceList& b);

// Multinomial-logit segment over a set of products.
struct MnlSegment {
  std::string id;
  double rate = 0.0;
  std::vector<std::string> products;
  std::vector<double> weights;
  double no_purchase_weight = 0.0;
};

struct MnlConversion {
  std::vector<PreferenceList> lists;
  // Unconditional probability that an arriving customer follows each path
  // (and does not stop before its first product).
  std::vector<double> path_probability;
};

inline constexpr int kDefaultPermutationCap = 8;

// Enumerates every choice path (permutation) of an MNL segment. Each path is
// a preference list whose rate and transitions reproduce the MNL purchase
// probabilities for every offer set.
MnlConversion MnlToRanking(const MnlSegment& segment,
                           int max_products = kDefaultPermutationCap);

}  // namespace pcnrm

#endif  // PCNRM_MODEL_H_
