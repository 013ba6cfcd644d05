#ifndef PCNRM_DP_H_
#define PCNRM_DP_H_

#include <cstdint>
#include <vector>

#include "pcnrm/model.h"
#include "pcnrm/offer.h"

namespace pcnrm {

// tau / ceil(10 * sum_l rate_l * tau): at most about one arrival per step.
double DefaultTimeStep(const Instance& instance);

struct DpOptions {
  double dt = 0.0;                       // 0 selects DefaultTimeStep
  std::int64_t state_cap = 50'000'000;   // time steps x capacity states
  int enumeration_limit = 16;            // largest |J(x)| enumerated
};

// Exact network value function V(s, x) on the grid t = s * dt, s = 0..steps,
// with V(steps, .) = 0. Every slice is kept together with the Bellman argmax.
class ValueTable {
 public:
  int steps() const { return steps_; }
  double dt() const { return dt_; }
  const std::vector<int>& capacities() const { return capacities_; }
  std::int64_t num_states() const { return num_states_; }

  std::int64_t StateIndex(const std::vector<int>& x) const;
  double Value(int step, const std::vector<int>& x) const;
  double Value(int step, std::int64_t state) const {
    return values_[static_cast<std::size_t>(step) * num_states_ + state];
  }
  // Bellman maximizer at (step, x), ties resolved toward larger offers.
  Offer BestOffer(int step, const std::vector<int>& x) const;
  // Grid step containing time t (clamped to [0, steps - 1]).
  int StepOf(double t) const;

 private:
  friend ValueTable SolveExactDp(const Instance& instance, const DpOptions& options);

  int steps_ = 0;
  double dt_ = 0.0;
  int num_products_ = 0;
  std::vector<int> capacities_;
  std::vector<std::int64_t> strides_;
  std::int64_t num_states_ = 0;
  std::vector<double> values_;
  std::vector<std::uint64_t> argmax_;  // product bitmask per (step, state)
};

// Backward recursion
//   V(s, x) = V(s+1, x) + max_{S in J(x)} sum_l rate_l dt sum_j P_l(j|S)
//                                           (r_j - dV_j(s+1, x)).
// Throws Error(kCap) when steps x states exceeds the cap or |J(x)| exceeds
// the enumeration limit.
ValueTable SolveExactDp(const Instance& instance, const DpOptions& options = {});

// Products in J(x): every resource they use has capacity left.
Offer AvailableProducts(const Instance& instance, const std::vector<int>& x);

// Threshold rule {j in J(x) : r_j >= V(s+1, x) - V(s+1, x - A_j)}.
Offer OptimalOffer(const Instance& instance, const ValueTable& table, int step,
                   const std::vector<int>& x);

// Per-resource value functions: resource i keeps its own DP, every other
// resource k used by a product is priced at pi_k.
class BidPriceModel {
 public:
  int steps() const { return steps_; }
  double dt() const { return dt_; }
  double beta() const { return beta_; }
  const std::vector<double>& duals() const { return duals_; }

  // V_i(step, x_i).
  double ResourceValue(int resource, int step, int x) const;
  // dV_j(step, x) = sum_{i in A_j} [beta dV_i(step, x_i) + (1 - beta) pi_i].
  double OpportunityCost(const Instance& instance, int product, int step,
                         const std::vector<int>& x) const;
  int StepOf(double t) const;

 private:
  friend BidPriceModel SolveDecomposition(const Instance& instance,
                                          const std::vector<double>& duals,
                                          double beta, const DpOptions& options,
                                          int threads);

  int steps_ = 0;
  double dt_ = 0.0;
  double beta_ = 1.0;
  std::vector<double> duals_;
  std::vector<int> capacities_;
  std::vector<std::vector<double>> values_;  // per resource: (steps+1) x (c_i+1)
};

BidPriceModel SolveDecomposition(const Instance& instance,
                                 const std::vector<double>& duals, double beta = 1.0,
                                 const DpOptions& options = {}, int threads = 0);

// argmax_{S in J(x)} sum_l rate_l sum_j P_l(j|S) (r_j - dV_j(step + 1, x)),
// ties toward larger offers.
Offer OfferDynamic(const Instance& instance, const BidPriceModel& model, double t,
                   const std::vector<int>& x, int enumeration_limit = 16);

// Number of values the OD policy evaluates: sum_i c_i * sum_l rate_l * tau.
double OdPolicySize(const Instance& instance);
// Same with arrivals scaled to load factor `lf`: sum_i c_i * lf * sum_i c_i.
double OdPolicySize(const Instance& instance, double lf);

}  // namespace pcnrm

#endif  // PCNRM_DP_H_
