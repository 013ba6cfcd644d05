#ifndef PCNRM_CHOICE_H_
#define PCNRM_CHOICE_H_

#include <optional>
#include <random>
#include <vector>

#include "pcnrm/model.h"
#include "pcnrm/offer.h"

namespace pcnrm {

// Per-product closing times T_j in [0, horizon]. Product j is on sale while
// t <= T_j.
struct ClosingTimes {
  std::vector<double> times;

  double operator[](int j) const { return times[j]; }
  int size() const { return static_cast<int>(times.size()); }
};

// Per segment l and rank k: cumulative[l][k] is the largest closing time among
// the first k+1 listed products and durations[l][k] the time during which the
// segment buys its (k+1)-th choice.
struct ChoiceDurations {
  std::vector<std::vector<double>> cumulative;
  std::vector<std::vector<double>> durations;
};

// P_l(j|S): the reach of j in l's list if j is the first offered product of
// the list, zero otherwise.
double Probability(const Segment& segment, int product, const Offer& offer);

// Index in segment.choices of the first offered product, or -1.
int FirstOffered(const Segment& segment, const Offer& offer);

// Purchase rate of each product under offer S: sum_l rate_l P_l(j|S).
std::vector<double> SalesRates(const Instance& instance, const Offer& offer);

// Draws one customer of the segment facing offer S. Returns the purchased
// product, or nullopt for no purchase.
std::optional<int> SampleChoice(const Segment& segment, const Offer& offer,
                                std::mt19937_64& rng);

// Number of ranks a customer is willing to walk before giving up (>= 1),
// drawn so that P(depth > k) = reach[k]. Combined with ChooseWithDepth this
// reproduces SampleChoice while decoupling randomness from the offer.
int SampleDepth(const Segment& segment, std::mt19937_64& rng);
std::optional<int> ChooseWithDepth(const Segment& segment, const Offer& offer,
                                   int depth);

void CheckClosingTimes(const Instance& instance, const ClosingTimes& closing);

// Cumulative-maximum form: D_l^k = T_l^k - T_l^{k-1}.
ChoiceDurations DurationsFromClosings(const Instance& instance,
                                      const ClosingTimes& closing);

// Positive-part form: D_l^k = (T_{l^k} - max_{g<k} T_{l^g})^+. Same values as
// DurationsFromClosings; kept as an independent route.
std::vector<std::vector<double>> DurationsPositivePart(
    const Instance& instance, const ClosingTimes& closing);

// Fluid sales of each product under a closing policy:
// Q_j = sum_l rate_l P_l(j|{j}) D_l^{rank of j}.
std::vector<double> PcpSales(const Instance& instance,
                             const ClosingTimes& closing);

double Revenue(const Instance& instance, const std::vector<double>& sales);

}  // namespace pcnrm

#endif  // PCNRM_CHOICE_H_
