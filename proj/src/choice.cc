#include "pcnrm/choice.h"

#include <algorithm>
#include <string>

#include "pcnrm/error.h"

namespace pcnrm {

int FirstOffered(const Segment& segment, const Offer& offer) {
  for (int k = 0; k < segment.length(); ++k) {
    if (offer.contains(segment.choices[k])) return k;
  }
  return -1;
}

double Probability(const Segment& segment, int product, const Offer& offer) {
  if (product < 0 || product >= static_cast<int>(segment.rank.size())) return 0.0;
  const int k = segment.rank[product];
  if (k < 0 || !offer.contains(product)) return 0.0;
  for (int g = 0; g < k; ++g) {
    if (offer.contains(segment.choices[g])) return 0.0;
  }
  return segment.reach[k];
}

std::vector<double> SalesRates(const Instance& instance, const Offer& offer) {
  std::vector<double> rates(instance.num_products(), 0.0);
  for (const Segment& s : instance.segments()) {
    const int k = FirstOffered(s, offer);
    if (k >= 0) rates[s.choices[k]] += s.rate * s.reach[k];
  }
  return rates;
}

std::optional<int> SampleChoice(const Segment& segment, const Offer& offer,
                                std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int k = 0; k < segment.length(); ++k) {
    if (k > 0 && !(unif(rng) < segment.theta[k])) return std::nullopt;
    if (offer.contains(segment.choices[k])) return segment.choices[k];
  }
  return std::nullopt;
}

int SampleDepth(const Segment& segment, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int depth = 1;
  while (depth < segment.length() && unif(rng) < segment.theta[depth]) ++depth;
  return depth;
}

std::optional<int> ChooseWithDepth(const Segment& segment, const Offer& offer,
                                   int depth) {
  const int limit = std::min(depth, segment.length());
  for (int k = 0; k < limit; ++k) {
    if (offer.contains(segment.choices[k])) return segment.choices[k];
  }
  return std::nullopt;
}

void CheckClosingTimes(const Instance& instance, const ClosingTimes& closing) {
  if (closing.size() != instance.num_products()) {
    throw InputError("closing-time vector has wrong dimension");
  }
  for (int j = 0; j < closing.size(); ++j) {
    const double t = closing[j];
    if (!(t >= 0.0 && t <= instance.horizon() * (1 + 1e-12) + 1e-12)) {
      throw InputError("closing time of '" + instance.product_id(j) +
                       "' outside [0, horizon]");
    }
  }
}

ChoiceDurations DurationsFromClosings(const Instance& instance,
                                      const ClosingTimes& closing) {
  CheckClosingTimes(instance, closing);
  ChoiceDurations out;
  for (const Segment& s : instance.segments()) {
    std::vector<double> cum(s.length()), dur(s.length());
    double prev = 0.0;
    for (int k = 0; k < s.length(); ++k) {
      const double cur = std::max(prev, closing[s.choices[k]]);
      cum[k] = cur;
      dur[k] = cur - prev;
      prev = cur;
    }
    out.cumulative.push_back(std::move(cum));
    out.durations.push_back(std::move(dur));
  }
  return out;
}

std::vector<std::vector<double>> DurationsPositivePart(
    const Instance& instance, const ClosingTimes& closing) {
  CheckClosingTimes(instance, closing);
  std::vector<std::vector<double>> out;
  for (const Segment& s : instance.segments()) {
    std::vector<double> dur(s.length());
    for (int k = 0; k < s.length(); ++k) {
      double before = 0.0;
      for (int g = 0; g < k; ++g) before = std::max(before, closing[s.choices[g]]);
      dur[k] = std::max(0.0, closing[s.choices[k]] - before);
    }
    out.push_back(std::move(dur));
  }
  return out;
}

std::vector<double> PcpSales(const Instance& instance,
                             const ClosingTimes& closing) {
  const ChoiceDurations d = DurationsFromClosings(instance, closing);
  std::vector<double> sales(instance.num_products(), 0.0);
  for (int l = 0; l < instance.num_segments(); ++l) {
    const Segment& s = instance.segment(l);
    for (int k = 0; k < s.length(); ++k) {
      sales[s.choices[k]] += s.rate * s.reach[k] * d.durations[l][k];
    }
  }
  return sales;
}

double Revenue(const Instance& instance, const std::vector<double>& sales) {
  double r = 0.0;
  for (int j = 0; j < instance.num_products(); ++j) r += instance.fare(j) * sales[j];
  return r;
}

}  // namespace pcnrm
