#include "pcnrm/dp.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <future>
#include <thread>

#include "pcnrm/choice.h"
#include "pcnrm/error.h"

namespace pcnrm {

double DefaultTimeStep(const Instance& instance) {
  const double tau = instance.horizon();
  const double arrivals = instance.total_rate() * tau;
  const double steps = std::max(1.0, std::ceil(10.0 * arrivals));
  return tau / steps;
}

namespace {

// Maximizes sum_l rate_l sum_j P_l(j|S) pseudo_j over subsets S of the
// considered products in `available`. Returns the value and the best set
// (plus every available product nobody considers), ties toward larger sets.
class AssortmentSearch {
 public:
  AssortmentSearch(const Instance& instance, int limit) : instance_(instance) {
    std::vector<char> in(instance.num_products(), 0);
    for (const Segment& s : instance.segments()) {
      for (int j : s.choices) in[j] = 1;
    }
    for (int j = 0; j < instance.num_products(); ++j) {
      if (in[j]) considered_.push_back(j);
    }
    bit_.assign(instance.num_products(), -1);
    for (std::size_t b = 0; b < considered_.size(); ++b) {
      bit_[considered_[b]] = static_cast<int>(b);
    }
    // The limit applies to the available products of each call.
    limit_ = std::min(limit, 62);
  }

  std::pair<double, Offer> Best(const std::vector<double>& pseudo,
                                const Offer& available) const {
    std::vector<int> bits;
    for (std::size_t b = 0; b < considered_.size(); ++b) {
      if (available.contains(considered_[b])) bits.push_back(static_cast<int>(b));
    }
    if (static_cast<int>(bits.size()) > limit_) {
      throw CapError("offer enumeration over " + std::to_string(bits.size()) +
                     " available products exceeds the limit of " +
                     std::to_string(limit_));
    }
    double scale = 1.0;
    for (int j : considered_) scale = std::max(scale, std::abs(pseudo[j]));
    const double eps = 1e-12 * scale * std::max(1.0, instance_.total_rate());

    double best = 0.0;
    std::uint64_t best_mask = 0;
    const std::uint64_t count = std::uint64_t{1} << bits.size();
    for (std::uint64_t sub = 1; sub < count; ++sub) {
      std::uint64_t mask = 0;
      for (std::size_t k = 0; k < bits.size(); ++k) {
        if ((sub >> k) & 1) mask |= std::uint64_t{1} << bits[k];
      }
      double v = 0.0;
      for (const Segment& s : instance_.segments()) {
        for (int k = 0; k < s.length(); ++k) {
          const int j = s.choices[k];
          if ((mask >> bit_[j]) & 1) {
            v += s.rate * s.reach[k] * pseudo[j];
            break;
          }
        }
      }
      if (v > best + eps ||
          (v >= best - eps && std::popcount(mask) > std::popcount(best_mask))) {
        if (v > best) best = v;
        best_mask = mask;
      }
    }
    Offer offer(instance_.num_products());
    for (int j = 0; j < instance_.num_products(); ++j) {
      if (!available.contains(j)) continue;
      if (bit_[j] < 0 || ((best_mask >> bit_[j]) & 1)) offer.insert(j);
    }
    return {best, offer};
  }

 private:
  const Instance& instance_;
  std::vector<int> considered_;
  std::vector<int> bit_;
  int limit_ = 16;
};

}  // namespace

Offer AvailableProducts(const Instance& instance, const std::vector<int>& x) {
  Offer offer(instance.num_products());
  for (int j = 0; j < instance.num_products(); ++j) {
    bool ok = true;
    for (int i : instance.product_resources(j)) ok = ok && x[i] >= 1;
    if (ok) offer.insert(j);
  }
  return offer;
}

std::int64_t ValueTable::StateIndex(const std::vector<int>& x) const {
  std::int64_t idx = 0;
  for (std::size_t i = 0; i < capacities_.size(); ++i) {
    if (x[i] < 0 || x[i] > capacities_[i]) throw InputError("state outside the table");
    idx += strides_[i] * x[i];
  }
  return idx;
}

double ValueTable::Value(int step, const std::vector<int>& x) const {
  return Value(step, StateIndex(x));
}

Offer ValueTable::BestOffer(int step, const std::vector<int>& x) const {
  if (step < 0 || step >= steps_) return Offer(num_products_);
  const std::uint64_t mask =
      argmax_[static_cast<std::size_t>(step) * num_states_ + StateIndex(x)];
  Offer offer(num_products_);
  for (int j = 0; j < num_products_; ++j) {
    if ((mask >> j) & 1) offer.insert(j);
  }
  return offer;
}

int ValueTable::StepOf(double t) const {
  return std::clamp(static_cast<int>(std::floor(t / dt_)), 0, steps_ - 1);
}

ValueTable SolveExactDp(const Instance& instance, const DpOptions& options) {
  if (instance.num_products() > 64) {
    throw CapError("exact DP supports at most 64 products");
  }
  ValueTable table;
  const double tau = instance.horizon();
  table.dt_ = options.dt > 0.0 ? options.dt : DefaultTimeStep(instance);
  table.steps_ = std::max(1, static_cast<int>(std::llround(std::ceil(tau / table.dt_ - 1e-9))));
  table.dt_ = tau / table.steps_;
  table.num_products_ = instance.num_products();
  table.capacities_ = instance.capacities();
  table.num_states_ = 1;
  for (int c : table.capacities_) {
    table.strides_.push_back(table.num_states_);
    table.num_states_ *= c + 1;
    if (table.num_states_ > options.state_cap) break;
  }
  const double cells = static_cast<double>(table.num_states_) * (table.steps_ + 1);
  if (cells > static_cast<double>(options.state_cap)) {
    throw CapError("exact DP needs " + std::to_string(static_cast<long long>(cells)) +
                   " cells, above the cap of " + std::to_string(options.state_cap));
  }

  const int n = instance.num_products();
  const int m = instance.num_resources();
  const std::int64_t S = table.num_states_;
  table.values_.assign(static_cast<std::size_t>(table.steps_ + 1) * S, 0.0);
  table.argmax_.assign(static_cast<std::size_t>(table.steps_) * S, 0);

  // Decode states once.
  std::vector<std::vector<int>> states(S, std::vector<int>(m));
  std::vector<Offer> avail;
  std::vector<std::vector<std::int64_t>> down(S, std::vector<std::int64_t>(n, -1));
  for (std::int64_t idx = 0; idx < S; ++idx) {
    std::int64_t rest = idx;
    for (int i = 0; i < m; ++i) {
      states[idx][i] = static_cast<int>(rest % (table.capacities_[i] + 1));
      rest /= table.capacities_[i] + 1;
    }
    avail.push_back(AvailableProducts(instance, states[idx]));
    for (int j = 0; j < n; ++j) {
      if (!avail[idx].contains(j)) continue;
      std::int64_t k = idx;
      for (int i : instance.product_resources(j)) k -= table.strides_[i];
      down[idx][j] = k;
    }
  }

  const AssortmentSearch search(instance, options.enumeration_limit);
  const double dt = table.dt_;
  std::vector<double> pseudo(n);
  for (int s = table.steps_ - 1; s >= 0; --s) {
    const double* next = &table.values_[static_cast<std::size_t>(s + 1) * S];
    double* cur = &table.values_[static_cast<std::size_t>(s) * S];
    for (std::int64_t idx = 0; idx < S; ++idx) {
      for (int j = 0; j < n; ++j) {
        pseudo[j] = down[idx][j] >= 0 ? instance.fare(j) - (next[idx] - next[down[idx][j]])
                                      : 0.0;
      }
      const auto [value, offer] = search.Best(pseudo, avail[idx]);
      cur[idx] = next[idx] + dt * value;
      std::uint64_t mask = 0;
      for (int j : offer.products()) mask |= std::uint64_t{1} << j;
      table.argmax_[static_cast<std::size_t>(s) * S + idx] = mask;
    }
  }
  return table;
}

Offer OptimalOffer(const Instance& instance, const ValueTable& table, int step,
                   const std::vector<int>& x) {
  const Offer avail = AvailableProducts(instance, x);
  Offer offer(instance.num_products());
  const int next = std::min(step + 1, table.steps());
  const double here = table.Value(next, x);
  for (int j : avail.products()) {
    std::vector<int> y = x;
    for (int i : instance.product_resources(j)) --y[i];
    if (instance.fare(j) >= here - table.Value(next, y)) offer.insert(j);
  }
  return offer;
}

double BidPriceModel::ResourceValue(int resource, int step, int x) const {
  return values_[resource][static_cast<std::size_t>(step) * (capacities_[resource] + 1) + x];
}

double BidPriceModel::OpportunityCost(const Instance& instance, int product, int step,
                                      const std::vector<int>& x) const {
  double cost = 0.0;
  for (int i : instance.product_resources(product)) {
    double dv = 0.0;
    if (x[i] >= 1) dv = ResourceValue(i, step, x[i]) - ResourceValue(i, step, x[i] - 1);
    cost += beta_ * dv + (1.0 - beta_) * duals_[i];
  }
  return cost;
}

int BidPriceModel::StepOf(double t) const {
  return std::clamp(static_cast<int>(std::floor(t / dt_)), 0, steps_ - 1);
}

BidPriceModel SolveDecomposition(const Instance& instance,
                                 const std::vector<double>& duals, double beta,
                                 const DpOptions& options, int threads) {
  if (static_cast<int>(duals.size()) != instance.num_resources()) {
    throw InputError("dual vector has wrong dimension");
  }
  if (!(beta >= 0.0 && beta <= 1.0)) throw InputError("beta must lie in [0,1]");
  BidPriceModel model;
  const double tau = instance.horizon();
  model.dt_ = options.dt > 0.0 ? options.dt : DefaultTimeStep(instance);
  model.steps_ = std::max(1, static_cast<int>(std::llround(std::ceil(tau / model.dt_ - 1e-9))));
  model.dt_ = tau / model.steps_;
  model.beta_ = beta;
  model.duals_ = duals;
  model.capacities_ = instance.capacities();
  const int m = instance.num_resources();
  const int n = instance.num_products();
  for (int i = 0; i < m; ++i) {
    const double cells = static_cast<double>(model.capacities_[i] + 1) * (model.steps_ + 1);
    if (cells > static_cast<double>(options.state_cap)) {
      throw CapError("decomposition table of resource " + instance.resource_id(i) +
                     " exceeds the state cap");
    }
  }
  const AssortmentSearch search(instance, options.enumeration_limit);
  const Offer all = Offer::All(n);

  auto solve_resource = [&](int i) {
    const int c = model.capacities_[i];
    const int width = c + 1;
    std::vector<double> v(static_cast<std::size_t>(model.steps_ + 1) * width, 0.0);
    std::vector<double> other(n, 0.0);
    for (int j = 0; j < n; ++j) {
      for (int k : instance.product_resources(j)) {
        if (k != i) other[j] += duals[k];
      }
    }
    std::vector<Offer> avail(width, all);
    for (int j : instance.resource_products(i)) avail[0].erase(j);
    std::vector<double> pseudo(n);
    for (int s = model.steps_ - 1; s >= 0; --s) {
      const double* next = &v[static_cast<std::size_t>(s + 1) * width];
      double* cur = &v[static_cast<std::size_t>(s) * width];
      for (int x = 0; x < width; ++x) {
        for (int j = 0; j < n; ++j) {
          pseudo[j] = instance.fare(j) - other[j];
          if (x >= 1 && instance.uses(i, j)) pseudo[j] -= next[x] - next[x - 1];
        }
        cur[x] = next[x] + model.dt_ * search.Best(pseudo, avail[x]).first;
      }
    }
    return v;
  };

  if (threads <= 0) threads = std::max(1u, std::thread::hardware_concurrency());
  model.values_.resize(m);
  for (int begin = 0; begin < m; begin += threads) {
    const int end = std::min(m, begin + threads);
    std::vector<std::future<std::vector<double>>> jobs;
    for (int i = begin; i < end; ++i) {
      jobs.push_back(std::async(std::launch::async, solve_resource, i));
    }
    for (int i = begin; i < end; ++i) model.values_[i] = jobs[i - begin].get();
  }
  return model;
}

Offer OfferDynamic(const Instance& instance, const BidPriceModel& model, double t,
                   const std::vector<int>& x, int enumeration_limit) {
  const int next = std::min(model.StepOf(t) + 1, model.steps());
  const Offer avail = AvailableProducts(instance, x);
  std::vector<double> pseudo(instance.num_products(), 0.0);
  for (int j : avail.products()) {
    pseudo[j] = instance.fare(j) - model.OpportunityCost(instance, j, next, x);
  }
  const AssortmentSearch search(instance, enumeration_limit);
  return search.Best(pseudo, avail).second;
}

double OdPolicySize(const Instance& instance) {
  return instance.total_capacity() * instance.total_rate() * instance.horizon();
}

double OdPolicySize(const Instance& instance, double lf) {
  const double cap = instance.total_capacity();
  return cap * lf * cap;
}

}  // namespace pcnrm
