#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <numeric>
#include <thread>

#include "pcnrm/error.h"
#include "pcnrm/pcp.h"

namespace pcnrm {

std::optional<HierarchyRule> ParseHierarchyRule(const std::string& name) {
  if (name == "price") return HierarchyRule::kPrice;
  if (name == "price-per-resource") return HierarchyRule::kPricePerResource;
  if (name == "from-solution") return HierarchyRule::kFromSolution;
  if (name == "user-nesting") return HierarchyRule::kUserNesting;
  return std::nullopt;
}

namespace {

Hierarchy StrictRanking(const std::vector<int>& order) {
  Hierarchy h;
  h.rank.assign(order.size(), 0);
  for (std::size_t k = 0; k < order.size(); ++k) h.rank[order[k]] = static_cast<int>(k) + 1;
  h.levels = static_cast<int>(order.size());
  return h;
}

// Ascending by key, then potential demand, then index.
Hierarchy RankByKey(const Instance& instance, const std::vector<double>& key) {
  std::vector<int> order(instance.num_products());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> demand(instance.num_products());
  for (int j = 0; j < instance.num_products(); ++j) {
    demand[j] = instance.potential_demand(j);
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (key[a] != key[b]) return key[a] < key[b];
    return demand[a] < demand[b];
  });
  return StrictRanking(order);
}

}  // namespace

Hierarchy MakeHierarchy(const Instance& instance, HierarchyRule rule,
                        const std::optional<ClosingTimes>& closing,
                        const std::vector<int>& nesting) {
  const int n = instance.num_products();
  switch (rule) {
    case HierarchyRule::kPrice:
      return RankByKey(instance, instance.fares());
    case HierarchyRule::kPricePerResource: {
      std::vector<double> key(n);
      for (int j = 0; j < n; ++j) {
        key[j] = instance.fare(j) /
                 static_cast<double>(instance.product_resources(j).size());
      }
      return RankByKey(instance, key);
    }
    case HierarchyRule::kFromSolution: {
      if (!closing || closing->size() != n) {
        throw InputError("from-solution hierarchy needs one closing time per product");
      }
      std::vector<int> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return (*closing)[a] < (*closing)[b]; });
      Hierarchy h;
      h.rank.assign(n, 0);
      for (int k = 0; k < n; ++k) {
        if (k == 0 || (*closing)[order[k]] - (*closing)[order[k - 1]] > 1e-9) ++h.levels;
        h.rank[order[k]] = h.levels;
      }
      return h;
    }
    case HierarchyRule::kUserNesting: {
      std::vector<char> seen(n, 0);
      for (int j : nesting) {
        if (j < 0 || j >= n) throw InputError("nesting references unknown product");
        if (seen[j]) {
          throw InputError("nesting lists '" + instance.product_id(j) + "' twice");
        }
        seen[j] = 1;
      }
      for (int j = 0; j < n; ++j) {
        if (!seen[j]) {
          throw InputError("nesting is missing product '" + instance.product_id(j) + "'");
        }
      }
      // Highest closing time first, so the last entry gets rank 1.
      return StrictRanking(std::vector<int>(nesting.rbegin(), nesting.rend()));
    }
  }
  throw InputError("unknown hierarchy rule");
}

OfferDurations ClosingsToDurations(const ClosingTimes& closing) {
  const int n = closing.size();
  std::vector<double> levels;
  for (double t : closing.times) {
    if (t > 0.0) levels.push_back(t);
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  OfferDurations out;
  double previous = 0.0;
  for (double level : levels) {
    Offer s(n);
    for (int j = 0; j < n; ++j) {
      if (closing[j] >= level) s.insert(j);
    }
    out[s] = level - previous;
    previous = level;
  }
  return out;
}

namespace {

ClosingTimes AccumulateChain(const std::vector<std::pair<Offer, double>>& chain,
                             int universe) {
  ClosingTimes t;
  t.times.assign(universe, 0.0);
  const Offer* previous = nullptr;
  for (const auto& [offer, duration] : chain) {
    if (!(duration > 0.0) || offer.empty()) continue;
    if (offer.universe() != universe) throw InputError("offer has wrong universe");
    if (previous && !offer.IsSubsetOf(*previous)) {
      throw InputError("reopening detected: offers are not nested");
    }
    for (int j : offer.products()) t.times[j] += duration;
    previous = &offer;
  }
  return t;
}

}  // namespace

ClosingTimes DurationsToClosings(const OfferDurations& durations, int universe) {
  std::vector<std::pair<Offer, double>> chain(durations.begin(), durations.end());
  std::stable_sort(chain.begin(), chain.end(), [](const auto& a, const auto& b) {
    return a.first.size() > b.first.size();
  });
  return AccumulateChain(chain, universe);
}

ClosingTimes DurationsToClosings(
    const std::vector<std::pair<Offer, double>>& sequence, int universe) {
  return AccumulateChain(sequence, universe);
}

std::vector<double> FiniteDifferenceDuals(
    const Instance& instance, double base_objective,
    const std::function<double(const Instance&)>& solve, int threads) {
  const int m = instance.num_resources();
  if (threads <= 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<double> pi(m, 0.0);
  std::vector<int> todo;
  for (int i = 0; i < m; ++i) {
    if (!instance.resource_products(i).empty()) todo.push_back(i);
  }
  for (std::size_t begin = 0; begin < todo.size(); begin += threads) {
    const std::size_t end = std::min(todo.size(), begin + threads);
    std::vector<std::future<double>> jobs;
    for (std::size_t k = begin; k < end; ++k) {
      std::vector<int> caps = instance.capacities();
      ++caps[todo[k]];
      Instance bumped = instance.WithCapacities(std::move(caps));
      jobs.push_back(std::async(std::launch::async, [&solve, bumped] {
        return solve(bumped);
      }));
    }
    for (std::size_t k = begin; k < end; ++k) {
      pi[todo[k]] = jobs[k - begin].get() - base_objective;
    }
  }
  return pi;
}

ApproxSolution SolveCdpc(const Instance& instance, const PcpOptions& pcp,
                         const CdlpOptions& cdlp) {
  const auto start = std::chrono::steady_clock::now();
  PcpOptions plain = pcp;
  plain.compute_duals = false;
  const ApproxSolution closing = SolvePcmp(instance, plain);
  CdlpOptions seeded = cdlp;
  seeded.initial_columns = closing.durations;
  ApproxSolution sol = SolveCdlp(instance, seeded);
  sol.kind = ApproxKind::kCdpc;
  sol.solve_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

ApproxSolution SolveApprox(const Instance& instance, ApproxKind kind,
                           const PcpOptions& pcp, const CdlpOptions& cdlp,
                           const std::optional<Hierarchy>& hierarchy) {
  switch (kind) {
    case ApproxKind::kCdlp: return SolveCdlp(instance, cdlp);
    case ApproxKind::kPcmp: return SolvePcmp(instance, pcp);
    case ApproxKind::kPclp:
      return SolvePclp(instance,
                       hierarchy ? *hierarchy
                                 : MakeHierarchy(instance, HierarchyRule::kPrice),
                       pcp);
    case ApproxKind::kCdpc: return SolveCdpc(instance, pcp, cdlp);
  }
  throw InputError("unknown approximation");
}

}  // namespace pcnrm
