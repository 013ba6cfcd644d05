#include <algorithm>
#include <chrono>
#include <cmath>

#include "pcnrm/approx.h"
#include "pcnrm/error.h"

namespace pcnrm {

const char* ToString(ApproxKind kind) {
  switch (kind) {
    case ApproxKind::kCdlp: return "CDLP";
    case ApproxKind::kPcmp: return "PCMP";
    case ApproxKind::kPclp: return "PCLP";
    case ApproxKind::kCdpc: return "CDPC";
  }
  return "?";
}

std::optional<ApproxKind> ParseApproxKind(const std::string& name) {
  std::string lower;
  for (char c : name) lower.push_back(static_cast<char>(std::tolower(c)));
  if (lower == "cdlp") return ApproxKind::kCdlp;
  if (lower == "pcmp") return ApproxKind::kPcmp;
  if (lower == "pclp") return ApproxKind::kPclp;
  if (lower == "cdpc") return ApproxKind::kCdpc;
  return std::nullopt;
}

std::vector<std::vector<int>> Hierarchy::groups() const {
  std::vector<std::vector<int>> g(levels);
  for (int j = 0; j < static_cast<int>(rank.size()); ++j) g[rank[j] - 1].push_back(j);
  return g;
}

namespace {

std::vector<double> PseudoRevenues(const Instance& instance,
                                   const std::vector<double>& duals) {
  std::vector<double> a(instance.fares());
  for (int j = 0; j < instance.num_products(); ++j) {
    for (int i : instance.product_resources(j)) a[j] -= duals[i];
  }
  return a;
}

double OfferValue(const Instance& instance, const std::vector<double>& pseudo,
                  const Offer& offer) {
  double v = 0.0;
  for (const Segment& s : instance.segments()) {
    const int k = FirstOffered(s, offer);
    if (k >= 0) v += s.rate * s.reach[k] * pseudo[s.choices[k]];
  }
  return v;
}

std::vector<int> ConsideredProducts(const Instance& instance) {
  std::vector<char> in(instance.num_products(), 0);
  for (const Segment& s : instance.segments()) {
    for (int j : s.choices) in[j] = 1;
  }
  std::vector<int> u;
  for (int j = 0; j < instance.num_products(); ++j) {
    if (in[j]) u.push_back(j);
  }
  return u;
}

Offer PriceByEnumeration(const Instance& instance,
                         const std::vector<double>& pseudo,
                         const std::vector<int>& universe) {
  const int n = static_cast<int>(universe.size());
  std::vector<int> bit(instance.num_products(), -1);
  for (int b = 0; b < n; ++b) bit[universe[b]] = b;
  // Per segment: bit positions in preference order and weighted values.
  struct Walk {
    std::vector<int> bits;
    std::vector<double> value;
  };
  std::vector<Walk> walks;
  for (const Segment& s : instance.segments()) {
    if (s.rate <= 0.0) continue;
    Walk w;
    for (int k = 0; k < s.length(); ++k) {
      w.bits.push_back(bit[s.choices[k]]);
      w.value.push_back(s.rate * s.reach[k] * pseudo[s.choices[k]]);
    }
    walks.push_back(std::move(w));
  }
  std::uint64_t best_mask = 0;
  double best = 0.0;
  const std::uint64_t end = std::uint64_t{1} << n;
  for (std::uint64_t mask = 1; mask < end; ++mask) {
    double v = 0.0;
    for (const Walk& w : walks) {
      for (std::size_t k = 0; k < w.bits.size(); ++k) {
        if ((mask >> w.bits[k]) & 1) {
          v += w.value[k];
          break;
        }
      }
    }
    if (v > best) {
      best = v;
      best_mask = mask;
    }
  }
  Offer offer(instance.num_products());
  for (int b = 0; b < n; ++b) {
    if ((best_mask >> b) & 1) offer.insert(universe[b]);
  }
  return offer;
}

// y_j = 1 when j is offered; z_{l,k} = 1 when rank k is the first offered
// product of segment l.
Offer PriceByMip(const Instance& instance, const std::vector<double>& pseudo,
                 const std::vector<int>& universe, const SolverConfig& config) {
  LinearProgram lp;
  std::vector<int> y(instance.num_products(), -1);
  for (int j : universe) y[j] = lp.AddBinary(0.0, "y_" + instance.product_id(j));
  for (int l = 0; l < instance.num_segments(); ++l) {
    const Segment& s = instance.segment(l);
    if (s.rate <= 0.0) continue;
    for (int k = 0; k < s.length(); ++k) {
      const int j = s.choices[k];
      const int z = lp.AddVariable(
          0.0, 1.0, s.rate * s.reach[k] * pseudo[j],
          "z_" + s.id + "_" + std::to_string(k + 1));
      lp.AddConstraint({{z, 1.0}, {y[j], -1.0}}, Relation::kLessEqual, 0.0);
      std::vector<LinearTerm> lower = {{z, 1.0}, {y[j], -1.0}};
      for (int i = 0; i < k; ++i) {
        lp.AddConstraint({{z, 1.0}, {y[s.choices[i]], 1.0}},
                         Relation::kLessEqual, 1.0);
        lower.push_back({y[s.choices[i]], 1.0});
      }
      lp.AddConstraint(std::move(lower), Relation::kGreaterEqual, 0.0);
    }
  }
  const SolveOutcome out = SolveMip(lp, 0.0, std::nullopt, config);
  if (out.status != SolveStatus::kOptimal) {
    throw SolverError(std::string("pricing program ended with status ") +
                      ToString(out.status));
  }
  Offer offer(instance.num_products());
  for (int j : universe) {
    if (out.x[y[j]] > 0.5) offer.insert(j);
  }
  return offer;
}

}  // namespace

PricingResult PriceColumn(const Instance& instance,
                          const std::vector<double>& duals, double sigma,
                          PricingMode mode, int enumeration_limit,
                          const SolverConfig& config) {
  if (static_cast<int>(duals.size()) != instance.num_resources()) {
    throw InputError("dual vector has wrong dimension");
  }
  const std::vector<double> pseudo = PseudoRevenues(instance, duals);
  const std::vector<int> universe = ConsideredProducts(instance);
  const int n = static_cast<int>(universe.size());
  const int hard_limit = std::min(enumeration_limit, 62);
  if (mode == PricingMode::kEnumerate && n > hard_limit) {
    throw CapError("pricing enumeration over " + std::to_string(n) +
                   " products exceeds the cap of " +
                   std::to_string(hard_limit));
  }
  const bool enumerate =
      mode == PricingMode::kEnumerate || (mode == PricingMode::kAuto && n <= hard_limit);
  PricingResult result;
  result.offer = enumerate ? PriceByEnumeration(instance, pseudo, universe)
                           : PriceByMip(instance, pseudo, universe, config);
  result.value = OfferValue(instance, pseudo, result.offer) - sigma;
  return result;
}

ApproxSolution SolveCdlp(const Instance& instance, const CdlpOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const int n = instance.num_products();
  const int m = instance.num_resources();

  std::vector<Offer> columns = {Offer::All(n)};
  if (options.initial_columns) {
    for (const auto& [offer, duration] : *options.initial_columns) {
      if (offer.universe() != n) throw InputError("seed column has wrong universe");
      if (!offer.empty() &&
          std::find(columns.begin(), columns.end(), offer) == columns.end()) {
        columns.push_back(offer);
      }
    }
  }
  std::vector<std::vector<double>> rates;
  for (const Offer& c : columns) rates.push_back(SalesRates(instance, c));

  double scale = 1.0;
  for (const Segment& s : instance.segments()) {
    for (int j : s.choices) scale = std::max(scale, s.rate * instance.fare(j));
  }
  const double tol = 1e-9 * scale;

  ApproxSolution sol;
  sol.kind = options.initial_columns ? ApproxKind::kCdpc : ApproxKind::kCdlp;
  SolveOutcome master;
  int generated = 0;
  while (true) {
    LinearProgram lp;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      double obj = 0.0;
      for (int j = 0; j < n; ++j) obj += instance.fare(j) * rates[c][j];
      lp.AddVariable(0.0, kInfinity, obj, "D" + std::to_string(c));
    }
    for (int i = 0; i < m; ++i) {
      std::vector<LinearTerm> terms;
      for (std::size_t c = 0; c < columns.size(); ++c) {
        double use = 0.0;
        for (int j : instance.resource_products(i)) use += rates[c][j];
        terms.push_back({static_cast<int>(c), use});
      }
      lp.AddConstraint(std::move(terms), Relation::kLessEqual,
                       instance.capacities()[i], "cap_" + instance.resource_id(i));
    }
    std::vector<LinearTerm> horizon;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      horizon.push_back({static_cast<int>(c), 1.0});
    }
    lp.AddConstraint(std::move(horizon), Relation::kLessEqual, instance.horizon(),
                     "horizon");
    master = SolveLp(lp, options.solver);
    if (master.status != SolveStatus::kOptimal) {
      throw SolverError(std::string("CDLP master ended with status ") +
                        ToString(master.status));
    }
    ++sol.iterations;
    sol.objective_history.push_back(master.objective);

    const std::vector<double> pi(master.duals.begin(), master.duals.begin() + m);
    const PricingResult price =
        PriceColumn(instance, pi, master.duals[m], options.pricing,
                    options.enumeration_limit, options.solver);
    if (price.value <= tol || price.offer.empty() ||
        std::find(columns.begin(), columns.end(), price.offer) != columns.end()) {
      break;
    }
    if (++generated > options.column_cap) {
      throw CapError("column generation exceeded " +
                     std::to_string(options.column_cap) + " columns");
    }
    columns.push_back(price.offer);
    rates.push_back(SalesRates(instance, price.offer));
  }

  sol.objective = master.objective;
  sol.duals.assign(master.duals.begin(), master.duals.begin() + m);
  sol.horizon_dual = master.duals[m];
  sol.duals_exact = true;
  sol.sales.assign(n, 0.0);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const double d = master.x[c];
    if (d <= 1e-12) continue;
    for (int j = 0; j < n; ++j) sol.sales[j] += rates[c][j] * d;
    if (!columns[c].empty()) sol.durations[columns[c]] += d;
  }
  sol.solve_seconds = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return sol;
}

}  // namespace pcnrm
