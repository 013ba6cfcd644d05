#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include "pcnrm/error.h"
#include "pcnrm/pcp.h"

namespace pcnrm {

int PrefixSetIndex::Find(const Offer& s) const {
  auto it = std::lower_bound(
      sets.begin(), sets.end(), s, [](const Offer& a, const Offer& b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
      });
  if (it != sets.end() && *it == s) return static_cast<int>(it - sets.begin());
  return -1;
}

std::vector<std::pair<int, int>> CrossPairs(const Offer& s0, const Offer& s1) {
  std::vector<std::pair<int, int>> pairs;
  const std::vector<int> only1 = s1.Minus(s0).products();
  const std::vector<int> only0 = s0.Minus(s1).products();
  for (int u : only1) {
    for (int v : only0) pairs.emplace_back(u, v);
  }
  return pairs;
}

PrefixSetIndex BuildPrefixSetIndex(const Instance& instance) {
  const int n = instance.num_products();
  PrefixSetIndex index;
  std::vector<Offer> all;
  for (const Segment& s : instance.segments()) {
    Offer prefix(n);
    for (int k = 0; k < s.length(); ++k) {
      prefix.insert(s.choices[k]);
      if (k >= 1) all.push_back(prefix);
    }
  }
  std::sort(all.begin(), all.end(), [](const Offer& a, const Offer& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  all.erase(std::unique(all.begin(), all.end()), all.end());
  index.sets = all;

  for (std::size_t idx = 0; idx < index.sets.size(); ++idx) {
    const Offer& set = index.sets[idx];
    // Candidate sides: indexed proper subsets and singletons.
    std::vector<Offer> sides;
    for (std::size_t e = 0; e < idx; ++e) {
      if (index.sets[e].size() < set.size() && index.sets[e].IsSubsetOf(set)) {
        sides.push_back(index.sets[e]);
      }
    }
    for (int j : set.products()) sides.push_back(Offer::FromProducts(n, {j}));

    int best_cost = -1;
    Offer best0, best1;
    for (std::size_t a = 0; a < sides.size(); ++a) {
      const Offer need = set.Minus(sides[a]);
      for (std::size_t b = 0; b < sides.size(); ++b) {
        if (a == b || !need.IsSubsetOf(sides[b])) continue;
        // sides[a] \ sides[b] must be the singleton side.
        const Offer only_a = sides[a].Minus(sides[b]);
        if (only_a.size() != 1) continue;
        const int cost = sides[b].Minus(sides[a]).size();
        if (best_cost < 0 || cost < best_cost) {
          best_cost = cost;
          best0 = sides[a];
          best1 = sides[b];
        }
      }
    }
    // Always reachable: ({last product}, rest) where rest is the shorter
    // prefix or a singleton.
    if (best_cost < 0) throw SolverError("no split found for a prefix set");
    index.s0.push_back(best0);
    index.s1.push_back(best1);
  }

  for (const Segment& s : instance.segments()) {
    std::vector<int> ids(s.length(), -1);
    Offer prefix(n);
    for (int k = 0; k < s.length(); ++k) {
      prefix.insert(s.choices[k]);
      if (k >= 1) ids[k] = index.Find(prefix);
    }
    index.prefix.push_back(std::move(ids));
  }
  return index;
}

namespace {

int SideVariable(const PcmpModel& model, const PrefixSetIndex& index,
                 const Offer& side) {
  if (side.size() == 1) return model.t[side.products()[0]];
  const int e = index.Find(side);
  if (e < 0) throw SolverError("split side is not indexed");
  return model.t_set[e];
}

// Variable holding T_l^k (k zero-based).
int PrefixVariable(const PcmpModel& model, const PrefixSetIndex& index,
                   const Segment& s, int l, int k) {
  if (k == 0) return model.t[s.choices[0]];
  return model.t_set[index.prefix[l][k]];
}

}  // namespace

PcmpModel BuildPcmp(const Instance& instance, const PrefixSetIndex& index) {
  const double tau = instance.horizon();
  PcmpModel model;
  LinearProgram& lp = model.lp;
  for (int j = 0; j < instance.num_products(); ++j) {
    model.t.push_back(lp.AddVariable(0.0, tau, 0.0, "T_" + instance.product_id(j)));
  }
  for (int e = 0; e < index.size(); ++e) {
    model.t_set.push_back(lp.AddVariable(0.0, tau, 0.0, "TS_" + std::to_string(e)));
  }

  // Binaries for every pair crossing a split, both orientations.
  std::map<std::pair<int, int>, int> h_of;
  auto binary = [&](int u, int v) {
    auto it = h_of.find({u, v});
    if (it != h_of.end()) return it->second;
    const int a = std::min(u, v), b = std::max(u, v);
    const int hab = lp.AddBinary(
        0.0, "H_" + instance.product_id(a) + "_" + instance.product_id(b));
    const int hba = lp.AddBinary(
        0.0, "H_" + instance.product_id(b) + "_" + instance.product_id(a));
    h_of[{a, b}] = hab;
    h_of[{b, a}] = hba;
    model.pairs.emplace_back(a, b);
    model.h.push_back(hab);
    model.pairs.emplace_back(b, a);
    model.h.push_back(hba);
    // Exactly one orientation, and H_{u,v} = 0 forces T_u <= T_v.
    lp.AddConstraint({{hab, 1.0}, {hba, 1.0}}, Relation::kEqual, 1.0);
    lp.AddConstraint({{model.t[a], 1.0}, {model.t[b], -1.0}, {hab, -tau}},
                     Relation::kLessEqual, 0.0);
    lp.AddConstraint({{model.t[b], 1.0}, {model.t[a], -1.0}, {hba, -tau}},
                     Relation::kLessEqual, 0.0);
    return h_of[{u, v}];
  };

  for (int e = 0; e < index.size(); ++e) {
    const int ts = model.t_set[e];
    const int t0 = SideVariable(model, index, index.s0[e]);
    const int t1 = SideVariable(model, index, index.s1[e]);
    lp.AddConstraint({{ts, 1.0}, {t0, -1.0}}, Relation::kGreaterEqual, 0.0);
    lp.AddConstraint({{ts, 1.0}, {t1, -1.0}}, Relation::kGreaterEqual, 0.0);
    const int v = index.s0[e].Minus(index.s1[e]).products()[0];
    std::vector<LinearTerm> upper0 = {{ts, 1.0}, {t0, -1.0}};
    for (const auto& [u, vv] : CrossPairs(index.s0[e], index.s1[e])) {
      upper0.push_back({binary(u, vv), -tau});
      lp.AddConstraint({{ts, 1.0}, {t1, -1.0}, {binary(v, u), -tau}},
                       Relation::kLessEqual, 0.0);
    }
    lp.AddConstraint(std::move(upper0), Relation::kLessEqual, 0.0);
  }

  // Sales durations and their revenue.
  std::vector<std::vector<LinearTerm>> usage(instance.num_resources());
  for (int l = 0; l < instance.num_segments(); ++l) {
    const Segment& s = instance.segment(l);
    std::vector<int> dl;
    for (int k = 0; k < s.length(); ++k) {
      const int j = s.choices[k];
      const double mass = s.rate * s.reach[k];
      const int d = lp.AddVariable(0.0, kInfinity, mass * instance.fare(j),
                                   "D_" + s.id + "_" + std::to_string(k + 1));
      std::vector<LinearTerm> row = {{d, 1.0},
                                     {PrefixVariable(model, index, s, l, k), -1.0}};
      if (k > 0) row.push_back({PrefixVariable(model, index, s, l, k - 1), 1.0});
      lp.AddConstraint(std::move(row), Relation::kEqual, 0.0);
      for (int i : instance.product_resources(j)) usage[i].push_back({d, mass});
      dl.push_back(d);
    }
    model.d.push_back(std::move(dl));
  }
  for (int i = 0; i < instance.num_resources(); ++i) {
    model.capacity_rows.push_back(lp.AddConstraint(
        std::move(usage[i]), Relation::kLessEqual, instance.capacities()[i],
        "cap_" + instance.resource_id(i)));
  }
  return model;
}

void AddNesting(LinearProgram& lp, const std::vector<int>& t_vars,
                const std::vector<int>& order) {
  for (int j : order) {
    if (j < 0 || j >= static_cast<int>(t_vars.size())) {
      throw InputError("nesting references unknown product " + std::to_string(j));
    }
  }
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    lp.AddConstraint({{t_vars[order[k]], 1.0}, {t_vars[order[k + 1]], -1.0}},
                     Relation::kGreaterEqual, 0.0, "nest_" + std::to_string(k));
  }
}

double PcpRevenue(const Instance& instance, const ClosingTimes& closing) {
  return Revenue(instance, PcpSales(instance, closing));
}

namespace {

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::vector<char> ConsideredMask(const Instance& instance) {
  std::vector<char> in(instance.num_products(), 0);
  for (const Segment& s : instance.segments()) {
    for (int j : s.choices) in[j] = 1;
  }
  return in;
}

// Closing times read from a solution vector: clamped to [0, horizon], zero
// for products nobody considers.
ClosingTimes ReadClosings(const Instance& instance, const std::vector<int>& t_vars,
                          const std::vector<double>& x) {
  const std::vector<char> in = ConsideredMask(instance);
  ClosingTimes closing;
  for (int j = 0; j < instance.num_products(); ++j) {
    double t = in[j] ? x[t_vars[j]] : 0.0;
    t = std::clamp(t, 0.0, instance.horizon());
    if (t < 1e-12) t = 0.0;
    closing.times.push_back(t);
  }
  return closing;
}

void FillFromClosings(const Instance& instance, ApproxSolution& sol) {
  sol.sales = PcpSales(instance, *sol.closings);
  sol.objective = Revenue(instance, sol.sales);
  sol.durations = ClosingsToDurations(*sol.closings);
  sol.hierarchy = MakeHierarchy(instance, HierarchyRule::kFromSolution, sol.closings);
}

// Full PCMP assignment induced by closing times.
std::vector<double> PcmpAssignment(const Instance& instance,
                                   const PrefixSetIndex& index,
                                   const PcmpModel& model,
                                   const ClosingTimes& closing) {
  std::vector<double> x(model.lp.num_variables(), 0.0);
  for (int j = 0; j < instance.num_products(); ++j) x[model.t[j]] = closing[j];
  for (int e = 0; e < index.size(); ++e) {
    double m = 0.0;
    for (int j : index.sets[e].products()) m = std::max(m, closing[j]);
    x[model.t_set[e]] = m;
  }
  const ChoiceDurations d = DurationsFromClosings(instance, closing);
  for (int l = 0; l < instance.num_segments(); ++l) {
    for (std::size_t k = 0; k < model.d[l].size(); ++k) {
      x[model.d[l][k]] = d.durations[l][k];
    }
  }
  for (std::size_t p = 0; p < model.pairs.size(); ++p) {
    const auto [u, v] = model.pairs[p];
    // Ties go to the smaller index.
    x[model.h[p]] = closing[u] > closing[v] || (closing[u] == closing[v] && u < v);
  }
  return x;
}

}  // namespace

ApproxSolution SolvePcmp(const Instance& instance, const PcpOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const PrefixSetIndex index = BuildPrefixSetIndex(instance);
  PcmpModel model = BuildPcmp(instance, index);
  for (int j : options.closed) {
    if (j < 0 || j >= instance.num_products()) throw InputError("unknown closed product");
    model.lp.SetBounds(model.t[j], 0.0, 0.0);
  }
  // A closed product sits below every open one; among closed products ties
  // go to the smaller index.
  std::vector<char> closed(instance.num_products(), 0);
  for (int j : options.closed) closed[j] = 1;
  for (std::size_t p = 0; p < model.pairs.size(); ++p) {
    const auto [u, v] = model.pairs[p];
    if (!closed[u] && !closed[v]) continue;
    const double value = closed[u] ? (closed[v] && u < v) : 1.0;
    model.lp.SetBounds(model.h[p], value, value);
  }
  for (const std::vector<int>& order : options.nesting) {
    AddNesting(model.lp, model.t, order);
  }

  std::optional<std::vector<double>> warm;
  if (options.warm) {
    PcpOptions plain = options;
    plain.warm.reset();
    plain.compute_duals = false;
    try {
      const ApproxSolution seed = SolvePclp(instance, *options.warm, plain);
      warm = PcmpAssignment(instance, index, model, *seed.closings);
    } catch (const Error&) {
      // An incompatible hierarchy only loses the warm start.
    }
  }

  const SolveOutcome out = SolveMip(model.lp, options.gap, warm, options.solver);
  if (out.status == SolveStatus::kInfeasible || out.status == SolveStatus::kUnbounded) {
    throw SolverError(std::string("PCMP ended with status ") + ToString(out.status));
  }
  ApproxSolution sol;
  sol.kind = ApproxKind::kPcmp;
  sol.closings = ReadClosings(instance, model.t, out.x);
  FillFromClosings(instance, sol);
  sol.iterations = out.iterations;
  sol.nodes = out.nodes;
  sol.gap = out.gap;
  if (options.compute_duals) {
    PcpOptions inner = options;
    inner.compute_duals = false;
    inner.warm = sol.hierarchy;
    sol.duals = FiniteDifferenceDuals(
        instance, sol.objective,
        [inner](const Instance& modified) {
          return SolvePcmp(modified, inner).objective;
        },
        options.threads);
  }
  sol.solve_seconds = Seconds(start);
  return sol;
}

ApproxSolution SolvePclp(const Instance& instance, const Hierarchy& hierarchy,
                         const PcpOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const int n = instance.num_products();
  if (static_cast<int>(hierarchy.rank.size()) != n) {
    throw InputError("hierarchy does not rank every product");
  }
  const double tau = instance.horizon();
  LinearProgram lp;
  std::vector<int> t;
  for (int j = 0; j < n; ++j) {
    t.push_back(lp.AddVariable(0.0, tau, 0.0, "T_" + instance.product_id(j)));
  }
  for (int j : options.closed) {
    if (j < 0 || j >= n) throw InputError("unknown closed product");
    lp.SetBounds(t[j], 0.0, 0.0);
  }
  const std::vector<std::vector<int>> groups = hierarchy.groups();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) throw InputError("hierarchy ranks are not contiguous");
    for (std::size_t a = 1; a < groups[g].size(); ++a) {
      lp.AddConstraint({{t[groups[g][a]], 1.0}, {t[groups[g][0]], -1.0}},
                       Relation::kEqual, 0.0);
    }
    if (g > 0) {
      lp.AddConstraint({{t[groups[g][0]], 1.0}, {t[groups[g - 1][0]], -1.0}},
                       Relation::kGreaterEqual, 0.0);
    }
  }
  for (const std::vector<int>& order : options.nesting) AddNesting(lp, t, order);

  std::vector<std::vector<LinearTerm>> usage(instance.num_resources());
  for (const Segment& s : instance.segments()) {
    int top = -1, prev_top = -1;
    for (int k = 0; k < s.length(); ++k) {
      const int j = s.choices[k];
      if (top < 0 || hierarchy.rank[j] > hierarchy.rank[top]) top = j;
      const double mass = s.rate * s.reach[k];
      const int d = lp.AddVariable(0.0, kInfinity, mass * instance.fare(j),
                                   "D_" + s.id + "_" + std::to_string(k + 1));
      std::vector<LinearTerm> row = {{d, 1.0}, {t[top], -1.0}};
      if (prev_top >= 0) row.push_back({t[prev_top], 1.0});
      lp.AddConstraint(std::move(row), Relation::kEqual, 0.0);
      for (int i : instance.product_resources(j)) usage[i].push_back({d, mass});
      prev_top = top;
    }
  }
  std::vector<int> cap_rows;
  for (int i = 0; i < instance.num_resources(); ++i) {
    cap_rows.push_back(lp.AddConstraint(std::move(usage[i]), Relation::kLessEqual,
                                        instance.capacities()[i],
                                        "cap_" + instance.resource_id(i)));
  }
  const SolveOutcome out = SolveLp(lp, options.solver);
  if (out.status != SolveStatus::kOptimal) {
    throw SolverError(std::string("PCLP ended with status ") + ToString(out.status));
  }
  ApproxSolution sol;
  sol.kind = ApproxKind::kPclp;
  sol.closings = ReadClosings(instance, t, out.x);
  FillFromClosings(instance, sol);
  sol.hierarchy = hierarchy;
  for (int r : cap_rows) sol.duals.push_back(out.duals[r]);
  sol.duals_exact = true;
  sol.iterations = out.iterations;
  sol.solve_seconds = Seconds(start);
  return sol;
}

}  // namespace pcnrm
