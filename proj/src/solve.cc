#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>

#include "pcnrm/error.h"
#include "pcnrm/lp.h"
#include "tableau.h"

namespace pcnrm {

using internal::Tableau;

namespace {

double RhsScale(const LinearProgram& lp) {
  double s = 1.0;
  for (int r = 0; r < lp.num_constraints(); ++r) {
    s = std::max(s, std::abs(lp.constraint(r).rhs));
  }
  return s;
}

// Runs the primal simplex, refactorizing on iteration-limit or residual
// trouble. Leaves `t` at the final basis.
Tableau::Result RunPrimal(Tableau& t, const LinearProgram& lp,
                          const SolverConfig& config) {
  const double accept = config.feasibility_tol * RhsScale(lp);
  for (int attempt = 0;; ++attempt) {
    const Tableau::Result r = t.SolvePrimal();
    if (r == Tableau::Result::kOptimal &&
        lp.MaxViolation(t.Primal()) <= accept) {
      return r;
    }
    if (r == Tableau::Result::kInfeasible || r == Tableau::Result::kUnbounded) {
      return r;
    }
    if (attempt >= config.max_refactorizations || !t.Refactor()) {
      throw SolverError("numerical failure in simplex after " +
                        std::to_string(attempt) + " refactorizations");
    }
  }
}

SolveOutcome OutcomeFromTableau(const Tableau& t, const LinearProgram& lp) {
  SolveOutcome out;
  out.status = SolveStatus::kOptimal;
  out.x = t.Primal();
  out.duals = t.Duals();
  out.reduced_costs = t.ReducedCosts();
  out.objective = lp.ObjectiveValue(out.x);
  out.best_bound = out.objective;
  out.iterations = t.iterations();
  return out;
}

}  // namespace

SolveOutcome SolveLp(const LinearProgram& lp, const SolverConfig& config) {
  lp.Validate();
  Tableau t(lp, config);
  const Tableau::Result r = RunPrimal(t, lp, config);
  SolveOutcome out;
  if (r == Tableau::Result::kInfeasible) {
    out.status = SolveStatus::kInfeasible;
    out.iterations = t.iterations();
    return out;
  }
  if (r == Tableau::Result::kUnbounded) {
    out.status = SolveStatus::kUnbounded;
    out.iterations = t.iterations();
    return out;
  }
  return OutcomeFromTableau(t, lp);
}

namespace {

struct Node {
  std::shared_ptr<const Tableau> parent;  // null: rebuild from the root
  std::vector<std::pair<int, double>> fixings;  // from the root; last is the branch
  double bound = 0.0;  // parent LP objective
};

// Re-solves the LP with every binary fixed at the rounded value of `x`.
std::optional<SolveOutcome> Polish(const LinearProgram& lp,
                                   const std::vector<double>& x,
                                   const SolverConfig& config) {
  LinearProgram fixed = lp;
  for (int j = 0; j < lp.num_variables(); ++j) {
    if (lp.is_binary(j)) {
      const double v = std::round(x[j]);
      fixed.SetBounds(j, v, v);
    }
  }
  SolveOutcome out = SolveLp(fixed, config);
  if (out.status != SolveStatus::kOptimal) return std::nullopt;
  for (int j = 0; j < lp.num_variables(); ++j) {
    if (lp.is_binary(j)) out.x[j] = std::round(out.x[j]);
  }
  out.objective = lp.ObjectiveValue(out.x);
  return out;
}

bool IsIntegral(const LinearProgram& lp, const std::vector<double>& x,
                double tol) {
  for (int j = 0; j < lp.num_variables(); ++j) {
    if (lp.is_binary(j) && std::abs(x[j] - std::round(x[j])) > tol) return false;
  }
  return true;
}

}  // namespace

SolveOutcome SolveMip(const LinearProgram& lp, double rel_gap,
                      const std::optional<std::vector<double>>& warm_start,
                      const SolverConfig& config) {
  lp.Validate();
  if (!(rel_gap >= 0.0)) throw InputError("MIP gap must be nonnegative");
  for (int j = 0; j < lp.num_variables(); ++j) {
    if (lp.is_binary(j) && (lp.lower(j) < 0.0 || lp.upper(j) > 1.0)) {
      throw InputError("binary variable " + lp.variable_name(j) +
                       " has bounds outside [0,1]");
    }
  }
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  };

  std::optional<SolveOutcome> incumbent;
  if (warm_start && static_cast<int>(warm_start->size()) == lp.num_variables() &&
      IsIntegral(lp, *warm_start, config.integrality_tol) &&
      lp.MaxViolation(*warm_start) <= 1e-6 * RhsScale(lp)) {
    incumbent = Polish(lp, *warm_start, config);
  }
  auto threshold = [&] {
    if (!incumbent) return -kInfinity;
    return incumbent->objective +
           std::max(rel_gap * std::abs(incumbent->objective), 1e-9);
  };

  auto root = std::make_shared<Tableau>(lp, config);
  const Tableau::Result root_result = RunPrimal(*root, lp, config);
  SolveOutcome out;
  out.iterations = root->iterations();
  if (root_result == Tableau::Result::kInfeasible) {
    out.status = SolveStatus::kInfeasible;
    return out;
  }
  if (root_result == Tableau::Result::kUnbounded) {
    out.status = SolveStatus::kUnbounded;
    return out;
  }

  double pruned_bound = -kInfinity;  // best bound among nodes cut by the gap
  std::int64_t nodes = 0;
  std::int64_t iterations = root->iterations();
  std::vector<Node> open;
  bool limit_hit = false;
  const std::size_t snapshot_budget =
      std::max<std::size_t>(1, config.node_memory_bytes / std::max<std::size_t>(1, root->bytes()));
  std::size_t snapshots = 0;  // open nodes holding a parent tableau

  // Processes a solved node: prune, record incumbent, or branch.
  auto expand = [&](std::shared_ptr<Tableau> t,
                    const std::vector<std::pair<int, double>>& fixings) {
    const double obj = t->Objective();
    if (obj <= threshold()) {
      pruned_bound = std::max(pruned_bound, obj);
      return;
    }
    const std::vector<double> x = t->Primal();
    int branch = -1;
    double most = -1.0;
    for (int j = 0; j < lp.num_variables(); ++j) {
      if (!lp.is_binary(j)) continue;
      const double frac = x[j] - std::floor(x[j]);
      if (frac <= config.integrality_tol || frac >= 1 - config.integrality_tol) {
        continue;
      }
      const double score = std::min(frac, 1 - frac);
      if (score > most) {
        most = score;
        branch = j;
      }
    }
    if (branch < 0) {
      auto polished = Polish(lp, x, config);
      if (polished && (!incumbent || polished->objective > incumbent->objective)) {
        incumbent = std::move(polished);
      }
      return;
    }
    std::shared_ptr<const Tableau> snapshot;
    if (snapshots / 2 + 1 <= snapshot_budget) {
      snapshot = std::move(t);
      snapshots += 2;
    }
    const double toward = x[branch] >= 0.5 ? 1.0 : 0.0;
    for (double v : {1.0 - toward, toward}) {
      Node child{snapshot, fixings, obj};
      child.fixings.emplace_back(branch, v);
      open.push_back(std::move(child));
    }
  };

  expand(root, {});
  while (!open.empty()) {
    if (nodes >= config.max_nodes || elapsed() > config.time_limit_seconds) {
      limit_hit = true;
      break;
    }
    if (config.restart_interval > 0 && nodes > 0 &&
        nodes % config.restart_interval == 0) {
      auto best = std::max_element(
          open.begin(), open.end(),
          [](const Node& a, const Node& b) { return a.bound < b.bound; });
      std::iter_swap(best, open.end() - 1);
    }
    Node node = std::move(open.back());
    open.pop_back();
    if (node.parent) snapshots -= 1;
    ++nodes;
    if (node.bound <= threshold()) {
      pruned_bound = std::max(pruned_bound, node.bound);
      continue;
    }
    std::shared_ptr<Tableau> t;
    if (node.parent) {
      t = std::make_shared<Tableau>(*node.parent);
      node.parent.reset();
      t->SetBounds(node.fixings.back().first, node.fixings.back().second,
                   node.fixings.back().second);
    } else {
      t = std::make_shared<Tableau>(*root);
      for (const auto& [var, value] : node.fixings) t->SetBounds(var, value, value);
    }
    const std::int64_t before = t->iterations();
    const Tableau::Result r = t->SolveDual();
    iterations += t->iterations() - before;
    if (r == Tableau::Result::kInfeasible) continue;
    if (r != Tableau::Result::kOptimal) {
      // Unresolved node: its parent bound stays in the reported gap.
      pruned_bound = std::max(pruned_bound, node.bound);
      continue;
    }
    expand(std::move(t), node.fixings);
  }

  if (!incumbent) {
    if (limit_hit) {
      throw SolverError("MIP node/time limit reached without an incumbent");
    }
    out.status = SolveStatus::kInfeasible;
    out.nodes = nodes;
    out.iterations = iterations;
    return out;
  }

  double best_bound = std::max(incumbent->objective, pruned_bound);
  for (const Node& n : open) best_bound = std::max(best_bound, n.bound);
  out = *incumbent;
  out.duals.clear();
  out.reduced_costs.clear();
  out.nodes = nodes;
  out.iterations = iterations;
  out.best_bound = best_bound;
  out.gap = (best_bound - out.objective) /
            std::max(std::abs(out.objective), 1e-10);
  if (std::abs(best_bound - out.objective) <= 1e-9) out.gap = 0.0;
  out.status = limit_hit || out.gap > rel_gap + 1e-12 ? SolveStatus::kGapLimit
                                                     : SolveStatus::kOptimal;
  return out;
}

}  // namespace pcnrm
