#ifndef PCNRM_LP_H_
#define PCNRM_LP_H_

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace pcnrm {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { kLessEqual, kEqual, kGreaterEqual };

struct LinearTerm {
  int var;
  double coef;
};

struct Constraint {
  std::vector<LinearTerm> terms;
  Relation relation;
  double rhs;
  std::string name;
};

// A maximization problem  max c'x  s.t. rows, lower <= x <= upper, with
// optional binary variables.
class LinearProgram {
 public:
  int AddVariable(double lower, double upper, double objective,
                  std::string name = {});
  int AddBinary(double objective, std::string name = {});
  int AddConstraint(std::vector<LinearTerm> terms, Relation relation,
                    double rhs, std::string name = {});

  void SetBounds(int var, double lower, double upper);
  void SetObjective(int var, double coef);

  int num_variables() const { return static_cast<int>(objective_.size()); }
  int num_constraints() const { return static_cast<int>(rows_.size()); }
  int num_binaries() const;
  bool has_binaries() const { return num_binaries() > 0; }

  double lower(int var) const { return lower_[var]; }
  double upper(int var) const { return upper_[var]; }
  double objective(int var) const { return objective_[var]; }
  bool is_binary(int var) const { return binary_[var] != 0; }
  const std::string& variable_name(int var) const { return names_[var]; }
  const Constraint& constraint(int row) const { return rows_[row]; }

  // Throws Error(kInput) on non-finite data, crossed bounds or out-of-range
  // variable references.
  void Validate() const;

  double ObjectiveValue(const std::vector<double>& x) const;
  double RowActivity(int row, const std::vector<double>& x) const;
  // Largest violation over rows and bounds.
  double MaxViolation(const std::vector<double>& x) const;

 private:
  std::vector<double> objective_, lower_, upper_;
  std::vector<char> binary_;
  std::vector<std::string> names_;
  std::vector<Constraint> rows_;
};

// Every tolerance the kernel uses.
struct SolverConfig {
  double feasibility_tol = 1e-8;  // reported primal residual bound
  double optimality_tol = 1e-6;   // duality-gap / slackness bound
  double mip_gap = 1e-3;          // default relative MIP gap
  double pivot_tol = 1e-9;
  double primal_tol = 1e-9;       // bound tolerance inside the simplex
  double dual_tol = 1e-9;         // reduced-cost tolerance inside the simplex
  double integrality_tol = 1e-6;
  std::int64_t max_nodes = 200000;
  double time_limit_seconds = kInfinity;
  int restart_interval = 500;     // best-bound restart period, in nodes
  // Parent tableaus kept for open nodes; beyond this, nodes re-solve from the root.
  std::size_t node_memory_bytes = std::size_t{256} << 20;
  int max_refactorizations = 3;
};

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kGapLimit };

const char* ToString(SolveStatus status);

struct SolveOutcome {
  SolveStatus status = SolveStatus::kInfeasible;
  std::vector<double> x;
  std::vector<double> duals;           // per row, LP only
  std::vector<double> reduced_costs;   // per variable, LP only
  double objective = 0.0;
  double best_bound = 0.0;
  double gap = 0.0;                    // relative, MIP only
  std::int64_t iterations = 0;
  std::int64_t nodes = 0;
};

// Bounded-variable primal simplex with a Bland fallback on long degenerate
// runs. Binary flags are ignored (treated as [0,1] continuous).
SolveOutcome SolveLp(const LinearProgram& lp, const SolverConfig& config = {});

// Depth-first branch and bound on the binaries, most-fractional branching,
// best-bound restarts. A feasible warm start becomes the first incumbent.
// Throws Error(kSolver) when the node or time limit is hit before any
// incumbent is found; returns kGapLimit when it is hit afterwards.
SolveOutcome SolveMip(const LinearProgram& lp, double rel_gap,
                      const std::optional<std::vector<double>>& warm_start =
                          std::nullopt,
                      const SolverConfig& config = {});

// Plain-text dump in the MAXIMIZE / SUBJECT TO / BOUNDS / BINARY / END
// layout described in the README.
void WriteLpText(const LinearProgram& lp, std::ostream& out);

}  // namespace pcnrm

#endif  // PCNRM_LP_H_
