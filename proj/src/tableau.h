#ifndef PCNRM_SRC_TABLEAU_H_
#define PCNRM_SRC_TABLEAU_H_

#include <cstdint>
#include <memory>
#include <vector>

#include "pcnrm/lp.h"

namespace pcnrm::internal {

// Dense bounded-variable simplex tableau. Column layout: structural
// variables, then one slack per row (row . x + s = b), then artificials for
// rows whose initial slack value violated its bounds.
class Tableau {
 public:
  enum class Result { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

  Tableau(const LinearProgram& lp, const SolverConfig& config);

  // Phase 1 (when artificials are still active) then phase 2.
  Result SolvePrimal();
  // Dual simplex from a dual-feasible basis, followed by a primal cleanup.
  Result SolveDual();

  // Changes the bounds of a structural variable, moving it if it is nonbasic.
  void SetBounds(int var, double lower, double upper);

  // Rebuilds the tableau from the original data for the current basis.
  // Returns false when the basis matrix is numerically singular.
  bool Refactor();

  double Objective() const;
  std::vector<double> Primal() const;
  std::vector<double> Duals() const;
  std::vector<double> ReducedCosts() const;
  std::int64_t iterations() const { return iterations_; }
  std::size_t bytes() const { return tab_.size() * sizeof(double); }

 private:
  double& at(int r, int c) { return tab_[static_cast<std::size_t>(r) * cols_ + c]; }
  double at(int r, int c) const {
    return tab_[static_cast<std::size_t>(r) * cols_ + c];
  }

  bool IsFixed(int k) const { return lo_[k] == hi_[k]; }
  void ComputeReducedCosts();
  void SetPhaseTwoCosts();
  Result PrimalLoop();
  Result DualLoop();
  void Pivot(int row, int col);
  double IterationLimit() const;

  const LinearProgram* lp_;
  SolverConfig config_;
  int m_ = 0;         // rows
  int n_ = 0;         // structural columns
  int cols_ = 0;      // all columns
  int first_art_ = 0;
  std::vector<double> tab_;
  std::vector<double> lo_, hi_, cost_, d_, x_;
  std::vector<double> rhs_;
  std::vector<double> art_sign_;  // per artificial column
  std::vector<int> art_row_;
  std::vector<int> basis_;        // row -> column
  std::vector<int> where_;        // column -> row or -1
  bool phase_two_ = false;
  std::int64_t iterations_ = 0;
};

}  // namespace pcnrm::internal

#endif  // PCNRM_SRC_TABLEAU_H_
