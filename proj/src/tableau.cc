#include "tableau.h"

#include <algorithm>
#include <cmath>

#include "pcnrm/error.h"

namespace pcnrm::internal {

namespace {

constexpr double kDropTol = 1e-14;
constexpr double kRatioTieTol = 1e-12;

}  // namespace

Tableau::Tableau(const LinearProgram& lp, const SolverConfig& config)
    : lp_(&lp), config_(config) {
  m_ = lp.num_constraints();
  n_ = lp.num_variables();

  std::vector<double> x(n_);
  for (int j = 0; j < n_; ++j) {
    const double lo = lp.lower(j), hi = lp.upper(j);
    x[j] = lo > -kInfinity ? lo : (hi < kInfinity ? hi : 0.0);
  }

  // Slack bounds and initial values; decide which rows need an artificial.
  std::vector<double> slack_lo(m_), slack_hi(m_), slack_val(m_), art_val(m_, 0.0);
  std::vector<int> art_of_row(m_, -1);
  int num_art = 0;
  rhs_.resize(m_);
  for (int r = 0; r < m_; ++r) {
    const Constraint& row = lp.constraint(r);
    rhs_[r] = row.rhs;
    switch (row.relation) {
      case Relation::kLessEqual: slack_lo[r] = 0.0; slack_hi[r] = kInfinity; break;
      case Relation::kGreaterEqual: slack_lo[r] = -kInfinity; slack_hi[r] = 0.0; break;
      case Relation::kEqual: slack_lo[r] = 0.0; slack_hi[r] = 0.0; break;
    }
    const double s = row.rhs - lp.RowActivity(r, x);
    const double clamped = std::clamp(s, slack_lo[r], slack_hi[r]);
    if (std::abs(s - clamped) <= config_.primal_tol) {
      slack_val[r] = s;
    } else {
      slack_val[r] = clamped;
      art_val[r] = s - clamped;
      art_of_row[r] = num_art++;
    }
  }

  first_art_ = n_ + m_;
  cols_ = n_ + m_ + num_art;
  tab_.assign(static_cast<std::size_t>(m_) * cols_, 0.0);
  lo_.assign(cols_, 0.0);
  hi_.assign(cols_, 0.0);
  x_.assign(cols_, 0.0);
  cost_.assign(cols_, 0.0);
  d_.assign(cols_, 0.0);
  basis_.assign(m_, -1);
  where_.assign(cols_, -1);
  art_sign_.assign(num_art, 1.0);
  art_row_.assign(num_art, -1);

  for (int j = 0; j < n_; ++j) {
    lo_[j] = lp.lower(j);
    hi_[j] = lp.upper(j);
    x_[j] = x[j];
  }
  for (int r = 0; r < m_; ++r) {
    const int s = n_ + r;
    lo_[s] = slack_lo[r];
    hi_[s] = slack_hi[r];
    x_[s] = slack_val[r];
    for (const LinearTerm& t : lp.constraint(r).terms) at(r, t.var) = t.coef;
    at(r, s) = 1.0;
    if (art_of_row[r] >= 0) {
      const int a = first_art_ + art_of_row[r];
      const double sign = art_val[r] > 0 ? 1.0 : -1.0;
      art_sign_[art_of_row[r]] = sign;
      art_row_[art_of_row[r]] = r;
      at(r, a) = sign;
      lo_[a] = 0.0;
      hi_[a] = kInfinity;
      x_[a] = std::abs(art_val[r]);
      cost_[a] = -1.0;
      basis_[r] = a;
      where_[a] = r;
      // Divide the row by the basic coefficient (+-1).
      if (sign < 0) {
        for (int c = 0; c < cols_; ++c) at(r, c) = -at(r, c);
      }
    } else {
      basis_[r] = s;
      where_[s] = r;
    }
  }

  if (num_art == 0) {
    SetPhaseTwoCosts();
  } else {
    ComputeReducedCosts();
  }
}

void Tableau::SetPhaseTwoCosts() {
  std::fill(cost_.begin(), cost_.end(), 0.0);
  for (int j = 0; j < n_; ++j) cost_[j] = lp_->objective(j);
  for (int a = first_art_; a < cols_; ++a) {
    lo_[a] = 0.0;
    hi_[a] = 0.0;
  }
  phase_two_ = true;
  ComputeReducedCosts();
}

void Tableau::ComputeReducedCosts() {
  d_ = cost_;
  for (int r = 0; r < m_; ++r) {
    const double cb = cost_[basis_[r]];
    if (cb == 0.0) continue;
    const double* row = &tab_[static_cast<std::size_t>(r) * cols_];
    for (int c = 0; c < cols_; ++c) d_[c] -= cb * row[c];
  }
  for (int r = 0; r < m_; ++r) d_[basis_[r]] = 0.0;
}

double Tableau::IterationLimit() const {
  return 50.0 * (m_ + cols_) + 10000.0;
}

void Tableau::Pivot(int row, int col) {
  double* pr = &tab_[static_cast<std::size_t>(row) * cols_];
  const double piv = pr[col];
  std::vector<int> nz;
  nz.reserve(cols_);
  for (int c = 0; c < cols_; ++c) {
    if (pr[c] == 0.0) continue;
    pr[c] /= piv;
    if (std::abs(pr[c]) < kDropTol) {
      pr[c] = 0.0;
    } else {
      nz.push_back(c);
    }
  }
  pr[col] = 1.0;
  for (int i = 0; i < m_; ++i) {
    if (i == row) continue;
    double* pi = &tab_[static_cast<std::size_t>(i) * cols_];
    const double f = pi[col];
    if (f == 0.0) continue;
    for (int c : nz) {
      double v = pi[c] - f * pr[c];
      pi[c] = std::abs(v) < kDropTol ? 0.0 : v;
    }
    pi[col] = 0.0;
  }
  const double f = d_[col];
  if (f != 0.0) {
    for (int c : nz) d_[c] -= f * pr[c];
  }
  d_[col] = 0.0;
  where_[basis_[row]] = -1;
  basis_[row] = col;
  where_[col] = row;
}

Tableau::Result Tableau::PrimalLoop() {
  const double limit = iterations_ + IterationLimit();
  const std::int64_t bland_after = 10LL * (m_ + cols_);
  std::int64_t degenerate = 0;
  bool bland = false;
  while (true) {
    if (iterations_ > limit) return Result::kIterationLimit;

    int q = -1;
    double best = 0.0;
    for (int k = 0; k < cols_; ++k) {
      if (where_[k] >= 0 || IsFixed(k)) continue;
      const double dk = d_[k];
      const bool up = dk > config_.dual_tol && x_[k] < hi_[k];
      const bool down = dk < -config_.dual_tol && x_[k] > lo_[k];
      if (!up && !down) continue;
      if (bland) {
        q = k;
        break;
      }
      if (std::abs(dk) > best) {
        best = std::abs(dk);
        q = k;
      }
    }
    if (q < 0) return Result::kOptimal;

    const double dir = d_[q] > 0 ? 1.0 : -1.0;
    double theta = dir > 0 ? hi_[q] - x_[q] : x_[q] - lo_[q];
    int leave = -1;
    double leave_to = 0.0, leave_alpha = 0.0;
    for (int r = 0; r < m_; ++r) {
      const double a = at(r, q) * dir;
      if (std::abs(a) <= config_.pivot_tol) continue;
      const int b = basis_[r];
      double ratio, to;
      if (a > 0) {
        if (lo_[b] == -kInfinity) continue;
        ratio = std::max(0.0, x_[b] - lo_[b]) / a;
        to = lo_[b];
      } else {
        if (hi_[b] == kInfinity) continue;
        ratio = std::max(0.0, hi_[b] - x_[b]) / -a;
        to = hi_[b];
      }
      bool take = false;
      if (ratio < theta - kRatioTieTol) {
        take = true;
      } else if (ratio <= theta + kRatioTieTol && leave >= 0) {
        take = bland ? b < basis_[leave] : std::abs(a) > leave_alpha;
      }
      if (take) {
        theta = std::min(theta, ratio);
        leave = r;
        leave_to = to;
        leave_alpha = std::abs(a);
      }
    }
    if (theta == kInfinity) return Result::kUnbounded;

    const double step = dir * theta;
    if (step != 0.0) {
      for (int r = 0; r < m_; ++r) {
        const double a = at(r, q);
        if (a != 0.0) x_[basis_[r]] -= a * step;
      }
      x_[q] += step;
    }
    if (leave >= 0) {
      x_[basis_[leave]] = leave_to;
      Pivot(leave, q);
    } else {
      x_[q] = dir > 0 ? hi_[q] : lo_[q];
    }
    ++iterations_;
    if (theta < 1e-12) {
      if (++degenerate > bland_after) bland = true;
    } else {
      degenerate = 0;
      bland = false;
    }
  }
}

Tableau::Result Tableau::DualLoop() {
  const double limit = iterations_ + IterationLimit();
  while (true) {
    if (iterations_ > limit) return Result::kIterationLimit;

    int r = -1;
    double worst = config_.primal_tol;
    for (int i = 0; i < m_; ++i) {
      const int b = basis_[i];
      const double inf = std::max(lo_[b] - x_[b], x_[b] - hi_[b]);
      if (inf > worst) {
        worst = inf;
        r = i;
      }
    }
    if (r < 0) return Result::kOptimal;

    const int b = basis_[r];
    const bool increase = x_[b] < lo_[b];
    const double target = increase ? lo_[b] : hi_[b];
    int q = -1;
    double best_ratio = kInfinity, best_alpha = 0.0;
    for (int k = 0; k < cols_; ++k) {
      if (where_[k] >= 0 || IsFixed(k)) continue;
      const double a = at(r, k);
      if (std::abs(a) <= config_.pivot_tol) continue;
      const bool can_inc = x_[k] < hi_[k];
      const bool can_dec = x_[k] > lo_[k];
      // x_b moves by -a * dx_k.
      const bool ok = increase ? ((a < 0 && can_inc) || (a > 0 && can_dec))
                               : ((a > 0 && can_inc) || (a < 0 && can_dec));
      if (!ok) continue;
      const double ratio = std::abs(d_[k]) / std::abs(a);
      if (ratio < best_ratio - kRatioTieTol ||
          (ratio <= best_ratio + kRatioTieTol && std::abs(a) > best_alpha)) {
        best_ratio = std::min(best_ratio, ratio);
        best_alpha = std::abs(a);
        q = k;
      }
    }
    if (q < 0) return Result::kInfeasible;

    const double delta = (x_[b] - target) / at(r, q);
    for (int i = 0; i < m_; ++i) {
      const double a = at(i, q);
      if (a != 0.0) x_[basis_[i]] -= a * delta;
    }
    x_[q] += delta;
    x_[b] = target;
    Pivot(r, q);
    ++iterations_;
  }
}

Tableau::Result Tableau::SolvePrimal() {
  if (!phase_two_) {
    const Result r = PrimalLoop();
    if (r != Result::kOptimal) return r;
    double infeasibility = 0.0;
    for (int a = first_art_; a < cols_; ++a) infeasibility += x_[a];
    if (infeasibility > config_.feasibility_tol) return Result::kInfeasible;
    for (int a = first_art_; a < cols_; ++a) x_[a] = std::max(0.0, x_[a]);
    SetPhaseTwoCosts();
  }
  return PrimalLoop();
}

Tableau::Result Tableau::SolveDual() {
  if (!phase_two_) return SolvePrimal();
  const Result r = DualLoop();
  if (r != Result::kOptimal) return r;
  return PrimalLoop();
}

void Tableau::SetBounds(int var, double lower, double upper) {
  lo_[var] = lower;
  hi_[var] = upper;
  if (where_[var] >= 0) return;
  double target = x_[var];
  if (target < lower || (target != lower && target != upper)) {
    target = lower > -kInfinity ? lower : (upper < kInfinity ? upper : 0.0);
  }
  if (target > upper) target = upper;
  const double delta = target - x_[var];
  if (delta == 0.0) return;
  for (int r = 0; r < m_; ++r) {
    const double a = at(r, var);
    if (a != 0.0) x_[basis_[r]] -= a * delta;
  }
  x_[var] = target;
}

bool Tableau::Refactor() {
  // Original columns.
  std::vector<double> full(static_cast<std::size_t>(m_) * cols_, 0.0);
  auto f = [&](int r, int c) -> double& {
    return full[static_cast<std::size_t>(r) * cols_ + c];
  };
  for (int r = 0; r < m_; ++r) {
    for (const LinearTerm& t : lp_->constraint(r).terms) f(r, t.var) = t.coef;
    f(r, n_ + r) = 1.0;
  }
  for (std::size_t a = 0; a < art_row_.size(); ++a) {
    f(art_row_[a], first_art_ + static_cast<int>(a)) = art_sign_[a];
  }

  // Invert B by Gauss-Jordan with partial pivoting on [B | I].
  std::vector<double> aug(static_cast<std::size_t>(m_) * 2 * m_, 0.0);
  auto g = [&](int r, int c) -> double& {
    return aug[static_cast<std::size_t>(r) * 2 * m_ + c];
  };
  for (int r = 0; r < m_; ++r) {
    for (int k = 0; k < m_; ++k) g(r, k) = f(r, basis_[k]);
    g(r, m_ + r) = 1.0;
  }
  for (int c = 0; c < m_; ++c) {
    int p = c;
    for (int r = c + 1; r < m_; ++r) {
      if (std::abs(g(r, c)) > std::abs(g(p, c))) p = r;
    }
    if (std::abs(g(p, c)) < 1e-12) return false;
    if (p != c) {
      for (int k = 0; k < 2 * m_; ++k) std::swap(g(p, k), g(c, k));
    }
    const double piv = g(c, c);
    for (int k = 0; k < 2 * m_; ++k) g(c, k) /= piv;
    for (int r = 0; r < m_; ++r) {
      if (r == c) continue;
      const double fac = g(r, c);
      if (fac == 0.0) continue;
      for (int k = 0; k < 2 * m_; ++k) g(r, k) -= fac * g(c, k);
    }
  }

  // T = B^{-1} A, x_B = B^{-1} (b - N x_N).
  std::vector<double> resid = rhs_;
  for (int c = 0; c < cols_; ++c) {
    if (where_[c] >= 0 || x_[c] == 0.0) continue;
    for (int r = 0; r < m_; ++r) resid[r] -= f(r, c) * x_[c];
  }
  for (int r = 0; r < m_; ++r) {
    double* row = &tab_[static_cast<std::size_t>(r) * cols_];
    std::fill(row, row + cols_, 0.0);
    double xb = 0.0;
    for (int k = 0; k < m_; ++k) {
      const double binv = g(r, m_ + k);
      if (binv == 0.0) continue;
      xb += binv * resid[k];
      const double* src = &full[static_cast<std::size_t>(k) * cols_];
      for (int c = 0; c < cols_; ++c) row[c] += binv * src[c];
    }
    for (int c = 0; c < cols_; ++c) {
      if (std::abs(row[c]) < kDropTol) row[c] = 0.0;
    }
    x_[basis_[r]] = xb;
  }
  for (int r = 0; r < m_; ++r) {
    for (int k = 0; k < m_; ++k) at(r, basis_[k]) = (r == k) ? 1.0 : 0.0;
  }
  ComputeReducedCosts();
  return true;
}

double Tableau::Objective() const {
  double v = 0.0;
  for (int j = 0; j < n_; ++j) v += lp_->objective(j) * x_[j];
  return v;
}

std::vector<double> Tableau::Primal() const {
  return std::vector<double>(x_.begin(), x_.begin() + n_);
}

std::vector<double> Tableau::Duals() const {
  std::vector<double> y(m_);
  for (int r = 0; r < m_; ++r) y[r] = -d_[n_ + r];
  return y;
}

std::vector<double> Tableau::ReducedCosts() const {
  return std::vector<double>(d_.begin(), d_.begin() + n_);
}

}  // namespace pcnrm::internal
