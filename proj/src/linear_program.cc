#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "pcnrm/error.h"
#include "pcnrm/lp.h"

namespace pcnrm {

int LinearProgram::AddVariable(double lower, double upper, double objective,
                               std::string name) {
  const int id = num_variables();
  if (name.empty()) name = "x" + std::to_string(id);
  objective_.push_back(objective);
  lower_.push_back(lower);
  upper_.push_back(upper);
  binary_.push_back(0);
  names_.push_back(std::move(name));
  return id;
}

int LinearProgram::AddBinary(double objective, std::string name) {
  const int id = AddVariable(0.0, 1.0, objective, std::move(name));
  binary_[id] = 1;
  return id;
}

int LinearProgram::AddConstraint(std::vector<LinearTerm> terms,
                                 Relation relation, double rhs,
                                 std::string name) {
  const int id = num_constraints();
  if (name.empty()) name = "r" + std::to_string(id);
  // Merge duplicate variables.
  std::sort(terms.begin(), terms.end(),
            [](const LinearTerm& a, const LinearTerm& b) { return a.var < b.var; });
  std::vector<LinearTerm> merged;
  for (const LinearTerm& t : terms) {
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const LinearTerm& t) { return t.coef == 0.0; });
  rows_.push_back({std::move(merged), relation, rhs, std::move(name)});
  return id;
}

void LinearProgram::SetBounds(int var, double lower, double upper) {
  lower_[var] = lower;
  upper_[var] = upper;
}

void LinearProgram::SetObjective(int var, double coef) { objective_[var] = coef; }

int LinearProgram::num_binaries() const {
  return static_cast<int>(std::count(binary_.begin(), binary_.end(), 1));
}

void LinearProgram::Validate() const {
  for (int j = 0; j < num_variables(); ++j) {
    if (!std::isfinite(objective_[j])) {
      throw InputError("non-finite objective coefficient on " + names_[j]);
    }
    if (std::isnan(lower_[j]) || std::isnan(upper_[j]) || lower_[j] > upper_[j] ||
        lower_[j] == kInfinity || upper_[j] == -kInfinity) {
      throw InputError("invalid bounds on " + names_[j]);
    }
  }
  for (const Constraint& row : rows_) {
    if (!std::isfinite(row.rhs)) {
      throw InputError("non-finite right-hand side in " + row.name);
    }
    for (const LinearTerm& t : row.terms) {
      if (t.var < 0 || t.var >= num_variables()) {
        throw InputError("dimension mismatch: " + row.name +
                         " references variable " + std::to_string(t.var));
      }
      if (!std::isfinite(t.coef)) {
        throw InputError("non-finite coefficient in " + row.name);
      }
    }
  }
}

double LinearProgram::ObjectiveValue(const std::vector<double>& x) const {
  double v = 0.0;
  for (int j = 0; j < num_variables(); ++j) v += objective_[j] * x[j];
  return v;
}

double LinearProgram::RowActivity(int row, const std::vector<double>& x) const {
  double a = 0.0;
  for (const LinearTerm& t : rows_[row].terms) a += t.coef * x[t.var];
  return a;
}

double LinearProgram::MaxViolation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (int j = 0; j < num_variables(); ++j) {
    worst = std::max({worst, lower_[j] - x[j], x[j] - upper_[j]});
  }
  for (int r = 0; r < num_constraints(); ++r) {
    const double a = RowActivity(r, x);
    const double rhs = rows_[r].rhs;
    switch (rows_[r].relation) {
      case Relation::kLessEqual: worst = std::max(worst, a - rhs); break;
      case Relation::kGreaterEqual: worst = std::max(worst, rhs - a); break;
      case Relation::kEqual: worst = std::max(worst, std::abs(a - rhs)); break;
    }
  }
  return worst;
}

const char* ToString(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kGapLimit: return "gap-limit";
  }
  return "unknown";
}

namespace {

void WriteTerm(std::ostream& out, double coef, const std::string& name) {
  out << ' ' << (coef < 0 ? '-' : '+') << ' ' << std::abs(coef) << ' ' << name;
}

}  // namespace

void WriteLpText(const LinearProgram& lp, std::ostream& out) {
  out << std::setprecision(17);
  out << "MAXIMIZE\n obj:";
  for (int j = 0; j < lp.num_variables(); ++j) {
    if (lp.objective(j) != 0.0) WriteTerm(out, lp.objective(j), lp.variable_name(j));
  }
  out << "\nSUBJECT TO\n";
  for (int r = 0; r < lp.num_constraints(); ++r) {
    const Constraint& row = lp.constraint(r);
    out << ' ' << row.name << ':';
    for (const LinearTerm& t : row.terms) {
      WriteTerm(out, t.coef, lp.variable_name(t.var));
    }
    switch (row.relation) {
      case Relation::kLessEqual: out << " <= "; break;
      case Relation::kGreaterEqual: out << " >= "; break;
      case Relation::kEqual: out << " = "; break;
    }
    out << row.rhs << '\n';
  }
  out << "BOUNDS\n";
  for (int j = 0; j < lp.num_variables(); ++j) {
    if (lp.is_binary(j)) continue;
    out << ' ';
    if (lp.lower(j) == -kInfinity) {
      out << "-inf";
    } else {
      out << lp.lower(j);
    }
    out << " <= " << lp.variable_name(j) << " <= ";
    if (lp.upper(j) == kInfinity) {
      out << "+inf";
    } else {
      out << lp.upper(j);
    }
    out << '\n';
  }
  out << "BINARY\n";
  for (int j = 0; j < lp.num_variables(); ++j) {
    if (lp.is_binary(j)) out << ' ' << lp.variable_name(j) << '\n';
  }
  out << "END\n";
}

}  // namespace pcnrm
