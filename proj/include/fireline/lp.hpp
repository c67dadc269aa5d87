#pragma once

#include <cstdint>
#include <vector>

#include "fireline/common.hpp"

namespace fireline {

enum class RowSense { kLe, kGe, kEq };

struct LpEntry {
  int row = 0;
  double value = 0.0;
};

// min c^T x  s.t.  rows (<=, >=, =),  0 <= x <= upper.
// Columns and rows may carry stable integer keys, used to carry a basis from
// one solve to the next when the caller appends columns.
struct LinearProgram {
  std::vector<double> cost;
  std::vector<std::vector<LpEntry>> columns;
  std::vector<double> upper;
  std::vector<std::int64_t> column_key;
  std::vector<RowSense> sense;
  std::vector<double> rhs;
  std::vector<std::int64_t> row_key;

  int num_rows() const { return static_cast<int>(rhs.size()); }
  int num_columns() const { return static_cast<int>(cost.size()); }
  int add_row(RowSense s, double b, std::int64_t key = -1);
  int add_column(double c, std::vector<LpEntry> entries, double ub = kInf, std::int64_t key = -1);
};

enum class LpStatus { kOptimal, kUnbounded, kArtificialPositive };

const char* lp_status_name(LpStatus status);

struct LpBasisEntry {
  int kind = 0;  // 0 column, 1 slack of a row, 2 artificial of a row
  std::int64_t key = 0;
};

struct LpBasis {
  std::vector<LpBasisEntry> basic;
  std::vector<std::int64_t> rows;
  bool empty() const { return basic.empty(); }
};

struct LpSolution {
  LpStatus status = LpStatus::kOptimal;
  std::vector<double> primal;
  std::vector<double> dual;  // one per row; >= rows nonnegative, <= rows nonpositive
  double objective = 0.0;
  double artificial_sum = 0.0;
  int iterations = 0;
  bool warm_started = false;
  LpBasis basis;
};

struct LpOptions {
  const LpBasis* warm_start = nullptr;
  int refactor_period = 50;
  int max_iterations = 1000000;
};

// Revised primal simplex. Artificial variables carry a symbolic big-M cost
// resolved lexicographically; on artificial-positive status the reported
// duals use the numeric value M_art = 1e6 * max|c| (at least 1e6).
LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options = {});

// Residual checks used by tests and debug assertions.
double lp_primal_residual(const LinearProgram& lp, const std::vector<double>& x);
double lp_min_reduced_cost(const LinearProgram& lp, const std::vector<double>& y);
double lp_dual_objective(const LinearProgram& lp, const std::vector<double>& y);

}  // namespace fireline
