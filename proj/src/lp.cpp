#include "fireline/lp.hpp"

#include "fireline/common.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace fireline {

int LinearProgram::add_row(RowSense s, double b, std::int64_t key) {
  sense.push_back(s);
  rhs.push_back(b);
  row_key.push_back(key >= 0 ? key : static_cast<std::int64_t>(rhs.size()) - 1);
  return num_rows() - 1;
}

int LinearProgram::add_column(double c, std::vector<LpEntry> entries, double ub, std::int64_t key) {
  cost.push_back(c);
  columns.push_back(std::move(entries));
  upper.push_back(ub);
  column_key.push_back(key >= 0 ? key : static_cast<std::int64_t>(cost.size()) - 1);
  return num_columns() - 1;
}

const char* lp_status_name(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kArtificialPositive: return "artificial-positive";
  }
  return "?";
}

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kEntryTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kHarrisPivot = 1e-7;
constexpr double kHarrisSlack = 1e-9;
constexpr double kDegenerate = 1e-9;  // steps and basic values below this are degenerate
constexpr double kRelativePivot = 1e-9;

struct SingularBasis : LpError {
  using LpError::LpError;
};

enum class VarKind { kStructural, kSlack, kArtificial };

struct Var {
  VarKind kind;
  int ref;  // structural column, or row index for slack/artificial
};

class Simplex {
 public:
  Simplex(const LinearProgram& lp, const LpOptions& opt) : lp_(lp), opt_(opt) {}

  LpSolution run();

 private:
  LpSolution iterate();
  void build_standard_form();
  bool try_warm_start();
  void cold_start();
  void refactor();
  void compute_duals();
  void column_of(int v, std::vector<double>& dense) const;
  double dot_column(const std::vector<double>& y, int v) const;
  LpSolution finish(LpStatus status);

  const LinearProgram& lp_;
  const LpOptions& opt_;
  int m_ = 0;      // rows in standard form
  int n_user_ = 0;  // user rows (upper-bound rows follow)
  std::vector<double> b_;
  std::vector<char> flipped_;
  std::vector<std::vector<LpEntry>> cols_;  // structural columns in standard form
  std::vector<Var> vars_;
  std::vector<int> slack_of_, art_of_;  // per row, variable index or -1
  std::vector<double> cost_r_, cost_m_;
  std::vector<int> basis_;
  std::vector<int> pos_;  // basis position per variable or -1
  std::vector<char> dead_;
  std::vector<double> binv_;  // m x m row-major
  std::vector<double> xb_;
  std::vector<double> yr_, ym_;
  double m_art_ = 1e6;
  bool warm_ = false;
  int iterations_ = 0;
};

void Simplex::build_standard_form() {
  n_user_ = lp_.num_rows();
  int n = lp_.num_columns();
  std::vector<int> ub_cols;
  for (int j = 0; j < n; ++j)
    if (j < static_cast<int>(lp_.upper.size()) && lp_.upper[j] < kInf / 2) ub_cols.push_back(j);
  m_ = n_user_ + static_cast<int>(ub_cols.size());
  b_.assign(m_, 0.0);
  flipped_.assign(m_, 0);
  std::vector<RowSense> sense(m_, RowSense::kLe);
  for (int i = 0; i < n_user_; ++i) {
    b_[i] = lp_.rhs[i];
    sense[i] = lp_.sense[i];
  }
  for (std::size_t k = 0; k < ub_cols.size(); ++k) b_[n_user_ + k] = lp_.upper[ub_cols[k]];
  for (int i = 0; i < m_; ++i) {
    if (b_[i] < 0.0) {
      flipped_[i] = 1;
      b_[i] = -b_[i];
      if (sense[i] == RowSense::kLe) sense[i] = RowSense::kGe;
      else if (sense[i] == RowSense::kGe) sense[i] = RowSense::kLe;
    }
  }
  cols_.assign(n, {});
  double max_c = 0.0;
  for (int j = 0; j < n; ++j) {
    for (const auto& e : lp_.columns[j]) {
      if (e.row < 0 || e.row >= n_user_) {
        std::ostringstream os;
        os << "column " << j << " references row " << e.row << " outside 0.." << n_user_ - 1;
        throw LpError(os.str());
      }
      if (!std::isfinite(e.value)) throw LpError("non-finite coefficient in column " + std::to_string(j));
      if (e.value != 0.0) cols_[j].push_back({e.row, flipped_[e.row] ? -e.value : e.value});
    }
    max_c = std::max(max_c, std::fabs(lp_.cost[j]));
  }
  for (std::size_t k = 0; k < ub_cols.size(); ++k) {
    int i = n_user_ + static_cast<int>(k);
    cols_[ub_cols[k]].push_back({i, flipped_[i] ? -1.0 : 1.0});
  }
  m_art_ = std::max(1e6, 1e6 * max_c);

  vars_.clear();
  cost_r_.clear();
  cost_m_.clear();
  for (int j = 0; j < n; ++j) {
    vars_.push_back({VarKind::kStructural, j});
    cost_r_.push_back(lp_.cost[j]);
    cost_m_.push_back(0.0);
  }
  slack_of_.assign(m_, -1);
  art_of_.assign(m_, -1);
  for (int i = 0; i < m_; ++i) {
    if (sense[i] != RowSense::kEq) {
      slack_of_[i] = static_cast<int>(vars_.size());
      // Slack stored with its sign: +1 for <=, -1 for >=.
      vars_.push_back({VarKind::kSlack, sense[i] == RowSense::kLe ? i : -(i + 1)});
      cost_r_.push_back(0.0);
      cost_m_.push_back(0.0);
    }
  }
  for (int i = 0; i < m_; ++i) {
    if (sense[i] != RowSense::kLe) {
      art_of_[i] = static_cast<int>(vars_.size());
      vars_.push_back({VarKind::kArtificial, i});
      cost_r_.push_back(0.0);
      cost_m_.push_back(1.0);
    }
  }
  pos_.assign(vars_.size(), -1);
  dead_.assign(vars_.size(), 0);
}

void Simplex::column_of(int v, std::vector<double>& dense) const {
  std::fill(dense.begin(), dense.end(), 0.0);
  const Var& var = vars_[v];
  switch (var.kind) {
    case VarKind::kStructural:
      for (const auto& e : cols_[var.ref]) dense[e.row] = e.value;
      break;
    case VarKind::kSlack:
      if (var.ref >= 0) dense[var.ref] = 1.0;
      else dense[-var.ref - 1] = -1.0;
      break;
    case VarKind::kArtificial:
      dense[var.ref] = 1.0;
      break;
  }
}

double Simplex::dot_column(const std::vector<double>& y, int v) const {
  const Var& var = vars_[v];
  switch (var.kind) {
    case VarKind::kStructural: {
      double s = 0.0;
      for (const auto& e : cols_[var.ref]) s += y[e.row] * e.value;
      return s;
    }
    case VarKind::kSlack:
      return var.ref >= 0 ? y[var.ref] : -y[-var.ref - 1];
    case VarKind::kArtificial:
      return y[var.ref];
  }
  return 0.0;
}

void Simplex::refactor() {
  // Gauss-Jordan inversion with partial pivoting of the basis matrix.
  std::vector<double> a(static_cast<std::size_t>(m_) * m_, 0.0);
  std::vector<double> col(m_);
  for (int k = 0; k < m_; ++k) {
    column_of(basis_[k], col);
    for (int i = 0; i < m_; ++i) a[static_cast<std::size_t>(i) * m_ + k] = col[i];
  }
  binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
  for (int i = 0; i < m_; ++i) binv_[static_cast<std::size_t>(i) * m_ + i] = 1.0;
  for (int k = 0; k < m_; ++k) {
    int best = -1;
    double best_abs = 0.0;
    for (int i = k; i < m_; ++i) {
      double v = std::fabs(a[static_cast<std::size_t>(i) * m_ + k]);
      if (v > best_abs) {
        best_abs = v;
        best = i;
      }
    }
    if (best < 0 || best_abs < kPivotTol) {
      std::ostringstream os;
      os << "numerical breakdown: singular basis at row " << k << ", basic variable " << basis_[k] << " (pivot " << best_abs << ", m " << m_ << ", iteration " << iterations_ << ")";
      throw SingularBasis(os.str());
    }
    if (best != k) {
      for (int c = 0; c < m_; ++c) {
        std::swap(a[static_cast<std::size_t>(k) * m_ + c], a[static_cast<std::size_t>(best) * m_ + c]);
        std::swap(binv_[static_cast<std::size_t>(k) * m_ + c], binv_[static_cast<std::size_t>(best) * m_ + c]);
      }
    }
    double piv = a[static_cast<std::size_t>(k) * m_ + k];
    double inv = 1.0 / piv;
    for (int c = 0; c < m_; ++c) {
      a[static_cast<std::size_t>(k) * m_ + c] *= inv;
      binv_[static_cast<std::size_t>(k) * m_ + c] *= inv;
    }
    for (int i = 0; i < m_; ++i) {
      if (i == k) continue;
      double f = a[static_cast<std::size_t>(i) * m_ + k];
      if (f == 0.0) continue;
      double* ai = &a[static_cast<std::size_t>(i) * m_];
      const double* ak = &a[static_cast<std::size_t>(k) * m_];
      double* bi = &binv_[static_cast<std::size_t>(i) * m_];
      const double* bk = &binv_[static_cast<std::size_t>(k) * m_];
      for (int c = 0; c < m_; ++c) {
        ai[c] -= f * ak[c];
        bi[c] -= f * bk[c];
      }
    }
  }
  xb_.assign(m_, 0.0);
  for (int i = 0; i < m_; ++i) {
    double s = 0.0;
    const double* bi = &binv_[static_cast<std::size_t>(i) * m_];
    for (int c = 0; c < m_; ++c) s += bi[c] * b_[c];
    xb_[i] = s;
  }
}

void Simplex::compute_duals() {
  yr_.assign(m_, 0.0);
  ym_.assign(m_, 0.0);
  for (int k = 0; k < m_; ++k) {
    double cr = cost_r_[basis_[k]], cm = cost_m_[basis_[k]];
    if (cr == 0.0 && cm == 0.0) continue;
    const double* bk = &binv_[static_cast<std::size_t>(k) * m_];
    for (int c = 0; c < m_; ++c) {
      yr_[c] += cr * bk[c];
      ym_[c] += cm * bk[c];
    }
  }
}

void Simplex::cold_start() {
  basis_.assign(m_, -1);
  std::fill(pos_.begin(), pos_.end(), -1);
  for (int i = 0; i < m_; ++i) {
    int v = art_of_[i] >= 0 ? art_of_[i] : slack_of_[i];
    basis_[i] = v;
    pos_[v] = i;
  }
  std::fill(dead_.begin(), dead_.end(), 0);
  refactor();
}

bool Simplex::try_warm_start() {
  const LpBasis* ws = opt_.warm_start;
  if (ws == nullptr || ws->empty() || m_ != n_user_) return false;
  std::map<std::int64_t, int> col_index, row_index;
  for (int j = 0; j < lp_.num_columns(); ++j) col_index[lp_.column_key[j]] = j;
  for (int i = 0; i < n_user_; ++i) row_index[lp_.row_key[i]] = i;
  std::vector<int> basis;
  std::vector<char> covered(m_, 0);
  for (const auto& e : ws->basic) {
    if (e.kind == 0) {
      auto it = col_index.find(e.key);
      if (it == col_index.end()) return false;
      basis.push_back(it->second);
    } else {
      auto it = row_index.find(e.key);
      if (it == row_index.end()) return false;
      int v = e.kind == 1 ? slack_of_[it->second] : art_of_[it->second];
      if (v < 0) return false;
      basis.push_back(v);
    }
  }
  std::map<std::int64_t, bool> old_rows;
  for (auto k : ws->rows) old_rows[k] = true;
  for (int i = 0; i < n_user_; ++i) {
    if (old_rows.count(lp_.row_key[i])) continue;
    basis.push_back(art_of_[i] >= 0 ? art_of_[i] : slack_of_[i]);
  }
  if (static_cast<int>(basis.size()) != m_) return false;
  std::vector<int> seen(vars_.size(), 0);
  for (int v : basis)
    if (seen[v]++) return false;
  basis_ = basis;
  std::fill(pos_.begin(), pos_.end(), -1);
  for (int k = 0; k < m_; ++k) pos_[basis_[k]] = k;
  try {
    refactor();
  } catch (const SingularBasis&) {
    return false;
  }
  for (double x : xb_)
    if (x < -1e-9) return false;
  // Artificials outside the basis never re-enter.
  std::fill(dead_.begin(), dead_.end(), 0);
  for (int i = 0; i < m_; ++i)
    if (art_of_[i] >= 0 && pos_[art_of_[i]] < 0) dead_[art_of_[i]] = 1;
  return true;
}

LpSolution Simplex::run() {
  if (static_cast<int>(lp_.columns.size()) != lp_.num_columns() ||
      static_cast<int>(lp_.sense.size()) != lp_.num_rows())
    throw LpError("inconsistent LP dimensions");
  build_standard_form();
  warm_ = try_warm_start();
  if (!warm_) cold_start();
  // A basis that drifts singular is rebuilt from the slack/artificial start.
  for (int attempt = 0;; ++attempt) {
    try {
      return iterate();
    } catch (const SingularBasis&) {
      if (attempt >= 2) throw;
      log_trace("simplex: singular basis, cold restart");
      warm_ = false;
      cold_start();
    }
  }
}

LpSolution Simplex::iterate() {

  const int nv = static_cast<int>(vars_.size());
  std::vector<double> dense(m_), d(m_);
  int since_refactor = 0;
  int degenerate_streak = 0;
  bool lex = false;  // lexicographic ratio test while degenerate
  std::vector<double> lexq;
  while (true) {
    if (iterations_ >= opt_.max_iterations) throw LpError("simplex iteration limit reached");
    compute_duals();
    // Pricing: lexicographic (M part, real part) reduced costs.
    int enter = -1;
    double best_m = 0.0, best_r = 0.0;
    for (int v = 0; v < nv; ++v) {
      if (pos_[v] >= 0 || dead_[v]) continue;
      double dm = cost_m_[v] - dot_column(ym_, v);
      double dr;
      bool eligible = false;
      if (dm < -kCostTol) {
        eligible = true;
        dr = 0.0;
      } else if (dm <= kCostTol) {
        dr = cost_r_[v] - dot_column(yr_, v);
        eligible = dr < -kCostTol * (1.0 + std::fabs(cost_r_[v]));
      } else {
        continue;
      }
      if (!eligible) continue;
      if (dm < -kCostTol) {
        if (best_m > -kCostTol || dm < best_m) {
          best_m = dm;
          enter = v;
        }
      } else if (best_m > -kCostTol && dr < best_r) {
        best_r = dr;
        enter = v;
      }
    }
    if (enter < 0) break;

    column_of(enter, dense);
    for (int i = 0; i < m_; ++i) {
      const double* bi = &binv_[static_cast<std::size_t>(i) * m_];
      double s = 0.0;
      const Var& var = vars_[enter];
      if (var.kind == VarKind::kStructural) {
        for (const auto& e : cols_[var.ref]) s += bi[e.row] * e.value;
      } else {
        for (int c = 0; c < m_; ++c) s += bi[c] * dense[c];
      }
      d[i] = s;
    }
    double max_d = 0.0;
    for (int i = 0; i < m_; ++i) max_d = std::max(max_d, d[i]);
    int leave = -1;
    // Prefer pivots that are not tiny relative to the column.
    for (double min_pivot : {std::max(kHarrisPivot, kRelativePivot * max_d), kEntryTol}) {
      if (lex) {
        // Minimum ratio, ties broken on the rows of [x_B | Q] / d with
        // Q = B^-1 B0 for the basis B0 at the switch, so every row starts
        // lexicographically positive. Values below the degeneracy floor count
        // as zero.
        auto xval = [&](int i) { return xb_[i] > kDegenerate ? xb_[i] : 0.0; };
        double best_ratio = kInf;
        for (int i = 0; i < m_; ++i)
          if (d[i] > min_pivot) best_ratio = std::min(best_ratio, xval(i) / d[i]);
        std::vector<int> tied;
        for (int i = 0; i < m_; ++i)
          if (d[i] > min_pivot && xval(i) / d[i] <= best_ratio + 1e-12) tied.push_back(i);
        for (int c = 0; c < m_ && tied.size() > 1; ++c) {
          double lo = kInf;
          for (int i : tied) lo = std::min(lo, lexq[static_cast<std::size_t>(i) * m_ + c] / d[i]);
          std::vector<int> keep;
          for (int i : tied)
            if (lexq[static_cast<std::size_t>(i) * m_ + c] / d[i] <= lo + 1e-12) keep.push_back(i);
          tied.swap(keep);
        }
        if (!tied.empty()) leave = tied.front();
      } else {
        // Harris two-pass: bound the step with slightly relaxed values, then
        // take the largest pivot within that step.
        double step = kInf;
        for (int i = 0; i < m_; ++i)
          if (d[i] > min_pivot) step = std::min(step, (std::max(0.0, xb_[i]) + kHarrisSlack) / d[i]);
        for (int i = 0; i < m_; ++i)
          if (d[i] > min_pivot && std::max(0.0, xb_[i]) / d[i] <= step && (leave < 0 || d[i] > d[leave])) leave = i;
      }
      if (leave >= 0) break;
    }
    if (leave < 0) return finish(LpStatus::kUnbounded);

    double piv = d[leave];
    if (std::fabs(piv) < kPivotTol) {
      std::ostringstream os;
      os << "numerical breakdown: pivot " << piv << " at row " << leave << ", column " << enter;
      throw LpError(os.str());
    }
    // Update basic values and the inverse.
    double theta = std::max(0.0, xb_[leave]) / piv;
    for (int i = 0; i < m_; ++i) xb_[i] -= theta * d[i];
    xb_[leave] = theta;
    double* br = &binv_[static_cast<std::size_t>(leave) * m_];
    double inv = 1.0 / piv;
    for (int c = 0; c < m_; ++c) br[c] *= inv;
    for (int i = 0; i < m_; ++i) {
      if (i == leave || d[i] == 0.0) continue;
      double f = d[i];
      double* bi = &binv_[static_cast<std::size_t>(i) * m_];
      for (int c = 0; c < m_; ++c) bi[c] -= f * br[c];
    }
    if (lex) {
      double* qr = &lexq[static_cast<std::size_t>(leave) * m_];
      for (int c = 0; c < m_; ++c) qr[c] *= inv;
      for (int i = 0; i < m_; ++i) {
        if (i == leave || d[i] == 0.0) continue;
        double f = d[i];
        double* qi = &lexq[static_cast<std::size_t>(i) * m_];
        for (int c = 0; c < m_; ++c) qi[c] -= f * qr[c];
      }
    }
    int out = basis_[leave];
    pos_[out] = -1;
    if (vars_[out].kind == VarKind::kArtificial) dead_[out] = 1;
    basis_[leave] = enter;
    pos_[enter] = leave;
    ++iterations_;

    if (theta <= kDegenerate) {
      if (++degenerate_streak > 50 && !lex) {
        lex = true;
        lexq.assign(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int i = 0; i < m_; ++i) lexq[static_cast<std::size_t>(i) * m_ + i] = 1.0;
      }
    } else {
      degenerate_streak = 0;
      lex = false;
    }
    if (++since_refactor >= opt_.refactor_period) {
      refactor();
      since_refactor = 0;
    }
  }
  refactor();
  compute_duals();
  double art = 0.0;
  for (int k = 0; k < m_; ++k)
    if (vars_[basis_[k]].kind == VarKind::kArtificial) art += std::max(0.0, xb_[k]);
  double scale = 1.0;
  for (double v : b_) scale = std::max(scale, std::fabs(v));
  return finish(art > 1e-9 * scale ? LpStatus::kArtificialPositive : LpStatus::kOptimal);
}

LpSolution Simplex::finish(LpStatus status) {
  LpSolution sol;
  sol.status = status;
  sol.iterations = iterations_;
  sol.warm_started = warm_;
  int n = lp_.num_columns();
  sol.primal.assign(n, 0.0);
  double art = 0.0;
  for (int k = 0; k < m_; ++k) {
    const Var& v = vars_[basis_[k]];
    double x = std::max(0.0, xb_[k]);
    if (v.kind == VarKind::kStructural) sol.primal[v.ref] = x;
    else if (v.kind == VarKind::kArtificial) art += x;
  }
  sol.artificial_sum = art;
  double obj = 0.0;
  for (int j = 0; j < n; ++j) obj += lp_.cost[j] * sol.primal[j];
  sol.objective = status == LpStatus::kArtificialPositive ? obj + m_art_ * art : obj;

  // Combine the two dual parts. At a feasible optimum the smallest multiplier
  // keeping every non-artificial column dual feasible is used, which is an
  // optimal dual because the M part of b vanishes there.
  double lambda = m_art_;
  if (status == LpStatus::kOptimal) {
    lambda = 0.0;
    for (int v = 0; v < static_cast<int>(vars_.size()); ++v) {
      if (vars_[v].kind == VarKind::kArtificial) continue;
      double dm = cost_m_[v] - dot_column(ym_, v);
      if (dm <= kCostTol) continue;
      double dr = cost_r_[v] - dot_column(yr_, v);
      if (dr < 0.0) lambda = std::max(lambda, -dr / dm);
    }
  }
  sol.dual.assign(n_user_, 0.0);
  for (int i = 0; i < n_user_; ++i) {
    double y = yr_[i] + lambda * ym_[i];
    sol.dual[i] = flipped_[i] ? -y : y;
  }
  if (m_ == n_user_) {
    for (int k = 0; k < m_; ++k) {
      const Var& v = vars_[basis_[k]];
      if (v.kind == VarKind::kStructural) {
        sol.basis.basic.push_back({0, lp_.column_key[v.ref]});
      } else {
        int row = v.kind == VarKind::kSlack ? (v.ref >= 0 ? v.ref : -v.ref - 1) : v.ref;
        sol.basis.basic.push_back({v.kind == VarKind::kSlack ? 1 : 2, lp_.row_key[row]});
      }
    }
    sol.basis.rows = lp_.row_key;
  }
  return sol;
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options) {
  Simplex s(lp, options);
  return s.run();
}

double lp_primal_residual(const LinearProgram& lp, const std::vector<double>& x) {
  std::vector<double> lhs(lp.num_rows(), 0.0);
  double worst = 0.0;
  for (int j = 0; j < lp.num_columns(); ++j) {
    worst = std::max(worst, -x[j]);
    if (j < static_cast<int>(lp.upper.size()) && lp.upper[j] < kInf / 2)
      worst = std::max(worst, x[j] - lp.upper[j]);
    for (const auto& e : lp.columns[j]) lhs[e.row] += e.value * x[j];
  }
  for (int i = 0; i < lp.num_rows(); ++i) {
    double r = lhs[i] - lp.rhs[i];
    switch (lp.sense[i]) {
      case RowSense::kLe: worst = std::max(worst, r); break;
      case RowSense::kGe: worst = std::max(worst, -r); break;
      case RowSense::kEq: worst = std::max(worst, std::fabs(r)); break;
    }
  }
  return worst;
}

double lp_min_reduced_cost(const LinearProgram& lp, const std::vector<double>& y) {
  double worst = 0.0;
  for (int j = 0; j < lp.num_columns(); ++j) {
    if (j < static_cast<int>(lp.upper.size()) && lp.upper[j] < kInf / 2) continue;
    double d = lp.cost[j];
    for (const auto& e : lp.columns[j]) d -= y[e.row] * e.value;
    worst = std::min(worst, d);
  }
  for (int i = 0; i < lp.num_rows(); ++i) {
    if (lp.sense[i] == RowSense::kGe) worst = std::min(worst, y[i]);
    if (lp.sense[i] == RowSense::kLe) worst = std::min(worst, -y[i]);
  }
  return worst;
}

double lp_dual_objective(const LinearProgram& lp, const std::vector<double>& y) {
  double s = 0.0;
  for (int i = 0; i < lp.num_rows(); ++i) s += lp.rhs[i] * y[i];
  return s;
}

}  // namespace fireline
