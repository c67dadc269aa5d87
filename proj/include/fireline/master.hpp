#pragma once

#include <optional>
#include <vector>

#include "fireline/columns.hpp"
#include "fireline/lp.hpp"

namespace fireline {

struct RestrictedMaster {
  const Problem* problem = nullptr;
  const ColumnPool* pool = nullptr;
  const BranchSet* branch = nullptr;        // optional
  const std::vector<RobustCut>* cuts = nullptr;  // optional
  bool stabilize = false;                   // adds deferral columns
  // Optional extra column filters, indexed like the pool.
  const std::vector<std::vector<char>>* plan_mask = nullptr;
  const std::vector<std::vector<char>>* route_mask = nullptr;

  bool uses_plan(int g, int q) const;
  bool uses_route(int j, int p) const;
};

struct RowTag {
  enum Family { kFire, kCrew, kLink, kCut } family = kFire;
  int index = 0;
};

struct RmpSolution {
  LpSolution lp;
  bool infeasible = false;  // artificial-positive
  double objective = 0.0;
  std::vector<std::vector<double>> y;  // per fire, aligned with the pool
  std::vector<std::vector<double>> z;  // per crew, aligned with the pool
  std::vector<double> deferral;        // per (g, t), t = 1..T-1
  DualSolution duals;
  std::vector<RowTag> tags;
};

// Routes each row dual to its family. Throws Error unless the LP status is
// optimal or allow_infeasible is set (big-M duals of an artificial-positive
// master are then returned). rho and alpha are clipped at zero.
DualSolution extract_duals(const LpSolution& solution, const std::vector<RowTag>& tags, int fires, int crews,
                           int periods, int cuts, bool allow_infeasible = false);

RmpSolution assemble_and_solve_rmp(const RestrictedMaster& master, const LpBasis* warm_start = nullptr);

// Left-hand side of a cut at a master solution.
double cut_lhs_value(const RobustCut& cut, const ColumnPool& pool, const std::vector<std::vector<double>>& y,
                     const std::vector<std::vector<double>>& z);

struct IntegerSolution {
  double cost = 0.0;
  std::vector<int> plan;   // pool index per fire
  std::vector<int> route;  // pool index per crew
};

struct IntegerMasterOptions {
  int node_limit = 20000;
  double time_limit = 1e9;  // seconds
  double cutoff = kInf;     // only solutions strictly below are reported
};

struct IntegerMasterResult {
  std::optional<IntegerSolution> best;
  bool complete = true;  // search finished within its limits
  int nodes = 0;
};

// Depth-first branch-and-bound over the pooled columns, fixing the most
// fractional column variable (value 1 first).
IntegerMasterResult solve_integer_restricted_master(const RestrictedMaster& master,
                                                    const IntegerMasterOptions& options = {});

bool is_integral_value(double v, double tol = 1e-6);

}  // namespace fireline
