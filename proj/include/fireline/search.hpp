#pragma once

#include <chrono>
#include <climits>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fireline/cuts.hpp"
#include "fireline/io.hpp"
#include "fireline/master.hpp"

namespace fireline {

using Clock = std::chrono::steady_clock;

enum class BranchRule { kMostFractional, kMaxVariance, kDualMaxVariance };
enum class StabilizeMode { kOff, kOn, kAuto };

const char* branch_rule_name(BranchRule rule);
BranchRule parse_branch_rule(const std::string& name);
const char* stabilize_mode_name(StabilizeMode mode);
StabilizeMode parse_stabilize_mode(const std::string& name);

struct SearchConfig {
  double time_limit = 1200.0;  // seconds
  CutMode cut_mode = CutMode::kAugmentedGub;
  BranchRule branch_rule = BranchRule::kDualMaxVariance;
  double heuristic_period = 120.0;  // seconds; negative disables the heuristic
  double heuristic_budget = 30.0;   // seconds per heuristic call
  StabilizeMode stabilize = StabilizeMode::kAuto;
  int stabilize_iterations = 30;  // stabilized CG iterations in the auto mode
  int threads = 1;
  int max_cut_rounds = 5;
  int max_cuts_per_round = 50;
  int cg_iteration_cap = 10000;
  int node_limit = INT_MAX;  // nodes processed; 1 evaluates the root only
};

// ---------------------------------------------------------------------------
// Column generation

struct CgOptions {
  bool stabilize = false;
  int stabilize_iterations = -1;  // -1: stabilized phase runs to convergence
  bool polish = true;             // finish unstabilized
  int iteration_cap = 10000;
  int threads = 1;
  Clock::time_point deadline = Clock::time_point::max();
};

struct CgResult {
  bool infeasible = false;
  bool timed_out = false;
  RmpSolution rmp;
  int iterations = 0;
  int columns_added = 0;
  std::vector<double> trace;  // RMP value after each solve
  double stabilized_value = std::numeric_limits<double>::quiet_NaN();  // converged, before polish
  std::vector<double> stabilized_rho;
};

// Two-sided column generation over the shared pool, honoring the node's branch set and cuts.
CgResult two_sided_column_generation(const Problem& problem, ColumnPool& pool, const BranchSet& branch,
                                     const std::vector<RobustCut>& cuts, const CgOptions& options,
                                     const LpBasis* warm_start = nullptr);

// ---------------------------------------------------------------------------
// Branching

struct BranchCandidate {
  enum Kind { kFire, kCrew } kind = kFire;
  int fire = 0;
  int crew = -1;
  int period = 1;
  double mean = 0.0;      // sum B y or sum A z
  double variance = 0.0;  // unscaled
  double score = 0.0;     // rule-specific
};

// Candidates with positive variance, best first. MF falls back to the MV
// order when no mean is fractional.
std::vector<BranchCandidate> compute_branch_scores(const Problem& problem, const ColumnPool& pool,
                                                   const RmpSolution& solution, BranchRule rule);

// (low child, high child). Throws Error on a zero-variance candidate.
std::pair<BranchSet, BranchSet> make_children(const BranchSet& parent, const BranchCandidate& candidate);

// True when some column carrying positive weight is excluded by the branch set.
bool excludes_solution(const ColumnPool& pool, const RmpSolution& solution, const BranchSet& branch);

// ---------------------------------------------------------------------------
// Heuristic

struct HeuristicOptions {
  double budget = 30.0;  // seconds
  double cutoff = kInf;
  int threads = 1;
  CutMode cut_mode = CutMode::kNone;
  int max_cuts_per_round = 50;
  int stagnant_rounds = 3;
  Clock::time_point deadline = Clock::time_point::max();
};

struct HeuristicResult {
  std::optional<IntegerSolution> best;
  int rounds = 0;
};

// Demand-cap heuristic: caps from the fractional solution, raised by one per round.
HeuristicResult fire_demand_heuristic(const Problem& problem, ColumnPool& pool, const BranchSet& branch,
                                      const std::vector<RobustCut>& cuts, const RmpSolution& fractional,
                                      const HeuristicOptions& options);

// ---------------------------------------------------------------------------
// Branch-and-price-and-cut

struct SearchLogRow {
  int node_id = 0;
  int parent = -1;
  int depth = 0;
  double lp_value = 0.0;
  std::size_t n_columns = 0;
  int n_cuts = 0;
  std::string action;
  double ub = kInf;
  double lb = -kInf;
  double wall_time = 0.0;
};

struct SearchStats {
  int nodes_processed = 0;
  int nodes_created = 1;
  int branches = 0;
  int separation_checks = 0;
  int separation_failures = 0;
  int zero_variance_conversions = 0;
  int cuts_added = 0;
  int cg_iterations = 0;
  int heuristic_calls = 0;
  int heuristic_improvements = 0;
};

struct SearchResult {
  bool has_incumbent = false;
  bool optimal = false;
  bool timed_out = false;
  double upper_bound = kInf;
  double lower_bound = -kInf;
  double gap = std::numeric_limits<double>::infinity();
  std::vector<FirePlan> plans;
  std::vector<CrewRoute> routes;
  double root_lp_no_cuts = std::numeric_limits<double>::quiet_NaN();
  double root_lp = std::numeric_limits<double>::quiet_NaN();
  double root_lp_stabilized = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> root_rho_stabilized;
  std::size_t columns = 0;
  SearchStats stats;
  std::vector<SearchLogRow> log;
  double wall_time = 0.0;
};

double search_gap(double upper_bound, double lower_bound);

SearchResult branch_price_and_cut(const Problem& problem, const SearchConfig& config);

// Solution file: config, objective, bounds, per-fire plans and trajectories,
// per-crew routes. Wall-clock fields only when timing is set.
Json solution_to_json(const Problem& problem, const SearchResult& result, const SearchConfig& config,
                      bool timing = false);
std::string search_log_csv(const SearchResult& result, bool timing = false);

}  // namespace fireline
