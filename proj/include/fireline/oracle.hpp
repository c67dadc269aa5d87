#pragma once

#include <cstdint>
#include <vector>

#include "fireline/columns.hpp"

namespace fireline {

struct OracleLimits {
  std::size_t max_paths = 100000;          // per network
  std::size_t max_combinations = 5000000;  // crew route combinations
};

// Every start->terminal path, depth first. Throws GuardError past max_paths.
std::vector<std::vector<int>> enumerate_paths(const Dag& dag, std::size_t max_paths);
std::vector<FirePlan> enumerate_fire_plans(const Problem& problem, int g, std::size_t max_paths = 100000);
std::vector<CrewRoute> enumerate_crew_routes(const Problem& problem, int j, std::size_t max_paths = 100000);

struct OracleOptimum {
  bool feasible = false;
  double cost = 0.0;
  std::vector<FirePlan> plans;    // one per fire
  std::vector<CrewRoute> routes;  // one per crew
  std::size_t combinations = 0;
};

OracleOptimum brute_force_optimum(const Problem& problem, const BranchSet& branch = {},
                                  const OracleLimits& limits = {});

struct EquivalenceReport {
  OracleOptimum path;
  bool arc_feasible = false;
  double arc_optimum = 0.0;
  bool path_lp_feasible = false, arc_lp_feasible = false;
  double path_lp = 0.0, arc_lp = 0.0;
  bool integer_equal = false, lp_equal = false;
};

// Arc-based model solved by recombining per-network paths, with signatures
// read from the arc index sets; LP relaxations compared via the full-pool
// master and an explicit arc-flow LP.
EquivalenceReport check_formulation_equivalence(const Problem& problem, const BranchSet& branch = {},
                                                const OracleLimits& limits = {});

// Integer solutions seen at one period: each crew's fire (or -1) and, per
// fire, the bitmask of demand levels some feasible plan uses at that period.
struct PeriodProjection {
  std::vector<int> work;
  std::vector<std::uint32_t> demand_mask;
  bool operator<(const PeriodProjection& o) const {
    return work != o.work ? work < o.work : demand_mask < o.demand_mask;
  }
};

// Indexed by t - 1, deduplicated.
std::vector<std::vector<PeriodProjection>> integer_period_projections(const Problem& problem,
                                                                      const OracleLimits& limits = {});
// Largest cut left-hand side over every integer solution.
double max_integer_cut_lhs(const RobustCut& cut, const std::vector<PeriodProjection>& at_period);

// Checks the deferral-proof definition over all plans of a fire network.
bool plans_deferral_proof(const Problem& problem, int g, std::size_t max_paths = 100000);

GeneratorParams tiny_generator_params();
// Seeded instances with <= 3 crews, <= 3 fires, T <= 5 and at most 8 fire
// states per period.
std::vector<Instance> tiny_suite(int count, std::uint64_t first_seed = 1);

}  // namespace fireline
