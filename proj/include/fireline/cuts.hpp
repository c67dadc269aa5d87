#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "fireline/columns.hpp"

namespace fireline {

// Projection of a master solution onto one period.
struct PeriodSnapshot {
  int period = 1;
  int J = 0;
  std::vector<std::vector<double>> demand_weight;  // per fire, levels 0..J
  std::vector<std::vector<double>> crew_work;      // per crew, per fire: assigned mass
  std::vector<int> idle_crews;

  double mean_demand(int g) const;
};

PeriodSnapshot make_snapshot(const Problem& problem, const ColumnPool& pool,
                             const std::vector<std::vector<double>>& y, const std::vector<std::vector<double>>& z,
                             int t);

// Left-hand side of a cut evaluated on a snapshot of its period.
double cut_lhs_value(const RobustCut& cut, const PeriodSnapshot& snapshot);

// Minimal violated GUB covers, most violated first.
std::vector<RobustCut> enumerate_gub_covers(const PeriodSnapshot& snapshot, int max_fires = 4, int max_cuts = 50);

// Greedy decrement of the target with the largest excess over the incumbent
// mean demand, while sum(D) > J - |J_u| + 1. incumbent[k] belongs to cut.fires[k].
RobustCut strengthen_gub(const RobustCut& cut, const std::vector<double>& incumbent, int J);

struct SubsetChoice {
  double value = 0.0;
  std::vector<std::pair<int, int>> items;  // (fire position, level)
};

// max sum of delta over sets with at most one level per fire and total
// level <= capacity. delta[k][d] is the weight of level d for fire k.
SubsetChoice dp_max_weight_subset(const std::vector<std::vector<double>>& delta, int capacity);

struct CglpStats {
  int rounds = 0;
  double objective = 0.0;
};

// Cut-generating LP with row generation; returns a cut when its violation
// exceeds 1e-6.
std::optional<RobustCut> separate_agub_cglp(const PeriodSnapshot& snapshot, CglpStats* stats = nullptr,
                                            int max_rounds = 2000);

enum class CutMode { kNone, kGub, kStrengthenedGub, kAugmentedGub };

const char* cut_mode_name(CutMode mode);
CutMode parse_cut_mode(const std::string& name);

// One separation round across all periods. Returned cuts are new (not
// duplicates of `existing`), violated, and capped at max_cuts, most violated
// first.
std::vector<RobustCut> separate_cuts(const Problem& problem, const ColumnPool& pool,
                                     const std::vector<std::vector<double>>& y,
                                     const std::vector<std::vector<double>>& z, CutMode mode,
                                     const std::vector<RobustCut>& existing, int max_cuts = 50);

}  // namespace fireline
