#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fireline/columns.hpp"

namespace fireline {

struct DagPath {
  double cost = 0.0;
  std::vector<int> arcs;
};

// One label pass in topological order. Disabled arcs (enabled[a] == 0) are
// skipped; an empty mask enables every arc. Ties keep the first relaxation in
// node order; among terminal nodes the smallest index wins. Returns nullopt
// when no terminal node is reachable.
std::optional<DagPath> topological_shortest_path(const Dag& dag, std::span<const double> cost,
                                                 std::span<const char> enabled = {});

struct FirePricing {
  bool feasible = false;  // false: every path pruned by the node's constraints
  FirePlan plan;
  double reduced_cost = 0.0;
};

struct CrewPricing {
  bool feasible = false;
  CrewRoute route;
  double reduced_cost = 0.0;
};

FirePricing price_fire(const Problem& problem, int g, const DualSolution& duals,
                       const std::vector<RobustCut>& cuts, const BranchSet& branch);
CrewPricing price_crew(const Problem& problem, int j, const DualSolution& duals,
                       const std::vector<RobustCut>& cuts, const BranchSet& branch);

// Direct evaluation of the reduced cost from the column signature.
double fire_reduced_cost(const Problem& problem, const FirePlan& plan, const DualSolution& duals,
                         const std::vector<RobustCut>& cuts);
double crew_reduced_cost(const Problem& problem, const CrewRoute& route, const DualSolution& duals,
                         const std::vector<RobustCut>& cuts);

// Arc masks implementing the node's branching constraints.
std::vector<char> fire_arc_mask(const Problem& problem, int g, const BranchSet& branch);
std::vector<char> crew_arc_mask(const Problem& problem, int j, const BranchSet& branch);

}  // namespace fireline
