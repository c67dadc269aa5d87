#include "fireline/pricing.hpp"

#include <algorithm>
#include <limits>

namespace fireline {

std::optional<DagPath> topological_shortest_path(const Dag& dag, std::span<const double> cost,
                                                 std::span<const char> enabled) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> label(dag.num_nodes(), inf);
  std::vector<int> pred(dag.num_nodes(), -1);
  label[dag.start] = 0.0;
  for (int u : dag.order) {
    if (label[u] == inf) continue;
    for (int k = dag.out_offset[u]; k < dag.out_offset[u + 1]; ++k) {
      int a = dag.out_arcs[k];
      if (!enabled.empty() && !enabled[a]) continue;
      int v = dag.head[a];
      double c = label[u] + cost[a];
      if (c < label[v]) {
        label[v] = c;
        pred[v] = a;
      }
    }
  }
  int best = -1;
  for (int n = 0; n < dag.num_nodes(); ++n) {
    if (dag.period[n] != dag.terminal_period || label[n] == inf) continue;
    if (best < 0 || label[n] < label[best]) best = n;
  }
  if (best < 0) return std::nullopt;
  DagPath path;
  path.cost = label[best];
  for (int n = best; n != dag.start;) {
    int a = pred[n];
    path.arcs.push_back(a);
    n = dag.tail[a];
  }
  std::reverse(path.arcs.begin(), path.arcs.end());
  return path;
}

std::vector<char> fire_arc_mask(const Problem& problem, int g, const BranchSet& branch) {
  const FireNetwork& net = problem.fires[g];
  std::vector<char> mask(net.dag.num_arcs(), 1);
  for (auto it = branch.demand.lower_bound({g, 0}); it != branch.demand.end() && it->first.first == g; ++it) {
    int t = it->first.second;
    for (int a : net.arcs_at[t - 1])
      if (net.label[a] < it->second.lo || net.label[a] > it->second.hi) mask[a] = 0;
  }
  return mask;
}

std::vector<char> crew_arc_mask(const Problem& problem, int j, const BranchSet& branch) {
  const CrewNetwork& net = problem.crews[j];
  std::vector<char> mask(net.dag.num_arcs(), 1);
  for (auto it = branch.assignment.lower_bound({j, INT_MIN, INT_MIN});
       it != branch.assignment.end() && std::get<0>(it->first) == j; ++it) {
    auto [jj, g, t] = it->first;
    const auto& keep = net.work_arcs_at(g, t);
    if (!it->second) {
      for (int a : keep) mask[a] = 0;
      continue;
    }
    for (int a = 0; a < net.dag.num_arcs(); ++a) {
      int t1 = net.nodes[net.dag.tail[a]].period, t2 = net.nodes[net.dag.head[a]].period;
      if (t1 <= t && t < t2 && std::find(keep.begin(), keep.end(), a) == keep.end()) mask[a] = 0;
    }
  }
  return mask;
}

FirePricing price_fire(const Problem& problem, int g, const DualSolution& duals,
                       const std::vector<RobustCut>& cuts, const BranchSet& branch) {
  const FireNetwork& net = problem.fires[g];
  std::vector<double> cost(net.damage);
  for (int t = 1; t <= problem.T; ++t) {
    double rho = duals.rho[problem.link_index(g, t)];
    if (rho != 0.0)
      for (int a : net.crew_arcs_at[t - 1]) cost[a] += net.label[a] * rho;
  }
  for (std::size_t u = 0; u < cuts.size(); ++u) {
    double alpha = duals.alpha[u];
    if (alpha == 0.0) continue;
    const RobustCut& cut = cuts[u];
    if (!std::binary_search(cut.fires.begin(), cut.fires.end(), g)) continue;
    for (int a : net.arcs_at[cut.period - 1]) cost[a] += alpha * cut.fire_coefficient(g, net.label[a]);
  }
  std::vector<char> mask = fire_arc_mask(problem, g, branch);
  FirePricing out;
  auto path = topological_shortest_path(net.dag, cost, mask);
  if (!path) return out;
  out.feasible = true;
  out.plan = make_fire_plan(problem, g, std::move(path->arcs));
  out.reduced_cost = path->cost - duals.sigma[g];
  return out;
}

CrewPricing price_crew(const Problem& problem, int j, const DualSolution& duals,
                       const std::vector<RobustCut>& cuts, const BranchSet& branch) {
  const CrewNetwork& net = problem.crews[j];
  std::vector<double> cost(net.cost);
  for (int g = 0; g < problem.G; ++g)
    for (int t = 1; t <= problem.T; ++t) {
      double rho = duals.rho[problem.link_index(g, t)];
      if (rho != 0.0)
        for (int a : net.work_arcs_at(g, t)) cost[a] -= rho;
    }
  double constant = 0.0;
  for (std::size_t u = 0; u < cuts.size(); ++u) {
    double alpha = duals.alpha[u];
    const RobustCut& cut = cuts[u];
    if (alpha == 0.0 || !std::binary_search(cut.crews.begin(), cut.crews.end(), j)) continue;
    constant += alpha;
    for (int g : cut.fires)
      for (int a : net.work_arcs_at(g, cut.period)) cost[a] -= alpha;
  }
  std::vector<char> mask = crew_arc_mask(problem, j, branch);
  CrewPricing out;
  auto path = topological_shortest_path(net.dag, cost, mask);
  if (!path) return out;
  out.feasible = true;
  out.route = make_crew_route(problem, j, std::move(path->arcs));
  out.reduced_cost = path->cost + constant - duals.pi[j];
  return out;
}

double fire_reduced_cost(const Problem& problem, const FirePlan& plan, const DualSolution& duals,
                         const std::vector<RobustCut>& cuts) {
  double rc = plan.cost - duals.sigma[plan.fire];
  for (int t = 1; t <= problem.T; ++t) rc += plan.demand_at(t) * duals.rho[problem.link_index(plan.fire, t)];
  for (std::size_t u = 0; u < cuts.size(); ++u)
    rc += duals.alpha[u] * cuts[u].fire_coefficient(plan.fire, plan.demand_at(cuts[u].period));
  return rc;
}

double crew_reduced_cost(const Problem& problem, const CrewRoute& route, const DualSolution& duals,
                         const std::vector<RobustCut>& cuts) {
  double rc = route.cost - duals.pi[route.crew];
  for (int t = 1; t <= problem.T; ++t)
    if (route.work[t - 1] >= 0) rc -= duals.rho[problem.link_index(route.work[t - 1], t)];
  for (std::size_t u = 0; u < cuts.size(); ++u) rc += duals.alpha[u] * cuts[u].route_coefficient(route);
  return rc;
}

}  // namespace fireline
