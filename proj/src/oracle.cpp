#include "fireline/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "fireline/common.hpp"
#include "fireline/lp.hpp"
#include "fireline/master.hpp"

namespace fireline {

namespace {

struct Signed {
  std::vector<int> signature;  // demand per period, or fire id per period
  double cost;
};

// Cheapest entry per signature, sorted by cost then signature.
std::vector<Signed> cheapest(std::vector<Signed> items) {
  std::map<std::vector<int>, double> best;
  for (auto& s : items) {
    auto it = best.find(s.signature);
    if (it == best.end() || s.cost < it->second) best[s.signature] = s.cost;
  }
  std::vector<Signed> out;
  for (auto& [sig, c] : best) out.push_back({sig, c});
  std::stable_sort(out.begin(), out.end(), [](const Signed& a, const Signed& b) { return a.cost < b.cost; });
  return out;
}

struct Recombined {
  bool feasible = false;
  double cost = 0.0;
  std::vector<int> plan, route;  // indices into the signature lists
  std::size_t combinations = 0;
};

// Minimum over every crew combination; given the crews each fire independently
// takes its cheapest plan whose demand fits the supply, which equals the
// minimum over all plan combinations for those crews.
Recombined recombine(const std::vector<std::vector<Signed>>& fires, const std::vector<std::vector<Signed>>& crews,
                     int G, int T, const OracleLimits& limits) {
  Recombined r;
  for (const auto& f : fires)
    if (f.empty()) return r;
  for (const auto& c : crews)
    if (c.empty()) return r;
  double combos = 1.0;
  for (const auto& c : crews) combos *= static_cast<double>(c.size());
  if (combos > static_cast<double>(limits.max_combinations)) throw GuardError("instance too large for oracle");
  const int J = static_cast<int>(crews.size());
  std::vector<int> pick(J, 0);
  std::vector<int> supply(static_cast<std::size_t>(G) * T);
  std::vector<int> plan_pick(G);
  while (true) {
    ++r.combinations;
    std::fill(supply.begin(), supply.end(), 0);
    double cost = 0.0;
    for (int j = 0; j < J; ++j) {
      const Signed& s = crews[j][pick[j]];
      cost += s.cost;
      for (int t = 0; t < T; ++t)
        if (s.signature[t] >= 0) ++supply[s.signature[t] * T + t];
    }
    bool ok = true;
    for (int g = 0; g < G && ok; ++g) {
      int found = -1;
      for (std::size_t q = 0; q < fires[g].size() && found < 0; ++q) {
        bool fits = true;
        for (int t = 0; t < T && fits; ++t) fits = fires[g][q].signature[t] <= supply[g * T + t];
        if (fits) found = static_cast<int>(q);
      }
      if (found < 0) ok = false;
      else {
        plan_pick[g] = found;
        cost += fires[g][found].cost;
      }
    }
    if (ok && (!r.feasible || cost < r.cost)) {
      r.feasible = true;
      r.cost = cost;
      r.plan = plan_pick;
      r.route = pick;
    }
    int k = 0;
    while (k < J && ++pick[k] == static_cast<int>(crews[k].size())) pick[k++] = 0;
    if (k == J) break;
  }
  return r;
}

}  // namespace

std::vector<std::vector<int>> enumerate_paths(const Dag& dag, std::size_t max_paths) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int)> dfs = [&](int n) {
    if (dag.period[n] == dag.terminal_period) {
      if (out.size() >= max_paths) throw GuardError("instance too large for oracle");
      out.push_back(cur);
      return;
    }
    for (int k = dag.out_offset[n]; k < dag.out_offset[n + 1]; ++k) {
      int a = dag.out_arcs[k];
      cur.push_back(a);
      dfs(dag.head[a]);
      cur.pop_back();
    }
  };
  dfs(dag.start);
  return out;
}

std::vector<FirePlan> enumerate_fire_plans(const Problem& problem, int g, std::size_t max_paths) {
  std::vector<FirePlan> out;
  for (auto& path : enumerate_paths(problem.fires[g].dag, max_paths)) out.push_back(make_fire_plan(problem, g, path));
  return out;
}

std::vector<CrewRoute> enumerate_crew_routes(const Problem& problem, int j, std::size_t max_paths) {
  std::vector<CrewRoute> out;
  for (auto& path : enumerate_paths(problem.crews[j].dag, max_paths))
    out.push_back(make_crew_route(problem, j, path));
  return out;
}

OracleOptimum brute_force_optimum(const Problem& pr, const BranchSet& branch, const OracleLimits& limits) {
  std::vector<std::vector<FirePlan>> plans(pr.G);
  std::vector<std::vector<CrewRoute>> routes(pr.J);
  std::vector<std::vector<Signed>> fs(pr.G), cs(pr.J);
  for (int g = 0; g < pr.G; ++g) {
    for (auto& p : enumerate_fire_plans(pr, g, limits.max_paths))
      if (branch.admits(p)) plans[g].push_back(std::move(p));
    std::vector<Signed> items;
    for (auto& p : plans[g]) items.push_back({p.demand, p.cost});
    fs[g] = cheapest(std::move(items));
  }
  for (int j = 0; j < pr.J; ++j) {
    for (auto& r : enumerate_crew_routes(pr, j, limits.max_paths))
      if (branch.admits(r)) routes[j].push_back(std::move(r));
    std::vector<Signed> items;
    for (auto& r : routes[j]) items.push_back({r.work, r.cost});
    cs[j] = cheapest(std::move(items));
  }
  Recombined rc = recombine(fs, cs, pr.G, pr.T, limits);
  OracleOptimum out;
  out.combinations = rc.combinations;
  if (!rc.feasible) return out;
  out.feasible = true;
  out.cost = rc.cost;
  for (int g = 0; g < pr.G; ++g) {
    const Signed& s = fs[g][rc.plan[g]];
    for (auto& p : plans[g])
      if (p.demand == s.signature && p.cost == s.cost) {
        out.plans.push_back(p);
        break;
      }
  }
  for (int j = 0; j < pr.J; ++j) {
    const Signed& s = cs[j][rc.route[j]];
    for (auto& r : routes[j])
      if (r.work == s.signature && r.cost == s.cost) {
        out.routes.push_back(r);
        break;
      }
  }
  return out;
}

namespace {

// Arc-side signatures from the (g, t) arc index sets.
std::vector<Signed> arc_crew_signatures(const Problem& pr, int j, const BranchSet& branch, std::size_t max_paths) {
  const CrewNetwork& net = pr.crews[j];
  std::vector<std::pair<int, int>> slot(net.dag.num_arcs(), {-1, -1});
  for (int g = 0; g < pr.G; ++g)
    for (int t = 1; t <= pr.T; ++t)
      for (int a : net.work_arcs_at(g, t)) slot[a] = {g, t};
  std::vector<Signed> items;
  for (auto& path : enumerate_paths(net.dag, max_paths)) {
    Signed s{std::vector<int>(pr.T, -1), 0.0};
    for (int a : path) {
      s.cost += net.cost[a];
      if (slot[a].first >= 0) s.signature[slot[a].second - 1] = slot[a].first;
    }
    bool ok = true;
    for (const auto& [key, value] : branch.assignment) {
      auto [jj, g, t] = key;
      if (jj == j && (s.signature[t - 1] == g) != value) ok = false;
    }
    if (ok) items.push_back(std::move(s));
  }
  return cheapest(std::move(items));
}

std::vector<Signed> arc_fire_signatures(const Problem& pr, int g, const BranchSet& branch, std::size_t max_paths) {
  const FireNetwork& net = pr.fires[g];
  std::vector<int> when(net.dag.num_arcs(), 0);
  for (int t = 1; t <= pr.T; ++t)
    for (int a : net.crew_arcs_at[t - 1]) when[a] = t;
  std::vector<Signed> items;
  for (auto& path : enumerate_paths(net.dag, max_paths)) {
    Signed s{std::vector<int>(pr.T, 0), 0.0};
    for (int a : path) {
      s.cost += net.damage[a];
      if (when[a] > 0) s.signature[when[a] - 1] += net.label[a];
    }
    bool ok = true;
    for (const auto& [key, iv] : branch.demand)
      if (key.first == g && (s.signature[key.second - 1] < iv.lo || s.signature[key.second - 1] > iv.hi)) ok = false;
    if (ok) items.push_back(std::move(s));
  }
  return cheapest(std::move(items));
}

// Arc-flow LP relaxation of the arc-based model.
std::pair<bool, double> arc_flow_lp(const Problem& pr, const BranchSet& branch) {
  LinearProgram lp;
  // Flow balance rows per node; terminal nodes absorb flow and get none.
  auto add_network_rows = [&](const Dag& dag) {
    std::vector<int> row(dag.num_nodes(), -1);
    for (int n = 0; n < dag.num_nodes(); ++n)
      if (dag.period[n] != dag.terminal_period) row[n] = lp.add_row(RowSense::kEq, n == dag.start ? 1.0 : 0.0);
    return row;
  };
  auto balance = [](const std::vector<int>& row, const Dag& dag, int a) {
    std::vector<LpEntry> col{{row[dag.tail[a]], 1.0}};
    if (row[dag.head[a]] >= 0) col.push_back({row[dag.head[a]], -1.0});
    return col;
  };
  std::vector<std::vector<int>> crew_row(pr.J), fire_row(pr.G);
  for (int j = 0; j < pr.J; ++j) crew_row[j] = add_network_rows(pr.crews[j].dag);
  for (int g = 0; g < pr.G; ++g) fire_row[g] = add_network_rows(pr.fires[g].dag);
  int link0 = static_cast<int>(lp.rhs.size());
  for (int k = 0; k < pr.G * pr.T; ++k) lp.add_row(RowSense::kGe, 0.0);
  std::map<std::tuple<int, int, int>, int> fixed_rows;
  for (const auto& [key, value] : branch.assignment)
    if (value) fixed_rows[key] = lp.add_row(RowSense::kEq, 1.0);

  for (int j = 0; j < pr.J; ++j) {
    const CrewNetwork& net = pr.crews[j];
    std::vector<std::pair<int, int>> slot(net.dag.num_arcs(), {-1, -1});
    for (int g = 0; g < pr.G; ++g)
      for (int t = 1; t <= pr.T; ++t)
        for (int a : net.work_arcs_at(g, t)) slot[a] = {g, t};
    for (int a = 0; a < net.dag.num_arcs(); ++a) {
      auto [g, t] = slot[a];
      if (g >= 0) {
        auto it = branch.assignment.find({j, g, t});
        if (it != branch.assignment.end() && !it->second) continue;
      }
      std::vector<LpEntry> col = balance(crew_row[j], net.dag, a);
      if (g >= 0) {
        col.push_back({link0 + pr.link_index(g, t), 1.0});
        auto it = fixed_rows.find({j, g, t});
        if (it != fixed_rows.end()) col.push_back({it->second, 1.0});
      }
      lp.add_column(net.cost[a], std::move(col));
    }
  }
  for (int g = 0; g < pr.G; ++g) {
    const FireNetwork& net = pr.fires[g];
    for (int a = 0; a < net.dag.num_arcs(); ++a) {
      int t = net.dag.period[net.dag.tail[a]];
      if (t <= pr.T) {
        auto it = branch.demand.find({g, t});
        if (it != branch.demand.end() && (net.label[a] < it->second.lo || net.label[a] > it->second.hi)) continue;
      }
      std::vector<LpEntry> col = balance(fire_row[g], net.dag, a);
      if (t <= pr.T && net.label[a] > 0) col.push_back({link0 + pr.link_index(g, t), -static_cast<double>(net.label[a])});
      lp.add_column(net.damage[a], std::move(col));
    }
  }
  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::kOptimal) return {false, 0.0};
  return {true, sol.objective};
}

}  // namespace

EquivalenceReport check_formulation_equivalence(const Problem& pr, const BranchSet& branch,
                                                const OracleLimits& limits) {
  EquivalenceReport rep;
  rep.path = brute_force_optimum(pr, branch, limits);

  std::vector<std::vector<Signed>> fs(pr.G), cs(pr.J);
  for (int g = 0; g < pr.G; ++g) fs[g] = arc_fire_signatures(pr, g, branch, limits.max_paths);
  for (int j = 0; j < pr.J; ++j) cs[j] = arc_crew_signatures(pr, j, branch, limits.max_paths);
  Recombined rc = recombine(fs, cs, pr.G, pr.T, limits);
  rep.arc_feasible = rc.feasible;
  rep.arc_optimum = rc.cost;
  rep.integer_equal = rep.path.feasible == rep.arc_feasible &&
                      (!rep.arc_feasible || std::fabs(rep.path.cost - rep.arc_optimum) <= 1e-6);

  ColumnPool pool;
  pool.reset(pr.G, pr.J);
  for (int g = 0; g < pr.G; ++g)
    for (auto& p : enumerate_fire_plans(pr, g, limits.max_paths)) pool.add(p);
  for (int j = 0; j < pr.J; ++j)
    for (auto& r : enumerate_crew_routes(pr, j, limits.max_paths)) pool.add(r);
  RestrictedMaster m;
  m.problem = &pr;
  m.pool = &pool;
  m.branch = &branch;
  bool empty_owner = false;
  for (int g = 0; g < pr.G; ++g) {
    bool any = false;
    for (int q = 0; q < static_cast<int>(pool.plans(g).size()); ++q) any = any || m.uses_plan(g, q);
    empty_owner = empty_owner || !any;
  }
  for (int j = 0; j < pr.J; ++j) {
    bool any = false;
    for (int p = 0; p < static_cast<int>(pool.routes(j).size()); ++p) any = any || m.uses_route(j, p);
    empty_owner = empty_owner || !any;
  }
  if (!empty_owner) {
    RmpSolution sol = assemble_and_solve_rmp(m);
    rep.path_lp_feasible = !sol.infeasible;
    rep.path_lp = sol.objective;
  }
  auto [ok, value] = arc_flow_lp(pr, branch);
  rep.arc_lp_feasible = ok;
  rep.arc_lp = value;
  rep.lp_equal = rep.path_lp_feasible == rep.arc_lp_feasible &&
                 (!ok || std::fabs(rep.path_lp - rep.arc_lp) <= 1e-6 * std::max(1.0, std::fabs(rep.arc_lp)));
  return rep;
}

std::vector<std::vector<PeriodProjection>> integer_period_projections(const Problem& pr,
                                                                      const OracleLimits& limits) {
  std::vector<std::vector<std::vector<int>>> demands(pr.G);
  for (int g = 0; g < pr.G; ++g) {
    std::set<std::vector<int>> seen;
    for (auto& p : enumerate_fire_plans(pr, g, limits.max_paths)) seen.insert(p.demand);
    demands[g].assign(seen.begin(), seen.end());
  }
  std::vector<std::vector<std::vector<int>>> works(pr.J);
  double combos = 1.0;
  for (int j = 0; j < pr.J; ++j) {
    std::set<std::vector<int>> seen;
    for (auto& r : enumerate_crew_routes(pr, j, limits.max_paths)) seen.insert(r.work);
    works[j].assign(seen.begin(), seen.end());
    combos *= static_cast<double>(works[j].size());
  }
  if (combos > static_cast<double>(limits.max_combinations)) throw GuardError("instance too large for oracle");
  std::vector<std::set<PeriodProjection>> found(pr.T);
  std::vector<int> pick(pr.J, 0);
  std::vector<int> supply(static_cast<std::size_t>(pr.G) * pr.T);
  std::vector<std::vector<std::uint32_t>> mask(pr.G, std::vector<std::uint32_t>(pr.T));
  while (true) {
    std::fill(supply.begin(), supply.end(), 0);
    for (int j = 0; j < pr.J; ++j)
      for (int t = 0; t < pr.T; ++t)
        if (works[j][pick[j]][t] >= 0) ++supply[works[j][pick[j]][t] * pr.T + t];
    for (int g = 0; g < pr.G; ++g) {
      std::fill(mask[g].begin(), mask[g].end(), 0u);
      for (const auto& b : demands[g]) {
        bool fits = true;
        for (int t = 0; t < pr.T && fits; ++t) fits = b[t] <= supply[g * pr.T + t];
        if (!fits) continue;
        for (int t = 0; t < pr.T; ++t) mask[g][t] |= 1u << b[t];
      }
    }
    for (int t = 0; t < pr.T; ++t) {
      PeriodProjection p;
      for (int j = 0; j < pr.J; ++j) p.work.push_back(works[j][pick[j]][t]);
      for (int g = 0; g < pr.G; ++g) p.demand_mask.push_back(mask[g][t]);
      found[t].insert(std::move(p));
    }
    int k = 0;
    while (k < pr.J && ++pick[k] == static_cast<int>(works[k].size())) pick[k++] = 0;
    if (k == pr.J) break;
  }
  std::vector<std::vector<PeriodProjection>> out(pr.T);
  for (int t = 0; t < pr.T; ++t) out[t].assign(found[t].begin(), found[t].end());
  return out;
}

double max_integer_cut_lhs(const RobustCut& cut, const std::vector<PeriodProjection>& at_period) {
  double best = -kInf;
  for (const auto& p : at_period) {
    double lhs = 0.0;
    for (int j : cut.crews) {
      int g = p.work[j];
      if (g < 0 || !std::binary_search(cut.fires.begin(), cut.fires.end(), g)) lhs += 1.0;
    }
    for (std::size_t k = 0; k < cut.fires.size(); ++k) {
      std::uint32_t m = p.demand_mask[cut.fires[k]];
      double top = -kInf;
      for (int d = 0; d < 32; ++d)
        if (m >> d & 1u) top = std::max(top, cut.weight[k][std::min<std::size_t>(d, cut.weight[k].size() - 1)]);
      lhs += top;
    }
    best = std::max(best, lhs);
  }
  return best;
}

bool plans_deferral_proof(const Problem& pr, int g, std::size_t max_paths) {
  std::map<std::vector<int>, double> cost;
  for (auto& p : enumerate_fire_plans(pr, g, max_paths)) {
    auto it = cost.find(p.demand);
    if (it == cost.end() || p.cost < it->second) cost[p.demand] = p.cost;
  }
  for (const auto& [b1, c1] : cost)
    for (const auto& [b2, c2] : cost) {
      int t1 = -1, t2 = -1, n = 0;
      for (std::size_t t = 0; t < b1.size(); ++t)
        if (b1[t] != b2[t]) {
          (n == 0 ? t1 : t2) = static_cast<int>(t);
          ++n;
        }
      if (n != 2) continue;
      int k = b1[t1] - b2[t1];
      if (k > 0 && b2[t2] - b1[t2] == k && c1 > c2 + 1e-9) return false;
    }
  return true;
}

GeneratorParams tiny_generator_params() {
  GeneratorParams p;
  p.perimeter_min = 4.0;
  p.perimeter_max = 10.0;
  p.growth_min = 1.1;
  p.growth_max = 1.3;
  p.effect_min = 5.0;
  p.effect_max = 9.0;
  return p;
}

std::vector<Instance> tiny_suite(int count, std::uint64_t first_seed) {
  std::vector<Instance> out;
  const GeneratorParams params = tiny_generator_params();
  for (std::uint64_t seed = first_seed; static_cast<int>(out.size()) < count; ++seed) {
    int k = static_cast<int>(seed - first_seed);
    int crews = 2 + k % 2, fires = 2 + (k / 2) % 2, horizon = 4 + (k / 4) % 2;
    Instance in = generate_instance(seed, crews, fires, horizon, params);
    bool small = true;
    for (const auto& f : in.fires) {
      FireNetwork net = build_fire_network(f, horizon, supported_crew_levels(f, crews));
      small = small && net.max_width() <= 8;
    }
    if (small && validate_instance(in).empty()) out.push_back(std::move(in));
  }
  return out;
}

}  // namespace fireline
