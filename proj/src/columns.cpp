#include "fireline/columns.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "fireline/common.hpp"

namespace fireline {

Problem build_problem(const Instance& instance, int threads) {
  Problem p;
  p.instance = std::make_shared<const Instance>(instance);
  p.J = instance.num_crews();
  p.G = instance.num_fires();
  p.T = instance.horizon;
  p.crews.resize(p.J);
  p.fires.resize(p.G);
  int tasks = p.J + p.G;
  auto build = [&](int k) {
    if (k < p.J) {
      p.crews[k] = build_crew_network_auto(k, instance);
    } else {
      int g = k - p.J;
      p.fires[g] = build_fire_network(instance.fires[g], p.T, supported_crew_levels(instance.fires[g], p.J), g);
    }
  };
  if (threads <= 1) {
    for (int k = 0; k < tasks; ++k) build(k);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        try {
          for (int k = w; k < tasks; k += threads) build(k);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return p;
}

FirePlan make_fire_plan(const Problem& problem, int g, std::vector<int> arcs) {
  const FireNetwork& net = problem.fires[g];
  FirePlan plan;
  plan.fire = g;
  plan.demand.assign(problem.T, 0);
  for (int a : arcs) {
    plan.demand[net.dag.period[net.dag.tail[a]] - 1] = net.label[a];
    plan.cost += net.damage[a];
  }
  plan.arcs = std::move(arcs);
  return plan;
}

CrewRoute make_crew_route(const Problem& problem, int j, std::vector<int> arcs) {
  const CrewNetwork& net = problem.crews[j];
  CrewRoute route;
  route.crew = j;
  route.work.assign(problem.T, -1);
  for (int a : arcs) {
    if (net.fire[a] >= 0) route.work[net.nodes[net.dag.tail[a]].period - 1] = net.fire[a];
    route.cost += net.cost[a];
  }
  route.arcs = std::move(arcs);
  return route;
}

std::vector<FireState> plan_trajectory(const Problem& problem, const FirePlan& plan) {
  const FireSpec& fire = problem.instance->fires[plan.fire];
  std::vector<FireState> states;
  FireState s = initial_fire_state(fire);
  if (fire.is_linear()) s.area = fire.initial.area;
  states.push_back(s);
  for (int t = 1; t <= problem.T; ++t) {
    s = fire_transition(fire, s, plan.demand_at(t), t).next;
    states.push_back(s);
  }
  return states;
}

bool BranchSet::admits(const FirePlan& plan) const {
  for (auto it = demand.lower_bound({plan.fire, 0}); it != demand.end() && it->first.first == plan.fire; ++it) {
    int b = plan.demand_at(it->first.second);
    if (b < it->second.lo || b > it->second.hi) return false;
  }
  return true;
}

bool BranchSet::admits(const CrewRoute& route) const {
  for (auto it = assignment.lower_bound({route.crew, INT_MIN, INT_MIN});
       it != assignment.end() && std::get<0>(it->first) == route.crew; ++it) {
    auto [j, g, t] = it->first;
    if (route.assigned(g, t) != it->second) return false;
  }
  return true;
}

void BranchSet::restrict_demand(int g, int t, int lo, int hi) {
  DemandInterval& iv = demand[{g, t}];
  iv.lo = std::max(iv.lo, lo);
  iv.hi = std::min(iv.hi, hi);
}

void BranchSet::fix_assignment(int j, int g, int t, bool value) { assignment[{j, g, t}] = value; }

const char* cut_family_name(CutFamily family) {
  switch (family) {
    case CutFamily::kGub: return "gub";
    case CutFamily::kStrengthenedGub: return "sgub";
    case CutFamily::kAugmentedGub: return "agub";
  }
  return "?";
}

RobustCut make_gub_cut(int period, const std::vector<int>& fires, const std::vector<int>& targets,
                       const std::vector<int>& crews, int J, CutFamily family) {
  RobustCut cut;
  cut.period = period;
  cut.family = family;
  cut.fires = fires;
  cut.targets = targets;
  cut.crews = crews;
  for (int D : targets) {
    std::vector<double> w(J + 1, 0.0);
    for (int d = std::max(0, D); d <= J; ++d) w[d] = 1.0;
    cut.weight.push_back(w);
  }
  cut.rhs = static_cast<double>(fires.size() + crews.size()) - 1.0;
  return cut;
}

double RobustCut::fire_coefficient(int g, int demand) const {
  auto it = std::lower_bound(fires.begin(), fires.end(), g);
  if (it == fires.end() || *it != g) return 0.0;
  const auto& w = weight[it - fires.begin()];
  if (demand < 0) return 0.0;
  return w[std::min<std::size_t>(demand, w.size() - 1)];
}

double RobustCut::route_coefficient(const CrewRoute& route) const {
  if (!std::binary_search(crews.begin(), crews.end(), route.crew)) return 0.0;
  int g = route.work[period - 1];
  if (g >= 0 && std::binary_search(fires.begin(), fires.end(), g)) return 0.0;
  return 1.0;
}

bool RobustCut::same_as(const RobustCut& o, double tol) const {
  if (period != o.period || fires != o.fires || crews != o.crews) return false;
  if (std::fabs(rhs - o.rhs) > tol) return false;
  for (std::size_t k = 0; k < weight.size(); ++k) {
    if (weight[k].size() != o.weight[k].size()) return false;
    for (std::size_t d = 0; d < weight[k].size(); ++d)
      if (std::fabs(weight[k][d] - o.weight[k][d]) > tol) return false;
  }
  return true;
}

void ColumnPool::reset(int fires, int crews) {
  plans_.assign(fires, {});
  routes_.assign(crews, {});
  plan_sig_.assign(fires, {});
  route_sig_.assign(crews, {});
}

std::pair<int, bool> ColumnPool::add(const FirePlan& plan) {
  auto& same = plan_sig_[plan.fire][plan.demand];
  for (int idx : same)
    if (std::fabs(plans_[plan.fire][idx].cost - plan.cost) <= 1e-9) return {idx, false};
  int idx = static_cast<int>(plans_[plan.fire].size());
  plans_[plan.fire].push_back(plan);
  same.push_back(idx);
  return {idx, true};
}

std::pair<int, bool> ColumnPool::add(const CrewRoute& route) {
  auto& same = route_sig_[route.crew][route.work];
  for (int idx : same)
    if (std::fabs(routes_[route.crew][idx].cost - route.cost) <= 1e-9) return {idx, false};
  int idx = static_cast<int>(routes_[route.crew].size());
  routes_[route.crew].push_back(route);
  same.push_back(idx);
  return {idx, true};
}

std::size_t ColumnPool::size() const {
  std::size_t n = 0;
  for (const auto& p : plans_) n += p.size();
  for (const auto& r : routes_) n += r.size();
  return n;
}

}  // namespace fireline
