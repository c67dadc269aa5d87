#include "fireline/master.hpp"

#include <chrono>
#include <cmath>
#include <functional>

#include "fireline/common.hpp"

namespace fireline {

namespace {

constexpr std::int64_t kKindShift = 56;
constexpr std::int64_t kOwnerShift = 32;

std::int64_t column_key(int kind, int owner, int index) {
  return (static_cast<std::int64_t>(kind) << kKindShift) | (static_cast<std::int64_t>(owner) << kOwnerShift) |
         index;
}

}  // namespace

bool RestrictedMaster::uses_plan(int g, int q) const {
  if (plan_mask && !(*plan_mask)[g][q]) return false;
  return branch == nullptr || branch->admits(pool->plans(g)[q]);
}

bool RestrictedMaster::uses_route(int j, int p) const {
  if (route_mask && !(*route_mask)[j][p]) return false;
  return branch == nullptr || branch->admits(pool->routes(j)[p]);
}

bool is_integral_value(double v, double tol) { return std::fabs(v - std::round(v)) <= tol; }

DualSolution extract_duals(const LpSolution& solution, const std::vector<RowTag>& tags, int fires, int crews,
                           int periods, int cuts, bool allow_infeasible) {
  if (solution.status != LpStatus::kOptimal &&
      !(allow_infeasible && solution.status == LpStatus::kArtificialPositive))
    throw Error(std::string("duals requested from a non-optimal LP (") + lp_status_name(solution.status) + ")");
  DualSolution d;
  d.sigma.assign(fires, 0.0);
  d.pi.assign(crews, 0.0);
  d.rho.assign(static_cast<std::size_t>(fires) * periods, 0.0);
  d.alpha.assign(cuts, 0.0);
  for (std::size_t i = 0; i < tags.size(); ++i) {
    double y = solution.dual[i];
    switch (tags[i].family) {
      case RowTag::kFire: d.sigma[tags[i].index] = y; break;
      case RowTag::kCrew: d.pi[tags[i].index] = y; break;
      case RowTag::kLink: d.rho[tags[i].index] = std::max(0.0, y); break;
      case RowTag::kCut: d.alpha[tags[i].index] = std::max(0.0, -y); break;
    }
  }
  return d;
}

RmpSolution assemble_and_solve_rmp(const RestrictedMaster& m, const LpBasis* warm_start) {
  const Problem& pr = *m.problem;
  const ColumnPool& pool = *m.pool;
  static const std::vector<RobustCut> no_cuts;
  const std::vector<RobustCut>& cuts = m.cuts ? *m.cuts : no_cuts;
  const int G = pr.G, J = pr.J, T = pr.T;

  LinearProgram lp;
  RmpSolution out;
  for (int g = 0; g < G; ++g) {
    lp.add_row(RowSense::kEq, 1.0, g);
    out.tags.push_back({RowTag::kFire, g});
  }
  for (int j = 0; j < J; ++j) {
    lp.add_row(RowSense::kEq, 1.0, G + j);
    out.tags.push_back({RowTag::kCrew, j});
  }
  const int link0 = G + J;
  for (int g = 0; g < G; ++g)
    for (int t = 1; t <= T; ++t) {
      lp.add_row(RowSense::kGe, 0.0, link0 + pr.link_index(g, t));
      out.tags.push_back({RowTag::kLink, pr.link_index(g, t)});
    }
  const int cut0 = link0 + G * T;
  for (std::size_t u = 0; u < cuts.size(); ++u) {
    lp.add_row(RowSense::kLe, cuts[u].rhs, (std::int64_t{1} << 40) + (cuts[u].id >= 0 ? cuts[u].id : static_cast<int>(u)));
    out.tags.push_back({RowTag::kCut, static_cast<int>(u)});
  }

  struct Ref {
    int kind, owner, index;
  };
  std::vector<Ref> refs;
  for (int g = 0; g < G; ++g) {
    const auto& plans = pool.plans(g);
    for (int q = 0; q < static_cast<int>(plans.size()); ++q) {
      if (!m.uses_plan(g, q)) continue;
      const FirePlan& plan = plans[q];
      std::vector<LpEntry> col{{g, 1.0}};
      for (int t = 1; t <= T; ++t)
        if (plan.demand_at(t) > 0) col.push_back({link0 + pr.link_index(g, t), -static_cast<double>(plan.demand_at(t))});
      for (std::size_t u = 0; u < cuts.size(); ++u) {
        double c = cuts[u].fire_coefficient(g, plan.demand_at(cuts[u].period));
        if (c != 0.0) col.push_back({cut0 + static_cast<int>(u), c});
      }
      lp.add_column(plan.cost, std::move(col), kInf, column_key(0, g, q));
      refs.push_back({0, g, q});
    }
  }
  for (int j = 0; j < J; ++j) {
    const auto& routes = pool.routes(j);
    for (int p = 0; p < static_cast<int>(routes.size()); ++p) {
      if (!m.uses_route(j, p)) continue;
      const CrewRoute& route = routes[p];
      std::vector<LpEntry> col{{G + j, 1.0}};
      for (int t = 1; t <= T; ++t)
        if (route.work[t - 1] >= 0) col.push_back({link0 + pr.link_index(route.work[t - 1], t), 1.0});
      for (std::size_t u = 0; u < cuts.size(); ++u) {
        double c = cuts[u].route_coefficient(route);
        if (c != 0.0) col.push_back({cut0 + static_cast<int>(u), c});
      }
      lp.add_column(route.cost, std::move(col), kInf, column_key(1, j, p));
      refs.push_back({1, j, p});
    }
  }
  if (m.stabilize) {
    for (int g = 0; g < G; ++g)
      for (int t = 1; t < T; ++t) {
        lp.add_column(0.0, {{link0 + pr.link_index(g, t), -1.0}, {link0 + pr.link_index(g, t + 1), 1.0}}, kInf,
                      column_key(2, g, t));
        refs.push_back({2, g, t});
      }
  }

  LpOptions opt;
  opt.warm_start = warm_start;
  out.lp = solve_lp(lp, opt);
  if (out.lp.status == LpStatus::kUnbounded) throw Error("restricted master is unbounded");
  out.infeasible = out.lp.status == LpStatus::kArtificialPositive;
  out.objective = out.lp.objective;
  out.y.resize(G);
  for (int g = 0; g < G; ++g) out.y[g].assign(pool.plans(g).size(), 0.0);
  out.z.resize(J);
  for (int j = 0; j < J; ++j) out.z[j].assign(pool.routes(j).size(), 0.0);
  out.deferral.assign(static_cast<std::size_t>(G) * std::max(0, T - 1), 0.0);
  for (std::size_t k = 0; k < refs.size(); ++k) {
    double v = out.lp.primal[k];
    const Ref& r = refs[k];
    if (r.kind == 0) out.y[r.owner][r.index] = v;
    else if (r.kind == 1) out.z[r.owner][r.index] = v;
    else out.deferral[r.owner * (T - 1) + r.index - 1] = v;
  }
  out.duals = extract_duals(out.lp, out.tags, G, J, T, static_cast<int>(cuts.size()), true);
  return out;
}

double cut_lhs_value(const RobustCut& cut, const ColumnPool& pool, const std::vector<std::vector<double>>& y,
                     const std::vector<std::vector<double>>& z) {
  double lhs = 0.0;
  for (int g : cut.fires) {
    const auto& plans = pool.plans(g);
    for (std::size_t q = 0; q < plans.size(); ++q)
      if (y[g][q] != 0.0) lhs += y[g][q] * cut.fire_coefficient(g, plans[q].demand_at(cut.period));
  }
  for (int j : cut.crews) {
    const auto& routes = pool.routes(j);
    for (std::size_t p = 0; p < routes.size(); ++p)
      if (z[j][p] != 0.0) lhs += z[j][p] * cut.route_coefficient(routes[p]);
  }
  return lhs;
}

IntegerMasterResult solve_integer_restricted_master(const RestrictedMaster& master,
                                                    const IntegerMasterOptions& options) {
  const Problem& pr = *master.problem;
  const ColumnPool& pool = *master.pool;
  IntegerMasterResult result;
  auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

  std::vector<std::vector<char>> plan_mask(pr.G), route_mask(pr.J);
  for (int g = 0; g < pr.G; ++g) {
    plan_mask[g].assign(pool.plans(g).size(), 1);
    for (std::size_t q = 0; q < plan_mask[g].size(); ++q)
      plan_mask[g][q] = master.uses_plan(g, static_cast<int>(q));
  }
  for (int j = 0; j < pr.J; ++j) {
    route_mask[j].assign(pool.routes(j).size(), 1);
    for (std::size_t p = 0; p < route_mask[j].size(); ++p)
      route_mask[j][p] = master.uses_route(j, static_cast<int>(p));
  }
  double incumbent = options.cutoff;

  std::function<void(std::vector<std::vector<char>>&, std::vector<std::vector<char>>&)> dfs =
      [&](std::vector<std::vector<char>>& pm, std::vector<std::vector<char>>& rm) {
        if (result.nodes >= options.node_limit || elapsed() > options.time_limit) {
          result.complete = false;
          return;
        }
        ++result.nodes;
        RestrictedMaster sub = master;
        sub.stabilize = false;
        sub.plan_mask = &pm;
        sub.route_mask = &rm;
        RmpSolution sol = assemble_and_solve_rmp(sub);
        if (sol.infeasible) return;
        if (sol.objective >= incumbent - 1e-9 * std::max(1.0, std::fabs(incumbent))) return;
        int kind = -1, owner = -1, index = -1;
        double best_frac = 0.0;
        for (int g = 0; g < pr.G; ++g)
          for (std::size_t q = 0; q < sol.y[g].size(); ++q) {
            double v = sol.y[g][q];
            if (is_integral_value(v)) continue;
            double f = std::min(v - std::floor(v), std::ceil(v) - v);
            if (f > best_frac) {
              best_frac = f;
              kind = 0, owner = g, index = static_cast<int>(q);
            }
          }
        for (int j = 0; j < pr.J; ++j)
          for (std::size_t p = 0; p < sol.z[j].size(); ++p) {
            double v = sol.z[j][p];
            if (is_integral_value(v)) continue;
            double f = std::min(v - std::floor(v), std::ceil(v) - v);
            if (f > best_frac) {
              best_frac = f;
              kind = 1, owner = j, index = static_cast<int>(p);
            }
          }
        if (kind < 0) {
          IntegerSolution s;
          s.plan.assign(pr.G, -1);
          s.route.assign(pr.J, -1);
          for (int g = 0; g < pr.G; ++g)
            for (std::size_t q = 0; q < sol.y[g].size(); ++q)
              if (sol.y[g][q] > 0.5) {
                s.plan[g] = static_cast<int>(q);
                s.cost += pool.plans(g)[q].cost;
              }
          for (int j = 0; j < pr.J; ++j)
            for (std::size_t p = 0; p < sol.z[j].size(); ++p)
              if (sol.z[j][p] > 0.5) {
                s.route[j] = static_cast<int>(p);
                s.cost += pool.routes(j)[p].cost;
              }
          if (s.cost < incumbent) {
            incumbent = s.cost;
            result.best = s;
          }
          return;
        }
        auto& mask = kind == 0 ? pm[owner] : rm[owner];
        std::vector<char> saved = mask;
        // Branch: column at 1 (exclude its siblings), then column at 0.
        for (std::size_t k = 0; k < mask.size(); ++k)
          if (static_cast<int>(k) != index) mask[k] = 0;
        dfs(pm, rm);
        mask = saved;
        mask[index] = 0;
        dfs(pm, rm);
        mask = saved;
      };
  dfs(plan_mask, route_mask);
  return result;
}

}  // namespace fireline
