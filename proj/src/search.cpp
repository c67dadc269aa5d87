#include "fireline/search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>
#include <thread>

#include "fireline/common.hpp"
#include "fireline/pricing.hpp"

namespace fireline {

namespace {

constexpr double kReducedCostTol = 1e-6;
constexpr double kVarianceTol = 1e-9;
constexpr double kDmvEpsilon = 1e-6;

bool past(Clock::time_point deadline) { return Clock::now() >= deadline; }

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Clock::time_point after(double seconds) {
  if (seconds >= 1e12) return Clock::time_point::max();
  return Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(seconds));
}

template <typename F>
void run_parallel(int n, int threads, F&& task) {
  if (threads <= 1 || n <= 1) {
    for (int k = 0; k < n; ++k) task(k);
    return;
  }
  int w = std::min(threads, n);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(w);
  for (int i = 0; i < w; ++i)
    pool.emplace_back([&, i] {
      try {
        for (int k = i; k < n; k += w) task(k);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct Priced {
  std::vector<FirePricing> fires;
  std::vector<CrewPricing> crews;
};

Priced price_all(const Problem& pr, const DualSolution& duals, const std::vector<RobustCut>& cuts,
                 const BranchSet& branch, int threads) {
  Priced out;
  out.fires.resize(pr.G);
  out.crews.resize(pr.J);
  run_parallel(pr.G + pr.J, threads, [&](int k) {
    if (k < pr.G) out.fires[k] = price_fire(pr, k, duals, cuts, branch);
    else out.crews[k - pr.G] = price_crew(pr, k - pr.G, duals, cuts, branch);
  });
  return out;
}

// Largest plan damage per fire (longest path).
double max_plan_damage(const FireNetwork& net) {
  std::vector<double> neg(net.damage.size());
  for (std::size_t a = 0; a < neg.size(); ++a) neg[a] = -net.damage[a];
  auto p = topological_shortest_path(net.dag, neg);
  return p ? -p->cost : 0.0;
}

// Initial duals with large M, M'.
DualSolution initial_duals(const Problem& pr, std::size_t ncuts) {
  double top = 0.0, total = 0.0;
  for (const auto& f : pr.fires) {
    double d = max_plan_damage(f);
    top = std::max(top, d);
    total += d;
  }
  DualSolution d;
  d.sigma.assign(pr.G, total);
  d.pi.assign(pr.J, 0.0);
  d.rho.assign(static_cast<std::size_t>(pr.G) * pr.T, 10.0 * top);
  d.alpha.assign(ncuts, 0.0);
  return d;
}

bool owner_lacks_columns(const Problem& pr, const ColumnPool& pool, const BranchSet& branch) {
  for (int g = 0; g < pr.G; ++g) {
    bool any = false;
    for (const auto& p : pool.plans(g)) any = any || branch.admits(p);
    if (!any) return true;
  }
  for (int j = 0; j < pr.J; ++j) {
    bool any = false;
    for (const auto& r : pool.routes(j)) any = any || branch.admits(r);
    if (!any) return true;
  }
  return false;
}

bool solution_integral(const RmpSolution& s) {
  for (const auto& v : s.y)
    for (double x : v)
      if (!is_integral_value(x)) return false;
  for (const auto& v : s.z)
    for (double x : v)
      if (!is_integral_value(x)) return false;
  return true;
}

double prune_tolerance(double ub) { return 1e-6 + 1e-9 * std::fabs(ub); }

struct NodeLp {
  CgResult cg;
  double value_before_cuts = std::numeric_limits<double>::quiet_NaN();
  bool timed_out = false;
  bool infeasible = false;
};

// CG, then separation rounds each followed by CG, until no violated cut or the
// round limit.
NodeLp solve_node_lp(const Problem& pr, ColumnPool& pool, const BranchSet& branch, std::vector<RobustCut>& cuts,
                     const CgOptions& options, CutMode mode, int rounds, int max_cuts, int& next_cut_id,
                     const LpBasis* warm, SearchStats* stats) {
  NodeLp out;
  out.cg = two_sided_column_generation(pr, pool, branch, cuts, options, warm);
  if (stats) stats->cg_iterations += out.cg.iterations;
  if (out.cg.timed_out) {
    out.timed_out = true;
    return out;
  }
  if (out.cg.infeasible) {
    out.infeasible = true;
    return out;
  }
  out.value_before_cuts = out.cg.rmp.objective;
  for (int round = 0; mode != CutMode::kNone && round < rounds; ++round) {
    auto fresh = separate_cuts(pr, pool, out.cg.rmp.y, out.cg.rmp.z, mode, cuts, max_cuts);
    if (fresh.empty()) break;
    for (auto& c : fresh) {
      c.id = next_cut_id++;
      cuts.push_back(std::move(c));
    }
    if (stats) stats->cuts_added += static_cast<int>(fresh.size());
    CgOptions again = options;
    again.stabilize = false;
    LpBasis basis = out.cg.rmp.lp.basis;
    double stabilized = out.cg.stabilized_value;
    auto rho = out.cg.stabilized_rho;
    out.cg = two_sided_column_generation(pr, pool, branch, cuts, again, &basis);
    out.cg.stabilized_value = stabilized;
    out.cg.stabilized_rho = std::move(rho);
    if (stats) stats->cg_iterations += out.cg.iterations;
    if (out.cg.timed_out) {
      out.timed_out = true;
      return out;
    }
    if (out.cg.infeasible) {
      out.infeasible = true;
      return out;
    }
  }
  return out;
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

const char* branch_rule_name(BranchRule rule) {
  switch (rule) {
    case BranchRule::kMostFractional: return "mf";
    case BranchRule::kMaxVariance: return "mv";
    case BranchRule::kDualMaxVariance: return "dmv";
  }
  return "?";
}

BranchRule parse_branch_rule(const std::string& name) {
  if (name == "mf") return BranchRule::kMostFractional;
  if (name == "mv") return BranchRule::kMaxVariance;
  if (name == "dmv") return BranchRule::kDualMaxVariance;
  throw InputError("unknown branch rule '" + name + "'");
}

const char* stabilize_mode_name(StabilizeMode mode) {
  switch (mode) {
    case StabilizeMode::kOff: return "off";
    case StabilizeMode::kOn: return "on";
    case StabilizeMode::kAuto: return "auto";
  }
  return "?";
}

StabilizeMode parse_stabilize_mode(const std::string& name) {
  if (name == "off") return StabilizeMode::kOff;
  if (name == "on") return StabilizeMode::kOn;
  if (name == "auto") return StabilizeMode::kAuto;
  throw InputError("unknown stabilize mode '" + name + "'");
}

CgResult two_sided_column_generation(const Problem& pr, ColumnPool& pool, const BranchSet& branch,
                                     const std::vector<RobustCut>& cuts, const CgOptions& options,
                                     const LpBasis* warm_start) {
  CgResult res;
  RestrictedMaster m;
  m.problem = &pr;
  m.pool = &pool;
  m.branch = &branch;
  m.cuts = &cuts;
  LpBasis basis = warm_start ? *warm_start : LpBasis{};

  if (owner_lacks_columns(pr, pool, branch)) {
    Priced p = price_all(pr, initial_duals(pr, cuts.size()), cuts, branch, options.threads);
    for (auto& f : p.fires) {
      if (!f.feasible) {
        res.infeasible = true;
        return res;
      }
      res.columns_added += pool.add(f.plan).second;
    }
    for (auto& c : p.crews) {
      if (!c.feasible) {
        res.infeasible = true;
        return res;
      }
      res.columns_added += pool.add(c.route).second;
    }
  }

  bool stabilized = options.stabilize;
  int stabilized_iterations = 0;
  while (true) {
    if (res.iterations >= options.iteration_cap) {
      std::ostringstream msg;
      msg << "CG stall: " << res.iterations << " iterations, " << pool.size() << " pooled columns, last value "
          << (res.trace.empty() ? 0.0 : res.trace.back());
      throw Error(msg.str());
    }
    if (past(options.deadline)) {
      res.timed_out = true;
      return res;
    }
    m.stabilize = stabilized;
    res.rmp = assemble_and_solve_rmp(m, basis.basic.empty() ? nullptr : &basis);
    basis = res.rmp.lp.basis;
    ++res.iterations;
    if (stabilized) ++stabilized_iterations;
    res.trace.push_back(res.rmp.objective);
    log_trace("cg iteration " + std::to_string(res.iterations) + " value " + format_number(res.rmp.objective) +
              (stabilized ? " (stabilized)" : ""));

    Priced p = price_all(pr, res.rmp.duals, cuts, branch, options.threads);
    int added = 0;
    for (auto& f : p.fires) {
      if (!f.feasible) {
        res.infeasible = true;
        return res;
      }
      if (f.reduced_cost < -kReducedCostTol) added += pool.add(f.plan).second;
    }
    for (auto& c : p.crews) {
      if (!c.feasible) {
        res.infeasible = true;
        return res;
      }
      if (c.reduced_cost < -kReducedCostTol) added += pool.add(c.route).second;
    }
    res.columns_added += added;
    if (added == 0) {
      if (!stabilized) break;
      res.stabilized_value = res.rmp.objective;
      res.stabilized_rho = res.rmp.duals.rho;
      if (!options.polish) break;
      stabilized = false;
      continue;
    }
    if (stabilized && options.stabilize_iterations >= 0 && stabilized_iterations >= options.stabilize_iterations)
      stabilized = false;
  }
  res.infeasible = res.rmp.infeasible;
  return res;
}

std::vector<BranchCandidate> compute_branch_scores(const Problem& pr, const ColumnPool& pool,
                                                   const RmpSolution& sol, BranchRule rule) {
  std::vector<BranchCandidate> out;
  auto rho_at = [&](int g, int t) { return std::max(sol.duals.rho[pr.link_index(g, t)], kDmvEpsilon); };
  auto score = [&](const BranchCandidate& c, BranchRule r) {
    switch (r) {
      case BranchRule::kMaxVariance: return c.variance;
      case BranchRule::kDualMaxVariance: {
        double w = rho_at(c.fire, c.period);
        return c.variance * w * w;
      }
      case BranchRule::kMostFractional: return std::min(c.mean - std::floor(c.mean), std::ceil(c.mean) - c.mean);
    }
    return 0.0;
  };
  for (int g = 0; g < pr.G; ++g) {
    const auto& plans = pool.plans(g);
    for (int t = 1; t <= pr.T; ++t) {
      double mean = 0.0, sq = 0.0;
      for (std::size_t q = 0; q < plans.size(); ++q) {
        double y = sol.y[g][q];
        if (y <= 0.0) continue;
        double b = plans[q].demand_at(t);
        mean += y * b;
        sq += y * b * b;
      }
      BranchCandidate c;
      c.kind = BranchCandidate::kFire;
      c.fire = g;
      c.period = t;
      c.mean = mean;
      c.variance = sq - mean * mean;
      if (c.variance > kVarianceTol) out.push_back(c);
    }
  }
  for (int j = 0; j < pr.J; ++j) {
    const auto& routes = pool.routes(j);
    for (int g = 0; g < pr.G; ++g)
      for (int t = 1; t <= pr.T; ++t) {
        double mean = 0.0;
        for (std::size_t p = 0; p < routes.size(); ++p)
          if (sol.z[j][p] > 0.0 && routes[p].assigned(g, t)) mean += sol.z[j][p];
        BranchCandidate c;
        c.kind = BranchCandidate::kCrew;
        c.crew = j;
        c.fire = g;
        c.period = t;
        c.mean = mean;
        c.variance = mean - mean * mean;
        if (c.variance > kVarianceTol) out.push_back(c);
      }
  }
  for (auto& c : out) c.score = score(c, rule);
  auto by_score = [](const BranchCandidate& a, const BranchCandidate& b) { return a.score > b.score; };
  std::stable_sort(out.begin(), out.end(), by_score);
  if (rule == BranchRule::kMostFractional && !out.empty() && out.front().score <= kVarianceTol) {
    // Every mean is integral (e.g. a 0/10 mix): rank by variance instead.
    for (auto& c : out) c.score = score(c, BranchRule::kMaxVariance);
    std::stable_sort(out.begin(), out.end(), by_score);
  }
  return out;
}

std::pair<BranchSet, BranchSet> make_children(const BranchSet& parent, const BranchCandidate& c) {
  if (!(c.variance > kVarianceTol)) throw Error("branching on a zero-variance candidate does not separate");
  BranchSet low = parent, high = parent;
  if (c.kind == BranchCandidate::kFire) {
    int d = static_cast<int>(std::floor(c.mean + 1e-9));
    low.restrict_demand(c.fire, c.period, 0, d);
    high.restrict_demand(c.fire, c.period, d + 1, INT_MAX);
  } else {
    low.fix_assignment(c.crew, c.fire, c.period, false);
    high.fix_assignment(c.crew, c.fire, c.period, true);
  }
  return {std::move(low), std::move(high)};
}

bool excludes_solution(const ColumnPool& pool, const RmpSolution& sol, const BranchSet& branch) {
  for (std::size_t g = 0; g < sol.y.size(); ++g)
    for (std::size_t q = 0; q < sol.y[g].size(); ++q)
      if (sol.y[g][q] > kVarianceTol && !branch.admits(pool.plans(static_cast<int>(g))[q])) return true;
  for (std::size_t j = 0; j < sol.z.size(); ++j)
    for (std::size_t p = 0; p < sol.z[j].size(); ++p)
      if (sol.z[j][p] > kVarianceTol && !branch.admits(pool.routes(static_cast<int>(j))[p])) return true;
  return false;
}

HeuristicResult fire_demand_heuristic(const Problem& pr, ColumnPool& pool, const BranchSet& branch,
                                      const std::vector<RobustCut>& cuts, const RmpSolution& fractional,
                                      const HeuristicOptions& options) {
  HeuristicResult res;
  Clock::time_point deadline = std::min(options.deadline, after(options.budget));
  std::vector<std::vector<int>> cap(pr.G, std::vector<int>(pr.T + 1, 0));
  for (int g = 0; g < pr.G; ++g)
    for (int t = 1; t <= pr.T; ++t) {
      double mean = 0.0;
      for (std::size_t q = 0; q < pool.plans(g).size(); ++q) mean += fractional.y[g][q] * pool.plans(g)[q].demand_at(t);
      int c = static_cast<int>(std::ceil(mean - 1e-9));
      auto it = branch.demand.find({g, t});
      if (it != branch.demand.end()) c = std::max(c, it->second.lo);
      cap[g][t] = std::clamp(c, 0, pr.J);
    }
  double best = options.cutoff;
  int stagnant = 0, next_cut_id = 1 << 29;
  while (!past(deadline)) {
    ++res.rounds;
    BranchSet capped = branch;
    for (int g = 0; g < pr.G; ++g)
      for (int t = 1; t <= pr.T; ++t) capped.restrict_demand(g, t, 0, cap[g][t]);
    std::vector<RobustCut> local = cuts;
    CgOptions co;
    co.threads = options.threads;
    co.deadline = deadline;
    NodeLp lp = solve_node_lp(pr, pool, capped, local, co, options.cut_mode, 5, options.max_cuts_per_round,
                              next_cut_id, nullptr, nullptr);
    bool improved = false;
    if (!lp.timed_out && !lp.infeasible) {
      RestrictedMaster m;
      m.problem = &pr;
      m.pool = &pool;
      m.branch = &capped;
      m.cuts = &local;
      IntegerMasterOptions io;
      io.cutoff = best;
      io.time_limit = std::max(0.0, std::chrono::duration<double>(deadline - Clock::now()).count());
      auto r = solve_integer_restricted_master(m, io);
      if (r.best && (!res.best || r.best->cost < best - 1e-6 * std::max(1.0, std::fabs(best)))) {
        best = r.best->cost;
        res.best = r.best;
        improved = true;
      }
    }
    stagnant = improved ? 0 : stagnant + 1;
    if (stagnant >= options.stagnant_rounds) break;
    bool saturated = true;
    for (int g = 0; g < pr.G; ++g)
      for (int t = 1; t <= pr.T; ++t) {
        saturated = saturated && cap[g][t] >= pr.J;
        cap[g][t] = std::min(pr.J, cap[g][t] + 1);
      }
    if (saturated) break;
  }
  return res;
}

double search_gap(double ub, double lb) {
  if (!std::isfinite(ub) || !std::isfinite(lb)) return std::numeric_limits<double>::infinity();
  return std::max(0.0, ub - lb) / std::max(1.0, std::fabs(ub));
}

namespace {

struct Node {
  int id = 0;
  int parent = -1;
  int depth = 0;
  BranchSet branch;
  std::vector<RobustCut> cuts;
  double bound = -kInf;
  LpBasis basis;
};

}  // namespace

SearchResult branch_price_and_cut(const Problem& pr, const SearchConfig& cfg) {
  const Clock::time_point t0 = Clock::now();
  const Clock::time_point deadline = cfg.time_limit >= 1e12 ? Clock::time_point::max() : after(cfg.time_limit);
  SearchResult res;
  ColumnPool pool;
  pool.reset(pr.G, pr.J);
  bool deferral_proof = true;
  for (const auto& f : pr.instance->fires) deferral_proof = deferral_proof && is_deferral_proof(f);

  std::vector<Node> open(1);
  int next_node_id = 1, next_cut_id = 0;
  double ub = kInf;
  bool stopped = false;
  Clock::time_point last_heuristic = t0;

  auto take_incumbent = [&](double cost, std::vector<FirePlan> plans, std::vector<CrewRoute> routes) {
    if (cost >= ub) return false;
    ub = cost;
    res.has_incumbent = true;
    res.plans = std::move(plans);
    res.routes = std::move(routes);
    return true;
  };
  auto take_integer = [&](const IntegerSolution& s) {
    std::vector<FirePlan> plans;
    std::vector<CrewRoute> routes;
    double cost = 0.0;
    for (int g = 0; g < pr.G; ++g) {
      plans.push_back(pool.plans(g)[s.plan[g]]);
      cost += plans.back().cost;
    }
    for (int j = 0; j < pr.J; ++j) {
      routes.push_back(pool.routes(j)[s.route[j]]);
      cost += routes.back().cost;
    }
    return take_incumbent(cost, std::move(plans), std::move(routes));
  };
  auto global_lb = [&](double extra) {
    double lb = std::min(ub, extra);
    for (const auto& n : open) lb = std::min(lb, n.bound);
    return lb;
  };
  auto log_row = [&](const Node& n, double lp, const std::string& action, double lb) {
    SearchLogRow row;
    row.node_id = n.id;
    row.parent = n.parent;
    row.depth = n.depth;
    row.lp_value = lp;
    row.n_columns = pool.size();
    row.n_cuts = static_cast<int>(n.cuts.size());
    row.action = action;
    row.ub = ub;
    row.lb = lb;
    row.wall_time = seconds_since(t0);
    res.log.push_back(row);
    log_info("node " + std::to_string(n.id) + " " + action + " lp=" + format_number(lp) + " UB=" + format_number(ub) +
             " LB=" + format_number(lb));
  };
  auto run_heuristic = [&](const Node& n, const RmpSolution& sol) {
    HeuristicOptions ho;
    ho.budget = cfg.heuristic_budget;
    ho.cutoff = ub;
    ho.threads = cfg.threads;
    ho.cut_mode = cfg.cut_mode;
    ho.max_cuts_per_round = cfg.max_cuts_per_round;
    ho.deadline = deadline;
    ++res.stats.heuristic_calls;
    HeuristicResult h = fire_demand_heuristic(pr, pool, n.branch, n.cuts, sol, ho);
    bool improved = h.best && take_integer(*h.best);
    if (improved) ++res.stats.heuristic_improvements;
    last_heuristic = Clock::now();
    return improved;
  };

  while (!open.empty()) {
    if (past(deadline)) {
      stopped = res.timed_out = true;
      break;
    }
    if (res.stats.nodes_processed >= cfg.node_limit) {
      stopped = true;
      break;
    }
    // Best bound first; deeper, then older, on ties.
    std::size_t pick = 0;
    for (std::size_t k = 1; k < open.size(); ++k) {
      const Node &a = open[k], &b = open[pick];
      if (a.bound < b.bound || (a.bound == b.bound && (a.depth > b.depth || (a.depth == b.depth && a.id < b.id))))
        pick = k;
    }
    Node node = std::move(open[pick]);
    open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
    if (node.bound >= ub - prune_tolerance(ub)) {
      log_row(node, node.bound, "pruned", global_lb(ub));
      continue;
    }
    ++res.stats.nodes_processed;
    const bool is_root = node.id == 0;

    CgOptions co;
    co.threads = cfg.threads;
    co.iteration_cap = cfg.cg_iteration_cap;
    co.deadline = deadline;
    co.stabilize = cfg.stabilize == StabilizeMode::kOn || (cfg.stabilize == StabilizeMode::kAuto && is_root);
    co.stabilize_iterations =
        cfg.stabilize == StabilizeMode::kAuto && !deferral_proof ? cfg.stabilize_iterations : -1;
    NodeLp lp = solve_node_lp(pr, pool, node.branch, node.cuts, co, cfg.cut_mode, cfg.max_cut_rounds,
                              cfg.max_cuts_per_round, next_cut_id, node.basis.basic.empty() ? nullptr : &node.basis,
                              &res.stats);
    if (is_root) {
      res.root_lp_stabilized = lp.cg.stabilized_value;
      res.root_rho_stabilized = lp.cg.stabilized_rho;
    }
    if (lp.timed_out) {
      open.push_back(std::move(node));
      stopped = res.timed_out = true;
      break;
    }
    if (lp.infeasible) {
      log_row(node, kInf, "infeasible", global_lb(ub));
      continue;
    }
    const RmpSolution& sol = lp.cg.rmp;
    const double value = sol.objective;
    if (is_root) {
      res.root_lp_no_cuts = lp.value_before_cuts;
      res.root_lp = value;
    }
    node.bound = std::max(node.bound, value);

    if (node.bound >= ub - prune_tolerance(ub)) {
      log_row(node, value, "pruned", global_lb(ub));
      continue;
    }
    if (solution_integral(sol)) {
      std::vector<FirePlan> plans;
      std::vector<CrewRoute> routes;
      double cost = 0.0;
      for (int g = 0; g < pr.G; ++g)
        for (std::size_t q = 0; q < sol.y[g].size(); ++q)
          if (sol.y[g][q] > 0.5) {
            plans.push_back(pool.plans(g)[q]);
            cost += plans.back().cost;
          }
      for (int j = 0; j < pr.J; ++j)
        for (std::size_t p = 0; p < sol.z[j].size(); ++p)
          if (sol.z[j][p] > 0.5) {
            routes.push_back(pool.routes(j)[p]);
            cost += routes.back().cost;
          }
      take_incumbent(cost, std::move(plans), std::move(routes));
      log_row(node, value, "integral", global_lb(ub));
      continue;
    }
    auto cands = compute_branch_scores(pr, pool, sol, cfg.branch_rule);
    if (cands.empty()) {
      // Zero variance everywhere: any support column per owner gives an
      // integer solution of the LP value.
      std::vector<FirePlan> plans;
      std::vector<CrewRoute> routes;
      double cost = 0.0;
      for (int g = 0; g < pr.G; ++g) {
        int best = -1;
        for (std::size_t q = 0; q < sol.y[g].size(); ++q)
          if (sol.y[g][q] > kVarianceTol && (best < 0 || pool.plans(g)[q].cost < pool.plans(g)[best].cost))
            best = static_cast<int>(q);
        plans.push_back(pool.plans(g)[best]);
        cost += plans.back().cost;
      }
      for (int j = 0; j < pr.J; ++j) {
        int best = -1;
        for (std::size_t p = 0; p < sol.z[j].size(); ++p)
          if (sol.z[j][p] > kVarianceTol && (best < 0 || pool.routes(j)[p].cost < pool.routes(j)[best].cost))
            best = static_cast<int>(p);
        routes.push_back(pool.routes(j)[best]);
        cost += routes.back().cost;
      }
      if (std::fabs(cost - value) > 1e-6 * std::max(1.0, std::fabs(value)))
        throw Error("zero-variance conversion changed the cost: " + format_number(cost) + " vs " +
                    format_number(value));
      ++res.stats.zero_variance_conversions;
      take_incumbent(cost, std::move(plans), std::move(routes));
      log_row(node, value, "integral", global_lb(ub));
      continue;
    }

    if (cfg.heuristic_period >= 0.0 && (is_root || seconds_since(last_heuristic) >= cfg.heuristic_period)) {
      bool improved = run_heuristic(node, sol);
      SearchLogRow row;
      row.node_id = node.id;
      row.parent = node.parent;
      row.depth = node.depth;
      row.lp_value = value;
      row.n_columns = pool.size();
      row.n_cuts = static_cast<int>(node.cuts.size());
      row.action = improved ? "heuristic_improved" : "heuristic";
      row.ub = ub;
      row.lb = global_lb(node.bound);
      row.wall_time = seconds_since(t0);
      res.log.push_back(row);
      if (node.bound >= ub - prune_tolerance(ub)) {
        log_row(node, value, "pruned", global_lb(ub));
        continue;
      }
    }

    const BranchCandidate& c = cands.front();
    auto [low, high] = make_children(node.branch, c);
    ++res.stats.branches;
    ++res.stats.separation_checks;
    if (!excludes_solution(pool, sol, low) || !excludes_solution(pool, sol, high)) {
      ++res.stats.separation_failures;
      log_message(LogLevel::kQuiet, "branch failed to separate the parent solution at node " + std::to_string(node.id));
    }
    std::vector<RobustCut> inherited;
    for (std::size_t u = 0; u < node.cuts.size(); ++u)
      if (sol.duals.alpha[u] > 1e-9) inherited.push_back(node.cuts[u]);
    for (BranchSet* b : {&low, &high}) {
      Node child;
      child.id = next_node_id++;
      child.parent = node.id;
      child.depth = node.depth + 1;
      child.branch = std::move(*b);
      child.cuts = inherited;
      child.bound = node.bound;
      child.basis = sol.lp.basis;
      open.push_back(std::move(child));
      ++res.stats.nodes_created;
    }
    std::string action = c.kind == BranchCandidate::kFire
                             ? "branch_fire(" + std::to_string(c.fire) + "," + std::to_string(c.period) + ")"
                             : "branch_crew(" + std::to_string(c.crew) + "," + std::to_string(c.fire) + "," +
                                   std::to_string(c.period) + ")";
    log_row(node, value, action, global_lb(ub));
  }

  res.upper_bound = ub;
  res.lower_bound = stopped ? global_lb(ub) : ub;
  if (!res.has_incumbent && !stopped) res.lower_bound = kInf;
  res.optimal = !stopped && res.has_incumbent;
  res.gap = res.has_incumbent ? search_gap(res.upper_bound, res.lower_bound) : std::numeric_limits<double>::infinity();
  res.columns = pool.size();
  res.wall_time = seconds_since(t0);
  return res;
}

Json solution_to_json(const Problem& pr, const SearchResult& r, const SearchConfig& cfg, bool timing) {
  const Instance& in = *pr.instance;
  auto num = [](double v) -> Json {
    if (!std::isfinite(v)) return nullptr;
    return v;
  };
  Json doc;
  doc["status"] = r.optimal ? "optimal" : (r.has_incumbent ? "feasible" : "no_solution");
  doc["objective"] = r.has_incumbent ? num(r.upper_bound) : Json(nullptr);
  doc["upper_bound"] = num(r.upper_bound);
  doc["lower_bound"] = num(r.lower_bound);
  doc["gap"] = num(r.gap);
  doc["config"] = {{"time_limit", cfg.time_limit},
                   {"cut_mode", cut_mode_name(cfg.cut_mode)},
                   {"branch_rule", branch_rule_name(cfg.branch_rule)},
                   {"heuristic_period", cfg.heuristic_period},
                   {"stabilize", stabilize_mode_name(cfg.stabilize)},
                   {"threads", cfg.threads}};
  doc["root"] = {{"lp_no_cuts", num(r.root_lp_no_cuts)},
                 {"lp", num(r.root_lp)},
                 {"lp_stabilized", num(r.root_lp_stabilized)}};
  doc["stats"] = {{"nodes_processed", r.stats.nodes_processed},
                  {"nodes_created", r.stats.nodes_created},
                  {"branches", r.stats.branches},
                  {"separation_failures", r.stats.separation_failures},
                  {"zero_variance_conversions", r.stats.zero_variance_conversions},
                  {"cuts_added", r.stats.cuts_added},
                  {"cg_iterations", r.stats.cg_iterations},
                  {"heuristic_calls", r.stats.heuristic_calls},
                  {"heuristic_improvements", r.stats.heuristic_improvements},
                  {"columns", r.columns},
                  {"timed_out", r.timed_out}};
  Json fires = Json::array();
  for (const auto& plan : r.plans) {
    Json f;
    const FireSpec& spec = in.fires[plan.fire];
    f["id"] = spec.id;
    f["cost"] = plan.cost;
    f["demand"] = plan.demand;
    Json traj = Json::array();
    auto states = plan_trajectory(pr, plan);
    for (std::size_t k = 0; k < states.size(); ++k) {
      Json s{{"t", static_cast<int>(k) + 1}, {"area", states[k].area}};
      if (spec.is_linear()) s["perimeter"] = states[k].perimeter;
      else s["momentum"] = states[k].momentum;
      traj.push_back(s);
    }
    f["trajectory"] = traj;
    fires.push_back(f);
  }
  doc["fires"] = fires;
  Json crews = Json::array();
  for (const auto& route : r.routes) {
    const CrewNetwork& net = pr.crews[route.crew];
    Json c;
    c["id"] = in.crews[route.crew].id;
    c["cost"] = route.cost;
    Json work = Json::array();
    for (int g : route.work) work.push_back(g < 0 ? Json(nullptr) : Json(in.fires[g].id));
    c["work"] = work;
    Json arcs = Json::array();
    for (int a : route.arcs) {
      const CrewNode& u = net.nodes[net.dag.tail[a]];
      const CrewNode& v = net.nodes[net.dag.head[a]];
      arcs.push_back({{"kind", crew_arc_kind_name(net.kind[a])},
                      {"from", {{"location", in.locations[u.location].id}, {"period", u.period}, {"rest", u.rest}}},
                      {"to", {{"location", in.locations[v.location].id}, {"period", v.period}, {"rest", v.rest}}}});
    }
    c["arcs"] = arcs;
    crews.push_back(c);
  }
  doc["crews"] = crews;
  if (timing) doc["wall_time"] = r.wall_time;
  return doc;
}

std::string search_log_csv(const SearchResult& r, bool timing) {
  std::ostringstream out;
  out << "node_id,parent,depth,lp_value,n_columns,n_cuts,action,UB,LB,wall_time\n";
  for (const auto& row : r.log) {
    out << row.node_id << ',' << row.parent << ',' << row.depth << ',' << format_number(row.lp_value) << ','
        << row.n_columns << ',' << row.n_cuts << ',' << row.action << ',' << format_number(row.ub) << ','
        << format_number(row.lb) << ',';
    if (timing) out << format_number(row.wall_time);
    out << '\n';
  }
  return out.str();
}

}  // namespace fireline
