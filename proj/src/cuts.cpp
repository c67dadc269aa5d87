#include "fireline/cuts.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "fireline/common.hpp"
#include "fireline/lp.hpp"
#include "fireline/master.hpp"

namespace fireline {

namespace {

constexpr double kViolationTol = 1e-6;
constexpr double kWeightTol = 1e-9;

}  // namespace

double PeriodSnapshot::mean_demand(int g) const {
  double s = 0.0;
  for (std::size_t d = 0; d < demand_weight[g].size(); ++d) s += d * demand_weight[g][d];
  return s;
}

PeriodSnapshot make_snapshot(const Problem& problem, const ColumnPool& pool,
                             const std::vector<std::vector<double>>& y, const std::vector<std::vector<double>>& z,
                             int t) {
  PeriodSnapshot s;
  s.period = t;
  s.J = problem.J;
  s.demand_weight.assign(problem.G, std::vector<double>(problem.J + 1, 0.0));
  for (int g = 0; g < problem.G; ++g) {
    const auto& plans = pool.plans(g);
    for (std::size_t q = 0; q < plans.size(); ++q)
      if (y[g][q] > 0.0) s.demand_weight[g][std::min(problem.J, plans[q].demand_at(t))] += y[g][q];
  }
  s.crew_work.assign(problem.J, std::vector<double>(problem.G, 0.0));
  for (int j = 0; j < problem.J; ++j) {
    const auto& routes = pool.routes(j);
    double total = 0.0;
    for (std::size_t p = 0; p < routes.size(); ++p) {
      int g = routes[p].work[t - 1];
      if (g >= 0 && z[j][p] > 0.0) {
        s.crew_work[j][g] += z[j][p];
        total += z[j][p];
      }
    }
    if (total <= kWeightTol) s.idle_crews.push_back(j);
  }
  return s;
}

double cut_lhs_value(const RobustCut& cut, const PeriodSnapshot& s) {
  double lhs = 0.0;
  for (std::size_t k = 0; k < cut.fires.size(); ++k) {
    const auto& w = s.demand_weight[cut.fires[k]];
    for (std::size_t d = 0; d < w.size(); ++d) lhs += w[d] * cut.fire_coefficient(cut.fires[k], static_cast<int>(d));
  }
  for (int j : cut.crews) {
    double busy = 0.0;
    for (int g : cut.fires) busy += s.crew_work[j][g];
    lhs += std::max(0.0, 1.0 - busy);
  }
  return lhs;
}

std::vector<RobustCut> enumerate_gub_covers(const PeriodSnapshot& s, int max_fires, int max_cuts) {
  const int G = static_cast<int>(s.demand_weight.size());
  const int idle = static_cast<int>(s.idle_crews.size());
  std::vector<std::vector<int>> levels(G);
  std::vector<std::vector<double>> tail(G);  // weight of B >= d
  for (int g = 0; g < G; ++g) {
    const auto& w = s.demand_weight[g];
    tail[g].assign(w.size() + 1, 0.0);
    for (int d = static_cast<int>(w.size()) - 1; d >= 0; --d) tail[g][d] = tail[g][d + 1] + w[d];
    for (int d = 1; d < static_cast<int>(w.size()); ++d)
      if (w[d] > kWeightTol) levels[g].push_back(d);
  }
  struct Found {
    double violation;
    std::vector<int> fires, targets;
  };
  std::vector<Found> found;
  std::vector<int> subset, targets;
  std::function<void(int)> choose_targets = [&](int k) {
    if (k == static_cast<int>(subset.size())) {
      int sum = 0, mn = INT_MAX;
      double lhs = 0.0;
      for (std::size_t i = 0; i < subset.size(); ++i) {
        sum += targets[i];
        mn = std::min(mn, targets[i]);
        lhs += tail[subset[i]][targets[i]];
      }
      if (sum + idle <= s.J) return;
      if (sum + idle - mn > s.J) return;
      double violation = lhs - (static_cast<double>(subset.size()) - 1.0);
      if (violation > kViolationTol) found.push_back({violation, subset, targets});
      return;
    }
    for (int d : levels[subset[k]]) {
      targets[k] = d;
      choose_targets(k + 1);
    }
  };
  std::function<void(int)> choose_fires = [&](int start) {
    if (!subset.empty()) {
      targets.assign(subset.size(), 0);
      choose_targets(0);
    }
    if (static_cast<int>(subset.size()) == max_fires) return;
    for (int g = start; g < G; ++g) {
      if (levels[g].empty()) continue;
      subset.push_back(g);
      choose_fires(g + 1);
      subset.pop_back();
    }
  };
  choose_fires(0);
  std::stable_sort(found.begin(), found.end(), [](const Found& a, const Found& b) { return a.violation > b.violation; });
  std::vector<RobustCut> cuts;
  for (const auto& f : found) {
    if (static_cast<int>(cuts.size()) >= max_cuts) break;
    cuts.push_back(make_gub_cut(s.period, f.fires, f.targets, s.idle_crews, s.J));
  }
  return cuts;
}

RobustCut strengthen_gub(const RobustCut& cut, const std::vector<double>& incumbent, int J) {
  std::vector<int> D = cut.targets;
  const int limit = J - static_cast<int>(cut.crews.size()) + 1;
  int sum = 0;
  for (int d : D) sum += d;
  bool changed = false;
  while (sum > limit) {
    int best = -1;
    double best_gap = 0.0;
    for (std::size_t k = 0; k < D.size(); ++k) {
      if (D[k] <= 0) continue;
      double gap = D[k] - incumbent[k];
      if (best < 0 || gap > best_gap) {
        best = static_cast<int>(k);
        best_gap = gap;
      }
    }
    if (best < 0) break;
    --D[best];
    --sum;
    changed = true;
  }
  if (!changed) return cut;
  RobustCut out = make_gub_cut(cut.period, cut.fires, D, cut.crews, J, CutFamily::kStrengthenedGub);
  return out;
}

SubsetChoice dp_max_weight_subset(const std::vector<std::vector<double>>& delta, int capacity) {
  const int n = static_cast<int>(delta.size());
  const double neg = -1e300;
  capacity = std::max(0, capacity);
  // best[k][c]: max value using fires 0..k-1 with total level exactly <= c.
  std::vector<std::vector<double>> best(n + 1, std::vector<double>(capacity + 1, 0.0));
  std::vector<std::vector<int>> pick(n + 1, std::vector<int>(capacity + 1, -1));
  for (int k = 0; k < n; ++k) {
    for (int c = 0; c <= capacity; ++c) {
      double v = best[k][c];
      int choice = -1;
      for (int d = 0; d < static_cast<int>(delta[k].size()) && d <= c; ++d) {
        double cand = best[k][c - d] + delta[k][d];
        if (delta[k][d] > 0.0 && cand > v + 1e-15) {
          v = cand;
          choice = d;
        }
      }
      best[k + 1][c] = v > neg ? v : 0.0;
      pick[k + 1][c] = choice;
    }
  }
  SubsetChoice out;
  out.value = best[n][capacity];
  int c = capacity;
  for (int k = n; k >= 1; --k) {
    int d = pick[k][c];
    if (d >= 0) {
      out.items.push_back({k - 1, d});
      c -= d;
    }
  }
  std::reverse(out.items.begin(), out.items.end());
  return out;
}

std::optional<RobustCut> separate_agub_cglp(const PeriodSnapshot& s, CglpStats* stats, int max_rounds) {
  const int G = static_cast<int>(s.demand_weight.size());
  const int capacity = s.J - static_cast<int>(s.idle_crews.size());
  if (capacity < 0) return std::nullopt;
  struct Var {
    int g, d;
    double w;
  };
  std::vector<Var> vars;
  for (int g = 0; g < G; ++g)
    for (int d = 0; d < static_cast<int>(s.demand_weight[g].size()); ++d)
      if (s.demand_weight[g][d] > kWeightTol) vars.push_back({g, d, s.demand_weight[g][d]});
  if (vars.empty()) return std::nullopt;

  // CGLP: max sum w delta - K over sum_{S} delta <= K, 0 <= delta <= 1.
  // Solved through its dual, min sum mu over sum_{S ∋ v} lambda_S + mu_v >= w_v
  // and sum lambda <= 1, so each generated set is a new column and the
  // previous basis stays feasible. delta and K are read off the row duals.
  LinearProgram lp;
  for (const auto& v : vars) lp.add_row(RowSense::kGe, v.w);
  const int budget_row = lp.add_row(RowSense::kLe, 1.0);
  const std::int64_t kSetKey = 1 << 20;
  for (std::size_t v = 0; v < vars.size(); ++v) lp.add_column(1.0, {{static_cast<int>(v), 1.0}});
  lp.add_column(0.0, {{budget_row, 1.0}}, kInf, kSetKey);  // S = {} gives K >= 0
  std::vector<double> delta(vars.size(), 0.0);
  double K = 0.0, dp_max = 0.0;
  LpBasis basis;
  int round = 0;
  for (; round < max_rounds; ++round) {
    LpOptions opt;
    if (!basis.empty()) opt.warm_start = &basis;
    LpSolution sol = solve_lp(lp, opt);
    if (sol.status != LpStatus::kOptimal) throw LpError("CGLP did not solve to optimality");
    basis = sol.basis;
    for (std::size_t v = 0; v < vars.size(); ++v) delta[v] = std::clamp(sol.dual[v], 0.0, 1.0);
    K = std::max(0.0, -sol.dual[budget_row]);

    std::vector<std::vector<double>> table(G, std::vector<double>(s.J + 1, 0.0));
    for (std::size_t v = 0; v < vars.size(); ++v) table[vars[v].g][vars[v].d] = delta[v];
    SubsetChoice best = dp_max_weight_subset(table, capacity);
    dp_max = best.value;
    if (best.value <= K + 1e-7) break;
    std::vector<LpEntry> col{{budget_row, 1.0}};
    for (auto [g, d] : best.items)
      for (std::size_t v = 0; v < vars.size(); ++v)
        if (vars[v].g == g && vars[v].d == d) col.push_back({static_cast<int>(v), 1.0});
    lp.add_column(0.0, std::move(col), kInf, kSetKey + round + 1);
  }
  // The exact DP maximum is used as the budget so the cut is valid even if
  // row generation stopped early.
  K = std::max(K, dp_max);
  double value = -K;
  for (std::size_t v = 0; v < vars.size(); ++v) value += vars[v].w * delta[v];
  if (stats) {
    stats->rounds = round + 1;
    stats->objective = value;
  }
  if (value <= kViolationTol) return std::nullopt;

  RobustCut cut;
  cut.period = s.period;
  cut.family = CutFamily::kAugmentedGub;
  for (int g = 0; g < G; ++g) {
    std::vector<double> w(s.J + 1, 0.0);
    bool any = false;
    for (std::size_t v = 0; v < vars.size(); ++v)
      if (vars[v].g == g && delta[v] > 1e-12) {
        w[vars[v].d] = std::min(1.0, delta[v]);
        any = true;
      }
    if (any) {
      cut.fires.push_back(g);
      cut.weight.push_back(w);
    }
  }
  cut.crews = s.idle_crews;
  cut.rhs = static_cast<double>(s.idle_crews.size()) + K;
  return cut;
}

const char* cut_mode_name(CutMode mode) {
  switch (mode) {
    case CutMode::kNone: return "none";
    case CutMode::kGub: return "gub";
    case CutMode::kStrengthenedGub: return "sgub";
    case CutMode::kAugmentedGub: return "agub";
  }
  return "?";
}

CutMode parse_cut_mode(const std::string& name) {
  if (name == "none") return CutMode::kNone;
  if (name == "gub") return CutMode::kGub;
  if (name == "sgub") return CutMode::kStrengthenedGub;
  if (name == "agub") return CutMode::kAugmentedGub;
  throw InputError("unknown cut mode '" + name + "'");
}

std::vector<RobustCut> separate_cuts(const Problem& problem, const ColumnPool& pool,
                                     const std::vector<std::vector<double>>& y,
                                     const std::vector<std::vector<double>>& z, CutMode mode,
                                     const std::vector<RobustCut>& existing, int max_cuts) {
  if (mode == CutMode::kNone) return {};
  struct Scored {
    double violation;
    RobustCut cut;
  };
  std::vector<Scored> scored;
  auto consider = [&](RobustCut cut, const PeriodSnapshot& snap) {
    double violation = cut_lhs_value(cut, snap) - cut.rhs;
    if (violation <= kViolationTol) return;
    for (const auto& e : existing)
      if (e.same_as(cut)) return;
    for (const auto& sc : scored)
      if (sc.cut.same_as(cut)) return;
    scored.push_back({violation, std::move(cut)});
  };
  for (int t = 1; t <= problem.T; ++t) {
    PeriodSnapshot snap = make_snapshot(problem, pool, y, z, t);
    auto gub = enumerate_gub_covers(snap, 4, max_cuts);
    for (auto& cut : gub) {
      if (mode != CutMode::kGub) {
        std::vector<double> incumbent;
        for (int g : cut.fires) incumbent.push_back(snap.mean_demand(g));
        cut = strengthen_gub(cut, incumbent, problem.J);
      }
      consider(std::move(cut), snap);
    }
    if (mode == CutMode::kAugmentedGub && gub.empty()) {
      if (auto cut = separate_agub_cglp(snap)) consider(std::move(*cut), snap);
    }
  }
  std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) { return a.violation > b.violation; });
  std::vector<RobustCut> out;
  for (auto& sc : scored) {
    if (static_cast<int>(out.size()) >= max_cuts) break;
    out.push_back(std::move(sc.cut));
  }
  return out;
}

}  // namespace fireline
