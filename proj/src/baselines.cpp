#include "fireline/baselines.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <sstream>
#include <thread>

#include "fireline/common.hpp"

namespace fireline {

const char* policy_name(Policy policy) {
  switch (policy) {
    case Policy::kNone: return "none";
    case Policy::kRandom: return "random";
    case Policy::kDistance: return "distance";
    case Policy::kArea: return "area";
    case Policy::kImpact: return "impact";
  }
  return "?";
}

Policy parse_policy(const std::string& name) {
  for (Policy p : {Policy::kNone, Policy::kRandom, Policy::kDistance, Policy::kArea, Policy::kImpact})
    if (name == policy_name(p)) return p;
  throw InputError("unknown policy '" + name + "'");
}

double uniform_draw(Rng& rng) { return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53; }

double score_transition(Policy policy, const TransitionCandidate& c, int crews_required, double travel_periods,
                        Rng& rng) {
  if (crews_required < 1) throw Error("score_transition needs at least one crew");
  double base = 0.0;
  switch (policy) {
    case Policy::kNone: return 0.0;
    case Policy::kRandom: base = uniform_draw(rng); break;
    case Policy::kDistance: base = 1.0 / travel_periods; break;
    case Policy::kArea: base = c.current.area; break;
    case Policy::kImpact: base = c.zero_next.area - c.next.area; break;
  }
  return base / crews_required / travel_periods;
}

const char* crew_status_name(CrewStatus status) {
  switch (status) {
    case CrewStatus::kAtBase: return "at_base";
    case CrewStatus::kAtFire: return "at_fire";
    case CrewStatus::kInTransit: return "in_transit";
    case CrewStatus::kResting: return "resting";
  }
  return "?";
}

namespace {

FireState start_state(const FireSpec& fire) {
  FireState s = initial_fire_state(fire);
  if (fire.is_linear()) s.area = fire.initial.area;
  return s;
}

// Largest supported level not above x; extra crews beyond it add nothing.
int usable_level(const FireNetwork& net, int x) {
  int best = 0;
  for (int l : net.levels)
    if (l <= x) best = std::max(best, l);
  return best;
}

FireTransition step(const Problem& pr, int g, const FireState& s, int crews, int t) {
  return fire_transition(pr.instance->fires[g], s, usable_level(pr.fires[g], crews), t);
}

std::vector<char> alive_nodes(const CrewNetwork& net) {
  const Dag& d = net.dag;
  std::vector<char> alive(d.num_nodes(), 0);
  for (auto it = d.order.rbegin(); it != d.order.rend(); ++it) {
    int v = *it;
    if (d.period[v] == d.terminal_period) {
      alive[v] = 1;
      continue;
    }
    for (int k = d.out_offset[v]; k < d.out_offset[v + 1]; ++k)
      if (alive[d.head[d.out_arcs[k]]]) {
        alive[v] = 1;
        break;
      }
  }
  return alive;
}

// Earliest work arc on fire g reachable from node u, with the arcs leading
// to it. Empty when unreachable.
std::vector<int> route_to_fire(const CrewNetwork& net, const std::vector<char>& alive, int u, int g) {
  const Dag& d = net.dag;
  std::vector<int> pred(d.num_nodes(), -2);
  pred[u] = -1;
  for (int v : d.order) {
    if (pred[v] == -2 || d.period[v] < d.period[u]) continue;
    for (int k = d.out_offset[v]; k < d.out_offset[v + 1]; ++k) {
      int a = d.out_arcs[k], h = d.head[a];
      if (!alive[h]) continue;
      if (net.fire[a] == g) {
        std::vector<int> path{a};
        for (int w = v; pred[w] >= 0; w = d.tail[pred[w]]) path.push_back(pred[w]);
        std::reverse(path.begin(), path.end());
        return path;
      }
      if (pred[h] == -2) pred[h] = a;
    }
  }
  return {};
}

int default_arc(const CrewNetwork& net, const std::vector<char>& alive, int u) {
  const Dag& d = net.dag;
  int best = -1, best_rank = 99;
  for (int k = d.out_offset[u]; k < d.out_offset[u + 1]; ++k) {
    int a = d.out_arcs[k];
    if (!alive[d.head[a]]) continue;
    int rank = 0;
    switch (net.kind[a]) {
      case CrewArcKind::kWait: rank = 0; break;
      case CrewArcKind::kRest: rank = 1; break;
      case CrewArcKind::kTravel: rank = 2; break;
      case CrewArcKind::kWork: rank = 3; break;
    }
    if (rank < best_rank) {
      best_rank = rank;
      best = a;
    }
  }
  if (best < 0) throw Error("crew stranded at a node with no feasible continuation");
  return best;
}

}  // namespace

SimulationResult simulate_policy(const Problem& pr, Policy policy, std::uint64_t seed) {
  const Instance& in = *pr.instance;
  SimulationResult res;
  res.policy = policy;
  res.seed = seed;
  Rng rng(seed);

  std::vector<std::vector<char>> alive(pr.J);
  DispatchState st;
  st.crews.resize(pr.J);
  for (int j = 0; j < pr.J; ++j) {
    alive[j] = alive_nodes(pr.crews[j]);
    st.crews[j].node = pr.crews[j].dag.start;
    st.crews[j].busy_until = pr.crews[j].dag.period[st.crews[j].node];
  }
  std::vector<char> fire_location(in.locations.size(), 0);
  for (const auto& f : in.fires) fire_location[f.location] = 1;
  res.trajectory.resize(pr.G);
  res.crews_at.assign(pr.G, std::vector<int>(pr.T, 0));
  res.crew_arcs.resize(pr.J);
  for (int g = 0; g < pr.G; ++g) {
    st.fires.push_back(start_state(in.fires[g]));
    res.trajectory[g].push_back(st.fires[g]);
  }

  for (int t = 1; t <= pr.T; ++t) {
    st.period = t;
    std::vector<int> committed(pr.G, 0);
    for (const auto& c : st.crews)
      if (c.target >= 0) ++committed[c.target];
    std::vector<int> idle;
    for (int j = 0; j < pr.J; ++j)
      if (st.crews[j].busy_until == t && st.crews[j].pending.empty()) idle.push_back(j);

    if (policy != Policy::kNone) {
      // Routes of the idle crews to each fire for this period.
      std::vector<std::vector<std::vector<int>>> route(pr.G, std::vector<std::vector<int>>(pr.J));
      for (int g = 0; g < pr.G; ++g)
        for (int j : idle) route[g][j] = route_to_fire(pr.crews[j], alive[j], st.crews[j].node, g);
      auto work_period = [&](int g, int j) {
        const CrewNetwork& net = pr.crews[j];
        return net.dag.period[net.dag.tail[route[g][j].back()]];
      };
      while (!idle.empty()) {
        double best_score = 0.0;
        int best_fire = -1;
        std::vector<int> best_block;
        for (int g = 0; g < pr.G; ++g) {
          std::vector<int> reach;
          for (int j : idle)
            if (!route[g][j].empty()) reach.push_back(j);
          if (reach.empty()) continue;
          std::stable_sort(reach.begin(), reach.end(),
                           [&](int a, int b) { return work_period(g, a) < work_period(g, b); });
          TransitionCandidate cand;
          cand.fire = g;
          cand.period = t;
          cand.committed = committed[g];
          cand.current = st.fires[g];
          cand.zero_next = step(pr, g, st.fires[g], 0, t).next;
          FireState base = step(pr, g, st.fires[g], committed[g], t).next;
          int k = 0;
          for (int n = 1; n <= static_cast<int>(reach.size()); ++n) {
            FireState next = step(pr, g, st.fires[g], committed[g] + n, t).next;
            if (!(next == base)) {
              cand.next = next;
              k = n;
              break;
            }
          }
          if (k == 0) continue;
          cand.crews_required = k;
          double travel = 0.0;
          for (int n = 0; n < k; ++n) travel += std::max(1, work_period(g, reach[n]) - t);
          travel /= k;
          double score = score_transition(policy, cand, k, travel, rng);
          if (score > best_score) {
            best_score = score;
            best_fire = g;
            best_block.assign(reach.begin(), reach.begin() + k);
          }
        }
        if (best_fire < 0) break;
        for (int j : best_block) {
          st.crews[j].pending = route[best_fire][j];
          st.crews[j].target = best_fire;
          ++committed[best_fire];
          idle.erase(std::find(idle.begin(), idle.end(), j));
          res.log.push_back({t, j, best_fire, "dispatch"});
        }
      }
    }

    // Every crew whose current node sits at period t takes its next arc.
    for (int j = 0; j < pr.J; ++j) {
      CrewDispatch& c = st.crews[j];
      if (c.busy_until != t) continue;
      const CrewNetwork& net = pr.crews[j];
      int a;
      if (!c.pending.empty()) {
        a = c.pending.front();
        c.pending.erase(c.pending.begin());
      } else {
        a = default_arc(net, alive[j], c.node);
      }
      res.crew_arcs[j].push_back(a);
      c.node = net.dag.head[a];
      c.busy_until = net.dag.period[c.node];
      int loc = net.nodes[c.node].location;
      switch (net.kind[a]) {
        case CrewArcKind::kTravel: c.status = CrewStatus::kInTransit; break;
        case CrewArcKind::kRest: c.status = CrewStatus::kResting; break;
        default: c.status = fire_location[loc] ? CrewStatus::kAtFire : CrewStatus::kAtBase; break;
      }
      if (net.fire[a] >= 0) {
        ++res.crews_at[net.fire[a]][t - 1];
        res.log.push_back({t, j, net.fire[a], "work"});
      }
      if (c.pending.empty()) c.target = -1;
    }

    for (int g = 0; g < pr.G; ++g) {
      st.fires[g] = step(pr, g, st.fires[g], res.crews_at[g][t - 1], t).next;
      res.trajectory[g].push_back(st.fires[g]);
    }
  }
  st.period = pr.T + 1;
  for (int g = 0; g < pr.G; ++g) {
    res.burned.push_back(st.fires[g].area);
    res.total_burned += st.fires[g].area;
  }
  return res;
}

double evaluate_demand(const Problem& pr, int g, const std::vector<int>& crews) {
  FireState s = start_state(pr.instance->fires[g]);
  for (int t = 1; t <= pr.T; ++t) s = step(pr, g, s, crews[t - 1], t).next;
  return s.area;
}

double do_nothing_burned(const Problem& pr) {
  double total = 0.0;
  for (int g = 0; g < pr.G; ++g) total += evaluate_demand(pr, g, std::vector<int>(pr.T, 0));
  return total;
}

std::vector<SummaryRow> evaluate_all(const Problem& pr, std::optional<double> optimized_burned,
                                     const std::vector<std::uint64_t>& seeds, int threads) {
  struct Task {
    Policy policy;
    std::uint64_t seed;
  };
  std::vector<Task> tasks{{Policy::kNone, 0}};
  for (auto s : seeds) tasks.push_back({Policy::kRandom, s});
  if (seeds.empty()) tasks.push_back({Policy::kRandom, 0});
  for (Policy p : {Policy::kDistance, Policy::kArea, Policy::kImpact}) tasks.push_back({p, 0});

  std::vector<double> burned(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  auto run = [&](std::size_t k) {
    try {
      burned[k] = simulate_policy(pr, tasks[k].policy, tasks[k].seed).total_burned;
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  int w = std::max(1, std::min<int>(threads, static_cast<int>(tasks.size())));
  if (w == 1) {
    for (std::size_t k = 0; k < tasks.size(); ++k) run(k);
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < w; ++i)
      pool.emplace_back([&, i] {
        for (std::size_t k = i; k < tasks.size(); k += w) run(k);
      });
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<std::pair<std::string, double>> policies;
  double random_sum = 0.0;
  int random_n = 0;
  for (std::size_t k = 0; k < tasks.size(); ++k)
    if (tasks[k].policy == Policy::kRandom) {
      random_sum += burned[k];
      ++random_n;
    }
  policies.emplace_back("random", random_sum / random_n);
  for (std::size_t k = 0; k < tasks.size(); ++k)
    if (tasks[k].policy != Policy::kNone && tasks[k].policy != Policy::kRandom)
      policies.emplace_back(policy_name(tasks[k].policy), burned[k]);
  return summary_rows(burned[0], optimized_burned, policies);
}

std::vector<SummaryRow> summary_rows(double none_burned, std::optional<double> optimized_burned,
                                     const std::vector<std::pair<std::string, double>>& policies) {
  auto make_row = [&](std::string method, double b) {
    SummaryRow r;
    r.method = std::move(method);
    r.burned = b;
    r.acres_saved = none_burned - b;
    r.pct_saved = none_burned > 0.0 ? 100.0 * r.acres_saved / none_burned : 0.0;
    return r;
  };
  std::vector<SummaryRow> rows;
  if (optimized_burned) rows.push_back(make_row("optimization", *optimized_burned));
  for (const auto& [name, b] : policies) {
    rows.push_back(make_row(name, b));
    if (optimized_burned && rows.back().acres_saved > 1e-9)
      rows.back().multiplier = rows.front().acres_saved / rows.back().acres_saved;
  }
  return rows;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "method,acres_saved,pct_saved,multiplier\n";
  char buf[64];
  for (const auto& r : rows) {
    out << r.method << ',';
    std::snprintf(buf, sizeof buf, "%.4f,%.4f,", r.acres_saved, r.pct_saved);
    out << buf;
    if (r.multiplier) {
      std::snprintf(buf, sizeof buf, "%.4f", *r.multiplier);
      out << buf;
    } else {
      out << "—";
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace fireline
