#include "fireline/networks.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include "fireline/common.hpp"

namespace fireline {

// ---------------------------------------------------------------------------
// Dag

int Dag::add_node(int tau) {
  period.push_back(tau);
  return static_cast<int>(period.size()) - 1;
}

int Dag::add_arc(int from, int to) {
  tail.push_back(from);
  head.push_back(to);
  return static_cast<int>(tail.size()) - 1;
}

void Dag::finalize() {
  int n = num_nodes(), m = num_arcs();
  order.resize(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return period[a] < period[b]; });
  auto build = [&](const std::vector<int>& key, std::vector<int>& offset, std::vector<int>& arcs) {
    offset.assign(n + 1, 0);
    for (int a = 0; a < m; ++a) ++offset[key[a] + 1];
    for (int i = 0; i < n; ++i) offset[i + 1] += offset[i];
    arcs.assign(m, 0);
    std::vector<int> fill(offset.begin(), offset.end() - 1);
    for (int a = 0; a < m; ++a) arcs[fill[key[a]]++] = a;
  };
  build(tail, out_offset, out_arcs);
  build(head, in_offset, in_arcs);
}

void Dag::check_forward() const {
  for (int a = 0; a < num_arcs(); ++a)
    if (period[head[a]] <= period[tail[a]])
      throw Error("arc " + std::to_string(a) + " does not move forward in time");
}

const char* crew_arc_kind_name(CrewArcKind kind) {
  switch (kind) {
    case CrewArcKind::kTravel: return "travel";
    case CrewArcKind::kWork: return "work";
    case CrewArcKind::kRest: return "rest";
    case CrewArcKind::kWait: return "wait";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Crew networks

namespace {

CrewNetwork build_crew(int crew, const Instance& in, bool extended) {
  const CrewSpec& spec = in.crews[crew];
  const int T = in.horizon;
  const int phi = in.rest.phi, gamma = in.rest.gamma;
  const int deadline = in.rest_deadline(crew);
  const int levels = extended ? phi + 1 : 2;
  std::vector<int> locs = in.crew_locations(crew);
  const int nl = static_cast<int>(locs.size());
  auto loc_pos = [&](int loc) {
    return static_cast<int>(std::lower_bound(locs.begin(), locs.end(), loc) - locs.begin());
  };
  if (!std::binary_search(locs.begin(), locs.end(), spec.start))
    throw InputError("crew " + spec.id + " starts outside its location set");

  CrewNetwork net;
  net.crew = crew;
  net.horizon = T;
  net.num_fires = in.num_fires();
  net.extended = extended;
  net.work_arcs.assign(static_cast<std::size_t>(in.num_fires()) * T, {});

  int start_counter = extended ? std::min(phi, std::max(0, -in.rest.last_rest[crew])) : 0;
  net.dag.add_node(1);
  net.nodes.push_back({spec.start, 1, start_counter});
  for (int li = 0; li < nl; ++li)
    for (int tau = 2; tau <= T + 1; ++tau)
      for (int r = 0; r < levels; ++r) {
        net.dag.add_node(tau);
        net.nodes.push_back({locs[li], tau, r});
      }
  net.dag.start = 0;
  net.dag.terminal_period = T + 1;

  auto node_at = [&](int loc, int tau, int r) {
    return 1 + (loc_pos(loc) * T + (tau - 2)) * levels + r;
  };
  auto can_move = [&](const CrewNode& n) {
    return extended ? n.rest < phi : (n.rest == 1 || n.period <= deadline);
  };
  auto advance = [&](int r, int dt) { return extended ? std::min(phi, r + dt) : r; };
  auto add = [&](int from, int to, CrewArcKind k, double c, int g) {
    int a = net.dag.add_arc(from, to);
    net.kind.push_back(k);
    net.cost.push_back(c);
    net.fire.push_back(g);
    if (g >= 0) net.work_arcs[g * T + net.nodes[from].period - 1].push_back(a);
  };

  std::vector<std::vector<int>> fires_at(in.locations.size());
  for (int g : spec.jurisdiction) fires_at[in.fires[g].location].push_back(g);

  for (int n = 0; n < net.dag.num_nodes(); ++n) {
    const CrewNode node = net.nodes[n];
    if (node.period > T) continue;
    if (can_move(node)) {
      for (int l2 : locs) {
        if (l2 == node.location) continue;
        int k = in.travel_periods(node.location, l2);
        if (node.period + k > T + 1) continue;
        add(n, node_at(l2, node.period + k, advance(node.rest, k)), CrewArcKind::kTravel,
            in.travel_cost_per_hour * in.travel_hours[node.location][l2], -1);
      }
      for (int g : fires_at[node.location])
        add(n, node_at(node.location, node.period + 1, advance(node.rest, 1)), CrewArcKind::kWork, 0.0, g);
    }
    if (node.location == spec.base) {
      add(n, node_at(spec.base, node.period + 1, advance(node.rest, 1)), CrewArcKind::kWait, 0.0, -1);
      if (extended || node.rest == 0) {
        for (int t2 = node.period + gamma; t2 <= T + 1; ++t2)
          add(n, node_at(spec.base, t2, extended ? 0 : 1), CrewArcKind::kRest, 0.0, -1);
      }
    }
  }
  net.dag.finalize();
  return net;
}

}  // namespace

CrewNetwork build_crew_network(int crew, const Instance& instance) {
  if (instance.horizon >= instance.rest.phi + instance.rest.gamma)
    throw InputError("horizon >= phi + gamma: use build_crew_network_extended");
  return build_crew(crew, instance, false);
}

CrewNetwork build_crew_network_extended(int crew, const Instance& instance) {
  return build_crew(crew, instance, true);
}

CrewNetwork build_crew_network_auto(int crew, const Instance& instance) {
  return instance.uses_compact_network() ? build_crew_network(crew, instance)
                                         : build_crew_network_extended(crew, instance);
}

// ---------------------------------------------------------------------------
// Fire networks

namespace {

using StateKey = std::tuple<double, double, double>;

StateKey key_of(const FireSpec& fire, const FireState& s) {
  if (fire.is_linear()) return {s.perimeter, 0.0, 0.0};
  return {s.area, s.momentum, 0.0};
}

}  // namespace

int FireNetwork::max_width() const {
  std::map<int, int> counts;
  for (int p : dag.period) ++counts[p];
  int w = 0;
  for (const auto& [p, c] : counts) w = std::max(w, c);
  return w;
}

FireNetwork build_fire_network(const FireSpec& fire, int horizon, const std::vector<int>& crew_levels,
                               int fire_index) {
  if (crew_levels.empty() || std::find(crew_levels.begin(), crew_levels.end(), 0) == crew_levels.end())
    throw InputError("crew levels must be nonempty and include 0");
  std::vector<int> levels = crew_levels;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  FireNetwork net;
  net.fire = fire_index;
  net.horizon = horizon;
  net.levels = levels;
  net.linear = fire.is_linear();
  net.arcs_at.assign(horizon, {});
  net.crew_arcs_at.assign(horizon, {});
  bool clamped = false;
  FireState s0 = initial_fire_state(fire, &clamped);
  if (fire.is_linear()) s0.area = 0.0;
  net.dag.add_node(1);
  net.states.push_back(s0);
  net.dag.start = 0;
  net.dag.terminal_period = horizon + 1;

  std::vector<int> layer{0};
  for (int t = 1; t <= horizon; ++t) {
    std::map<StateKey, int> next_nodes;
    std::vector<int> next_layer;
    for (int n : layer) {
      const FireState state = net.states[n];
      std::map<StateKey, bool> seen;
      for (int x : levels) {
        FireTransition tr = fire_transition(fire, state, x, t);
        clamped = clamped || tr.clamped;
        if (fire.is_linear()) tr.next.area = 0.0;
        StateKey key = key_of(fire, tr.next);
        if (!seen.emplace(key, true).second) continue;
        auto it = next_nodes.find(key);
        int head;
        if (it == next_nodes.end()) {
          head = net.dag.add_node(t + 1);
          net.states.push_back(tr.next);
          next_nodes.emplace(key, head);
          next_layer.push_back(head);
        } else {
          head = it->second;
        }
        double d = tr.damage;
        if (t == 1) d += initial_damage(fire);
        if (t == horizon) d += terminal_damage(fire, tr.next);
        int a = net.dag.add_arc(n, head);
        net.label.push_back(x);
        net.damage.push_back(d);
        net.arcs_at[t - 1].push_back(a);
        if (x > 0) net.crew_arcs_at[t - 1].push_back(a);
      }
    }
    layer = std::move(next_layer);
  }
  if (clamped)
    net.warnings.push_back("fire " + fire.id + ": state exceeded the top grid bin and was clamped");
  for (const auto& w : net.warnings) log_info(w);
  net.dag.finalize();
  return net;
}

std::string fire_network_csv(const FireNetwork& net) {
  std::ostringstream os;
  os.precision(12);
  os << "tail_state,tail_t,head_state,head_t,x_a,d_a\n";
  auto label = [&](int n) {
    const FireState& s = net.states[n];
    std::ostringstream ls;
    ls.precision(10);
    if (net.linear) ls << "p=" << s.perimeter;
    else ls << "a=" << s.area << ";m=" << s.momentum;
    return ls.str();
  };
  for (int a = 0; a < net.dag.num_arcs(); ++a) {
    int u = net.dag.tail[a], v = net.dag.head[a];
    os << label(u) << ',' << net.dag.period[u] << ',' << label(v) << ',' << net.dag.period[v] << ','
       << net.label[a] << ',' << net.damage[a] << '\n';
  }
  return os.str();
}

}  // namespace fireline
