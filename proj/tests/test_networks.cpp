#include <algorithm>
#include <functional>
#include <set>

#include "doctest.h"
#include "fireline/common.hpp"
#include "fireline/networks.hpp"
#include "helpers.hpp"

using namespace fireline;
using namespace fireline::testing;

namespace {

std::vector<std::vector<int>> all_paths(const Dag& dag) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int)> dfs = [&](int n) {
    if (dag.period[n] == dag.terminal_period) {
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

// base, f1, f2 spaced one period apart.
Instance three_location_instance(int T, int phi, int gamma) {
  auto in = make_instance(T, {"b", "f1", "f2"}, {{0, 20, 30}, {20, 0, 10}, {30, 10, 0}}, phi, gamma);
  add_linear_fire(in, "f1", 1, 50, {1.5}, {10});
  add_linear_fire(in, "f2", 2, 50, {1.5}, {10});
  add_crew(in, "c", 0, {0, 1});
  return in;
}

}  // namespace

TEST_CASE("compact crew network node count") {
  auto in = three_location_instance(10, 10, 3);
  auto net = build_crew_network(0, in);
  CHECK(net.dag.num_nodes() == 61);
  net.dag.check_forward();
  for (int a = 0; a < net.dag.num_arcs(); ++a) {
    const auto& u = net.nodes[net.dag.tail[a]];
    if (net.kind[a] == CrewArcKind::kTravel || net.kind[a] == CrewArcKind::kWork)
      CHECK(!(u.period > in.rest_deadline(0) && u.rest == 0));
    if (net.kind[a] == CrewArcKind::kTravel)
      CHECK(net.nodes[net.dag.head[a]].period - u.period ==
            in.travel_periods(u.location, net.nodes[net.dag.head[a]].location));
    if (net.kind[a] == CrewArcKind::kRest) CHECK(net.nodes[net.dag.head[a]].period - u.period >= in.rest.gamma);
  }
}

TEST_CASE("compact network rejects T >= phi + gamma") {
  auto in = three_location_instance(10, 4, 3);
  CHECK_THROWS_AS(build_crew_network(0, in), InputError);
  CHECK(build_crew_network_extended(0, in).dag.num_nodes() == 151);
}

TEST_CASE("working after the rest deadline requires a completed rest") {
  // R_j = min(phi + r0, T) = 3 with phi = 4, r0 = -1, gamma = 3, T = 5.
  auto in = make_instance(5, {"b", "f"}, {{0, 0.5}, {0.5, 0}}, 4, 3);
  add_linear_fire(in, "f", 1, 50, {1.5}, {10});
  add_crew(in, "c", 0, {0}, -1);
  REQUIRE(in.rest_deadline(0) == 3);
  auto net = build_crew_network(0, in);
  int working_late = 0;
  for (const auto& path : all_paths(net.dag)) {
    bool rested = false;
    for (int a : path) {
      const auto& u = net.nodes[net.dag.tail[a]];
      if (net.kind[a] == CrewArcKind::kRest) rested = true;
      if (net.kind[a] == CrewArcKind::kWork && u.period >= 4) {
        ++working_late;
        CHECK(rested);
      }
    }
  }
  CHECK(working_late > 0);
}

TEST_CASE("base-only network has only wait and rest arcs") {
  auto in = make_instance(4, {"b"}, {{0}}, 4, 2);
  add_crew(in, "c", 0, {});
  auto net = build_crew_network(0, in);
  auto paths = all_paths(net.dag);
  CHECK(!paths.empty());
  for (const auto& p : paths)
    for (int a : p) CHECK((net.kind[a] == CrewArcKind::kWait || net.kind[a] == CrewArcKind::kRest));
}

TEST_CASE("extended network: single early rest leaves the counter in the violation region") {
  auto in = make_instance(8, {"b"}, {{0}}, 3, 2);
  in.network_mode = NetworkMode::kExtended;
  add_crew(in, "c", 0, {});
  auto net = build_crew_network_extended(0, in);
  CHECK(net.dag.num_nodes() == 1 + 1 * 8 * 4);
  REQUIRE(in.horizon - in.rest.gamma >= in.rest.phi);
  int checked = 0;
  for (const auto& p : all_paths(net.dag)) {
    int rests = 0;
    for (int a : p) rests += net.kind[a] == CrewArcKind::kRest;
    if (rests == 1 && net.kind[p.front()] == CrewArcKind::kRest &&
        net.nodes[net.dag.head[p.front()]].period == 1 + in.rest.gamma) {
      CHECK(net.nodes[net.dag.head[p.back()]].rest == in.rest.phi);
      ++checked;
    }
  }
  CHECK(checked == 1);
}

TEST_CASE("extended and compact networks admit the same work/travel patterns when T < phi + gamma") {
  auto in = make_instance(4, {"b", "f"}, {{0, 20}, {20, 0}}, 3, 2);
  add_linear_fire(in, "f", 1, 50, {1.5}, {10});
  add_crew(in, "c", 0, {0}, -1);
  add_crew(in, "d", 0, {0}, 0);
  for (int j = 0; j < 2; ++j) {
    auto pattern_set = [&](const CrewNetwork& net) {
      std::set<std::vector<std::array<int, 5>>> s;
      for (const auto& p : all_paths(net.dag)) {
        std::vector<std::array<int, 5>> pat;
        for (int a : p) {
          if (net.kind[a] != CrewArcKind::kTravel && net.kind[a] != CrewArcKind::kWork) continue;
          const auto& u = net.nodes[net.dag.tail[a]];
          const auto& v = net.nodes[net.dag.head[a]];
          pat.push_back({static_cast<int>(net.kind[a]), u.location, u.period, v.location, v.period});
        }
        s.insert(pat);
      }
      return s;
    };
    auto compact = pattern_set(build_crew_network(j, in));
    auto extended = pattern_set(build_crew_network_extended(j, in));
    CHECK(compact.size() > 1);
    CHECK(compact == extended);
  }
}

TEST_CASE("crew routes work at most one fire per period") {
  auto in = make_instance(4, {"b", "f"}, {{0, 10}, {10, 0}}, 4, 2);
  add_linear_fire(in, "f1", 1, 50, {1.5}, {10});
  add_linear_fire(in, "f2", 1, 60, {1.5}, {10});
  add_crew(in, "c", 0, {0, 1});
  auto net = build_crew_network(0, in);
  for (const auto& p : all_paths(net.dag)) {
    std::vector<int> per_period(in.horizon + 1, 0);
    for (int a : p)
      if (net.kind[a] == CrewArcKind::kWork) ++per_period[net.nodes[net.dag.tail[a]].period];
    for (int c : per_period) CHECK(c <= 1);
  }
}

TEST_CASE("fire network with ineffective suppression collapses to one transition per node") {
  FireSpec f;
  f.id = "f";
  LinearPerimeterModel m;
  m.initial_perimeter = 40;
  m.growth = {1.5};
  m.effectiveness = {0.0};
  f.model = m;
  f.initial.perimeter = 40;
  auto net = build_fire_network(f, 4, {0, 1, 2, 3});
  for (int n = 0; n < net.dag.num_nodes(); ++n) {
    int outs = net.dag.out_offset[n + 1] - net.dag.out_offset[n];
    CHECK(outs == (net.dag.period[n] <= 4 ? 1 : 0));
  }
  for (int x : net.label) CHECK(x == 0);
  CHECK(all_paths(net.dag).size() == 1);
}

TEST_CASE("fire network dominance keeps the smallest level") {
  // Two crews already extinguish the fire; three crews reach the same state.
  FireSpec f;
  f.id = "f";
  LinearPerimeterModel m;
  m.initial_perimeter = 20;
  m.growth = {1.5};
  m.effectiveness = {15.0};
  f.model = m;
  f.initial.perimeter = 20;
  auto net = build_fire_network(f, 1, {0, 1, 2, 3});
  std::set<int> heads;
  for (int a = 0; a < net.dag.num_arcs(); ++a) {
    CHECK(heads.insert(net.dag.head[a]).second);
    // the arc's label reproduces its head and no smaller level does
    auto tr = fire_transition(f, net.states[net.dag.tail[a]], net.label[a], 1);
    CHECK(tr.next.perimeter == net.states[net.dag.head[a]].perimeter);
    for (int x = 0; x < net.label[a]; ++x)
      CHECK(fire_transition(f, net.states[net.dag.tail[a]], x, 1).next.perimeter != tr.next.perimeter);
  }
  bool has_zero_state = false;
  for (int a = 0; a < net.dag.num_arcs(); ++a)
    if (net.states[net.dag.head[a]].perimeter == 0.0) {
      has_zero_state = true;
      CHECK(net.label[a] == 2);
    }
  CHECK(has_zero_state);
  // damage on the arc is the trapezoid of the snapped perimeters
  for (int a = 0; a < net.dag.num_arcs(); ++a)
    CHECK(net.damage[a] == doctest::Approx((net.states[net.dag.tail[a]].perimeter +
                                            net.states[net.dag.head[a]].perimeter) / 2.0));
  CHECK(net.states[net.dag.start].perimeter == 21.0);  // ceiling snap of 20
}

TEST_CASE("toy tabulated fire network matches hand enumeration") {
  // States: (100,0) start. Growth depends only on crews: 0 -> 15, 1 -> 5, 2 -> 0.
  // All reached values lie on the grid, so snapping is the identity here.
  std::vector<GrowthRow> rows;
  for (double a : {100.0, 115.0, 130.0})
    for (double mo : {0.0, 5.0, 15.0})
      for (int c : {0, 1, 2}) rows.push_back({a, mo, c, c == 0 ? 15.0 : (c == 1 ? 5.0 : 0.0)});
  FireSpec f;
  f.id = "t";
  f.model = TabulatedRef{"toy", std::make_shared<const TabulatedGrowthModel>(TabulatedGrowthModel::from_rows(rows))};
  f.initial.area = 100;
  auto net = build_fire_network(f, 2, {0, 1, 2});
  // period 1: (100,0) -> (115,15) x0, (105,5) x1, (100,0) x2
  // period 2: three arcs from each, nine distinct heads
  std::set<std::tuple<double, double, int, double, double, int, int>> arcs;
  for (int a = 0; a < net.dag.num_arcs(); ++a) {
    const auto& u = net.states[net.dag.tail[a]];
    const auto& v = net.states[net.dag.head[a]];
    arcs.insert({u.area, u.momentum, net.dag.period[net.dag.tail[a]], v.area, v.momentum,
                 net.dag.period[net.dag.head[a]], net.label[a]});
  }
  std::set<std::tuple<double, double, int, double, double, int, int>> expected;
  auto add_from = [&](double a, double m, int t) {
    expected.insert({a, m, t, a + 15, 15, t + 1, 0});
    expected.insert({a, m, t, a + 5, 5, t + 1, 1});
    expected.insert({a, m, t, a, 0, t + 1, 2});
  };
  add_from(100, 0, 1);
  add_from(115, 15, 2);
  add_from(105, 5, 2);
  add_from(100, 0, 2);
  CHECK(arcs == expected);
  CHECK(net.dag.num_nodes() == 1 + 3 + 9);
  for (int a : net.arcs_at[1]) CHECK(net.damage[a] == net.states[net.dag.head[a]].area);
  for (int a : net.arcs_at[0]) CHECK(net.damage[a] == 0.0);
}

TEST_CASE("fire network structural properties on generated fires") {
  auto in = generate_instance(5, 3, 3, 5);
  for (int g = 0; g < in.num_fires(); ++g) {
    auto net = build_fire_network(in.fires[g], in.horizon, supported_crew_levels(in.fires[g], 3), g);
    net.dag.check_forward();
    for (int a = 0; a < net.dag.num_arcs(); ++a)
      CHECK(net.dag.period[net.dag.head[a]] == net.dag.period[net.dag.tail[a]] + 1);
    // zero-crew path exists
    int n = net.dag.start;
    while (net.dag.period[n] <= in.horizon) {
      int next = -1;
      for (int k = net.dag.out_offset[n]; k < net.dag.out_offset[n + 1]; ++k)
        if (net.label[net.dag.out_arcs[k]] == 0) next = net.dag.head[net.dag.out_arcs[k]];
      REQUIRE(next >= 0);
      n = next;
    }
    CHECK(fire_network_csv(net).rfind("tail_state,tail_t,head_state,head_t,x_a,d_a\n", 0) == 0);
  }
}
