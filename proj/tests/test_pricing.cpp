#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"
#include "fireline/pricing.hpp"
#include "helpers.hpp"

using namespace fireline;
using namespace fireline::testing;

namespace {

// Exhaustive minimum over start->terminal paths, honoring the mask.
double brute_shortest(const Dag& dag, const std::vector<double>& cost, const std::vector<char>& mask, bool* found) {
  double best = INFINITY;
  std::function<void(int, double)> dfs = [&](int n, double acc) {
    if (dag.period[n] == dag.terminal_period) {
      best = std::min(best, acc);
      return;
    }
    for (int k = dag.out_offset[n]; k < dag.out_offset[n + 1]; ++k) {
      int a = dag.out_arcs[k];
      if (!mask.empty() && !mask[a]) continue;
      dfs(dag.head[a], acc + cost[a]);
    }
  };
  dfs(dag.start, 0.0);
  *found = std::isfinite(best);
  return best;
}

Dag random_layered_dag(std::mt19937_64& rng, int layers, int width) {
  Dag dag;
  dag.start = dag.add_node(1);
  std::vector<int> prev{dag.start};
  std::uniform_int_distribution<int> w(1, width);
  for (int t = 2; t <= layers; ++t) {
    std::vector<int> cur;
    int n = t == layers ? std::max(1, w(rng) / 2) : w(rng);
    for (int i = 0; i < n; ++i) cur.push_back(dag.add_node(t));
    for (int u : prev)
      for (int v : cur)
        if (std::uniform_real_distribution<double>(0, 1)(rng) < 0.6) dag.add_arc(u, v);
    // Occasional arcs that skip a layer.
    if (t >= 3)
      for (int v : cur)
        if (std::uniform_real_distribution<double>(0, 1)(rng) < 0.3) dag.add_arc(dag.start, v);
    prev = cur;
  }
  dag.terminal_period = layers;
  dag.finalize();
  return dag;
}

double path_cost(const std::vector<double>& cost, const std::vector<int>& arcs) {
  double s = 0.0;
  for (int a : arcs) s += cost[a];
  return s;
}

bool is_path(const Dag& dag, const std::vector<int>& arcs) {
  int n = dag.start;
  for (int a : arcs) {
    if (dag.tail[a] != n) return false;
    n = dag.head[a];
  }
  return dag.period[n] == dag.terminal_period;
}

DualSolution zero_duals(const Problem& pr) {
  DualSolution d;
  d.sigma.assign(pr.G, 0.0);
  d.pi.assign(pr.J, 0.0);
  d.rho.assign(pr.G * pr.T, 0.0);
  return d;
}

}  // namespace

TEST_CASE("shortest path on a three node dag") {
  Dag dag;
  int a = dag.add_node(1), b = dag.add_node(2), c = dag.add_node(3);
  dag.add_arc(a, b);
  dag.add_arc(b, c);
  dag.add_arc(a, c);
  dag.start = a;
  dag.terminal_period = 3;
  dag.finalize();
  std::vector<double> cost{2, 3, 6};
  auto p = topological_shortest_path(dag, cost);
  REQUIRE(p);
  CHECK(p->cost == doctest::Approx(5.0));
  CHECK(p->arcs == std::vector<int>{0, 1});

  std::vector<char> mask{1, 0, 1};
  p = topological_shortest_path(dag, cost, mask);
  REQUIRE(p);
  CHECK(p->arcs == std::vector<int>{2});
  mask = {1, 0, 0};
  CHECK_FALSE(topological_shortest_path(dag, cost, mask));
}

TEST_CASE("zero costs give a deterministic path") {
  std::mt19937_64 rng(3);
  Dag dag = random_layered_dag(rng, 5, 4);
  std::vector<double> cost(dag.num_arcs(), 0.0);
  auto p1 = topological_shortest_path(dag, cost);
  auto p2 = topological_shortest_path(dag, cost);
  if (p1) {
    REQUIRE(p2);
    CHECK(p1->arcs == p2->arcs);
    CHECK(p1->cost == 0.0);
  }
}

TEST_CASE("shortest path matches enumeration on random dags") {
  std::mt19937_64 rng(20240601);
  int checked = 0;
  for (int trial = 0; trial < 150; ++trial) {
    Dag dag = random_layered_dag(rng, 4 + trial % 4, 5);
    std::vector<double> cost(dag.num_arcs());
    std::uniform_real_distribution<double> c(-5.0, 10.0);
    for (auto& x : cost) x = std::round(c(rng) * 100) / 100;
    std::vector<char> mask;
    if (trial % 3 == 0) {
      mask.assign(dag.num_arcs(), 1);
      for (auto& m : mask) m = std::uniform_real_distribution<double>(0, 1)(rng) < 0.8;
    }
    bool found = false;
    double expect = brute_shortest(dag, cost, mask, &found);
    auto got = topological_shortest_path(dag, cost, mask);
    REQUIRE(found == got.has_value());
    if (!found) continue;
    ++checked;
    CHECK(got->cost == doctest::Approx(expect).epsilon(1e-12));
    CHECK(is_path(dag, got->arcs));
    CHECK(path_cost(cost, got->arcs) == doctest::Approx(got->cost).epsilon(1e-12));
    for (int a : got->arcs) CHECK((mask.empty() || mask[a]));
  }
  CHECK(checked >= 100);
}

TEST_CASE("fire pricing without duals minimizes damage") {
  Instance in = generate_instance(5, 3, 2, 4);
  Problem pr = build_problem(in);
  DualSolution d = zero_duals(pr);
  for (int g = 0; g < pr.G; ++g) {
    auto res = price_fire(pr, g, d, {}, {});
    REQUIRE(res.feasible);
    bool found = false;
    double expect = brute_shortest(pr.fires[g].dag, pr.fires[g].damage, {}, &found);
    CHECK(res.reduced_cost == doctest::Approx(expect).epsilon(1e-12));
    CHECK(res.plan.cost == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("huge linking prices return the zero crew plan") {
  Instance in = generate_instance(6, 3, 2, 4);
  Problem pr = build_problem(in);
  DualSolution d = zero_duals(pr);
  for (auto& r : d.rho) r = 1e7;
  for (int g = 0; g < pr.G; ++g) {
    auto res = price_fire(pr, g, d, {}, {});
    REQUIRE(res.feasible);
    for (int b : res.plan.demand) CHECK(b == 0);
  }
}

TEST_CASE("crew pricing with zero duals stays at base") {
  Instance in = generate_instance(8, 2, 2, 5);
  Problem pr = build_problem(in);
  DualSolution d = zero_duals(pr);
  for (int j = 0; j < pr.J; ++j) {
    auto res = price_crew(pr, j, d, {}, {});
    REQUIRE(res.feasible);
    CHECK(res.reduced_cost == 0.0);
    for (int w : res.route.work) CHECK(w == -1);
  }
}

TEST_CASE("crew pricing works every reachable period") {
  const int T = 4;
  auto in = make_instance(T, {"b", "f"}, {{0, 20}, {20, 0}}, 5, 2);
  add_linear_fire(in, "f", 1, 50, {1.5}, {10});
  add_crew(in, "c", 0, {0});
  Problem pr = build_problem(in);
  DualSolution d = zero_duals(pr);
  for (auto& r : d.rho) r = 1.0;
  auto res = price_crew(pr, 0, d, {}, {});
  REQUIRE(res.feasible);
  CHECK(res.reduced_cost == doctest::Approx(-(T - 1)));
  CHECK(res.route.work == std::vector<int>{-1, 0, 0, 0});
}

TEST_CASE("assignment fixed outside the jurisdiction is infeasible") {
  auto in = make_instance(3, {"b", "f1", "f2"}, {{0, 20, 20}, {20, 0, 20}, {20, 20, 0}}, 5, 2);
  add_linear_fire(in, "f1", 1, 50, {1.5}, {10});
  add_linear_fire(in, "f2", 2, 50, {1.5}, {10});
  add_crew(in, "c", 0, {0});
  Problem pr = build_problem(in);
  BranchSet br;
  br.fix_assignment(0, 1, 2, true);
  auto res = price_crew(pr, 0, zero_duals(pr), {}, br);
  CHECK_FALSE(res.feasible);
  // Work at t = 1 is unreachable from base for the in-jurisdiction fire too.
  BranchSet early;
  early.fix_assignment(0, 0, 1, true);
  CHECK_FALSE(price_crew(pr, 0, zero_duals(pr), {}, early).feasible);
}

TEST_CASE("reduced costs match recomputation from signatures") {
  std::mt19937_64 rng(99);
  int checks = 0;
  for (int trial = 0; trial < 12; ++trial) {
    Instance in = generate_instance(100 + trial, 2 + trial % 2, 1 + trial % 3, 4);
    Problem pr = build_problem(in);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    DualSolution d;
    for (int g = 0; g < pr.G; ++g) d.sigma.push_back(u(rng) * 20);
    for (int j = 0; j < pr.J; ++j) d.pi.push_back(u(rng) - 25);
    for (int k = 0; k < pr.G * pr.T; ++k) d.rho.push_back(trial % 2 ? u(rng) : std::floor(u(rng) / 10));
    std::vector<RobustCut> cuts;
    std::vector<int> all_fires, all_crews;
    for (int g = 0; g < pr.G; ++g) all_fires.push_back(g);
    for (int j = 0; j < pr.J; ++j) all_crews.push_back(j);
    std::vector<int> targets(pr.G, 1);
    cuts.push_back(make_gub_cut(1 + trial % pr.T, all_fires, targets, all_crews, pr.J));
    cuts.push_back(make_gub_cut(pr.T, {0}, {pr.J}, {}, pr.J));
    for (auto& c : cuts) {
      (void)c;
      d.alpha.push_back(u(rng) / 5);
    }
    BranchSet br;
    if (trial % 3 == 1) br.restrict_demand(0, 2, 0, 1);
    if (trial % 3 == 2) br.fix_assignment(0, 0, 3, trial % 2 == 0);
    for (int g = 0; g < pr.G; ++g) {
      auto res = price_fire(pr, g, d, cuts, br);
      if (!res.feasible) continue;
      CHECK(std::fabs(res.reduced_cost - fire_reduced_cost(pr, res.plan, d, cuts)) <= 1e-9);
      CHECK(br.admits(res.plan));
      ++checks;
    }
    for (int j = 0; j < pr.J; ++j) {
      auto res = price_crew(pr, j, d, cuts, br);
      if (!res.feasible) continue;
      CHECK(std::fabs(res.reduced_cost - crew_reduced_cost(pr, res.route, d, cuts)) <= 1e-9);
      CHECK(br.admits(res.route));
      ++checks;
    }
  }
  CHECK(checks > 20);
}
