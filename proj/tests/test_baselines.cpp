#include <cmath>

#include "doctest.h"
#include "fireline/baselines.hpp"
#include "fireline/oracle.hpp"
#include "fireline/search.hpp"
#include "helpers.hpp"

using namespace fireline;
using namespace fireline::testing;

namespace {

// Damage of the all-zero path in the fire network.
double network_do_nothing(const Problem& pr, int g) {
  const FireNetwork& net = pr.fires[g];
  int v = net.dag.start;
  double total = 0.0;
  while (net.dag.period[v] != net.dag.terminal_period) {
    int next = -1;
    for (int k = net.dag.out_offset[v]; k < net.dag.out_offset[v + 1]; ++k) {
      int a = net.dag.out_arcs[k];
      if (net.label[a] == 0) next = a;
    }
    REQUIRE(next >= 0);
    total += net.damage[next];
    v = net.dag.head[next];
  }
  return total;
}

Instance one_crew_one_fire(std::vector<double> E) {
  auto in = make_instance(3, {"b", "f"}, {{0, 20}, {20, 0}}, 5, 2);
  add_linear_fire(in, "f", 1, 50, {1.5}, std::move(E));
  add_crew(in, "c", 0, {0});
  return in;
}

}  // namespace

TEST_CASE("area score scales with burned area") {
  Rng rng(1);
  TransitionCandidate big, small;
  big.current.area = 1000;
  small.current.area = 100;
  double a = score_transition(Policy::kArea, big, 2, 1.5, rng);
  double b = score_transition(Policy::kArea, small, 2, 1.5, rng);
  CHECK(a == doctest::Approx(10 * b));
  CHECK(a == doctest::Approx(1000 / 2.0 / 1.5));
  CHECK_THROWS_AS(score_transition(Policy::kArea, big, 0, 1.0, rng), Error);
}

TEST_CASE("impact score on a linear toy matches two steps by hand") {
  Instance in = one_crew_one_fire({10});
  const auto& m = std::get<LinearPerimeterModel>(in.fires[0].model);
  double p = snap_to_grid(50).value;
  // Area after one period with 0 and 2 crews, each on the snapped perimeter.
  PerimeterArea zero = linear_perimeter_step({p, 0.0}, 0, 1, m);
  PerimeterArea supp = linear_perimeter_step({p, 0.0}, 2, 1, m);
  double a_zero = (p + snap_to_grid(zero.perimeter).value) / 2;
  double a_supp = (p + snap_to_grid(supp.perimeter).value) / 2;
  REQUIRE(a_zero > a_supp);

  TransitionCandidate c;
  c.current = initial_fire_state(in.fires[0]);
  c.zero_next = fire_transition(in.fires[0], c.current, 0, 1).next;
  c.next = fire_transition(in.fires[0], c.current, 2, 1).next;
  Rng rng(3);
  CHECK(score_transition(Policy::kImpact, c, 2, 3.0, rng) == doctest::Approx((a_zero - a_supp) / 2 / 3.0));
  CHECK(score_transition(Policy::kDistance, c, 2, 3.0, rng) == doctest::Approx(1.0 / 3.0 / 2 / 3.0));
  double r = score_transition(Policy::kRandom, c, 1, 1.0, rng);
  CHECK(r > 0.0);
  CHECK(r <= 1.0);
}

TEST_CASE("zero-crew rollout equals the do-nothing evaluation") {
  for (std::uint64_t seed : {1, 2, 3, 4}) {
    Problem pr = build_problem(generate_instance(seed, 3, 3, 6));
    auto sim = simulate_policy(pr, Policy::kNone);
    double expected = 0.0;
    for (int g = 0; g < pr.G; ++g) expected += network_do_nothing(pr, g);
    CHECK(sim.total_burned == expected);
    CHECK(do_nothing_burned(pr) == expected);
    CHECK(sim.log.empty());
  }
}

TEST_CASE("ineffective crews are never dispatched") {
  Instance in = generate_instance(5, 3, 2, 5);
  for (auto& f : in.fires) {
    auto& m = std::get<LinearPerimeterModel>(f.model);
    std::fill(m.effectiveness.begin(), m.effectiveness.end(), 0.0);
  }
  Problem pr = build_problem(in);
  for (Policy p : {Policy::kRandom, Policy::kDistance, Policy::kArea, Policy::kImpact}) {
    auto sim = simulate_policy(pr, p, 7);
    CHECK(sim.log.empty());
    CHECK(sim.total_burned == do_nothing_burned(pr));
  }
  auto rows = evaluate_all(pr, do_nothing_burned(pr), {1, 2});
  for (const auto& r : rows) CHECK_FALSE(r.multiplier.has_value());
  std::string csv = summary_csv(rows);
  CHECK(csv.find(",—\n") != std::string::npos);
}

TEST_CASE("single crew is dispatched at the first period") {
  Problem pr = build_problem(one_crew_one_fire({10}));
  auto sim = simulate_policy(pr, Policy::kImpact);
  REQUIRE_FALSE(sim.log.empty());
  CHECK(sim.log.front().action == "dispatch");
  CHECK(sim.log.front().period == 1);
  CHECK(sim.log.front().fire == 0);
  // Travel takes the first period; the crew works from t = 2 on.
  CHECK(sim.crews_at[0] == std::vector<int>{0, 1, 1});
  CHECK(sim.total_burned < do_nothing_burned(pr));
}

TEST_CASE("rollouts follow the solver's dynamics and crew networks") {
  for (std::uint64_t seed : {11, 12, 13}) {
    Problem pr = build_problem(generate_instance(seed, 4, 3, 6));
    for (Policy p : {Policy::kRandom, Policy::kDistance, Policy::kArea, Policy::kImpact}) {
      auto sim = simulate_policy(pr, p, seed);
      for (int g = 0; g < pr.G; ++g) {
        FirePlan plan{g, {}, sim.crews_at[g], 0.0};
        CHECK(plan_trajectory(pr, plan) == sim.trajectory[g]);
        CHECK(evaluate_demand(pr, g, sim.crews_at[g]) == sim.burned[g]);
        // The trajectory is a path of the fire network whose labels fit the crews.
        const FireNetwork& net = pr.fires[g];
        int v = net.dag.start;
        double damage = 0.0;
        for (int t = 1; t <= pr.T; ++t) {
          int next = -1;
          for (int k = net.dag.out_offset[v]; k < net.dag.out_offset[v + 1]; ++k) {
            int a = net.dag.out_arcs[k];
            const FireState& s = net.states[net.dag.head[a]];
            bool same = net.linear ? s.perimeter == sim.trajectory[g][t].perimeter
                                   : s.area == sim.trajectory[g][t].area && s.momentum == sim.trajectory[g][t].momentum;
            if (same && net.label[a] <= sim.crews_at[g][t - 1]) next = a;
          }
          REQUIRE(next >= 0);
          damage += net.damage[next];
          v = net.dag.head[next];
        }
        CHECK(damage == doctest::Approx(sim.burned[g]).epsilon(1e-12));
      }
      for (int j = 0; j < pr.J; ++j) {
        const CrewNetwork& net = pr.crews[j];
        int v = net.dag.start;
        for (int a : sim.crew_arcs[j]) {
          CHECK(net.dag.tail[a] == v);
          v = net.dag.head[a];
        }
        CHECK(net.dag.period[v] == net.dag.terminal_period);
      }
    }
  }
}

TEST_CASE("dispatched crews are not reassigned before they work") {
  Problem pr = build_problem(generate_instance(17, 5, 3, 7));
  auto sim = simulate_policy(pr, Policy::kDistance);
  std::vector<int> routed(pr.J, -1);
  for (const auto& e : sim.log) {
    if (e.action == "dispatch") {
      CHECK(routed[e.crew] == -1);
      routed[e.crew] = e.fire;
    } else if (routed[e.crew] == e.fire) {
      routed[e.crew] = -1;
    }
  }
}

TEST_CASE("random policy is reproducible") {
  Problem pr = build_problem(generate_instance(8, 4, 3, 6));
  auto a = simulate_policy(pr, Policy::kRandom, 99);
  auto b = simulate_policy(pr, Policy::kRandom, 99);
  CHECK(a.crew_arcs == b.crew_arcs);
  CHECK(a.total_burned == b.total_burned);
  Rng r1(5), r2(5);
  for (int k = 0; k < 100; ++k) CHECK(uniform_draw(r1) == uniform_draw(r2));
}

TEST_CASE("summary arithmetic") {
  auto rows = summary_rows(1000, 800, {{"area", 900}, {"distance", 1000}});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].method == "optimization");
  CHECK(rows[0].acres_saved == doctest::Approx(200));
  CHECK(rows[0].pct_saved == doctest::Approx(20));
  CHECK_FALSE(rows[0].multiplier.has_value());
  CHECK(rows[1].acres_saved == doctest::Approx(100));
  CHECK(*rows[1].multiplier == doctest::Approx(2.0));
  CHECK_FALSE(rows[2].multiplier.has_value());
  CHECK(summary_csv(rows) ==
        "method,acres_saved,pct_saved,multiplier\n"
        "optimization,200.0000,20.0000,—\n"
        "area,100.0000,10.0000,2.0000\n"
        "distance,0.0000,0.0000,—\n");
}

TEST_CASE("optimization dominates every baseline") {
  for (std::uint64_t seed : {2, 4}) {
    Problem pr = build_problem(generate_instance(seed, 4, 2, 5));
    SearchConfig cfg;
    cfg.time_limit = 60;
    auto r = branch_price_and_cut(pr, cfg);
    REQUIRE(r.optimal);
    double burned = 0.0;
    for (const auto& p : r.plans) burned += p.cost;
    auto rows = evaluate_all(pr, burned, {1, 2, 3}, 2);
    for (std::size_t k = 1; k < rows.size(); ++k) {
      CAPTURE(rows[k].method);
      CHECK(burned <= rows[k].burned + 1e-9);
      if (rows[k].multiplier) CHECK(*rows[k].multiplier >= 1.0 - 1e-12);
    }
  }
}
