#include <cmath>

#include "doctest.h"
#include "fireline/oracle.hpp"
#include "fireline/search.hpp"
#include "helpers.hpp"

using namespace fireline;
using namespace fireline::testing;

namespace {

// One fire, one crew, T=1; two hand-made plans with demand 0 and 10 mixed 50/50.
struct ScoreFixture {
  Instance in;
  Problem pr;
  ColumnPool pool;
  RmpSolution sol;

  ScoreFixture() {
    in = make_instance(1, {"b", "f"}, {{0, 20}, {20, 0}}, 5, 2);
    add_linear_fire(in, "f", 1, 50, {1.5}, {10});
    add_crew(in, "c", 0, {0});
    pr = build_problem(in);
    pool.reset(1, 1);
    pool.add(FirePlan{0, {0}, {0}, 100.0});
    pool.add(FirePlan{0, {1}, {10}, 40.0});
    pool.add(CrewRoute{0, {0}, {-1}, 0.0});
    sol.y = {{0.5, 0.5}};
    sol.z = {{1.0}};
    sol.duals.rho = {2.0};
  }
};

SearchConfig quick_config() {
  SearchConfig cfg;
  cfg.time_limit = 60;
  cfg.heuristic_period = -1;
  return cfg;
}

}  // namespace

TEST_CASE("variance score of a 0/10 mix") {
  ScoreFixture f;
  auto mv = compute_branch_scores(f.pr, f.pool, f.sol, BranchRule::kMaxVariance);
  REQUIRE(mv.size() == 1);
  CHECK(mv[0].kind == BranchCandidate::kFire);
  CHECK(mv[0].mean == doctest::Approx(5.0));
  CHECK(mv[0].variance == doctest::Approx(25.0));
  CHECK(mv[0].score == doctest::Approx(25.0));

  auto dmv = compute_branch_scores(f.pr, f.pool, f.sol, BranchRule::kDualMaxVariance);
  CHECK(dmv[0].score == doctest::Approx(100.0));

  // Integral mean: MF has nothing fractional and falls back to variance.
  auto mf = compute_branch_scores(f.pr, f.pool, f.sol, BranchRule::kMostFractional);
  REQUIRE(mf.size() == 1);
  CHECK(mf[0].score == doctest::Approx(25.0));
}

TEST_CASE("children of an integral-mean candidate separate") {
  ScoreFixture f;
  auto c = compute_branch_scores(f.pr, f.pool, f.sol, BranchRule::kMaxVariance).front();
  auto [low, high] = make_children(BranchSet{}, c);
  CHECK(low.demand.at({0, 1}).hi == 5);
  CHECK(high.demand.at({0, 1}).lo == 6);
  CHECK(excludes_solution(f.pool, f.sol, low));
  CHECK(excludes_solution(f.pool, f.sol, high));
  CHECK_FALSE(excludes_solution(f.pool, f.sol, BranchSet{}));

  BranchCandidate flat = c;
  flat.variance = 0.0;
  CHECK_THROWS_AS(make_children(BranchSet{}, flat), Error);
}

TEST_CASE("crew candidates branch on fix 0 and fix 1") {
  ScoreFixture f;
  f.pool.add(CrewRoute{0, {1}, {0}, 0.0});
  f.sol.y = {{1.0, 0.0}};
  f.sol.z = {{0.7, 0.3}};
  auto c = compute_branch_scores(f.pr, f.pool, f.sol, BranchRule::kMaxVariance);
  REQUIRE(c.size() == 1);
  CHECK(c[0].kind == BranchCandidate::kCrew);
  CHECK(c[0].variance == doctest::Approx(0.21));
  auto [zero, one] = make_children(BranchSet{}, c[0]);
  CHECK(zero.assignment.at({0, 0, 1}) == false);
  CHECK(one.assignment.at({0, 0, 1}) == true);
  CHECK(excludes_solution(f.pool, f.sol, zero));
  CHECK(excludes_solution(f.pool, f.sol, one));
}

TEST_CASE("unstabilized CG trace is nonincreasing") {
  Problem pr = build_problem(generate_instance(5, 3, 3, 6));
  ColumnPool pool;
  pool.reset(pr.G, pr.J);
  CgOptions co;
  auto r = two_sided_column_generation(pr, pool, BranchSet{}, {}, co);
  REQUIRE_FALSE(r.infeasible);
  REQUIRE(r.trace.size() >= 2);
  for (std::size_t k = 1; k < r.trace.size(); ++k) CHECK(r.trace[k] <= r.trace[k - 1] + 1e-7);
  CHECK(std::isnan(r.stabilized_value));
}

TEST_CASE("stabilized CG polishes to the unstabilized value") {
  Problem pr = build_problem(generate_instance(7, 3, 2, 5));
  ColumnPool a, b;
  a.reset(pr.G, pr.J);
  b.reset(pr.G, pr.J);
  CgOptions plain, stab;
  stab.stabilize = true;
  auto ra = two_sided_column_generation(pr, a, BranchSet{}, {}, plain);
  auto rb = two_sided_column_generation(pr, b, BranchSet{}, {}, stab);
  REQUIRE_FALSE(std::isnan(rb.stabilized_value));
  CHECK(rb.stabilized_value <= ra.rmp.objective + 1e-6);
  CHECK(rb.rmp.objective == doctest::Approx(ra.rmp.objective).epsilon(1e-9));
}

TEST_CASE("search matches the oracle on tiny instances") {
  auto suite = tiny_suite(8);
  int k = 0;
  for (const auto& in : suite) {
    Problem pr = build_problem(in);
    auto opt = brute_force_optimum(pr);
    REQUIRE(opt.feasible);
    for (BranchRule rule : {BranchRule::kMostFractional, BranchRule::kMaxVariance, BranchRule::kDualMaxVariance})
      for (CutMode mode : {CutMode::kNone, CutMode::kGub, CutMode::kStrengthenedGub, CutMode::kAugmentedGub}) {
        if ((k++ % 3) != 0 && mode != CutMode::kAugmentedGub) continue;
        SearchConfig cfg = quick_config();
        cfg.branch_rule = rule;
        cfg.cut_mode = mode;
        auto r = branch_price_and_cut(pr, cfg);
        CAPTURE(branch_rule_name(rule));
        CAPTURE(cut_mode_name(mode));
        REQUIRE(r.optimal);
        CHECK(r.upper_bound == doctest::Approx(opt.cost).epsilon(1e-9));
        CHECK(r.lower_bound == doctest::Approx(r.upper_bound));
        CHECK(r.root_lp <= opt.cost + 1e-6);
        CHECK(r.root_lp_no_cuts <= r.root_lp + 1e-6);
        CHECK(r.stats.separation_failures == 0);
        double cost = 0.0;
        for (const auto& p : r.plans) cost += p.cost;
        for (const auto& q : r.routes) cost += q.cost;
        CHECK(cost == doctest::Approx(r.upper_bound));
      }
  }
}

TEST_CASE("ineffective crews give the do-nothing optimum at the root") {
  Instance in = generate_instance(9, 3, 2, 5);
  double unsuppressed = 0.0;
  for (auto& f : in.fires) {
    auto& m = std::get<LinearPerimeterModel>(f.model);
    std::fill(m.effectiveness.begin(), m.effectiveness.end(), 0.0);
  }
  Problem pr = build_problem(in);
  for (int g = 0; g < pr.G; ++g) unsuppressed += enumerate_fire_plans(pr, g).front().cost;
  auto r = branch_price_and_cut(pr, quick_config());
  REQUIRE(r.optimal);
  CHECK(r.stats.branches == 0);
  CHECK(r.upper_bound == doctest::Approx(unsuppressed));
  for (const auto& p : r.plans) CHECK(p.demand == std::vector<int>(pr.T, 0));
}

TEST_CASE("search is deterministic") {
  Problem pr = build_problem(generate_instance(21, 3, 3, 5));
  SearchConfig cfg = quick_config();
  cfg.heuristic_period = 1e9;  // root call only
  auto a = branch_price_and_cut(pr, cfg);
  auto b = branch_price_and_cut(pr, cfg);
  CHECK(solution_to_json(pr, a, cfg).dump() == solution_to_json(pr, b, cfg).dump());
  CHECK(search_log_csv(a) == search_log_csv(b));
  CHECK(solution_to_json(pr, a, cfg).count("wall_time") == 0);
  CHECK(solution_to_json(pr, a, cfg, true).count("wall_time") == 1);
}

TEST_CASE("root-only search brackets the optimum") {
  auto suite = tiny_suite(4, 50);
  for (const auto& in : suite) {
    Problem pr = build_problem(in);
    auto opt = brute_force_optimum(pr);
    SearchConfig cfg = quick_config();
    cfg.node_limit = 1;
    cfg.heuristic_period = 0;
    auto r = branch_price_and_cut(pr, cfg);
    CHECK(r.stats.nodes_processed == 1);
    CHECK(r.lower_bound <= opt.cost + 1e-6);
    if (r.has_incumbent) CHECK(r.upper_bound >= opt.cost - 1e-6);
    CHECK(r.gap >= 0.0);
  }
}

TEST_CASE("demand heuristic returns feasible integer solutions") {
  auto suite = tiny_suite(4, 80);
  for (const auto& in : suite) {
    Problem pr = build_problem(in);
    auto opt = brute_force_optimum(pr);
    ColumnPool pool;
    pool.reset(pr.G, pr.J);
    auto cg = two_sided_column_generation(pr, pool, BranchSet{}, {}, CgOptions{});
    REQUIRE_FALSE(cg.infeasible);
    HeuristicOptions ho;
    ho.budget = 10;
    auto h = fire_demand_heuristic(pr, pool, BranchSet{}, {}, cg.rmp, ho);
    CHECK(h.rounds >= 1);
    if (h.best) CHECK(h.best->cost >= opt.cost - 1e-6);
  }
}

TEST_CASE("zero time limit stops cleanly") {
  Problem pr = build_problem(generate_instance(3, 2, 2, 4));
  SearchConfig cfg = quick_config();
  cfg.time_limit = 0;
  auto r = branch_price_and_cut(pr, cfg);
  CHECK(r.timed_out);
  CHECK_FALSE(r.optimal);
}

TEST_CASE("solution file lists trajectories and routes") {
  Problem pr = build_problem(tiny_suite(1).front());
  SearchConfig cfg = quick_config();
  auto r = branch_price_and_cut(pr, cfg);
  REQUIRE(r.optimal);
  Json doc = solution_to_json(pr, r, cfg);
  CHECK(doc["status"] == "optimal");
  REQUIRE(doc["fires"].size() == static_cast<std::size_t>(pr.G));
  for (const auto& f : doc["fires"]) CHECK(f["trajectory"].size() == static_cast<std::size_t>(pr.T + 1));
  REQUIRE(doc["crews"].size() == static_cast<std::size_t>(pr.J));
  for (const auto& c : doc["crews"]) CHECK(c["work"].size() == static_cast<std::size_t>(pr.T));
  std::string csv = search_log_csv(r);
  CHECK(csv.rfind("node_id,parent,depth,lp_value,n_columns,n_cuts,action,UB,LB,wall_time\n", 0) == 0);
}

TEST_CASE("branch rule and stabilize names round-trip") {
  for (auto r : {BranchRule::kMostFractional, BranchRule::kMaxVariance, BranchRule::kDualMaxVariance})
    CHECK(parse_branch_rule(branch_rule_name(r)) == r);
  for (auto s : {StabilizeMode::kOff, StabilizeMode::kOn, StabilizeMode::kAuto})
    CHECK(parse_stabilize_mode(stabilize_mode_name(s)) == s);
  CHECK_THROWS_AS(parse_branch_rule("best"), InputError);
}
