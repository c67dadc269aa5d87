#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "fireline/common.hpp"
#include "fireline/io.hpp"
#include "fireline/model.hpp"
#include "helpers.hpp"

using namespace fireline;
using namespace fireline::testing;

namespace {

LinearPerimeterModel linear(double P, std::vector<double> R, std::vector<double> E) {
  LinearPerimeterModel m;
  m.initial_perimeter = P;
  m.growth = std::move(R);
  m.effectiveness = std::move(E);
  return m;
}

TabulatedGrowthModel toy_table() {
  std::vector<GrowthRow> rows;
  for (double a : {100.0, 200.0})
    for (double m : {0.0, 50.0})
      for (int c : {0, 1, 2}) rows.push_back({a, m, c, std::max(0.0, 80.0 - 40.0 * c + (a - 100.0) / 10.0)});
  return TabulatedGrowthModel::from_rows(rows);
}

}  // namespace

TEST_CASE("area grid has the three step regimes") {
  auto g = make_area_grid();
  CHECK(g.size() == 51031);
  int below100 = 0;
  for (double v : g) below100 += v < 100.0;
  CHECK(below100 == 50);
  for (std::size_t i = 1; i < g.size(); ++i) REQUIRE(g[i] > g[i - 1]);
  CHECK(g.front() == 1.0);
  CHECK(g.back() == 500000.0);
}

TEST_CASE("ceiling snap") {
  CHECK(snap_to_grid(0.0).value == 0.0);
  CHECK(snap_to_grid(-3.0).value == 0.0);
  CHECK(snap_to_grid(0.5).value == 1.0);
  CHECK(snap_to_grid(2.0).value == 3.0);
  CHECK(snap_to_grid(100.0).value == 100.0);
  CHECK(snap_to_grid(101.0).value == 105.0);
  CHECK(snap_to_grid(10001.0).value == 10010.0);
  auto top = snap_to_grid(600000.0);
  CHECK(top.value == 500000.0);
  CHECK(top.clamped);
}

TEST_CASE("linear perimeter step examples") {
  auto m = linear(100, {2.0}, {10.0});
  auto a = linear_perimeter_step({100, 0}, 0, 1, m);
  CHECK(a.perimeter == doctest::Approx(200));
  CHECK(a.area == doctest::Approx(150));
  auto b = linear_perimeter_step({100, 0}, 5, 1, m);
  CHECK(b.perimeter == doctest::Approx(125));
  CHECK(b.area == doctest::Approx(112.5));
  auto c = linear_perimeter_step({10, 50}, 100, 1, m);
  CHECK(c.perimeter == 0.0);
  CHECK(c.area == doctest::Approx(55));
}

TEST_CASE("zero suppression composes to the product of growth ratios") {
  auto m = linear(37.0, {1.3, 1.7, 1.1, 2.0, 1.45}, {12.0});
  PerimeterArea s{37.0, 0.0};
  double p = 37.0, a = 0.0;
  for (int t = 1; t <= 5; ++t) {
    s = linear_perimeter_step(s, 0, t, m);
    double next = p * m.growth_at(t);
    a += (p + next) / 2.0;
    p = next;
  }
  double prod = 37.0 * 1.3 * 1.7 * 1.1 * 2.0 * 1.45;
  CHECK(s.perimeter == doctest::Approx(prod).epsilon(1e-12));
  CHECK(s.area == doctest::Approx(a).epsilon(1e-12));
}

TEST_CASE("tabulated step lookup and errors") {
  auto table = toy_table();
  auto s = tabulated_growth_step({100, 50}, 0, table);
  CHECK(s.area == 180.0);
  CHECK(s.momentum == 80.0);
  auto z = tabulated_growth_step({100, 50}, 2, table);
  CHECK(z.area == 100.0);
  CHECK(z.momentum == 0.0);
  // nearest grid, ties to the lower axis value
  CHECK(table.growth(150.0, 25.0, 0) == 80.0);
  CHECK(table.growth(151.0, 0.0, 0) == 90.0);
  CHECK_THROWS_WITH_AS(table.growth(100, 0, 3), "unsupported allocation level", InputError);
  CHECK_THROWS_AS(table.growth(100, 0, -1), InputError);
}

TEST_CASE("tabulated monotonicity fuzz over the table grid") {
  auto table = toy_table();
  for (double a = 50; a <= 300; a += 7)
    for (double m = 0; m <= 80; m += 3)
      for (int x1 = 0; x1 <= 2; ++x1)
        for (int x2 = x1 + 1; x2 <= 2; ++x2)
          CHECK(tabulated_growth_step({a, m}, x1, table).area >= tabulated_growth_step({a, m}, x2, table).area);
}

TEST_CASE("tabulated load rejects non-monotone or incomplete tables") {
  std::vector<GrowthRow> rows{{1, 0, 0, 5}, {1, 0, 1, 6}};
  CHECK_THROWS_AS(TabulatedGrowthModel::from_rows(rows), InputError);
  std::vector<GrowthRow> holes{{1, 0, 0, 5}, {1, 0, 1, 4}, {2, 0, 0, 5}};
  CHECK_THROWS_AS(TabulatedGrowthModel::from_rows(holes), InputError);
  auto dir = std::filesystem::temp_directory_path() / "fireline_test_table.csv";
  {
    std::ofstream out(dir);
    out << "area,momentum,crews,growth\n100,50,0,80\n100,50,1,30\n";
  }
  auto t = TabulatedGrowthModel::load_csv(dir.string());
  CHECK(t.growth(100, 50, 1) == 30.0);
  std::filesystem::remove(dir);
}

TEST_CASE("validate_instance") {
  auto in = make_instance(5, {"b", "f"}, {{0, 20}, {20, 0}}, 4, 2);
  add_crew(in, "c0", 0, {0});
  add_crew(in, "c1", 0, {0});
  add_linear_fire(in, "f", 1, 50, {1.5}, {10});
  CHECK(validate_instance(in).empty());

  auto bad = in;
  bad.rest.phi = 3;
  bad.network_mode = NetworkMode::kCompact;
  auto v = validate_instance(bad);
  REQUIRE(v.size() == 1);
  CHECK(v[0].field == "rest");
  CHECK(v[0].rule.find("Assumption 1 violated") != std::string::npos);

  auto neg = in;
  neg.travel_hours[0][1] = -1;
  v = validate_instance(neg);
  REQUIRE(v.size() == 1);
  CHECK(v[0].rule == "negative travel time");

  auto start = in;
  start.crews[0].start = 1;
  start.crews[0].jurisdiction.clear();
  CHECK(!validate_instance(start).empty());
}

TEST_CASE("generator contract and determinism") {
  auto a = generate_instance(1, 2, 1, 5);
  CHECK(validate_instance(a).empty());
  auto b = generate_instance(1, 2, 1, 5);
  CHECK(instance_to_json(a).dump() == instance_to_json(b).dump());
  auto c = generate_instance(2, 2, 1, 5);
  CHECK(instance_to_json(a).dump() != instance_to_json(c).dump());
  auto big = generate_instance(7, 10, 3, 14);
  CHECK(big.num_crews() == 10);
  CHECK(big.num_fires() == 3);
  CHECK(validate_instance(big).empty());
  CHECK(big.uses_compact_network());
  CHECK_THROWS_AS(generate_instance(1, 0, 1, 5), InputError);
}

TEST_CASE("instance json round trip") {
  auto a = generate_instance(11, 3, 2, 6);
  auto doc = instance_to_json(a);
  auto b = instance_from_json(doc);
  CHECK(instance_to_json(b).dump() == doc.dump());
  for (int i = 0; i < static_cast<int>(a.locations.size()); ++i)
    for (int k = 0; k < static_cast<int>(a.locations.size()); ++k)
      CHECK(a.travel_periods(i, k) == b.travel_periods(i, k));
}
