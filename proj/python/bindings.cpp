#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fireline/baselines.hpp"
#include "fireline/io.hpp"
#include "fireline/oracle.hpp"
#include "fireline/search.hpp"

namespace py = pybind11;
using namespace fireline;

namespace {

Instance parse_instance(const std::string& text, const std::string& base_dir) {
  Instance in = instance_from_json(Json::parse(text), base_dir);
  auto bad = validate_instance(in);
  if (!bad.empty()) throw InputError(bad.front().field + ": " + bad.front().rule);
  return in;
}

std::string generate(std::uint64_t seed, int crews, int fires, int horizon) {
  if (crews < 1 || fires < 1 || horizon < 1) throw InputError("crews, fires and horizon must be positive");
  return instance_to_json(generate_instance(seed, crews, fires, horizon)).dump(2);
}

std::vector<std::pair<std::string, std::string>> validate(const std::string& text, const std::string& base_dir) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& v : validate_instance(instance_from_json(Json::parse(text), base_dir)))
    out.emplace_back(v.field, v.rule);
  return out;
}

std::string solve(const std::string& text, double time_limit, const std::string& cut_mode,
                  const std::string& branch_rule, double heuristic_period, double heuristic_budget,
                  const std::string& stabilize,
                  int threads, int node_limit, const std::string& base_dir) {
  Instance in = parse_instance(text, base_dir);
  SearchConfig cfg;
  cfg.time_limit = time_limit;
  cfg.cut_mode = parse_cut_mode(cut_mode);
  cfg.branch_rule = parse_branch_rule(branch_rule);
  cfg.heuristic_period = heuristic_period;
  cfg.heuristic_budget = heuristic_budget;
  cfg.stabilize = parse_stabilize_mode(stabilize);
  cfg.threads = std::max(1, threads);
  if (node_limit > 0) cfg.node_limit = node_limit;
  if (cfg.time_limit < 0) throw InputError("time_limit must be nonnegative");
  py::gil_scoped_release unlocked;
  Problem pr = build_problem(in, cfg.threads);
  SearchResult r = branch_price_and_cut(pr, cfg);
  return solution_to_json(pr, r, cfg).dump();
}

py::dict simulate(const std::string& text, const std::string& policy, std::uint64_t seed,
                  const std::string& base_dir) {
  Instance in = parse_instance(text, base_dir);
  Problem pr = build_problem(in);
  SimulationResult r = simulate_policy(pr, parse_policy(policy), seed);
  py::dict d;
  d["policy"] = policy_name(r.policy);
  d["total_burned"] = r.total_burned;
  d["burned"] = r.burned;
  d["crews_at"] = r.crews_at;
  py::list log;
  for (const auto& e : r.log) log.append(py::make_tuple(e.period, e.crew, e.fire, e.action));
  d["log"] = log;
  return d;
}

std::string summary(const std::string& text, std::optional<double> optimized,
                    const std::vector<std::uint64_t>& seeds, const std::string& base_dir) {
  Instance in = parse_instance(text, base_dir);
  Problem pr = build_problem(in);
  return summary_csv(evaluate_all(pr, optimized, seeds));
}

std::optional<double> oracle(const std::string& text, const std::string& base_dir) {
  Instance in = parse_instance(text, base_dir);
  Problem pr = build_problem(in);
  OracleOptimum o = brute_force_optimum(pr);
  if (!o.feasible) return std::nullopt;
  return o.cost;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Wildfire suppression crew assignment solver";

  // Translators run newest first, so the base class goes in first.
  auto base = py::register_exception<Error>(m, "FirelineError", PyExc_RuntimeError);
  py::register_exception<GuardError>(m, "GuardError", base.ptr());
  py::register_exception<InputError>(m, "InputError", base.ptr());

  m.def("generate_instance", &generate, py::arg("seed"), py::arg("crews"), py::arg("fires"), py::arg("horizon"),
        "Seeded synthetic instance as JSON text.");
  m.def("validate_instance", &validate, py::arg("instance"), py::arg("base_dir") = ".",
        "List of (field, rule) violations.");
  m.def("solve", &solve, py::arg("instance"), py::arg("time_limit") = 1200.0, py::arg("cut_mode") = "agub",
        py::arg("branch_rule") = "dmv", py::arg("heuristic_period") = 120.0,
        py::arg("heuristic_budget") = 30.0, py::arg("stabilize") = "auto",
        py::arg("threads") = 1, py::arg("node_limit") = 0, py::arg("base_dir") = ".",
        "Branch-and-price-and-cut; returns the solution document as JSON text.");
  m.def("simulate", &simulate, py::arg("instance"), py::arg("policy"), py::arg("seed") = 0,
        py::arg("base_dir") = ".");
  m.def("evaluate_all", &summary, py::arg("instance"), py::arg("optimized_burned") = py::none(),
        py::arg("seeds") = std::vector<std::uint64_t>{1, 2, 3, 4, 5}, py::arg("base_dir") = ".",
        "Baseline summary CSV.");
  m.def("brute_force_optimum", &oracle, py::arg("instance"), py::arg("base_dir") = ".",
        "Exhaustive optimum of a tiny instance, None when infeasible.");
  m.def("area_grid_size", [] { return area_grid().size(); });
  m.def("snap_to_grid", [](double v) { return snap_to_grid(v).value; }, py::arg("value"));
}
