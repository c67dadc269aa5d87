// fireline: generate, solve, simulate and check wildfire suppression instances.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fireline/baselines.hpp"
#include "fireline/io.hpp"
#include "fireline/oracle.hpp"
#include "fireline/search.hpp"

using namespace fireline;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitGuard = 3;

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    write_text_file(path, text);
  }
}

struct GenerateArgs {
  std::uint64_t seed = 1;
  int crews = 2;
  int fires = 1;
  int horizon = 5;
  std::string model = "linear";
  std::string out = "-";
};

int cmd_generate(const GenerateArgs& a) {
  if (a.crews < 1) throw InputError("--crews must be at least 1");
  if (a.fires < 1) throw InputError("--fires must be at least 1");
  if (a.horizon < 1) throw InputError("--horizon must be at least 1");
  GeneratorParams params;
  if (a.model.rfind("tabulated:", 0) == 0) {
    std::string path = a.model.substr(10);
    if (path.empty()) throw InputError("--model tabulated: needs a table path");
    params.table.path = path;
    params.table.table = std::make_shared<const TabulatedGrowthModel>(TabulatedGrowthModel::load_csv(path));
  } else if (a.model != "linear") {
    throw InputError("--model must be linear or tabulated:<path>");
  }
  Instance in = generate_instance(a.seed, a.crews, a.fires, a.horizon, params);
  auto bad = validate_instance(in);
  if (!bad.empty()) throw Error("generated instance is invalid: " + bad.front().field + ": " + bad.front().rule);
  emit(a.out, instance_to_json(in).dump(2) + "\n");
  return kExitOk;
}

struct SolveArgs {
  std::string instance;
  std::string out = "solution.json";
  std::string log = "search_log.csv";
  double time_limit = 1200;
  std::string cut_mode = "agub";
  std::string branch_rule = "dmv";
  double heuristic_period = 120;
  double heuristic_budget = 30;
  std::string stabilize = "auto";
  int threads = 1;
  int node_limit = 0;
  bool timing = false;
};

Instance load_checked(const std::string& path) {
  Instance in = load_instance(path);
  auto bad = validate_instance(in);
  if (!bad.empty()) {
    std::ostringstream msg;
    msg << path << ": " << bad.size() << " validation error(s); first: " << bad.front().field << ": "
        << bad.front().rule;
    throw InputError(msg.str());
  }
  return in;
}

int cmd_solve(const SolveArgs& a) {
  Instance in = load_checked(a.instance);
  SearchConfig cfg;
  cfg.time_limit = a.time_limit;
  cfg.cut_mode = parse_cut_mode(a.cut_mode);
  cfg.branch_rule = parse_branch_rule(a.branch_rule);
  cfg.heuristic_period = a.heuristic_period;
  cfg.heuristic_budget = a.heuristic_budget;
  cfg.stabilize = parse_stabilize_mode(a.stabilize);
  cfg.threads = std::max(1, a.threads);
  if (a.node_limit > 0) cfg.node_limit = a.node_limit;
  if (cfg.time_limit < 0) throw InputError("--time-limit must be nonnegative");
  Problem pr = build_problem(in, cfg.threads);
  SearchResult r = branch_price_and_cut(pr, cfg);
  emit(a.out, solution_to_json(pr, r, cfg, a.timing).dump(2) + "\n");
  if (!a.log.empty()) write_text_file(a.log, search_log_csv(r, a.timing));
  std::fprintf(stderr, "%s: UB %s LB %s gap %s\n", r.optimal ? "optimal" : (r.has_incumbent ? "feasible" : "no solution"),
               r.has_incumbent ? std::to_string(r.upper_bound).c_str() : "none",
               std::isfinite(r.lower_bound) ? std::to_string(r.lower_bound).c_str() : "none",
               std::isfinite(r.gap) ? std::to_string(r.gap).c_str() : "inf");
  return kExitOk;
}

struct SimulateArgs {
  std::string instance;
  std::string solution;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::string out = "-";
  int threads = 1;
};

int cmd_simulate(const SimulateArgs& a) {
  Instance in = load_checked(a.instance);
  Problem pr = build_problem(in);
  std::optional<double> optimized;
  if (!a.solution.empty()) {
    std::ifstream probe(a.solution);
    if (!probe) {
      std::fprintf(stderr, "warning: solution file %s not found; multipliers omitted\n", a.solution.c_str());
    } else {
      Json doc = Json::parse(read_text_file(a.solution));
      if (doc.value("fires", Json::array()).empty()) {
        std::fprintf(stderr, "warning: solution file %s has no plans; multipliers omitted\n", a.solution.c_str());
      } else {
        double burned = 0.0;
        for (const auto& f : doc["fires"]) burned += f.at("cost").get<double>();
        optimized = burned;
      }
    }
  }
  auto rows = evaluate_all(pr, optimized, a.seeds, std::max(1, a.threads));
  emit(a.out, summary_csv(rows));
  return kExitOk;
}

struct CheckArgs {
  std::string instance;
  double time_limit = 60;
};

int cmd_check(const CheckArgs& a) {
  Instance in = load_checked(a.instance);
  Problem pr = build_problem(in);
  bool ok = true;
  auto line = [&](bool pass, const std::string& what) {
    std::printf("%s: %s\n", pass ? "PASS" : "FAIL", what.c_str());
    ok = ok && pass;
  };
  EquivalenceReport eq = check_formulation_equivalence(pr);
  const OracleOptimum& opt = eq.path;
  line(opt.feasible, "oracle found a feasible solution (" + std::to_string(opt.combinations) + " route combinations)");
  line(eq.integer_equal, "arc optimum == path optimum");
  line(eq.lp_equal, "arc LP == path LP");
  SearchConfig cfg;
  cfg.time_limit = a.time_limit;
  SearchResult r = branch_price_and_cut(pr, cfg);
  bool same = opt.feasible ? r.optimal && std::fabs(r.upper_bound - opt.cost) <= 1e-6 : !r.has_incumbent;
  line(same, "solver == oracle");
  char buf[128];
  std::snprintf(buf, sizeof buf, "optimum %.6f, do-nothing %.6f", opt.cost, do_nothing_burned(pr));
  std::printf("%s\n", buf);
  return ok ? kExitOk : kExitInternal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wildfire suppression crew assignment by branch-and-price-and-cut"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Write a seeded synthetic instance");
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("--crews", gen.crews, "Number of crews");
  g->add_option("--fires", gen.fires, "Number of fires");
  g->add_option("--horizon", gen.horizon, "Planning horizon in periods");
  g->add_option("--model", gen.model, "linear or tabulated:<csv path>");
  g->add_option("-o,--out", gen.out, "Output file (- for stdout)");

  SolveArgs sol;
  auto* s = app.add_subcommand("solve", "Solve an instance");
  s->add_option("instance", sol.instance, "Instance JSON")->required();
  s->add_option("-o,--out", sol.out, "Solution JSON (- for stdout)");
  s->add_option("--log", sol.log, "Search log CSV (empty to skip)");
  s->add_option("--time-limit", sol.time_limit, "Seconds");
  s->add_option("--cut-mode", sol.cut_mode, "none, gub, sgub or agub");
  s->add_option("--branch-rule", sol.branch_rule, "mf, mv or dmv");
  s->add_option("--heuristic-period", sol.heuristic_period, "Seconds between heuristic calls; negative disables");
  s->add_option("--heuristic-budget", sol.heuristic_budget, "Seconds per heuristic call");
  s->add_option("--stabilize", sol.stabilize, "on, off or auto");
  s->add_option("--threads", sol.threads, "Pricing threads");
  s->add_option("--node-limit", sol.node_limit, "Stop after this many nodes (0: no limit)");
  s->add_flag("--timing", sol.timing, "Write wall-clock fields");

  SimulateArgs sim;
  auto* m = app.add_subcommand("simulate", "Roll out the baseline dispatch policies");
  m->add_option("instance", sim.instance, "Instance JSON")->required();
  m->add_option("--solution", sim.solution, "Solution JSON for multipliers");
  m->add_option("--seeds", sim.seeds, "Seeds of the random policy")->delimiter(',');
  m->add_option("-o,--out", sim.out, "Summary CSV (- for stdout)");
  m->add_option("--threads", sim.threads, "Concurrent rollouts");

  CheckArgs chk;
  auto* c = app.add_subcommand("check", "Compare the solver with the brute-force oracle");
  c->add_option("instance", chk.instance, "Instance JSON")->required();
  c->add_option("--time-limit", chk.time_limit, "Solver seconds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*g) return cmd_generate(gen);
    if (*s) return cmd_solve(sol);
    if (*m) return cmd_simulate(sim);
    if (*c) return cmd_check(chk);
  } catch (const GuardError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitGuard;
  } catch (const InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const Json::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kExitInternal;
  }
  return kExitOk;
}
