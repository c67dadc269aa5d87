#pragma once

#include <climits>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "fireline/model.hpp"
#include "fireline/networks.hpp"

namespace fireline {

// Instance plus its built networks; shared read-only by every search node.
struct Problem {
  std::shared_ptr<const Instance> instance;  // owned copy
  std::vector<CrewNetwork> crews;
  std::vector<FireNetwork> fires;
  int J = 0, G = 0, T = 0;

  int link_index(int g, int t) const { return g * T + t - 1; }
};

Problem build_problem(const Instance& instance, int threads = 1);

struct FirePlan {
  int fire = 0;
  std::vector<int> arcs;
  std::vector<int> demand;  // B_qt, t = 1..T at index t - 1
  double cost = 0.0;
  int demand_at(int t) const { return demand[t - 1]; }
};

struct CrewRoute {
  int crew = 0;
  std::vector<int> arcs;
  std::vector<int> work;  // fire worked in period t (index t - 1), -1 if none
  double cost = 0.0;
  bool assigned(int g, int t) const { return work[t - 1] == g; }
};

FirePlan make_fire_plan(const Problem& problem, int g, std::vector<int> arcs);
CrewRoute make_crew_route(const Problem& problem, int j, std::vector<int> arcs);

// Replays a plan through the spread model: states for t = 1..T+1.
std::vector<FireState> plan_trajectory(const Problem& problem, const FirePlan& plan);

struct DemandInterval {
  int lo = 0;
  int hi = INT_MAX;
};

// Branching decisions of a search node.
struct BranchSet {
  std::map<std::pair<int, int>, DemandInterval> demand;        // (g, t)
  std::map<std::tuple<int, int, int>, bool> assignment;        // (j, g, t)

  bool admits(const FirePlan& plan) const;
  bool admits(const CrewRoute& route) const;
  void restrict_demand(int g, int t, int lo, int hi);
  void fix_assignment(int j, int g, int t, bool value);
  std::size_t size() const { return demand.size() + assignment.size(); }
};

enum class CutFamily { kGub, kStrengthenedGub, kAugmentedGub };

const char* cut_family_name(CutFamily family);

// Robust inequality at one period:
//   sum_g sum_q delta_g[B_q,t] y_q + sum_{j in crews} sum_p [p idle on fires at t] z_p <= rhs
struct RobustCut {
  int id = -1;
  int period = 1;
  CutFamily family = CutFamily::kGub;
  std::vector<int> fires;                   // ascending
  std::vector<std::vector<double>> weight;  // per listed fire, levels 0..J
  std::vector<int> crews;                   // idle crews, ascending
  std::vector<int> targets;                 // GUB demand targets (empty for A-GUB)
  double rhs = 0.0;

  double fire_coefficient(int g, int demand) const;
  double route_coefficient(const CrewRoute& route) const;
  bool same_as(const RobustCut& other, double tol = 1e-9) const;
};

// GUB cover coefficients: delta_g[d] = 1[d >= D_g], rhs = |G_u| + |J_u| - 1.
RobustCut make_gub_cut(int period, const std::vector<int>& fires, const std::vector<int>& targets,
                       const std::vector<int>& crews, int J, CutFamily family = CutFamily::kGub);

struct DualSolution {
  std::vector<double> sigma;  // per fire
  std::vector<double> pi;     // per crew
  std::vector<double> rho;    // per (g, t), Problem::link_index
  std::vector<double> alpha;  // per active cut
};

// Column store shared across search nodes. Signatures are deduplicated.
class ColumnPool {
 public:
  void reset(int fires, int crews);
  // Returns the column index and whether it was new.
  std::pair<int, bool> add(const FirePlan& plan);
  std::pair<int, bool> add(const CrewRoute& route);

  const std::vector<FirePlan>& plans(int g) const { return plans_[g]; }
  const std::vector<CrewRoute>& routes(int j) const { return routes_[j]; }
  int num_fires() const { return static_cast<int>(plans_.size()); }
  int num_crews() const { return static_cast<int>(routes_.size()); }
  std::size_t size() const;

 private:
  std::vector<std::vector<FirePlan>> plans_;
  std::vector<std::vector<CrewRoute>> routes_;
  std::vector<std::map<std::vector<int>, std::vector<int>>> plan_sig_, route_sig_;
};

}  // namespace fireline
