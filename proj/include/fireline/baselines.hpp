#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fireline/columns.hpp"

namespace fireline {

enum class Policy { kNone, kRandom, kDistance, kArea, kImpact };

const char* policy_name(Policy policy);
Policy parse_policy(const std::string& name);

using Rng = std::mt19937_64;

// U(0, 1], platform independent.
double uniform_draw(Rng& rng);

// Next transition of one fire: the smallest crew count above the committed
// count that changes the period's outcome.
struct TransitionCandidate {
  int fire = 0;
  int period = 1;
  int committed = 0;
  int crews_required = 0;
  FireState current;
  FireState zero_next;  // outcome with no crews
  FireState next;       // outcome with committed + crews_required crews
};

// base / crews_required / travel_periods. Base: random U(0,1], distance
// 1 / travel_periods, area current burned area, impact one-period area saved
// against the zero-crew transition.
double score_transition(Policy policy, const TransitionCandidate& candidate, int crews_required,
                        double travel_periods, Rng& rng);

enum class CrewStatus { kAtBase, kAtFire, kInTransit, kResting };

const char* crew_status_name(CrewStatus status);

struct CrewDispatch {
  int node = 0;  // current node in the crew network
  CrewStatus status = CrewStatus::kAtBase;
  int busy_until = 1;               // period of the current node; never reassigned before it
  int target = -1;                  // fire the crew is routed to, -1 if none
  std::vector<int> pending;         // committed arcs still to take
};

struct DispatchState {
  int period = 1;
  std::vector<CrewDispatch> crews;
  std::vector<FireState> fires;
};

struct DispatchEvent {
  int period = 0;
  int crew = 0;
  int fire = -1;
  std::string action;  // dispatch, work
};

struct SimulationResult {
  Policy policy = Policy::kNone;
  std::uint64_t seed = 0;
  std::vector<std::vector<FireState>> trajectory;  // per fire, t = 1..T+1
  std::vector<std::vector<int>> crews_at;          // per fire, t = 1..T
  std::vector<std::vector<int>> crew_arcs;         // per crew, arcs taken
  std::vector<DispatchEvent> log;
  std::vector<double> burned;  // per fire
  double total_burned = 0.0;
};

// Greedy rollout on the problem's fire dynamics and crew networks.
SimulationResult simulate_policy(const Problem& problem, Policy policy, std::uint64_t seed = 0);

// Burned area of fire g under per-period crew counts (t = 1..T).
double evaluate_demand(const Problem& problem, int g, const std::vector<int>& crews);
double do_nothing_burned(const Problem& problem);

struct SummaryRow {
  std::string method;
  double burned = 0.0;
  double acres_saved = 0.0;
  double pct_saved = 0.0;
  std::optional<double> multiplier;  // undefined on a zero denominator
};

// Acres saved against the zero-crew rollout; random averaged over seeds.
// The optimization row comes first when a solver total is given.
std::vector<SummaryRow> evaluate_all(const Problem& problem, std::optional<double> optimized_burned,
                                     const std::vector<std::uint64_t>& seeds, int threads = 1);

// Rows from burned totals; multipliers are optimization saved / policy saved.
std::vector<SummaryRow> summary_rows(double none_burned, std::optional<double> optimized_burned,
                                     const std::vector<std::pair<std::string, double>>& policies);

// method,acres_saved,pct_saved,multiplier with "—" for undefined values.
std::string summary_csv(const std::vector<SummaryRow>& rows);

}  // namespace fireline
