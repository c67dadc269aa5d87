#pragma once

#include <string>
#include <vector>

#include "fireline/model.hpp"

namespace fireline {

// Time-indexed DAG. Every arc strictly increases the period of its node.
struct Dag {
  std::vector<int> period;  // tau per node
  std::vector<int> tail;    // per arc
  std::vector<int> head;    // per arc
  int start = 0;
  int terminal_period = 0;  // nodes with this period are sinks

  // Filled by finalize().
  std::vector<int> order;  // nodes sorted by (period, index)
  std::vector<int> out_offset, out_arcs;
  std::vector<int> in_offset, in_arcs;

  int num_nodes() const { return static_cast<int>(period.size()); }
  int num_arcs() const { return static_cast<int>(tail.size()); }
  int add_node(int tau);
  int add_arc(int from, int to);
  void finalize();
  // Throws Error if some arc does not increase the period.
  void check_forward() const;
};

enum class CrewArcKind { kTravel, kWork, kRest, kWait };

const char* crew_arc_kind_name(CrewArcKind kind);

struct CrewNode {
  int location = 0;
  int period = 0;
  int rest = 0;  // flag (compact) or counter (extended)
};

struct CrewNetwork {
  int crew = 0;
  int horizon = 0;
  int num_fires = 0;
  bool extended = false;
  Dag dag;
  std::vector<CrewNode> nodes;
  std::vector<CrewArcKind> kind;
  std::vector<double> cost;
  std::vector<int> fire;  // fire of a work arc, -1 otherwise
  // Work arcs per (fire, period): index g * horizon + (t - 1).
  std::vector<std::vector<int>> work_arcs;

  const std::vector<int>& work_arcs_at(int g, int t) const { return work_arcs[g * horizon + t - 1]; }
};

// Compact network (rest flag). Throws InputError when T >= phi + gamma.
CrewNetwork build_crew_network(int crew, const Instance& instance);
// Extended network with a rest counter 0..phi.
CrewNetwork build_crew_network_extended(int crew, const Instance& instance);
// Picks the compact or extended builder from the instance's network mode.
CrewNetwork build_crew_network_auto(int crew, const Instance& instance);

struct FireNetwork {
  int fire = 0;
  int horizon = 0;
  bool linear = false;  // nodes keyed by perimeter only
  Dag dag;
  std::vector<FireState> states;  // per node (representative state)
  std::vector<int> label;         // x_a
  std::vector<double> damage;     // d_a
  // Arcs leaving period t (index t - 1), and the subset with x_a > 0.
  std::vector<std::vector<int>> arcs_at;
  std::vector<std::vector<int>> crew_arcs_at;
  std::vector<int> levels;
  std::vector<std::string> warnings;

  int max_width() const;
};

// Lazy breadth-first construction over discretized states; keeps only the
// minimal crew level per (state, period, next state).
FireNetwork build_fire_network(const FireSpec& fire, int horizon, const std::vector<int>& crew_levels,
                               int fire_index = 0);

// Edge list: tail_state, tail_t, head_state, head_t, x_a, d_a.
std::string fire_network_csv(const FireNetwork& net);

}  // namespace fireline
