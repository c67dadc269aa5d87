#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace fireline {

// ---------------------------------------------------------------------------
// Discretization grid

// Ordered bin values: 1..99 step 2, 100..10000 step 5, 10010..500000 step 10.
std::vector<double> make_area_grid();
// Cached copy of make_area_grid().
const std::vector<double>& area_grid();

struct SnapResult {
  double value = 0.0;
  bool clamped = false;  // true when the input exceeded the top bin
};

// Ceiling snap: v <= 0 maps to 0, otherwise to the smallest bin >= v.
SnapResult snap_to_grid(double v, std::span<const double> grid);
inline SnapResult snap_to_grid(double v) { return snap_to_grid(v, area_grid()); }

// ---------------------------------------------------------------------------
// Fire spread models

struct FireState {
  double area = 0.0;
  double perimeter = 0.0;
  double momentum = 0.0;
  bool operator==(const FireState&) const = default;
};

struct LinearPerimeterModel {
  double initial_perimeter = 0.0;   // P
  std::vector<double> growth;       // R_t, t = 1..T (last value repeats if short)
  std::vector<double> effectiveness;  // E_t per crew

  double growth_at(int t) const;
  double effectiveness_at(int t) const;
};

struct PerimeterArea {
  double perimeter = 0.0;
  double area = 0.0;
};

PerimeterArea linear_perimeter_step(PerimeterArea state, int crews, int t,
                                    const LinearPerimeterModel& model);

struct GrowthRow {
  double area = 0.0;
  double momentum = 0.0;
  int crews = 0;
  double growth = 0.0;
};

class TabulatedGrowthModel {
 public:
  // Throws InputError when the rows do not form a full grid or when growth
  // increases with the crew count somewhere.
  static TabulatedGrowthModel from_rows(std::vector<GrowthRow> rows);
  static TabulatedGrowthModel load_csv(const std::string& path);

  // Nearest-grid lookup on (area, momentum), ties to the lower axis value;
  // exact on crews. Throws InputError("unsupported allocation level").
  double growth(double area, double momentum, int crews) const;

  const std::vector<double>& area_axis() const { return areas_; }
  const std::vector<double>& momentum_axis() const { return momenta_; }
  const std::vector<int>& crew_axis() const { return crews_; }
  std::vector<GrowthRow> rows() const;

 private:
  std::vector<double> areas_;
  std::vector<double> momenta_;
  std::vector<int> crews_;
  std::vector<double> values_;  // [area][momentum][crews]
};

struct AreaMomentum {
  double area = 0.0;
  double momentum = 0.0;
};

AreaMomentum tabulated_growth_step(AreaMomentum state, int crews,
                                   const TabulatedGrowthModel& model);

struct TabulatedRef {
  std::string path;  // as written in the instance file
  std::shared_ptr<const TabulatedGrowthModel> table;
};

using FireModel = std::variant<LinearPerimeterModel, TabulatedRef>;

struct FireSpec {
  std::string id;
  int location = 0;
  FireModel model;
  FireState initial;

  bool is_linear() const { return std::holds_alternative<LinearPerimeterModel>(model); }
};

// One discretized period of fire dynamics, shared by the network builder and
// the dispatch simulator. Linear fires are keyed by perimeter and charge the
// burned area of the period as damage; tabulated fires are keyed by
// (area, momentum) and carry no per-period damage.
struct FireTransition {
  FireState next;
  double damage = 0.0;
  bool clamped = false;
};

FireTransition fire_transition(const FireSpec& fire, const FireState& state, int crews, int t);
// Snapped initial state of the fire network.
FireState initial_fire_state(const FireSpec& fire, bool* clamped = nullptr);
// Damage charged on the first-period arcs (the initial area of linear fires).
double initial_damage(const FireSpec& fire);
// Damage charged on the arcs entering period T+1 (terminal area of tabulated fires).
double terminal_damage(const FireSpec& fire, const FireState& state);
// Crew levels the model supports (0..max_crews, intersected with the table axis).
std::vector<int> supported_crew_levels(const FireSpec& fire, int max_crews);
// True for linear fires with constant growth ratio >= 1 and constant
// effectiveness; moving suppression earlier never raises their damage.
bool is_deferral_proof(const FireSpec& fire);

// ---------------------------------------------------------------------------
// Instance

struct Location {
  std::string id;
  double x = 0.0;
  double y = 0.0;
};

struct CrewSpec {
  std::string id;
  int base = 0;   // location index
  int start = 0;  // location index
  std::vector<int> jurisdiction;  // fire indices, ascending
};

struct RestPolicy {
  int phi = 1;
  int gamma = 1;
  std::vector<int> last_rest;  // r0_j per crew
};

enum class NetworkMode { kAuto, kCompact, kExtended };

struct Instance {
  int horizon = 1;
  int periods_per_day = 1;
  std::vector<Location> locations;
  std::vector<std::vector<double>> travel_hours;  // location x location
  double travel_cost_per_hour = 0.0;
  std::vector<CrewSpec> crews;
  std::vector<FireSpec> fires;
  RestPolicy rest;
  NetworkMode network_mode = NetworkMode::kAuto;

  int num_crews() const { return static_cast<int>(crews.size()); }
  int num_fires() const { return static_cast<int>(fires.size()); }
  double period_hours() const { return 24.0 / periods_per_day; }
  // Ceiling discretization of travel time, at least one period between
  // distinct locations.
  int travel_periods(int from, int to) const;
  // Location set of a crew: base, start, and the locations of its fires.
  std::vector<int> crew_locations(int crew) const;
  // R_j = min(phi + r0_j, T).
  int rest_deadline(int crew) const;
  bool uses_compact_network() const;
  std::vector<int> fire_indices_at(int location) const;
};

struct Violation {
  std::string field;
  std::string rule;
};

std::vector<Violation> validate_instance(const Instance& instance);

// ---------------------------------------------------------------------------
// Generator

struct GeneratorParams {
  double extent = 48.0;       // side of the square, in travel hours
  int periods_per_day = 1;
  double perimeter_min = 20.0, perimeter_max = 80.0;
  double growth_min = 1.2, growth_max = 1.8;
  double effect_min = 8.0, effect_max = 20.0;
  int gamma = 3;
  int bases = 0;  // 0 means ceil(crews / 2)
  // When set, fires use this tabulated surface instead of the linear model.
  TabulatedRef table;
  double area_min = 50.0, area_max = 500.0;
};

Instance generate_instance(std::uint64_t seed, int n_crews, int n_fires, int horizon,
                           const GeneratorParams& params = {});

}  // namespace fireline
