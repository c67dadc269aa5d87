#include "fireline/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "fireline/common.hpp"

namespace fireline {

// ---------------------------------------------------------------------------
// Grid

std::vector<double> make_area_grid() {
  std::vector<double> grid;
  grid.reserve(51031);
  for (int v = 1; v < 100; v += 2) grid.push_back(v);
  for (int v = 100; v <= 10000; v += 5) grid.push_back(v);
  for (int v = 10010; v <= 500000; v += 10) grid.push_back(v);
  return grid;
}

const std::vector<double>& area_grid() {
  static const std::vector<double> grid = make_area_grid();
  return grid;
}

SnapResult snap_to_grid(double v, std::span<const double> grid) {
  if (v <= 0.0 || grid.empty()) return {0.0, false};
  auto it = std::lower_bound(grid.begin(), grid.end(), v);
  if (it == grid.end()) return {grid.back(), true};
  return {*it, false};
}

// ---------------------------------------------------------------------------
// Linear perimeter model

namespace {

double period_value(const std::vector<double>& values, int t) {
  if (values.empty()) return 0.0;
  std::size_t idx = static_cast<std::size_t>(std::max(1, t) - 1);
  return values[std::min(idx, values.size() - 1)];
}

}  // namespace

double LinearPerimeterModel::growth_at(int t) const { return period_value(growth, t); }
double LinearPerimeterModel::effectiveness_at(int t) const { return period_value(effectiveness, t); }

PerimeterArea linear_perimeter_step(PerimeterArea state, int crews, int t,
                                    const LinearPerimeterModel& model) {
  double contained = model.effectiveness_at(t) * crews;
  double p = state.perimeter;
  double next = std::max(0.0, model.growth_at(t) * (p - contained / 2.0) - contained / 2.0);
  return {next, state.area + (p + next) / 2.0};
}

// ---------------------------------------------------------------------------
// Tabulated growth model

TabulatedGrowthModel TabulatedGrowthModel::from_rows(std::vector<GrowthRow> rows) {
  if (rows.empty()) throw InputError("growth table is empty");
  std::set<double> areas, momenta;
  std::set<int> crews;
  for (const auto& r : rows) {
    if (!std::isfinite(r.area) || !std::isfinite(r.momentum) || !std::isfinite(r.growth))
      throw InputError("growth table has a non-finite entry");
    if (r.growth < 0.0) throw InputError("growth table has negative growth");
    areas.insert(r.area);
    momenta.insert(r.momentum);
    crews.insert(r.crews);
  }
  TabulatedGrowthModel m;
  m.areas_.assign(areas.begin(), areas.end());
  m.momenta_.assign(momenta.begin(), momenta.end());
  m.crews_.assign(crews.begin(), crews.end());
  std::size_t na = m.areas_.size(), nm = m.momenta_.size(), nc = m.crews_.size();
  if (rows.size() != na * nm * nc)
    throw InputError("growth table is not a full (area, momentum, crews) grid");
  m.values_.assign(na * nm * nc, -1.0);
  for (const auto& r : rows) {
    std::size_t ia = std::lower_bound(m.areas_.begin(), m.areas_.end(), r.area) - m.areas_.begin();
    std::size_t im =
        std::lower_bound(m.momenta_.begin(), m.momenta_.end(), r.momentum) - m.momenta_.begin();
    std::size_t ic = std::lower_bound(m.crews_.begin(), m.crews_.end(), r.crews) - m.crews_.begin();
    double& slot = m.values_[(ia * nm + im) * nc + ic];
    if (slot >= 0.0) throw InputError("growth table has duplicate rows");
    slot = r.growth;
  }
  for (std::size_t ia = 0; ia < na; ++ia) {
    for (std::size_t im = 0; im < nm; ++im) {
      for (std::size_t ic = 1; ic < nc; ++ic) {
        std::size_t base = (ia * nm + im) * nc;
        if (m.values_[base + ic] > m.values_[base + ic - 1]) {
          std::ostringstream os;
          os << "growth increases with crews at area=" << m.areas_[ia]
             << " momentum=" << m.momenta_[im] << " crews=" << m.crews_[ic];
          throw InputError(os.str());
        }
      }
    }
  }
  return m;
}

TabulatedGrowthModel TabulatedGrowthModel::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open growth table: " + path);
  std::string line;
  if (!std::getline(in, line)) throw InputError("growth table has no header: " + path);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cell.erase(std::remove_if(cell.begin(), cell.end(), ::isspace), cell.end());
      header.push_back(cell);
    }
  }
  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InputError("growth table lacks column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  std::size_t ca = column("area"), cm = column("momentum"), cc = column("crews"),
              cg = column("growth");
  std::vector<GrowthRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < header.size())
      throw InputError("growth table line " + std::to_string(line_no) + " is short");
    try {
      GrowthRow r;
      r.area = std::stod(cells[ca]);
      r.momentum = std::stod(cells[cm]);
      double c = std::stod(cells[cc]);
      if (c != std::floor(c)) throw InputError("non-integer crew count");
      r.crews = static_cast<int>(c);
      r.growth = std::stod(cells[cg]);
      rows.push_back(r);
    } catch (const std::logic_error&) {
      throw InputError("growth table line " + std::to_string(line_no) + " is not numeric");
    }
  }
  return from_rows(std::move(rows));
}

namespace {

std::size_t nearest_index(const std::vector<double>& axis, double v) {
  auto it = std::lower_bound(axis.begin(), axis.end(), v);
  if (it == axis.begin()) return 0;
  if (it == axis.end()) return axis.size() - 1;
  std::size_t hi = it - axis.begin();
  std::size_t lo = hi - 1;
  return (v - axis[lo] <= axis[hi] - v) ? lo : hi;
}

}  // namespace

double TabulatedGrowthModel::growth(double area, double momentum, int crews) const {
  auto it = std::lower_bound(crews_.begin(), crews_.end(), crews);
  if (it == crews_.end() || *it != crews) throw InputError("unsupported allocation level");
  std::size_t ic = it - crews_.begin();
  std::size_t ia = nearest_index(areas_, area);
  std::size_t im = nearest_index(momenta_, momentum);
  return values_[(ia * momenta_.size() + im) * crews_.size() + ic];
}

std::vector<GrowthRow> TabulatedGrowthModel::rows() const {
  std::vector<GrowthRow> out;
  for (std::size_t ia = 0; ia < areas_.size(); ++ia)
    for (std::size_t im = 0; im < momenta_.size(); ++im)
      for (std::size_t ic = 0; ic < crews_.size(); ++ic)
        out.push_back({areas_[ia], momenta_[im], crews_[ic],
                       values_[(ia * momenta_.size() + im) * crews_.size() + ic]});
  return out;
}

AreaMomentum tabulated_growth_step(AreaMomentum state, int crews,
                                   const TabulatedGrowthModel& model) {
  double g = model.growth(state.area, state.momentum, crews);
  return {state.area + g, g};
}

// ---------------------------------------------------------------------------
// Discretized transitions

FireTransition fire_transition(const FireSpec& fire, const FireState& state, int crews, int t) {
  FireTransition out;
  if (const auto* lin = std::get_if<LinearPerimeterModel>(&fire.model)) {
    PerimeterArea raw = linear_perimeter_step({state.perimeter, state.area}, crews, t, *lin);
    SnapResult p = snap_to_grid(raw.perimeter);
    out.damage = (state.perimeter + p.value) / 2.0;
    out.next.perimeter = p.value;
    out.next.area = state.area + out.damage;
    out.clamped = p.clamped;
  } else {
    const auto& tab = *std::get<TabulatedRef>(fire.model).table;
    AreaMomentum raw = tabulated_growth_step({state.area, state.momentum}, crews, tab);
    SnapResult a = snap_to_grid(raw.area);
    SnapResult m = snap_to_grid(raw.momentum);
    out.next.area = a.value;
    out.next.momentum = m.value;
    out.clamped = a.clamped || m.clamped;
  }
  return out;
}

FireState initial_fire_state(const FireSpec& fire, bool* clamped) {
  FireState s = fire.initial;
  bool c = false;
  if (fire.is_linear()) {
    SnapResult p = snap_to_grid(s.perimeter);
    s.perimeter = p.value;
    s.momentum = 0.0;
    c = p.clamped;
  } else {
    SnapResult a = snap_to_grid(s.area);
    SnapResult m = snap_to_grid(s.momentum);
    s.area = a.value;
    s.momentum = m.value;
    s.perimeter = 0.0;
    c = a.clamped || m.clamped;
  }
  if (clamped) *clamped = c;
  return s;
}

double initial_damage(const FireSpec& fire) { return fire.is_linear() ? fire.initial.area : 0.0; }

double terminal_damage(const FireSpec& fire, const FireState& state) {
  return fire.is_linear() ? 0.0 : state.area;
}

std::vector<int> supported_crew_levels(const FireSpec& fire, int max_crews) {
  std::vector<int> levels;
  if (fire.is_linear()) {
    for (int x = 0; x <= max_crews; ++x) levels.push_back(x);
  } else {
    for (int x : std::get<TabulatedRef>(fire.model).table->crew_axis())
      if (x >= 0 && x <= max_crews) levels.push_back(x);
  }
  return levels;
}

bool is_deferral_proof(const FireSpec& fire) {
  const auto* m = std::get_if<LinearPerimeterModel>(&fire.model);
  if (!m || m->growth.empty() || m->effectiveness.empty()) return false;
  for (double r : m->growth)
    if (r != m->growth.front() || r < 1.0) return false;
  for (double e : m->effectiveness)
    if (e != m->effectiveness.front()) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Instance

int Instance::travel_periods(int from, int to) const {
  if (from == to) return 0;
  double periods = travel_hours[from][to] / period_hours();
  return std::max(1, static_cast<int>(std::ceil(periods - 1e-9)));
}

std::vector<int> Instance::crew_locations(int crew) const {
  const CrewSpec& c = crews[crew];
  std::vector<int> locs{c.base};
  for (int g : c.jurisdiction) locs.push_back(fires[g].location);
  std::sort(locs.begin(), locs.end());
  locs.erase(std::unique(locs.begin(), locs.end()), locs.end());
  return locs;
}

int Instance::rest_deadline(int crew) const {
  return std::min(rest.phi + rest.last_rest[crew], horizon);
}

bool Instance::uses_compact_network() const {
  switch (network_mode) {
    case NetworkMode::kCompact: return true;
    case NetworkMode::kExtended: return false;
    case NetworkMode::kAuto: break;
  }
  return horizon < rest.phi + rest.gamma;
}

std::vector<int> Instance::fire_indices_at(int location) const {
  std::vector<int> out;
  for (int g = 0; g < num_fires(); ++g)
    if (fires[g].location == location) out.push_back(g);
  return out;
}

std::vector<Violation> validate_instance(const Instance& in) {
  std::vector<Violation> v;
  auto add = [&](std::string field, std::string rule) { v.push_back({std::move(field), std::move(rule)}); };
  int nl = static_cast<int>(in.locations.size());
  if (in.horizon < 1) add("horizon", "horizon must be at least 1");
  if (in.periods_per_day < 1) add("periods_per_day", "periods_per_day must be at least 1");
  if (in.travel_cost_per_hour < 0.0 || !std::isfinite(in.travel_cost_per_hour))
    add("travel_cost_per_hour", "travel cost must be finite and nonnegative");

  bool matrix_ok = static_cast<int>(in.travel_hours.size()) == nl;
  for (const auto& row : in.travel_hours) matrix_ok = matrix_ok && static_cast<int>(row.size()) == nl;
  if (!matrix_ok) {
    add("travel_time", "travel matrix must be square over the locations");
  } else {
    bool neg = false, nonfinite = false, diag = false;
    for (int a = 0; a < nl; ++a) {
      for (int b = 0; b < nl; ++b) {
        double h = in.travel_hours[a][b];
        if (!std::isfinite(h)) nonfinite = true;
        else if (h < 0.0) neg = true;
        if (a == b && h != 0.0) diag = true;
      }
    }
    if (neg) add("travel_time", "negative travel time");
    if (nonfinite) add("travel_time", "non-finite travel time");
    if (diag) add("travel_time", "travel time diagonal must be zero");
  }

  const RestPolicy& r = in.rest;
  if (r.phi < 1) add("rest.phi", "phi must be at least 1");
  if (r.gamma < 1) add("rest.gamma", "gamma must be at least 1");
  if (static_cast<int>(r.last_rest.size()) != in.num_crews())
    add("rest.last_rest", "one last-rest period per crew is required");
  if (in.network_mode == NetworkMode::kCompact && in.horizon >= r.phi + r.gamma)
    add("rest", "Assumption 1 violated: compact networks need horizon < phi + gamma");
  if (!in.uses_compact_network()) {
    for (int rr : r.last_rest)
      if (rr > 0) {
        add("rest.last_rest", "last-rest periods must be <= 0 for extended networks");
        break;
      }
  }

  for (int j = 0; j < in.num_crews(); ++j) {
    const CrewSpec& c = in.crews[j];
    std::string f = "crews[" + c.id + "]";
    bool locs_ok = true;
    if (c.base < 0 || c.base >= nl) {
      add(f + ".base", "unknown base location");
      locs_ok = false;
    }
    if (c.start < 0 || c.start >= nl) {
      add(f + ".start", "unknown start location");
      locs_ok = false;
    }
    bool fires_ok = true;
    for (int g : c.jurisdiction) {
      if (g < 0 || g >= in.num_fires()) {
        add(f + ".jurisdiction", "jurisdiction must reference known fires");
        fires_ok = false;
        break;
      }
    }
    if (locs_ok && fires_ok) {
      auto locs = in.crew_locations(j);
      if (!std::binary_search(locs.begin(), locs.end(), c.start))
        add(f + ".start", "initial location must be in the crew's location set");
    }
  }

  for (int g = 0; g < in.num_fires(); ++g) {
    const FireSpec& fire = in.fires[g];
    std::string f = "fires[" + fire.id + "]";
    if (fire.location < 0 || fire.location >= nl) add(f + ".location", "unknown location");
    const FireState& s = fire.initial;
    if (!(s.area >= 0.0) || !(s.perimeter >= 0.0) || !(s.momentum >= 0.0))
      add(f + ".initial", "initial state must be nonnegative");
    if (const auto* lin = std::get_if<LinearPerimeterModel>(&fire.model)) {
      if (!(lin->initial_perimeter >= 0.0)) add(f + ".model.P", "P must be nonnegative");
      if (lin->growth.empty()) add(f + ".model.R", "at least one growth ratio is required");
      if (lin->effectiveness.empty()) add(f + ".model.E", "at least one effectiveness value is required");
      for (double x : lin->growth)
        if (!(x > 0.0) || !std::isfinite(x)) {
          add(f + ".model.R", "growth ratios must be positive");
          break;
        }
      for (double x : lin->effectiveness)
        if (!(x >= 0.0) || !std::isfinite(x)) {
          add(f + ".model.E", "effectiveness must be nonnegative");
          break;
        }
    } else {
      const auto& ref = std::get<TabulatedRef>(fire.model);
      if (!ref.table) {
        add(f + ".model", "tabulated model has no table");
      } else {
        const auto& axis = ref.table->crew_axis();
        if (axis.empty() || axis.front() != 0) add(f + ".model", "growth table must include crews = 0");
      }
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// Generator

namespace {

double round2(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

Instance generate_instance(std::uint64_t seed, int n_crews, int n_fires, int horizon,
                           const GeneratorParams& params) {
  if (n_crews < 1 || n_fires < 1 || horizon < 1)
    throw InputError("generate_instance needs at least one crew, one fire and one period");
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) {
    return lo + (hi - lo) * std::generate_canonical<double, 53>(rng);
  };

  Instance in;
  in.horizon = horizon;
  in.periods_per_day = params.periods_per_day;
  int n_bases = params.bases > 0 ? params.bases : (n_crews + 1) / 2;
  for (int b = 0; b < n_bases; ++b)
    in.locations.push_back({"base" + std::to_string(b), round2(uniform(0, params.extent)),
                            round2(uniform(0, params.extent))});
  for (int g = 0; g < n_fires; ++g)
    in.locations.push_back({"fire" + std::to_string(g), round2(uniform(0, params.extent)),
                            round2(uniform(0, params.extent))});
  int nl = static_cast<int>(in.locations.size());
  in.travel_hours.assign(nl, std::vector<double>(nl, 0.0));
  for (int a = 0; a < nl; ++a)
    for (int b = 0; b < nl; ++b)
      if (a != b)
        in.travel_hours[a][b] = std::hypot(in.locations[a].x - in.locations[b].x,
                                           in.locations[a].y - in.locations[b].y);

  in.rest.gamma = std::max(1, params.gamma);
  in.rest.phi = std::max(1, horizon - 1);
  if (horizon >= in.rest.phi + in.rest.gamma) in.rest.phi = horizon - in.rest.gamma + 1;
  for (int j = 0; j < n_crews; ++j) {
    CrewSpec c;
    c.id = "crew" + std::to_string(j);
    c.base = j % n_bases;
    c.start = c.base;
    for (int g = 0; g < n_fires; ++g) c.jurisdiction.push_back(g);
    in.crews.push_back(c);
    int lo = std::min(3, in.rest.phi);
    int deadline = lo + static_cast<int>(rng() % static_cast<std::uint64_t>(in.rest.phi - lo + 1));
    in.rest.last_rest.push_back(deadline - in.rest.phi);
  }

  for (int g = 0; g < n_fires; ++g) {
    FireSpec f;
    f.id = "fire" + std::to_string(g);
    f.location = n_bases + g;
    if (params.table.table) {
      f.model = params.table;
      f.initial.area = round2(uniform(params.area_min, params.area_max));
      f.initial.momentum = round2(uniform(0.0, f.initial.area / 4.0));
    } else {
      LinearPerimeterModel m;
      m.initial_perimeter = round2(uniform(params.perimeter_min, params.perimeter_max));
      // One ratio and one effectiveness per fire keeps the plans deferral-proof.
      double R = round2(uniform(params.growth_min, params.growth_max));
      double E = round2(uniform(params.effect_min, params.effect_max));
      m.growth.assign(horizon, R);
      m.effectiveness.assign(horizon, E);
      f.initial.perimeter = m.initial_perimeter;
      f.model = std::move(m);
    }
    in.fires.push_back(std::move(f));
  }
  return in;
}

}  // namespace fireline
