#pragma once

#include <string>
#include <vector>

#include "fireline/model.hpp"

namespace fireline::testing {

// Builds an instance from explicit travel hours (periods of 24 hours).
inline Instance make_instance(int horizon, std::vector<std::string> location_ids,
                              std::vector<std::vector<double>> hours, int phi, int gamma) {
  Instance in;
  in.horizon = horizon;
  for (auto& id : location_ids) in.locations.push_back({id, 0.0, 0.0});
  in.travel_hours = std::move(hours);
  in.rest.phi = phi;
  in.rest.gamma = gamma;
  return in;
}

inline void add_crew(Instance& in, std::string id, int base, std::vector<int> fires, int last_rest = 0,
                     int start = -1) {
  CrewSpec c;
  c.id = std::move(id);
  c.base = base;
  c.start = start < 0 ? base : start;
  c.jurisdiction = std::move(fires);
  in.crews.push_back(c);
  in.rest.last_rest.push_back(last_rest);
}

inline void add_linear_fire(Instance& in, std::string id, int location, double P, std::vector<double> R,
                            std::vector<double> E) {
  FireSpec f;
  f.id = std::move(id);
  f.location = location;
  LinearPerimeterModel m;
  m.initial_perimeter = P;
  m.growth = std::move(R);
  m.effectiveness = std::move(E);
  f.initial.perimeter = P;
  f.model = m;
  in.fires.push_back(f);
}

}  // namespace fireline::testing
