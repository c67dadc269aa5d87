#include "fireline/io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "fireline/common.hpp"

namespace fireline {
namespace {

const Json& require(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key))
    throw InputError(where + ": missing field '" + key + "'");
  return obj.at(key);
}

std::vector<double> number_list(const Json& value, const std::string& where) {
  std::vector<double> out;
  if (value.is_number()) {
    out.push_back(value.get<double>());
    return out;
  }
  if (!value.is_array()) throw InputError(where + ": expected a number or a list of numbers");
  for (const auto& x : value) {
    if (!x.is_number()) throw InputError(where + ": expected numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

const char* mode_name(NetworkMode m) {
  switch (m) {
    case NetworkMode::kCompact: return "compact";
    case NetworkMode::kExtended: return "extended";
    case NetworkMode::kAuto: break;
  }
  return "auto";
}

}  // namespace

Instance instance_from_json(const Json& doc, const std::string& base_dir) {
  try {
    Instance in;
    in.horizon = require(doc, "horizon", "instance").get<int>();
    in.periods_per_day = doc.value("periods_per_day", 1);
    in.travel_cost_per_hour = doc.value("travel_cost_per_hour", 0.0);
    if (doc.contains("network_mode")) {
      std::string m = doc.at("network_mode").get<std::string>();
      if (m == "compact") in.network_mode = NetworkMode::kCompact;
      else if (m == "extended") in.network_mode = NetworkMode::kExtended;
      else if (m == "auto") in.network_mode = NetworkMode::kAuto;
      else throw InputError("instance: unknown network_mode '" + m + "'");
    }

    std::map<std::string, int> loc_index;
    for (const auto& l : require(doc, "locations", "instance")) {
      Location loc;
      loc.id = require(l, "id", "location").get<std::string>();
      loc.x = l.value("x", 0.0);
      loc.y = l.value("y", 0.0);
      if (!loc_index.emplace(loc.id, static_cast<int>(in.locations.size())).second)
        throw InputError("instance: duplicate location id '" + loc.id + "'");
      in.locations.push_back(loc);
    }
    int nl = static_cast<int>(in.locations.size());
    if (doc.contains("travel_matrix")) {
      for (const auto& row : doc.at("travel_matrix"))
        in.travel_hours.push_back(number_list(row, "travel_matrix"));
    } else {
      double speed = doc.value("speed", 1.0);
      if (!(speed > 0.0)) throw InputError("instance: speed must be positive");
      in.travel_hours.assign(nl, std::vector<double>(nl, 0.0));
      for (int a = 0; a < nl; ++a)
        for (int b = 0; b < nl; ++b)
          if (a != b)
            in.travel_hours[a][b] = std::hypot(in.locations[a].x - in.locations[b].x,
                                               in.locations[a].y - in.locations[b].y) /
                                    speed;
    }
    auto location = [&](const std::string& id, const std::string& where) {
      auto it = loc_index.find(id);
      if (it == loc_index.end()) throw InputError(where + ": unknown location '" + id + "'");
      return it->second;
    };

    std::map<std::string, int> fire_index;
    std::map<std::string, TabulatedRef> tables;
    for (const auto& f : require(doc, "fires", "instance")) {
      FireSpec fire;
      fire.id = require(f, "id", "fire").get<std::string>();
      std::string where = "fire '" + fire.id + "'";
      fire.location = location(f.value("location", fire.id), where);
      const Json& model = require(f, "model", where);
      std::string type = require(model, "type", where + ".model").get<std::string>();
      const Json empty = Json::object();
      const Json& init = f.contains("initial") ? f.at("initial") : empty;
      if (type == "linear_perimeter") {
        LinearPerimeterModel m;
        m.initial_perimeter = require(model, "P", where + ".model").get<double>();
        m.growth = number_list(require(model, "R", where + ".model"), where + ".model.R");
        m.effectiveness = number_list(require(model, "E", where + ".model"), where + ".model.E");
        fire.initial.perimeter = init.value("perimeter", m.initial_perimeter);
        fire.initial.area = init.value("area", 0.0);
        fire.model = std::move(m);
      } else if (type == "tabulated") {
        std::string path = require(model, "path", where + ".model").get<std::string>();
        auto it = tables.find(path);
        if (it == tables.end()) {
          std::filesystem::path p(path);
          if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
          TabulatedRef ref{path, std::make_shared<const TabulatedGrowthModel>(
                                     TabulatedGrowthModel::load_csv(p.string()))};
          it = tables.emplace(path, ref).first;
        }
        fire.model = it->second;
        fire.initial.area = require(init, "area", where + ".initial").get<double>();
        fire.initial.momentum = init.value("momentum", 0.0);
      } else {
        throw InputError(where + ": unknown model type '" + type + "'");
      }
      if (!fire_index.emplace(fire.id, static_cast<int>(in.fires.size())).second)
        throw InputError("instance: duplicate fire id '" + fire.id + "'");
      in.fires.push_back(std::move(fire));
    }

    for (const auto& c : require(doc, "crews", "instance")) {
      CrewSpec crew;
      crew.id = require(c, "id", "crew").get<std::string>();
      std::string where = "crew '" + crew.id + "'";
      crew.base = location(require(c, "base", where).get<std::string>(), where);
      crew.start = location(c.value("start", in.locations[crew.base].id), where);
      if (c.contains("jurisdiction")) {
        for (const auto& g : c.at("jurisdiction")) {
          auto it = fire_index.find(g.get<std::string>());
          if (it == fire_index.end())
            throw InputError(where + ": jurisdiction names unknown fire '" + g.get<std::string>() + "'");
          crew.jurisdiction.push_back(it->second);
        }
      } else {
        for (int g = 0; g < static_cast<int>(in.fires.size()); ++g) crew.jurisdiction.push_back(g);
      }
      std::sort(crew.jurisdiction.begin(), crew.jurisdiction.end());
      crew.jurisdiction.erase(std::unique(crew.jurisdiction.begin(), crew.jurisdiction.end()),
                              crew.jurisdiction.end());
      in.crews.push_back(std::move(crew));
    }

    const Json& rest = require(doc, "rest", "instance");
    in.rest.phi = require(rest, "phi", "rest").get<int>();
    in.rest.gamma = require(rest, "gamma", "rest").get<int>();
    if (rest.contains("last_rest")) {
      for (const auto& r : rest.at("last_rest")) in.rest.last_rest.push_back(r.get<int>());
    } else {
      in.rest.last_rest.assign(in.crews.size(), 0);
    }
    return in;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("instance: ") + e.what());
  }
}

Json instance_to_json(const Instance& in) {
  Json doc;
  doc["horizon"] = in.horizon;
  doc["periods_per_day"] = in.periods_per_day;
  if (in.travel_cost_per_hour != 0.0) doc["travel_cost_per_hour"] = in.travel_cost_per_hour;
  if (in.network_mode != NetworkMode::kAuto) doc["network_mode"] = mode_name(in.network_mode);
  doc["rest"] = {{"phi", in.rest.phi}, {"gamma", in.rest.gamma}, {"last_rest", in.rest.last_rest}};
  Json locs = Json::array();
  for (const auto& l : in.locations) locs.push_back({{"id", l.id}, {"x", l.x}, {"y", l.y}});
  doc["locations"] = locs;
  doc["travel_matrix"] = in.travel_hours;
  Json crews = Json::array();
  for (const auto& c : in.crews) {
    Json j = {{"id", c.id}, {"base", in.locations[c.base].id}, {"start", in.locations[c.start].id}};
    Json jur = Json::array();
    for (int g : c.jurisdiction) jur.push_back(in.fires[g].id);
    j["jurisdiction"] = jur;
    crews.push_back(j);
  }
  doc["crews"] = crews;
  Json fires = Json::array();
  for (const auto& f : in.fires) {
    Json j = {{"id", f.id}, {"location", in.locations[f.location].id}};
    if (const auto* lin = std::get_if<LinearPerimeterModel>(&f.model)) {
      j["model"] = {{"type", "linear_perimeter"},
                    {"P", lin->initial_perimeter},
                    {"R", lin->growth},
                    {"E", lin->effectiveness}};
      j["initial"] = {{"perimeter", f.initial.perimeter}, {"area", f.initial.area}};
    } else {
      j["model"] = {{"type", "tabulated"}, {"path", std::get<TabulatedRef>(f.model).path}};
      j["initial"] = {{"area", f.initial.area}, {"momentum", f.initial.momentum}};
    }
    fires.push_back(j);
  }
  doc["fires"] = fires;
  return doc;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
  if (!out) throw InputError("failed writing " + path);
}

Instance load_instance(const std::string& path) {
  std::string text = read_text_file(path);
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  std::string dir = std::filesystem::path(path).parent_path().string();
  return instance_from_json(doc, dir.empty() ? "." : dir);
}

void save_instance(const Instance& instance, const std::string& path) {
  write_text_file(path, instance_to_json(instance).dump(2) + "\n");
}

}  // namespace fireline
