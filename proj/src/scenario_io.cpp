#include "imp/scenario_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace imp {

using nlohmann::json;

double round9(double v) {
  if (!std::isfinite(v)) return v;
  return std::stod(fmt9(v));
}

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

namespace {

json point_json(const TargetDomain& t) {
  return json{{"x", round9(t.g.x)}, {"y", round9(t.g.y)}, {"r_g", round9(t.r_g)}};
}

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw ScenarioError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ScenarioError(where + "." + key + ": missing field");
  return *it;
}

double number(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_number()) throw ScenarioError(where + "." + key + ": expected a number");
  return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j, key, where) : fallback;
}

TargetDomain parse_target(const json& j, const std::string& where) {
  return {{number(j, "x", where), number(j, "y", where)}, number(j, "r_g", where)};
}

}  // namespace

std::string scenario_to_json(const WorldState& w) {
  json doc;
  doc["table"] = {{"w", round9(w.table.width)}, {"h", round9(w.table.height)}};
  doc["robot"] = {{"x", round9(w.robot.position.x)},
                  {"y", round9(w.robot.position.y)},
                  {"r", round9(w.robot.radius)},
                  {"mass", round9(w.robot.mass)}};
  doc["r_p"] = round9(w.r_p);
  doc["target"] = point_json(w.targets.front());
  if (w.targets.size() > 1) {
    json ts = json::array();
    for (const auto& t : w.targets) ts.push_back(point_json(t));
    doc["targets"] = ts;
  }
  json objs = json::array();
  for (const auto& o : w.objects) {
    json jo{{"id", o.id},
            {"x", round9(o.shape.center.x)},
            {"y", round9(o.shape.center.y)},
            {"radius", round9(o.shape.radius)},
            {"class", std::string(to_string(o.class_truth))},
            {"K", round9(o.theta_truth.K)},
            {"D", round9(o.theta_truth.D)},
            {"C", round9(o.theta_truth.C)},
            {"mass", round9(o.mass)},
            {"friction", round9(o.friction_coeff)}};
    // JSON has no infinity; null means toppling disabled.
    jo["topple_threshold"] = std::isfinite(o.topple_threshold) ? json(round9(o.topple_threshold)) : json(nullptr);
    objs.push_back(std::move(jo));
  }
  doc["objects"] = objs;
  doc["seed"] = w.seed;
  return doc.dump(2) + "\n";
}

WorldState scenario_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ScenarioError("line " + std::to_string(line) + ": " + e.what());
  }

  WorldState w;
  const json& table = field(doc, "table", "scenario");
  w.table = {number(table, "w", "table"), number(table, "h", "table")};

  const json& robot = field(doc, "robot", "scenario");
  w.robot.position = {number(robot, "x", "robot"), number(robot, "y", "robot")};
  w.robot.radius = number(robot, "r", "robot");
  w.robot.mass = number_or(robot, "mass", w.robot.mass, "robot");
  w.robot.height = number_or(robot, "h", w.robot.height, "robot");
  w.r_p = number(doc, "r_p", "scenario");

  if (doc.contains("targets")) {
    const json& ts = doc["targets"];
    if (!ts.is_array() || ts.empty()) throw ScenarioError("scenario.targets: expected a non-empty array");
    for (std::size_t i = 0; i < ts.size(); ++i) w.targets.push_back(parse_target(ts[i], "targets[" + std::to_string(i) + "]"));
  } else {
    w.targets.push_back(parse_target(field(doc, "target", "scenario"), "target"));
  }

  const json& objs = field(doc, "objects", "scenario");
  if (!objs.is_array()) throw ScenarioError("scenario.objects: expected an array");
  for (std::size_t i = 0; i < objs.size(); ++i) {
    const std::string where = "objects[" + std::to_string(i) + "]";
    const json& jo = objs[i];
    ObjectBody o;
    const json& id = field(jo, "id", where);
    if (!id.is_number_integer()) throw ScenarioError(where + ".id: expected an integer");
    o.id = id.get<int>();
    o.shape = {{number(jo, "x", where), number(jo, "y", where)}, number(jo, "radius", where)};
    const json& cls = field(jo, "class", where);
    auto parsed = cls.is_string() ? parse_object_class(cls.get<std::string>()) : std::nullopt;
    if (!parsed) throw ScenarioError(where + ".class: expected \"fixed\" or \"movable\"");
    o.class_truth = *parsed;
    o.theta_truth = {number(jo, "K", where), number(jo, "D", where), number(jo, "C", where)};
    o.mass = number(jo, "mass", where);
    o.friction_coeff = number(jo, "friction", where);
    if (jo.contains("topple_threshold") && !jo["topple_threshold"].is_null())
      o.topple_threshold = number(jo, "topple_threshold", where);
    w.objects.push_back(o);
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer())
      throw ScenarioError("scenario.seed: expected an integer");
    w.seed = doc["seed"].get<std::uint64_t>();
  }
  if (auto err = validate(w)) throw ScenarioError("invalid scenario: " + *err);
  return w;
}

void write_scenario(const std::filesystem::path& path, const WorldState& world) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ScenarioError("cannot open " + path.string() + " for writing");
  out << scenario_to_json(world);
  if (!out) throw ScenarioError("write failed: " + path.string());
}

WorldState read_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(ss.str());
}

}  // namespace imp
