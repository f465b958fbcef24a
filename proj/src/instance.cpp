#include "abp/instance.hpp"

#include "abp/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace abp {

using nlohmann::json;

bool Instance::all_finite() const {
  for (const auto& d : items)
    if (!d.is_finite()) return false;
  return true;
}

bool Instance::iid() const {
  for (std::size_t i = 1; i < items.size(); ++i)
    if (!items[i].same_law(items[0])) return false;
  return true;
}

void Instance::validate() const {
  if (items.empty()) throw validation_error("instance has no items");
  if (penalty < 1) throw validation_error("penalty must be >= 1");
  if (capacity <= 0) throw validation_error("capacity must be positive");
}

std::string format_double(double x) {
  char buf[64];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

namespace {

json dist_to_json(const SizeDistribution& d) {
  json j;
  if (d.is_finite()) {
    j["kind"] = "discrete";
    json atoms = json::array();
    for (const auto& a : d.fin().atoms)
      atoms.push_back({format_rational(a.value), format_rational(a.prob)});
    j["atoms"] = std::move(atoms);
  } else {
    j["kind"] = "exponential";
    j["rate"] = format_double(d.rate());
  }
  return j;
}

SizeDistribution dist_from_json(const json& j) {
  if (!j.contains("kind")) throw validation_error("item without kind");
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "discrete") {
    std::vector<Atom> atoms;
    for (const auto& a : j.at("atoms")) {
      if (!a.is_array() || a.size() != 2) throw validation_error("atom must be [value, prob]");
      atoms.push_back({parse_rational(a[0].get<std::string>()),
                       parse_rational(a[1].get<std::string>())});
    }
    return SizeDistribution::finite(std::move(atoms));
  }
  if (kind == "exponential") {
    return SizeDistribution::exponential(std::strtod(j.at("rate").get<std::string>().c_str(), nullptr));
  }
  throw validation_error("unknown item kind: " + kind);
}

json instance_to_json_obj(const Instance& inst) {
  json j;
  j["penalty"] = format_rational(inst.penalty);
  j["capacity"] = format_rational(inst.capacity);
  json items = json::array();
  std::size_t i = 0;
  while (i < inst.items.size()) {
    std::size_t run = 1;
    while (i + run < inst.items.size() && inst.items[i + run].same_law(inst.items[i])) ++run;
    json item = dist_to_json(inst.items[i]);
    if (run > 1) item["repeat"] = run;
    items.push_back(std::move(item));
    i += run;
  }
  j["items"] = std::move(items);
  return j;
}

}  // namespace

std::string instance_to_json(const Instance& inst) {
  return instance_to_json_obj(inst).dump(2);
}

Instance instance_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw validation_error(std::string("bad instance JSON: ") + e.what());
  }
  Instance inst;
  try {
    inst.penalty = parse_rational(j.at("penalty").get<std::string>());
    if (j.contains("capacity")) inst.capacity = parse_rational(j.at("capacity").get<std::string>());
    for (const auto& item : j.at("items")) {
      std::size_t repeat = item.contains("repeat") ? item.at("repeat").get<std::size_t>() : 1;
      if (repeat == 0 || repeat > 100000000) throw validation_error("bad repeat count");
      SizeDistribution d = dist_from_json(item);
      for (std::size_t k = 0; k < repeat; ++k) inst.items.push_back(d);
    }
  } catch (const json::exception& e) {
    throw validation_error(std::string("bad instance JSON: ") + e.what());
  }
  inst.validate();
  return inst;
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write " + path);
  out << instance_to_json(inst) << "\n";
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return instance_from_json(ss.str());
}

std::uint64_t instance_digest(const Instance& inst) {
  std::string s = instance_to_json(inst);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace abp
