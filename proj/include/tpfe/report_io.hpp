// JSON and CSV serialization of study reports.
#pragma once

#include <cmath>
#include <ostream>
#include <string>

#include "json.hpp"

#include "tpfe/studies.hpp"

namespace tpfe {

inline nlohmann::json config_to_json(const StudyConfig& c) {
  nlohmann::json j;
  j["study"] = c.study;
  j["d"] = c.d;
  j["k"] = c.k;
  j["K"] = c.K;
  j["l"] = c.l;
  j["r"] = c.r;
  j["p"] = std::isinf(c.p) ? nlohmann::json("inf") : nlohmann::json(c.p);
  j["q"] = std::isinf(c.q) ? nlohmann::json("inf") : nlohmann::json(c.q);
  j["ladder"] = c.ladder;
  j["k_range"] = {c.k_min, c.k_max};
  j["field"] = c.field;
  j["family"] = to_string(c.family);
  j["seed"] = c.seed;
  j["tolerance"] = c.tolerance;
  j["samples"] = c.samples;
  j["box"] = {c.lo, c.hi};
  return j;
}

inline nlohmann::json report_to_json(const StudyReport& r) {
  nlohmann::json j;
  j["study"] = r.study;
  j["config"] = config_to_json(r.config);
  j["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows) j["rows"].push_back({{"scale", row.scale}, {"error", row.error}});
  j["slope"] = r.fit ? nlohmann::json(r.fit->slope) : nlohmann::json(nullptr);
  j["intercept"] = r.fit ? nlohmann::json(r.fit->intercept) : nlohmann::json(nullptr);
  j["target"] = r.target ? nlohmann::json(*r.target) : nlohmann::json(nullptr);
  j["tolerance"] = r.tolerance;
  j["pass"] = r.pass;
  j["outcome"] = r.outcome;
  j["wall_ms"] = r.wall_ms;
  j["seed"] = r.seed;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : r.checks) j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  j["notes"] = r.notes;
  return j;
}

/// `scale,error` rows followed by `# key=value` comment lines.
inline void write_csv(std::ostream& os, const StudyReport& r) {
  os.precision(17);
  os << "scale,error\n";
  for (const auto& row : r.rows) os << row.scale << "," << row.error << "\n";
  os.precision(8);
  os << "# slope=" << (r.fit ? std::to_string(r.fit->slope) : std::string("none"))
     << ",target=" << (r.target ? std::to_string(*r.target) : std::string("none")) << ",pass=" << (r.pass ? "true" : "false")
     << "\n";
  os << "# study=" << r.study << ",outcome=" << r.outcome << ",seed=" << r.seed << ",wall_ms=" << r.wall_ms << "\n";
  for (const auto& c : r.checks) os << "# check " << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  for (const auto& n : r.notes) os << "# note " << n << "\n";
}

}  // namespace tpfe
