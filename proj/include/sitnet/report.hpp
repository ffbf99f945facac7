#pragma once

#include <string>

#include <json.hpp>

#include "sitnet/intersection.hpp"
#include "sitnet/io.hpp"

namespace sitnet {

inline ordered_json estimate_json(const Estimate& e) {
  return {{"mean", e.mean}, {"standard_error", e.standard_error}};
}

// IntersectionReport as JSON, field for field.
inline std::string report_to_json(const IntersectionReport& r) {
  ordered_json doc;
  doc["format"] = "sitnet-report-v1";
  doc["family"] = r.family.empty() ? ordered_json(nullptr) : ordered_json(r.family);
  doc["radius"] = r.radius ? ordered_json(*r.radius) : ordered_json(nullptr);
  doc["graph_hash"] = r.graph_hash;
  doc["vertices"] = r.vertices;
  doc["edges"] = r.edges;
  doc["max_degree"] = r.max_degree;
  doc["max_interior_degree"] = r.max_interior_degree;
  doc["E_edge"] = r.e_edge;
  doc["E_vertex"] = r.e_vertex;
  if (r.monte_carlo) {
    const auto& mc = *r.monte_carlo;
    doc["monte_carlo"] = {{"pairs", mc.pairs},
                          {"seed", mc.seed},
                          {"E_edge", estimate_json(mc.edge)},
                          {"E_vertex", estimate_json(mc.vertex)},
                          {"edge_count", estimate_json(mc.edge_count)}};
  } else {
    doc["monte_carlo"] = nullptr;
  }
  doc["energy_forward"] = r.energy_forward;
  doc["directed_energy_forward"] = r.directed_energy_forward;
  doc["energy_reconstructed"] = r.energy_reconstructed;
  doc["directed_energy_reconstructed"] = r.directed_energy_reconstructed;
  doc["escape_mass"] = r.escape_mass ? ordered_json(*r.escape_mass) : ordered_json(nullptr);
  doc["interior_absorbers"] = r.interior_absorbers;
  auto checks = ordered_json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"slack", c.slack}, {"detail", c.detail}});
  doc["checks"] = std::move(checks);
  doc["checks_passed"] = r.checks_passed();
  doc["checks_total"] = r.checks.size();
  return doc.dump(2) + "\n";
}

}  // namespace sitnet
