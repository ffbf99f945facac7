#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sitnet/error.hpp"
#include "sitnet/network.hpp"
#include "sitnet/solver.hpp"

namespace sitnet {

inline constexpr std::string_view kGraphFormat = "sitnet-graph-v1";
inline constexpr std::string_view kFlowFormat = "sitnet-flow-v1";

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Files

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw InputError("write to '" + path + "' failed");
}

// 64-bit FNV-1a, printed as 16 lowercase hex digits.
inline std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Network JSON

// Canonical single-line document plus trailing newline.
inline std::string network_to_json(const Network& net) {
  ordered_json doc;
  doc["format"] = kGraphFormat;
  doc["root"] = net.root();
  doc["sink"] = net.sink() ? ordered_json(*net.sink()) : ordered_json(nullptr);
  doc["vertices"] = net.vertex_count();
  auto edges = ordered_json::array();
  for (const Edge& e : net.edges()) edges.push_back({e.u, e.v, e.conductance});
  doc["edges"] = std::move(edges);
  return doc.dump() + "\n";
}

// Content hash of the canonical encoding; embedded in every derived file.
inline std::string graph_hash(const Network& net) { return fnv1a_hex(network_to_json(net)); }

namespace detail {

inline ordered_json parse_json(std::string_view text, std::string_view what) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("malformed " + std::string(what) + ": " + e.what());
  }
}

inline VertexId vertex_field(const ordered_json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0 ||
      j.get<std::int64_t>() > std::int64_t{UINT32_MAX})
    throw InputError(where + " must be a nonnegative integer vertex id");
  return static_cast<VertexId>(j.get<std::int64_t>());
}

inline void expect_format(const ordered_json& doc, std::string_view format) {
  if (!doc.is_object()) throw InputError("expected a JSON object");
  if (!doc.contains("format") || doc["format"] != format)
    throw InputError("expected \"format\": \"" + std::string(format) + "\"");
}

}  // namespace detail

// Parses a sitnet-graph-v1 document. Duplicate edges are merged by the
// parallel law; one message per merged pair is appended to `warnings`.
inline Network network_from_json(std::string_view text,
                                 std::vector<std::string>* warnings = nullptr) {
  const ordered_json doc = detail::parse_json(text, "graph file");
  detail::expect_format(doc, kGraphFormat);
  for (const char* key : {"root", "sink", "vertices", "edges"})
    if (!doc.contains(key)) throw InputError(std::string("graph file lacks \"") + key + "\"");
  const auto& vertices = doc["vertices"];
  if (!vertices.is_number_integer() || vertices.get<std::int64_t>() <= 0)
    throw InputError("\"vertices\" must be a positive integer");
  NetworkBuilder b(vertices.get<std::size_t>());
  b.root(detail::vertex_field(doc["root"], "\"root\""));
  if (!doc["sink"].is_null()) b.sink(detail::vertex_field(doc["sink"], "\"sink\""));
  if (!doc["edges"].is_array()) throw InputError("\"edges\" must be an array");
  std::size_t index = 0;
  for (const auto& item : doc["edges"]) {
    const std::string where = "edges[" + std::to_string(index++) + "]";
    if (!item.is_array() || item.size() != 3 || !item[2].is_number())
      throw InputError(where + " must be [u, v, conductance]");
    const VertexId u = detail::vertex_field(item[0], where + "[0]");
    const VertexId v = detail::vertex_field(item[1], where + "[1]");
    try {
      b.add_edge(u, v, item[2].get<double>());
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  Network net = b.build();
  if (warnings) {
    for (const auto& [u, v] : b.merged_pairs())
      warnings->push_back("duplicate edge (" + std::to_string(u) + "," + std::to_string(v) +
                          ") merged with summed conductance");
  }
  return net;
}

inline Network read_network(const std::string& path, std::vector<std::string>* warnings = nullptr) {
  return network_from_json(read_text_file(path), warnings);
}

inline void write_network(const std::string& path, const Network& net) {
  write_text_file(path, network_to_json(net));
}

// ---------------------------------------------------------------------------
// Flow JSON

inline std::string flow_to_json(const Flow& flow) {
  ordered_json doc;
  doc["format"] = kFlowFormat;
  doc["graph_hash"] = graph_hash(flow.network());
  doc["strength"] = flow.strength();
  auto edges = ordered_json::array();
  const auto all = flow.network().edges();
  for (EdgeId e = 0; e < all.size(); ++e) edges.push_back({all[e].u, all[e].v, flow.values()[e]});
  doc["edges"] = std::move(edges);
  return doc.dump() + "\n";
}

// Parses a sitnet-flow-v1 document against `net`. The graph hash must match;
// edges absent from the file carry zero flow; [v, u, x] with v > u is read as
// F(u, v) = -x.
inline Flow flow_from_json(std::string_view text, std::shared_ptr<const Network> net) {
  const ordered_json doc = detail::parse_json(text, "flow file");
  detail::expect_format(doc, kFlowFormat);
  for (const char* key : {"graph_hash", "strength", "edges"})
    if (!doc.contains(key)) throw InputError(std::string("flow file lacks \"") + key + "\"");
  if (!doc["graph_hash"].is_string() || doc["graph_hash"].get<std::string>() != graph_hash(*net))
    throw InputError("flow file graph_hash does not match the graph");
  if (!doc["strength"].is_number()) throw InputError("\"strength\" must be a number");
  if (!doc["edges"].is_array()) throw InputError("\"edges\" must be an array");
  std::vector<double> values(net->edge_count(), 0.0);
  std::vector<char> assigned(net->edge_count(), 0);
  std::size_t index = 0;
  for (const auto& item : doc["edges"]) {
    const std::string where = "edges[" + std::to_string(index++) + "]";
    if (!item.is_array() || item.size() != 3 || !item[2].is_number())
      throw InputError(where + " must be [u, v, F]");
    const VertexId u = detail::vertex_field(item[0], where + "[0]");
    const VertexId v = detail::vertex_field(item[1], where + "[1]");
    const auto e = net->find_edge(u, v);
    if (!e) throw InputError(where + ": (" + std::to_string(u) + "," + std::to_string(v) +
                             ") is not an edge of the graph");
    if (assigned[*e]) throw InputError(where + ": edge listed twice");
    assigned[*e] = 1;
    const double x = item[2].get<double>();
    if (!std::isfinite(x)) throw InputError(where + ": non-finite flow value");
    values[*e] = u < v ? x : -x;
  }
  return Flow(std::move(net), std::move(values), doc["strength"].get<double>());
}

inline Flow read_flow(const std::string& path, std::shared_ptr<const Network> net) {
  return flow_from_json(read_text_file(path), std::move(net));
}

inline void write_flow(const std::string& path, const Flow& flow) {
  write_text_file(path, flow_to_json(flow));
}

}  // namespace sitnet
