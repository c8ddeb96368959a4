#pragma once

// Dart-based multigraph kernel.
//
// Every non-loop edge contributes two darts that are each other's reversal;
// a loop contributes a single self-reversed dart and adds 1 to the degree of
// its vertex.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nbwalk/errors.hpp"

namespace nbwalk {

using VertexId = std::uint32_t;
using DartId = std::uint32_t;

struct Dart {
  DartId id = 0;
  VertexId tail = 0;
  VertexId head = 0;
  DartId reversal = 0;

  bool is_loop() const noexcept { return reversal == id; }
};

class Multigraph {
 public:
  Multigraph() = default;

  /// Adds an unnamed vertex; its display name is its decimal id.
  VertexId add_vertex() {
    incidence_.emplace_back();
    if (!names_.empty()) names_.push_back(std::to_string(incidence_.size() - 1));
    return static_cast<VertexId>(incidence_.size() - 1);
  }

  VertexId add_vertex(std::string name) {
    if (index_.contains(name)) throw ConfigError("duplicate vertex key '" + name + "'");
    if (names_.empty()) {
      names_.reserve(incidence_.size() + 1);
      for (std::size_t v = 0; v < incidence_.size(); ++v) names_.push_back(std::to_string(v));
    }
    const auto v = static_cast<VertexId>(incidence_.size());
    incidence_.emplace_back();
    index_.emplace(name, v);
    names_.push_back(std::move(name));
    return v;
  }

  /// Adds a non-loop edge; returns the dart u→v. Its reversal has id + 1.
  DartId add_edge(VertexId u, VertexId v) {
    check_vertex(u);
    check_vertex(v);
    if (u == v) throw ConfigError("edge with equal endpoints; list it as a loop");
    const auto e = static_cast<DartId>(darts_.size());
    darts_.push_back({e, u, v, e + 1});
    darts_.push_back({e + 1, v, u, e});
    incidence_[u].push_back(e);
    incidence_[v].push_back(e + 1);
    return e;
  }

  DartId add_loop(VertexId v) {
    check_vertex(v);
    const auto e = static_cast<DartId>(darts_.size());
    darts_.push_back({e, v, v, e});
    incidence_[v].push_back(e);
    return e;
  }

  std::size_t vertex_count() const noexcept { return incidence_.size(); }
  std::size_t dart_count() const noexcept { return darts_.size(); }

  const Dart& dart(DartId e) const { return darts_.at(e); }
  std::span<const Dart> darts() const noexcept { return darts_; }
  VertexId tail(DartId e) const { return darts_[e].tail; }
  VertexId head(DartId e) const { return darts_[e].head; }
  DartId reversal(DartId e) const { return darts_[e].reversal; }

  /// Darts with tail v, sorted by dart id.
  std::span<const DartId> darts_at(VertexId v) const { return incidence_.at(v); }
  std::size_t degree(VertexId v) const { return incidence_.at(v).size(); }

  std::string name(VertexId v) const {
    return names_.empty() ? std::to_string(v) : names_.at(v);
  }
  bool has_names() const noexcept { return !names_.empty(); }

  std::optional<VertexId> find(const std::string& name) const {
    if (names_.empty()) {
      // Unnamed graphs answer to decimal ids.
      try {
        std::size_t pos = 0;
        const auto v = std::stoul(name, &pos);
        if (pos == name.size() && v < vertex_count()) return static_cast<VertexId>(v);
      } catch (const std::exception&) {
      }
      return std::nullopt;
    }
    const auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  VertexId require(const std::string& name) const {
    if (auto v = find(name)) return *v;
    throw ConfigError("unknown vertex '" + name + "'");
  }

  std::size_t min_degree() const {
    std::size_t m = vertex_count() == 0 ? 0 : degree(0);
    for (VertexId v = 0; v < vertex_count(); ++v) m = std::min(m, degree(v));
    return m;
  }

  /// The common degree when the graph is regular.
  std::optional<std::size_t> regular_degree() const {
    if (vertex_count() == 0) return std::nullopt;
    const auto d = degree(0);
    for (VertexId v = 1; v < vertex_count(); ++v)
      if (degree(v) != d) return std::nullopt;
    return d;
  }

  bool is_regular(std::size_t d) const { return regular_degree() == d; }

 private:
  void check_vertex(VertexId v) const {
    if (v >= incidence_.size()) throw ConfigError("vertex id out of range");
  }

  std::vector<Dart> darts_;
  std::vector<std::vector<DartId>> incidence_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, VertexId> index_;
};

/// Builds a graph from keyed edges and loops. Non-loop edge k yields darts
/// 2k, 2k+1; loop j yields dart 2|edges| + j. Vertices are numbered in the
/// order of `vertices` followed by first appearance in `edges` and `loops`.
inline Multigraph build_graph(const std::vector<std::pair<std::string, std::string>>& edges,
                              const std::vector<std::string>& loops,
                              const std::vector<std::string>& vertices = {}) {
  Multigraph g;
  auto intern = [&g](const std::string& key) {
    if (auto v = g.find(key); v && g.has_names()) return *v;
    return g.add_vertex(key);
  };
  for (const auto& v : vertices) {
    if (g.has_names() && g.find(v)) throw ConfigError("duplicate vertex key '" + v + "'");
    g.add_vertex(v);
  }
  for (const auto& [u, v] : edges) intern(u), intern(v);
  for (const auto& v : loops) intern(v);
  if (g.vertex_count() == 0) throw ConfigError("graph has no vertices");
  for (const auto& [u, v] : edges) g.add_edge(g.require(u), g.require(v));
  for (const auto& v : loops) g.add_loop(g.require(v));
  return g;
}

/// Integer-keyed convenience form: vertices 0..n-1.
inline Multigraph build_graph(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                              const std::vector<std::size_t>& loops = {}) {
  if (n == 0) throw ConfigError("graph has no vertices");
  Multigraph g;
  for (std::size_t v = 0; v < n; ++v) g.add_vertex(std::to_string(v));
  for (const auto& [u, v] : edges) g.add_edge(static_cast<VertexId>(u), static_cast<VertexId>(v));
  for (auto v : loops) g.add_loop(static_cast<VertexId>(v));
  return g;
}

struct ValidationReport {
  std::size_t vertex_count = 0;
  std::size_t dart_count = 0;
  std::vector<std::string> involution_violations;
  bool connected = false;
  std::optional<std::size_t> regular_degree;
  std::size_t min_degree = 0;

  bool involution_ok() const noexcept { return involution_violations.empty(); }
  bool ok() const noexcept { return involution_ok() && connected; }
};

inline ValidationReport validate(const Multigraph& g) {
  ValidationReport r;
  r.vertex_count = g.vertex_count();
  r.dart_count = g.dart_count();
  r.regular_degree = g.regular_degree();
  r.min_degree = g.min_degree();

  for (const auto& e : g.darts()) {
    const auto& rev = g.dart(e.reversal);
    if (rev.reversal != e.id)
      r.involution_violations.push_back("reversal(reversal(" + std::to_string(e.id) + ")) != itself");
    if ((e.reversal == e.id) != (e.tail == e.head))
      r.involution_violations.push_back("dart " + std::to_string(e.id) +
                                        ": self-reversed iff loop fails");
    if (rev.tail != e.head)
      r.involution_violations.push_back("tail(reversal(" + std::to_string(e.id) + ")) != head");
  }
  std::vector<std::size_t> seen(g.dart_count(), 0);
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    for (auto e : g.darts_at(v)) {
      ++seen[e];
      if (g.tail(e) != v)
        r.involution_violations.push_back("dart " + std::to_string(e) + " listed at a non-tail vertex");
    }
  for (DartId e = 0; e < seen.size(); ++e)
    if (seen[e] != 1)
      r.involution_violations.push_back("dart " + std::to_string(e) + " appears " +
                                        std::to_string(seen[e]) + " times in incidence lists");

  if (g.vertex_count() > 0) {
    std::vector<bool> reached(g.vertex_count(), false);
    std::deque<VertexId> queue{0};
    reached[0] = true;
    std::size_t count = 1;
    while (!queue.empty()) {
      const auto v = queue.front();
      queue.pop_front();
      for (auto e : g.darts_at(v)) {
        const auto h = g.head(e);
        if (!reached[h]) {
          reached[h] = true;
          ++count;
          queue.push_back(h);
        }
      }
    }
    r.connected = count == g.vertex_count();
  }
  return r;
}

// Built-in finite families.

inline Multigraph make_cycle(std::size_t k) {
  if (k < 3) throw ConfigError("cycle requires k >= 3");
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < k; ++i) edges.emplace_back(i, (i + 1) % k);
  return build_graph(k, edges);
}

inline Multigraph make_complete(std::size_t m) {
  if (m < 2) throw ConfigError("complete graph requires m >= 2");
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) edges.emplace_back(i, j);
  return build_graph(m, edges);
}

inline Multigraph make_bouquet(std::size_t j) {
  if (j < 1) throw ConfigError("bouquet requires j >= 1");
  return build_graph(1, {}, std::vector<std::size_t>(j, 0));
}

inline Multigraph make_petersen() {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < 5; ++i) {
    edges.emplace_back(i, (i + 1) % 5);          // outer 5-cycle
    edges.emplace_back(i, i + 5);                // spokes
    edges.emplace_back(5 + i, 5 + (i + 2) % 5);  // inner pentagram
  }
  return build_graph(10, edges);
}

// Graph file format: {"vertices":[...], "edges":[[u,v],...], "loops":[v,...]}.
// Vertex keys may be JSON strings or integers.

namespace detail {
inline std::string key_of(const nlohmann::json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw ConfigError("vertex keys must be strings or integers, got " + j.dump());
}
}  // namespace detail

inline Multigraph graph_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("graph document must be a JSON object");
  std::vector<std::string> vertices, loops;
  std::vector<std::pair<std::string, std::string>> edges;
  if (j.contains("vertices"))
    for (const auto& v : j.at("vertices")) vertices.push_back(detail::key_of(v));
  if (j.contains("edges"))
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw ConfigError("edge must be a pair: " + e.dump());
      edges.emplace_back(detail::key_of(e[0]), detail::key_of(e[1]));
    }
  if (j.contains("loops"))
    for (const auto& v : j.at("loops")) loops.push_back(detail::key_of(v));
  return build_graph(edges, loops, vertices);
}

inline nlohmann::json graph_to_json(const Multigraph& g) {
  nlohmann::json vertices = nlohmann::json::array(), edges = nlohmann::json::array(),
                 loops = nlohmann::json::array();
  for (VertexId v = 0; v < g.vertex_count(); ++v) vertices.push_back(g.name(v));
  for (const auto& e : g.darts()) {
    if (e.is_loop())
      loops.push_back(g.name(e.tail));
    else if (e.id < e.reversal)
      edges.push_back({g.name(e.tail), g.name(e.head)});
  }
  return {{"vertices", vertices}, {"edges", edges}, {"loops", loops}};
}

inline nlohmann::json to_json(const ValidationReport& r) {
  nlohmann::json j{{"vertex_count", r.vertex_count},
                   {"dart_count", r.dart_count},
                   {"involution_ok", r.involution_ok()},
                   {"involution_violations", r.involution_violations},
                   {"connected", r.connected},
                   {"min_degree", r.min_degree}};
  j["regular_degree"] = r.regular_degree ? nlohmann::json(*r.regular_degree) : nlohmann::json(nullptr);
  return j;
}

}  // namespace nbwalk
