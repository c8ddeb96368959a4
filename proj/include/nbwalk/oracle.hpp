#pragma once

// Uniform access to finite multigraphs and lazily generated infinite graphs.
//
// An oracle answers, for a vertex v and a port p in [0, degree(v)), which
// vertex the dart (v, p) points to and at which port of that vertex the
// reversal dart sits. A dart is self-reversed exactly when it returns to
// the same vertex and port.

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <json.hpp>

#include "nbwalk/errors.hpp"
#include "nbwalk/multigraph.hpp"
#include "nbwalk/word.hpp"

namespace nbwalk {

using Port = std::uint32_t;

template <class V>
struct Step {
  V head;
  Port reverse_port;
};

template <class O>
concept GraphOracle = requires(const O& g, const typename O::vertex_type& v, Port p, const std::string& key) {
  typename O::vertex_hash;
  { g.root() } -> std::same_as<typename O::vertex_type>;
  { g.degree(v) } -> std::convertible_to<std::size_t>;
  { g.step(v, p) } -> std::same_as<Step<typename O::vertex_type>>;
  { g.canonical_key(v) } -> std::same_as<std::string>;
  { g.parse_key(key) } -> std::same_as<typename O::vertex_type>;
  { g.regular_degree() } -> std::same_as<std::optional<std::size_t>>;
  { g.family() } -> std::same_as<std::string>;
};

template <class V>
struct OracleDart {
  V tail;
  Port port;
  V head;
  Port reverse_port;
};

template <GraphOracle O>
std::vector<OracleDart<typename O::vertex_type>> darts_at(const O& g, const typename O::vertex_type& v) {
  std::vector<OracleDart<typename O::vertex_type>> out;
  const auto deg = g.degree(v);
  out.reserve(deg);
  for (Port p = 0; p < deg; ++p) {
    auto s = g.step(v, p);
    out.push_back({v, p, std::move(s.head), s.reverse_port});
  }
  return out;
}

template <class V>
bool self_reversed(const OracleDart<V>& e) {
  return e.tail == e.head && e.port == e.reverse_port;
}

/// Adapter over an immutable Multigraph; ports index the incidence lists.
class FiniteOracle {
 public:
  using vertex_type = VertexId;
  using vertex_hash = std::hash<VertexId>;

  explicit FiniteOracle(std::shared_ptr<const Multigraph> g, VertexId root = 0)
      : graph_(std::move(g)), root_(root), port_of_(graph_->dart_count()) {
    if (graph_->vertex_count() == 0) throw ConfigError("finite oracle over an empty graph");
    for (VertexId v = 0; v < graph_->vertex_count(); ++v) {
      const auto ds = graph_->darts_at(v);
      for (Port p = 0; p < ds.size(); ++p) port_of_[ds[p]] = p;
    }
  }

  VertexId root() const { return root_; }
  std::size_t degree(VertexId v) const { return graph_->degree(v); }
  Step<VertexId> step(VertexId v, Port p) const {
    const auto e = graph_->darts_at(v)[p];
    return {graph_->head(e), port_of_[graph_->reversal(e)]};
  }
  std::string canonical_key(VertexId v) const { return graph_->name(v); }
  VertexId parse_key(const std::string& key) const { return graph_->require(key); }
  std::optional<std::size_t> regular_degree() const { return graph_->regular_degree(); }
  std::string family() const { return "finite"; }

  const Multigraph& graph() const { return *graph_; }
  std::shared_ptr<const Multigraph> shared_graph() const { return graph_; }
  DartId dart(VertexId v, Port p) const { return graph_->darts_at(v)[p]; }
  Port port_of(DartId e) const { return port_of_[e]; }

 private:
  std::shared_ptr<const Multigraph> graph_;
  VertexId root_;
  std::vector<Port> port_of_;
};

namespace detail {
inline Word parse_word(const std::string& key, std::size_t alphabet, std::size_t first_alphabet) {
  Word w;
  for (std::size_t i = 0; i < key.size(); ++i) {
    const int s = key[i] - 'a';
    const auto limit = i == 0 ? first_alphabet : alphabet;
    if (s < 0 || static_cast<std::size_t>(s) >= limit)
      throw ConfigError("vertex key '" + key + "' uses a symbol outside the alphabet");
    if (!w.empty() && w.last() == s) throw ConfigError("vertex key '" + key + "' is not reduced");
    w = w.push(static_cast<Word::Symbol>(s));
  }
  return w;
}

inline void check_alphabet(std::size_t d) {
  if (d > 26) throw ConfigError("tree families support degree at most 26");
}
}  // namespace detail

/// The d-regular tree as words over d self-inverse symbols with no symbol
/// repeated consecutively. Port s moves along symbol s.
class RegularTreeOracle {
 public:
  using vertex_type = Word;
  using vertex_hash = WordHash;

  explicit RegularTreeOracle(std::size_t d) : d_(d) {
    if (d < 2) throw ConfigError("regular_tree requires d >= 2");
    detail::check_alphabet(d);
  }

  Word root() const { return {}; }
  std::size_t degree(const Word&) const { return d_; }
  Step<Word> step(const Word& v, Port p) const {
    const auto s = static_cast<Word::Symbol>(p);
    if (!v.empty() && v.last() == s) return {v.parent(), p};
    return {v.push(s), p};
  }
  std::string canonical_key(const Word& v) const { return v.to_string(); }
  Word parse_key(const std::string& key) const { return detail::parse_word(key, d_, d_); }
  std::optional<std::size_t> regular_degree() const { return d_; }
  std::string family() const { return "regular_tree"; }
  std::size_t d() const { return d_; }

 private:
  std::size_t d_;
};

/// The (d-1)-regular tree with one loop at every vertex; port d-1 is the loop.
class LoopedTreeOracle {
 public:
  using vertex_type = Word;
  using vertex_hash = WordHash;

  explicit LoopedTreeOracle(std::size_t d) : d_(d) {
    if (d < 3) throw ConfigError("looped_tree requires d >= 3");
    detail::check_alphabet(d);
  }

  Word root() const { return {}; }
  std::size_t degree(const Word&) const { return d_; }
  Step<Word> step(const Word& v, Port p) const {
    if (p == d_ - 1) return {v, p};
    const auto s = static_cast<Word::Symbol>(p);
    if (!v.empty() && v.last() == s) return {v.parent(), p};
    return {v.push(s), p};
  }
  std::string canonical_key(const Word& v) const { return v.to_string(); }
  Word parse_key(const std::string& key) const { return detail::parse_word(key, d_ - 1, d_ - 1); }
  std::optional<std::size_t> regular_degree() const { return d_; }
  std::string family() const { return "looped_tree"; }
  std::size_t d() const { return d_; }

 private:
  std::size_t d_;
};

struct CycleTreeVertex {
  std::uint32_t position = 0;  // cycle vertex the hanging tree is rooted at
  Word word;                   // path from that cycle vertex into its tree

  friend bool operator==(const CycleTreeVertex&, const CycleTreeVertex&) = default;
};

struct CycleTreeVertexHash {
  std::size_t operator()(const CycleTreeVertex& v) const noexcept {
    return static_cast<std::size_t>(v.word.hash() ^ (0x9e3779b97f4a7c15ULL * (v.position + 1)));
  }
};

/// A d-regular graph with exactly one simple cycle, of length L, through the
/// root: every cycle vertex carries d-2 hanging (d-1)-ary trees so that all
/// degrees equal d and the universal cover is the d-regular tree. For L = 1
/// the cycle is a loop at the root, which then carries d-1 hanging trees.
///
/// At a cycle vertex, ports below `tree_ports()` enter the hanging trees,
/// then come the forward and backward cycle ports (or the loop).
class TreePlusCycleOracle {
 public:
  using vertex_type = CycleTreeVertex;
  using vertex_hash = CycleTreeVertexHash;

  TreePlusCycleOracle(std::size_t d, std::size_t cycle_length) : d_(d), L_(cycle_length) {
    if (d < 2) throw ConfigError("tree_plus_cycle requires d >= 2");
    if (cycle_length < 1) throw ConfigError("tree_plus_cycle requires L >= 1");
    if (cycle_length == 1 && d < 2) throw ConfigError("tree_plus_cycle with a loop requires d >= 2");
    detail::check_alphabet(d);
  }

  CycleTreeVertex root() const { return {}; }
  std::size_t degree(const CycleTreeVertex&) const { return d_; }

  std::size_t tree_ports() const { return L_ == 1 ? d_ - 1 : d_ - 2; }
  std::size_t cycle_length() const { return L_; }
  std::size_t d() const { return d_; }
  bool on_cycle(const CycleTreeVertex& v) const { return v.word.empty(); }

  Step<CycleTreeVertex> step(const CycleTreeVertex& v, Port p) const {
    if (!v.word.empty()) {
      const auto s = static_cast<Word::Symbol>(p);
      if (v.word.last() == s) return {{v.position, v.word.parent()}, p};
      return {{v.position, v.word.push(s)}, p};
    }
    const auto t = tree_ports();
    if (p < t) return {{v.position, v.word.push(static_cast<Word::Symbol>(p))}, p};
    if (L_ == 1) return {v, p};  // the loop
    const auto L = static_cast<std::uint32_t>(L_);
    if (p == t) return {{(v.position + 1) % L, {}}, static_cast<Port>(t + 1)};
    return {{(v.position + L - 1) % L, {}}, static_cast<Port>(t)};
  }

  std::string canonical_key(const CycleTreeVertex& v) const {
    return "c" + std::to_string(v.position) + "/" + v.word.to_string();
  }

  CycleTreeVertex parse_key(const std::string& key) const {
    const auto slash = key.find('/');
    if (key.empty() || key[0] != 'c' || slash == std::string::npos)
      throw ConfigError("tree_plus_cycle vertex keys look like 'c<i>/<word>', got '" + key + "'");
    std::size_t pos = 0;
    try {
      pos = std::stoul(key.substr(1, slash - 1));
    } catch (const std::exception&) {
      throw ConfigError("bad cycle position in '" + key + "'");
    }
    if (pos >= L_) throw ConfigError("cycle position out of range in '" + key + "'");
    return {static_cast<std::uint32_t>(pos), detail::parse_word(key.substr(slash + 1), d_, tree_ports())};
  }

  std::optional<std::size_t> regular_degree() const { return d_; }
  std::string family() const { return "tree_plus_cycle"; }

 private:
  std::size_t d_;
  std::size_t L_;
};

static_assert(GraphOracle<FiniteOracle>);
static_assert(GraphOracle<RegularTreeOracle>);
static_assert(GraphOracle<LoopedTreeOracle>);
static_assert(GraphOracle<TreePlusCycleOracle>);

using AnyOracle = std::variant<FiniteOracle, RegularTreeOracle, LoopedTreeOracle, TreePlusCycleOracle>;

/// Description of a graph family, as found in CLI configs:
/// {"family":"regular_tree","d":3}, {"family":"cycle","k":5},
/// {"family":"finite","graph":{...}} or {"family":"finite","path":"g.json"}.
struct FamilySpec {
  std::string family;
  std::size_t d = 0;
  std::size_t L = 0;
  std::size_t k = 0;
  std::size_t m = 0;
  std::size_t j = 0;
  std::shared_ptr<const Multigraph> graph;  // for "finite"
  nlohmann::json source;                    // echo for manifests

  static FamilySpec regular_tree(std::size_t d) { return with("regular_tree", {{"d", d}}); }
  static FamilySpec looped_tree(std::size_t d) { return with("looped_tree", {{"d", d}}); }
  static FamilySpec tree_plus_cycle(std::size_t d, std::size_t L) {
    return with("tree_plus_cycle", {{"d", d}, {"L", L}});
  }
  static FamilySpec cycle(std::size_t k) { return with("cycle", {{"k", k}}); }
  static FamilySpec complete(std::size_t m) { return with("complete", {{"m", m}}); }
  static FamilySpec bouquet(std::size_t j) { return with("bouquet", {{"j", j}}); }
  static FamilySpec finite(std::shared_ptr<const Multigraph> g) {
    FamilySpec s;
    s.family = "finite";
    s.graph = std::move(g);
    s.source = {{"family", "finite"}, {"graph", graph_to_json(*s.graph)}};
    return s;
  }

  static FamilySpec from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("family") || !j.at("family").is_string())
      throw ConfigError("family spec must be an object with a string 'family'");
    FamilySpec s;
    s.family = j.at("family").get<std::string>();
    auto take = [&j](const char* key, std::size_t& out) {
      if (!j.contains(key)) return;
      const auto& v = j.at(key);
      if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError(std::string("family parameter '") + key + "' must be a non-negative integer");
      out = v.get<std::size_t>();
    };
    take("d", s.d);
    take("L", s.L);
    take("k", s.k);
    take("m", s.m);
    take("j", s.j);
    if (s.family == "finite") {
      if (!j.contains("graph")) throw ConfigError("finite family needs an inline 'graph' object");
      s.graph = std::make_shared<const Multigraph>(graph_from_json(j.at("graph")));
    }
    s.source = j;
    return s;
  }

  nlohmann::json to_json() const { return source; }

 private:
  static FamilySpec with(std::string name, nlohmann::json params) {
    params["family"] = name;
    return from_json(params);
  }
};

inline AnyOracle make_oracle(const FamilySpec& s) {
  if (s.family == "regular_tree") return RegularTreeOracle(s.d);
  if (s.family == "looped_tree") return LoopedTreeOracle(s.d);
  if (s.family == "tree_plus_cycle") return TreePlusCycleOracle(s.d, s.L);
  if (s.family == "finite") {
    if (!s.graph) throw ConfigError("finite family without a graph");
    return FiniteOracle(s.graph);
  }
  if (s.family == "cycle") return FiniteOracle(std::make_shared<const Multigraph>(make_cycle(s.k)));
  if (s.family == "complete") return FiniteOracle(std::make_shared<const Multigraph>(make_complete(s.m)));
  if (s.family == "bouquet") return FiniteOracle(std::make_shared<const Multigraph>(make_bouquet(s.j)));
  throw ConfigError("unknown graph family '" + s.family + "'");
}

struct Ball {
  Multigraph graph;            // names are canonical keys of the oracle
  VertexId center = 0;
  std::vector<std::size_t> distance;
  std::vector<bool> boundary;  // distance exactly r

  std::size_t boundary_size() const {
    return static_cast<std::size_t>(std::count(boundary.begin(), boundary.end(), true));
  }
};

/// Induced multigraph on the vertices within distance r of o. Darts are
/// added vertex by vertex in BFS order, ports ascending.
template <GraphOracle O>
Ball ball(const O& g, const typename O::vertex_type& o, std::size_t r,
          std::size_t max_vertices = std::size_t{1} << 22) {
  using V = typename O::vertex_type;
  std::vector<V> keys{o};
  std::unordered_map<V, VertexId, typename O::vertex_hash> ids{{o, 0}};
  Ball b;
  b.distance.push_back(0);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (b.distance[i] == r) continue;
    const auto deg = g.degree(keys[i]);
    for (Port p = 0; p < deg; ++p) {
      auto s = g.step(keys[i], p);
      if (ids.contains(s.head)) continue;
      if (keys.size() >= max_vertices)
        throw ResourceGuardError("ball-size", "ball of radius " + std::to_string(r) + " exceeds " +
                                                  std::to_string(max_vertices) + " vertices");
      ids.emplace(s.head, static_cast<VertexId>(keys.size()));
      keys.push_back(std::move(s.head));
      b.distance.push_back(b.distance[i] + 1);
    }
  }
  for (const auto& k : keys) b.graph.add_vertex(g.canonical_key(k));
  for (VertexId v = 0; v < keys.size(); ++v) {
    const auto deg = g.degree(keys[v]);
    for (Port p = 0; p < deg; ++p) {
      const auto s = g.step(keys[v], p);
      const auto it = ids.find(s.head);
      if (it == ids.end()) continue;
      const auto h = it->second;
      if (h == v && s.reverse_port == p) {
        b.graph.add_loop(v);
      } else if (std::pair(v, p) < std::pair(h, s.reverse_port)) {
        b.graph.add_edge(v, h);
      }
    }
  }
  b.boundary.resize(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) b.boundary[i] = b.distance[i] == r;
  return b;
}

/// Materializes the part of an oracle that a walk touches, as a Multigraph
/// with dense local ids, so path algorithms can work on plain integers.
template <GraphOracle O>
class Explorer {
 public:
  using V = typename O::vertex_type;

  explicit Explorer(const O& g) : oracle_(g), graph_(std::make_shared<Multigraph>()) {}

  VertexId intern(const V& v) {
    if (auto it = ids_.find(v); it != ids_.end()) return it->second;
    const auto id = graph_->add_vertex();
    ids_.emplace(v, id);
    keys_.push_back(v);
    ports_.emplace_back(oracle_.degree(v), kUnexplored);
    return id;
  }

  std::size_t degree(VertexId v) const { return ports_[v].size(); }

  /// Dart leaving local vertex v through port p, exploring it on first use.
  DartId dart(VertexId v, Port p) {
    if (auto e = ports_[v][p]; e != kUnexplored) return e;
    const auto s = oracle_.step(keys_[v], p);
    const auto h = intern(s.head);
    DartId e;
    if (h == v && s.reverse_port == p) {
      e = graph_->add_loop(v);
    } else {
      e = graph_->add_edge(v, h);
      ports_[h][s.reverse_port] = e + 1;
    }
    ports_[v][p] = e;
    return e;
  }

  /// Port of dart e at its tail.
  Port port_of(DartId e) const { return dart_ports_at(e); }

  const V& key(VertexId v) const { return keys_[v]; }
  const Multigraph& graph() const { return *graph_; }

  /// Hands out the explored graph; names are canonical keys when requested.
  std::shared_ptr<const Multigraph> finish(bool with_names) {
    if (!with_names) return graph_;
    auto named = std::make_shared<Multigraph>();
    for (const auto& k : keys_) named->add_vertex(oracle_.canonical_key(k));
    for (const auto& e : graph_->darts()) {
      if (e.is_loop())
        named->add_loop(e.tail);
      else if (e.id < e.reversal)
        named->add_edge(e.tail, e.head);
    }
    return named;
  }

 private:
  static constexpr DartId kUnexplored = static_cast<DartId>(-1);

  Port dart_ports_at(DartId e) const {
    const auto& ps = ports_[graph_->tail(e)];
    for (Port p = 0; p < ps.size(); ++p)
      if (ps[p] == e) return p;
    return static_cast<Port>(-1);
  }

  const O& oracle_;
  std::shared_ptr<Multigraph> graph_;
  std::unordered_map<V, VertexId, typename O::vertex_hash> ids_;
  std::vector<V> keys_;
  std::vector<std::vector<DartId>> ports_;
};

}  // namespace nbwalk
