#pragma once

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace pw::graph {

enum class SlotState { Paired, Cusp, Boundary, Frontier };

struct SlotRef {
  std::string vertex;
  int slot = 0;

  std::string str() const { return vertex + "." + std::to_string(slot); }
  static SlotRef parse(std::string_view text);
  friend auto operator<=>(const SlotRef&, const SlotRef&) = default;
};

/// Integer level n, or the intermediate level (n, n+1).
struct Level {
  int n = 0;
  bool intermediate = false;

  static Level at(int n) { return {n, false}; }
  static Level between(int n) { return {n, true}; }
  std::string str() const;
  static Level parse(std::string_view text);
  friend auto operator<=>(const Level&, const Level&) = default;
};

struct Slot {
  SlotState state = SlotState::Cusp;
  std::string edge;  // when Paired
  // Free boundary curves may carry a level and a length.
  std::optional<Level> level;
  std::optional<double> length;

  friend bool operator==(const Slot&, const Slot&) = default;
};

struct Vertex {
  std::string id;
  std::array<Slot, 3> slots;

  friend bool operator==(const Vertex&, const Vertex&) = default;
};

struct Edge {
  std::string id;  // `<a>~<b>` with a < b as strings
  SlotRef a, b;
  std::optional<Level> level;
  std::optional<double> length;
  std::optional<double> twist;

  bool is_loop() const { return a.vertex == b.vertex; }
  const SlotRef& other(const SlotRef& s) const { return s == a ? b : a; }
  friend bool operator==(const Edge&, const Edge&) = default;
};

std::string edge_id(const SlotRef& a, const SlotRef& b);
bool valid_vertex_id(std::string_view id);

/// Finite trivalent half-edge graph. Each vertex is a pair of pants and each
/// slot one of its cuffs.
class TruncatedGraph {
 public:
  /// New vertex with three cusp slots. Throws InvalidParameters on bad or
  /// duplicate ids.
  Vertex& add_vertex(const std::string& id);
  /// Pairs two free slots; returns the new edge id. Throws SlotOccupied.
  const std::string& pair(const SlotRef& a, const SlotRef& b);
  /// Removes an edge, leaving both slots in `state`.
  Edge unpair(const std::string& edge, SlotState state = SlotState::Boundary);
  void set_free(const SlotRef& s, SlotState state);
  void remove_vertex(const std::string& id, SlotState neighbour_state = SlotState::Frontier);

  bool has_vertex(const std::string& id) const { return vertices_.count(id) != 0; }
  bool has_edge(const std::string& id) const { return edges_.count(id) != 0; }
  const Vertex& vertex(const std::string& id) const;
  Vertex& vertex(const std::string& id);
  const Edge& edge(const std::string& id) const;
  Edge& edge(const std::string& id);
  const Slot& slot(const SlotRef& s) const;
  Slot& slot(const SlotRef& s);
  /// The slot across the edge at s (s must be paired).
  SlotRef across(const SlotRef& s) const;

  const std::map<std::string, Vertex>& vertices() const { return vertices_; }
  const std::map<std::string, Edge>& edges() const { return edges_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::vector<SlotRef> slots_in(SlotState state) const;
  std::optional<SlotRef> first_free_slot() const;

  /// Copy of the graph with every vertex id prefixed.
  TruncatedGraph prefixed(const std::string& prefix) const;
  /// Disjoint union; throws InvalidParameters on id clashes.
  void merge(const TruncatedGraph& other);
  /// Subgraph on the given vertices; slots paired to dropped vertices become `cut_state`.
  TruncatedGraph induced(const std::set<std::string>& keep, SlotState cut_state) const;

  /// Vertex sets of the connected components, each sorted; ordered by first id.
  std::vector<std::set<std::string>> components() const;
  /// Sum over components of 2 - 2g - b, with g the cycle rank and b the
  /// unpaired slot count; equals -V for any trivalent graph.
  long euler_characteristic() const;
  /// Cycle rank E - V + (#components).
  long genus() const;

  /// Checks slot/edge consistency; throws InvalidParameters on violation.
  void check() const;

  std::string serialize() const;
  static TruncatedGraph parse(std::string_view text);

  friend bool operator==(const TruncatedGraph&, const TruncatedGraph&) = default;

 private:
  std::map<std::string, Vertex> vertices_;
  std::map<std::string, Edge> edges_;
};

/// Components after deleting the pairings of `edges`; cut slots become free
/// boundary and keep the edge's level and length. Throws UnknownEdge.
std::vector<TruncatedGraph> cut_along(const TruncatedGraph& g, const std::vector<std::string>& edges);

/// True if every vertex and edge of `small` appears in `big` with identical
/// data, except that frontier slots of `small` may be anything in `big` and
/// unleveled edges of `small` may have gained a level.
bool embeds_in(const TruncatedGraph& small, const TruncatedGraph& big);

}  // namespace pw::graph
