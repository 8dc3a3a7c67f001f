#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pantswork/graph.hpp"

namespace pw::graph {

/// A graph together with a depth rank per vertex. Truncating at depth d keeps
/// the vertices of rank <= d; cut pairings become frontier slots.
struct RawGraph {
  TruncatedGraph graph;
  std::map<std::string, int> rank;

  Vertex& add(const std::string& id, int r) {
    rank[id] = r;
    return graph.add_vertex(id);
  }
  /// Merges a prefixed copy of `piece`, every vertex rank shifted by `offset`.
  void merge(const RawGraph& piece, const std::string& prefix, int offset);
  TruncatedGraph cut(int depth) const;
};

/// Level-0 data: a single separating edge, or a set of boundary slots
/// (empty means every free boundary slot).
struct LevelRoot {
  std::string edge;
  std::vector<SlotRef> boundaries;

  static LevelRoot at_edge(std::string e) { return {std::move(e), {}}; }
  static LevelRoot at_boundary(std::vector<SlotRef> b = {}) { return {"", std::move(b)}; }
  bool is_edge() const { return !edge.empty(); }
};

struct LevelStructure {
  std::map<std::string, Level> edges;       // edge id -> level
  std::map<std::string, Level> boundaries;  // free boundary slot -> level

  /// Curves (edge ids and boundary slot strings) at integer level n.
  std::vector<std::string> at(int n) const;
  int max_level() const;
};

/// Deterministic lazy description of an infinite (or finite) pants graph.
class PantsScheme {
 public:
  using Generator = std::function<RawGraph(int depth)>;

  PantsScheme() = default;
  PantsScheme(std::string name, Generator gen);

  const std::string& name() const { return name_; }
  /// Every vertex of rank <= depth, possibly more.
  RawGraph raw(int depth) const;
  /// Vertices of rank <= depth, with levels when a root is set.
  TruncatedGraph truncate(int depth) const;

  PantsScheme with_levels(LevelRoot root) const;
  PantsScheme renamed(std::string name) const;
  const std::optional<LevelRoot>& level_root() const { return root_; }

 private:
  std::string name_;
  Generator gen_;
  std::optional<LevelRoot> root_;
};

/// Vertices z:i for i in Z; slot 0 to z:i-1, slot 1 to z:i+1, slot 2 a cusp.
PantsScheme z_graph();
/// Vertices f:i for i >= 0; f:0 slot 0 is a boundary, slot 2 a cusp.
PantsScheme flute_graph();
/// The [n,m]-graph: a finite chain z:n..z:m with its two end slots free.
TruncatedGraph interval_graph(int n, int m);
/// Loop graph of parameters (a, b); vertices h:0, h:1, ...
/// The glue slot is first_free_slot(). (0,0) is the empty graph.
TruncatedGraph loop_graph(int a, int b);
/// loop_graph(0, 1): a punctured torus.
TruncatedGraph standard_handle();
/// Cantor tree: root `t` (slot 0 boundary) and `t:<word>` over {L,R};
/// slot 0 parent, slot 1 L child, slot 2 R child. Levels from the root boundary.
PantsScheme trivalent_tree();
/// A finite graph as a scheme; every vertex has rank 0.
PantsScheme finite_scheme(std::string name, TruncatedGraph g);

/// Maps a vertex id to the slot to glue at, or -1 to skip it.
using SlotSelector = std::function<int(const std::string& vertex)>;
/// Selects slot `slot` of every `family:i` with i = phase (mod period).
SlotSelector every(const std::string& family, int period, int phase, int slot);
/// Glues a prefixed copy of `piece` (ids `<vertex>/<id>`) at every selected
/// slot. The glue slot of the piece defaults to its first free slot.
/// Throws SlotOccupied or SelectorOutOfRange while truncating.
PantsScheme attach(const PantsScheme& base, const SlotSelector& where, const TruncatedGraph& piece,
                   std::optional<SlotRef> glue = std::nullopt);

/// Bridges of the dual graph.
std::vector<std::string> bridges(const TruncatedGraph& g);
/// Breadth-first level propagation across separating curves; writes levels
/// into g (clearing old ones) and returns them. Throws NotSeparating.
LevelStructure assign_levels(TruncatedGraph& g, const LevelRoot& root);
LevelStructure assign_levels(const PantsScheme& s, const LevelRoot& root, int depth);
/// Levels currently written on g.
LevelStructure levels_of(const TruncatedGraph& g);

struct Check {
  bool ok = true;
  std::string failure;

  explicit operator bool() const { return ok; }
  static Check fail(std::string why) { return {false, std::move(why)}; }
};

/// Every leveled curve separates; cutting along level n leaves one component
/// holding level 0 and no curve of level > n.
Check check_level_separation(const TruncatedGraph& g);
/// Blocks between levels are pants or tori with two or three boundaries.
Check check_level_blocks(const TruncatedGraph& g);
/// Degree 3, chi = -V, nesting into depth+1, serialization round trip and
/// level separation for every d <= depth.
Check check_structural(const PantsScheme& s, int depth);

}  // namespace pw::graph
