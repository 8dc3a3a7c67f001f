#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pantswork/endspace.hpp"
#include "pantswork/ordinal.hpp"
#include "pantswork/scheme.hpp"

namespace pw::construct {

using graph::PantsScheme;
using graph::SlotRef;
using graph::TruncatedGraph;
using ordinal::ClosedSetEncoding;
using ordinal::Ordinal;

// ---- biflutes ---------------------------------------------------------------

/// Eventually periodic integer sequence. Index i reads prefix[i] and then the
/// cycle; negative indices read |i|.
struct Pattern {
  std::vector<int> prefix;
  std::vector<int> cycle{0};

  static Pattern constant(int v) { return {{}, {v}}; }
  /// "3", "1,2;3" (prefix;cycle) or ";1,2".
  static Pattern parse(std::string_view text);
  int at(long i) const;
  int max() const;
  int min() const;
  std::string str() const;
  /// Length after which the sequence is periodic, and the period.
  std::size_t settle() const { return prefix.size(); }
  std::size_t period() const { return cycle.size(); }
};

struct BifluteParams {
  int A = 0, B = 0, C = 1;
  Pattern a = Pattern::constant(0), b = Pattern::constant(0), c = Pattern::constant(1);
  bool integers = true;  // spine over Z; over N the spine starts at a boundary

  static BifluteParams uniform(int A, int B, int C, bool integers = true);
  /// Throws InvalidParameters.
  void validate() const;
  std::string str() const;
};

/// z-graph (or flute) with loop graph (a_k, b_k) glued at the k-th attachment
/// position; consecutive positions are c_k apart. Position 0 is z:0 (f:0).
PantsScheme biflute(const BifluteParams& p);

struct Recognition {
  int depth = 0;
  std::vector<std::string> spine;
  std::vector<long> positions;                          // spine index per attachment
  std::vector<std::vector<std::pair<int, int>>> parses;  // loop-graph types per attachment
  int A = 0, B = 0, C = 1;                              // minimal witnessing bounds

  bool compatible_with(int A, int B, int C) const;
  bool compatible_with(const BifluteParams& p) const { return compatible_with(p.A, p.B, p.C); }
  std::string verdict() const;
};

/// Reads truncate(depth) as a generalized biflute. Throws NotABiflute naming the
/// first vertex that breaks the pattern, InvalidParameters for depth < 2.
Recognition recognize_biflute(const PantsScheme& s, int depth);
/// Same on a finite graph whose two spine ends are the given free slots.
Recognition recognize_graph(const TruncatedGraph& g, const SlotRef& from, const SlotRef& to);
/// Reads the path between two slots of a larger surface. Off-spine pieces that
/// reach open slots count as boundary curves of the embedded biflute.
Recognition recognize_between(const TruncatedGraph& g, const SlotRef& from, const SlotRef& to);
/// Loop-graph types (a, b) of the finite piece hanging off `at` (empty if none).
std::vector<std::pair<int, int>> loop_graph_types(const TruncatedGraph& g, const SlotRef& at);

// ---- end germs ----------------------------------------------------------------

/// Homeomorphism type of a small neighbourhood of one end: its genus mark and
/// the maximal types of ends accumulating at it. `limit` stands for every
/// rank below a limit ordinal with the same genus mark.
struct Germ {
  bool genus = false;
  std::vector<Germ> below;
  std::optional<Ordinal> limit;
  std::string perfect;  // names a Cantor-type neighbourhood; empty otherwise

  std::string str() const;
  Ordinal rank() const;
  bool any_genus() const;
  friend bool operator==(const Germ& a, const Germ& b) { return a.str() == b.str(); }
};

Germ rank_germ(const Ordinal& eta, bool genus);
/// True if ends of type a accumulate at ends of type b.
bool accumulates(const Germ& a, const Germ& b);
/// Germ of a limit of pieces whose ends have the given types.
Germ limit_germ(bool genus, std::vector<Germ> types);

// ---- surface models -------------------------------------------------------

/// Neighbourhood of one end cut off by a single curve. Its vertices are those
/// whose ids start with `prefix`; a puncture has no vertices and `root` is its
/// cusp slot.
struct EndNbhd {
  std::string prefix;
  SlotRef root;
  int rank = 0;  // depth rank of the root vertex
  Germ type;
  bool puncture = false;

  std::string end() const { return root.str(); }
  bool contains(const std::string& vertex) const { return !puncture && vertex.rfind(prefix, 0) == 0; }
};

/// A pants scheme with what the constructions need to keep composing it.
struct Model {
  PantsScheme scheme;
  std::optional<ClosedSetEncoding> ends;
  /// Neighbourhoods whose root has rank <= depth.
  std::function<std::vector<EndNbhd>(int depth)> nbhds;
  std::optional<SlotRef> boundary;  // free boundary slot of rank 0
  std::optional<SlotRef> site;      // where connected sums glue
  Germ top;                         // type of the end at the far side of `boundary`
  std::vector<Germ> types;          // maximal types of all ends
  bool puncture = false;            // the once-punctured disk: no pants at all
  bool genus = false;

  std::vector<EndNbhd> nbhds_at(int depth) const { return nbhds ? nbhds(depth) : std::vector<EndNbhd>{}; }
};

Model puncture_model();
/// Loch Ness monster minus a disk: r:j with a handle at r:j/h:0, boundary r:0.0.
Model genus_ray_model();
/// Wraps a scheme with no end data.
Model plain_model(PantsScheme s, std::optional<SlotRef> site = std::nullopt);

/// Flute spine f:i with piece i glued to slot 2 (ids `f:i/s/...`). Spine pants
/// become genus pants (f:i, handle f:i/h:0, f:i/g) when a genus end lies
/// beyond them or `genus_flags[i]` is set. Throws NoBoundarySlot.
Model flute_of(std::vector<Model> prefix, std::vector<Model> cycle, bool genus_end = false,
               std::vector<bool> genus_flags = {});
/// Planar surface with one boundary and end space w^eta + 1 (all genus ends
/// when `genus`). eta = 0 is a puncture. Throws RankOverflow.
Model eta_sphere(const Ordinal& eta, bool genus = false, ordinal::RankBound bound = {});
/// Glues s2 to s1 along a new curve gamma between their sites; a paired site
/// gets a new pants `cs/<vertex>` subdividing its curve. Levels are rebuilt
/// from gamma. Throws NoGluingSite.
Model connected_sum(const Model& s1, const Model& s2);
/// Cantor tree of pants `t<word>` with boundary t.0 and a copy of eta_sphere(w) glued into every
/// node; with `genus` every node also carries a handle.
Model standard_tree(const Ordinal& w, bool genus, ordinal::RankBound bound = {});

/// Glues a disk into the free slot `cap`: its pants becomes an annulus and is
/// removed, joining the other two curves. Returns the joined edge. Throws
/// EmbeddingFailure when both other slots are free.
std::optional<std::string> cap_vertex(graph::RawGraph& r, const SlotRef& cap);
/// Maximal elements under `accumulates`, deduplicated and sorted.
std::vector<Germ> antichain(std::vector<Germ> types);

// ---- pants decompositions adapted to pure mapping classes -------------------

/// Ends placed on the leaves of the binary tree, read one word at a time.
class EndCursor {
 public:
  virtual ~EndCursor() = default;
  /// 0, 1, or 2 meaning "two or more" ends below this word.
  virtual int count() const = 0;
  virtual bool genus() const = 0;
  virtual std::shared_ptr<const EndCursor> child(bool right) const = 0;
};
using TreeEndSpec = std::shared_ptr<const EndCursor>;

/// Canonical placement of a countable encoding on the tree.
TreeEndSpec tree_spec(const ClosedSetEncoding& ends);
/// The full Cantor set with genus ends along eventually periodic words such as
/// "(L)" or "R(RL)".
TreeEndSpec cantor_spec(const std::vector<std::string>& genus_words);

struct PureResult {
  PantsScheme scheme;
  /// Frontier slots at this depth behind which a genus end lies.
  std::function<std::vector<SlotRef>(int depth)> genus_ends;
  /// Pants next to the level-0 curve on the genus side, if any.
  std::optional<SlotRef> core;
};

/// Tree pants decomposition pruned to the ends, single-end branches collapsed
/// to cusps or genus rays, genus pants wherever a genus end lies below. Throws
/// EmbeddingFailure.
PureResult pants_for_pure(const TreeEndSpec& ends);

// ---- RE systems ------------------------------------------------------------------

/// Swap data for equivalent ends x ~ y: the curves cutting U_x and U_y and
/// the prefix relabelling between them.
struct REWitness {
  EndNbhd x, y;
  std::string gamma_x, gamma_y;  // edge ids, or cusp slots for punctures

  /// Image of a vertex of U_x.
  std::string map(const std::string& vertex) const;
  std::string line(const TruncatedGraph& g) const;
};

struct ClauseResult {
  std::string clause;
  bool ok = true;
  std::string detail;
};

struct RESystem {
  Model model;
  int depth = 0;
  std::vector<EndNbhd> system;   // the normal system visible at `depth`
  std::vector<REWitness> witnesses;

  /// `pantsgraph v1` followed by `witness v1`.
  std::string serialize() const;
};

/// Finite-rank realization: each end is built from its germ, so equivalent
/// ends get identical neighbourhoods. Throws RankOverflow, PerfectKernel,
/// EmptySet, EmbeddingFailure.
RESystem build_re_system(const ClosedSetEncoding& ends, ordinal::RankBound bound, int depth);
/// One witness (representative, y) per other member of each class at `depth`.
std::vector<REWitness> witnesses_for(const Model& m, int depth);
/// Slot-state-preserving isomorphism U_x -> U_y up to `k` levels below the roots.
graph::Check verify_witness(const Model& m, const REWitness& w, int k);
/// The decidable normal-system clauses at `depth`.
std::vector<ClauseResult> check_normal_system(const Model& m, int depth);

/// Copy of g restricted to vertices with the prefix, renamed to `to`.
TruncatedGraph relabel(const TruncatedGraph& g, const std::string& from, const std::string& to);

}  // namespace pw::construct
