#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pantswork/construct.hpp"
#include "pantswork/geometry.hpp"

namespace pw::certify {

using geometry::CurvePath;
using geometry::Edge;
using geometry::FamilyRule;
using geometry::FNStructure;
using geometry::LengthRule;
using graph::SlotRef;
using graph::TruncatedGraph;

enum class MapKind { Shift, Shear, Multitwist, EndSwap, Compact, Composite, Declared };
const char* to_string(MapKind k);

using VertexMap = std::function<std::optional<std::string>(const std::string&)>;

/// A pair (alpha, f(alpha)) with alpha living on the source structure.
struct CurvePair {
  CurvePath source, image;
};

/// A self-map family of a pants scheme, given by its action on vertices where
/// it is pants-to-pants. Vertices outside `support` are fixed.
struct MappingScheme {
  MapKind kind = MapKind::Compact;
  std::string name;
  VertexMap vertex;                                 // empty: no graph action
  VertexMap inverse_vertex;
  std::function<bool(const std::string&)> support;  // empty: every vertex
  int reach = 0;                                    // extra depth the images may need

  /// Shifts and shears: the two spine slots (at a given depth) of the biflute
  /// carrying the map, and the parameters it is expected to satisfy.
  std::function<std::pair<SlotRef, SlotRef>(int depth)> carrier;
  std::optional<construct::BifluteParams> along;

  /// Multitwists: power n_i per edge, first matching rule, otherwise 0.
  std::vector<FamilyRule> powers;

  /// Extra Wolpert pairs by index (enclosing paths and the like); nothing past
  /// the family's range. `symbolic` families can be sampled beyond any depth.
  std::function<std::optional<CurvePair>(const FNStructure&, long i, int depth)> obstruction;
  bool symbolic = false;

  /// Declared per-block dilatation lower bounds.
  std::function<double(long)> declared;
  std::string declared_growth;

  std::vector<MappingScheme> parts;  // composites, applied in order
  bool disjoint = false;
  bool infinite = false;  // parts list the first factors of an infinite product

  bool moves(const std::string& v) const;
  std::optional<std::string> map_vertex(const std::string& v) const;
  /// Edge id of the image of e in g, if f is defined on both ends.
  std::optional<std::string> map_edge(const TruncatedGraph& g, const Edge& e) const;
  std::optional<CurvePath> image(const TruncatedGraph& g, const CurvePath& c) const;
  /// What happens to v: its image under a graph action, or the name of the
  /// part that moves it. Used to compare maps on compact cores.
  std::string trace(const std::string& v) const;
  MappingScheme inverse() const;
};

MappingScheme identity_map();
/// `<fam>:i<rest>` -> `<fam>:(i+step)<rest>` on vertices accepted by `support`.
MappingScheme shift(const std::string& family, long step, std::function<bool(const std::string&)> support = {});
/// A handle shift along the biflute between the two carrier slots; it has no
/// action on this decomposition, only on the straightened one.
MappingScheme carried_shift(std::string name, std::function<std::pair<SlotRef, SlotRef>(int)> carrier,
                            std::function<bool(const std::string&)> support, construct::BifluteParams along);
MappingScheme multitwist(std::string name, std::vector<FamilyRule> powers);
/// Exchanges U_x and U_y through the witness relabelling.
MappingScheme end_swap(const construct::REWitness& w);
MappingScheme compact(std::string name, std::vector<std::pair<std::string, std::string>> swaps);
MappingScheme composite(std::string name, std::vector<MappingScheme> parts, bool disjoint);
MappingScheme declared(std::string name, std::function<double(long)> lower_bound, std::string growth);

/// Transverse path around the anchors `<fam>:a` and `<fam>:b` (a < b), crossing
/// every spine curve between them twice, hidden chains included.
CurvePath enclosing_path(const FNStructure& x, const std::string& family, long a, long b, int depth);
/// Pairs (alpha_i, alpha_{i+1}) for anchors at `<fam>:(stride i)`.
std::function<std::optional<CurvePair>(const FNStructure&, long, int)> enclosing_family(std::string family,
                                                                                       long stride);

struct Term {
  long index = 0;
  std::string curve;
  double ratio = 1;
};

struct WolpertResult {
  double bound = 1;
  std::string curve;
  std::vector<Term> terms;  // one per curve, best direction
};

/// Max over the curves and both directions of the certified length ratio.
/// Throws CurveNotCarried, MapUndefinedOnCurve.
WolpertResult wolpert_lower_bound(const FNStructure& x, const FNStructure& y, const MappingScheme& f,
                                  const std::vector<CurvePath>& curves, int depth);

struct Interval {
  double lo = 1, hi = 1;
};
/// Dilatation bounds of a multitwist with powers n_i about curves of length l_i.
/// Throws NonPositiveLength.
Interval matsuzaki_bounds(const std::vector<double>& lengths, const std::vector<long>& powers);
/// Same for formula families; throws UnboundedFamily when the sup diverges.
Interval matsuzaki_bounds(const LengthRule& lengths, const LengthRule& powers);
double matsuzaki_lower_term(double l, long n);
double matsuzaki_upper_term(double l, long n);

enum class Verdict { Modular, NotQC, Inconclusive };
const char* to_string(Verdict v);

struct Thresholds {
  int min_terms = 3;
  double min_last = 1e6;
  double K = 0;            // the last term must also exceed this
  int max_depth = 64;      // graph sweeps are extended up to here
  long max_index = 1L << 50;
};

struct Certificate {
  Verdict verdict = Verdict::Inconclusive;
  std::string witness;     // structural witness, interval, or blocking condition
  std::vector<Term> sequence;
  std::string growth;
  std::optional<Interval> interval;
  int depth = 0;

  /// `certificate v1` record.
  std::string serialize() const;
};

Certificate certify(const FNStructure& x, const MappingScheme& f, int depth, const Thresholds& t = {});

/// Name of the growth family the terms follow, if any: linear, sqrt, exp or
/// doubexp, slowest first.
std::optional<std::string> growth_family(const std::vector<Term>& terms);

/// Maps agreeing with the target on the level-n core, n = 0..depth. Throws
/// NoWitness, FiniteGenusComplement.
std::vector<MappingScheme> approximant_sequence(const FNStructure& x, const MappingScheme& target, int depth);
/// Same trace on every vertex of level <= n.
bool agree_on_core(const FNStructure& x, const MappingScheme& f, const MappingScheme& g, int n);

}  // namespace pw::certify
