#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pantswork/scheme.hpp"

namespace pw::geometry {

using graph::Edge;
using graph::PantsScheme;
using graph::TruncatedGraph;

/// Built-in formula families for lengths, twists and block sizes, evaluated
/// at an integer index i.
struct LengthRule {
  enum class Family { Constant, Exp, DoubleExp, Inverse, Linear };
  Family family = Family::Constant;
  double c = 1;

  static LengthRule constant(double c) { return {Family::Constant, c}; }
  /// "1.5", "exp(i)", "doubexp(i)", "1/i", "i", each optionally as "c*...".
  static LengthRule parse(std::string_view text);

  /// c, c e^i, c e^(e^|i|), c/|i| (c at 0), c |i|.
  double at(long i) const;
  bool bounded_above() const;
  bool bounded_below() const;
  /// Growth name when unbounded above: "exp", "doubexp", "linear".
  std::optional<std::string> growth() const;
  std::string str() const;
};

/// Index of an edge inside a named curve family, if it belongs to it.
using EdgeIndex = std::function<std::optional<long>(const Edge&)>;
/// Spine curves: `<fam>:(i-1)` slot 1 to `<fam>:i` slot 0 has index i.
EdgeIndex spine_index(const std::string& family);
/// Curves cutting off the handle pants `<fam>:i/h:0` (index i).
EdgeIndex handle_index(const std::string& family);
/// Meridian loops of `<fam>:i/h:0` (index i).
EdgeIndex loop_index(const std::string& family);
/// Every edge, index 0.
EdgeIndex every_edge();

struct FamilyRule {
  std::string family;  // for reports
  EdgeIndex index;
  LengthRule rule;
  int parity = 0;  // 0 any index, 1 odd only, 2 even only

  bool applies(long i) const;
  std::string str() const;
};

/// An edge standing for a chain of `count(i)` once-cusped pants between its
/// endpoints, every curve of the chain with the edge's length. Never
/// materialized.
struct BlockRule {
  std::string name;
  EdgeIndex index;
  LengthRule count;
};

/// Fenchel-Nielsen data on a pants scheme. Free boundary curves have length 1
/// and cusps length 0; the first matching rule wins, otherwise length 1 and
/// twist 0.
class FNStructure {
 public:
  FNStructure() = default;
  FNStructure(PantsScheme s, std::vector<FamilyRule> lengths, std::vector<FamilyRule> twists,
              std::vector<BlockRule> blocks = {});

  const PantsScheme& scheme() const { return scheme_; }
  /// Throws NonPositiveLength.
  double length(const Edge& e) const;
  double twist(const Edge& e) const;
  /// Pants hidden in the chain an edge stands for (0 for ordinary edges).
  double block_count(const Edge& e) const;
  bool has_blocks() const { return !blocks_.empty(); }
  const std::vector<FamilyRule>& length_rules() const { return lengths_; }
  const std::vector<FamilyRule>& twist_rules() const { return twists_; }
  const std::vector<BlockRule>& block_rules() const { return blocks_; }

  /// Truncation carrying `length=` and `twist=` on every edge.
  TruncatedGraph truncate(int depth) const;
  /// Smallest M with 1/M <= length <= M on internal edges at this depth, or
  /// nothing when a rule is unbounded either way.
  std::optional<double> bounded_constant(int depth) const;
  bool bounded_type(double M, int depth) const;
  /// Completeness recorded from bounded cuffs (all length rules bounded above).
  bool complete() const;
  /// `structure v1` header line.
  std::string header() const;

 private:
  PantsScheme scheme_;
  std::vector<FamilyRule> lengths_, twists_;
  std::vector<BlockRule> blocks_;
};

FNStructure unit_structure(PantsScheme s);
FNStructure assign_lengths(PantsScheme s, std::vector<FamilyRule> lengths, std::vector<FamilyRule> twists = {},
                           std::vector<BlockRule> blocks = {});
/// |twist| <= T (with relative slack) on every edge up to depth, and no
/// unbounded twist rule.
bool is_untwisted(const FNStructure& x, double T, int depth);

/// Collar half-width arcsinh(1 / sinh(l/2)) of a curve of length l.
double collar_width(double l);

struct Crossing {
  std::string edge;
  double times = 1;
};

/// Crossings of pants curves that exist only symbolically.
struct BulkCrossing {
  double cuff_length = 1;
  double times = 0;
  std::string rule;  // family the count comes from
};

/// A cuff (single edge) or a transverse closed path given by the pants curves
/// it crosses.
struct CurvePath {
  std::string id;
  long index = 0;
  std::string cuff;
  std::vector<Crossing> crossings;
  std::vector<BulkCrossing> bulk;
  std::optional<double> declared_length;  // a cuff that is never materialized
  std::optional<double> crossing_slack;   // per-crossing upper-bound constant, if known

  static CurvePath symbolic_cuff(std::string id, long index, double length);

  bool is_cuff() const { return !cuff.empty() || declared_length.has_value(); }
  double crossings_total() const;
  static CurvePath cuff_of(std::string edge, long index = 0, std::string id = "");
};

struct LengthBound {
  double lo = 0;
  double hi = std::numeric_limits<double>::infinity();

  bool exact() const { return lo == hi; }
  std::string str() const;
};

/// Length of the common perpendicular between two cuffs of a pants whose
/// three cuffs have length l.
double seam_length(double l);
/// Upper-bound slack of one crossing of a cuff of length l in an untwisted
/// pants with cuffs at most l: seam plus a full turn, minus the collar part.
double crossing_slack(double l);

/// Exact for cuffs; collar-sum lower bound for transverse paths, with an upper
/// bound when a per-crossing slack is given. Throws PathNotCarried when an
/// edge is missing from truncate(depth).
LengthBound curve_length(const FNStructure& x, const CurvePath& c, int depth);

/// Relative slack used by every comparison of computed bounds.
constexpr double kSlack = 1e-9;

}  // namespace pw::geometry
