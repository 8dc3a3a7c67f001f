#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pantswork/ordinal.hpp"

namespace pw::ordinal {

struct EndNode;
using Forest = std::vector<EndNode>;

/// Describes an infinite sequence of clopen pieces accumulating to a point.
struct Generator {
  enum class Kind { Periodic, Rank, Cantor };

  Kind kind = Kind::Periodic;
  // Periodic: pieces are prefix[0..], then cycle repeated forever.
  // Each piece is a forest (possibly empty).
  std::vector<Forest> prefix;
  std::vector<Forest> cycle;
  // Rank: the point is the top of a copy of w^eta+1.
  Ordinal eta;
  bool genus = false;  // Rank: every generated point is a genus end

  static Generator periodic(std::vector<Forest> prefix, std::vector<Forest> cycle);
  static Generator rank(Ordinal eta, bool genus = false);
  static Generator cantor();
};

/// One point of the set. Finite `children` are further isolated groupings that
/// do not converge here; a generator (exclusive with children) supplies an
/// infinite sequence converging to this point.
struct EndNode {
  std::string id;
  bool genus = false;
  Forest children;
  std::optional<Generator> gen;

  static EndNode leaf(std::string id, bool genus = false);
};

/// A countable closed subset of the Cantor set with genus marks, as an
/// ordinal tree. The empty forest is the empty set.
class ClosedSetEncoding {
 public:
  ClosedSetEncoding() = default;
  /// Validates (ids unique, cycles non-empty, genus marks closed).
  explicit ClosedSetEncoding(Forest roots);

  /// Indented `node <id> [genus] children=...` lines. Throws Parse or
  /// MalformedEncoding.
  static ClosedSetEncoding parse(std::string_view text);
  std::string serialize() const;

  const Forest& roots() const { return roots_; }
  bool empty() const { return roots_.empty(); }
  /// Total nodes in the description, templates counted once.
  std::size_t node_count() const;

 private:
  Forest roots_;
};

void validate(const Forest& roots);

struct CBRank {
  Ordinal nu;
  std::uint64_t n = 1;

  std::string str() const { return "(" + nu.str() + ", " + std::to_string(n) + ")"; }
  friend bool operator==(const CBRank&, const CBRank&) = default;
};

/// Accumulation points of s. Ids are preserved.
ClosedSetEncoding derived_set(const ClosedSetEncoding& s);

/// Computed from the tree structure in one pass.
/// Throws EmptySet, PerfectKernel, RankOverflow.
CBRank cb_rank(const ClosedSetEncoding& s, RankBound bound = {});

/// (zeta, n) with s homeomorphic to w^zeta*n+1.
std::pair<Ordinal, std::uint64_t> homeo_type(const ClosedSetEncoding& s, RankBound bound = {});

/// CB rank of the point `node` itself inside any set containing its subtree.
Ordinal point_rank(const EndNode& node);
/// True if the node or anything below it is a genus end.
bool has_genus(const EndNode& node);
bool has_genus(const Forest& f);

/// Canonical encoding of w^zeta*n+1; ids are `<prefix>0`, `<prefix>1`, ...
ClosedSetEncoding canonical_set(const Ordinal& zeta, std::uint64_t n, bool genus = false,
                                const std::string& prefix = "p");

}  // namespace pw::ordinal
