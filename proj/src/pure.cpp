#include <set>

#include "pantswork/construct.hpp"
#include "pantswork/error.hpp"

namespace pw::construct {

using graph::LevelRoot;
using graph::RawGraph;
using graph::SlotState;
using ordinal::EndNode;
using ordinal::Forest;
using ordinal::Generator;

namespace {

// ---- cursors over countable encodings ----------------------------------------------

TreeEndSpec forest_cursor(std::shared_ptr<const Forest> f, std::size_t from);
TreeEndSpec node_cursor(std::shared_ptr<const EndNode> n);

class ForestCursor final : public EndCursor {
 public:
  ForestCursor(std::shared_ptr<const Forest> f, std::size_t from) : f_(std::move(f)), from_(from) {}
  int count() const override {
    std::size_t k = f_->size() - from_;
    if (k == 0) return 0;
    if (k == 1) return first()->count();
    return 2;
  }
  bool genus() const override {
    for (std::size_t i = from_; i < f_->size(); ++i)
      if (ordinal::has_genus((*f_)[i])) return true;
    return false;
  }
  TreeEndSpec child(bool right) const override {
    if (f_->size() - from_ == 1) return first()->child(right);
    return right ? forest_cursor(f_, from_ + 1) : first();
  }

 private:
  TreeEndSpec first() const { return node_cursor(std::make_shared<const EndNode>((*f_)[from_])); }
  std::shared_ptr<const Forest> f_;
  std::size_t from_;
};

class LeafCursor final : public EndCursor {
 public:
  explicit LeafCursor(bool g) : g_(g) {}
  int count() const override { return 1; }
  bool genus() const override { return g_; }
  TreeEndSpec child(bool right) const override {
    if (right) return forest_cursor(std::make_shared<const Forest>(), 0);
    return std::make_shared<LeafCursor>(g_);
  }

 private:
  bool g_;
};

// Every word continues: a Cantor set, all genus or all planar.
class CantorCursor final : public EndCursor {
 public:
  explicit CantorCursor(bool g) : g_(g) {}
  int count() const override { return 2; }
  bool genus() const override { return g_; }
  TreeEndSpec child(bool) const override { return std::make_shared<CantorCursor>(g_); }

 private:
  bool g_;
};

// Pieces j, j+1, ... of a generator converging to its node; the node itself
// is the end of the all-R branch.
class GenCursor final : public EndCursor {
 public:
  GenCursor(std::shared_ptr<const EndNode> n, long j) : n_(std::move(n)), j_(j) {}

  int count() const override {
    const Generator& g = *n_->gen;
    if (g.kind == Generator::Kind::Rank) return g.eta.is_zero() ? 1 : 2;
    for (std::size_t i = static_cast<std::size_t>(j_); i < g.prefix.size(); ++i)
      if (!g.prefix[i].empty()) return 2;
    for (const auto& f : g.cycle)
      if (!f.empty()) return 2;
    return 1;
  }
  bool genus() const override {
    const Generator& g = *n_->gen;
    if (n_->genus) return true;
    if (g.kind == Generator::Kind::Rank) return g.genus;
    for (std::size_t i = static_cast<std::size_t>(j_); i < g.prefix.size(); ++i)
      if (ordinal::has_genus(g.prefix[i])) return true;
    for (const auto& f : g.cycle)
      if (ordinal::has_genus(f)) return true;
    return false;
  }
  TreeEndSpec child(bool right) const override {
    if (count() == 1) return LeafCursor(genus()).child(right);
    if (right) return std::make_shared<GenCursor>(n_, j_ + 1);
    return forest_cursor(piece(), 0);
  }

 private:
  std::shared_ptr<const Forest> piece() const {
    const Generator& g = *n_->gen;
    auto j = static_cast<std::size_t>(j_);
    if (g.kind == Generator::Kind::Rank) {
      Ordinal eta = g.eta.is_successor() ? g.eta.predecessor() : g.eta.fundamental(j);
      EndNode c = EndNode::leaf("r", g.genus);
      if (!eta.is_zero()) c.gen = Generator::rank(eta, g.genus);
      return std::make_shared<const Forest>(Forest{c});
    }
    if (j < g.prefix.size()) return std::make_shared<const Forest>(g.prefix[j]);
    return std::make_shared<const Forest>(g.cycle[(j - g.prefix.size()) % g.cycle.size()]);
  }
  std::shared_ptr<const EndNode> n_;
  long j_;
};

TreeEndSpec forest_cursor(std::shared_ptr<const Forest> f, std::size_t from) {
  return std::make_shared<ForestCursor>(std::move(f), from);
}

TreeEndSpec node_cursor(std::shared_ptr<const EndNode> n) {
  if (n->gen) {
    if (n->gen->kind == Generator::Kind::Cantor) return std::make_shared<CantorCursor>(n->genus);
    return std::make_shared<GenCursor>(n, 0);
  }
  if (n->children.empty()) return std::make_shared<LeafCursor>(n->genus);
  // the point itself is isolated next to its children
  Forest f{EndNode::leaf(n->id, n->genus)};
  f.insert(f.end(), n->children.begin(), n->children.end());
  return forest_cursor(std::make_shared<const Forest>(std::move(f)), 0);
}

// ---- Cantor set with eventually periodic genus words ---------------------------------

struct Word {
  std::string pre, cyc;
  char at(std::size_t i) const { return i < pre.size() ? pre[i] : cyc[(i - pre.size()) % cyc.size()]; }
};

Word parse_word(const std::string& s) {
  auto open = s.find('(');
  auto close = s.find(')');
  if (open == std::string::npos || close != s.size() - 1 || close <= open + 1)
    throw Error(ErrorKind::Parse, "genus word `" + s + "` must look like pre(cycle)");
  Word w{s.substr(0, open), s.substr(open + 1, close - open - 1)};
  for (char c : w.pre + w.cyc)
    if (c != 'L' && c != 'R') throw Error(ErrorKind::Parse, "genus word `" + s + "` uses letters other than L, R");
  return w;
}

class WordCursor final : public EndCursor {
 public:
  WordCursor(std::shared_ptr<const std::vector<Word>> words, std::string w) : words_(std::move(words)), w_(std::move(w)) {}
  int count() const override { return 2; }
  bool genus() const override {
    for (const auto& word : *words_) {
      bool match = true;
      for (std::size_t i = 0; i < w_.size() && match; ++i) match = word.at(i) == w_[i];
      if (match) return true;
    }
    return false;
  }
  TreeEndSpec child(bool right) const override { return std::make_shared<WordCursor>(words_, w_ + (right ? "R" : "L")); }

 private:
  std::shared_ptr<const std::vector<Word>> words_;
  std::string w_;
};

// ---- building --------------------------------------------------------------------------

constexpr int kCollapseLimit = 64;

std::string base_of(const std::string& word) { return word.empty() ? "t" : "t:" + word; }

struct Builder {
  int d;
  RawGraph r;
  std::set<std::string> genus_vertices;

  void add(const std::string& v, int rank, bool genus) {
    r.add(v, rank);
    if (genus) genus_vertices.insert(v);
  }

  // Skips branches that hold no ends; the curves along the way are isotopic.
  static void collapse(TreeEndSpec& cur, std::string& word) {
    for (int steps = 0; cur->count() == 2; ++steps) {
      auto left = cur->child(false);
      auto right = cur->child(true);
      if (left->count() != 0 && right->count() != 0) return;
      if (steps >= kCollapseLimit)
        throw Error(ErrorKind::EmbeddingFailure, "no split below `" + word + "` within " + std::to_string(kCollapseLimit) + " levels");
      bool go_right = left->count() == 0;
      cur = go_right ? right : left;
      word += go_right ? 'R' : 'L';
    }
  }

  // Annulus ray with a handle on every pants.
  std::string ray(const std::string& base, int rank, const std::optional<SlotRef>& up) {
    std::string prev;
    for (int j = 0; rank + j <= d; ++j) {
      const std::string v = base + "/r:" + std::to_string(j);
      add(v, rank + j, true);
      add(v + "/h:0", rank + j, true);
      r.graph.pair({v + "/h:0", 1}, {v + "/h:0", 2});
      r.graph.pair({v, 2}, {v + "/h:0", 0});
      if (j == 0) {
        if (up) r.graph.pair(*up, {v, 0});
      } else {
        r.graph.pair({prev, 1}, {v, 0});
      }
      prev = v;
    }
    r.graph.set_free({prev, 1}, SlotState::Frontier);
    return base + "/r:0";
  }

  // Builds the branch at `cur` hanging off `up`; returns its top vertex.
  // `handle` is false only for a top pants whose other side is a puncture.
  std::optional<std::string> branch(TreeEndSpec cur, std::string word, int rank, const SlotRef& up,
                                    bool handle = true) {
    collapse(cur, word);
    if (rank > d) {
      r.graph.set_free(up, SlotState::Frontier);
      return std::nullopt;
    }
    const std::string b = base_of(word);
    if (cur->count() == 0) throw Error(ErrorKind::EmbeddingFailure, "empty branch at `" + word + "`");
    if (cur->count() == 1) {
      if (!cur->genus()) {
        r.graph.set_free(up, SlotState::Cusp);
        return std::nullopt;
      }
      return ray(b, rank, up);
    }
    SlotRef left{b, 1}, right{b, 2};
    add(b, rank, cur->genus());
    r.graph.pair(up, {b, 0});
    if (cur->genus() && handle) {
      add(b + "/h:0", rank, true);
      add(b + "/g", rank, true);
      r.graph.pair({b + "/h:0", 1}, {b + "/h:0", 2});
      r.graph.pair({b, 2}, {b + "/h:0", 0});
      r.graph.pair({b, 1}, {b + "/g", 0});
      left = {b + "/g", 1};
      right = {b + "/g", 2};
    }
    branch(cur->child(false), word + "L", rank + 1, left);
    branch(cur->child(true), word + "R", rank + 1, right);
    return b;
  }

  // Whole surface; returns the level-0 edge if there is one.
  std::optional<std::string> surface(TreeEndSpec cur) {
    std::string word;
    collapse(cur, word);
    if (cur->count() == 0) throw Error(ErrorKind::EmbeddingFailure, "empty end space");
    if (cur->count() == 1) {
      if (!cur->genus()) throw Error(ErrorKind::EmbeddingFailure, "a plane has no pants decomposition");
      std::string top = ray(base_of(word), 0, std::nullopt);
      return cap_vertex(r, {top, 0});
    }
    const std::string t = base_of(word);
    r.add(t, 0);
    auto lc = cur->child(false), rc = cur->child(true);
    std::string lw = word + "L", rw = word + "R";
    collapse(lc, lw);
    collapse(rc, rw);
    auto lone = [](const TreeEndSpec& c) { return c->count() == 1 && !c->genus(); };
    // beside a puncture the top pants would close up into a tailed torus
    auto left = branch(lc, lw, 0, {t, 1}, !lone(rc));
    auto right = branch(rc, rw, 0, {t, 2}, !lone(lc));
    auto joined = cap_vertex(r, {t, 0});
    if (joined) return joined;
    const auto& top = left ? *left : *right;
    for (const auto& s : r.graph.vertex(top).slots)
      if (s.state == SlotState::Paired) return s.edge;
    return std::nullopt;
  }
};

}  // namespace

TreeEndSpec tree_spec(const ClosedSetEncoding& ends) {
  return forest_cursor(std::make_shared<const Forest>(ends.roots()), 0);
}

TreeEndSpec cantor_spec(const std::vector<std::string>& genus_words) {
  auto words = std::make_shared<std::vector<Word>>();
  for (const auto& w : genus_words) words->push_back(parse_word(w));
  return std::make_shared<WordCursor>(words, "");
}

PureResult pants_for_pure(const TreeEndSpec& ends) {
  // Build one level deeper so capping near the root never sees a cut.
  auto build = [ends](int d) {
    Builder b{d + 1, {}, {}};
    auto root = b.surface(ends);
    return std::pair{std::move(b), root};
  };
  auto [probe, root] = build(3);

  PureResult out;
  out.scheme = PantsScheme("pure", [build](int d) { return build(d).first.r; });
  if (root) {
    out.scheme = out.scheme.with_levels(LevelRoot::at_edge(*root));
    const auto& e = probe.r.graph.edge(*root);
    for (const auto& s : {e.a, e.b})
      if (!out.core && probe.genus_vertices.count(s.vertex)) out.core = s;
  }
  auto scheme = out.scheme;
  out.genus_ends = [build, scheme](int d) {
    auto b = build(d).first;
    std::vector<SlotRef> found;
    for (const auto& s : scheme.truncate(d).slots_in(SlotState::Frontier)) {
      if (!b.r.graph.has_vertex(s.vertex)) continue;
      const auto& slot = b.r.graph.slot(s);
      if (slot.state == SlotState::Paired && b.genus_vertices.count(b.r.graph.across(s).vertex)) found.push_back(s);
    }
    return found;
  };
  return out;
}

}  // namespace pw::construct
