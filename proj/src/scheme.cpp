#include "pantswork/scheme.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "pantswork/error.hpp"

namespace pw::graph {

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void join(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

// Dense indexing of a graph's vertices and edges.
struct Index {
  std::vector<std::string> names;
  std::map<std::string, std::size_t> of;
  std::vector<const Edge*> edges;

  explicit Index(const TruncatedGraph& g) {
    for (const auto& [id, v] : g.vertices()) {
      of.emplace(id, names.size());
      names.push_back(id);
    }
    for (const auto& [id, e] : g.edges()) edges.push_back(&e);
  }
  std::size_t a(std::size_t e) const { return of.at(edges[e]->a.vertex); }
  std::size_t b(std::size_t e) const { return of.at(edges[e]->b.vertex); }
};

std::size_t open_slots(const Vertex& v) {
  std::size_t n = 0;
  for (const auto& s : v.slots) n += s.state != SlotState::Paired;
  return n;
}

}  // namespace

void RawGraph::merge(const RawGraph& piece, const std::string& prefix, int offset) {
  graph.merge(piece.graph.prefixed(prefix));
  for (const auto& [id, r] : piece.rank) rank[prefix + id] = r + offset;
}

TruncatedGraph RawGraph::cut(int depth) const {
  std::set<std::string> keep;
  for (const auto& [id, v] : graph.vertices()) {
    auto it = rank.find(id);
    if (it == rank.end() || it->second <= depth) keep.insert(id);
  }
  if (keep.size() == graph.vertex_count()) return graph;
  return graph.induced(keep, SlotState::Frontier);
}

std::vector<std::string> LevelStructure::at(int n) const {
  std::vector<std::string> out;
  for (const auto& [id, l] : edges)
    if (!l.intermediate && l.n == n) out.push_back(id);
  for (const auto& [id, l] : boundaries)
    if (!l.intermediate && l.n == n) out.push_back(id);
  return out;
}

int LevelStructure::max_level() const {
  int m = -1;
  for (const auto* part : {&edges, &boundaries})
    for (const auto& [id, l] : *part)
      if (!l.intermediate) m = std::max(m, l.n);
  return m;
}

PantsScheme::PantsScheme(std::string name, Generator gen) : name_(std::move(name)), gen_(std::move(gen)) {}

RawGraph PantsScheme::raw(int depth) const {
  if (depth < 0) throw Error(ErrorKind::InvalidParameters, "negative depth");
  if (!gen_) return {};
  return gen_(depth);
}

TruncatedGraph PantsScheme::truncate(int depth) const {
  TruncatedGraph g = raw(depth).cut(depth);
  // An edge root that lies beyond this depth leaves the truncation unleveled.
  if (root_ && (!root_->is_edge() || g.has_edge(root_->edge))) assign_levels(g, *root_);
  return g;
}

PantsScheme PantsScheme::with_levels(LevelRoot root) const {
  PantsScheme s = *this;
  s.root_ = std::move(root);
  return s;
}

PantsScheme PantsScheme::renamed(std::string name) const {
  PantsScheme s = *this;
  s.name_ = std::move(name);
  return s;
}

// ---- primitives ----------------------------------------------------------

PantsScheme z_graph() {
  return PantsScheme("z", [](int d) {
    RawGraph r;
    auto id = [](int i) { return "z:" + std::to_string(i); };
    for (int i = -d; i <= d; ++i) r.add(id(i), std::abs(i));
    for (int i = -d; i < d; ++i) r.graph.pair({id(i), 1}, {id(i + 1), 0});
    r.graph.set_free({id(-d), 0}, SlotState::Frontier);
    r.graph.set_free({id(d), 1}, SlotState::Frontier);
    return r;
  });
}

PantsScheme flute_graph() {
  return PantsScheme("flute", [](int d) {
                   RawGraph r;
                   auto id = [](int i) { return "f:" + std::to_string(i); };
                   for (int i = 0; i <= d; ++i) r.add(id(i), i);
                   for (int i = 0; i < d; ++i) r.graph.pair({id(i), 1}, {id(i + 1), 0});
                   r.graph.set_free({id(0), 0}, SlotState::Boundary);
                   r.graph.set_free({id(d), 1}, SlotState::Frontier);
                   return r;
                 })
      .with_levels(LevelRoot::at_boundary());
}

TruncatedGraph interval_graph(int n, int m) {
  if (m < n) throw Error(ErrorKind::InvalidParameters, "interval graph needs n <= m");
  TruncatedGraph g;
  auto id = [](int i) { return "z:" + std::to_string(i); };
  for (int i = n; i <= m; ++i) g.add_vertex(id(i));
  for (int i = n; i < m; ++i) g.pair({id(i), 1}, {id(i + 1), 0});
  g.set_free({id(n), 0}, SlotState::Boundary);
  g.set_free({id(m), 1}, SlotState::Boundary);
  return g;
}

TruncatedGraph loop_graph(int a, int b) {
  if (a < 0 || b < 0) throw Error(ErrorKind::InvalidParameters, "loop graph parameters must be >= 0");
  TruncatedGraph g;
  if (a + b == 0) return g;
  auto id = [](int j) { return "h:" + std::to_string(j); };
  if (a + b == 1) {
    g.add_vertex(id(0));
    g.pair({id(0), 1}, {id(0), 2});
    return g;
  }
  for (int j = 0; j < a + b; ++j) g.add_vertex(id(j));
  if (a == 0) {
    for (int j = 0; j < b; ++j) g.pair({id(j), 1}, {id((j + 1) % b), 0});
    return g;
  }
  for (int j = 0; j + 1 < a; ++j) g.pair({id(j), 1}, {id(j + 1), 0});
  const int top = a - 1;
  if (b == 0) {
    g.pair({id(top), 1}, {id(top), 2});
    return g;
  }
  // second chain h:a .. h:a+b-1, both ends on the last vertex of the first
  g.pair({id(top), 1}, {id(a), 0});
  for (int j = a; j + 1 < a + b; ++j) g.pair({id(j), 1}, {id(j + 1), 0});
  g.pair({id(a + b - 1), 1}, {id(top), 2});
  return g;
}

TruncatedGraph standard_handle() { return loop_graph(0, 1); }

PantsScheme trivalent_tree() {
  return PantsScheme("tree", [](int d) {
           RawGraph r;
           std::vector<std::string> frontier{"t"};
           r.add("t", 0);
           r.graph.set_free({"t", 0}, SlotState::Boundary);
           for (int depth = 1; depth <= d; ++depth) {
             std::vector<std::string> next;
             for (const auto& p : frontier) {
               for (int side = 1; side <= 2; ++side) {
                 std::string c = (p == "t" ? "t:" : p) + (side == 1 ? "L" : "R");
                 r.add(c, depth);
                 r.graph.pair({p, side}, {c, 0});
                 next.push_back(c);
               }
             }
             frontier = std::move(next);
           }
           for (const auto& p : frontier) {
             r.graph.set_free({p, 1}, SlotState::Frontier);
             r.graph.set_free({p, 2}, SlotState::Frontier);
           }
           return r;
         })
      .with_levels(LevelRoot::at_boundary({SlotRef{"t", 0}}));
}

PantsScheme finite_scheme(std::string name, TruncatedGraph g) {
  return PantsScheme(std::move(name), [g](int) {
    RawGraph r;
    r.graph = g;
    for (const auto& [id, v] : g.vertices()) r.rank[id] = 0;
    return r;
  });
}

SlotSelector every(const std::string& family, int period, int phase, int slot) {
  return [family, period, phase, slot](const std::string& v) -> int {
    if (period <= 0) throw Error(ErrorKind::SelectorOutOfRange, "selector period must be positive");
    const std::string head = family + ":";
    if (v.rfind(head, 0) != 0) return -1;
    std::string rest = v.substr(head.size());
    if (rest.empty() || rest.find_first_not_of("-0123456789") != std::string::npos) return -1;
    int i = std::stoi(rest);
    if (((i - phase) % period + period) % period != 0) return -1;
    return slot;
  };
}

PantsScheme attach(const PantsScheme& base, const SlotSelector& where, const TruncatedGraph& piece,
                   std::optional<SlotRef> glue) {
  if (piece.vertex_count() > 0) {
    if (!glue) glue = piece.first_free_slot();
    if (!glue) throw Error(ErrorKind::NoBoundarySlot, "attached piece has no free slot");
    auto st = piece.slot(*glue).state;
    if (st == SlotState::Paired || st == SlotState::Frontier)
      throw Error(ErrorKind::SlotOccupied, "glue slot " + glue->str() + " is not free");
  }
  PantsScheme s(base.name() + "+attach", [base, where, piece, glue](int d) {
    RawGraph r = base.raw(d);
    if (piece.vertex_count() == 0 || !where) return r;
    RawGraph p;
    p.graph = piece;
    for (const auto& [id, v] : piece.vertices()) p.rank[id] = 0;
    std::vector<std::string> ids;
    for (const auto& [id, v] : r.graph.vertices()) ids.push_back(id);
    for (const auto& id : ids) {
      int slot = where(id);
      if (slot == -1) continue;
      if (slot < 0 || slot > 2)
        throw Error(ErrorKind::SelectorOutOfRange, "selector chose slot " + std::to_string(slot) + " on " + id);
      SlotRef at{id, slot};
      auto st = r.graph.slot(at).state;
      if (st == SlotState::Paired || st == SlotState::Frontier)
        throw Error(ErrorKind::SlotOccupied, "selected slot " + at.str() + " is not free");
      const std::string prefix = id + "/";
      r.merge(p, prefix, r.rank.at(id));
      r.graph.pair(at, {prefix + glue->vertex, glue->slot});
    }
    return r;
  });
  if (base.level_root()) s = s.with_levels(*base.level_root());
  return s;
}

// ---- levels ----------------------------------------------------------------

std::vector<std::string> bridges(const TruncatedGraph& g) {
  Index ix(g);
  const std::size_t n = ix.names.size();
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(n);  // (neighbour, edge)
  for (std::size_t e = 0; e < ix.edges.size(); ++e) {
    if (ix.edges[e]->is_loop()) continue;
    adj[ix.a(e)].push_back({ix.b(e), e});
    adj[ix.b(e)].push_back({ix.a(e), e});
  }
  std::vector<long> disc(n, -1), low(n, 0);
  std::vector<std::string> out;
  long timer = 0;
  struct Frame {
    std::size_t v;
    std::size_t via;  // edge used to enter, or SIZE_MAX
    std::size_t next = 0;
  };
  for (std::size_t s = 0; s < n; ++s) {
    if (disc[s] != -1) continue;
    std::vector<Frame> stack{{s, SIZE_MAX}};
    disc[s] = low[s] = timer++;
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next < adj[f.v].size()) {
        auto [w, e] = adj[f.v][f.next++];
        if (e == f.via) continue;
        if (disc[w] == -1) {
          disc[w] = low[w] = timer++;
          stack.push_back({w, e});
        } else {
          low[f.v] = std::min(low[f.v], disc[w]);
        }
      } else {
        Frame done = f;
        stack.pop_back();
        if (!stack.empty()) {
          std::size_t p = stack.back().v;
          low[p] = std::min(low[p], low[done.v]);
          if (low[done.v] > disc[p]) out.push_back(ix.edges[done.via]->id);
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

LevelStructure levels_of(const TruncatedGraph& g) {
  LevelStructure L;
  for (const auto& [id, e] : g.edges())
    if (e.level) L.edges.emplace(id, *e.level);
  for (const auto& [id, v] : g.vertices())
    for (int i = 0; i < 3; ++i) {
      const Slot& s = v.slots[static_cast<std::size_t>(i)];
      if (s.state == SlotState::Boundary && s.level) L.boundaries.emplace(SlotRef{id, i}.str(), *s.level);
    }
  return L;
}

LevelStructure assign_levels(TruncatedGraph& g, const LevelRoot& root) {
  for (auto& [id, e] : g.edges()) g.edge(id).level.reset();
  for (const auto& [id, v] : g.vertices())
    for (int i = 0; i < 3; ++i) g.slot({id, i}).level.reset();

  Index ix(g);
  const std::size_t n = ix.names.size();
  auto br = bridges(g);
  std::set<std::string> bridge_set(br.begin(), br.end());

  // two-edge-connected pieces and their open slot counts
  UnionFind piece_uf(n);
  for (std::size_t e = 0; e < ix.edges.size(); ++e)
    if (!bridge_set.count(ix.edges[e]->id)) piece_uf.join(ix.a(e), ix.b(e));
  std::vector<std::size_t> open(n, 0);
  for (std::size_t v = 0; v < n; ++v) open[piece_uf.find(v)] += open_slots(g.vertex(ix.names[v]));

  // root the bridge forest and accumulate open counts per subtree
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> tree(n);
  std::vector<std::size_t> bridge_edges;
  for (std::size_t e = 0; e < ix.edges.size(); ++e) {
    if (!bridge_set.count(ix.edges[e]->id)) continue;
    std::size_t x = piece_uf.find(ix.a(e)), y = piece_uf.find(ix.b(e));
    tree[x].push_back({y, e});
    tree[y].push_back({x, e});
    bridge_edges.push_back(e);
  }
  std::size_t root_edge = SIZE_MAX;
  std::vector<std::size_t> anchors;
  if (root.is_edge()) {
    if (!g.has_edge(root.edge)) throw Error(ErrorKind::UnknownEdge, "level root '" + root.edge + "'");
    if (!bridge_set.count(root.edge)) throw Error(ErrorKind::NotSeparating, "root edge " + root.edge + " does not separate");
    for (std::size_t e = 0; e < ix.edges.size(); ++e)
      if (ix.edges[e]->id == root.edge) root_edge = e;
    anchors.push_back(piece_uf.find(ix.a(root_edge)));
  } else {
    std::vector<SlotRef> bs = root.boundaries;
    if (bs.empty()) bs = g.slots_in(SlotState::Boundary);
    for (const auto& s : bs)
      if (ix.of.count(s.vertex)) anchors.push_back(piece_uf.find(ix.of.at(s.vertex)));
  }

  // Each bridge tree is rooted at an anchor when it has one. There a bridge is
  // a level curve when its far side holds an open slot; elsewhere both sides must.
  std::vector<std::size_t> sub(n, 0), parent_edge(n, SIZE_MAX), tree_root(n, SIZE_MAX);
  std::vector<char> anchored(n, 0);
  std::vector<std::size_t> order;
  std::vector<std::size_t> starts = anchors;
  for (std::size_t v = 0; v < n; ++v) starts.push_back(piece_uf.find(v));
  for (std::size_t k = 0; k < starts.size(); ++k) {
    std::size_t p = starts[k];
    if (tree_root[p] != SIZE_MAX) continue;
    if (k < anchors.size()) anchored[p] = 1;
    std::vector<std::size_t> st{p};
    tree_root[p] = p;
    while (!st.empty()) {
      std::size_t x = st.back();
      st.pop_back();
      order.push_back(x);
      for (auto [y, e] : tree[x]) {
        if (tree_root[y] != SIZE_MAX) continue;
        tree_root[y] = p;
        parent_edge[y] = e;
        st.push_back(y);
      }
    }
  }
  for (auto x : order) sub[x] = open[x];
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    std::size_t x = *it;
    if (parent_edge[x] == SIZE_MAX) continue;
    std::size_t e = parent_edge[x];
    std::size_t px = piece_uf.find(ix.a(e)) == x ? piece_uf.find(ix.b(e)) : piece_uf.find(ix.a(e));
    sub[px] += sub[x];
  }
  std::set<std::size_t> candidates;
  for (auto e : bridge_edges) {
    std::size_t x = piece_uf.find(ix.a(e)), y = piece_uf.find(ix.b(e));
    std::size_t child = parent_edge[x] == e ? x : y;
    std::size_t total = sub[tree_root[child]];
    bool far_open = sub[child] > 0;
    if (anchored[tree_root[child]] ? far_open : (far_open && total - sub[child] > 0)) candidates.insert(e);
  }
  if (root_edge != SIZE_MAX) candidates.insert(root_edge);

  UnionFind block_uf(n);
  for (std::size_t e = 0; e < ix.edges.size(); ++e)
    if (!candidates.count(e)) block_uf.join(ix.a(e), ix.b(e));
  std::map<std::size_t, std::vector<std::size_t>> block_curves;
  for (auto e : candidates) {
    block_curves[block_uf.find(ix.a(e))].push_back(e);
    block_curves[block_uf.find(ix.b(e))].push_back(e);
  }

  std::map<std::size_t, int> depth;
  std::deque<std::size_t> queue;
  auto visit = [&](std::size_t block, int d) {
    if (depth.emplace(block, d).second) queue.push_back(block);
  };
  std::set<std::size_t> leveled;
  if (root.is_edge()) {
    g.edge(root.edge).level = Level::at(0);
    leveled.insert(root_edge);
    visit(block_uf.find(ix.a(root_edge)), 0);
    visit(block_uf.find(ix.b(root_edge)), 0);
  } else {
    std::vector<SlotRef> bs = root.boundaries;
    if (bs.empty()) bs = g.slots_in(SlotState::Boundary);
    if (bs.empty()) throw Error(ErrorKind::InvalidParameters, "level root: no boundary slots");
    for (const auto& s : bs) {
      Slot& sl = g.slot(s);
      if (sl.state != SlotState::Boundary)
        throw Error(ErrorKind::InvalidParameters, "level root " + s.str() + " is not a boundary");
      sl.level = Level::at(0);
      visit(block_uf.find(ix.of.at(s.vertex)), 0);
    }
  }
  while (!queue.empty()) {
    std::size_t b = queue.front();
    queue.pop_front();
    int d = depth.at(b);
    for (auto e : block_curves[b]) {
      if (!leveled.insert(e).second) continue;
      g.edge(ix.edges[e]->id).level = Level::at(d + 1);
      std::size_t x = block_uf.find(ix.a(e)), y = block_uf.find(ix.b(e));
      visit(x == b ? y : x, d + 1);
    }
  }
  for (std::size_t e = 0; e < ix.edges.size(); ++e) {
    if (candidates.count(e)) continue;
    auto it = depth.find(block_uf.find(ix.a(e)));
    if (it != depth.end()) g.edge(ix.edges[e]->id).level = Level::between(it->second);
  }
  return levels_of(g);
}

LevelStructure assign_levels(const PantsScheme& s, const LevelRoot& root, int depth) {
  TruncatedGraph g = s.raw(depth).cut(depth);
  return assign_levels(g, root);
}

Check check_level_separation(const TruncatedGraph& g) {
  LevelStructure L = levels_of(g);
  int top = L.max_level();
  if (top < 0) return {};
  auto br = bridges(g);
  std::set<std::string> bridge_set(br.begin(), br.end());
  std::set<std::string> anchors;
  for (const auto& [id, l] : L.edges) {
    if (l.intermediate) continue;
    if (!bridge_set.count(id)) return Check::fail("level curve " + id + " does not separate");
    if (l.n == 0) {
      anchors.insert(g.edge(id).a.vertex);
      anchors.insert(g.edge(id).b.vertex);
    }
  }
  for (const auto& [slot, l] : L.boundaries)
    if (!l.intermediate && l.n == 0) anchors.insert(SlotRef::parse(slot).vertex);
  if (anchors.empty()) return Check::fail("no level-0 curve");
  for (int n = 1; n <= top; ++n) {
    std::vector<std::string> cut;
    for (const auto& [id, l] : L.edges)
      if (!l.intermediate && l.n == n) cut.push_back(id);
    if (cut.empty()) continue;
    int holding = 0;
    for (const auto& part : cut_along(g, cut)) {
      bool has_anchor = std::any_of(anchors.begin(), anchors.end(), [&](const auto& a) { return part.has_vertex(a); });
      if (!has_anchor) continue;
      ++holding;
      for (const auto& [id, e] : part.edges())
        if (e.level && !e.level->intermediate && e.level->n > n)
          return Check::fail("cutting level " + std::to_string(n) + " leaves " + id + " in the core");
    }
    if (holding != 1)
      return Check::fail("cutting level " + std::to_string(n) + " splits level 0 across " +
                         std::to_string(holding) + " components");
  }
  return {};
}

Check check_level_blocks(const TruncatedGraph& g) {
  std::vector<std::string> cut;
  for (const auto& [id, e] : g.edges())
    if (e.level && !e.level->intermediate) cut.push_back(id);
  for (const auto& part : cut_along(g, cut)) {
    long v = static_cast<long>(part.vertex_count());
    long genus = static_cast<long>(part.edge_count()) - v + 1;
    bool pants = v == 1 && genus == 0;
    // v == 1 only occurs as a capped punctured torus beside a root edge
    bool torus = genus == 1 && v <= 3;
    if (!pants && !torus)
      return Check::fail("block at " + part.vertices().begin()->first + " has " + std::to_string(v) +
                         " pants and genus " + std::to_string(genus));
  }
  return {};
}

Check check_structural(const PantsScheme& s, int depth) {
  TruncatedGraph next = s.truncate(0);
  for (int d = 0; d <= depth; ++d) {
    TruncatedGraph g = std::move(next);
    next = s.truncate(d + 1);
    const std::string at = s.name() + " depth " + std::to_string(d) + ": ";
    try {
      g.check();
    } catch (const Error& e) {
      return Check::fail(at + e.what());
    }
    if (g.euler_characteristic() != -static_cast<long>(g.vertex_count()))
      return Check::fail(at + "Euler characteristic differs from -V");
    if (!embeds_in(g, next)) return Check::fail(at + "truncation does not embed in the next depth");
    std::string text = g.serialize();
    TruncatedGraph back = TruncatedGraph::parse(text);
    if (!(back == g) || back.serialize() != text) return Check::fail(at + "serialization round trip differs");
    if (auto c = check_level_separation(g); !c) return Check::fail(at + c.failure);
  }
  return {};
}

}  // namespace pw::graph
