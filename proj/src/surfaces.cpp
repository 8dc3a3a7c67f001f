#include <algorithm>
#include <map>
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

// ---- germs --------------------------------------------------------------------

namespace {

std::optional<Ordinal> as_rank(const Germ& g) {
  if (!g.perfect.empty()) return std::nullopt;
  if (g.limit) return g.below.empty() ? g.limit : std::nullopt;
  if (g.below.empty()) return Ordinal::finite(0);
  if (g.below.size() != 1 || g.below[0].genus != g.genus) return std::nullopt;
  auto r = as_rank(g.below[0]);
  if (!r) return std::nullopt;
  return r->successor();
}

}  // namespace

std::string Germ::str() const {
  std::string s = genus ? "G" : "P";
  if (!perfect.empty()) s += "K(" + perfect + ")";
  if (limit) s += "<" + limit->str() + ">";
  s += "{";
  for (std::size_t i = 0; i < below.size(); ++i) s += (i ? "," : "") + below[i].str();
  return s + "}";
}

Ordinal Germ::rank() const {
  if (limit) return *limit;
  Ordinal r = Ordinal::finite(0);
  for (const auto& b : below) r = std::max(r, b.rank().successor());
  return r;
}

bool Germ::any_genus() const {
  return genus || std::any_of(below.begin(), below.end(), [](const Germ& b) { return b.any_genus(); });
}

Germ rank_germ(const Ordinal& eta, bool genus) {
  Germ g;
  g.genus = genus;
  if (eta.is_zero()) return g;
  if (eta.is_limit()) {
    g.limit = eta;
    return g;
  }
  g.below.push_back(rank_germ(eta.predecessor(), genus));
  return g;
}

bool accumulates(const Germ& a, const Germ& b) {
  if (b.limit) {
    auto r = as_rank(a);
    return r && a.genus == b.genus && *r < *b.limit;
  }
  for (const auto& m : b.below)
    if (a == m || accumulates(a, m)) return true;
  return false;
}

std::vector<Germ> antichain(std::vector<Germ> types) {
  std::map<std::string, Germ> uniq;
  for (auto& t : types) uniq.emplace(t.str(), std::move(t));
  std::vector<Germ> out;
  for (const auto& [k, t] : uniq) {
    bool dominated = false;
    for (const auto& [k2, u] : uniq)
      if (k2 != k && accumulates(t, u)) dominated = true;
    if (!dominated) out.push_back(t);
  }
  return out;
}

Germ limit_germ(bool genus, std::vector<Germ> types) {
  Germ g;
  g.below = antichain(std::move(types));
  // a limit of genus ends is a genus end
  g.genus = genus || std::any_of(g.below.begin(), g.below.end(), [](const Germ& b) { return b.any_genus(); });
  return g;
}

// ---- helpers ----------------------------------------------------------------------

namespace {

EndNode prefixed_node(const EndNode& n, const std::string& p) {
  EndNode out = n;
  out.id = p + n.id;
  for (auto& c : out.children) c = prefixed_node(c, p);
  if (out.gen) {
    for (auto* list : {&out.gen->prefix, &out.gen->cycle})
      for (auto& f : *list)
        for (auto& c : f) c = prefixed_node(c, p);
  }
  return out;
}

Forest prefixed_forest(const Forest& f, const std::string& p) {
  Forest out;
  for (const auto& n : f) out.push_back(prefixed_node(n, p));
  return out;
}

EndNbhd moved(EndNbhd n, const std::string& p, int offset) {
  if (!n.puncture) n.prefix = p + n.prefix;
  n.root.vertex = p + n.root.vertex;
  n.rank += offset;
  return n;
}

void glue_piece(RawGraph& r, const Model& piece, const SlotRef& at, const std::string& prefix, int offset, int d) {
  if (piece.puncture) return;  // `at` stays a cusp
  int inner = d - offset;
  if (inner < 0) {
    r.graph.set_free(at, SlotState::Frontier);
    return;
  }
  r.merge(piece.scheme.raw(inner), prefix, offset);
  r.graph.pair(at, {prefix + piece.boundary->vertex, piece.boundary->slot});
}

void require_boundary(const Model& m) {
  if (m.puncture) return;
  if (!m.boundary) throw Error(ErrorKind::NoBoundarySlot, "piece " + m.scheme.name() + " has no designated boundary");
}

// Flute over an arbitrary piece sequence. genus_at(i): spine pants i carries a handle.
struct FluteSpec {
  std::function<Model(long)> piece;
  std::function<bool(long)> genus_at;
  std::string name;
};

Model flute_model(const FluteSpec& spec) {
  Model m;
  m.scheme = PantsScheme(spec.name, [spec](int d) {
                RawGraph r;
                auto spine = [](long i) { return "f:" + std::to_string(i); };
                for (long i = 0; i <= d; ++i) {
                  const std::string v = spine(i);
                  const int rank = static_cast<int>(i);
                  r.add(v, rank);
                  SlotRef attach{v, 2};
                  SlotRef next{v, 1};
                  if (spec.genus_at(i)) {
                    r.add(v + "/h:0", rank);
                    r.add(v + "/g", rank);
                    r.graph.pair({v + "/h:0", 1}, {v + "/h:0", 2});
                    r.graph.pair({v, 2}, {v + "/h:0", 0});
                    r.graph.pair({v, 1}, {v + "/g", 0});
                    attach = {v + "/g", 2};
                    next = {v + "/g", 1};
                  }
                  if (i == 0) r.graph.set_free({v, 0}, SlotState::Boundary);
                  if (i == d) r.graph.set_free(next, SlotState::Frontier);
                  if (i > 0) {
                    const std::string prev = spine(i - 1);
                    SlotRef prev_next = r.graph.has_vertex(prev + "/g") ? SlotRef{prev + "/g", 1} : SlotRef{prev, 1};
                    r.graph.pair(prev_next, {v, 0});
                  }
                  Model piece = spec.piece(i);
                  glue_piece(r, piece, attach, v + "/s/", rank + 1, d);
                }
                return r;
              }).with_levels(LevelRoot::at_boundary());
  m.boundary = SlotRef{"f:0", 0};
  m.site = m.boundary;
  return m;
}

// Neighbourhoods of a flute: its own end plus everything inside piece i.
std::function<std::vector<EndNbhd>(int)> flute_nbhds(std::function<Model(long)> piece,
                                                      std::function<bool(long)> genus_at, Germ top) {
  return [piece, genus_at, top](int d) {
    std::vector<EndNbhd> out;
    if (d < 0) return out;
    out.push_back({"", {"f:0", 0}, 0, top, false});
    for (long i = 0; i <= d; ++i) {
      const std::string v = "f:" + std::to_string(i);
      Model p = piece(i);
      SlotRef attach = genus_at(i) ? SlotRef{v + "/g", 2} : SlotRef{v, 2};
      if (p.puncture) {
        out.push_back({"", attach, static_cast<int>(i), Germ{}, true});
        continue;
      }
      for (auto n : p.nbhds_at(d - static_cast<int>(i) - 1)) out.push_back(moved(std::move(n), v + "/s/", static_cast<int>(i) + 1));
    }
    return out;
  };
}

Forest piece_forest(const Model& p, const std::string& tag) {
  if (p.puncture) return {EndNode::leaf(tag + "x")};
  if (!p.ends) return {};
  return prefixed_forest(p.ends->roots(), tag);
}

}  // namespace

// ---- basic models ------------------------------------------------------------------

Model puncture_model() {
  Model m;
  m.scheme = PantsScheme("puncture", [](int) { return RawGraph{}; });
  m.puncture = true;
  m.ends = ClosedSetEncoding({EndNode::leaf("x")});
  m.top = Germ{};
  m.types = {m.top};
  return m;
}

Model genus_ray_model() {
  Model m;
  m.scheme = PantsScheme("ray", [](int d) {
               RawGraph r;
               for (int j = 0; j <= d; ++j) {
                 const std::string v = "r:" + std::to_string(j);
                 r.add(v, j);
                 r.add(v + "/h:0", j);
                 r.graph.pair({v + "/h:0", 1}, {v + "/h:0", 2});
                 r.graph.pair({v, 2}, {v + "/h:0", 0});
                 if (j > 0) r.graph.pair({"r:" + std::to_string(j - 1), 1}, {v, 0});
               }
               r.graph.set_free({"r:0", 0}, SlotState::Boundary);
               r.graph.set_free({"r:" + std::to_string(d), 1}, SlotState::Frontier);
               return r;
             }).with_levels(LevelRoot::at_boundary());
  m.boundary = SlotRef{"r:0", 0};
  m.site = m.boundary;
  m.top = Germ{true, {}, std::nullopt, ""};
  m.types = {m.top};
  m.genus = true;
  m.ends = ClosedSetEncoding({EndNode::leaf("x", true)});
  Germ top = m.top;
  m.nbhds = [top](int d) {
    std::vector<EndNbhd> out;
    if (d >= 0) out.push_back({"", {"r:0", 0}, 0, top, false});
    return out;
  };
  return m;
}

Model plain_model(PantsScheme s, std::optional<SlotRef> site) {
  Model m;
  m.scheme = std::move(s);
  m.site = std::move(site);
  return m;
}

// ---- flutes of surfaces ----------------------------------------------------------

Model flute_of(std::vector<Model> prefix, std::vector<Model> cycle, bool genus_end, std::vector<bool> genus_flags) {
  if (cycle.empty()) throw Error(ErrorKind::InvalidParameters, "a flute needs a non-empty cycle of pieces");
  for (const auto& p : prefix) require_boundary(p);
  for (const auto& p : cycle) require_boundary(p);

  bool cycle_genus = std::any_of(cycle.begin(), cycle.end(), [](const Model& p) { return p.genus; });
  genus_end = genus_end || cycle_genus;
  // genus beyond position i: the flute end or a later prefix piece
  std::vector<bool> later(prefix.size() + 1, genus_end);
  for (std::size_t i = prefix.size(); i-- > 0;) later[i] = later[i + 1] || prefix[i].genus;

  auto pre = std::make_shared<std::vector<Model>>(std::move(prefix));
  auto cyc = std::make_shared<std::vector<Model>>(std::move(cycle));
  auto piece = [pre, cyc](long i) -> Model {
    auto k = static_cast<std::size_t>(i);
    if (k < pre->size()) return (*pre)[k];
    return (*cyc)[(k - pre->size()) % cyc->size()];
  };
  auto genus_at = [later, genus_flags](long i) {
    auto k = static_cast<std::size_t>(i);
    if (k < genus_flags.size() && genus_flags[k]) return true;
    return k < later.size() ? static_cast<bool>(later[k]) : static_cast<bool>(later.back());
  };

  std::vector<Germ> cycle_types;
  for (const auto& p : *cyc)
    for (const auto& t : p.types) cycle_types.push_back(t);
  Germ top = limit_germ(genus_end, cycle_types);

  std::string name = "flute_of(";
  for (std::size_t i = 0; i < pre->size(); ++i) name += (i ? "," : "") + (*pre)[i].scheme.name();
  name += ";";
  for (std::size_t i = 0; i < cyc->size(); ++i) name += (i ? "," : "") + (*cyc)[i].scheme.name();
  name += ")";

  Model m = flute_model({piece, genus_at, name});
  m.top = top;
  std::vector<Germ> all{top};
  for (const auto& p : *pre)
    for (const auto& t : p.types) all.push_back(t);
  m.types = antichain(all);
  m.genus = top.genus || std::any_of(pre->begin(), pre->end(), [](const Model& p) { return p.genus; });
  m.nbhds = flute_nbhds(piece, genus_at, top);

  bool encodable = std::all_of(pre->begin(), pre->end(), [](const Model& p) { return p.puncture || p.ends; }) &&
                   std::all_of(cyc->begin(), cyc->end(), [](const Model& p) { return p.puncture || p.ends; });
  if (encodable) {
    std::vector<Forest> pf, cf;
    for (std::size_t i = 0; i < pre->size(); ++i) pf.push_back(piece_forest((*pre)[i], "p" + std::to_string(i) + "."));
    for (std::size_t i = 0; i < cyc->size(); ++i) cf.push_back(piece_forest((*cyc)[i], "c" + std::to_string(i) + "."));
    EndNode x = EndNode::leaf("x", top.genus);
    x.gen = Generator::periodic(std::move(pf), std::move(cf));
    m.ends = ClosedSetEncoding({x});
  }
  return m;
}

Model eta_sphere(const Ordinal& eta, bool genus, ordinal::RankBound bound) {
  bound.check(eta, "eta_sphere");
  if (eta.is_zero()) return genus ? genus_ray_model() : puncture_model();
  if (eta.is_successor()) {
    Model m = flute_of({}, {eta_sphere(eta.predecessor(), genus, bound)}, genus);
    m.scheme = m.scheme.renamed(std::string(genus ? "genus_" : "") + "eta_sphere(" + eta.str() + ")");
    return m;
  }
  auto piece = [eta, genus, bound](long i) { return eta_sphere(eta.fundamental(static_cast<std::uint64_t>(i)), genus, bound); };
  auto genus_at = [genus](long) { return genus; };
  Germ top = rank_germ(eta, genus);
  Model m = flute_model({piece, genus_at, std::string(genus ? "genus_" : "") + "eta_sphere(" + eta.str() + ")"});
  m.top = top;
  m.types = {top};
  m.genus = genus;
  m.nbhds = flute_nbhds(piece, genus_at, top);
  EndNode x = EndNode::leaf("x", genus);
  x.gen = Generator::rank(eta, genus);
  m.ends = ClosedSetEncoding({x});
  return m;
}

// ---- capping and connected sums -----------------------------------------------------

std::optional<std::string> cap_vertex(RawGraph& r, const SlotRef& cap) {
  const auto& vx = r.graph.vertex(cap.vertex);
  if (vx.slots[static_cast<std::size_t>(cap.slot)].state == SlotState::Paired)
    throw Error(ErrorKind::InvalidParameters, "cap slot " + cap.str() + " is paired");
  std::vector<std::optional<SlotRef>> partner;
  std::vector<SlotState> state;
  for (int i = 0; i < 3; ++i) {
    if (i == cap.slot) continue;
    const auto& s = vx.slots[static_cast<std::size_t>(i)];
    state.push_back(s.state);
    if (s.state == SlotState::Paired) {
      SlotRef other = r.graph.across({cap.vertex, i});
      if (other.vertex == cap.vertex) throw Error(ErrorKind::EmbeddingFailure, "capping " + cap.str() + " closes a torus");
      partner.push_back(other);
    } else {
      partner.push_back(std::nullopt);
    }
  }
  r.graph.remove_vertex(cap.vertex, SlotState::Boundary);
  r.rank.erase(cap.vertex);
  if (partner[0] && partner[1]) return r.graph.pair(*partner[0], *partner[1]);
  if (!partner[0] && !partner[1]) throw Error(ErrorKind::EmbeddingFailure, "capping " + cap.str() + " leaves an annulus");
  const SlotRef& p = partner[0] ? *partner[0] : *partner[1];
  r.graph.set_free(p, partner[0] ? state[1] : state[0]);
  return std::nullopt;
}

Model connected_sum(const Model& s1, const Model& s2) {
  if (!s1.site || s1.puncture) throw Error(ErrorKind::NoGluingSite, s1.scheme.name() + " has no gluing site");
  if (!s2.site || s2.puncture) throw Error(ErrorKind::NoGluingSite, s2.scheme.name() + " has no gluing site");
  const SlotRef site1{"s1/" + s1.site->vertex, s1.site->slot};
  const SlotRef site2{"s2/" + s2.site->vertex, s2.site->slot};

  // end of gamma on each side; a paired site is subdivided by a new pants
  auto endpoint = [](RawGraph& r, const SlotRef& site) -> SlotRef {
    auto st = r.graph.slot(site).state;
    if (st == SlotState::Cusp || st == SlotState::Boundary) return site;
    const std::string cs = "cs/" + site.vertex;
    r.add(cs, r.rank.at(site.vertex));
    if (st == SlotState::Paired) {
      SlotRef other = r.graph.across(site);
      r.graph.unpair(r.graph.slot(site).edge, SlotState::Boundary);
      r.graph.pair({cs, 1}, other);
    } else {
      r.graph.set_free({cs, 1}, SlotState::Frontier);
      r.graph.set_free(site, SlotState::Boundary);
    }
    r.graph.pair({cs, 0}, site);
    return {cs, 2};
  };
  // endpoints do not depend on depth: work them out on a small copy
  auto ends_at = [=](int d) {
    RawGraph r;
    r.merge(s1.scheme.raw(d), "s1/", 0);
    r.merge(s2.scheme.raw(d), "s2/", 0);
    SlotRef a = endpoint(r, site1);
    SlotRef b = endpoint(r, site2);
    std::string gamma = r.graph.pair(a, b);
    return std::pair{std::move(r), gamma};
  };
  std::string gamma = ends_at(0).second;
  SlotRef next_site;
  {
    auto [r, g] = ends_at(0);
    const auto& e = r.graph.edge(g);
    next_site = e.a.vertex.rfind("s2/", 0) == 0 ? e.b : e.a;
  }

  Model m;
  m.scheme = PantsScheme(s1.scheme.name() + "#" + s2.scheme.name(), [=](int d) { return ends_at(d).first; })
                 .with_levels(LevelRoot::at_edge(gamma));
  m.site = next_site;
  m.genus = s1.genus || s2.genus;
  std::vector<Germ> all = s1.types;
  all.insert(all.end(), s2.types.begin(), s2.types.end());
  m.types = antichain(all);
  if (s1.ends && s2.ends) {
    Forest f = prefixed_forest(s1.ends->roots(), "a.");
    Forest g = prefixed_forest(s2.ends->roots(), "b.");
    f.insert(f.end(), g.begin(), g.end());
    m.ends = ClosedSetEncoding(std::move(f));
  }
  auto n1 = s1.nbhds, n2 = s2.nbhds;
  m.nbhds = [n1, n2](int d) {
    std::vector<EndNbhd> out;
    if (n1)
      for (auto n : n1(d)) out.push_back(moved(std::move(n), "s1/", 0));
    if (n2)
      for (auto n : n2(d)) out.push_back(moved(std::move(n), "s2/", 0));
    return out;
  };
  return m;
}

// ---- standard trees -------------------------------------------------------------------

Model standard_tree(const Ordinal& w, bool genus, ordinal::RankBound bound) {
  bound.check(w, "standard_tree");
  Model piece = eta_sphere(w, false, bound);
  // node ids are `t<word>`, so swapping subtrees is a prefix substitution
  auto base = [](const std::string& word) { return "t" + word; };
  // cuffs of a node: where the parent glues, the attachment, and the two children
  struct Node {
    SlotRef up, attach, left, right;
  };
  auto node_slots = [genus, base](const std::string& word) {
    const std::string b = base(word);
    if (genus) return Node{{b, 0}, {b + "/a", 2}, {b + "/c", 1}, {b + "/c", 2}};
    return Node{{b, 0}, {b, 2}, {b + "/c", 1}, {b + "/c", 2}};
  };
  const std::string name = std::string(genus ? "genus_" : "") + "standard_tree(" + w.str() + ")";

  Model m;
  m.scheme = PantsScheme(name, [=](int d) {
               RawGraph r;
               std::vector<std::string> level{""};
               for (int depth = 0; depth <= d; ++depth) {
                 std::vector<std::string> next;
                 for (const auto& word : level) {
                   const std::string b = base(word);
                   r.add(b, depth);
                   r.add(b + "/c", depth);
                   if (genus) {
                     r.add(b + "/h:0", depth);
                     r.add(b + "/a", depth);
                     r.graph.pair({b + "/h:0", 1}, {b + "/h:0", 2});
                     r.graph.pair({b, 2}, {b + "/h:0", 0});
                     r.graph.pair({b, 1}, {b + "/a", 0});
                     r.graph.pair({b + "/a", 1}, {b + "/c", 0});
                   } else {
                     r.graph.pair({b, 1}, {b + "/c", 0});
                   }
                   Node nd = node_slots(word);
                   if (word.empty()) {
                     r.graph.set_free(nd.up, SlotState::Boundary);
                   } else {
                     const std::string parent = word.substr(0, word.size() - 1);
                     Node pn = node_slots(parent);
                     r.graph.pair(word.back() == 'L' ? pn.left : pn.right, nd.up);
                   }
                   glue_piece(r, piece, nd.attach, b + "/s/", depth + 1, d);
                   next.push_back(word + "L");
                   next.push_back(word + "R");
                 }
                 if (depth == d)
                   for (const auto& word : level) {
                     Node nd = node_slots(word);
                     r.graph.set_free(nd.left, SlotState::Frontier);
                     r.graph.set_free(nd.right, SlotState::Frontier);
                   }
                 level = std::move(next);
               }
               return r;
             }).with_levels(LevelRoot::at_boundary());
  m.boundary = SlotRef{"t", 0};
  m.site = m.boundary;
  m.genus = genus;
  Germ top;
  top.genus = genus;
  top.perfect = name;
  m.top = top;
  std::vector<Germ> all{top};
  for (const auto& t : piece.types) all.push_back(t);
  m.types = antichain(all);
  m.nbhds = [=](int d) {
    std::vector<EndNbhd> out;
    std::vector<std::string> level{""};
    for (int depth = 0; depth <= d; ++depth) {
      std::vector<std::string> next;
      for (const auto& word : level) {
        const std::string b = base(word);
        out.push_back({b, {b, 0}, depth, top, false});
        Node nd = node_slots(word);
        if (piece.puncture) {
          out.push_back({"", nd.attach, depth, Germ{}, true});
        } else {
          for (auto n : piece.nbhds_at(d - depth - 1)) out.push_back(moved(std::move(n), b + "/s/", depth + 1));
        }
        next.push_back(word + "L");
        next.push_back(word + "R");
      }
      level = std::move(next);
    }
    return out;
  };
  return m;
}

}  // namespace pw::construct
