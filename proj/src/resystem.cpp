#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

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

// ---- germs of an encoding ----------------------------------------------------------

std::vector<Germ> flatten(const Forest& f);

Germ germ_of(const EndNode& n) {
  Germ g;
  g.genus = n.genus;
  if (!n.gen) return g;
  const Generator& gen = *n.gen;
  if (gen.kind == Generator::Kind::Cantor) throw Error(ErrorKind::PerfectKernel, "node " + n.id + " generates a Cantor set");
  if (gen.kind == Generator::Kind::Rank) {
    if (gen.eta.is_zero()) return g;
    if (gen.genus == n.genus) return rank_germ(gen.eta, n.genus);
    if (gen.eta.is_limit())
      throw Error(ErrorKind::InvalidParameters, "node " + n.id + ": planar limit-rank generator at a genus end");
    g.below = {rank_germ(gen.eta.predecessor(), gen.genus)};
    return g;
  }
  std::vector<Germ> types;
  for (const auto& c : gen.cycle) {
    auto sub = flatten(c);
    types.insert(types.end(), sub.begin(), sub.end());
  }
  if (types.empty()) return g;
  return limit_germ(n.genus, std::move(types));
}

// Germs of the points of f that are not absorbed into a limit point of f.
std::vector<Germ> flatten(const Forest& f) {
  std::vector<Germ> out;
  for (const auto& n : f) {
    out.push_back(germ_of(n));
    auto kids = flatten(n.children);
    out.insert(out.end(), kids.begin(), kids.end());
    if (n.gen && n.gen->kind == Generator::Kind::Periodic)
      for (const auto& p : n.gen->prefix) {
        auto sub = flatten(p);
        out.insert(out.end(), sub.begin(), sub.end());
      }
  }
  return out;
}

// The model every end of this germ gets.
Model canon(const Germ& g, ordinal::RankBound bound) {
  if (!g.perfect.empty()) throw Error(ErrorKind::PerfectKernel, "perfect germ " + g.str());
  if (g.limit) return eta_sphere(*g.limit, g.genus, bound);
  if (g.below.empty()) return g.genus ? genus_ray_model() : puncture_model();
  bound.check(g.rank(), "build_re_system");
  std::vector<Model> cycle;
  for (const auto& b : g.below) cycle.push_back(canon(b, bound));
  return flute_of({}, std::move(cycle), g.genus);
}

std::optional<std::string> first_edge(const RawGraph& r, const std::string& v) {
  if (!r.graph.has_vertex(v)) return std::nullopt;
  for (const auto& s : r.graph.vertex(v).slots)
    if (s.state == SlotState::Paired) return s.edge;
  return std::nullopt;
}

std::string piece_prefix(std::size_t i) { return "p:" + std::to_string(i) + "/"; }

// Top pieces joined into one surface: capped (one piece), glued along one
// curve (two), or hung off a chain of pants (three or more).
struct Assembly {
  std::vector<Model> pieces;
  bool genus = false;

  int offset() const { return pieces.size() >= 3 ? 1 : 0; }
  std::size_t links() const { return pieces.size() >= 3 ? pieces.size() - 2 : 0; }

  // Slot of the chain where piece i hangs.
  SlotRef chain_slot(std::size_t i) const {
    const std::size_t last = links() - 1;
    auto node = [&](std::size_t k) { return "c:" + std::to_string(k); };
    auto side = [&](std::size_t k) { return genus ? node(k) + "/g" : node(k); };
    if (i == 0) return {node(0), 0};
    if (i == pieces.size() - 1) return {side(last), 2};
    return {side(i - 1), 1};
  }

  SlotRef boundary_of(std::size_t i) const {
    return {piece_prefix(i) + pieces[i].boundary->vertex, pieces[i].boundary->slot};
  }

  // Whether piece i's own neighbourhood survives the assembly.
  bool keeps_top(std::size_t i) const {
    if (pieces.size() == 1) return false;
    if (pieces.size() == 2) return !pieces[1 - i].puncture;
    return true;
  }

  std::pair<RawGraph, std::optional<std::string>> build(int depth) const {
    const int d = depth + 1;  // one level more so capping never sees a cut
    const int o = offset();
    RawGraph r;
    for (std::size_t i = 0; i < pieces.size(); ++i)
      if (!pieces[i].puncture && d - o >= 0) r.merge(pieces[i].scheme.raw(d - o), piece_prefix(i), o);

    if (pieces.size() == 1) {
      auto joined = cap_vertex(r, boundary_of(0));
      if (joined) return {std::move(r), joined};
      return {std::move(r), std::nullopt};
    }
    if (pieces.size() == 2) {
      if (pieces[0].puncture || pieces[1].puncture) {
        std::size_t solid = pieces[0].puncture ? 1 : 0;
        SlotRef b = boundary_of(solid);
        r.graph.set_free(b, SlotState::Cusp);
        auto e = first_edge(r, b.vertex);
        return {std::move(r), e};
      }
      std::string gamma = r.graph.pair(boundary_of(0), boundary_of(1));
      return {std::move(r), gamma};
    }
    for (std::size_t k = 0; k < links(); ++k) {
      const std::string c = "c:" + std::to_string(k);
      r.add(c, 0);
      if (genus) {
        r.add(c + "/h:0", 0);
        r.add(c + "/g", 0);
        r.graph.pair({c + "/h:0", 1}, {c + "/h:0", 2});
        r.graph.pair({c, 2}, {c + "/h:0", 0});
        r.graph.pair({c, 1}, {c + "/g", 0});
      }
      if (k > 0) {
        const std::string prev = "c:" + std::to_string(k - 1);
        r.graph.pair({genus ? prev + "/g" : prev, 2}, {c, 0});
      }
    }
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      SlotRef at = chain_slot(i);
      if (pieces[i].puncture) r.graph.set_free(at, SlotState::Cusp);
      else if (d - o < 0) r.graph.set_free(at, SlotState::Frontier);
      else r.graph.pair(at, boundary_of(i));
    }
    return {std::move(r), first_edge(r, "c:0")};
  }
};

// Vertices of U at rank <= limit.
std::set<std::string> members(const EndNbhd& u, const RawGraph& r, int limit) {
  std::set<std::string> out;
  if (u.puncture) return out;
  for (const auto& [v, rank] : r.rank)
    if (rank <= limit && u.contains(v) && r.graph.has_vertex(v)) out.insert(v);
  return out;
}

std::string gamma_of(const EndNbhd& u, const TruncatedGraph& g) {
  if (!u.puncture && g.has_vertex(u.root.vertex) && g.slot(u.root).state == SlotState::Paired) return g.slot(u.root).edge;
  return u.root.str();
}

// Slots of `keep` leaving it: paired out of the set, free boundary, and
// frontier slots when `cut` is set.
std::size_t boundary_count(const TruncatedGraph& g, const std::set<std::string>& keep, bool cut = false) {
  std::size_t n = 0;
  for (const auto& v : keep)
    for (int i = 0; i < 3; ++i) {
      const auto& s = g.vertex(v).slots[static_cast<std::size_t>(i)];
      if (s.state == SlotState::Paired) n += keep.count(g.across({v, i}).vertex) ? 0 : 1;
      else if (s.state == SlotState::Boundary || (cut && s.state == SlotState::Frontier)) ++n;
    }
  return n;
}

// U as a point set of pants plus its puncture, for containment tests.
struct Region {
  std::set<std::string> pants;
  std::optional<SlotRef> cusp;
};

Region region(const EndNbhd& u, const TruncatedGraph& g) {
  Region out;
  if (u.puncture) {
    out.cusp = u.root;
    return out;
  }
  for (const auto& [v, vx] : g.vertices())
    if (u.contains(v)) out.pants.insert(v);
  return out;
}

bool inside(const Region& a, const Region& b) {
  if (a.cusp) return b.cusp ? *a.cusp == *b.cusp : b.pants.count(a.cusp->vertex) != 0;
  if (b.cusp) return false;
  return std::includes(b.pants.begin(), b.pants.end(), a.pants.begin(), a.pants.end());
}

bool disjoint(const Region& a, const Region& b) {
  if (a.cusp && b.cusp) return *a.cusp != *b.cusp;
  if (a.cusp) return !b.pants.count(a.cusp->vertex);
  if (b.cusp) return !a.pants.count(b.cusp->vertex);
  for (const auto& v : a.pants)
    if (b.pants.count(v)) return false;
  return true;
}

// Does genus lie beyond the frontier slot s of g? Looks two levels deeper.
bool genus_beyond(const TruncatedGraph& g, const TruncatedGraph& deeper, const SlotRef& s) {
  if (!deeper.has_vertex(s.vertex) || deeper.slot(s).state != SlotState::Paired) return false;
  std::set<std::string> seen{deeper.across(s).vertex};
  std::deque<std::string> todo{deeper.across(s).vertex};
  while (!todo.empty()) {
    std::string v = todo.front();
    todo.pop_front();
    for (int i = 0; i < 3; ++i) {
      const auto& sl = deeper.vertex(v).slots[static_cast<std::size_t>(i)];
      if (sl.state != SlotState::Paired) continue;
      std::string w = deeper.across({v, i}).vertex;
      if (g.has_vertex(w)) continue;
      if (seen.insert(w).second) todo.push_back(w);
    }
  }
  return deeper.induced(seen, SlotState::Frontier).genus() > 0;
}

}  // namespace

// ---- witnesses ------------------------------------------------------------------------

std::string REWitness::map(const std::string& vertex) const {
  if (!x.contains(vertex)) throw Error(ErrorKind::InvalidParameters, vertex + " is not in " + x.prefix);
  return y.prefix + vertex.substr(x.prefix.size());
}

std::string REWitness::line(const TruncatedGraph& g) const {
  std::ostringstream os;
  os << "swap " << x.end() << ' ' << y.end() << " gamma_x=" << gamma_x << " gamma_y=" << gamma_y << " map=";
  bool first = true;
  if (!x.puncture)
    for (const auto& [v, vx] : g.vertices())
      if (x.contains(v)) {
        os << (first ? "" : ",") << v << '>' << map(v);
        first = false;
      }
  return os.str();
}

TruncatedGraph relabel(const TruncatedGraph& g, const std::string& from, const std::string& to) {
  TruncatedGraph out;
  auto rename = [&](const std::string& v) { return to + v.substr(from.size()); };
  std::set<std::string> keep;
  for (const auto& [v, vx] : g.vertices())
    if (v.rfind(from, 0) == 0) keep.insert(v);
  for (const auto& v : keep) out.add_vertex(rename(v));
  for (const auto& v : keep)
    for (int i = 0; i < 3; ++i) {
      const auto& s = g.vertex(v).slots[static_cast<std::size_t>(i)];
      SlotRef mine{rename(v), i};
      if (s.state != SlotState::Paired) {
        out.set_free(mine, s.state);
        continue;
      }
      SlotRef other = g.across({v, i});
      if (!keep.count(other.vertex)) {
        out.set_free(mine, SlotState::Boundary);
      } else if (SlotRef{v, i} < other) {
        out.pair(mine, {rename(other.vertex), other.slot});
      }
    }
  return out;
}

std::vector<REWitness> witnesses_for(const Model& m, int depth) {
  auto g = m.scheme.truncate(depth);
  std::map<std::string, std::vector<EndNbhd>> classes;
  std::vector<std::string> order;
  for (auto& n : m.nbhds_at(depth)) {
    auto key = n.type.str();
    if (!classes.count(key)) order.push_back(key);
    classes[key].push_back(std::move(n));
  }
  std::vector<REWitness> out;
  for (const auto& key : order) {
    const auto& cls = classes[key];
    for (std::size_t i = 1; i < cls.size(); ++i)
      out.push_back({cls[0], cls[i], gamma_of(cls[0], g), gamma_of(cls[i], g)});
  }
  return out;
}

graph::Check verify_witness(const Model& m, const REWitness& w, int k) {
  using graph::Check;
  if (w.x.puncture != w.y.puncture) return Check::fail("a puncture cannot swap with " + w.y.end());
  if (w.x.type != w.y.type) return Check::fail("types differ: " + w.x.type.str() + " vs " + w.y.type.str());
  if (w.x.puncture) return {};
  const int top = std::max(w.x.rank, w.y.rank) + k;
  auto raw = m.scheme.raw(top);
  auto side = [&](const EndNbhd& u) {
    auto keep = members(u, raw, u.rank + k);
    auto g = m.scheme.truncate(u.rank + k).induced(keep, SlotState::Frontier);
    return std::pair{keep, g};
  };
  auto [kx, gx] = side(w.x);
  auto [ky, gy] = side(w.y);
  if (kx.empty()) return Check::fail("U_x is empty at " + w.x.end());
  for (const auto& v : kx) {
    std::string img = w.map(v);
    if (!raw.rank.count(img)) return Check::fail(v + " has no image");
    if (raw.rank.at(img) - w.y.rank != raw.rank.at(v) - w.x.rank) return Check::fail("rank offset differs at " + v);
  }
  if (w.map(w.x.root.vertex) != w.y.root.vertex || w.x.root.slot != w.y.root.slot)
    return Check::fail("roots do not correspond");
  auto mapped = relabel(gx, w.x.prefix, w.y.prefix);
  auto target = relabel(gy, w.y.prefix, w.y.prefix);
  if (!(mapped == target)) return Check::fail("U_x and U_y differ within " + std::to_string(k) + " levels");
  return {};
}

// ---- normal-system clauses ------------------------------------------------------------

std::vector<ClauseResult> check_normal_system(const Model& m, int depth) {
  auto g = m.scheme.truncate(depth);
  auto next = m.scheme.truncate(depth + 1);
  auto deeper = m.scheme.truncate(depth + 2);
  auto raw = m.scheme.raw(depth);
  auto sys = m.nbhds_at(depth);
  std::vector<Region> regions;
  for (const auto& u : sys) regions.push_back(region(u, g));

  std::map<std::string, ClauseResult> res;
  for (const char* c : {"(1)", "(2a)", "(2b)", "(2d)", "(3a)", "(3b)", "(4)", "(5a)", "(5b)", "(flute)"}) res[c] = {c, true, ""};
  auto fail = [&](const char* c, const std::string& why) {
    auto& r = res[c];
    if (r.ok) r.detail = why;
    r.ok = false;
  };

  // (1) one boundary curve; planar neighbourhoods are planar and genus ones keep gaining genus
  if (g.slots_in(SlotState::Boundary).size() > 1) fail("(1)", "surface has several boundary curves");
  for (const auto& u : sys) {
    if (u.puncture) continue;
    std::set<std::string> keep = region(u, g).pants;
    if (boundary_count(g, keep) != 1) fail("(1)", u.end() + " is not cut off by a single curve");
    long now = g.induced(keep, SlotState::Frontier).genus();
    if (!u.type.any_genus() && now != 0) fail("(1)", u.end() + " is planar but carries genus");
    if (u.type.any_genus()) {
      long later = next.induced(region(u, next).pants, SlotState::Frontier).genus();
      if (later <= now) fail("(1)", u.end() + " stops gaining genus");
    }
  }

  // nesting relations
  for (std::size_t i = 0; i < sys.size(); ++i) {
    int containers = 0;
    for (std::size_t j = 0; j < sys.size(); ++j) {
      if (i == j) continue;
      const bool in = inside(regions[i], regions[j]);
      const bool by_prefix = sys[i].puncture ? sys[j].contains(sys[i].root.vertex)
                                             : (!sys[j].puncture && sys[i].prefix.rfind(sys[j].prefix, 0) == 0 &&
                                                sys[i].prefix != sys[j].prefix);
      if (by_prefix && !in) fail("(2d)", sys[i].end() + " should lie in " + sys[j].end());
      if (in) {
        ++containers;
        if (!(sys[i].type.rank() < sys[j].type.rank()))
          fail("(2a)", sys[i].end() + " inside " + sys[j].end() + " without dropping rank");
      }
      if (!in && !inside(regions[j], regions[i]) && !disjoint(regions[i], regions[j]))
        fail("(3a)", sys[i].end() + " and " + sys[j].end() + " overlap");
    }
    if (containers > sys[i].rank + 1) fail("(3b)", sys[i].end() + " lies in " + std::to_string(containers) + " others");
    if (!sys[i].puncture) {
      int low = 1 << 30;
      for (const auto& v : regions[i].pants) low = std::min(low, raw.rank.at(v));
      if (low != sys[i].rank) fail("(4)", sys[i].end() + " root rank " + std::to_string(sys[i].rank) + " vs " + std::to_string(low));
    }
  }

  // (2b) swapped neighbourhoods are disjoint
  for (const auto& w : witnesses_for(m, depth))
    if (!disjoint(region(w.x, g), region(w.y, g))) fail("(2b)", w.x.end() + " meets " + w.y.end());

  // (5) genus neighbourhoods of genus ends
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const auto& u = sys[i];
    if (u.puncture || !u.type.genus) continue;
    auto own = [&](const TruncatedGraph& t) {
      Region me = region(u, t);
      std::set<std::string> rest = me.pants;
      for (const auto& v : sys)
        if (!v.puncture && v.prefix != u.prefix && v.prefix.rfind(u.prefix, 0) == 0)
          for (const auto& p : region(v, t).pants) rest.erase(p);
      return t.induced(rest, SlotState::Frontier).genus();
    };
    if (own(next) <= own(g)) fail("(5a)", u.end() + ": genus outside the sub-neighbourhoods stops growing");

    const std::string r = u.root.vertex;
    if (!g.has_vertex(r)) continue;
    std::optional<std::string> handle;
    for (int s = 0; s < 3 && !handle; ++s) {
      if (g.vertex(r).slots[static_cast<std::size_t>(s)].state != SlotState::Paired) continue;
      std::string h = g.across({r, s}).vertex;
      const auto& hs = g.vertex(h).slots;
      if (h != r && hs[1].state == SlotState::Paired && g.across({h, 1}).vertex == h) handle = h;
    }
    if (!handle) {
      fail("(5b)", u.end() + ": no handle at the root pants");
      continue;
    }
    std::set<std::string> torus{r, *handle};
    auto tg = g.induced(torus, SlotState::Boundary);
    if (tg.genus() != 1 || boundary_count(g, torus, true) != 2) fail("(5b)", u.end() + ": root block is not a torus with two boundaries");
    std::set<std::string> rest = region(u, g).pants;
    for (const auto& v : torus) rest.erase(v);
    auto rg = g.induced(rest, SlotState::Boundary);
    if (!rest.empty() && (rg.components().size() != 1 || boundary_count(g, rest) != 1))
      fail("(5b)", u.end() + ": remainder is not connected with one boundary");
  }

  // (0,1,2) flutes from each genus neighbourhood's boundary to the genus ends it holds
  for (const auto& u : sys) {
    if (u.puncture || !u.type.any_genus() || !g.has_vertex(u.root.vertex)) continue;
    auto gu = g.induced(region(u, g).pants, SlotState::Boundary);
    for (const auto& f : gu.slots_in(SlotState::Frontier)) {
      if (!genus_beyond(g, deeper, f)) continue;
      try {
        auto rec = recognize_between(gu, u.root, f);
        if (!rec.compatible_with(0, 1, 2)) fail("(flute)", u.end() + " to " + f.str() + " reads " + rec.verdict());
      } catch (const Error& e) {
        fail("(flute)", u.end() + " to " + f.str() + ": " + e.what());
      }
    }
  }

  std::vector<ClauseResult> out;
  for (auto& [k, v] : res) out.push_back(std::move(v));
  return out;
}

// ---- building -------------------------------------------------------------------------

RESystem build_re_system(const ClosedSetEncoding& ends, ordinal::RankBound bound, int depth) {
  ordinal::cb_rank(ends, bound);  // EmptySet, PerfectKernel, RankOverflow
  auto top = flatten(ends.roots());

  auto a = std::make_shared<Assembly>();
  for (const auto& t : top) {
    a->pieces.push_back(canon(t, bound));
    a->genus = a->genus || t.any_genus();
  }
  if (a->pieces.size() == 1 && a->pieces[0].puncture)
    throw Error(ErrorKind::EmbeddingFailure, "a plane has no pants decomposition");
  if (a->pieces.size() == 2 && a->pieces[0].puncture && a->pieces[1].puncture)
    throw Error(ErrorKind::EmbeddingFailure, "an annulus has no pants decomposition");

  RESystem out;
  Model& m = out.model;
  auto root = a->build(3).second;
  m.scheme = PantsScheme("re", [a](int d) { return a->build(d).first; });
  if (root) m.scheme = m.scheme.with_levels(LevelRoot::at_edge(*root));
  m.ends = ends;
  m.types = antichain(top);
  m.genus = a->genus;
  m.nbhds = [a](int d) {
    std::vector<EndNbhd> list;
    const int o = a->offset();
    for (std::size_t i = 0; i < a->pieces.size(); ++i) {
      const Model& p = a->pieces[i];
      if (p.puncture) {
        if (a->pieces.size() >= 3 && d >= o) list.push_back({"", a->chain_slot(i), o, Germ{}, true});
        continue;
      }
      if (d < o) continue;
      for (auto n : p.nbhds_at(d - o)) {
        bool is_top = n.prefix.empty() && !n.puncture;
        if (is_top && !a->keeps_top(i)) continue;
        if (!n.puncture) n.prefix = piece_prefix(i) + n.prefix;
        n.root.vertex = piece_prefix(i) + n.root.vertex;
        n.rank += o;
        list.push_back(std::move(n));
      }
    }
    return list;
  };
  out.depth = depth;
  out.system = m.nbhds_at(depth);
  out.witnesses = witnesses_for(m, depth);
  return out;
}

std::string RESystem::serialize() const {
  auto g = model.scheme.truncate(depth);
  std::string s = g.serialize();
  s += "witness v1\n";
  for (const auto& w : witnesses) s += w.line(g) + "\n";
  return s;
}

}  // namespace pw::construct
