#include "pantswork/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "pantswork/error.hpp"

namespace pw::graph {

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorKind::InvalidParameters, msg); }
[[noreturn]] void parse_fail(int line, const std::string& msg) {
  throw Error(ErrorKind::Parse, "pantsgraph line " + std::to_string(line) + ": " + msg);
}

int parse_int(std::string_view s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
    throw Error(ErrorKind::Parse, "bad integer '" + std::string(s) + "'");
  return v;
}

double parse_double(std::string_view s) {
  std::string tmp(s);
  char* end = nullptr;
  double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size() || !std::isfinite(v))
    throw Error(ErrorKind::Parse, "bad number '" + tmp + "'");
  return v;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

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

}  // namespace

SlotRef SlotRef::parse(std::string_view text) {
  auto dot = text.rfind('.');
  if (dot == std::string_view::npos) throw Error(ErrorKind::Parse, "bad slot '" + std::string(text) + "'");
  SlotRef r{std::string(text.substr(0, dot)), parse_int(text.substr(dot + 1))};
  if (r.slot < 0 || r.slot > 2 || !valid_vertex_id(r.vertex))
    throw Error(ErrorKind::Parse, "bad slot '" + std::string(text) + "'");
  return r;
}

std::string Level::str() const {
  if (!intermediate) return std::to_string(n);
  return "(" + std::to_string(n) + "," + std::to_string(n + 1) + ")";
}

Level Level::parse(std::string_view text) {
  if (!text.empty() && text.front() == '(') {
    auto comma = text.find(',');
    if (comma == std::string_view::npos || text.back() != ')')
      throw Error(ErrorKind::Parse, "bad level '" + std::string(text) + "'");
    int lo = parse_int(text.substr(1, comma - 1));
    int hi = parse_int(text.substr(comma + 1, text.size() - comma - 2));
    if (hi != lo + 1) throw Error(ErrorKind::Parse, "intermediate level must be (i,i+1)");
    return between(lo);
  }
  return at(parse_int(text));
}

std::string edge_id(const SlotRef& a, const SlotRef& b) {
  std::string x = a.str(), y = b.str();
  if (y < x) std::swap(x, y);
  return x + "~" + y;
}

bool valid_vertex_id(std::string_view id) {
  if (id.empty()) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':' || c == '/' || c == '-';
  });
}

Vertex& TruncatedGraph::add_vertex(const std::string& id) {
  if (!valid_vertex_id(id)) invalid("invalid vertex id '" + id + "'");
  auto [it, fresh] = vertices_.try_emplace(id);
  if (!fresh) invalid("duplicate vertex '" + id + "'");
  it->second.id = id;
  return it->second;
}

const std::string& TruncatedGraph::pair(const SlotRef& a, const SlotRef& b) {
  if (a == b) invalid("cannot pair slot " + a.str() + " with itself");
  Slot& sa = slot(a);
  Slot& sb = slot(b);
  if (sa.state == SlotState::Paired) throw Error(ErrorKind::SlotOccupied, a.str() + " is already paired");
  if (sb.state == SlotState::Paired) throw Error(ErrorKind::SlotOccupied, b.str() + " is already paired");
  Edge e;
  e.id = edge_id(a, b);
  if (a.str() < b.str()) {
    e.a = a;
    e.b = b;
  } else {
    e.a = b;
    e.b = a;
  }
  sa = Slot{SlotState::Paired, e.id, std::nullopt, std::nullopt};
  sb = Slot{SlotState::Paired, e.id, std::nullopt, std::nullopt};
  auto [it, fresh] = edges_.emplace(e.id, e);
  return it->first;
}

Edge TruncatedGraph::unpair(const std::string& id, SlotState state) {
  auto it = edges_.find(id);
  if (it == edges_.end()) throw Error(ErrorKind::UnknownEdge, "no edge '" + id + "'");
  Edge e = it->second;
  edges_.erase(it);
  for (const auto& s : {e.a, e.b}) {
    Slot& sl = slot(s);
    sl = Slot{state, "", std::nullopt, std::nullopt};
    if (state == SlotState::Boundary) {
      sl.level = e.level;
      sl.length = e.length;
    }
  }
  return e;
}

void TruncatedGraph::set_free(const SlotRef& s, SlotState state) {
  if (state == SlotState::Paired) invalid("set_free cannot pair");
  Slot& sl = slot(s);
  if (sl.state == SlotState::Paired) throw Error(ErrorKind::SlotOccupied, s.str() + " is paired");
  sl = Slot{state, "", std::nullopt, std::nullopt};
}

void TruncatedGraph::remove_vertex(const std::string& id, SlotState neighbour_state) {
  const Vertex& v = vertex(id);
  std::vector<std::string> incident;
  for (const auto& s : v.slots)
    if (s.state == SlotState::Paired) incident.push_back(s.edge);
  for (const auto& e : incident)
    if (has_edge(e)) unpair(e, neighbour_state);
  vertices_.erase(id);
}

const Vertex& TruncatedGraph::vertex(const std::string& id) const {
  auto it = vertices_.find(id);
  if (it == vertices_.end()) invalid("no vertex '" + id + "'");
  return it->second;
}

Vertex& TruncatedGraph::vertex(const std::string& id) {
  auto it = vertices_.find(id);
  if (it == vertices_.end()) invalid("no vertex '" + id + "'");
  return it->second;
}

const Edge& TruncatedGraph::edge(const std::string& id) const {
  auto it = edges_.find(id);
  if (it == edges_.end()) throw Error(ErrorKind::UnknownEdge, "no edge '" + id + "'");
  return it->second;
}

Edge& TruncatedGraph::edge(const std::string& id) {
  auto it = edges_.find(id);
  if (it == edges_.end()) throw Error(ErrorKind::UnknownEdge, "no edge '" + id + "'");
  return it->second;
}

const Slot& TruncatedGraph::slot(const SlotRef& s) const {
  if (s.slot < 0 || s.slot > 2) throw Error(ErrorKind::SelectorOutOfRange, "slot index " + s.str());
  return vertex(s.vertex).slots[static_cast<std::size_t>(s.slot)];
}

Slot& TruncatedGraph::slot(const SlotRef& s) {
  if (s.slot < 0 || s.slot > 2) throw Error(ErrorKind::SelectorOutOfRange, "slot index " + s.str());
  return vertex(s.vertex).slots[static_cast<std::size_t>(s.slot)];
}

SlotRef TruncatedGraph::across(const SlotRef& s) const {
  const Slot& sl = slot(s);
  if (sl.state != SlotState::Paired) invalid(s.str() + " is not paired");
  return edge(sl.edge).other(s);
}

std::vector<SlotRef> TruncatedGraph::slots_in(SlotState state) const {
  std::vector<SlotRef> out;
  for (const auto& [id, v] : vertices_)
    for (int i = 0; i < 3; ++i)
      if (v.slots[static_cast<std::size_t>(i)].state == state) out.push_back({id, i});
  return out;
}

std::optional<SlotRef> TruncatedGraph::first_free_slot() const {
  for (const auto& [id, v] : vertices_)
    for (int i = 0; i < 3; ++i) {
      auto st = v.slots[static_cast<std::size_t>(i)].state;
      if (st == SlotState::Cusp || st == SlotState::Boundary) return SlotRef{id, i};
    }
  return std::nullopt;
}

TruncatedGraph TruncatedGraph::prefixed(const std::string& prefix) const {
  TruncatedGraph out;
  for (const auto& [id, v] : vertices_) {
    Vertex& nv = out.add_vertex(prefix + id);
    nv.slots = v.slots;
  }
  for (const auto& [id, e] : edges_) {
    Edge ne = e;
    ne.a.vertex = prefix + e.a.vertex;
    ne.b.vertex = prefix + e.b.vertex;
    ne.id = edge_id(ne.a, ne.b);
    if (ne.b.str() < ne.a.str()) std::swap(ne.a, ne.b);
    out.slot(ne.a).edge = ne.id;
    out.slot(ne.b).edge = ne.id;
    out.edges_.emplace(ne.id, ne);
  }
  return out;
}

void TruncatedGraph::merge(const TruncatedGraph& other) {
  for (const auto& [id, v] : other.vertices_)
    if (has_vertex(id)) invalid("merge clash on vertex '" + id + "'");
  for (const auto& [id, v] : other.vertices_) vertices_.emplace(id, v);
  for (const auto& [id, e] : other.edges_) edges_.emplace(id, e);
}

TruncatedGraph TruncatedGraph::induced(const std::set<std::string>& keep, SlotState cut_state) const {
  TruncatedGraph out;
  for (const auto& id : keep) out.vertices_.emplace(id, vertex(id));
  for (const auto& [id, e] : edges_) {
    bool ka = keep.count(e.a.vertex) != 0, kb = keep.count(e.b.vertex) != 0;
    if (ka && kb) {
      out.edges_.emplace(id, e);
      continue;
    }
    for (const auto& [s, kept] : {std::pair{e.a, ka}, std::pair{e.b, kb}}) {
      if (!kept) continue;
      Slot& sl = out.slot(s);
      sl = Slot{cut_state, "", std::nullopt, std::nullopt};
      if (cut_state == SlotState::Boundary) {
        sl.level = e.level;
        sl.length = e.length;
      }
    }
  }
  return out;
}

std::vector<std::set<std::string>> TruncatedGraph::components() const {
  std::map<std::string, std::size_t> index;
  std::vector<std::string> names;
  for (const auto& [id, v] : vertices_) {
    index.emplace(id, names.size());
    names.push_back(id);
  }
  UnionFind uf(names.size());
  for (const auto& [id, e] : edges_) uf.join(index.at(e.a.vertex), index.at(e.b.vertex));
  std::map<std::size_t, std::set<std::string>> groups;
  for (std::size_t i = 0; i < names.size(); ++i) groups[uf.find(i)].insert(names[i]);
  std::vector<std::set<std::string>> out;
  for (auto& [root, g] : groups) out.push_back(std::move(g));
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return *x.begin() < *y.begin(); });
  return out;
}

long TruncatedGraph::euler_characteristic() const {
  long chi = 0;
  auto comps = components();
  std::map<std::string, std::size_t> which;
  for (std::size_t i = 0; i < comps.size(); ++i)
    for (const auto& v : comps[i]) which[v] = i;
  std::vector<long> V(comps.size()), E(comps.size()), B(comps.size());
  for (std::size_t i = 0; i < comps.size(); ++i) V[i] = static_cast<long>(comps[i].size());
  for (const auto& [id, e] : edges_) ++E[which.at(e.a.vertex)];
  for (const auto& [id, v] : vertices_)
    for (const auto& s : v.slots)
      if (s.state != SlotState::Paired) ++B[which.at(id)];
  for (std::size_t i = 0; i < comps.size(); ++i) {
    long g = E[i] - V[i] + 1;
    chi += 2 - 2 * g - B[i];
  }
  return chi;
}

long TruncatedGraph::genus() const {
  return static_cast<long>(edges_.size()) - static_cast<long>(vertices_.size()) +
         static_cast<long>(components().size());
}

void TruncatedGraph::check() const {
  for (const auto& [id, v] : vertices_) {
    if (v.id != id) invalid("vertex key mismatch " + id);
    for (int i = 0; i < 3; ++i) {
      const Slot& s = v.slots[static_cast<std::size_t>(i)];
      if (s.state == SlotState::Paired) {
        auto it = edges_.find(s.edge);
        if (it == edges_.end()) invalid(id + "." + std::to_string(i) + " names a missing edge");
        const Edge& e = it->second;
        SlotRef me{id, i};
        if (!(e.a == me || e.b == me)) invalid("edge " + e.id + " does not contain " + me.str());
      } else if (!s.edge.empty()) {
        invalid("free slot carries an edge id");
      }
    }
  }
  for (const auto& [id, e] : edges_) {
    if (e.id != id || id != edge_id(e.a, e.b)) invalid("edge id mismatch " + id);
    if (e.a == e.b) invalid("edge pairs a slot with itself");
    for (const auto& s : {e.a, e.b})
      if (slot(s).state != SlotState::Paired || slot(s).edge != id) invalid("dangling edge " + id);
  }
}

std::string TruncatedGraph::serialize() const {
  std::ostringstream os;
  os << "pantsgraph v1\n";
  for (const auto& [id, v] : vertices_) os << "vertex " << id << '\n';
  for (const auto& [id, e] : edges_) {
    os << "edge " << id << ' ' << e.a.str() << ' ' << e.b.str();
    if (e.level) os << " level=" << e.level->str();
    if (e.length) os << " length=" << fmt_double(*e.length);
    if (e.twist) os << " twist=" << fmt_double(*e.twist);
    os << '\n';
  }
  std::vector<std::string> free, frontier;
  for (const auto& [id, v] : vertices_) {
    for (int i = 0; i < 3; ++i) {
      const Slot& s = v.slots[static_cast<std::size_t>(i)];
      std::string ref = SlotRef{id, i}.str();
      if (s.state == SlotState::Frontier) {
        frontier.push_back("frontier " + ref);
      } else if (s.state != SlotState::Paired) {
        std::string rec = "free " + ref + " kind=" + (s.state == SlotState::Cusp ? "cusp" : "boundary");
        if (s.level) rec += " level=" + s.level->str();
        if (s.length) rec += " length=" + fmt_double(*s.length);
        free.push_back(rec);
      }
    }
  }
  std::sort(free.begin(), free.end());
  std::sort(frontier.begin(), frontier.end());
  for (const auto& r : free) os << r << '\n';
  for (const auto& r : frontier) os << r << '\n';
  return os.str();
}

TruncatedGraph TruncatedGraph::parse(std::string_view text) {
  TruncatedGraph g;
  std::set<std::string> assigned;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  bool header = false;
  auto claim = [&](const SlotRef& s, int ln) {
    if (!g.has_vertex(s.vertex)) parse_fail(ln, "slot on undeclared vertex " + s.vertex);
    if (!assigned.insert(s.str()).second) parse_fail(ln, "slot " + s.str() + " assigned twice");
  };
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> tok;
    std::istringstream ls(line);
    for (std::string t; ls >> t;) tok.push_back(t);
    if (!header) {
      if (line != "pantsgraph v1") parse_fail(number, "expected header 'pantsgraph v1'");
      header = true;
      continue;
    }
    std::map<std::string, std::string> attrs;
    auto attributes = [&](std::size_t from) {
      for (std::size_t i = from; i < tok.size(); ++i) {
        auto eq = tok[i].find('=');
        if (eq == std::string::npos) parse_fail(number, "expected key=value, got '" + tok[i] + "'");
        if (!attrs.emplace(tok[i].substr(0, eq), tok[i].substr(eq + 1)).second)
          parse_fail(number, "repeated attribute");
      }
    };
    try {
      if (tok[0] == "vertex" && tok.size() == 2) {
        if (!valid_vertex_id(tok[1]) || g.has_vertex(tok[1])) parse_fail(number, "bad vertex id");
        g.add_vertex(tok[1]);
      } else if (tok[0] == "edge" && tok.size() >= 4) {
        SlotRef a = SlotRef::parse(tok[2]), b = SlotRef::parse(tok[3]);
        claim(a, number);
        claim(b, number);
        if (edge_id(a, b) != tok[1] || !(a.str() < b.str())) parse_fail(number, "edge id does not match its slots");
        g.slot(a).state = SlotState::Cusp;
        g.slot(b).state = SlotState::Cusp;
        Edge& e = g.edges_.at(g.pair(a, b));
        attributes(4);
        for (const auto& [k, v] : attrs) {
          if (k == "level") e.level = Level::parse(v);
          else if (k == "length") e.length = parse_double(v);
          else if (k == "twist") e.twist = parse_double(v);
          else parse_fail(number, "unknown edge attribute '" + k + "'");
        }
      } else if (tok[0] == "free" && tok.size() >= 3) {
        SlotRef s = SlotRef::parse(tok[1]);
        claim(s, number);
        attributes(2);
        Slot& sl = g.slot(s);
        auto kind = attrs.find("kind");
        if (kind == attrs.end()) parse_fail(number, "free slot without kind");
        if (kind->second == "cusp") sl.state = SlotState::Cusp;
        else if (kind->second == "boundary") sl.state = SlotState::Boundary;
        else parse_fail(number, "unknown kind '" + kind->second + "'");
        for (const auto& [k, v] : attrs) {
          if (k == "kind") continue;
          if (k == "level") sl.level = Level::parse(v);
          else if (k == "length") sl.length = parse_double(v);
          else parse_fail(number, "unknown free attribute '" + k + "'");
        }
      } else if (tok[0] == "frontier" && tok.size() == 2) {
        SlotRef s = SlotRef::parse(tok[1]);
        claim(s, number);
        g.slot(s).state = SlotState::Frontier;
      } else {
        parse_fail(number, "unrecognised record");
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Parse) throw;
      parse_fail(number, e.what());
    }
  }
  if (!header) parse_fail(number, "missing header");
  for (const auto& [id, v] : g.vertices_)
    for (int i = 0; i < 3; ++i)
      if (!assigned.count(SlotRef{id, i}.str())) parse_fail(number, "slot " + SlotRef{id, i}.str() + " never assigned");
  return g;
}

std::vector<TruncatedGraph> cut_along(const TruncatedGraph& g, const std::vector<std::string>& edges) {
  TruncatedGraph h = g;
  for (const auto& e : edges)
    if (!g.has_edge(e)) throw Error(ErrorKind::UnknownEdge, "cut_along: no edge '" + e + "'");
  for (const auto& e : edges)
    if (h.has_edge(e)) h.unpair(e, SlotState::Boundary);
  std::vector<TruncatedGraph> out;
  for (const auto& comp : h.components()) out.push_back(h.induced(comp, SlotState::Boundary));
  return out;
}

bool embeds_in(const TruncatedGraph& small, const TruncatedGraph& big) {
  for (const auto& [id, v] : small.vertices()) {
    if (!big.has_vertex(id)) return false;
    const Vertex& w = big.vertex(id);
    for (std::size_t i = 0; i < 3; ++i)
      if (v.slots[i].state != SlotState::Frontier && !(v.slots[i] == w.slots[i])) return false;
  }
  for (const auto& [id, e] : small.edges()) {
    if (!big.has_edge(id)) return false;
    Edge other = big.edge(id);
    if (!e.level) other.level.reset();  // small may predate its level root
    if (!(other == e)) return false;
  }
  return true;
}

}  // namespace pw::graph
