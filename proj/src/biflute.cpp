#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "pantswork/construct.hpp"
#include "pantswork/error.hpp"

namespace pw::construct {

using graph::RawGraph;
using graph::SlotState;

// ---- Pattern ----------------------------------------------------------------

namespace {

std::vector<int> parse_ints(std::string_view text) {
  std::vector<int> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) throw Error(ErrorKind::Parse, "empty entry in pattern");
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(cur, &used);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Parse, "bad pattern entry '" + cur + "'");
    }
    if (used != cur.size()) throw Error(ErrorKind::Parse, "bad pattern entry '" + cur + "'");
    out.push_back(v);
    cur.clear();
  };
  for (char ch : text) {
    if (ch == ' ') continue;
    if (ch == ',') {
      flush();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty() || !out.empty()) flush();
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

Pattern Pattern::parse(std::string_view text) {
  Pattern p;
  auto semi = text.find(';');
  if (semi == std::string_view::npos) {
    p.prefix = {};
    p.cycle = parse_ints(text);
  } else {
    p.prefix = parse_ints(text.substr(0, semi));
    p.cycle = parse_ints(text.substr(semi + 1));
  }
  if (p.cycle.empty()) throw Error(ErrorKind::Parse, "pattern needs a non-empty cycle");
  return p;
}

int Pattern::at(long i) const {
  auto k = static_cast<std::size_t>(i < 0 ? -i : i);
  if (k < prefix.size()) return prefix[k];
  return cycle[(k - prefix.size()) % cycle.size()];
}

int Pattern::max() const {
  int m = *std::max_element(cycle.begin(), cycle.end());
  for (int v : prefix) m = std::max(m, v);
  return m;
}

int Pattern::min() const {
  int m = *std::min_element(cycle.begin(), cycle.end());
  for (int v : prefix) m = std::min(m, v);
  return m;
}

std::string Pattern::str() const {
  if (prefix.empty()) return join_ints(cycle);
  return join_ints(prefix) + ";" + join_ints(cycle);
}

// ---- parameters ---------------------------------------------------------------

BifluteParams BifluteParams::uniform(int A, int B, int C, bool integers) {
  BifluteParams p;
  p.A = A;
  p.B = B;
  p.C = C;
  p.a = Pattern::constant(A);
  p.b = Pattern::constant(B);
  p.c = Pattern::constant(C);
  p.integers = integers;
  return p;
}

void BifluteParams::validate() const {
  auto bad = [](const std::string& why) { throw Error(ErrorKind::InvalidParameters, why); };
  if (A < 0 || B < 0 || C < 1) bad("biflute bounds need A, B >= 0 and C >= 1");
  for (const Pattern* q : {&a, &b, &c})
    if (q->cycle.empty()) bad("pattern cycle is empty");
  if (a.min() < 0 || b.min() < 0) bad("loop graph parameters must be >= 0");
  if (a.max() > A) bad("a_i exceeds A");
  if (b.max() > B) bad("b_i exceeds B");
  if (c.min() < 1) bad("c_i must be >= 1");
  if (c.max() > C) bad("c_i exceeds C");
  // eventually a_i + b_i >= 1 throughout, or eventually 0 throughout
  std::size_t start = std::max(a.settle(), b.settle());
  std::size_t period = std::lcm(a.period(), b.period());
  bool some_empty = false, some_full = false;
  for (std::size_t i = start; i < start + period; ++i) {
    long k = static_cast<long>(i);
    (a.at(k) + b.at(k) == 0 ? some_empty : some_full) = true;
  }
  if (some_empty && some_full) bad("a_i + b_i must eventually be always >= 1 or always 0");
}

std::string BifluteParams::str() const {
  std::ostringstream o;
  o << "(" << A << "," << B << "," << C << ")";
  return o.str();
}

PantsScheme biflute(const BifluteParams& p) {
  p.validate();
  PantsScheme base = p.integers ? graph::z_graph() : graph::flute_graph();
  const std::string family = p.integers ? "z" : "f";
  auto gen = [p, base, family](int d) {
    RawGraph r = base.raw(d);
    auto glue = [&](long pos, long k) {
      if (std::labs(pos) > d) return;
      auto piece = graph::loop_graph(p.a.at(k), p.b.at(k));
      if (piece.vertex_count() == 0) return;
      RawGraph q;
      q.graph = piece;
      for (const auto& [id, v] : piece.vertices()) q.rank[id] = 0;
      const std::string host = family + ":" + std::to_string(pos);
      SlotRef g = *piece.first_free_slot();
      r.merge(q, host + "/", r.rank.at(host));
      r.graph.pair({host, 2}, {host + "/" + g.vertex, g.slot});
    };
    long pos = 0;
    for (long k = 0; pos <= d; ++k) {
      glue(pos, k);
      pos += p.c.at(k);
    }
    if (p.integers) {
      pos = 0;
      for (long k = -1; pos >= -d; --k) {
        pos -= p.c.at(k);
        glue(pos, k);
      }
    }
    return r;
  };
  PantsScheme s("biflute" + p.str(), gen);
  if (p.integers) return s.with_levels(graph::LevelRoot::at_edge(graph::edge_id({"z:0", 1}, {"z:1", 0})));
  return s.with_levels(graph::LevelRoot::at_boundary());
}

// ---- recognition ----------------------------------------------------------------

namespace {

[[noreturn]] void not_biflute(const std::string& vertex, const std::string& why) {
  throw Error(ErrorKind::NotABiflute, "at " + vertex + ": " + why);
}

// Vertices reachable from `start` without passing through `blocked`.
std::set<std::string> reach(const TruncatedGraph& g, const std::string& start, const std::string& blocked) {
  std::set<std::string> seen{start};
  std::vector<std::string> stack{start};
  while (!stack.empty()) {
    std::string v = stack.back();
    stack.pop_back();
    const auto& vx = g.vertex(v);
    for (int i = 0; i < 3; ++i) {
      if (vx.slots[static_cast<std::size_t>(i)].state != SlotState::Paired) continue;
      std::string w = g.across({v, i}).vertex;
      if (w == blocked) continue;
      if (seen.insert(w).second) stack.push_back(w);
    }
  }
  return seen;
}

bool has_open(const TruncatedGraph& g, const std::set<std::string>& part) {
  for (const auto& v : part)
    for (const auto& s : g.vertex(v).slots)
      if (s.state == SlotState::Frontier || s.state == SlotState::Boundary) return true;
  return false;
}

// Shortest dual-graph path between two vertices.
std::vector<std::string> path_between(const TruncatedGraph& g, const std::string& a, const std::string& b) {
  std::map<std::string, std::string> prev{{a, a}};
  std::deque<std::string> queue{a};
  while (!queue.empty()) {
    std::string v = queue.front();
    queue.pop_front();
    if (v == b) break;
    for (int i = 0; i < 3; ++i) {
      if (g.slot({v, i}).state != SlotState::Paired) continue;
      std::string w = g.across({v, i}).vertex;
      if (prev.emplace(w, v).second) queue.push_back(w);
    }
  }
  if (!prev.count(b)) throw Error(ErrorKind::NotABiflute, "no path from " + a + " to " + b);
  std::vector<std::string> path{b};
  while (path.back() != a) path.push_back(prev.at(path.back()));
  std::reverse(path.begin(), path.end());
  return path;
}

int slot_towards(const TruncatedGraph& g, const std::string& v, const std::string& w, int avoid) {
  for (int i = 0; i < 3; ++i) {
    if (i == avoid || g.slot({v, i}).state != SlotState::Paired) continue;
    if (g.across({v, i}).vertex == w) return i;
  }
  return -1;
}

Recognition read_spine(const TruncatedGraph& g, const SlotRef& from, const SlotRef& to, bool embedded) {
  Recognition rec;
  rec.spine = path_between(g, from.vertex, to.vertex);
  const auto& sp = rec.spine;
  std::set<std::string> on_spine(sp.begin(), sp.end());
  std::vector<std::set<std::pair<int, int>>> kept;
  long lead = -1, last = -1;
  for (std::size_t i = 0; i < sp.size(); ++i) {
    const std::string& v = sp[i];
    int in = i == 0 ? from.slot : slot_towards(g, v, sp[i - 1], -1);
    int out = i + 1 == sp.size() ? to.slot : slot_towards(g, v, sp[i + 1], in);
    if (in < 0 || out < 0 || in == out) not_biflute(v, "spine passes through one cuff twice");
    int third = 3 - in - out;
    const auto& st = g.slot({v, third});
    bool attached = false;
    if (st.state == SlotState::Frontier) {
      if (!embedded) not_biflute(v, "third cuff is cut off by the truncation");
    } else if (st.state == SlotState::Paired) {
      std::string w = g.across({v, third}).vertex;
      if (w == v) not_biflute(v, "self-glued spine pants");
      auto part = reach(g, w, v);
      for (const auto& x : part)
        if (on_spine.count(x)) not_biflute(v, "third cuff leads back to the spine");
      if (has_open(g, part)) {
        if (!embedded) not_biflute(v, "branching: a second spine leaves here");
      } else {
        auto types = loop_graph_types(g, {v, third});
        if (types.empty()) not_biflute(v, "attached piece is not a loop graph");
        rec.positions.push_back(static_cast<long>(i));
        rec.parses.push_back(types);
        attached = true;
      }
    }
    if (attached) {
      if (lead < 0) lead = static_cast<long>(i);
      last = static_cast<long>(i);
    }
  }
  // minimal bounds: smallest A, then smallest B given A
  int A = 0, B = 0;
  for (const auto& ps : rec.parses) {
    int best = ps.front().first;
    for (auto [a, b] : ps) best = std::min(best, a);
    A = std::max(A, best);
  }
  for (const auto& ps : rec.parses) {
    int best = -1;
    for (auto [a, b] : ps)
      if (a <= A && (best < 0 || b < best)) best = b;
    B = std::max(B, best);
  }
  int C = 1;
  if (!rec.positions.empty()) {
    C = static_cast<int>(std::max<long>(lead + 1, static_cast<long>(sp.size()) - last));
    for (std::size_t k = 1; k < rec.positions.size(); ++k)
      C = std::max(C, static_cast<int>(rec.positions[k] - rec.positions[k - 1]));
  }
  rec.A = A;
  rec.B = B;
  rec.C = C;
  return rec;
}

}  // namespace

std::vector<std::pair<int, int>> loop_graph_types(const TruncatedGraph& g, const SlotRef& at) {
  if (g.slot(at).state != SlotState::Paired) return {};
  SlotRef glue = g.across(at);
  if (glue.vertex == at.vertex) return {};
  auto part = reach(g, glue.vertex, at.vertex);
  if (part.count(at.vertex)) return {};
  // degrees inside the piece; every slot but the glue must be paired or a cusp
  std::map<std::string, int> deg;
  long half_edges = 0;
  for (const auto& v : part) {
    int d = 0;
    for (int i = 0; i < 3; ++i) {
      const auto& s = g.slot({v, i});
      if (SlotRef{v, i} == glue) continue;
      if (s.state == SlotState::Paired) {
        ++d;
      } else if (s.state != SlotState::Cusp) {
        return {};
      }
    }
    deg[v] = d;
    half_edges += d;
  }
  long V = static_cast<long>(part.size());
  if (half_edges / 2 - V + 1 != 1) return {};
  // peel to the cycle
  std::map<std::string, int> core = deg;
  std::deque<std::string> peel;
  for (const auto& [v, d] : core)
    if (d <= 1) peel.push_back(v);
  std::set<std::string> removed;
  while (!peel.empty()) {
    std::string v = peel.front();
    peel.pop_front();
    if (!removed.insert(v).second) continue;
    for (int i = 0; i < 3; ++i) {
      if (SlotRef{v, i} == glue || g.slot({v, i}).state != SlotState::Paired) continue;
      std::string w = g.across({v, i}).vertex;
      if (removed.count(w)) continue;
      if (--core[w] <= 1) peel.push_back(w);
    }
  }
  long L = V - static_cast<long>(removed.size());
  if (L <= 0) return {};
  // off-cycle vertices must form one path ending at the glue vertex
  long p = static_cast<long>(removed.size());
  if (p > 0) {
    if (!removed.count(glue.vertex) || deg.at(glue.vertex) != 1) return {};
    for (const auto& v : removed)
      if (v != glue.vertex && deg.at(v) != 2) return {};
  } else if (deg.at(glue.vertex) != 2) {
    return {};
  }
  for (const auto& [v, d] : deg)
    if (!removed.count(v) && v != glue.vertex && d != 2 && d != 3) return {};
  const int l = static_cast<int>(L);
  if (p == 0) return {{0, l}, {1, l - 1}};
  return {{static_cast<int>(p) + 1, l - 1}};
}

bool Recognition::compatible_with(int a_max, int b_max, int c_max) const {
  if (c_max < 1) return false;
  for (const auto& ps : parses) {
    bool fits = std::any_of(ps.begin(), ps.end(), [&](auto ab) { return ab.first <= a_max && ab.second <= b_max; });
    if (!fits) return false;
  }
  return positions.empty() || C <= c_max;
}

std::string Recognition::verdict() const {
  return "(" + std::to_string(A) + "," + std::to_string(B) + "," + std::to_string(C) + ") compatible at depth " +
         std::to_string(depth);
}

Recognition recognize_graph(const TruncatedGraph& g, const SlotRef& from, const SlotRef& to) {
  return read_spine(g, from, to, false);
}

Recognition recognize_between(const TruncatedGraph& g, const SlotRef& from, const SlotRef& to) {
  return read_spine(g, from, to, true);
}

Recognition recognize_biflute(const PantsScheme& s, int depth) {
  if (depth < 2) throw Error(ErrorKind::InvalidParameters, "recognition needs depth >= 2");
  TruncatedGraph g = s.truncate(depth);
  std::vector<SlotRef> ends = g.slots_in(SlotState::Frontier);
  if (ends.size() == 1) {
    auto bs = g.slots_in(SlotState::Boundary);
    if (bs.size() == 1) ends.insert(ends.begin(), bs.front());
  }
  if (ends.size() != 2) {
    // the first pants with three directions leading to an end
    std::set<SlotRef> end_set(ends.begin(), ends.end());
    for (const auto& [id, v] : g.vertices()) {
      int dirs = 0;
      for (int i = 0; i < 3; ++i) {
        SlotRef sr{id, i};
        if (end_set.count(sr)) {
          ++dirs;
          continue;
        }
        if (v.slots[static_cast<std::size_t>(i)].state != SlotState::Paired) continue;
        std::string w = g.across(sr).vertex;
        if (w == id) continue;
        auto part = reach(g, w, id);
        bool found = false;
        for (const auto& e : ends) found = found || (part.count(e.vertex) && e.vertex != id);
        if (found) ++dirs;
      }
      if (dirs >= 3) not_biflute(id, "three directions lead to ends");
    }
    throw Error(ErrorKind::NotABiflute, "expected two spine ends, found " + std::to_string(ends.size()));
  }
  Recognition rec = read_spine(g, ends[0], ends[1], false);
  rec.depth = depth;
  return rec;
}

}  // namespace pw::construct
