#include "pantswork/certify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "pantswork/error.hpp"

namespace pw::certify {

using geometry::BulkCrossing;
using geometry::curve_length;
using geometry::kSlack;
using geometry::LengthBound;
using graph::SlotState;

const char* to_string(MapKind k) {
  switch (k) {
    case MapKind::Shift: return "shift-along-biflute";
    case MapKind::Shear: return "flute-shear";
    case MapKind::Multitwist: return "multitwist";
    case MapKind::EndSwap: return "end-swap";
    case MapKind::Compact: return "compact";
    case MapKind::Composite: return "composite";
    case MapKind::Declared: return "declared";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Modular: return "MODULAR";
    case Verdict::NotQC: return "NOT_QC";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

namespace {

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(15);
  o << v;
  return o.str();
}

// "<fam>:<int><rest>"
struct Member {
  std::string family;
  long index = 0;
  std::string rest;
};

std::optional<Member> member(const std::string& v) {
  auto colon = v.find(':');
  if (colon == std::string::npos || colon == 0) return std::nullopt;
  std::size_t j = colon + 1;
  if (j < v.size() && v[j] == '-') ++j;
  std::size_t k = j;
  while (k < v.size() && std::isdigit(static_cast<unsigned char>(v[k]))) ++k;
  if (k == j) return std::nullopt;
  return Member{v.substr(0, colon), std::stol(v.substr(colon + 1, k - colon - 1)), v.substr(k)};
}

long curve_index(const Edge& e) {
  auto a = member(e.a.vertex), b = member(e.b.vertex);
  if (a && b) return std::max(a->index, b->index);
  if (a) return a->index;
  if (b) return b->index;
  return 0;
}

}  // namespace

// ---- mapping schemes -----------------------------------------------------------------

bool MappingScheme::moves(const std::string& v) const {
  if (kind == MapKind::Composite)
    return std::any_of(parts.begin(), parts.end(), [&](const MappingScheme& p) { return p.moves(v); });
  if (kind == MapKind::Multitwist) return false;
  if (support) return support(v);
  return static_cast<bool>(vertex);
}

std::optional<std::string> MappingScheme::map_vertex(const std::string& v) const {
  if (kind == MapKind::Composite) {
    std::string cur = v;
    for (const auto& p : parts) {
      auto next = p.map_vertex(cur);
      if (!next) return std::nullopt;
      cur = *next;
    }
    return cur;
  }
  if (!moves(v)) return v;
  if (!vertex) return std::nullopt;
  return vertex(v);
}

std::optional<std::string> MappingScheme::map_edge(const TruncatedGraph& g, const Edge& e) const {
  auto a = map_vertex(e.a.vertex), b = map_vertex(e.b.vertex);
  if (!a || !b) return std::nullopt;
  std::string id = graph::edge_id({*a, e.a.slot}, {*b, e.b.slot});
  if (!g.has_edge(id)) return std::nullopt;
  return id;
}

std::optional<CurvePath> MappingScheme::image(const TruncatedGraph& g, const CurvePath& c) const {
  if (c.declared_length) return std::nullopt;
  CurvePath out = c;
  out.id = "f(" + c.id + ")";
  if (!c.cuff.empty()) {
    if (!g.has_edge(c.cuff)) {
      // the caller's graph may be larger than the source truncation; edges of
      // the source are looked up through their endpoints
      return std::nullopt;
    }
    auto id = map_edge(g, g.edge(c.cuff));
    if (!id) return std::nullopt;
    out.cuff = *id;
    return out;
  }
  for (auto& k : out.crossings) {
    if (!g.has_edge(k.edge)) return std::nullopt;
    auto id = map_edge(g, g.edge(k.edge));
    if (!id) return std::nullopt;
    k.edge = *id;
  }
  return out;
}

std::string MappingScheme::trace(const std::string& v) const {
  if (kind == MapKind::Composite) {
    for (const auto& p : parts)
      if (p.moves(v)) return p.trace(v);
    return v;
  }
  if (!moves(v)) return v;
  if (vertex) return vertex(v).value_or("?");
  return name + "(" + v + ")";
}

MappingScheme MappingScheme::inverse() const {
  MappingScheme m = *this;
  m.name = name + "^-1";
  std::swap(m.vertex, m.inverse_vertex);
  for (auto& p : m.powers) p.rule.c = -p.rule.c;
  std::reverse(m.parts.begin(), m.parts.end());
  for (auto& p : m.parts) p = p.inverse();
  if (obstruction) {
    auto ob = obstruction;
    m.obstruction = [ob](const FNStructure& x, long i, int d) -> std::optional<CurvePair> {
      auto p = ob(x, i, d);
      if (!p) return std::nullopt;
      return CurvePair{p->image, p->source};
    };
  }
  return m;
}

MappingScheme identity_map() {
  MappingScheme m;
  m.kind = MapKind::Compact;
  m.name = "id";
  m.vertex = [](const std::string& v) -> std::optional<std::string> { return v; };
  m.inverse_vertex = m.vertex;
  m.support = [](const std::string&) { return false; };
  return m;
}

namespace {

VertexMap family_shift(const std::string& family, long step) {
  return [family, step](const std::string& v) -> std::optional<std::string> {
    auto m = member(v);
    if (!m || m->family != family) return std::nullopt;
    return family + ":" + std::to_string(m->index + step) + m->rest;
  };
}

}  // namespace

MappingScheme shift(const std::string& family, long step, std::function<bool(const std::string&)> support) {
  MappingScheme m;
  m.kind = MapKind::Shift;
  m.name = "shift(" + family + "," + std::to_string(step) + ")";
  m.vertex = family_shift(family, step);
  m.inverse_vertex = family_shift(family, -step);
  if (!support) {
    support = [family](const std::string& v) {
      auto x = member(v);
      return x && x->family == family;
    };
  }
  m.support = std::move(support);
  m.reach = static_cast<int>(std::labs(step));
  m.carrier = [family](int d) {
    return std::pair{SlotRef{family + ":" + std::to_string(-d), 0}, SlotRef{family + ":" + std::to_string(d), 1}};
  };
  return m;
}

MappingScheme carried_shift(std::string name, std::function<std::pair<SlotRef, SlotRef>(int)> carrier,
                            std::function<bool(const std::string&)> support, construct::BifluteParams along) {
  MappingScheme m;
  m.kind = MapKind::Shift;
  m.name = std::move(name);
  m.carrier = std::move(carrier);
  m.support = std::move(support);
  m.along = std::move(along);
  return m;
}

MappingScheme multitwist(std::string name, std::vector<FamilyRule> powers) {
  MappingScheme m;
  m.kind = MapKind::Multitwist;
  m.name = std::move(name);
  m.powers = std::move(powers);
  m.vertex = [](const std::string& v) -> std::optional<std::string> { return v; };
  m.inverse_vertex = m.vertex;
  return m;
}

MappingScheme end_swap(const construct::REWitness& w) {
  MappingScheme m;
  m.kind = MapKind::EndSwap;
  m.name = "swap(" + w.x.end() + "," + w.y.end() + ")";
  const std::string px = w.x.prefix, py = w.y.prefix;
  auto swap = [px, py](const std::string& v) -> std::optional<std::string> {
    if (v.rfind(px, 0) == 0) return py + v.substr(px.size());
    if (v.rfind(py, 0) == 0) return px + v.substr(py.size());
    return v;
  };
  m.vertex = swap;
  m.inverse_vertex = swap;
  m.support = [px, py](const std::string& v) { return v.rfind(px, 0) == 0 || v.rfind(py, 0) == 0; };
  m.reach = std::abs(w.x.rank - w.y.rank);
  return m;
}

MappingScheme compact(std::string name, std::vector<std::pair<std::string, std::string>> swaps) {
  std::map<std::string, std::string> f, b;
  for (const auto& [u, v] : swaps) {
    f[u] = v;
    b[v] = u;
  }
  MappingScheme m;
  m.kind = MapKind::Compact;
  m.name = std::move(name);
  m.vertex = [f](const std::string& v) -> std::optional<std::string> {
    auto it = f.find(v);
    return it == f.end() ? v : it->second;
  };
  m.inverse_vertex = [b](const std::string& v) -> std::optional<std::string> {
    auto it = b.find(v);
    return it == b.end() ? v : it->second;
  };
  m.support = [f](const std::string& v) { return f.count(v) != 0; };
  return m;
}

MappingScheme composite(std::string name, std::vector<MappingScheme> parts, bool disjoint) {
  MappingScheme m;
  m.kind = MapKind::Composite;
  m.name = std::move(name);
  m.parts = std::move(parts);
  m.disjoint = disjoint;
  bool all = !m.parts.empty();
  for (const auto& p : m.parts) {
    all = all && static_cast<bool>(p.vertex);
    m.reach = std::max(m.reach, p.reach);
  }
  if (all) {
    // marks the composite as having a graph action; map_vertex chains the parts
    m.vertex = [](const std::string& v) -> std::optional<std::string> { return v; };
  }
  return m;
}

MappingScheme declared(std::string name, std::function<double(long)> lower_bound, std::string growth) {
  MappingScheme m;
  m.kind = MapKind::Declared;
  m.name = std::move(name);
  m.declared = std::move(lower_bound);
  m.declared_growth = std::move(growth);
  m.symbolic = true;
  return m;
}

// ---- enclosing paths ---------------------------------------------------------------------

CurvePath enclosing_path(const FNStructure& x, const std::string& family, long a, long b, int depth) {
  if (b <= a) throw Error(ErrorKind::InvalidParameters, "enclosing path needs a < b");
  const TruncatedGraph g = x.scheme().truncate(depth);
  CurvePath c;
  c.id = "alpha(" + family + ":" + std::to_string(a) + "," + family + ":" + std::to_string(b) + ")";
  c.index = a;
  double top = 0;
  for (long k = a; k < b; ++k) {
    std::string id = graph::edge_id({family + ":" + std::to_string(k), 1}, {family + ":" + std::to_string(k + 1), 0});
    if (!g.has_edge(id)) throw Error(ErrorKind::PathNotCarried, c.id + " needs " + id);
    const Edge& e = g.edge(id);
    double l = x.length(e);
    top = std::max(top, l);
    c.crossings.push_back({id, 2});
    if (double n = x.block_count(e); n > 0) {
      std::string rule;
      for (const auto& r : x.block_rules())
        if (r.index(e)) rule = r.count.str();
      c.bulk.push_back(BulkCrossing{l, 2 * n, rule});
    }
  }
  // pants met on the way have all cuffs of length 1 in the fixtures using this
  c.crossing_slack = geometry::crossing_slack(std::min(top, 1.0));
  return c;
}

std::function<std::optional<CurvePair>(const FNStructure&, long, int)> enclosing_family(std::string family,
                                                                                       long stride) {
  return [family, stride](const FNStructure& x, long i, int depth) -> std::optional<CurvePair> {
    try {
      CurvePair p{enclosing_path(x, family, stride * i, stride * (i + 1), depth),
                  enclosing_path(x, family, stride * (i + 1), stride * (i + 2), depth)};
      // indexed by the pair member farther out, which dominates the ratio
      p.source.index = p.image.index = i >= 0 ? i + 1 : i;
      return p;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::PathNotCarried || e.kind() == ErrorKind::NonPositiveLength) return std::nullopt;
      throw;
    }
  };
}

// ---- Wolpert --------------------------------------------------------------------------------

namespace {

double pair_ratio(const FNStructure& x, const FNStructure& y, const CurvePath& a, const CurvePath& b, int dx,
                  int dy) {
  LengthBound la, lb;
  try {
    la = curve_length(x, a, dx);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::PathNotCarried) throw Error(ErrorKind::CurveNotCarried, e.what());
    throw;
  }
  try {
    lb = curve_length(y, b, dy);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::PathNotCarried) throw Error(ErrorKind::CurveNotCarried, e.what());
    throw;
  }
  if (la.exact() && lb.exact()) return std::max(lb.lo / la.lo, la.lo / lb.lo);
  double up = std::isfinite(la.hi) ? lb.lo / la.hi : 0;
  double down = std::isfinite(lb.hi) ? la.lo / lb.hi : 0;
  return std::max(up, down);
}

}  // namespace

WolpertResult wolpert_lower_bound(const FNStructure& x, const FNStructure& y, const MappingScheme& f,
                                  const std::vector<CurvePath>& curves, int depth) {
  WolpertResult out;
  const TruncatedGraph gx = x.scheme().truncate(depth);
  const TruncatedGraph gy = y.scheme().truncate(depth + f.reach);
  for (const auto& c : curves) {
    if (!c.cuff.empty() && !gx.has_edge(c.cuff)) throw Error(ErrorKind::CurveNotCarried, c.id);
    for (const auto& k : c.crossings)
      if (!gx.has_edge(k.edge)) throw Error(ErrorKind::CurveNotCarried, c.id);
    // the image is built on the larger graph, which contains gx
    auto im = f.image(gy, c);
    if (!im) throw Error(ErrorKind::MapUndefinedOnCurve, c.id);
    double r = pair_ratio(x, y, c, *im, depth, depth + f.reach);
    out.terms.push_back({c.index, c.id, r});
    if (r > out.bound) {
      out.bound = r;
      out.curve = c.id;
    }
  }
  return out;
}

// ---- Matsuzaki -------------------------------------------------------------------------------

double matsuzaki_lower_term(double l, long n) {
  if (!(l > 0)) throw Error(ErrorKind::NonPositiveLength, "twist curve of length " + fmt(l));
  double k = std::max(0.0, 2.0 * static_cast<double>(std::labs(n)) - 1);
  return std::sqrt(k * l / std::numbers::pi) + 1;
}

double matsuzaki_upper_term(double l, long n) {
  if (!(l > 0)) throw Error(ErrorKind::NonPositiveLength, "twist curve of length " + fmt(l));
  double theta = std::numbers::pi - 2 * std::atan(std::sinh(l / 2));
  double u = static_cast<double>(std::labs(n)) * l / (2 * theta);
  double s = std::sqrt(u * u + 1) + u;
  return s * s;
}

Interval matsuzaki_bounds(const std::vector<double>& lengths, const std::vector<long>& powers) {
  if (lengths.size() != powers.size()) throw Error(ErrorKind::InvalidParameters, "lengths and powers differ in size");
  Interval out;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    out.lo = std::max(out.lo, matsuzaki_lower_term(lengths[i], powers[i]));
    out.hi = std::max(out.hi, matsuzaki_upper_term(lengths[i], powers[i]));
  }
  return out;
}

Interval matsuzaki_bounds(const LengthRule& lengths, const LengthRule& powers) {
  bool zero = powers.family == LengthRule::Family::Constant && std::lround(powers.c) == 0;
  if (zero) return {};
  if (!powers.bounded_above() || !lengths.bounded_above())
    throw Error(ErrorKind::UnboundedFamily, "twist powers " + powers.str() + " on lengths " + lengths.str());
  // both terms increase with l and |n|; the sups sit at the largest values
  double l = lengths.family == LengthRule::Family::Inverse ? lengths.at(1) : lengths.at(0);
  long n = std::lround(std::fabs(powers.family == LengthRule::Family::Inverse ? powers.at(1) : powers.at(0)));
  return matsuzaki_bounds({l}, {n});
}

// ---- growth families ---------------------------------------------------------------------------

namespace {

// Spread max/min of the two slopes over the last three terms, when both are
// positive and finite.
std::optional<double> slope_spread(const std::vector<Term>& terms, const std::string& name) {
  if (terms.size() < 3) return std::nullopt;
  auto point = [&](const Term& t) -> std::optional<std::pair<double, double>> {
    const double i = std::fabs(static_cast<double>(t.index));
    if (name == "sqrt") return std::pair{std::sqrt(i), t.ratio};
    if (name == "linear") return std::pair{i, t.ratio};
    if (name == "exp") return std::pair{i, std::log(t.ratio)};
    if (t.ratio <= 1) return std::nullopt;
    return std::pair{i, std::log(std::log(t.ratio))};
  };
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = terms.size() - 3; k < terms.size(); ++k) {
    auto p = point(terms[k]);
    if (!p || !std::isfinite(p->first) || !std::isfinite(p->second)) return std::nullopt;
    pts.push_back(*p);
  }
  double s1 = (pts[1].second - pts[0].second) / (pts[1].first - pts[0].first);
  double s2 = (pts[2].second - pts[1].second) / (pts[2].first - pts[1].first);
  if (!(s1 > 0 && s2 > 0) || !std::isfinite(s1) || !std::isfinite(s2)) return std::nullopt;
  return std::max(s1, s2) / std::min(s1, s2);
}

// Best fitting family (constant slope within 25%); ties go to the slower one.
std::optional<std::string> best_family(const std::vector<Term>& terms, const std::set<std::string>* allowed) {
  std::optional<std::string> best;
  double spread = 0;
  for (const auto& name : {"sqrt", "linear", "exp", "doubexp"}) {
    if (allowed && !allowed->count(name)) continue;
    auto s = slope_spread(terms, name);
    if (!s || *s > 1.25) continue;
    if (!best || *s < spread * (1 - 1e-9)) {
      best = name;
      spread = *s;
    }
  }
  return best;
}

}  // namespace

std::optional<std::string> growth_family(const std::vector<Term>& terms) {
  return best_family(terms, nullptr);
}

namespace {

// Strictly increasing records, one candidate per |index|.
std::vector<Term> record_chain(std::vector<Term> terms) {
  std::stable_sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
    long x = std::labs(a.index), y = std::labs(b.index);
    if (x != y) return x < y;
    return a.index > b.index;
  });
  std::vector<Term> chain;
  for (std::size_t i = 0; i < terms.size();) {
    std::size_t j = i;
    Term best = terms[i];
    while (j < terms.size() && std::labs(terms[j].index) == std::labs(terms[i].index)) {
      if (terms[j].ratio > best.ratio) best = terms[j];
      ++j;
    }
    if (std::isfinite(best.ratio) && best.ratio > 1 + kSlack &&
        (chain.empty() || best.ratio > chain.back().ratio * (1 + kSlack)))
      chain.push_back(best);
    i = j;
  }
  return chain;
}

std::set<std::string> symbolic_sources(const FNStructure& x, const std::vector<CurvePair>& pairs) {
  std::set<std::string> out;
  for (const auto& r : x.length_rules())
    if (auto g = r.rule.growth()) out.insert(*g);
  for (const auto& b : x.block_rules())
    if (auto g = b.count.growth()) out.insert(*g);
  for (const auto& p : pairs)
    for (const auto* c : {&p.source, &p.image})
      for (const auto& b : c->bulk) {
        if (b.rule.empty()) continue;
        try {
          if (auto g = LengthRule::parse(b.rule).growth()) out.insert(*g);
        } catch (const Error&) {
        }
      }
  return out;
}

// The best fitting family among those with a symbolic source.
std::optional<std::string> confirmed_family(const std::vector<Term>& chain, const std::set<std::string>& sources) {
  return best_family(chain, &sources);
}

std::optional<std::string> pants_to_pants(const FNStructure& x, const MappingScheme& f, int depth) {
  if (!f.vertex) return "no action on this decomposition";
  const TruncatedGraph g = x.scheme().truncate(depth);
  const TruncatedGraph h = x.scheme().truncate(depth + f.reach);
  for (const auto& [v, vx] : g.vertices()) {
    if (!f.moves(v)) continue;
    auto img = f.map_vertex(v);
    if (!img) return "undefined at " + v;
    if (!h.has_vertex(*img)) return v + " maps outside the scheme";
    for (int i = 0; i < 3; ++i) {
      const auto& s = g.slot({v, i});
      const auto& t = h.slot({*img, i});
      if (s.state == SlotState::Frontier || t.state == SlotState::Frontier) continue;
      if (s.state != SlotState::Paired) {
        if (t.state != s.state) return "slot " + SlotRef{v, i}.str() + " changes state";
        continue;
      }
      const Edge& e = g.edge(s.edge);
      SlotRef far = e.other({v, i});
      if (!f.moves(far.vertex)) {
        // leaves the support: the complement is fixed and the seam is compact
        if (t.state != SlotState::Paired) return "support boundary at " + e.id + " not kept";
        continue;
      }
      auto w = f.map_vertex(far.vertex);
      if (!w) return "undefined at " + far.vertex;
      std::string id = graph::edge_id({*img, i}, {*w, far.slot});
      if (!h.has_edge(id)) {
        if (h.has_vertex(*w) && h.slot({*w, far.slot}).state == SlotState::Frontier) continue;
        return "edge " + e.id + " has no image";
      }
      if (x.block_count(e) != x.block_count(h.edge(id))) return "hidden chains differ at " + e.id;
    }
  }
  return std::nullopt;
}

struct BifluteCheck {
  std::optional<std::string> failure;
  std::string params;
};

BifluteCheck carried_biflute(const FNStructure& x, const MappingScheme& f, int depth) {
  if (!f.carrier) return {"no carrier biflute", ""};
  const TruncatedGraph g = x.scheme().truncate(depth);
  auto [from, to] = f.carrier(depth);
  if (!g.has_vertex(from.vertex) || !g.has_vertex(to.vertex)) return {"carrier not visible at depth", ""};
  construct::Recognition rec;
  try {
    rec = construct::recognize_between(g, from, to);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotABiflute) throw;
    return {std::string("carrier is not a biflute: ") + e.what(), ""};
  }
  // hidden chains on the spine lengthen the gaps
  int C = rec.C;
  for (std::size_t k = 1; k < rec.positions.size(); ++k) {
    double gap = static_cast<double>(rec.positions[k] - rec.positions[k - 1]);
    for (long p = rec.positions[k - 1]; p < rec.positions[k]; ++p) {
      const std::string& a = rec.spine[static_cast<std::size_t>(p)];
      const std::string& b = rec.spine[static_cast<std::size_t>(p) + 1];
      for (int i = 0; i < 3; ++i) {
        const auto& s = g.slot({a, i});
        if (s.state == SlotState::Paired && g.across({a, i}).vertex == b) {
          gap += x.block_count(g.edge(s.edge));
          break;
        }
      }
    }
    C = static_cast<int>(std::min(gap, 1e9));
    C = std::max(C, rec.C);
  }
  for (const auto& b : x.block_rules()) {
    if (b.count.bounded_above()) continue;
    for (std::size_t p = 0; p + 1 < rec.spine.size(); ++p)
      for (int i = 0; i < 3; ++i) {
        const auto& s = g.slot({rec.spine[p], i});
        if (s.state == SlotState::Paired && g.across({rec.spine[p], i}).vertex == rec.spine[p + 1] &&
            b.index(g.edge(s.edge)))
          return {"spine gaps grow without bound (" + b.name + ")", ""};
      }
  }
  std::string params = "(" + std::to_string(rec.A) + "," + std::to_string(rec.B) + "," + std::to_string(C) + ")";
  if (f.along && !(rec.compatible_with(f.along->A, f.along->B, f.along->C) && C <= f.along->C))
    return {"carrier reads " + params + ", expected " + f.along->str(), params};
  return {std::nullopt, params};
}

double max_twist(const FNStructure& x, int depth) {
  double T = 0;
  const TruncatedGraph g = x.scheme().truncate(depth);
  for (const auto& [id, e] : g.edges()) T = std::max(T, std::fabs(x.twist(e)));
  return T;
}

bool overlapping(const FNStructure& x, const MappingScheme& f, int depth) {
  const TruncatedGraph g = x.scheme().truncate(depth);
  for (const auto& [v, vx] : g.vertices()) {
    int n = 0;
    for (const auto& p : f.parts) n += p.moves(v) ? 1 : 0;
    if (n > 1) return true;
  }
  return false;
}

}  // namespace

// ---- certify ---------------------------------------------------------------------------------

std::string Certificate::serialize() const {
  std::ostringstream o;
  o << "certificate v1\n";
  o << "verdict=" << to_string(verdict) << "\n";
  o << "witness=" << witness << "\n";
  if (interval) o << "interval=[" << fmt(interval->lo) << "," << fmt(interval->hi) << "]\n";
  o << "sequence=";
  for (std::size_t i = 0; i < sequence.size(); ++i)
    o << (i ? ";" : "") << "(" << sequence[i].index << "," << sequence[i].curve << "," << fmt(sequence[i].ratio)
      << ")";
  o << "\n";
  o << "growth=" << growth << "\n";
  o << "depth=" << depth << "\n";
  return o.str();
}

namespace {

Certificate structural(const FNStructure& x, const MappingScheme& f, int depth, std::string& why) {
  Certificate c;
  c.depth = depth;
  if (f.kind == MapKind::Composite && f.disjoint && overlapping(x, f, depth)) {
    why = "composite supports overlap";
    return c;
  }
  auto M = x.bounded_constant(depth);
  if (!M) {
    why = "structure is not of bounded type";
    return c;
  }
  if (!is_untwisted(x, max_twist(x, depth), depth)) {
    why = "twists are unbounded";
    return c;
  }
  auto literal = pants_to_pants(x, f, depth);
  BifluteCheck bif{std::string("not a shift"), ""};
  if (f.kind == MapKind::Shift || f.kind == MapKind::Shear) bif = carried_biflute(x, f, depth);
  if (f.kind == MapKind::Composite && f.infinite) {
    why = "infinitely many factors";
    return c;
  }
  if (f.kind == MapKind::Composite && !f.vertex) {
    // every part must be modular on its own; supports are disjoint
    std::vector<std::string> ps;
    for (const auto& p : f.parts) {
      std::string w;
      Certificate pc = structural(x, p, depth, w);
      if (pc.verdict != Verdict::Modular) {
        why = p.name + ": " + w;
        return c;
      }
    }
    c.verdict = Verdict::Modular;
    c.witness = "M=" + fmt(*M) + " T=" + fmt(max_twist(x, depth)) + " parts=" + std::to_string(f.parts.size());
    return c;
  }
  if (literal && bif.failure) {
    why = *literal;
    if (f.kind == MapKind::Shift || f.kind == MapKind::Shear) why += "; " + *bif.failure;
    return c;
  }
  c.verdict = Verdict::Modular;
  std::ostringstream w;
  w << "M=" << fmt(*M) << " T=" << fmt(max_twist(x, depth));
  if (!bif.params.empty()) w << " biflute=" << bif.params;
  w << " pants-to-pants=" << (literal ? "straightened" : "literal");
  c.witness = w.str();
  return c;
}

}  // namespace

Certificate certify(const FNStructure& x, const MappingScheme& f, int depth, const Thresholds& t) {
  const double target = std::max(t.min_last, t.K);
  Certificate out;
  out.depth = depth;
  std::vector<std::string> blocked;

  // (1) pants to pants on a bounded, untwisted structure
  if (f.kind != MapKind::Multitwist && f.kind != MapKind::Declared) {
    std::string why;
    Certificate c = structural(x, f, depth, why);
    if (c.verdict == Verdict::Modular) return c;
    blocked.push_back(why);
  }

  // (2) multitwists
  if (f.kind == MapKind::Multitwist) {
    const TruncatedGraph g = x.scheme().truncate(depth);
    std::vector<double> ls;
    std::vector<long> ns;
    bool unbounded = false;
    for (const auto& p : f.powers) unbounded = unbounded || !p.rule.bounded_above();
    for (const auto& [id, e] : g.edges())
      for (const auto& p : f.powers) {
        auto i = p.index(e);
        if (!i || !p.applies(*i)) continue;
        long n = std::lround(p.rule.at(*i));
        if (n != 0 && !x.bounded_constant(depth)) unbounded = true;
        ls.push_back(x.length(e));
        ns.push_back(n);
        break;
      }
    if (!unbounded) {
      out.verdict = Verdict::Modular;
      out.interval = matsuzaki_bounds(ls, ns);
      out.witness = "multitwist K in [" + fmt(out.interval->lo) + "," + fmt(out.interval->hi) + "]";
      return out;
    }
    // divergent: lower bounds along the power families
    std::vector<Term> terms;
    std::set<std::string> sources;
    for (const auto& p : f.powers) {
      if (p.rule.family == LengthRule::Family::Linear) sources.insert("sqrt");
      if (auto gname = p.rule.growth(); gname && *gname != "linear") sources.insert(*gname);
    }
    for (const auto& r : x.length_rules())
      if (auto gname = r.rule.growth()) sources.insert(*gname);
    for (const auto& [id, e] : g.edges())
      for (const auto& p : f.powers) {
        auto i = p.index(e);
        if (!i || !p.applies(*i)) continue;
        terms.push_back({*i, id, matsuzaki_lower_term(x.length(e), std::lround(p.rule.at(*i)))});
        break;
      }
    auto chain = record_chain(terms);
    auto fam = confirmed_family(chain, sources);
    // extend along the formula when every twisted curve has a closed form
    bool closed = std::all_of(f.powers.begin(), f.powers.end(), [](const FamilyRule& p) { return p.rule.c != 0; });
    if (fam && closed && !chain.empty() && chain.back().ratio < target && x.length_rules().empty()) {
      const FamilyRule& p = f.powers.front();
      for (long i = std::max(1L, chain.back().index); i <= t.max_index && chain.back().ratio < target;) {
        i *= 2;
        if (!p.applies(i)) ++i;
        double r = matsuzaki_lower_term(1.0, std::lround(p.rule.at(i)));
        if (r > chain.back().ratio) chain.push_back({i, p.family + ":" + std::to_string(i), r});
      }
    }
    out.sequence = chain;
    if (fam && chain.size() >= static_cast<std::size_t>(t.min_terms) && chain.back().ratio >= target) {
      out.verdict = Verdict::NotQC;
      out.growth = *fam;
      out.witness = "twist lower bounds diverge";
      return out;
    }
    out.witness = "multitwist powers unbounded but no confirmed divergence";
    return out;
  }

  // (3) Wolpert sweep and declared bounds
  const bool graph_action = static_cast<bool>(f.vertex);
  auto sweep = [&](int d, std::vector<CurvePair>& pairs) {
    std::vector<Term> terms;
    if (graph_action) {
      const TruncatedGraph g = x.scheme().truncate(d);
      const TruncatedGraph h = x.scheme().truncate(d + f.reach);
      for (const auto& [id, e] : g.edges()) {
        CurvePath c = CurvePath::cuff_of(id, curve_index(e));
        auto im = f.image(h, c);
        if (!im) {
          // at the asked depth the image must exist; deeper sweeps may run off a finite scheme
          if (d == depth) throw Error(ErrorKind::MapUndefinedOnCurve, id + " has no image at depth " + std::to_string(d + f.reach));
          continue;
        }
        terms.push_back({c.index, id, pair_ratio(x, x, c, *im, d, d + f.reach)});
      }
    }
    if (f.obstruction) {
      for (long i = -d; i <= d; ++i) {
        auto p = f.obstruction(x, i, d);
        if (!p) continue;
        double r = pair_ratio(x, x, p->source, p->image, d + f.reach, d + f.reach);
        if (!std::isfinite(r)) continue;
        pairs.push_back(*p);
        terms.push_back({p->source.index, p->source.id, r});
      }
    }
    if (f.declared)
      for (long i = -d; i <= d; ++i) terms.push_back({i, "block:" + std::to_string(i), f.declared(i)});
    return terms;
  };

  std::vector<CurvePair> pairs;
  auto chain = record_chain(sweep(depth, pairs));
  auto sources = symbolic_sources(x, pairs);
  if (f.declared) sources.insert(f.declared_growth);
  auto fam = confirmed_family(chain, sources);

  if (fam && !chain.empty() && chain.back().ratio < target) {
    if (f.symbolic && (f.obstruction || f.declared)) {
      for (long i = std::max(1L, chain.back().index); i < t.max_index && chain.back().ratio < target;) {
        i *= 2;
        double r = 0;
        long at = i;
        std::string id;
        if (f.declared) {
          r = f.declared(i);
          id = "block:" + std::to_string(i);
        } else if (auto p = f.obstruction(x, i, depth)) {
          r = pair_ratio(x, x, p->source, p->image, depth + f.reach, depth + f.reach);
          id = p->source.id;
          at = p->source.index;
        }
        if (!std::isfinite(r)) break;
        if (r > chain.back().ratio * (1 + kSlack)) chain.push_back({at, id, r});
      }
    } else {
      for (int d = depth; d < t.max_depth && chain.back().ratio < target;) {
        d = std::min(2 * d, t.max_depth);
        std::vector<CurvePair> more;
        auto c2 = record_chain(sweep(d, more));
        if (c2.empty()) break;
        chain = c2;
        out.depth = d;
      }
    }
    fam = confirmed_family(chain, sources);
  }

  if (fam && chain.size() >= static_cast<std::size_t>(t.min_terms) && chain.back().ratio >= target) {
    out.verdict = Verdict::NotQC;
    out.sequence = chain;
    out.growth = f.declared ? "declared" : *fam;
    out.witness = f.declared ? "declared per-block lower bounds" : "Wolpert ratios diverge";
    return out;
  }

  // (4)
  out.sequence = chain;
  if (chain.size() < static_cast<std::size_t>(t.min_terms))
    blocked.push_back("fewer than " + std::to_string(t.min_terms) + " increasing ratios");
  else if (!fam)
    blocked.push_back("no symbolically confirmed growth family");
  else
    blocked.push_back("ratios stay below " + fmt(target));
  std::string w;
  for (const auto& b : blocked) w += (w.empty() ? "" : "; ") + b;
  out.witness = w;
  return out;
}

// ---- approximants -----------------------------------------------------------------------------

bool agree_on_core(const FNStructure& x, const MappingScheme& f, const MappingScheme& g, int n) {
  const TruncatedGraph core = x.scheme().truncate(n);
  for (const auto& [v, vx] : core.vertices())
    if (f.trace(v) != g.trace(v)) return false;
  return true;
}

std::vector<MappingScheme> approximant_sequence(const FNStructure& x, const MappingScheme& target, int depth) {
  const TruncatedGraph whole = x.scheme().truncate(depth);
  std::vector<MappingScheme> out;
  for (int n = 0; n <= depth; ++n) {
    const TruncatedGraph core = x.scheme().truncate(n);
    // the complement of the core may not hide finite-genus regions
    std::set<std::string> outside;
    for (const auto& [v, vx] : whole.vertices())
      if (!core.has_vertex(v)) outside.insert(v);
    TruncatedGraph rest = whole.induced(outside, SlotState::Boundary);
    for (const auto& comp : rest.components()) {
      TruncatedGraph piece = rest.induced(comp, SlotState::Boundary);
      bool compact = piece.slots_in(SlotState::Frontier).empty();
      if (compact && piece.genus() > 0)
        throw Error(ErrorKind::FiniteGenusComplement, "finite-genus region beyond level " + std::to_string(n));
    }

    switch (target.kind) {
      case MapKind::Composite: {
        std::vector<MappingScheme> parts;
        for (const auto& p : target.parts) {
          bool meets = false;
          for (const auto& [v, vx] : core.vertices()) meets = meets || p.moves(v);
          if (meets) parts.push_back(p);
        }
        out.push_back(composite(target.name + "|" + std::to_string(n), parts, target.disjoint));
        break;
      }
      case MapKind::EndSwap:
        if (!target.vertex) throw Error(ErrorKind::NoWitness, "end swap without witness data");
        out.push_back(target);
        break;
      case MapKind::Compact:
        out.push_back(target);
        break;
      case MapKind::Multitwist: {
        MappingScheme m = target;
        m.name = target.name + "|" + std::to_string(n);
        // keep the actual powers on the core
        m.powers.clear();
        for (const auto& p : target.powers) {
          for (const auto& [id, e] : core.edges()) {
            auto i = p.index(e);
            if (!i || !p.applies(*i)) continue;
            FamilyRule q;
            q.family = p.family + "@" + id;
            const std::string eid = id;
            const long k = *i;
            q.index = [eid, k](const Edge& e2) -> std::optional<long> {
              return e2.id == eid ? std::optional<long>(k) : std::nullopt;
            };
            q.rule = LengthRule::constant(p.rule.at(k));
            m.powers.push_back(q);
          }
        }
        out.push_back(m);
        break;
      }
      default:
        throw Error(ErrorKind::NoWitness, std::string("no end-swap data to approximate a ") + to_string(target.kind));
    }
  }
  return out;
}

}  // namespace pw::certify
