#include "pantswork/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "pantswork/error.hpp"

namespace pw::geometry {

using graph::SlotRef;
using graph::SlotState;

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::optional<double> number(std::string_view s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(15);
  o << v;
  return o.str();
}

// "<fam>:<int><rest>" -> (int, rest)
std::optional<std::pair<long, std::string>> family_member(const std::string& vertex, const std::string& family) {
  const std::string head = family + ":";
  if (vertex.rfind(head, 0) != 0) return std::nullopt;
  std::size_t i = head.size(), j = i;
  if (j < vertex.size() && vertex[j] == '-') ++j;
  std::size_t k = j;
  while (k < vertex.size() && std::isdigit(static_cast<unsigned char>(vertex[k]))) ++k;
  if (k == j) return std::nullopt;
  long v = std::stol(vertex.substr(i, k - i));
  return std::make_pair(v, vertex.substr(k));
}

}  // namespace

// ---- rules ------------------------------------------------------------------------

LengthRule LengthRule::parse(std::string_view text) {
  std::string t = trim(text);
  if (auto v = number(t)) return constant(*v);
  LengthRule r;
  if (auto star = t.find('*'); star != std::string::npos) {
    auto c = number(trim(std::string_view(t).substr(0, star)));
    if (!c) throw Error(ErrorKind::Parse, "bad coefficient in rule '" + t + "'");
    r.c = *c;
    t = trim(std::string_view(t).substr(star + 1));
  }
  if (t == "exp(i)")
    r.family = Family::Exp;
  else if (t == "doubexp(i)" || t == "exp(exp(i))")
    r.family = Family::DoubleExp;
  else if (t == "1/i")
    r.family = Family::Inverse;
  else if (t == "i" || t == "linear(i)")
    r.family = Family::Linear;
  else
    throw Error(ErrorKind::Parse, "unknown rule '" + std::string(text) + "'");
  return r;
}

double LengthRule::at(long i) const {
  const double a = std::fabs(static_cast<double>(i));
  switch (family) {
    case Family::Constant: return c;
    case Family::Exp: return c * std::exp(static_cast<double>(i));
    case Family::DoubleExp: return c * std::exp(std::exp(a));
    case Family::Inverse: return i == 0 ? c : c / a;
    case Family::Linear: return c * a;
  }
  return c;
}

bool LengthRule::bounded_above() const { return family == Family::Constant || family == Family::Inverse; }
bool LengthRule::bounded_below() const {
  return family == Family::Constant || family == Family::DoubleExp;
}

std::optional<std::string> LengthRule::growth() const {
  switch (family) {
    case Family::Exp: return "exp";
    case Family::DoubleExp: return "doubexp";
    case Family::Linear: return "linear";
    default: return std::nullopt;
  }
}

std::string LengthRule::str() const {
  std::string body;
  switch (family) {
    case Family::Constant: return fmt(c);
    case Family::Exp: body = "exp(i)"; break;
    case Family::DoubleExp: body = "doubexp(i)"; break;
    case Family::Inverse: body = "1/i"; break;
    case Family::Linear: body = "i"; break;
  }
  return c == 1 ? body : fmt(c) + "*" + body;
}

EdgeIndex spine_index(const std::string& family) {
  return [family](const Edge& e) -> std::optional<long> {
    auto x = family_member(e.a.vertex, family), y = family_member(e.b.vertex, family);
    if (!x || !y || !x->second.empty() || !y->second.empty()) return std::nullopt;
    SlotRef lo = e.a, hi = e.b;
    long i = x->first, j = y->first;
    if (j < i) std::swap(lo, hi), std::swap(i, j);
    if (j != i + 1 || lo.slot != 1 || hi.slot != 0) return std::nullopt;
    return j;
  };
}

EdgeIndex handle_index(const std::string& family) {
  return [family](const Edge& e) -> std::optional<long> {
    for (const auto& [host, piece] : {std::pair{e.a, e.b}, std::pair{e.b, e.a}}) {
      auto x = family_member(host.vertex, family), y = family_member(piece.vertex, family);
      if (x && y && x->second.empty() && host.slot == 2 && y->first == x->first && y->second == "/h:0")
        return x->first;
    }
    return std::nullopt;
  };
}

EdgeIndex loop_index(const std::string& family) {
  return [family](const Edge& e) -> std::optional<long> {
    if (!e.is_loop()) return std::nullopt;
    auto x = family_member(e.a.vertex, family);
    if (x && x->second == "/h:0") return x->first;
    return std::nullopt;
  };
}

EdgeIndex every_edge() {
  return [](const Edge&) -> std::optional<long> { return 0; };
}

bool FamilyRule::applies(long i) const {
  if (parity == 1) return i % 2 != 0;
  if (parity == 2) return i % 2 == 0;
  return true;
}

std::string FamilyRule::str() const {
  std::string p = parity == 1 ? ":odd" : parity == 2 ? ":even" : "";
  return family + p + "=" + rule.str();
}

// ---- structures ---------------------------------------------------------------------

FNStructure::FNStructure(PantsScheme s, std::vector<FamilyRule> lengths, std::vector<FamilyRule> twists,
                         std::vector<BlockRule> blocks)
    : scheme_(std::move(s)), lengths_(std::move(lengths)), twists_(std::move(twists)), blocks_(std::move(blocks)) {
  for (const auto& r : lengths_)
    if (r.rule.family == LengthRule::Family::Constant && r.rule.c <= 0)
      throw Error(ErrorKind::NonPositiveLength, "rule " + r.str() + " gives length " + fmt(r.rule.c));
}

namespace {

std::optional<double> first_match(const std::vector<FamilyRule>& rules, const Edge& e) {
  for (const auto& r : rules) {
    if (!r.index) continue;
    auto i = r.index(e);
    if (i && r.applies(*i)) return r.rule.at(*i);
  }
  return std::nullopt;
}

}  // namespace

double FNStructure::length(const Edge& e) const {
  double l = first_match(lengths_, e).value_or(1.0);
  if (!(l > 0) || !std::isfinite(l))
    throw Error(ErrorKind::NonPositiveLength, "edge " + e.id + " gets length " + fmt(l));
  return l;
}

double FNStructure::twist(const Edge& e) const { return first_match(twists_, e).value_or(0.0); }

double FNStructure::block_count(const Edge& e) const {
  for (const auto& b : blocks_)
    if (auto i = b.index(e)) return std::floor(b.count.at(*i));
  return 0;
}

TruncatedGraph FNStructure::truncate(int depth) const {
  TruncatedGraph g = scheme_.truncate(depth);
  std::vector<std::string> ids;
  for (const auto& [id, e] : g.edges()) ids.push_back(id);
  for (const auto& id : ids) {
    Edge& e = g.edge(id);
    e.length = length(e);
    e.twist = twist(e);
  }
  for (const auto& s : g.slots_in(SlotState::Boundary)) g.slot(s).length = 1.0;
  return g;
}

std::optional<double> FNStructure::bounded_constant(int depth) const {
  for (const auto& r : lengths_)
    if (!r.rule.bounded_above() || !r.rule.bounded_below()) return std::nullopt;
  double M = 1;
  const TruncatedGraph g = scheme_.truncate(depth);
  for (const auto& [id, e] : g.edges()) {
    double l = length(e);
    M = std::max({M, l, 1 / l});
  }
  return M;
}

bool FNStructure::bounded_type(double M, int depth) const {
  auto m = bounded_constant(depth);
  return m && *m <= M * (1 + kSlack);
}

bool FNStructure::complete() const {
  return std::all_of(lengths_.begin(), lengths_.end(), [](const FamilyRule& r) { return r.rule.bounded_above(); });
}

std::string FNStructure::header() const {
  std::ostringstream o;
  o << "structure v1 scheme=" << scheme_.name();
  o << " rule=";
  if (lengths_.empty()) o << "unit";
  for (std::size_t i = 0; i < lengths_.size(); ++i) o << (i ? "," : "") << lengths_[i].str();
  if (!twists_.empty()) {
    o << " twist=";
    for (std::size_t i = 0; i < twists_.size(); ++i) o << (i ? "," : "") << twists_[i].str();
  }
  for (const auto& b : blocks_) o << " block=" << b.name << ":" << b.count.str();
  o << " complete=" << (complete() ? "yes" : "unknown");
  return o.str();
}

FNStructure unit_structure(PantsScheme s) { return FNStructure(std::move(s), {}, {}); }

FNStructure assign_lengths(PantsScheme s, std::vector<FamilyRule> lengths, std::vector<FamilyRule> twists,
                           std::vector<BlockRule> blocks) {
  return FNStructure(std::move(s), std::move(lengths), std::move(twists), std::move(blocks));
}

bool is_untwisted(const FNStructure& x, double T, int depth) {
  for (const auto& r : x.twist_rules())
    if (!r.rule.bounded_above()) return false;
  const TruncatedGraph g = x.scheme().truncate(depth);
  for (const auto& [id, e] : g.edges())
    if (std::fabs(x.twist(e)) > T * (1 + kSlack) + kSlack) return false;
  return true;
}

// ---- lengths -----------------------------------------------------------------------

double collar_width(double l) {
  if (!(l > 0)) throw Error(ErrorKind::NonPositiveLength, "collar of length " + fmt(l));
  return std::asinh(1 / std::sinh(l / 2));
}

CurvePath CurvePath::symbolic_cuff(std::string id, long index, double length) {
  CurvePath c;
  c.id = std::move(id);
  c.index = index;
  c.declared_length = length;
  return c;
}

double CurvePath::crossings_total() const {
  double n = 0;
  for (const auto& k : crossings) n += k.times;
  for (const auto& b : bulk) n += b.times;
  return n;
}

double seam_length(double l) {
  if (!(l > 0)) throw Error(ErrorKind::NonPositiveLength, "seam of length " + fmt(l));
  const double c = std::cosh(l / 2), s = std::sinh(l / 2);
  return std::acosh((c + c * c) / (s * s));
}

double crossing_slack(double l) { return seam_length(l) + l - 2 * collar_width(l); }

CurvePath CurvePath::cuff_of(std::string edge, long index, std::string id) {
  CurvePath c;
  c.id = id.empty() ? edge : std::move(id);
  c.index = index;
  c.cuff = std::move(edge);
  return c;
}

std::string LengthBound::str() const {
  if (exact()) return fmt(lo);
  return "[" + fmt(lo) + "," + (std::isfinite(hi) ? fmt(hi) : std::string("inf")) + "]";
}

LengthBound curve_length(const FNStructure& x, const CurvePath& c, int depth) {
  const TruncatedGraph g = c.declared_length ? TruncatedGraph() : x.scheme().truncate(depth);
  auto edge = [&](const std::string& id) -> const Edge& {
    if (!g.has_edge(id)) throw Error(ErrorKind::PathNotCarried, "curve " + c.id + " uses " + id + " beyond depth");
    return g.edge(id);
  };
  if (c.declared_length) {
    if (!(*c.declared_length > 0)) throw Error(ErrorKind::NonPositiveLength, "curve " + c.id);
    return {*c.declared_length, *c.declared_length};
  }
  if (!c.cuff.empty()) {
    double l = x.length(edge(c.cuff));
    return {l, l};
  }
  double lo = 0;
  for (const auto& k : c.crossings) lo += k.times * 2 * collar_width(x.length(edge(k.edge)));
  for (const auto& b : c.bulk) lo += b.times * 2 * collar_width(b.cuff_length);
  LengthBound out{lo, std::numeric_limits<double>::infinity()};
  if (c.crossing_slack) out.hi = lo + *c.crossing_slack * c.crossings_total();
  return out;
}

}  // namespace pw::geometry
