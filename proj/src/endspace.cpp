#include "pantswork/endspace.hpp"

#include <cctype>
#include <functional>
#include <set>
#include <sstream>

#include "pantswork/error.hpp"

namespace pw::ordinal {

Generator Generator::periodic(std::vector<Forest> prefix, std::vector<Forest> cycle) {
  Generator g;
  g.kind = Kind::Periodic;
  g.prefix = std::move(prefix);
  g.cycle = std::move(cycle);
  return g;
}

Generator Generator::rank(Ordinal eta, bool genus) {
  Generator g;
  g.kind = Kind::Rank;
  g.eta = std::move(eta);
  g.genus = genus;
  return g;
}

Generator Generator::cantor() {
  Generator g;
  g.kind = Kind::Cantor;
  return g;
}

EndNode EndNode::leaf(std::string id, bool genus) {
  EndNode n;
  n.id = std::move(id);
  n.genus = genus;
  return n;
}

namespace {

bool valid_id(std::string_view id) {
  if (id.empty()) return false;
  for (char c : id) {
    bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':' || c == '/' ||
              c == '.' || c == '-';
    if (!ok) return false;
  }
  return true;
}

[[noreturn]] void malformed(const std::string& msg) { throw Error(ErrorKind::MalformedEncoding, msg); }

void validate_node(const EndNode& n, std::set<std::string>& seen);

void validate_forest(const Forest& f, std::set<std::string>& seen) {
  for (const auto& n : f) validate_node(n, seen);
}

void validate_node(const EndNode& n, std::set<std::string>& seen) {
  if (!valid_id(n.id)) malformed("invalid node id '" + n.id + "'");
  if (!seen.insert(n.id).second) malformed("duplicate node id '" + n.id + "'");
  validate_forest(n.children, seen);
  if (!n.gen) return;
  if (!n.children.empty()) malformed("node " + n.id + " has both finite children and a generator");
  const Generator& g = *n.gen;
  switch (g.kind) {
    case Generator::Kind::Periodic: {
      if (g.cycle.empty()) malformed("node " + n.id + ": periodic generator without a cycle");
      bool genus_tail = false;
      for (const auto& e : g.prefix) validate_forest(e, seen);
      for (const auto& e : g.cycle) {
        validate_forest(e, seen);
        genus_tail = genus_tail || has_genus(e);
      }
      if (genus_tail && !n.genus)
        malformed("node " + n.id + " is a limit of genus ends but is not marked genus");
      break;
    }
    case Generator::Kind::Rank:
      if (g.genus && !n.genus)
        malformed("node " + n.id + " is a limit of genus ends but is not marked genus");
      break;
    case Generator::Kind::Cantor:
      break;
  }
}

// ---- serialization -------------------------------------------------------

std::string element_ref(const Forest& e) {
  if (e.empty()) return "_";
  std::string s;
  for (const auto& n : e) {
    if (!s.empty()) s += '&';
    s += n.id;
  }
  return s;
}

void write_forest(std::ostream& os, const Forest& f, int depth);

void write_node(std::ostream& os, const EndNode& n, int depth) {
  os << std::string(static_cast<std::size_t>(depth) * 2, ' ') << "node " << n.id;
  if (n.genus) os << " genus";
  std::vector<const Forest*> below;
  if (n.gen) {
    const Generator& g = *n.gen;
    switch (g.kind) {
      case Generator::Kind::Periodic: {
        os << " children=gen:periodic(";
        for (std::size_t i = 0; i < g.prefix.size(); ++i) os << (i ? "," : "") << element_ref(g.prefix[i]);
        os << ';';
        for (std::size_t i = 0; i < g.cycle.size(); ++i) os << (i ? "," : "") << element_ref(g.cycle[i]);
        os << ')';
        for (const auto& e : g.prefix) below.push_back(&e);
        for (const auto& e : g.cycle) below.push_back(&e);
        break;
      }
      case Generator::Kind::Rank:
        os << " children=gen:rank(" << g.eta.str() << (g.genus ? ",genus" : "") << ')';
        break;
      case Generator::Kind::Cantor:
        os << " children=gen:cantor";
        break;
    }
  } else if (!n.children.empty()) {
    os << " children=[";
    for (std::size_t i = 0; i < n.children.size(); ++i) os << (i ? "," : "") << n.children[i].id;
    os << ']';
    below.push_back(&n.children);
  }
  os << '\n';
  for (const Forest* f : below) write_forest(os, *f, depth + 1);
}

void write_forest(std::ostream& os, const Forest& f, int depth) {
  for (const auto& n : f) write_node(os, n, depth);
}

// ---- parsing -------------------------------------------------------------

struct Line {
  int number;
  int depth;
  std::string text;
};

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

class EncodingParser {
 public:
  explicit EncodingParser(std::string_view text) {
    int number = 0;
    for (const auto& raw : split(text, '\n')) {
      ++number;
      std::string line = raw;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      std::size_t indent = line.find_first_not_of(' ');
      if (indent == std::string::npos || line[indent] == '#') continue;
      if (indent % 2 != 0) fail(number, "indentation must be a multiple of two spaces");
      lines_.push_back({number, static_cast<int>(indent / 2), line.substr(indent)});
    }
  }

  Forest parse() {
    Forest f = block(0);
    if (pos_ != lines_.size()) fail(lines_[pos_].number, "unexpected indentation");
    return f;
  }

 private:
  Forest block(int depth) {
    Forest out;
    while (pos_ < lines_.size() && lines_[pos_].depth == depth) out.push_back(node(depth));
    if (pos_ < lines_.size() && lines_[pos_].depth > depth)
      fail(lines_[pos_].number, "unexpected indentation");
    return out;
  }

  EndNode node(int depth) {
    const Line line = lines_[pos_++];
    std::vector<std::string> tok;
    for (auto& t : split(line.text, ' '))
      if (!t.empty()) tok.push_back(t);
    if (tok.size() < 2 || tok[0] != "node") fail(line.number, "expected 'node <id>'");
    EndNode n;
    n.id = tok[1];
    if (!valid_id(n.id)) fail(line.number, "invalid node id '" + n.id + "'");
    std::size_t k = 2;
    if (k < tok.size() && tok[k] == "genus") {
      n.genus = true;
      ++k;
    }
    std::string children;
    if (k < tok.size()) {
      if (tok[k].rfind("children=", 0) != 0) fail(line.number, "unexpected token '" + tok[k] + "'");
      children = tok[k].substr(9);
      ++k;
    }
    if (k != tok.size()) fail(line.number, "trailing tokens");

    Forest below = block(depth + 1);
    std::size_t used = 0;
    auto take = [&](const std::string& id) -> EndNode {
      if (used >= below.size() || below[used].id != id)
        fail(line.number, "child '" + id + "' must follow in order, indented under " + n.id);
      return std::move(below[used++]);
    };
    auto take_element = [&](const std::string& ref) {
      Forest e;
      if (ref == "_") return e;
      for (const auto& id : split(ref, '&')) e.push_back(take(id));
      return e;
    };

    if (children.empty()) {
    } else if (children.front() == '[') {
      if (children.back() != ']') fail(line.number, "unterminated child list");
      std::string inner = children.substr(1, children.size() - 2);
      if (!inner.empty())
        for (const auto& id : split(inner, ',')) n.children.push_back(take(id));
    } else if (children == "gen:cantor") {
      n.gen = Generator::cantor();
    } else if (children.rfind("gen:rank(", 0) == 0 && children.back() == ')') {
      std::string inner = children.substr(9, children.size() - 10);
      bool genus = false;
      if (auto c = inner.rfind(",genus"); c != std::string::npos && c + 6 == inner.size()) {
        genus = true;
        inner.resize(c);
      }
      n.gen = Generator::rank(Ordinal::parse(inner), genus);
    } else if (children.rfind("gen:periodic(", 0) == 0 && children.back() == ')') {
      std::string inner = children.substr(13, children.size() - 14);
      auto semi = inner.find(';');
      if (semi == std::string::npos) fail(line.number, "periodic generator needs 'prefix;cycle'");
      std::vector<Forest> prefix, cycle;
      std::string p = inner.substr(0, semi), c = inner.substr(semi + 1);
      if (!p.empty())
        for (const auto& ref : split(p, ',')) prefix.push_back(take_element(ref));
      if (!c.empty())
        for (const auto& ref : split(c, ',')) cycle.push_back(take_element(ref));
      n.gen = Generator::periodic(std::move(prefix), std::move(cycle));
    } else {
      fail(line.number, "unrecognised children value '" + children + "'");
    }
    if (used != below.size()) fail(line.number, "node '" + below[used].id + "' is not referenced by its parent");
    return n;
  }

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + msg);
  }

  std::vector<Line> lines_;
  std::size_t pos_ = 0;
};

// ---- structural rank -----------------------------------------------------

struct Summary {
  bool any = false;
  Ordinal max;
  std::uint64_t count = 0;

  void absorb(const Ordinal& r, std::uint64_t c) {
    if (!any || r > max) {
      any = true;
      max = r;
      count = c;
    } else if (r == max) {
      count += c;
    }
  }
  void absorb(const Summary& s) {
    if (s.any) absorb(s.max, s.count);
  }
};

Summary summarize(const Forest& f);

// Returns the summary of the clopen set below and including n; `own` receives
// the rank of n itself.
Summary summarize(const EndNode& n, Ordinal* own) {
  Summary s;
  Ordinal r;
  if (n.gen) {
    const Generator& g = *n.gen;
    switch (g.kind) {
      case Generator::Kind::Cantor:
        throw Error(ErrorKind::PerfectKernel, "node " + n.id + " has a perfect (Cantor) part");
      case Generator::Kind::Rank:
        r = g.eta;
        break;
      case Generator::Kind::Periodic: {
        Summary tail;
        for (const auto& e : g.cycle) tail.absorb(summarize(e));
        for (const auto& e : g.prefix) s.absorb(summarize(e));
        if (tail.any) r = tail.max.successor();
        break;
      }
    }
  }
  for (const auto& c : n.children) s.absorb(summarize(c, nullptr));
  s.absorb(r, 1);
  if (own) *own = r;
  return s;
}

Summary summarize(const Forest& f) {
  Summary s;
  for (const auto& n : f) s.absorb(summarize(n, nullptr));
  return s;
}

bool cycle_empty(const Generator& g) {
  for (const auto& e : g.cycle)
    if (!e.empty()) return false;
  return true;
}

Forest derive(const Forest& f);

void derive_node(const EndNode& n, Forest& out) {
  if (!n.gen) {
    for (auto& c : derive(n.children)) out.push_back(std::move(c));
    return;
  }
  const Generator& g = *n.gen;
  switch (g.kind) {
    case Generator::Kind::Cantor:
      out.push_back(n);
      return;
    case Generator::Kind::Rank: {
      if (g.eta.is_zero()) return;
      EndNode m = EndNode::leaf(n.id, n.genus);
      Ordinal eta = g.eta.drop_one();
      if (!eta.is_zero()) m.gen = Generator::rank(eta, g.genus);
      out.push_back(std::move(m));
      return;
    }
    case Generator::Kind::Periodic: {
      std::vector<Forest> prefix, cycle;
      for (const auto& e : g.prefix) prefix.push_back(derive(e));
      if (cycle_empty(g)) {
        for (auto& e : prefix)
          for (auto& c : e) out.push_back(std::move(c));
        return;
      }
      for (const auto& e : g.cycle) cycle.push_back(derive(e));
      EndNode m = EndNode::leaf(n.id, n.genus);
      Generator dg = Generator::periodic(std::move(prefix), std::move(cycle));
      if (cycle_empty(dg)) {
        for (auto& e : dg.prefix)
          for (auto& c : e) m.children.push_back(std::move(c));
      } else {
        m.gen = std::move(dg);
      }
      out.push_back(std::move(m));
      return;
    }
  }
}

Forest derive(const Forest& f) {
  Forest out;
  for (const auto& n : f) derive_node(n, out);
  return out;
}

std::size_t count_nodes(const Forest& f) {
  std::size_t c = 0;
  for (const auto& n : f) {
    c += 1 + count_nodes(n.children);
    if (n.gen)
      for (const auto* part : {&n.gen->prefix, &n.gen->cycle})
        for (const auto& e : *part) c += count_nodes(e);
  }
  return c;
}

}  // namespace

void validate(const Forest& roots) {
  std::set<std::string> seen;
  validate_forest(roots, seen);
}

ClosedSetEncoding::ClosedSetEncoding(Forest roots) : roots_(std::move(roots)) { validate(roots_); }

ClosedSetEncoding ClosedSetEncoding::parse(std::string_view text) {
  return ClosedSetEncoding(EncodingParser(text).parse());
}

std::string ClosedSetEncoding::serialize() const {
  std::ostringstream os;
  write_forest(os, roots_, 0);
  return os.str();
}

std::size_t ClosedSetEncoding::node_count() const { return count_nodes(roots_); }

bool has_genus(const Forest& f) {
  for (const auto& n : f)
    if (has_genus(n)) return true;
  return false;
}

bool has_genus(const EndNode& n) {
  if (n.genus || has_genus(n.children)) return true;
  if (!n.gen) return false;
  if (n.gen->kind == Generator::Kind::Rank) return n.gen->genus;
  for (const auto* part : {&n.gen->prefix, &n.gen->cycle})
    for (const auto& e : *part)
      if (has_genus(e)) return true;
  return false;
}

Ordinal point_rank(const EndNode& node) {
  Ordinal r;
  summarize(node, &r);
  return r;
}

ClosedSetEncoding derived_set(const ClosedSetEncoding& s) { return ClosedSetEncoding(derive(s.roots())); }

CBRank cb_rank(const ClosedSetEncoding& s, RankBound bound) {
  if (s.empty()) throw Error(ErrorKind::EmptySet, "cb_rank of the empty set");
  Summary sum = summarize(s.roots());
  bound.check(sum.max, "cb_rank");
  return {sum.max, sum.count};
}

std::pair<Ordinal, std::uint64_t> homeo_type(const ClosedSetEncoding& s, RankBound bound) {
  CBRank r = cb_rank(s, bound);
  return {r.nu, r.n};
}

ClosedSetEncoding canonical_set(const Ordinal& zeta, std::uint64_t n, bool genus, const std::string& prefix) {
  Forest f;
  for (std::uint64_t i = 0; i < n; ++i) {
    EndNode node = EndNode::leaf(prefix + std::to_string(i), genus);
    if (!zeta.is_zero()) node.gen = Generator::rank(zeta, genus);
    f.push_back(std::move(node));
  }
  return ClosedSetEncoding(std::move(f));
}

}  // namespace pw::ordinal
