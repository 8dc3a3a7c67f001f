#include "pantswork/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "pantswork/certify.hpp"
#include "pantswork/construct.hpp"
#include "pantswork/endspace.hpp"
#include "pantswork/error.hpp"
#include "pantswork/fixtures.hpp"

#ifndef PANTSWORK_CORPUS
#define PANTSWORK_CORPUS "data/corpus.txt"
#endif

namespace pw::cli {

namespace {

using certify::Verdict;
using geometry::FamilyRule;
using geometry::LengthRule;

// Exit codes
constexpr int kOk = 0, kMismatch = 1, kParse = 2, kRank = 3, kEmbedding = 4, kUndefined = 5;
constexpr int kNotQC = 10, kInconclusive = 11;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw Error(ErrorKind::Parse, "cannot write " + out_path);
  f << text;
}

std::string trim(std::string s) {
  auto sp = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && sp(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && sp(s[i])) ++i;
  return s.substr(i);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

int to_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::Parse, "bad " + what + " '" + s + "'");
}

construct::BifluteParams parse_params(const std::string& text, bool integers) {
  auto p = split(text, ',');
  if (p.size() != 3) throw Error(ErrorKind::Parse, "expected A,B,C, got '" + text + "'");
  auto bp = construct::BifluteParams::uniform(to_int(p[0], "A"), to_int(p[1], "B"), to_int(p[2], "C"), integers);
  bp.validate();
  return bp;
}

// "spine:z", "gap:z", "handle:z", "loop:z" or "all"
geometry::EdgeIndex parse_selector(const std::string& text) {
  if (text == "all") return geometry::every_edge();
  auto colon = text.find(':');
  if (colon == std::string::npos) throw Error(ErrorKind::Parse, "bad curve family '" + text + "'");
  const std::string kind = text.substr(0, colon), fam = text.substr(colon + 1);
  if (kind == "spine") return geometry::spine_index(fam);
  if (kind == "handle") return geometry::handle_index(fam);
  if (kind == "loop") return geometry::loop_index(fam);
  if (kind == "gap") {
    auto spine = geometry::spine_index(fam);
    return [spine](const graph::Edge& e) -> std::optional<long> {
      auto k = spine(e);
      if (!k) return std::nullopt;
      return *k - 1;
    };
  }
  throw Error(ErrorKind::Parse, "bad curve family '" + text + "'");
}

// "<selector>=<rule>[@odd|@even]"
FamilyRule parse_family_rule(const std::string& text) {
  auto eq = text.find('=');
  if (eq == std::string::npos) throw Error(ErrorKind::Parse, "expected family=rule, got '" + text + "'");
  FamilyRule r;
  r.family = text.substr(0, eq);
  r.index = parse_selector(r.family);
  std::string rule = text.substr(eq + 1);
  if (auto at = rule.find('@'); at != std::string::npos) {
    const std::string par = rule.substr(at + 1);
    if (par == "odd")
      r.parity = 1;
    else if (par == "even")
      r.parity = 2;
    else
      throw Error(ErrorKind::Parse, "bad parity '" + par + "'");
    rule = rule.substr(0, at);
  }
  r.rule = LengthRule::parse(rule);
  return r;
}

// Ranks by graph distance from the level-0 curve (or the first vertex).
// Links inside a level block (intermediate levels) cost nothing, so handles
// share the rank of the pants they hang from.
graph::PantsScheme file_scheme(const graph::TruncatedGraph& g, const std::string& name) {
  std::map<std::string, int> rank;
  std::deque<std::string> queue;
  auto relax = [&](const std::string& w, int r, bool front) {
    auto it = rank.find(w);
    if (it != rank.end() && it->second <= r) return;
    rank[w] = r;
    front ? queue.push_front(w) : queue.push_back(w);
  };
  for (const auto& [id, e] : g.edges())
    if (e.level && e.level->n == 0 && !e.level->intermediate)
      for (const auto* v : {&e.a.vertex, &e.b.vertex}) relax(*v, 0, false);
  if (queue.empty() && !g.vertices().empty()) relax(g.vertices().begin()->first, 0, false);
  while (!queue.empty()) {
    const std::string v = queue.front();
    queue.pop_front();
    for (int i = 0; i < 3; ++i) {
      const auto& s = g.slot({v, i});
      if (s.state != graph::SlotState::Paired) continue;
      const auto& e = g.edge(s.edge);
      const bool inner = e.level && e.level->intermediate;
      relax(e.other({v, i}).vertex, rank[v] + (inner ? 0 : 1), inner);
    }
  }
  // other components after the first one
  int far = 0;
  for (const auto& [v, r] : rank) far = std::max(far, r);
  for (const auto& [v, vx] : g.vertices()) rank.emplace(v, far + 1);
  graph::RawGraph raw{g, rank};
  return graph::PantsScheme(name, [raw](int) { return raw; });
}

graph::PantsScheme builtin_scheme(const std::string& name) {
  if (name == "ladder") return fixtures::ladder();
  if (name == "z") return graph::z_graph();
  if (name == "flute") return graph::flute_graph();
  if (name == "accumulated-ends") return fixtures::accumulated_ends();
  if (name.rfind("biflute:", 0) == 0) return construct::biflute(parse_params(name.substr(8), true));
  throw Error(ErrorKind::Parse, "unknown built-in scheme '" + name + "'");
}

certify::MappingScheme parse_map(const std::string& text) {
  if (text == "identity") return certify::identity_map();
  auto parts = split(text, ':');
  if (parts.size() == 3 && parts[0] == "shift") return certify::shift(parts[1], to_int(parts[2], "shift step"));
  if (text.rfind("multitwist:", 0) == 0) {
    std::vector<FamilyRule> powers;
    for (const auto& r : split(text.substr(11), ';')) powers.push_back(parse_family_rule(r));
    return certify::multitwist("T", powers);
  }
  if (parts.size() == 2 && parts[0] == "declared") {
    LengthRule rule = LengthRule::parse(parts[1] == "exp" ? "exp(i)" : parts[1] == "doubexp" ? "doubexp(i)" : parts[1]);
    auto g = rule.growth();
    if (!g) throw Error(ErrorKind::Parse, "declared bound must grow: '" + parts[1] + "'");
    return certify::declared("declared", [rule](long n) { return rule.at(std::labs(n)); }, *g);
  }
  throw Error(ErrorKind::Parse, "bad map '" + text + "'");
}

int exit_for_build(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::RankOverflow:
    case ErrorKind::PerfectKernel:
      return kRank;
    case ErrorKind::EmbeddingFailure:
      return kEmbedding;
    default:
      return kParse;
  }
}

int exit_for_certify(const Error& e) {
  return e.kind() == ErrorKind::MapUndefinedOnCurve ? kUndefined : kParse;
}

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::Modular:
      return kOk;
    case Verdict::NotQC:
      return kNotQC;
    default:
      return kInconclusive;
  }
}

std::string interval_str(const std::optional<certify::Interval>& iv) {
  if (!iv) return "-";
  std::ostringstream os;
  os << std::setprecision(15) << iv->lo << "," << iv->hi;
  return os.str();
}

struct Outcome {
  std::string name, verdict, growth, interval, provenance;
};

}  // namespace

std::vector<CorpusEntry> read_corpus(const std::string& path) {
  std::vector<CorpusEntry> out;
  std::istringstream in(slurp(path));
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    CorpusEntry e;
    if (!(ls >> e.name >> e.verdict >> e.growth >> e.interval >> e.provenance))
      throw Error(ErrorKind::Parse, "bad corpus line '" + line + "'");
    out.push_back(e);
  }
  return out;
}

void write_corpus(const std::string& path, const std::vector<CorpusEntry>& entries) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::Parse, "cannot write " + path);
  f << "# name verdict growth interval provenance\n";
  for (const auto& e : entries)
    f << e.name << ' ' << e.verdict << ' ' << e.growth << ' ' << e.interval << ' ' << e.provenance << '\n';
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pants decompositions of infinite-type surfaces and quasiconformal certificates", "pantswork"};
  app.require_subcommand(1);
  app.fallthrough();
  int depth = 8;
  std::string out_path;
  unsigned seed = 0;
  app.add_option("--depth", depth, "truncation depth")->check(CLI::NonNegativeNumber);
  app.add_option("--out", out_path, "write the report here instead of stdout");
  app.add_option("--seed", seed, "seed for the order of randomized sweeps");

  // build
  auto* build = app.add_subcommand("build", "emit a pants graph truncation");
  std::string build_spec, algo = "re", eta_text = "0", params = "0,1,2";
  int rank_bound = ordinal::RankBound{}.bound;
  bool genus = false, flute = false;
  build->add_option("spec", build_spec, "end-space spec file (pure, re)");
  build->add_option("--algo", algo)->check(CLI::IsMember({"pure", "re", "eta-sphere", "tree", "biflute"}));
  build->add_option("--rank-bound", rank_bound, "ranks must stay below w^R");
  build->add_option("--eta", eta_text, "ordinal for eta-sphere and tree");
  build->add_flag("--genus", genus, "genus ends for eta-sphere and tree");
  build->add_option("--params", params, "A,B,C for biflute");
  build->add_flag("--flute", flute, "biflute over N instead of Z");

  // rank
  auto* rank = app.add_subcommand("rank", "Cantor-Bendixson rank of an end space");
  std::string rank_spec;
  rank->add_option("spec", rank_spec)->required();
  rank->add_option("--rank-bound", rank_bound, "ranks must stay below w^R");

  // certify
  auto* cert = app.add_subcommand("certify", "decide whether a mapping scheme is quasiconformal");
  std::string graph_arg, map_text = "identity", along_text, enclose_text, fixture_name;
  std::vector<std::string> length_flags, twist_flags, block_flags;
  double threshold = 1e6;
  cert->add_option("graph", graph_arg, "pantsgraph file, or builtin:<ladder|z|flute|biflute:A,B,C|accumulated-ends>");
  cert->add_option("--fixture", fixture_name, "use a corpus fixture instead");
  cert->add_option("--length", length_flags, "family=rule[@odd|@even], e.g. spine:z=exp(i)@odd");
  cert->add_option("--twist", twist_flags, "family=rule");
  cert->add_option("--block", block_flags, "family=rule, hidden once-cusped pants per edge");
  cert->add_option("--map", map_text, "identity | shift:<fam>:<step> | multitwist:<family=rule>[;...] | declared:<growth>");
  cert->add_option("--along", along_text, "A,B,C the map should be pants-to-pants along");
  cert->add_option("--enclose", enclose_text, "<fam>:<stride> enclosing-path pairs to sample");
  cert->add_option("--threshold", threshold, "last ratio needed for NOT_QC");

  // corpus
  auto* corpus = app.add_subcommand("corpus", "run the fixture corpus against its expected verdicts");
  std::string filter, corpus_path = PANTSWORK_CORPUS;
  bool bless = false;
  corpus->add_option("--filter", filter, "substring of fixture names");
  corpus->add_flag("--bless", bless, "rewrite the expected values from this run");
  corpus->add_option("--corpus", corpus_path, "corpus file");

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kParse;
  }

  if (build->parsed()) {
    try {
      ordinal::RankBound bound{rank_bound};
      auto encoding = [&]() {
        if (build_spec.empty()) throw Error(ErrorKind::Parse, "build --algo " + algo + " needs a spec file");
        return ordinal::ClosedSetEncoding::parse(slurp(build_spec));
      };
      std::string text;
      if (algo == "re") {
        text = construct::build_re_system(encoding(), bound, depth).serialize();
      } else if (algo == "pure") {
        if (build_spec.empty()) throw Error(ErrorKind::Parse, "build --algo pure needs a spec file");
        const std::string src = slurp(build_spec);
        // "cantor genus=(L),(RL)" places genus ends on the full Cantor set
        std::istringstream first(src);
        std::string word;
        first >> word;
        construct::TreeEndSpec spec;
        if (word == "cantor") {
          std::string attr;
          std::vector<std::string> words;
          while (first >> attr) {
            if (attr.rfind("genus=", 0) != 0) throw Error(ErrorKind::Parse, "bad cantor attribute '" + attr + "'");
            for (const auto& w : split(attr.substr(6), ',')) words.push_back(w);
          }
          spec = construct::cantor_spec(words);
        } else {
          spec = construct::tree_spec(ordinal::ClosedSetEncoding::parse(src));
        }
        auto t = construct::pants_for_pure(spec).scheme.truncate(depth);
        text = t.serialize();
      } else if (algo == "eta-sphere") {
        auto t = construct::eta_sphere(ordinal::Ordinal::parse(eta_text), genus, bound).scheme.truncate(depth);
        text = t.serialize();
      } else if (algo == "tree") {
        auto t = construct::standard_tree(ordinal::Ordinal::parse(eta_text), genus, bound).scheme.truncate(depth);
        text = t.serialize();
      } else {
        auto t = construct::biflute(parse_params(params, !flute)).truncate(depth);
        text = t.serialize();
      }
      emit(text, out_path, out);
      return kOk;
    } catch (const Error& e) {
      err << e.what() << '\n';
      return exit_for_build(e);
    }
  }

  if (rank->parsed()) {
    try {
      auto r = ordinal::cb_rank(ordinal::ClosedSetEncoding::parse(slurp(rank_spec)), ordinal::RankBound{rank_bound});
      emit(r.str() + "\n", out_path, out);
      return kOk;
    } catch (const Error& e) {
      err << e.what() << '\n';
      return e.kind() == ErrorKind::PerfectKernel || e.kind() == ErrorKind::RankOverflow ? kRank : kParse;
    }
  }

  if (cert->parsed()) {
    try {
      certify::Thresholds t;
      t.min_last = threshold;
      certify::Certificate c;
      if (!fixture_name.empty()) {
        bool found = false;
        for (auto& fc : fixtures::corpus()) {
          if (fc.name != fixture_name) continue;
          found = true;
          c = certify::certify(fc.x, fc.f, app.get_option("--depth")->count() ? depth : fc.depth, t);
        }
        if (!found) throw Error(ErrorKind::Parse, "unknown fixture '" + fixture_name + "'");
      } else {
        if (graph_arg.empty()) throw Error(ErrorKind::Parse, "certify needs a graph or --fixture");
        graph::PantsScheme scheme =
            graph_arg.rfind("builtin:", 0) == 0
                ? builtin_scheme(graph_arg.substr(8))
                : file_scheme(graph::TruncatedGraph::parse(slurp(graph_arg)), graph_arg);
        std::vector<FamilyRule> lengths, twists;
        std::vector<geometry::BlockRule> blocks;
        for (const auto& s : length_flags) lengths.push_back(parse_family_rule(s));
        for (const auto& s : twist_flags) twists.push_back(parse_family_rule(s));
        for (const auto& s : block_flags) {
          auto r = parse_family_rule(s);
          blocks.push_back({r.family, r.index, r.rule});
        }
        geometry::FNStructure x(scheme, lengths, twists, blocks);
        auto f = parse_map(map_text);
        if (!along_text.empty()) f.along = parse_params(along_text, true);
        if (!enclose_text.empty()) {
          auto p = split(enclose_text, ':');
          if (p.size() != 2) throw Error(ErrorKind::Parse, "expected <fam>:<stride>, got '" + enclose_text + "'");
          f.obstruction = certify::enclosing_family(p[0], to_int(p[1], "stride"));
        }
        c = certify::certify(x, f, depth, t);
      }
      emit(c.serialize(), out_path, out);
      return verdict_exit(c.verdict);
    } catch (const Error& e) {
      err << e.what() << '\n';
      return exit_for_certify(e);
    }
  }

  // corpus
  try {
    auto cases = fixtures::corpus();
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < cases.size(); ++i)
      if (cases[i].name.find(filter) != std::string::npos) order.push_back(i);
    // launch order only; the table is sorted by name
    std::shuffle(order.begin(), order.end(), std::mt19937(seed));
    std::vector<std::future<Outcome>> jobs;
    for (std::size_t i : order)
      jobs.push_back(std::async(std::launch::async, [&cases, i] {
        const auto& fc = cases[i];
        auto c = certify::certify(fc.x, fc.f, fc.depth);
        return Outcome{fc.name, certify::to_string(c.verdict), c.growth.empty() ? "-" : c.growth,
                       interval_str(c.interval), fc.provenance};
      }));
    std::vector<Outcome> results;
    for (auto& j : jobs) results.push_back(j.get());
    std::sort(results.begin(), results.end(), [](const Outcome& a, const Outcome& b) { return a.name < b.name; });

    if (bless) {
      std::vector<CorpusEntry> kept;
      try {
        for (auto& e : read_corpus(corpus_path))
          if (e.name.find(filter) == std::string::npos) kept.push_back(e);
      } catch (const Error&) {
      }
      for (const auto& r : results) kept.push_back({r.name, r.verdict, r.growth, r.interval, r.provenance});
      std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
      write_corpus(corpus_path, kept);
    }

    std::map<std::string, CorpusEntry> expected;
    for (auto& e : read_corpus(corpus_path)) expected[e.name] = e;

    std::ostringstream table;
    table << std::left << std::setw(20) << "fixture" << std::setw(14) << "verdict" << std::setw(10) << "growth"
          << std::setw(10) << "source" << "result\n";
    bool all = true;
    for (const auto& r : results) {
      std::string status = "PASS";
      auto it = expected.find(r.name);
      if (it == expected.end()) {
        status = "FAIL (no expected entry)";
      } else {
        const auto& e = it->second;
        bool ok = e.verdict == r.verdict && e.growth == r.growth;
        if (ok && e.interval != "-") {
          auto want = split(e.interval, ','), got = split(r.interval, ',');
          ok = want.size() == 2 && got.size() == 2;
          for (std::size_t k = 0; ok && k < 2; ++k)
            ok = std::fabs(std::stod(want[k]) - std::stod(got[k])) <= 1e-9 * std::fabs(std::stod(want[k]));
        }
        if (!ok) status = "FAIL (expected " + e.verdict + " " + e.growth + " " + e.interval + ")";
      }
      all = all && status == "PASS";
      table << std::left << std::setw(20) << r.name << std::setw(14) << r.verdict << std::setw(10) << r.growth
            << std::setw(10) << r.provenance << status << '\n';
    }
    table << results.size() << " fixtures, " << (all ? "all pass" : "mismatches") << '\n';
    emit(table.str(), out_path, out);
    return all ? kOk : kMismatch;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kMismatch;
  }
}

}  // namespace pw::cli
