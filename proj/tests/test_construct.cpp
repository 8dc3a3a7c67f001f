#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>

#include "pantswork/construct.hpp"
#include "pantswork/error.hpp"

using namespace pw::construct;
using pw::Error;
using pw::ErrorKind;
using pw::graph::SlotState;
using pw::ordinal::cb_rank;
using pw::ordinal::homeo_type;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Parse;
}

// Loop graph (a, b) as a cycle of length L with a tail of p extra pants;
// returns its readings as loop-graph parameters.
std::vector<std::pair<int, int>> oracle_parses(int a, int b) {
  int L = a == 0 ? b : b + 1;
  int p = a == 0 ? 0 : a - 1;
  if (L == 0) return {};
  if (p == 0) return {{0, L}, {1, L - 1}};
  return {{p + 1, L - 1}};
}

// Minimal (A, B) over one repeated attachment type.
std::pair<int, int> oracle_bounds(int a, int b) {
  auto ps = oracle_parses(a, b);
  int A = 1 << 20;
  for (auto [x, y] : ps) A = std::min(A, x);
  int B = 1 << 20;
  for (auto [x, y] : ps)
    if (x <= A) B = std::min(B, y);
  return {A, B};
}

Ordinal O(const char* s) { return Ordinal::parse(s); }

}  // namespace

TEST_CASE("pattern parsing and indexing") {
  auto p = Pattern::parse("1,2;3,4");
  CHECK(p.at(0) == 1);
  CHECK(p.at(1) == 2);
  CHECK(p.at(2) == 3);
  CHECK(p.at(5) == 4);
  CHECK(p.at(-3) == 4);
  CHECK(p.max() == 4);
  CHECK(p.min() == 1);
  CHECK(Pattern::parse("3").at(17) == 3);
  CHECK(Pattern::parse(";1,2").at(2) == 1);
  CHECK(kind_of([] { Pattern::parse("1;"); }) == ErrorKind::Parse);
}

TEST_CASE("biflute parameter validation") {
  CHECK(kind_of([] { BifluteParams::uniform(0, 0, 0).validate(); }) == ErrorKind::InvalidParameters);
  auto p = BifluteParams::uniform(1, 1, 2);
  p.a = Pattern::constant(2);
  CHECK(kind_of([&] { p.validate(); }) == ErrorKind::InvalidParameters);
}

TEST_CASE("biflute round trip over small parameters") {
  for (bool integers : {true, false})
    for (int A = 0; A <= 2; ++A)
      for (int B = 0; B <= 3; ++B)
        for (int C = 1; C <= 4; ++C)
          for (int d = 2; d <= 10; d += 4) {
            auto params = BifluteParams::uniform(A, B, C, integers);
            auto s = biflute(params);
            CAPTURE(params.str());
            CAPTURE(d);
            CHECK(pw::graph::check_structural(s, 3).ok);
            auto rec = recognize_biflute(s, d);
            CHECK(rec.compatible_with(params));
            if (A == 0 && B == 0) {
              CHECK(rec.positions.empty());
              continue;
            }
            auto [oa, ob] = oracle_bounds(A, B);
            CHECK(rec.A == oa);
            CHECK(rec.B == ob);
            CHECK(rec.C == std::min(C, d + 1));
            // the recognized bounds describe the same surface
            auto again = recognize_biflute(biflute(BifluteParams::uniform(rec.A, rec.B, rec.C, integers)), d);
            CHECK(again.A == rec.A);
            CHECK(again.B == rec.B);
          }
}

TEST_CASE("biflute verdicts") {
  auto rec = recognize_biflute(biflute(BifluteParams::uniform(1, 2, 3)), 6);
  // a tail of one pants reads as a longer cycle
  CHECK(rec.verdict() == "(0,3,3) compatible at depth 6");
  CHECK_FALSE(rec.compatible_with(0, 2, 3));
  CHECK_FALSE(rec.compatible_with(1, 2, 2));
  CHECK(kind_of([] { recognize_biflute(pw::graph::trivalent_tree(), 4); }) == ErrorKind::NotABiflute);
  CHECK(kind_of([] { recognize_biflute(pw::graph::z_graph(), 1); }) == ErrorKind::InvalidParameters);
  auto ladder = pw::graph::attach(pw::graph::z_graph(), pw::graph::every("z", 1, 0, 2), pw::graph::standard_handle());
  CHECK(recognize_biflute(ladder, 5).verdict() == "(0,1,1) compatible at depth 5");
}

TEST_CASE("biflute with varying patterns") {
  BifluteParams p;
  p.A = 2;
  p.B = 3;
  p.C = 3;
  p.a = Pattern::parse("2;1");
  p.b = Pattern::parse(";3,1");
  p.c = Pattern::parse("3;1,2");
  p.validate();
  auto s = biflute(p);
  CHECK(pw::graph::check_structural(s, 6).ok);
  auto rec = recognize_biflute(s, 8);
  CHECK(rec.compatible_with(p));
  CHECK(rec.C <= 3);
}

TEST_CASE("germs") {
  CHECK(rank_germ(O("0"), false).str() == "P{}");
  CHECK(rank_germ(O("2"), true).str() == "G{G{G{}}}");
  CHECK(rank_germ(O("w"), false).str() == "P<w>{}");
  CHECK(rank_germ(O("w+1"), false).rank() == O("w+1"));
  CHECK(accumulates(rank_germ(O("3"), false), rank_germ(O("w"), false)));
  CHECK_FALSE(accumulates(rank_germ(O("3"), true), rank_germ(O("w"), false)));
  CHECK(accumulates(rank_germ(O("0"), false), rank_germ(O("2"), false)));
  auto ac = antichain({rank_germ(O("0"), false), rank_germ(O("1"), false), rank_germ(O("0"), true)});
  REQUIRE(ac.size() == 2);
  auto lg = limit_germ(false, {rank_germ(O("0"), true)});
  CHECK(lg.genus);
  CHECK(lg.str() == "G{G{}}");
}

TEST_CASE("eta spheres have the expected end spaces") {
  for (const char* e : {"0", "1", "2", "3", "w"}) {
    for (bool genus : {false, true}) {
      CAPTURE(e);
      CAPTURE(genus);
      auto m = eta_sphere(O(e), genus);
      REQUIRE(m.ends);
      auto r = cb_rank(*m.ends);
      CHECK(r.nu == O(e));
      CHECK(r.n == 1);
      if (!m.puncture) CHECK(pw::graph::check_structural(m.scheme, 6).ok);
    }
  }
  CHECK(kind_of([] { eta_sphere(O("w^6"), false); }) == ErrorKind::RankOverflow);
}

TEST_CASE("flute of pieces") {
  auto m = flute_of({eta_sphere(O("1"))}, {eta_sphere(O("1")), puncture_model()});
  REQUIRE(m.ends);
  CHECK(cb_rank(*m.ends).n == 1);
  CHECK(cb_rank(*m.ends).nu == O("2"));
  CHECK(pw::graph::check_structural(m.scheme, 6).ok);
  CHECK(kind_of([] { flute_of({}, {}); }) == ErrorKind::InvalidParameters);
  auto g = flute_of({}, {puncture_model()}, false, {false, true});
  auto t = g.scheme.truncate(3);
  CHECK(t.genus() == 1);
  // neighbourhood roots sit in the truncation
  for (const auto& n : m.nbhds_at(5)) {
    auto tr = m.scheme.truncate(5);
    CHECK(tr.has_vertex(n.root.vertex));
    if (!n.puncture) CHECK(n.contains(n.root.vertex));
  }
}

TEST_CASE("connected sums") {
  auto a = eta_sphere(O("1"));
  auto m = connected_sum(a, a);
  REQUIRE(m.ends);
  auto [zeta, n] = homeo_type(*m.ends);
  CHECK(zeta == O("1"));
  CHECK(n == 2);
  CHECK(pw::graph::check_structural(m.scheme, 6).ok);
  auto three = connected_sum(m, eta_sphere(O("2"), true));
  CHECK(pw::graph::check_structural(three.scheme, 5).ok);
  CHECK(kind_of([&] { connected_sum(a, puncture_model()); }) == ErrorKind::NoGluingSite);
  CHECK(kind_of([&] { connected_sum(a, plain_model(pw::graph::z_graph())); }) == ErrorKind::NoGluingSite);
}

TEST_CASE("standard trees") {
  for (bool genus : {false, true}) {
    auto m = standard_tree(O("1"), genus);
    CHECK(pw::graph::check_structural(m.scheme, 4).ok);
    CHECK(m.top.perfect.size() > 0);
    CHECK(m.scheme.truncate(3).genus() == (genus ? 15 : 0));
  }
}

TEST_CASE("capping a vertex") {
  pw::graph::RawGraph r;
  r.add("a", 0);
  r.add("b", 0);
  r.add("c", 0);
  r.graph.pair({"a", 1}, {"b", 0});
  r.graph.pair({"b", 1}, {"c", 0});
  auto e = cap_vertex(r, {"b", 2});
  REQUIRE(e);
  CHECK(r.graph.vertex_count() == 2);
  CHECK(r.graph.edge(*e).a.vertex == "a");
  pw::graph::RawGraph lone;
  lone.add("x", 0);
  CHECK(kind_of([&] { cap_vertex(lone, {"x", 0}); }) == ErrorKind::EmbeddingFailure);
}

namespace {

pw::ordinal::ClosedSetEncoding enc(const char* text) { return pw::ordinal::ClosedSetEncoding::parse(text); }

// Every visible pair of genus ends is joined by a (0,1,2)-biflute.
void check_genus_pairs(const PureResult& p, int d) {
  auto g = p.scheme.truncate(d);
  auto ends = p.genus_ends(d);
  for (std::size_t i = 0; i < ends.size(); ++i)
    for (std::size_t j = i + 1; j < ends.size(); ++j) {
      CAPTURE(ends[i].str());
      CAPTURE(ends[j].str());
      auto rec = recognize_between(g, ends[i], ends[j]);
      CHECK(rec.compatible_with(0, 1, 2));
    }
}

}  // namespace

TEST_CASE("pure pipeline: two genus ends on the Cantor tree") {
  auto p = pants_for_pure(cantor_spec({"(L)", "(RL)"}));
  CHECK(pw::graph::check_structural(p.scheme, 8).ok);
  auto ends = p.genus_ends(8);
  CHECK(ends.size() == 2);
  check_genus_pairs(p, 8);
  CHECK(p.core);
}

TEST_CASE("pure pipeline: countable specs") {
  SUBCASE("three isolated planar ends") {
    auto p = pants_for_pure(tree_spec(enc("node a\nnode b\nnode c\n")));
    auto g = p.scheme.truncate(8);
    CHECK(g.vertex_count() == 1);
    CHECK(g.slots_in(SlotState::Cusp).size() == 3);
    CHECK(g.genus() == 0);
  }
  SUBCASE("w+1 planar ends and one genus end") {
    auto p = pants_for_pure(tree_spec(enc("node x children=gen:rank(1)\nnode y genus\n")));
    CHECK(pw::graph::check_structural(p.scheme, 8).ok);
    CHECK(p.genus_ends(8).size() == 1);
    check_genus_pairs(p, 8);
  }
  SUBCASE("a single genus end is a Loch Ness monster") {
    auto p = pants_for_pure(tree_spec(enc("node y genus\n")));
    CHECK(pw::graph::check_structural(p.scheme, 8).ok);
    auto g = p.scheme.truncate(5);
    CHECK(g.genus() == 6);
    auto ends = p.genus_ends(5);
    REQUIRE(ends.size() == 1);
  }
  SUBCASE("genus ends accumulating") {
    auto p = pants_for_pure(tree_spec(enc("node x genus children=gen:rank(2,genus)\nnode y\n")));
    CHECK(pw::graph::check_structural(p.scheme, 7).ok);
    check_genus_pairs(p, 7);
  }
  CHECK(kind_of([] { pants_for_pure(tree_spec(enc("node a\n"))); }) == ErrorKind::EmbeddingFailure);
  CHECK(kind_of([] { pants_for_pure(tree_spec(enc("node a\nnode b\n"))); }) == ErrorKind::EmbeddingFailure);
  CHECK(kind_of([] { cantor_spec({"LR"}); }) == ErrorKind::Parse);
}

namespace {

const char* kRESpecs[] = {
    "node x children=gen:rank(1)\n",
    "node a genus\nnode b genus\n",
    "node x genus children=gen:rank(1,genus)\n",
    "node x children=gen:rank(2)\nnode y genus\nnode z genus children=gen:rank(1,genus)\n",
    "node x genus children=gen:periodic(;a,b)\n  node a\n  node b genus\n",
    "node a\nnode b\nnode c\nnode d genus\n",
};

}  // namespace

TEST_CASE("RE systems: clauses and witnesses at depth 6") {
  for (const char* spec : kRESpecs) {
    std::string text_spec = spec;
    CAPTURE(text_spec);
    auto re = build_re_system(enc(spec), {}, 6);
    CHECK(pw::graph::check_structural(re.model.scheme, 6).ok);
    for (const auto& c : check_normal_system(re.model, 6)) {
      CAPTURE(c.clause);
      CAPTURE(c.detail);
      CHECK(c.ok);
    }
    for (const auto& w : re.witnesses) {
      auto ok = verify_witness(re.model, w, 4);
      CAPTURE(w.x.end());
      CAPTURE(w.y.end());
      CAPTURE(ok.failure);
      CHECK(ok.ok);
    }
    auto text = re.serialize();
    CHECK(text.rfind("pantsgraph v1\n", 0) == 0);
    CHECK(text.find("witness v1\n") != std::string::npos);
  }
}

TEST_CASE("RE systems: examples") {
  SUBCASE("w+1 planar ends: every isolated pair gets a swap") {
    auto re = build_re_system(enc("node x children=gen:rank(1)\n"), {}, 6);
    std::size_t punctures = 0;
    for (const auto& u : re.system) punctures += u.puncture ? 1 : 0;
    CHECK(punctures == 7);
    CHECK(re.witnesses.size() == punctures - 1);
  }
  SUBCASE("two isolated genus ends") {
    auto re = build_re_system(enc("node a genus\nnode b genus\n"), {}, 6);
    REQUIRE(re.witnesses.size() == 1);
    CHECK(re.witnesses[0].gamma_x == re.witnesses[0].gamma_y);
    CHECK(re.serialize().find("swap p:0/r:0.0 p:1/r:0.0 ") != std::string::npos);
  }
  SUBCASE("a mismatched witness is rejected") {
    auto re = build_re_system(enc("node x children=gen:rank(2)\nnode y genus\n"), {}, 6);
    auto sys = re.system;
    const EndNbhd* a = nullptr;
    const EndNbhd* b = nullptr;
    for (const auto& u : sys) {
      if (!u.puncture && !u.type.genus && !a) a = &u;
      if (!u.puncture && u.type.genus && !b) b = &u;
    }
    REQUIRE(a);
    REQUIRE(b);
    REWitness w{*a, *b, "", ""};
    CHECK_FALSE(verify_witness(re.model, w, 3).ok);
  }
  CHECK(kind_of([] { build_re_system(enc("node a children=gen:cantor\n"), {}, 4); }) == ErrorKind::PerfectKernel);
  CHECK(kind_of([] { build_re_system(enc("node a children=gen:rank(w^7)\n"), {}, 4); }) == ErrorKind::RankOverflow);
  CHECK(kind_of([] { build_re_system(enc("node a\n"), {}, 4); }) == ErrorKind::EmbeddingFailure);
}

TEST_CASE("connected sums keep biflutes between genus ends of different summands") {
  auto m = connected_sum(genus_ray_model(), genus_ray_model());
  auto g = m.scheme.truncate(6);
  auto fr = g.slots_in(SlotState::Frontier);
  REQUIRE(fr.size() == 2);
  auto rec = recognize_between(g, fr[0], fr[1]);
  CHECK(rec.compatible_with(0, 1, 2));
}

TEST_CASE("standard tree sums carry verified swaps") {
  auto m = connected_sum(connected_sum(standard_tree(O("1"), false), standard_tree(O("2"), false)), eta_sphere(O("1")));
  CHECK(pw::graph::check_structural(m.scheme, 5).ok);
  auto ws = witnesses_for(m, 5);
  CHECK(ws.size() > 10);
  for (const auto& w : ws) {
    auto ok = verify_witness(m, w, 1);
    CAPTURE(w.x.end());
    CAPTURE(w.y.end());
    CAPTURE(ok.failure);
    CHECK(ok.ok);
  }
}

TEST_CASE("structural invariants for every constructor to depth 10") {
  std::vector<std::pair<std::string, PantsScheme>> all = {
      {"biflute", biflute(BifluteParams::uniform(2, 3, 4))},
      {"biflute N", biflute(BifluteParams::uniform(1, 1, 2, false))},
      {"eta 3", eta_sphere(O("3")).scheme},
      {"eta w genus", eta_sphere(O("w"), true).scheme},
      {"ray", genus_ray_model().scheme},
      {"flute", flute_of({eta_sphere(O("1"))}, {puncture_model(), genus_ray_model()}).scheme},
      {"sum", connected_sum(eta_sphere(O("2")), eta_sphere(O("1"), true)).scheme},
      {"tree", standard_tree(O("0"), true).scheme},
      {"pure cantor", pants_for_pure(cantor_spec({"(L)", "(RL)"})).scheme},
      {"pure countable", pants_for_pure(tree_spec(enc("node x children=gen:rank(1)\nnode y genus\n"))).scheme},
      {"re", build_re_system(enc("node x children=gen:rank(2)\nnode y genus\n"), {}, 4).model.scheme},
  };
  for (const auto& [name, s] : all) {
    CAPTURE(name);
    auto c = pw::graph::check_structural(s, name == "tree" || name == "pure cantor" ? 8 : 10);
    CAPTURE(c.failure);
    CHECK(c.ok);
  }
}
