#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>

#include "oracle.hpp"
#include "pantswork/endspace.hpp"
#include "pantswork/error.hpp"

using namespace pw::ordinal;
using pw::Error;
using pw::ErrorKind;

namespace {

ClosedSetEncoding E(const std::string& text) { return ClosedSetEncoding::parse(text); }

const char* kOmegaPlusOne =
    "node a children=gen:periodic(;b)\n"
    "  node b\n";

// w^2*2+1 spelled out with nested periodic generators.
const char* kOmegaSquaredTwice =
    "node a children=gen:periodic(;b)\n"
    "  node b children=gen:periodic(;c)\n"
    "    node c\n"
    "node d children=gen:periodic(;e)\n"
    "  node e children=gen:periodic(;f)\n"
    "    node f\n";

std::set<std::string> ids(const Forest& f) {
  std::set<std::string> out;
  std::function<void(const Forest&)> walk = [&](const Forest& g) {
    for (const auto& n : g) {
      out.insert(n.id);
      walk(n.children);
      if (n.gen)
        for (const auto* part : {&n.gen->prefix, &n.gen->cycle})
          for (const auto& e : *part) walk(e);
    }
  };
  walk(f);
  return out;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Parse;
}

}  // namespace

TEST_CASE("derived set of a finite set is empty") {
  auto s = E("node a\nnode b\nnode c\n");
  CHECK(derived_set(s).empty());
  CHECK(derived_set(ClosedSetEncoding{}).empty());
}

TEST_CASE("derived set of w+1 is its limit point") {
  auto d = derived_set(E(kOmegaPlusOne));
  CHECK(d.serialize() == "node a\n");
}

TEST_CASE("cb_rank on finite sets") {
  for (int k = 1; k <= 6; ++k) {
    std::string text;
    for (int i = 0; i < k; ++i) text += "node p" + std::to_string(i) + "\n";
    CHECK(cb_rank(E(text)) == CBRank{Ordinal{}, static_cast<std::uint64_t>(k)});
  }
}

TEST_CASE("cb_rank of canonical w^zeta*n+1") {
  for (const char* z : {"0", "1", "3", "w", "w^2+1", "w^5*3"}) {
    for (std::uint64_t n = 1; n <= 3; ++n) {
      auto s = canonical_set(Ordinal::parse(z), n);
      CHECK(cb_rank(s) == CBRank{Ordinal::parse(z), n});
    }
  }
}

TEST_CASE("w^2*2+1: structural rank matches the brute-force oracle") {
  auto s = E(kOmegaSquaredTwice);
  auto brute = oracle::brute_rank(s.roots());
  CHECK(brute.nu == 2);
  CHECK(brute.n == 2);
  CHECK(cb_rank(s) == CBRank{Ordinal::finite(2), 2});
  CHECK(cb_rank(derived_set(derived_set(s))) == CBRank{Ordinal{}, 2});
}

TEST_CASE("homeo_type examples") {
  CHECK(homeo_type(E("node x\n")) == std::pair{Ordinal{}, std::uint64_t{1}});
  CHECK(homeo_type(E(kOmegaPlusOne)) == std::pair{Ordinal::finite(1), std::uint64_t{1}});
  auto both = E(
      "node a children=gen:periodic(;b)\n"
      "  node b children=gen:periodic(;c)\n"
      "    node c\n"
      "node d children=gen:periodic(;e)\n"
      "  node e\n");
  auto brute = oracle::brute_rank(both.roots());
  CHECK(brute.nu == 2);
  CHECK(brute.n == 1);
  CHECK(homeo_type(both) == std::pair{Ordinal::finite(2), std::uint64_t{1}});
}

TEST_CASE("periodic prefixes and clopen groupings") {
  // a limit whose prefix holds a rank-2 point: the prefix dominates
  auto s = E(
      "node a children=gen:periodic(q;b,_)\n"
      "  node q children=gen:rank(2)\n"
      "  node b\n");
  CHECK(cb_rank(s) == CBRank{Ordinal::finite(2), 1});
  CHECK(point_rank(s.roots()[0]) == Ordinal::finite(1));
  auto g = E("node a children=[b,c]\n  node b\n  node c children=gen:rank(w)\n");
  CHECK(cb_rank(g) == CBRank{Ordinal::omega(), 1});
  auto empty_cycle = E("node a children=gen:periodic(b;_)\n  node b\n");
  CHECK(cb_rank(empty_cycle) == CBRank{Ordinal{}, 2});
}

TEST_CASE("serialization round trip") {
  for (const char* text : {
           kOmegaPlusOne,
           kOmegaSquaredTwice,
           "node a genus children=gen:periodic(p&q,_;r,_)\n  node p\n  node q\n  node r genus\n",
           "node x genus children=gen:rank(w^(w+1)*2,genus)\n",
           "node t children=[u,v]\n  node u\n  node v children=gen:rank(3)\n",
           "node c children=gen:cantor\n",
       }) {
    CHECK(E(text).serialize() == text);
  }
}

TEST_CASE("malformed and unparsable encodings") {
  CHECK(kind_of([] { E("node a children=gen:periodic(;b)\n  node b genus\n"); }) ==
        ErrorKind::MalformedEncoding);
  CHECK(kind_of([] { E("node a children=gen:rank(2,genus)\n"); }) == ErrorKind::MalformedEncoding);
  CHECK(kind_of([] { E("node a\nnode a\n"); }) == ErrorKind::MalformedEncoding);
  CHECK(kind_of([] { E("node a children=gen:periodic(b;)\n  node b\n"); }) == ErrorKind::MalformedEncoding);
  CHECK(kind_of([] { E("node a children=[b]\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { E("node a children=[b]\n  node c\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { E("   node a\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { E("vertex a\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { E("node a children=gen:rank(w^)\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { E("node a sparkly\n"); }) == ErrorKind::Parse);
}

TEST_CASE("rank errors") {
  CHECK(kind_of([] { cb_rank(ClosedSetEncoding{}); }) == ErrorKind::EmptySet);
  CHECK(kind_of([] { cb_rank(E("node c children=gen:cantor\n")); }) == ErrorKind::PerfectKernel);
  CHECK(kind_of([] { cb_rank(E("node c children=gen:rank(w^6)\n")); }) == ErrorKind::RankOverflow);
  CHECK(cb_rank(E("node c children=gen:rank(w^6)\n"), RankBound{7}).nu == Ordinal::parse("w^6"));
}

TEST_CASE("property: structural rank equals brute-force derivation (rank <= 4)") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    oracle::RandomEncoding gen(seed, 10000);
    ClosedSetEncoding s(gen.make(static_cast<int>(seed % 5)));
    auto brute = oracle::brute_rank(s.roots());
    auto r = cb_rank(s);
    CAPTURE(seed);
    CHECK(r.nu == Ordinal::finite(brute.nu));
    CHECK(r.n == brute.n);
  }
}

TEST_CASE("property: derived_set agrees with one brute derivation and shrinks") {
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    oracle::RandomEncoding gen(seed, 2000);
    ClosedSetEncoding s(gen.make(3));
    auto d = derived_set(s);
    auto di = ids(d.roots());
    auto si = ids(s.roots());
    CAPTURE(seed);
    for (const auto& id : di) CHECK(si.count(id) == 1);
    auto brute = oracle::brute_survivor_templates(s.roots(), 1);
    brute.erase("r");
    CHECK(di == brute);
    // Rank drops by exactly one level.
    auto r = cb_rank(s);
    if (r.nu.is_zero()) {
      CHECK(d.empty());
    } else {
      CHECK(cb_rank(d) == CBRank{r.nu.drop_one(), r.n});
    }
  }
}

TEST_CASE("property: serialization round trip on random encodings") {
  for (std::uint64_t seed = 200; seed < 230; ++seed) {
    oracle::RandomEncoding gen(seed, 1500);
    ClosedSetEncoding s(gen.make(3));
    auto text = s.serialize();
    CHECK(ClosedSetEncoding::parse(text).serialize() == text);
  }
}

TEST_CASE("homeo_type equal iff cb_rank equal") {
  std::vector<ClosedSetEncoding> pool;
  for (std::uint64_t seed = 300; seed < 320; ++seed) {
    oracle::RandomEncoding gen(seed, 300);
    pool.emplace_back(gen.make(static_cast<int>(seed % 3)));
  }
  for (const auto& a : pool)
    for (const auto& b : pool) CHECK((homeo_type(a) == homeo_type(b)) == (cb_rank(a) == cb_rank(b)));
}
