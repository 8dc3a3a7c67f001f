#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "pantswork/construct.hpp"
#include "pantswork/error.hpp"
#include "pantswork/geometry.hpp"

using namespace pw::geometry;
using pw::Error;
using pw::ErrorKind;
using pw::construct::BifluteParams;
using pw::construct::biflute;
using pw::graph::edge_id;

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

PantsScheme ladder() { return biflute(BifluteParams::uniform(0, 1, 1)); }

std::string cuff_id(long i) { return edge_id({"z:" + std::to_string(i - 1), 1}, {"z:" + std::to_string(i), 0}); }

// arcsinh written out as a logarithm
double oracle_width(double l) {
  double s = 1 / std::sinh(l / 2);
  return std::log(s + std::sqrt(s * s + 1));
}

FNStructure x2() {
  return assign_lengths(ladder(), {{"spine", spine_index("z"), LengthRule::parse("exp(i)"), 1}});
}

}  // namespace

TEST_CASE("collar width") {
  CHECK(2 * collar_width(1.0) == doctest::Approx(2.8136).epsilon(1e-4));
  for (double l = 0.01; l < 20; l *= 1.3) {
    CHECK(collar_width(l) == doctest::Approx(oracle_width(l)).epsilon(1e-12));
    CHECK(collar_width(l * 1.3) < collar_width(l));
  }
  CHECK(kind_of([] { collar_width(0); }) == ErrorKind::NonPositiveLength);
}

TEST_CASE("rules parse and print") {
  for (const char* t : {"2.5", "exp(i)", "doubexp(i)", "1/i", "i", "3*exp(i)"}) {
    CAPTURE(std::string(t));
    CHECK(LengthRule::parse(LengthRule::parse(t).str()).str() == LengthRule::parse(t).str());
  }
  CHECK(LengthRule::parse("exp(i)").at(3) == doctest::Approx(std::exp(3.0)));
  CHECK(LengthRule::parse("doubexp(i)").at(-2) == doctest::Approx(std::exp(std::exp(2.0))));
  CHECK(LengthRule::parse("1/i").at(4) == doctest::Approx(0.25));
  CHECK(LengthRule::parse("i").growth() == std::optional<std::string>("linear"));
  CHECK_FALSE(LengthRule::parse("1/i").growth());
  CHECK(kind_of([] { LengthRule::parse("sin(i)"); }) == ErrorKind::Parse);
}

TEST_CASE("unit structure is a fixed point") {
  FNStructure x = unit_structure(ladder());
  for (int d : {2, 5, 9}) {
    auto g = x.truncate(d);
    for (const auto& [id, e] : g.edges()) {
      CHECK(*e.length == 1.0);
      CHECK(*e.twist == 0.0);
    }
    CHECK(x.bounded_constant(d) == std::optional<double>(1.0));
    CHECK(x.bounded_type(1, d));
    CHECK(is_untwisted(x, 0, d));
  }
  CHECK(x.complete());
  // relabelling every edge to length one changes nothing
  FNStructure y = assign_lengths(ladder(), {{"all", every_edge(), LengthRule::constant(1)}});
  CHECK(y.truncate(6).serialize() == x.truncate(6).serialize());
}

TEST_CASE("exponential spine lengths") {
  FNStructure x = x2();
  for (long i = -5; i <= 5; ++i) {
    const auto g = x.scheme().truncate(6);
    const Edge& e = g.edge(cuff_id(i));
    CHECK(x.length(e) == doctest::Approx(i % 2 ? std::exp(double(i)) : 1.0).epsilon(1e-12));
  }
  CHECK_FALSE(x.bounded_constant(4));
  CHECK_FALSE(x.bounded_type(1e9, 4));
  CHECK_FALSE(x.complete());
  CHECK(x.header().find("rule=spine:odd=exp(i)") != std::string::npos);
  CHECK(x.header().rfind("structure v1", 0) == 0);
}

TEST_CASE("handle and loop families") {
  FNStructure x = assign_lengths(ladder(), {{"handle", handle_index("z"), LengthRule::constant(2)},
                                            {"loop", loop_index("z"), LengthRule::constant(3)}});
  auto g = x.truncate(3);
  int handles = 0, loops = 0;
  for (const auto& [id, e] : g.edges()) {
    if (*e.length == 2) ++handles;
    if (*e.length == 3) {
      ++loops;
      CHECK(e.is_loop());
    }
  }
  CHECK(handles == 7);
  CHECK(loops == 7);
  CHECK(*x.bounded_constant(3) == 3);
}

TEST_CASE("twists") {
  FNStructure x = assign_lengths(biflute(BifluteParams::uniform(0, 1, 1, false)), {},
                                 {{"spine", spine_index("f"), LengthRule::parse("i")}});
  for (double T : {1.0, 10.0, 1e6}) CHECK_FALSE(is_untwisted(x, T, 8));
  FNStructure y = assign_lengths(ladder(), {}, {{"spine", spine_index("z"), LengthRule::constant(0.5)}});
  CHECK(is_untwisted(y, 0.5, 6));
  CHECK_FALSE(is_untwisted(y, 0.4, 6));
}

TEST_CASE("non-positive lengths") {
  CHECK(kind_of([] { assign_lengths(ladder(), {{"all", every_edge(), LengthRule::constant(0)}}); }) ==
        ErrorKind::NonPositiveLength);
  FNStructure x = assign_lengths(ladder(), {{"spine", spine_index("z"), LengthRule::parse("i")}});
  CHECK(kind_of([&] { x.truncate(2); }) == ErrorKind::NonPositiveLength);
}

TEST_CASE("curve lengths") {
  FNStructure x = x2();
  CHECK(curve_length(x, CurvePath::cuff_of(cuff_id(3)), 5).lo == doctest::Approx(std::exp(3.0)));
  CHECK(curve_length(x, CurvePath::cuff_of(cuff_id(3)), 5).exact());

  CurvePath once;
  once.id = "once";
  once.crossings = {{cuff_id(2), 1}};
  LengthBound b = curve_length(x, once, 5);
  CHECK(b.lo == doctest::Approx(2.8136).epsilon(1e-4));
  CHECK(std::isinf(b.hi));

  // additivity over crossings, including symbolic ones
  CurvePath both = once;
  both.crossings.push_back({cuff_id(3), 2});
  both.bulk.push_back({1.0, 1e6, "doubexp(i)"});
  CurvePath other;
  other.crossings = {{cuff_id(3), 2}};
  CurvePath bulk;
  bulk.bulk = both.bulk;
  double sum = curve_length(x, once, 5).lo + curve_length(x, other, 5).lo + curve_length(x, bulk, 5).lo;
  CHECK(curve_length(x, both, 5).lo == doctest::Approx(sum).epsilon(1e-12));

  both.crossing_slack = crossing_slack(1.0);
  LengthBound c = curve_length(x, both, 5);
  CHECK(c.hi == doctest::Approx(c.lo + crossing_slack(1.0) * (1e6 + 3)).epsilon(1e-12));
  // the seam is at least the two collars it crosses
  for (double l = 0.05; l < 10; l *= 1.5) CHECK(crossing_slack(l) > 0);

  CurvePath sym = CurvePath::symbolic_cuff("far", 1000, 2.5);
  CHECK(curve_length(x, sym, 1).lo == 2.5);
  CHECK(curve_length(x, sym, 1).exact());

  CHECK(kind_of([&] { curve_length(x, CurvePath::cuff_of(cuff_id(9)), 5); }) == ErrorKind::PathNotCarried);
  CHECK(kind_of([&] { curve_length(x, CurvePath::cuff_of("nope"), 5); }) == ErrorKind::PathNotCarried);
}
