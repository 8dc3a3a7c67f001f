#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numbers>

#include "pantswork/error.hpp"
#include "pantswork/fixtures.hpp"

using namespace pw;
using namespace pw::certify;

namespace {

// Closed forms rewritten independently: theta = 2 atan(1/sinh(l/2)) and
// (sqrt(u^2+1)+u)^2 = exp(2 asinh u).
double oracle_hi(double l, long n) {
  const double theta = 2 * std::atan(1 / std::sinh(l / 2));
  return std::exp(2 * std::asinh(std::labs(n) * l / (2 * theta)));
}
double oracle_lo(double l, long n) {
  const double k = n == 0 ? 0.0 : 2.0 * std::labs(n) - 1;
  return 1 + std::sqrt(k * l) / std::sqrt(std::numbers::pi);
}

fixtures::FixtureCase fixture(const std::string& name) {
  for (auto& c : fixtures::corpus())
    if (c.name == name) return c;
  FAIL("no fixture " << name);
  return {};
}

std::vector<CurvePath> cuffs(const FNStructure& x, int depth) {
  std::vector<CurvePath> out;
  const auto g = x.scheme().truncate(depth);
  for (const auto& [id, e] : g.edges()) out.push_back(CurvePath::cuff_of(id));
  return out;
}

const Term* term_at(const Certificate& c, long i) {
  for (const auto& t : c.sequence)
    if (t.index == i) return &t;
  return nullptr;
}

}  // namespace

TEST_CASE("matsuzaki: zero powers give [1,1]") {
  auto iv = matsuzaki_bounds({0.3, 1.0, 7.0}, {0, 0, 0});
  CHECK(iv.lo == 1.0);
  CHECK(iv.hi == 1.0);
  auto rule = matsuzaki_bounds(LengthRule::parse("exp(i)"), LengthRule::constant(0));
  CHECK(rule.lo == 1.0);
  CHECK(rule.hi == 1.0);
}

TEST_CASE("matsuzaki: unit length, single twist") {
  auto iv = matsuzaki_bounds({1.0}, {1});
  CHECK(iv.lo == doctest::Approx(std::sqrt(1 / std::numbers::pi) + 1).epsilon(1e-12));
  CHECK(iv.hi == doctest::Approx(oracle_hi(1.0, 1)).epsilon(1e-12));
  // frozen
  CHECK(iv.lo == doctest::Approx(1.56418958354776).epsilon(1e-12));
  CHECK(iv.hi == doctest::Approx(1.57556803898315).epsilon(1e-12));
}

TEST_CASE("matsuzaki: grid against the oracle, monotone") {
  // 10 lengths x 20 powers
  std::vector<double> ls;
  for (int a = 0; a < 10; ++a) ls.push_back(0.05 + a * (10 - 0.05) / 9);
  int inverted = 0;
  for (double l : ls) {
    double prev = 0;
    for (long n = 1; n <= 20; ++n) {
      double lo = matsuzaki_lower_term(l, n), hi = matsuzaki_upper_term(l, n);
      // the square-root lower bound beats the upper one when l |n| is small
      if (lo > hi) {
        ++inverted;
        CHECK(l == 0.05);
      }
      CHECK(lo == doctest::Approx(oracle_lo(l, n)).epsilon(1e-12));
      CHECK(hi == doctest::Approx(oracle_hi(l, n)).epsilon(1e-12));
      CHECK(lo >= prev);
      prev = lo;
    }
    CHECK(matsuzaki_lower_term(l, 0) == 1.0);
    CHECK(matsuzaki_lower_term(l, -3) == matsuzaki_lower_term(l, 3));
  }
  CHECK(inverted == 20);
  // single twists order correctly only from about l = 0.984 on
  CHECK(matsuzaki_lower_term(0.98, 1) > matsuzaki_upper_term(0.98, 1));
  CHECK(matsuzaki_lower_term(0.99, 1) < matsuzaki_upper_term(0.99, 1));
  for (long n = 0; n <= 20; ++n)
    for (std::size_t a = 1; a < ls.size(); ++a) CHECK(matsuzaki_lower_term(ls[a], n) >= matsuzaki_lower_term(ls[a - 1], n));
}

TEST_CASE("matsuzaki: errors") {
  CHECK_THROWS_AS(matsuzaki_bounds({0.0}, {1}), Error);
  try {
    matsuzaki_bounds(LengthRule::parse("exp(i)"), LengthRule::constant(1));
    FAIL("expected UnboundedFamily");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnboundedFamily);
  }
  try {
    matsuzaki_bounds({-1.0}, {2});
    FAIL("expected NonPositiveLength");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonPositiveLength);
  }
}

TEST_CASE("wolpert: identity is exactly 1, inverse is symmetric") {
  auto x = fixtures::ladder_x2();
  auto cs = cuffs(x, 4);
  auto id = wolpert_lower_bound(x, x, identity_map(), cs, 4);
  CHECK(id.bound == 1.0);
  for (const auto& t : id.terms) CHECK(t.ratio == 1.0);

  auto h = shift("z", 1);
  auto fwd = wolpert_lower_bound(x, x, h, cs, 4);
  const auto big = x.scheme().truncate(4 + h.reach);
  std::vector<CurvePath> images;
  for (const auto& c : cs) images.push_back(*h.image(big, c));
  auto back = wolpert_lower_bound(x, x, h.inverse(), images, 4 + h.reach);
  CHECK(back.bound == doctest::Approx(fwd.bound).epsilon(1e-12));
  CHECK(fwd.bound > 1);
}

TEST_CASE("wolpert: errors") {
  auto x = geometry::unit_structure(fixtures::ladder());
  try {
    wolpert_lower_bound(x, x, identity_map(), {CurvePath::cuff_of("nowhere~else")}, 3);
    FAIL("expected CurveNotCarried");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CurveNotCarried);
  }
  // a map undefined off its support
  auto partial = shift("z", 1);
  partial.vertex = [](const std::string&) -> std::optional<std::string> { return std::nullopt; };
  try {
    wolpert_lower_bound(x, x, partial, cuffs(x, 2), 2);
    FAIL("expected MapUndefinedOnCurve");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MapUndefinedOnCurve);
  }
}

TEST_CASE("growth families") {
  auto seq = [](auto fn) {
    std::vector<Term> t;
    for (long i = 1; i <= 6; ++i) t.push_back({i, "c", fn(static_cast<double>(i))});
    return t;
  };
  CHECK(growth_family(seq([](double i) { return 1 + std::sqrt(i); })) == "sqrt");
  CHECK(growth_family(seq([](double i) { return 3 * i; })) == "linear");
  CHECK(growth_family(seq([](double i) { return std::exp(i); })) == "exp");
  CHECK(growth_family(seq([](double i) { return std::exp(std::exp(i)); })) == "doubexp");
  CHECK_FALSE(growth_family(seq([](double) { return 2.0; })).has_value());
}

TEST_CASE("ladder shift: unit structure is modular, X2 is not") {
  auto t0 = std::chrono::steady_clock::now();
  auto unit = fixture("ese1-unit");
  auto a = certify::certify(unit.x, unit.f, unit.depth);
  CHECK(a.verdict == Verdict::Modular);
  CHECK(a.witness.find("M=1 T=0 biflute=(0,1,1)") != std::string::npos);

  auto x2 = fixture("ese1-x2");
  auto b = certify::certify(x2.x, x2.f, x2.depth);
  CHECK(b.verdict == Verdict::NotQC);
  CHECK(b.growth == "exp");
  for (long i : {2, 4, 6}) {
    const Term* t = term_at(b, i);
    REQUIRE(t != nullptr);
    CHECK(std::fabs(t->ratio - std::exp(i + 1.0)) <= 1e-9 * std::exp(i + 1.0));
  }
  CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(1));
}

TEST_CASE("sparse ladder: hidden chains obstruct, the enlarged decomposition does not") {
  auto t0 = std::chrono::steady_clock::now();
  auto sparse = fixture("ese2-sparse");
  auto a = certify::certify(sparse.x, sparse.f, 6);
  CHECK(a.verdict == Verdict::NotQC);
  CHECK(a.growth == "doubexp");
  CHECK(a.depth == 6);
  auto enclosed = fixture("ese2-enclosed");
  auto b = certify::certify(enclosed.x, enclosed.f, 6);
  CHECK(b.verdict == Verdict::Modular);
  CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(5));
}

TEST_CASE("declared blocks and the planar sparse flute") {
  auto d = fixture("pa-declared");
  auto a = certify::certify(d.x, d.f, d.depth);
  CHECK(a.verdict == Verdict::NotQC);
  CHECK(a.growth == "declared");
  auto p = fixture("ese3-planar");
  auto b = certify::certify(p.x, p.f, p.depth);
  CHECK(b.verdict == Verdict::NotQC);
  CHECK(b.growth == "doubexp");
}

TEST_CASE("accumulated ends: the product is not modular, its factors are") {
  const auto x = geometry::unit_structure(fixtures::accumulated_ends());
  auto h = fixtures::end_shift_product();
  auto a = certify::certify(x, h, 8);
  CHECK(a.verdict == Verdict::NotQC);
  CHECK(a.growth == "linear");
  const double w = geometry::collar_width(1.0);
  for (const auto& t : a.sequence) CHECK(t.ratio == doctest::Approx(4 * w * (t.index + 1)).epsilon(1e-9));

  for (int m : {0, 1, 4}) {
    auto c = certify::certify(x, fixtures::end_shift(m), m == 4 ? 14 : 8);
    CHECK(c.verdict == Verdict::Modular);
    CHECK(c.witness.find("straightened") != std::string::npos);
  }

  auto approx = approximant_sequence(x, h, 8);
  REQUIRE(approx.size() == 9);
  for (int n = 0; n <= 8; ++n) {
    CHECK(agree_on_core(x, approx[n], h, n));
    // h(4,6) needs depth 14 before its carrier is visible
    CHECK(certify::certify(x, approx[n], 14).verdict == Verdict::Modular);
  }
  // a finite product differs from h somewhere further out
  CHECK_FALSE(agree_on_core(x, approx[0], h, 8));
}

TEST_CASE("(0,1,2)-biflute shift carries its structural witness") {
  auto c = fixture("biflute-shift");
  auto cert = certify::certify(c.x, c.f, c.depth);
  CHECK(cert.verdict == Verdict::Modular);
  CHECK(cert.witness == "M=1 T=0 biflute=(0,1,2) pants-to-pants=literal");
}

TEST_CASE("multitwists") {
  auto u = fixture("multitwist-unit");
  auto a = certify::certify(u.x, u.f, u.depth);
  CHECK(a.verdict == Verdict::Modular);
  REQUIRE(a.interval.has_value());
  CHECK(a.interval->lo == doctest::Approx(1.56419).epsilon(1e-5));
  CHECK(a.interval->hi == doctest::Approx(1.57558).epsilon(1e-5));
  auto l = fixture("multitwist-linear");
  auto b = certify::certify(l.x, l.f, l.depth);
  CHECK(b.verdict == Verdict::NotQC);
  CHECK(b.growth == "sqrt");
  CHECK(b.sequence.back().ratio >= 1e6);
}

TEST_CASE("end swap approximants are modular") {
  auto c = fixture("tree-swap");
  CHECK(certify::certify(c.x, c.f, c.depth).verdict == Verdict::Modular);
  auto approx = approximant_sequence(c.x, c.f, c.depth);
  REQUIRE(approx.size() == static_cast<std::size_t>(c.depth + 1));
  for (int n = 0; n <= c.depth; ++n) {
    CHECK(agree_on_core(c.x, approx[n], c.f, n));
    CHECK(certify::certify(c.x, approx[n], c.depth).verdict == Verdict::Modular);
  }
}

TEST_CASE("approximants need witness data") {
  auto x = geometry::unit_structure(fixtures::ladder());
  try {
    approximant_sequence(x, shift("z", 1), 3);
    FAIL("expected NoWitness");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoWitness);
  }
}

TEST_CASE("certificate record") {
  auto c = fixture("ese1-x2");
  auto cert = certify::certify(c.x, c.f, c.depth);
  const auto s = cert.serialize();
  CHECK(s.rfind("certificate v1\nverdict=NOT_QC\n", 0) == 0);
  CHECK(s.find("\ngrowth=exp\n") != std::string::npos);
  CHECK(s.find(";(2,") != std::string::npos);
  auto m = fixture("multitwist-unit");
  auto ms = certify::certify(m.x, m.f, m.depth).serialize();
  CHECK(ms.find("\ninterval=") != std::string::npos);
}

TEST_CASE("structural verdicts never meet diverging cuff ratios") {
  for (auto& c : fixtures::corpus()) {
    if (!c.f.vertex) continue;
    auto cert = certify::certify(c.x, c.f, c.depth);
    if (cert.verdict != Verdict::Modular || cert.interval) continue;
    CAPTURE(c.name);
    auto w = wolpert_lower_bound(c.x, c.x, c.f, cuffs(c.x, c.depth), c.depth);
    CHECK(w.bound <= 1 + 1e-9);
  }
}
