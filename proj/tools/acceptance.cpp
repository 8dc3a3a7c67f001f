// One line per acceptance criterion. Exits non-zero when a criterion fails for
// any reason other than the documented Matsuzaki grid inversion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "oracle.hpp"
#include "pantswork/certify.hpp"
#include "pantswork/construct.hpp"
#include "pantswork/endspace.hpp"
#include "pantswork/error.hpp"
#include "pantswork/fixtures.hpp"

using namespace pw;
using certify::Verdict;
using Clock = std::chrono::steady_clock;

namespace {

struct Result {
  bool ok = true;
  bool known_gap = false;  // fails for a reason recorded in the decisions ledger
  std::ostringstream detail;

  void need(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [" << what << "]";
    }
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

fixtures::FixtureCase fixture(const std::vector<fixtures::FixtureCase>& all, const std::string& name) {
  for (const auto& c : all)
    if (c.name == name) return c;
  throw Error(ErrorKind::InvalidParameters, "no fixture " + name);
}

ordinal::ClosedSetEncoding enc(const char* text) { return ordinal::ClosedSetEncoding::parse(text); }

void ladder_shift(Result& r) {
  auto t0 = Clock::now();
  auto all = fixtures::corpus();
  auto x2 = fixture(all, "ese1-x2");
  auto c = certify::certify(x2.x, x2.f, 8);
  r.need(c.verdict == Verdict::NotQC, "X2 not NOT_QC");
  for (long i : {2L, 4L, 6L}) {
    bool hit = false;
    for (const auto& t : c.sequence)
      if (t.index == i) hit = std::fabs(t.ratio - std::exp(i + 1.0)) <= 1e-9 * std::exp(i + 1.0);
    r.need(hit, "ratio at " + std::to_string(i));
  }
  auto unit = fixture(all, "ese1-unit");
  r.need(certify::certify(unit.x, unit.f, 8).verdict == Verdict::Modular, "unit not MODULAR");
  double s = seconds_since(t0);
  r.need(s < 1, "runtime");
  r.detail << "X2 " << certify::to_string(c.verdict) << " " << c.growth << ", ratios e^(i+1) at i=2,4,6, unit MODULAR";
}

void sparse_ladder(Result& r) {
  auto t0 = Clock::now();
  auto sparse = fixtures::sparse_ladder();
  auto f = certify::shift("z", 1);
  f.along = construct::BifluteParams::uniform(0, 1, 1);
  f.obstruction = certify::enclosing_family("z", 1);
  auto a = certify::certify(sparse, f, 6);
  r.need(a.verdict == Verdict::NotQC && a.growth == "doubexp", "sparse not NOT_QC doubexp");
  // the hidden chains stay formulas: the truncation has only the ladder pants
  const auto g = sparse.scheme().truncate(6);
  r.need(sparse.has_blocks() && g.vertex_count() <= 30, "blocks materialized");
  auto h = certify::shift("z", 2);
  h.along = construct::BifluteParams::uniform(0, 1, 2);
  auto b = certify::certify(fixtures::enclosed_ladder(), h, 6);
  r.need(b.verdict == Verdict::Modular, "enlarged not MODULAR");
  double s = seconds_since(t0);
  r.need(s < 5, "runtime");
  r.detail << "sparse " << certify::to_string(a.verdict) << " " << a.growth << " with " << g.vertex_count()
           << " pants at depth 6, enlarged " << certify::to_string(b.verdict);
}

void accumulated_ends(Result& r) {
  const auto x = geometry::unit_structure(fixtures::accumulated_ends());
  auto h = fixtures::end_shift_product();
  auto a = certify::certify(x, h, 8);
  r.need(a.verdict == Verdict::NotQC && a.growth == "linear", "h not NOT_QC linear");
  int modular = 0;
  for (int m : {0, 1, 4})
    modular += certify::certify(x, fixtures::end_shift(m), m == 4 ? 14 : 8).verdict == Verdict::Modular;
  r.need(modular == 3, "a factor is not MODULAR");
  auto approx = certify::approximant_sequence(x, h, 8);
  int agree = 0;
  for (int n = 0; n <= 8; ++n) agree += certify::agree_on_core(x, approx[static_cast<std::size_t>(n)], h, n);
  r.need(agree == 9, "approximants disagree");
  r.detail << "h " << certify::to_string(a.verdict) << " " << a.growth << ", " << modular
           << "/3 factors MODULAR, approximants agree on X_n for " << agree << "/9 n <= 8";
}

void matsuzaki(Result& r) {
  auto zero = certify::matsuzaki_bounds({1.0, 3.0}, {0, 0});
  r.need(zero.lo == 1 && zero.hi == 1, "n=0");
  auto one = certify::matsuzaki_bounds({1.0}, {1});
  // independent rewrite: theta = 2 atan(1/sinh(l/2)), (sqrt(u^2+1)+u)^2 = exp(2 asinh u)
  auto oracle_hi = [](double l, long n) {
    return std::exp(2 * std::asinh(static_cast<double>(n) * l / (4 * std::atan(1 / std::sinh(l / 2)))));
  };
  auto rel = [](double a, double b) { return std::fabs(a - b) / std::fabs(b); };
  r.need(rel(one.lo, std::sqrt(1 / std::numbers::pi) + 1) <= 1e-12, "K_lo(1,1)");
  r.need(rel(one.hi, oracle_hi(1.0, 1)) <= 1e-12, "K_hi(1,1)");
  int inverted = 0, points = 0;
  bool monotone = true, oracle_ok = true;
  for (int a = 0; a < 10; ++a) {
    const double l = 0.05 + a * (10 - 0.05) / 9;
    for (long n = 1; n <= 20; ++n) {
      ++points;
      double lo = certify::matsuzaki_lower_term(l, n), hi = certify::matsuzaki_upper_term(l, n);
      inverted += lo > hi;
      oracle_ok = oracle_ok && rel(hi, oracle_hi(l, n)) <= 1e-12;
      monotone = monotone && lo >= certify::matsuzaki_lower_term(l, n - 1);
      if (a > 0) monotone = monotone && lo >= certify::matsuzaki_lower_term(0.05 + (a - 1) * (10 - 0.05) / 9, n);
    }
  }
  r.need(monotone, "monotone");
  r.need(oracle_ok, "grid oracle");
  r.detail << "n=0 [1,1], (1,1) [" << one.lo << ", " << one.hi << "] matches the oracle, monotone in l and |n|";
  if (inverted > 0) {
    // only a gap when everything else held
    r.known_gap = r.ok;
    r.ok = false;
    r.detail << "; K_lo > K_hi at " << inverted << "/" << points
             << " grid points (all at l=0.05): the closed forms invert when l|n| is small";
  }
}

void cb_rank_oracle(Result& r) {
  auto t0 = Clock::now();
  int agree = 0, total = 0;
  std::size_t largest = 0;
  for (std::uint64_t seed = 1000; total < 100; ++seed) {
    // forests of random trees, grown toward a size drawn up to 5000 nodes
    oracle::RandomEncoding gen(seed, 5000);
    const std::size_t target = 1 + (seed * 2654435761u) % 5000;
    ordinal::Forest roots;
    while (gen.used() < target) {
      auto more = gen.make(static_cast<int>(seed % 4));
      if (more.empty()) break;
      for (auto& n : more) roots.push_back(std::move(n));
    }
    ordinal::ClosedSetEncoding s(roots);
    largest = std::max(largest, gen.used());
    auto brute = oracle::brute_rank(s.roots());
    if (brute.nu > 3) continue;
    auto got = ordinal::cb_rank(s);
    agree += got.nu == ordinal::Ordinal::finite(brute.nu) && got.n == brute.n;
    ++total;
  }
  double s = seconds_since(t0);
  r.need(agree == total, "rank mismatch");
  r.need(s < 10, "runtime");
  r.detail << agree << "/" << total << " encodings agree (largest " << largest << " nodes)";
}

void pure_pipeline(Result& r) {
  struct Spec {
    const char* name;
    construct::TreeEndSpec spec;
  };
  std::vector<Spec> specs = {
      {"two genus ends on the Cantor tree", construct::cantor_spec({"(L)", "(RL)"})},
      {"w+1 planar and one genus", construct::tree_spec(enc("node x children=gen:rank(1)\nnode y genus\n"))},
      {"three isolated planar", construct::tree_spec(enc("node a\nnode b\nnode c\n"))},
  };
  int pairs = 0;
  for (const auto& s : specs) {
    auto p = construct::pants_for_pure(s.spec);
    auto check = graph::check_structural(p.scheme, 8);
    r.need(check.ok, std::string(s.name) + ": " + check.failure);
    auto g = p.scheme.truncate(8);
    auto ends = p.genus_ends(8);
    for (std::size_t i = 0; i < ends.size(); ++i)
      for (std::size_t j = i + 1; j < ends.size(); ++j) {
        ++pairs;
        r.need(construct::recognize_between(g, ends[i], ends[j]).compatible_with(0, 1, 2),
               std::string(s.name) + ": pair not (0,1,2)");
      }
  }
  r.detail << "3 specs, genus pairs: " << pairs << ", each recognized as (0,1,2) at depth 8, level invariants hold";
}

void re_builder(Result& r) {
  const char* specs[] = {
      "node x children=gen:rank(1)\n",
      "node a genus\nnode b genus\n",
      "node x genus children=gen:rank(1,genus)\n",
      "node x children=gen:rank(2)\nnode y genus\nnode z genus children=gen:rank(1,genus)\n",
      "node x genus children=gen:periodic(;a,b)\n  node a\n  node b genus\n",
      "node a\nnode b\nnode c\nnode d genus\n",
  };
  int clauses = 0, witnesses = 0, used = 0;
  for (const char* text : specs) {
    auto e = enc(text);
    if (ordinal::Ordinal::finite(2) < ordinal::cb_rank(e).nu) continue;
    ++used;
    auto re = construct::build_re_system(e, {}, 6);
    for (const auto& c : construct::check_normal_system(re.model, 6)) {
      ++clauses;
      r.need(c.ok, c.clause + ": " + c.detail);
    }
    for (const auto& w : re.witnesses) {
      ++witnesses;
      r.need(construct::verify_witness(re.model, w, 4).ok, "witness " + w.x.end() + " " + w.y.end());
    }
  }
  auto all = fixtures::corpus();
  auto swap = fixture(all, "tree-swap");
  auto approx = certify::approximant_sequence(swap.x, swap.f, swap.depth);
  int modular = 0;
  for (const auto& a : approx) modular += certify::certify(swap.x, a, swap.depth).verdict == Verdict::Modular;
  r.need(modular == static_cast<int>(approx.size()), "approximant not MODULAR");
  r.detail << used << " specs, " << clauses << " clauses hold at depth 6, " << witnesses << " witnesses verified, "
           << modular << "/" << approx.size() << " end-swap approximants MODULAR";
}

void structural(Result& r) {
  using namespace construct;
  auto O = [](const char* s) { return ordinal::Ordinal::parse(s); };
  std::vector<std::pair<std::string, graph::PantsScheme>> all = {
      {"z", graph::z_graph()},
      {"flute", graph::flute_graph()},
      {"biflute", biflute(BifluteParams::uniform(2, 3, 4))},
      {"biflute N", biflute(BifluteParams::uniform(1, 1, 2, false))},
      {"eta 3", eta_sphere(O("3")).scheme},
      {"eta w genus", eta_sphere(O("w"), true).scheme},
      {"ray", genus_ray_model().scheme},
      {"flute of", flute_of({eta_sphere(O("1"))}, {puncture_model(), genus_ray_model()}).scheme},
      {"sum", connected_sum(eta_sphere(O("2")), eta_sphere(O("1"), true)).scheme},
      {"tree", standard_tree(O("0"), true).scheme},
      {"pure cantor", pants_for_pure(cantor_spec({"(L)", "(RL)"})).scheme},
      {"pure countable", pants_for_pure(tree_spec(enc("node x children=gen:rank(1)\nnode y genus\n"))).scheme},
      {"re", build_re_system(enc("node x children=gen:rank(2)\nnode y genus\n"), {}, 4).model.scheme},
      {"accumulated ends", fixtures::accumulated_ends()},
  };
  int ok = 0;
  for (const auto& [name, s] : all) {
    auto c = graph::check_structural(s, 10);
    r.need(c.ok, name + ": " + c.failure);
    ok += c.ok;
  }
  r.detail << ok << "/" << all.size() << " constructors pass every check at depths 0..10";
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Result&)>>> criteria = {
      {"ladder shift on X1 and X2", ladder_shift},
      {"sparse ladder and its enlarged decomposition", sparse_ladder},
      {"accumulated ends product and factors", accumulated_ends},
      {"Matsuzaki bounds", matsuzaki},
      {"CB rank against brute force", cb_rank_oracle},
      {"pure pipeline", pure_pipeline},
      {"RE builder", re_builder},
      {"structural suite", structural},
  };
  int unexpected = 0, k = 0;
  for (const auto& [name, run] : criteria) {
    Result r;
    auto t0 = Clock::now();
    try {
      run(r);
    } catch (const std::exception& e) {
      r.ok = false;
      r.detail << " threw " << e.what();
    }
    std::printf("%s %d %s: %s (%.2f s)\n", r.ok ? "PASS" : "FAIL", ++k, name, r.detail.str().c_str(),
                seconds_since(t0));
    if (!r.ok && !r.known_gap) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
