#include "pantswork/fixtures.hpp"

#include <cmath>

#include "pantswork/construct.hpp"
#include "pantswork/endspace.hpp"
#include "pantswork/error.hpp"

namespace pw::fixtures {

using certify::CurvePair;
using construct::BifluteParams;
using geometry::BlockRule;
using geometry::CurvePath;
using geometry::FamilyRule;
using geometry::LengthRule;
using graph::RawGraph;
using graph::SlotRef;
using graph::SlotState;

graph::PantsScheme ladder() { return construct::biflute(BifluteParams::uniform(0, 1, 1)); }

FNStructure ladder_x2() {
  return geometry::assign_lengths(ladder(), {{"spine", geometry::spine_index("z"), LengthRule::parse("exp(i)"), 1}});
}

namespace {

// the spine curve z:i ~ z:(i+1) gets index i
geometry::EdgeIndex gap_index(const std::string& family, long from) {
  auto spine = geometry::spine_index(family);
  return [spine, from](const graph::Edge& e) -> std::optional<long> {
    auto k = spine(e);
    if (!k || *k - 1 < from) return std::nullopt;
    return *k - 1;
  };
}

}  // namespace

FNStructure sparse_ladder() {
  return geometry::assign_lengths(ladder(), {}, {},
                                  {BlockRule{"Q", gap_index("z", std::numeric_limits<long>::min() / 2),
                                             LengthRule::parse("doubexp(i)")}});
}

FNStructure enclosed_ladder() {
  auto base = construct::biflute(BifluteParams::uniform(0, 1, 2));
  graph::PantsScheme s("enclosed-ladder", [base](int d) {
    RawGraph r = base.raw(d);
    for (long k = -d; k <= d; ++k) {
      if (k % 2 == 0) continue;
      SlotRef beta{"z:" + std::to_string(k), 2};
      if (r.graph.has_vertex(beta.vertex)) r.graph.set_free(beta, SlotState::Boundary);
    }
    return r;
  });
  return geometry::unit_structure(s);
}

FNStructure sparse_flute() {
  // a_(i+1) - a_i - 1 pants sit between consecutive marked punctures; the
  // leading term floor(e^(e^(i+1))) stands for the count
  auto idx = gap_index("z", 0);
  geometry::EdgeIndex shifted = [idx](const graph::Edge& e) -> std::optional<long> {
    auto k = idx(e);
    if (!k) return std::nullopt;
    return *k + 1;
  };
  return geometry::assign_lengths(graph::z_graph(), {}, {}, {BlockRule{"S", shifted, LengthRule::parse("doubexp(i)")}});
}

graph::PantsScheme accumulated_ends() {
  return graph::PantsScheme("accumulated-ends", [](int d) {
    RawGraph r;
    const int top = d + 1;
    auto c = [](int k) { return "c:" + std::to_string(k); };
    for (int k = 0; k <= top; ++k) r.add(c(k), k);
    for (int k = 0; k < top; ++k) r.graph.pair({c(k), 1}, {c(k + 1), 0});
    for (int m = 0; 2 * m <= top; ++m) {
      const std::string fam = "e" + std::to_string(m) + ":";
      const int base = 2 * m + 1;
      for (int j = 0; base + j <= top; ++j) {
        const std::string v = fam + std::to_string(j);
        r.add(v, base + j);
        if (j == 0)
          r.graph.pair({c(2 * m), 2}, {v, 0});
        else
          r.graph.pair({fam + std::to_string(j - 1), 1}, {v, 0});
        if (j % (m + 1) == 0) {
          // same level as its pants, so no compact genus hangs off a core
          const std::string h = v + "/h:0";
          r.add(h, base + j);
          r.graph.pair({v, 2}, {h, 0});
          r.graph.pair({h, 1}, {h, 2});
        }
      }
    }
    return r;
  });
}

MappingScheme end_shift(int m) {
  const std::string a = "e" + std::to_string(m) + ":", b = "e" + std::to_string(m + 2) + ":";
  auto carrier = [a, b, m](int d) {
    return std::pair{SlotRef{a + std::to_string(d - (2 * m + 1)), 1}, SlotRef{b + std::to_string(d - (2 * m + 5)), 1}};
  };
  auto support = [a, b, m](const std::string& v) {
    if (v.rfind(a, 0) == 0 || v.rfind(b, 0) == 0) return true;
    if (v.rfind("c:", 0) != 0) return false;
    int k = std::stoi(v.substr(2));
    return k >= 2 * m && k <= 2 * m + 4;
  };
  auto f = certify::carried_shift("h(" + std::to_string(m) + "," + std::to_string(m + 2) + ")", carrier, support,
                                  BifluteParams::uniform(0, 1, std::max(m + 3, 6), false));
  return f;
}

MappingScheme end_shift_product() {
  std::vector<MappingScheme> parts;
  for (int m = 0; m <= 60; m += 4) parts.push_back(end_shift(m));
  auto h = certify::composite("h", parts, true);
  h.infinite = true;
  h.symbolic = true;
  // a spine curve of E_i just before a handle, and its image winding around
  // the handle that moved past the i punctures
  h.obstruction = [](const FNStructure&, long i, int) -> std::optional<CurvePair> {
    if (i < 0 || i % 4 != 0) return std::nullopt;
    CurvePath src = CurvePath::symbolic_cuff("e" + std::to_string(i) + ":cuff", i, 1.0);
    CurvePath img;
    img.id = "h(e" + std::to_string(i) + ":cuff)";
    img.index = i;
    img.bulk.push_back({1.0, 2.0 * static_cast<double>(i + 1), "i"});
    return CurvePair{src, img};
  };
  return h;
}

std::vector<FixtureCase> corpus() {
  std::vector<FixtureCase> out;
  const auto unit_ladder = geometry::unit_structure(ladder());

  auto ladder_shift = certify::shift("z", 1);
  ladder_shift.along = BifluteParams::uniform(0, 1, 1);
  out.push_back({"ese1-unit", "example", unit_ladder, ladder_shift, 8});
  out.push_back({"ese1-x2", "example", ladder_x2(), ladder_shift, 8});

  auto sparse_shift = ladder_shift;
  sparse_shift.obstruction = certify::enclosing_family("z", 1);
  out.push_back({"ese2-sparse", "example", sparse_ladder(), sparse_shift, 6});
  auto handle_shift = certify::shift("z", 2);
  handle_shift.along = BifluteParams::uniform(0, 1, 2);
  out.push_back({"ese2-enclosed", "example", enclosed_ladder(), handle_shift, 6});

  out.push_back({"pa-declared", "example", unit_ladder,
                 certify::declared("psi", [](long n) { return std::exp(std::fabs(static_cast<double>(n))); }, "exp"),
                 8});

  auto puncture_shift = certify::shift("z", 1);
  puncture_shift.obstruction = certify::enclosing_family("z", 1);
  out.push_back({"ese3-planar", "example", sparse_flute(), puncture_shift, 6});

  const auto ends = geometry::unit_structure(accumulated_ends());
  out.push_back({"example4-h", "example", ends, end_shift_product(), 8});
  out.push_back({"example4-h02", "example", ends, end_shift(0), 8});
  out.push_back({"example4-h13", "example", ends, end_shift(1), 8});
  out.push_back({"example4-h46", "example", ends, end_shift(4), 14});

  auto biflute012 = geometry::unit_structure(construct::biflute(BifluteParams::uniform(0, 1, 2)));
  out.push_back({"biflute-shift", "example", biflute012, handle_shift, 8});

  out.push_back({"multitwist-unit", "computed", unit_ladder,
                 certify::multitwist("T", {{"spine", geometry::spine_index("z"), LengthRule::constant(1)}}), 8});
  out.push_back({"multitwist-linear", "computed", unit_ladder,
                 certify::multitwist("T", {{"spine", geometry::spine_index("z"), LengthRule::parse("i")}}), 8});
  out.push_back({"identity", "sanity", unit_ladder, certify::identity_map(), 8});

  auto re = construct::build_re_system(ordinal::ClosedSetEncoding::parse("node a genus\nnode b genus\n"), {}, 6);
  if (re.witnesses.empty()) throw Error(ErrorKind::NoWitness, "two genus ends gave no witness");
  out.push_back({"tree-swap", "example", geometry::unit_structure(re.model.scheme),
                 certify::end_swap(re.witnesses.front()), 6});
  return out;
}

}  // namespace pw::fixtures
