#pragma once

#include <string>
#include <vector>

#include "pantswork/certify.hpp"

namespace pw::fixtures {

using certify::MappingScheme;
using geometry::FNStructure;

/// Bi-infinite ladder: z:i with a handle z:i/h:0 at every i.
graph::PantsScheme ladder();
/// Ladder lengths: spine curve gamma_i has length e^i for odd i.
FNStructure ladder_x2();
/// Ladder whose spine curve between z:i and z:(i+1) stands for a chain of
/// floor(e^(e^|i|)) once-cusped pants.
FNStructure sparse_ladder();
/// Handles at even positions; the odd spine pants carry the curve around the
/// punctures of their gap as a free boundary.
FNStructure enclosed_ladder();
/// Bi-infinite flute with a cusp on every spine pants; for i >= 0 the curve
/// between z:i and z:(i+1) hides a chain of floor(e^(e^(i+1))) pants.
FNStructure sparse_flute();

/// Core flute c:k ending in a cusp; c:2m carries the genus end E_m (spine
/// e<m>:j, handle every m+1 pants, cusps between), c:(2m+1) a cusp.
graph::PantsScheme accumulated_ends();
/// Handle shift between E_m and E_(m+2).
MappingScheme end_shift(int m);
/// The product of end_shift(m) over m = 0 mod 4, whose supports are disjoint.
MappingScheme end_shift_product();

struct FixtureCase {
  std::string name;
  std::string provenance;
  FNStructure x;
  MappingScheme f;
  int depth = 8;
};

/// Every fixture of the corpus, in a fixed order.
std::vector<FixtureCase> corpus();

}  // namespace pw::fixtures
