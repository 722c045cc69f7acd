#pragma once

#include <stdexcept>
#include <string>

namespace novikov {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Input failed validation (bad pair, non-coprime indices, empty terms, ...).
struct ValidationError : Error {
  using Error::Error;
};

/// approximate_angle was handed an angle that is itself magic.
struct MagicAngleError : Error {
  MagicAngleError() : Error("angle is magic") {}
};

/// dirichlet_pair found an exact integer relation between the two bases.
struct CommensurateCollision : Error {
  CommensurateCollision() : Error("commensurate collision") {}
};

/// Grid classification changed non-monotonically along the level sweep.
struct NonMonotoneClassification : Error {
  NonMonotoneClassification() : Error("non-monotone classification") {}
};

/// Periodicity precheck of a sampling window failed.
struct NotPeriodicError : Error {
  NotPeriodicError() : Error("not periodic") {}
};

/// A symmetric potential produced a fat critical interval (under-resolution).
struct IntervalNotDegenerate : Error {
  IntervalNotDegenerate() : Error("interval not degenerate") {}
};

/// Convergence brackets that must overlap do not.
struct BracketsDisjoint : Error {
  BracketsDisjoint() : Error("brackets do not overlap") {}
};

}  // namespace novikov
