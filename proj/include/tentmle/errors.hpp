#pragma once

#include <stdexcept>
#include <string>

namespace tentmle {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Duplicate points, too few points, or points that do not span R^d.
class InvalidConfiguration : public Error {
 public:
  using Error::Error;
};

/// Height vector, weight vector or index list does not match the configuration.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// The lifted upper hull could not be resolved within tolerance.
class HullDegenerate : public Error {
 public:
  using Error::Error;
};

/// Combinatorial enumeration refused because the input exceeds the size limit.
class TooLarge : public Error {
 public:
  using Error::Error;
};

/// Closed form of H requested at arguments that are too close to each other or to zero.
class NearSingular : public Error {
 public:
  using Error::Error;
};

/// A series or iterative evaluation failed to converge within its term budget.
class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

/// Heights are not in the closed secondary cone of the given triangulation.
class ConeViolation : public Error {
 public:
  using Error::Error;
};

/// Heights are not relevant: some lifted point lies strictly below the tent.
class NotRelevant : public Error {
 public:
  using Error::Error;
};

/// Heights do not integrate to one.
class NotUnitMass : public Error {
 public:
  using Error::Error;
};

/// A subdivision is not regular (or not a subdivision of the configuration at all).
class NotRegular : public Error {
 public:
  using Error::Error;
};

/// realize_subdivision exhausted its attempts without a verified weight vector.
class RealizationFailed : public Error {
 public:
  using Error::Error;
};

/// Weights are not positive or do not sum to one.
class InvalidWeights : public Error {
 public:
  using Error::Error;
};

/// The solver stopped before its optimality certificate held.
class NotConverged : public Error {
 public:
  using Error::Error;
};

/// A random point sample violated the configuration invariants.
class DegenerateSample : public Error {
 public:
  using Error::Error;
};

}  // namespace tentmle
