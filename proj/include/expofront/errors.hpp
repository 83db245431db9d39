#pragma once

#include <stdexcept>
#include <string>

namespace expofront {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidArgument : Error { using Error::Error; };
struct DimensionError : Error { using Error::Error; };
struct ZeroRelevance : Error { using Error::Error; };

// Expohedron geometry
struct NotOnSumHyperplane : Error { using Error::Error; };
struct NotInPolytope : Error { using Error::Error; };
struct ZeroDirection : Error { using Error::Error; };
struct OffHyperplaneDirection : Error { using Error::Error; };
struct DegenerateSphere : Error { using Error::Error; };
struct CenterProjection : Error { using Error::Error; };

// Decomposition
struct NotBistochastic : Error { using Error::Error; };
struct MatchingNotFound : Error { using Error::Error; };
struct EmptyDistribution : Error { using Error::Error; };

// Convex solvers
struct SolverStalled : Error { using Error::Error; };
struct UtilityInfeasible : Error { using Error::Error; };

// Pareto fronts
struct NonTermination : Error { using Error::Error; };
struct DegenerateArc : Error { using Error::Error; };
struct EmptyFront : Error { using Error::Error; };

// Harness
struct ParseError : Error { using Error::Error; };
struct MissingFeature : Error { using Error::Error; };
struct EmptyDataset : Error { using Error::Error; };
struct InvalidGrid : Error { using Error::Error; };

}  // namespace expofront
