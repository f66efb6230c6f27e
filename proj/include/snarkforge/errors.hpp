#pragma once
// Named failure modes of the library contract.  Each precondition violation
// gets its own type so callers (and the CLI exit-code mapping) never have to
// string-match on what().

#include <stdexcept>
#include <string>

namespace snarkforge {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PointNotInTetrahedron : Error { using Error::Error; };
struct NotABasis : Error { using Error::Error; };

struct InvalidMultipole : Error { using Error::Error; };
struct SemiedgeNotFree : Error { using Error::Error; };
struct ArityMismatch : Error { using Error::Error; };
struct PathNotInGraph : Error { using Error::Error; };
struct Acyclic : Error { using Error::Error; };
struct TooLarge : Error { using Error::Error; };
struct MalformedInput : Error { using Error::Error; };

struct NotACover : Error { using Error::Error; };
struct NotAT1Flow : Error { using Error::Error; };
struct TooManyMatchings : Error { using Error::Error; };
struct BudgetExhausted : Error { using Error::Error; };
struct NotBridgeless : Error { using Error::Error; };

struct WeightArityMismatch : Error { using Error::Error; };
struct NotBipartite : Error { using Error::Error; };

struct InvalidTreeSpec : Error { using Error::Error; };
struct NotADecollineator : Error { using Error::Error; };
struct RelationOutsideB : Error { using Error::Error; };
struct FragmentCountMismatch : Error { using Error::Error; };
struct UnsupportedOrder : Error { using Error::Error; };
struct InvalidParts : Error { using Error::Error; };
struct CertificateMismatch : Error { using Error::Error; };

} // namespace snarkforge
