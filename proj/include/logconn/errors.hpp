#pragma once

#include <stdexcept>
#include <string>

namespace logconn {

// Base class for every refusal the library can raise. Numerical refusals
// (ClusterAmbiguity, StepFailure, ...) mean "cannot decide at this tolerance"
// and are distinct from wrong input (ValidationFailure, ParseError).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// two raw eigenvalues fall in the ambiguous band (tol, 2*tol): no stable clustering
struct ClusterAmbiguity : Error { using Error::Error; };

// NaN/Inf encountered in an input or produced by an operation (e.g. exp overflow)
struct NonFinite : Error { using Error::Error; };

// (U - I)^n is not negligible: U is not unipotent at this tolerance
struct NotUnipotent : Error { using Error::Error; };

// a matrix that must be invertible is numerically singular
struct Singular : Error { using Error::Error; };

struct NotSemisimple : Error { using Error::Error; };
struct NotRealSemisimple : Error { using Error::Error; };

// chi() applied to an element with forbidden (negative / non-integer) weight support
struct NotInParabolic : Error { using Error::Error; };

// functor_R: log of unipotent part has non-integer-weight components above tol
struct WeightLeak : Error { using Error::Error; };

// poincare_gauge: right side not in the image of (k - ad A0) at a resonant order
struct ResonantObstruction : Error { using Error::Error; };

// poincare_gauge: defining residual cannot meet tol at the requested order
struct TruncationFailure : Error { using Error::Error; };

struct PathThroughSingularity : Error { using Error::Error; };

// adaptive integrator fell below the minimum step size before meeting rtol
struct StepFailure : Error { using Error::Error; };

// a monodromy datum violates one of its defining conditions
struct ValidationFailure : Error { using Error::Error; };

// keyhole loops cannot be made disjoint (radius floor 1e-6)
struct DegenerateGeometry : Error { using Error::Error; };

// malformed input file (cli)
struct ParseError : Error { using Error::Error; };

} // namespace logconn
