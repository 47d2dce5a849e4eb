// Normalized coefficient laws: mean zero, unit second absolute moment.

#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "kaclab/rng.hpp"

namespace kaclab::coeffs {

enum class LawKind {
    GaussianComplex,
    GaussianReal,
    Rademacher,
    UniformReal,
    TwoPoint,
};

/// A coefficient distribution with E[xi] = 0 and E[|xi|^2] = 1.
/// pseudo_moment is the exact E[xi^2] (0 for the complex Gaussian, 1 for the
/// real-valued kinds); fourth_abs_moment is the exact E[|xi|^4], used by the
/// statistical tolerances in the test suites.
struct CoefficientLaw {
    LawKind kind;
    bool is_complex;
    std::complex<double> pseudo_moment;
    double fourth_abs_moment;
    double p = 0.0;   // two-point parameter, unused otherwise
    std::string id;   // canonical name as it appears in configs and CSVs

    std::complex<double> sample(RngStream& stream) const;
};

// Supported names: "gaussian-complex", "gaussian-real", "rademacher",
// "uniform-real", "two-point" (requires p in (0,1)).
// Throws std::invalid_argument on unknown names or bad parameters.
CoefficientLaw make_law(const std::string& kind,
                        std::optional<double> p = std::nullopt);

// Parses the canonical id form, e.g. "rademacher" or "two-point(0.2)".
CoefficientLaw parse_law(const std::string& id);

// xi_0..xi_n i.i.d. from `law`; consumes `stream` deterministically.
std::vector<std::complex<double>> sample_coeffs(const CoefficientLaw& law, int n,
                                                RngStream& stream);

}  // namespace kaclab::coeffs
