// Simultaneous root finding for dense complex polynomials.
//
// The workhorse is the Aberth-Ehrlich iteration with per-root convergence
// freezing and a backward-error stopping criterion; a companion-matrix
// eigenvalue solve acts as a small-degree oracle.

#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace kaclab::polyroots {

/// Dense polynomial c0 + c1 z + ... + cn z^n (ascending powers).
struct Polynomial {
    std::vector<std::complex<double>> coeffs;

    Polynomial() = default;
    explicit Polynomial(std::vector<std::complex<double>> c) : coeffs(std::move(c)) {}

    // Index of the last nonzero coefficient; -1 for the zero polynomial.
    int degree() const {
        for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k) {
            if (coeffs[static_cast<std::size_t>(k)] != std::complex<double>(0.0, 0.0)) return k;
        }
        return -1;
    }
};

struct HornerResult {
    std::complex<double> value;
    std::complex<double> derivative;
    double magnitude_scale;  // sum_k |c_k| |z|^k, the backward-error normalizer
};

// Value, derivative and magnitude scale at z in one pass.
// Throws std::overflow_error when the magnitude scale is not finite.
HornerResult horner_eval(const Polynomial& p, std::complex<double> z);

struct AberthOptions {
    double eps_res = 1e-12;   // freeze a root once |p(z)| <= eps_res * scale(z)
    int max_sweeps = 200;
    std::uint64_t init_seed = 0x6B61636C61620001ull;  // initial-guess perturbations
};

struct RootReport {
    std::vector<std::complex<double>> roots;  // length == degree
    std::vector<double> residuals;            // relative backward errors
    int iterations = 0;                       // sweeps executed
    bool converged = false;
};

// All complex roots of p (multiplicity by repetition).
// Requires degree >= 1; throws std::invalid_argument for constant/zero input.
RootReport aberth_roots(const Polynomial& p, const AberthOptions& opts = {});

// Eigenvalues of the companion matrix of the monic normalization of p.
// Guarded at degree <= 512 (dense O(degree^3) path).
std::vector<std::complex<double>> companion_roots(const Polynomial& p);

struct ValidationReport {
    std::vector<double> residuals;     // relative backward error per root
    double max_residual = 0.0;
    bool count_ok = false;             // #roots == degree
    double reconstruction_error = 0.0; // max_k |c_k - chat_k| / max_j |c_j|
};

// Recomputes residuals and expands lead * prod (z - alpha_j) to compare
// against the original coefficients.
ValidationReport validate_roots(const Polynomial& p,
                                const std::vector<std::complex<double>>& roots);

struct MatchResult {
    std::vector<int> permutation;  // a[i] is paired with b[permutation[i]]
    double max_distance = 0.0;
    bool used_fallback = false;    // greedy pairing exceeded tol, ran assignment
};

// Pairs two equal-size multisets of points: greedy nearest neighbor first,
// bottleneck assignment as fallback when the greedy max distance exceeds
// greedy_tol. Used by the oracle-equivalence checks.
MatchResult match_point_multisets(const std::vector<std::complex<double>>& a,
                                  const std::vector<std::complex<double>>& b,
                                  double greedy_tol = 1e-8);

}  // namespace kaclab::polyroots
