// Kac polynomial sampling and the microscopic frame at a point of the unit
// circle: rescaled evaluation, root rescaling into the local window, disk
// counts, and exact finite-degree second moments.

#pragma once

#include <complex>
#include <vector>

#include "kaclab/coeffs.hpp"
#include "kaclab/polyroots.hpp"

namespace kaclab::kacsim {

/// The observation frame: zeta0 = e^{i theta} on the unit circle, with the
/// 1/n microscopic scale attached. theta must lie strictly inside (0, pi).
struct LocalFrame {
    double theta;
    std::complex<double> zeta0;
    int n;

    LocalFrame(double theta_, int n_);
};

/// Finite multiset of points inside the disk of radius window_R.
struct PointConfiguration {
    std::vector<std::complex<double>> points;
    double window_R = 0.0;
};

// i.i.d. coefficients from `law`, degree exactly frame.n. A sampled zero
// leading coefficient (impossible for the built-in laws) rejects the draw;
// rejected draws are counted into *resamples when provided.
polyroots::Polynomial sample_kac(const coeffs::CoefficientLaw& law,
                                 const LocalFrame& frame,
                                 coeffs::RngStream& stream,
                                 long long* resamples = nullptr);

// F_n(z) = n^{-1/2} p(zeta0 + zeta0 z / n).
std::complex<double> eval_Fn(const polyroots::Polynomial& p, const LocalFrame& frame,
                             std::complex<double> z);

// Backward-error normalizer in the local frame:
// n^{-1/2} sum_k |c_k| |zeta0 + zeta0 z/n|^k.
double eval_Fn_scale(const polyroots::Polynomial& p, const LocalFrame& frame,
                     std::complex<double> z);

// Global roots alpha -> w = n (alpha/zeta0 - 1), keeping |w| <= R.
// Requires report.converged.
PointConfiguration local_roots(const polyroots::RootReport& report,
                               const LocalFrame& frame, double R);

// Number of points with |w| <= R (with multiplicity). Requires R <= window_R.
int disk_count(const PointConfiguration& config, double R);

struct FnCov {
    std::complex<double> cov;         // E[F_n(z) conj(F_n(w))]
    std::complex<double> pseudo_cov;  // E[F_n(z) F_n(w)]
};

// Exact finite-n covariance and pseudo-covariance of F_n via stable
// geometric sums.
FnCov fn_cov(const LocalFrame& frame, const coeffs::CoefficientLaw& law,
             std::complex<double> z, std::complex<double> w);

// sum_{k=0}^{n} ratio^k with the near-cancellation branch: direct summation
// when |1 - ratio| < 1e-6, closed form otherwise.
std::complex<double> geometric_sum(std::complex<double> ratio, int n);

}  // namespace kaclab::kacsim
