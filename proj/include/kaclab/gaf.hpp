// The limiting Gaussian analytic function with kernel (e^{z+conj(w)} - 1)/(z+conj(w)):
// exact kernel/derivative evaluation, Kac-Rice k-point intensities, sampling
// through a Karhunen-Loeve expansion in the shifted-Legendre basis of L^2[0,1],
// and certified zero extraction.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "kaclab/kacsim.hpp"
#include "kaclab/rng.hpp"

namespace kaclab::gaf {

// K(z, w) = int_0^1 e^{(z + conj(w)) t} dt, with K = 1 at the removable
// singularity z + conj(w) = 0.
std::complex<double> kernel(std::complex<double> z, std::complex<double> w);

// d^a/dz^a d^b/dconj(w)^b K(z, w) = int_0^1 t^{a+b} e^{(z+conj(w))t} dt.
// Orders capped at a + b <= 4.
std::complex<double> kernel_deriv(int a, int b, std::complex<double> z,
                                  std::complex<double> w);

// I_m(s) = int_0^1 t^m e^{st} dt; series branch for |s| < 1, forward
// recurrence otherwise.
std::complex<double> kernel_moment(int m, std::complex<double> s);

// First intensity of the zero set: (1/pi) (I2 I0 - I1^2) / I0^2 at s = 2 Re z.
double intensity1(std::complex<double> z);

// k-point intensity via the Gaussian zero-ensemble formula
// per(C - B* A^{-1} B) / (pi^k det A); k <= 8, points pairwise separated by
// at least 1e-6.
double rho_k(const std::vector<std::complex<double>>& points);

// Expected zero count in the closed disk of radius R (integral of the first
// intensity), tensor Gauss-Legendre in polar coordinates with node doubling
// to absolute accuracy 1e-8.
double intensity_integral(double R);

/// mu(k, m) = int_0^1 t^m p_k(t) dt for the orthonormal shifted Legendre
/// basis p_k on [0,1]; mu(k, m) = 0 for m < k.
struct LegendreMoments {
    int N = 0;  // basis order (rows 0..N)
    int M = 0;  // monomial order (cols 0..M)
    std::vector<double> value;  // row-major (N+1) x (M+1)

    double operator()(int k, int m) const {
        return value[static_cast<std::size_t>(k) * (M + 1) + static_cast<std::size_t>(m)];
    }
};

// Exact rational recurrence, converted to binary64 at the end. Requires N <= M.
LegendreMoments legendre_moments(int N, int M);

// phi_k(z) = sum_m mu(k, m) z^m / m!, the KL basis function.
std::complex<double> kl_basis_value(const LegendreMoments& mu, int k,
                                    std::complex<double> z);

/// One truncated realization of the GAF: KL coefficients, the Taylor
/// coefficients of the truncation, and the Parseval deficit certificate on
/// |z| = r_max.
struct GafSample {
    std::vector<std::complex<double>> kl_coeffs;      // xi_0..xi_N
    std::vector<std::complex<double>> taylor_coeffs;  // c_0..c_M
    int trunc_N = 0;
    int taylor_M = 0;
    double tail_bound = 0.0;
    double r_max = 0.0;
    double tol = 0.0;
};

// Draws xi_k i.i.d. standard complex Gaussian with the truncation order
// chosen adaptively so the Parseval deficit on |z| = r_max is <= tol.
// Throws std::runtime_error if no order <= 256 reaches tol.
GafSample sample_gaf(coeffs::RngStream& stream, double r_max, double tol);

// Same construction from given KL coefficients (zero-padded to the adaptive
// truncation order); the building block behind sample_gaf and the forced
// fixtures in the tests.
GafSample gaf_from_kl(std::vector<std::complex<double>> xi, double r_max, double tol);

struct ZeroExtraction {
    kacsim::PointConfiguration config;  // zeros with |z| <= R
    double contour_radius = 0.0;        // certificate contour actually used
    double contour_integral = 0.0;      // raw argument-principle value
    int contour_count = 0;              // rounded count inside the contour
    int extracted_in_contour = 0;       // solver roots inside the contour
    bool roots_ok = false;              // solve converged, residuals pass
    bool count_verified = false;        // contour count matches extraction

    bool ok() const { return roots_ok && count_verified; }
};

// Zeros of the Taylor truncation inside |z| <= R, residual-validated and
// cross-checked against an argument-principle contour count. Requires
// R <= sample.r_max.
ZeroExtraction gaf_zeros(const GafSample& sample, double R);

// Covariance matrix of (Re G(i phi_1), ..., Re G(i phi_d)) for strictly
// increasing phis: 1/2 on the diagonal, Re K(i phi_j, i phi_j')/2 off it.
Eigen::MatrixXd re_g_covariance(const std::vector<double>& phis);

namespace detail {

// Both evaluation branches of I_m, exposed for the overlap consistency checks.
std::complex<double> im_series(int m, std::complex<double> s);
std::complex<double> im_recurrence(int m, std::complex<double> s);

// Permanent by Ryser's inclusion-exclusion with Gray-code updates, O(2^k k).
std::complex<double> permanent(const Eigen::MatrixXcd& a);

// The two independent quadratures behind intensity_integral.
double intensity_integral_polar(double R, int radial_nodes, int angular_nodes);
double intensity_integral_chord(double R, int nodes);

}  // namespace detail

}  // namespace kaclab::gaf
