#include "kaclab/gaf.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "kaclab/polyroots.hpp"

namespace kaclab::gaf {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = 3.14159265358979323846264338328;
constexpr double kTwoPi = 6.28318530717958647692528676656;

}  // namespace

namespace detail {

std::complex<double> im_series(int m, std::complex<double> s) {
    // sum_j s^j / (j! (m+j+1)); next-term ratio s (m+j) / (j (m+j+1)).
    cplx term = 1.0 / (m + 1.0);
    cplx sum = term;
    for (int j = 1; j < 400; ++j) {
        term *= s * (static_cast<double>(m + j) /
                     (static_cast<double>(j) * static_cast<double>(m + j + 1)));
        sum += term;
        if (std::abs(term) < 1e-18 * (std::abs(sum) + 1e-300)) break;
    }
    return sum;
}

std::complex<double> im_recurrence(int m, std::complex<double> s) {
    cplx es = std::exp(s);
    cplx im = (es - 1.0) / s;
    for (int j = 1; j <= m; ++j) {
        im = (es - static_cast<double>(j) * im) / s;
    }
    return im;
}

std::complex<double> permanent(const Eigen::MatrixXcd& a) {
    int n = static_cast<int>(a.rows());
    if (n != a.cols()) throw std::invalid_argument("permanent: square matrix required");
    if (n == 0) return 1.0;
    if (n > 30) throw std::invalid_argument("permanent: matrix too large");

    std::vector<cplx> rowsum(static_cast<std::size_t>(n), cplx(0.0, 0.0));
    cplx total = 0.0;
    std::uint32_t prev_gray = 0;
    const std::uint32_t limit = 1u << n;
    for (std::uint32_t idx = 1; idx < limit; ++idx) {
        std::uint32_t gray = idx ^ (idx >> 1);
        std::uint32_t diff = gray ^ prev_gray;
        int j = std::countr_zero(diff);
        if (gray & diff) {
            for (int i = 0; i < n; ++i) rowsum[static_cast<std::size_t>(i)] += a(i, j);
        } else {
            for (int i = 0; i < n; ++i) rowsum[static_cast<std::size_t>(i)] -= a(i, j);
        }
        prev_gray = gray;
        cplx prod = 1.0;
        for (int i = 0; i < n; ++i) prod *= rowsum[static_cast<std::size_t>(i)];
        int bits = std::popcount(gray);
        total += ((n - bits) % 2 == 0) ? prod : -prod;
    }
    return total;
}

}  // namespace detail

std::complex<double> kernel_moment(int m, std::complex<double> s) {
    if (m < 0) throw std::invalid_argument("kernel_moment: order must be >= 0");
    return (std::abs(s) < 1.0) ? detail::im_series(m, s) : detail::im_recurrence(m, s);
}

std::complex<double> kernel(std::complex<double> z, std::complex<double> w) {
    return kernel_moment(0, z + std::conj(w));
}

std::complex<double> kernel_deriv(int a, int b, std::complex<double> z,
                                  std::complex<double> w) {
    if (a < 0 || b < 0) throw std::invalid_argument("kernel_deriv: negative order");
    if (a + b > 4) throw std::invalid_argument("kernel_deriv: order cap a+b <= 4 exceeded");
    return kernel_moment(a + b, z + std::conj(w));
}

double intensity1(std::complex<double> z) {
    double s = 2.0 * z.real();
    double i0, i1, i2;
    if (std::abs(s) < 1.0) {
        i0 = detail::im_series(0, s).real();
        i1 = detail::im_series(1, s).real();
        i2 = detail::im_series(2, s).real();
    } else if (s < 30.0) {
        double es = std::exp(s);
        i0 = (es - 1.0) / s;
        i1 = (es - i0) / s;
        i2 = (es - 2.0 * i1) / s;
    } else {
        // Scaled moments j_m = I_m e^{-s}; the common e^s factor cancels in
        // the intensity ratio, avoiding overflow for large Re z.
        double ems = std::exp(-s);
        i0 = (1.0 - ems) / s;
        i1 = (1.0 - i0) / s;
        i2 = (1.0 - 2.0 * i1) / s;
    }
    return (i2 * i0 - i1 * i1) / (kPi * i0 * i0);
}

namespace {

// Gauss-Legendre nodes/weights on [-1, 1], cached per order.
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n) {
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
    int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = t;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            double step = p1 / dp;
            t -= step;
            if (std::abs(step) < 1e-15) break;
        }
        x[static_cast<std::size_t>(i)] = -t;
        x[static_cast<std::size_t>(n - 1 - i)] = t;
        double ww = 2.0 / ((1.0 - t * t) * dp * dp);
        w[static_cast<std::size_t>(i)] = ww;
        w[static_cast<std::size_t>(n - 1 - i)] = ww;
    }
    return cache.emplace(n, std::make_pair(std::move(x), std::move(w))).first->second;
}

}  // namespace

namespace detail {

double intensity_integral_polar(double R, int radial_nodes, int angular_nodes) {
    const auto& [xr, wr] = gauss_legendre(radial_nodes);
    const auto& [xt, wt] = gauss_legendre(angular_nodes);
    double total = 0.0;
    for (int a = 0; a < angular_nodes; ++a) {
        double theta = kPi * (xt[static_cast<std::size_t>(a)] + 1.0);  // [0, 2pi]
        double ct = std::cos(theta);
        double inner = 0.0;
        for (int r = 0; r < radial_nodes; ++r) {
            double rad = 0.5 * R * (xr[static_cast<std::size_t>(r)] + 1.0);  // [0, R]
            inner += wr[static_cast<std::size_t>(r)] * rad * intensity1(cplx(rad * ct, 0.0));
        }
        total += wt[static_cast<std::size_t>(a)] * inner;
    }
    // Jacobians: dr = (R/2) dx, dtheta = pi dx.
    return total * 0.5 * R * kPi;
}

double intensity_integral_chord(double R, int nodes) {
    // Area integral reduced over x = Re z: int_{-R}^{R} rho1(x) 2 sqrt(R^2-x^2) dx,
    // smoothed by x = R sin(phi).
    const auto& [xs, ws] = gauss_legendre(nodes);
    double total = 0.0;
    for (int i = 0; i < nodes; ++i) {
        double phi = 0.5 * kPi * xs[static_cast<std::size_t>(i)];  // [-pi/2, pi/2]
        double c = std::cos(phi);
        total += ws[static_cast<std::size_t>(i)] * intensity1(cplx(R * std::sin(phi), 0.0)) * c * c;
    }
    return total * 2.0 * R * R * 0.5 * kPi;
}

}  // namespace detail

double intensity_integral(double R) {
    if (!(R > 0.0)) throw std::invalid_argument("intensity_integral: R must be positive");
    int nr = 24, nt = 48;
    double prev = detail::intensity_integral_polar(R, nr, nt);
    for (int level = 0; level < 7; ++level) {
        nr *= 2;
        nt *= 2;
        double cur = detail::intensity_integral_polar(R, nr, nt);
        if (std::abs(cur - prev) <= 1e-9) return cur;
        prev = cur;
    }
    return prev;
}

LegendreMoments legendre_moments(int N, int M) {
    if (N < 0 || M < 0 || N > M) {
        throw std::invalid_argument("legendre_moments: need 0 <= N <= M");
    }
    using boost::multiprecision::cpp_rational;

    LegendreMoments out;
    out.N = N;
    out.M = M;
    out.value.assign(static_cast<std::size_t>(N + 1) * (M + 1), 0.0);

    for (int k = 0; k <= N; ++k) {
        // r(k, m) = (m!)^2 / ((m-k)! (m+k+1)!), nonzero from m = k on;
        // advance with r(k, m+1) = r(k, m) (m+1)^2 / ((m+1-k)(m+k+2)).
        cpp_rational num = 1, den = 1;
        for (int j = 1; j <= k; ++j) num *= j;
        num *= num;
        for (int j = 1; j <= 2 * k + 1; ++j) den *= j;
        cpp_rational r = num / den;
        double scale = std::sqrt(2.0 * k + 1.0);
        for (int m = k; m <= M; ++m) {
            out.value[static_cast<std::size_t>(k) * (M + 1) + static_cast<std::size_t>(m)] =
                scale * r.convert_to<double>();
            r *= cpp_rational(static_cast<long long>(m + 1) * (m + 1),
                              static_cast<long long>(m + 1 - k) * (m + k + 2));
        }
    }
    return out;
}

std::complex<double> kl_basis_value(const LegendreMoments& mu, int k,
                                    std::complex<double> z) {
    if (k < 0 || k > mu.N) throw std::invalid_argument("kl_basis_value: k out of range");
    cplx acc = 0.0, pw = 1.0;  // pw = z^m / m!
    for (int m = 0; m <= mu.M; ++m) {
        if (m >= k) acc += mu(k, m) * pw;
        pw *= z / static_cast<double>(m + 1);
    }
    return acc;
}

namespace {

// Shared per-(r_max, tol) sampling plan: truncation orders, moment table and
// the Parseval deficit certificate (none of which depend on the draw).
struct GafPlan {
    int N = 0;
    int M = 0;
    LegendreMoments mu;
    double tail_bound = 0.0;
    std::vector<double> inv_fact;  // 1/m!
};

long double i0_real_ld(long double s) {
    if (std::abs(s) < 1e-3L) {
        long double term = 1.0L, sum = 0.0L;
        for (int m = 0; m < 30; ++m) {
            sum += term / (m + 1.0L);
            term *= s / (m + 1.0L);
            if (std::abs(term) < 1e-24L) break;
        }
        return sum;
    }
    return std::expm1(s) / s;
}

std::shared_ptr<const GafPlan> plan_for(double r_max, double tol) {
    static std::map<std::pair<double, double>, std::shared_ptr<const GafPlan>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(r_max, tol);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    if (!(r_max > 0.0)) throw std::invalid_argument("gaf plan: r_max must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("gaf plan: tol must be positive");

    auto plan = std::make_shared<GafPlan>();

    // Taylor degree: each basis function's remainder on |z| <= r_max is
    // bounded by sum_{m > M} r^m / m! (the moments are at most 1). The
    // Parseval certificate sees this error amplified by 2 |phi_k| ~ sqrt(K),
    // summed over the truncation order, so the remainder targets a small
    // fraction of tol on that scale.
    double k_rr = static_cast<double>(i0_real_ld(2.0L * static_cast<long double>(r_max)));
    double rem_target = std::max(tol / (20.0 * std::sqrt(257.0 * k_rr)), 1e-280);
    int M = static_cast<int>(std::ceil(3.0 * r_max)) + 8;
    for (;; ++M) {
        double tail = 0.0;
        double term = std::exp((M + 1) * std::log(r_max) - std::lgamma(M + 2.0));
        for (int m = M + 1; m < M + 200; ++m) {
            tail += term;
            term *= r_max / (m + 1.0);
            if (term < tail * 1e-6 + 1e-300) break;
        }
        if (tail <= rem_target) break;
        if (M > 4000) throw std::runtime_error("gaf plan: Taylor degree exploded");
    }
    plan->M = M;

    constexpr int kTruncCap = 256;
    int basis_rows = std::min(kTruncCap, M);
    plan->mu = legendre_moments(basis_rows, M);

    // Parseval deficit on |z| = r_max, long double accumulation; the deficit
    // is largest on the positive real axis but the whole circle is scanned.
    const int kAngles = 64;
    std::vector<long double> deficit(kAngles);
    std::vector<std::complex<long double>> zs(kAngles);
    for (int a = 0; a < kAngles; ++a) {
        long double th = kTwoPi * a / kAngles;
        zs[static_cast<std::size_t>(a)] = {r_max * std::cos(th), r_max * std::sin(th)};
        deficit[static_cast<std::size_t>(a)] =
            i0_real_ld(2.0L * zs[static_cast<std::size_t>(a)].real());
    }

    int chosen = -1;
    for (int k = 0; k <= basis_rows; ++k) {
        long double worst = 0.0L;
        for (int a = 0; a < kAngles; ++a) {
            std::complex<long double> acc = 0.0L, pw = 1.0L;
            for (int m = 0; m <= M; ++m) {
                if (m >= k) acc += static_cast<long double>(plan->mu(k, m)) * pw;
                pw *= zs[static_cast<std::size_t>(a)] / static_cast<long double>(m + 1);
            }
            deficit[static_cast<std::size_t>(a)] -= std::norm(acc);
            worst = std::max(worst, deficit[static_cast<std::size_t>(a)]);
        }
        if (worst <= static_cast<long double>(tol)) {
            chosen = k;
            plan->tail_bound = std::max(0.0, static_cast<double>(worst));
            break;
        }
    }
    if (chosen < 0) {
        throw std::runtime_error(
            "gaf plan: Parseval tolerance unattainable within truncation cap 256");
    }
    plan->N = chosen;

    plan->inv_fact.resize(static_cast<std::size_t>(M + 1));
    double f = 1.0;
    for (int m = 0; m <= M; ++m) {
        if (m > 0) f /= m;
        plan->inv_fact[static_cast<std::size_t>(m)] = f;
    }

    cache.emplace(key, plan);
    return plan;
}

}  // namespace

GafSample gaf_from_kl(std::vector<std::complex<double>> xi, double r_max, double tol) {
    auto plan = plan_for(r_max, tol);
    if (static_cast<int>(xi.size()) > plan->N + 1) {
        throw std::invalid_argument("gaf_from_kl: more KL coefficients than the truncation order");
    }
    xi.resize(static_cast<std::size_t>(plan->N) + 1, cplx(0.0, 0.0));

    GafSample s;
    s.trunc_N = plan->N;
    s.taylor_M = plan->M;
    s.tail_bound = plan->tail_bound;
    s.r_max = r_max;
    s.tol = tol;
    s.taylor_coeffs.assign(static_cast<std::size_t>(plan->M) + 1, cplx(0.0, 0.0));
    for (int m = 0; m <= plan->M; ++m) {
        cplx acc = 0.0;
        int kmax = std::min(m, plan->N);
        for (int k = 0; k <= kmax; ++k) {
            acc += xi[static_cast<std::size_t>(k)] * plan->mu(k, m);
        }
        s.taylor_coeffs[static_cast<std::size_t>(m)] =
            acc * plan->inv_fact[static_cast<std::size_t>(m)];
    }
    s.kl_coeffs = std::move(xi);
    return s;
}

GafSample sample_gaf(coeffs::RngStream& stream, double r_max, double tol) {
    auto plan = plan_for(r_max, tol);
    std::vector<cplx> xi(static_cast<std::size_t>(plan->N) + 1);
    for (auto& x : xi) x = stream.next_complex_normal();
    return gaf_from_kl(std::move(xi), r_max, tol);
}

ZeroExtraction gaf_zeros(const GafSample& sample, double R) {
    if (R > sample.r_max + 1e-12) {
        throw std::invalid_argument("gaf_zeros: R exceeds the sampling window r_max");
    }
    ZeroExtraction out;
    out.config.window_R = R;

    polyroots::Polynomial p(sample.taylor_coeffs);
    polyroots::RootReport rr = polyroots::aberth_roots(p);
    if (!rr.converged) return out;

    bool resid_ok = true;
    for (const auto& root : rr.roots) {
        if (std::abs(root) > R) continue;
        out.config.points.push_back(root);
        polyroots::HornerResult h = polyroots::horner_eval(p, root);
        if (std::abs(h.value) > 1e-8 * h.magnitude_scale) resid_ok = false;
    }
    out.roots_ok = resid_ok;

    // Argument-principle certificate. The trapezoid count is exponentially
    // accurate only when no root sits near the contour, so the contour radius
    // is nudged inside a +-6% band to clear the claimed roots.
    const int kNodes = 4096;
    double delta = 12.0 * R / kNodes;
    double spacing = R / 256.0;
    double chosen = R, chosen_clearance = -1.0;
    for (int step = 0; step <= 16; ++step) {
        for (int sign = 0; sign < (step == 0 ? 1 : 2); ++sign) {
            double rc = R + (sign == 0 ? step : -step) * spacing;
            if (rc <= spacing) continue;
            double clearance = std::numeric_limits<double>::max();
            for (const auto& root : rr.roots) {
                clearance = std::min(clearance, std::abs(std::abs(root) - rc));
            }
            if (clearance > chosen_clearance) {
                chosen_clearance = clearance;
                chosen = rc;
            }
            if (clearance >= delta) {
                step = 17;  // good enough, stop scanning
                break;
            }
        }
    }

    cplx acc = 0.0;
    for (int t = 0; t < kNodes; ++t) {
        cplx zt = std::polar(chosen, kTwoPi * t / kNodes);
        polyroots::HornerResult h = polyroots::horner_eval(p, zt);
        acc += zt * h.derivative / h.value;
    }
    out.contour_radius = chosen;
    out.contour_integral = acc.real() / kNodes;
    out.contour_count = static_cast<int>(std::lround(out.contour_integral));
    out.extracted_in_contour = 0;
    for (const auto& root : rr.roots) {
        if (std::abs(root) <= chosen) ++out.extracted_in_contour;
    }
    out.count_verified = (std::abs(out.contour_integral - out.contour_count) <= 0.25) &&
                         (out.contour_count == out.extracted_in_contour) &&
                         (chosen_clearance >= 1e-3);
    return out;
}

double rho_k(const std::vector<std::complex<double>>& points) {
    int k = static_cast<int>(points.size());
    if (k < 1 || k > 8) throw std::invalid_argument("rho_k: k must lie in 1..8");
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            if (std::abs(points[static_cast<std::size_t>(i)] - points[static_cast<std::size_t>(j)]) < 1e-6) {
                throw std::invalid_argument("rho_k: points closer than the 1e-6 separation floor");
            }
        }
    }

    Eigen::MatrixXcd a(k, k), b(k, k), c(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            cplx s = points[static_cast<std::size_t>(i)] + std::conj(points[static_cast<std::size_t>(j)]);
            a(i, j) = kernel_moment(0, s);
            b(i, j) = kernel_moment(1, s);
            c(i, j) = kernel_moment(2, s);
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
    double trace = a.trace().real();
    if (es.eigenvalues().minCoeff() < 1e-12 * trace) {
        throw std::runtime_error("rho_k: value matrix numerically singular (points too close)");
    }

    Eigen::LLT<Eigen::MatrixXcd> llt(a);
    Eigen::MatrixXcd q = c - b.adjoint() * llt.solve(b);
    q = (0.5 * (q + q.adjoint())).eval();

    double det_a = 1.0;
    for (int i = 0; i < k; ++i) det_a *= es.eigenvalues()(i);

    double val = detail::permanent(q).real() / (std::pow(kPi, k) * det_a);
    return std::max(val, 0.0);
}

Eigen::MatrixXd re_g_covariance(const std::vector<double>& phis) {
    int d = static_cast<int>(phis.size());
    for (int j = 1; j < d; ++j) {
        if (!(phis[static_cast<std::size_t>(j)] > phis[static_cast<std::size_t>(j - 1)])) {
            throw std::invalid_argument("re_g_covariance: phis must be strictly increasing");
        }
    }
    Eigen::MatrixXd sigma(d, d);
    for (int j = 0; j < d; ++j) {
        for (int l = 0; l < d; ++l) {
            if (j == l) {
                sigma(j, l) = 0.5;
            } else {
                cplx kv = kernel(cplx(0.0, phis[static_cast<std::size_t>(j)]),
                                 cplx(0.0, phis[static_cast<std::size_t>(l)]));
                sigma(j, l) = 0.5 * kv.real();
            }
        }
    }
    return sigma;
}

}  // namespace kaclab::gaf
