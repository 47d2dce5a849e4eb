#include "kaclab/polyroots.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace kaclab::polyroots {

namespace {

using cplx = std::complex<double>;

std::uint64_t splitmix(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double unit_from(std::uint64_t& s) {
    return static_cast<double>(splitmix(s) >> 11) * 0x1.0p-53;
}

// 1/w without the overflow-hardened library division; iterates stay well
// scaled inside the solver.
template <typename Real>
inline std::complex<Real> fast_inv(std::complex<Real> w) {
    Real d = w.real() * w.real() + w.imag() * w.imag();
    Real r = Real(1) / d;
    return {w.real() * r, -w.imag() * r};
}

// Per-solve evaluation state: coefficients normalized by the largest
// magnitude, plus the reversed coefficients for the exterior (|z| > 1) path.
template <typename Real>
struct SolveStateT {
    using C = std::complex<Real>;
    std::vector<C> c;     // ascending, c[d] != 0
    std::vector<C> crev;  // crev[j] = c[d - j]
    std::vector<Real> ac, acrev;
    int d = 0;

    explicit SolveStateT(const std::vector<cplx>& coeffs) {
        d = static_cast<int>(coeffs.size()) - 1;
        double amax = 0.0;
        for (const auto& ck : coeffs) amax = std::max(amax, std::abs(ck));
        c.resize(coeffs.size());
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            c[k] = C(Real(coeffs[k].real() / amax), Real(coeffs[k].imag() / amax));
        }
        crev.assign(c.rbegin(), c.rend());
        ac.resize(c.size());
        acrev.resize(c.size());
        for (std::size_t k = 0; k < c.size(); ++k) {
            ac[k] = std::abs(c[k]);
            acrev[k] = std::abs(crev[k]);
        }
    }

    // Newton ratio p/p' and relative backward error |p| / sum |c_k||z|^k.
    // The exterior branch evaluates the reversed polynomial at u = 1/z,
    // which keeps every intermediate bounded for any |z|.
    void newton_ratio(C z, C& ratio, Real& resid) const {
        if (std::abs(z) <= Real(1)) {
            C v = c[static_cast<std::size_t>(d)], dv = 0.0;
            for (int k = d - 1; k >= 0; --k) {
                dv = dv * z + v;
                v = v * z + c[static_cast<std::size_t>(k)];
            }
            Real az = std::abs(z), s = 0.0;
            for (int k = d; k >= 0; --k) s = s * az + ac[static_cast<std::size_t>(k)];
            resid = std::abs(v) / s;
            ratio = v * fast_inv(dv);
        } else {
            C u = fast_inv(z);
            C q = crev[static_cast<std::size_t>(d)], dq = 0.0;
            for (int k = d - 1; k >= 0; --k) {
                dq = dq * u + q;
                q = q * u + crev[static_cast<std::size_t>(k)];
            }
            Real au = std::abs(u), s = 0.0;
            for (int k = d; k >= 0; --k) s = s * au + acrev[static_cast<std::size_t>(k)];
            resid = std::abs(q) / s;
            // p'/p = (d - u q'/q) / z
            ratio = z * q * fast_inv(C(Real(d)) * q - u * dq);
        }
        if (!std::isfinite(static_cast<double>(resid))) {
            resid = std::numeric_limits<Real>::infinity();
        }
    }

    Real residual_only(C z) const {
        C ratio;
        Real resid;
        newton_ratio(z, ratio, resid);
        return resid;
    }
};

using SolveState = SolveStateT<double>;

// Guarded Newton polish in 80-bit arithmetic. Near-multiple roots are the
// point: binary64 backward error only locates a double root to ~sqrt(eps),
// while the extended-precision floor brings solver-vs-oracle distances to
// ~1e-9. Steps are kept only while the residual drops.
void polish_extended(const std::vector<cplx>& coeffs, std::vector<cplx>& roots,
                     int max_steps = 8) {
    using ld = long double;
    using cld = std::complex<ld>;
    SolveStateT<ld> st(coeffs);
    for (auto& root : roots) {
        cld z(root.real(), root.imag());
        cld newton;
        ld resid;
        st.newton_ratio(z, newton, resid);
        for (int step = 0; step < max_steps && resid > ld(0); ++step) {
            if (!std::isfinite(static_cast<double>(std::abs(newton)))) break;
            cld candidate = z - newton;
            cld newton_next;
            ld resid_next;
            st.newton_ratio(candidate, newton_next, resid_next);
            if (!(resid_next < resid)) break;
            z = candidate;
            newton = newton_next;
            resid = resid_next;
        }
        root = cplx(static_cast<double>(z.real()), static_cast<double>(z.imag()));
    }
}

}  // namespace

HornerResult horner_eval(const Polynomial& p, std::complex<double> z) {
    if (p.coeffs.empty()) return {0.0, 0.0, 0.0};
    int n = static_cast<int>(p.coeffs.size()) - 1;
    cplx v = p.coeffs[static_cast<std::size_t>(n)];
    cplx dv = 0.0;
    for (int k = n - 1; k >= 0; --k) {
        dv = dv * z + v;
        v = v * z + p.coeffs[static_cast<std::size_t>(k)];
    }
    double az = std::abs(z), s = 0.0;
    for (int k = n; k >= 0; --k) s = s * az + std::abs(p.coeffs[static_cast<std::size_t>(k)]);
    if (!std::isfinite(s)) throw std::overflow_error("horner_eval: magnitude scale overflow");
    return {v, dv, s};
}

RootReport aberth_roots(const Polynomial& p, const AberthOptions& opts) {
    int deg = p.degree();
    if (deg < 0) throw std::invalid_argument("aberth_roots: zero polynomial");
    if (deg < 1) throw std::invalid_argument("aberth_roots: degree must be >= 1");

    // Exact origin roots: strip trailing zero low-order coefficients.
    int low = 0;
    while (p.coeffs[static_cast<std::size_t>(low)] == cplx(0.0, 0.0)) ++low;
    int d = deg - low;

    RootReport report;
    report.roots.assign(static_cast<std::size_t>(low), cplx(0.0, 0.0));
    report.residuals.assign(static_cast<std::size_t>(low), 0.0);
    if (d == 0) {
        report.converged = true;
        return report;
    }

    std::vector<cplx> work(p.coeffs.begin() + low, p.coeffs.begin() + deg + 1);
    SolveState st(work);

    // Equi-angular start circle with a random phase offset and +-10% radius
    // jitter; the base radius is the geometric mean of the root moduli
    // (|c0/cd|^(1/d)), which sits at 1 for Kac-type coefficients.
    std::uint64_t seed = opts.init_seed;
    double r0 = std::pow(std::abs(st.c.front()) / std::abs(st.c.back()), 1.0 / d);
    if (!std::isfinite(r0)) r0 = 1.0;
    r0 = std::clamp(r0, 1e-6, 1e6);
    double two_pi = 6.283185307179586476925286766559;
    double offset = two_pi * unit_from(seed) / d;
    std::vector<cplx> z(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        double rad = r0 * (0.9 + 0.2 * unit_from(seed));
        double ang = two_pi * j / d + offset;
        z[static_cast<std::size_t>(j)] = std::polar(rad, ang);
    }

    std::vector<char> frozen(static_cast<std::size_t>(d), 0);
    int sweeps = 0;
    for (; sweeps < opts.max_sweeps; ++sweeps) {
        int active = 0;
        for (int i = 0; i < d; ++i) {
            if (frozen[static_cast<std::size_t>(i)]) continue;
            cplx zi = z[static_cast<std::size_t>(i)];
            cplx newton;
            double resid;
            st.newton_ratio(zi, newton, resid);
            if (resid <= opts.eps_res) {
                frozen[static_cast<std::size_t>(i)] = 1;
                continue;
            }
            ++active;
            if (!std::isfinite(newton.real()) || !std::isfinite(newton.imag())) {
                // Landed on a critical point; nudge and retry next sweep.
                z[static_cast<std::size_t>(i)] = zi * 1.000000001 + cplx(1e-9, 1e-9);
                continue;
            }
            cplx repulsion = 0.0;
            for (int j = 0; j < d; ++j) {
                if (j == i) continue;
                cplx diff = zi - z[static_cast<std::size_t>(j)];
                if (diff == cplx(0.0, 0.0)) {
                    diff = cplx(1e-12 * (1.0 + std::abs(zi)), 1e-12);
                }
                repulsion += fast_inv(diff);
            }
            cplx denom = cplx(1.0, 0.0) - newton * repulsion;
            cplx step = (std::abs(denom) > 1e-290) ? newton * fast_inv(denom) : newton;
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) {
                z[static_cast<std::size_t>(i)] = zi * 1.000000001 + cplx(1e-9, 1e-9);
                continue;
            }
            // Trust region: wild early steps get clipped to the local scale.
            double smax = 1.0 + std::abs(zi);
            double slen = std::abs(step);
            if (slen > smax) step *= smax / slen;
            z[static_cast<std::size_t>(i)] = zi - step;
        }
        if (active == 0) break;
    }

    report.iterations = sweeps;
    polish_extended(work, z);

    bool all_ok = true;
    for (int i = 0; i < d; ++i) {
        double resid = st.residual_only(z[static_cast<std::size_t>(i)]);
        report.roots.push_back(z[static_cast<std::size_t>(i)]);
        report.residuals.push_back(resid);
        if (!(resid <= opts.eps_res)) all_ok = false;
    }
    report.converged = all_ok;
    return report;
}

std::vector<std::complex<double>> companion_roots(const Polynomial& p) {
    int deg = p.degree();
    if (deg < 1) throw std::invalid_argument("companion_roots: degree must be >= 1");
    if (deg > 512) throw std::invalid_argument("companion_roots: degree guard (<= 512) exceeded");

    cplx lead = p.coeffs[static_cast<std::size_t>(deg)];
    Eigen::MatrixXcd cm = Eigen::MatrixXcd::Zero(deg, deg);
    for (int i = 0; i < deg; ++i) {
        cm(i, deg - 1) = -p.coeffs[static_cast<std::size_t>(i)] / lead;
        if (i + 1 < deg) cm(i + 1, i) = 1.0;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(cm, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("companion_roots: eigenvalue iteration failed");
    }
    std::vector<cplx> roots(static_cast<std::size_t>(deg));
    for (int i = 0; i < deg; ++i) roots[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    std::vector<cplx> monic(p.coeffs.begin(), p.coeffs.begin() + deg + 1);
    polish_extended(monic, roots);
    return roots;
}

ValidationReport validate_roots(const Polynomial& p,
                                const std::vector<std::complex<double>>& roots) {
    ValidationReport rep;
    int deg = p.degree();
    rep.count_ok = (static_cast<int>(roots.size()) == deg);

    for (const auto& alpha : roots) {
        HornerResult h = horner_eval(p, alpha);
        double resid = (h.magnitude_scale > 0.0) ? std::abs(h.value) / h.magnitude_scale : 0.0;
        rep.residuals.push_back(resid);
        rep.max_residual = std::max(rep.max_residual, resid);
    }

    if (deg < 0 || roots.empty()) return rep;

    // Expand lead * prod (z - alpha_j). Interleaving small and large moduli
    // keeps partial-product coefficients from blowing up.
    std::vector<int> order(roots.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(roots[static_cast<std::size_t>(a)]) < std::abs(roots[static_cast<std::size_t>(b)]);
    });
    std::vector<int> interleaved;
    interleaved.reserve(order.size());
    std::size_t lo = 0, hi = order.size();
    while (lo < hi) {
        interleaved.push_back(order[--hi]);
        if (lo < hi) interleaved.push_back(order[lo++]);
    }

    std::vector<cplx> expanded{p.coeffs[static_cast<std::size_t>(deg)]};
    for (int idx : interleaved) {
        cplx alpha = roots[static_cast<std::size_t>(idx)];
        expanded.push_back(cplx(0.0, 0.0));
        for (std::size_t k = expanded.size() - 1; k > 0; --k) {
            expanded[k] = expanded[k - 1] - alpha * expanded[k];
        }
        expanded[0] *= -alpha;
    }

    double cmax = 0.0;
    for (int k = 0; k <= deg; ++k) cmax = std::max(cmax, std::abs(p.coeffs[static_cast<std::size_t>(k)]));
    double err = 0.0;
    std::size_t m = std::max(expanded.size(), p.coeffs.size());
    for (std::size_t k = 0; k < m; ++k) {
        cplx want = (k < p.coeffs.size()) ? p.coeffs[k] : cplx(0.0, 0.0);
        cplx got = (k < expanded.size()) ? expanded[k] : cplx(0.0, 0.0);
        err = std::max(err, std::abs(want - got));
    }
    rep.reconstruction_error = (cmax > 0.0) ? err / cmax : err;
    return rep;
}

namespace {

bool kuhn_augment(int i, const std::vector<std::vector<int>>& adj,
                  std::vector<int>& match_b, std::vector<char>& visited) {
    for (int j : adj[static_cast<std::size_t>(i)]) {
        if (visited[static_cast<std::size_t>(j)]) continue;
        visited[static_cast<std::size_t>(j)] = 1;
        if (match_b[static_cast<std::size_t>(j)] < 0 ||
            kuhn_augment(match_b[static_cast<std::size_t>(j)], adj, match_b, visited)) {
            match_b[static_cast<std::size_t>(j)] = i;
            return true;
        }
    }
    return false;
}

// Smallest threshold t such that a perfect matching exists using only pairs
// with distance <= t; fills `perm` with that matching.
double bottleneck_assignment(const std::vector<std::vector<double>>& dist,
                             std::vector<int>& perm) {
    int n = static_cast<int>(dist.size());
    std::vector<double> all;
    all.reserve(static_cast<std::size_t>(n) * n);
    for (const auto& row : dist)
        for (double v : row) all.push_back(v);
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());

    auto feasible = [&](double thr, std::vector<int>& match_b) {
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] <= thr)
                    adj[static_cast<std::size_t>(i)].push_back(j);
        match_b.assign(static_cast<std::size_t>(n), -1);
        for (int i = 0; i < n; ++i) {
            std::vector<char> visited(static_cast<std::size_t>(n), 0);
            if (!kuhn_augment(i, adj, match_b, visited)) return false;
        }
        return true;
    };

    std::size_t lo = 0, hi = all.size() - 1;
    std::vector<int> match_b;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        std::vector<int> tmp;
        if (feasible(all[mid], tmp)) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    feasible(all[lo], match_b);
    perm.assign(static_cast<std::size_t>(n), -1);
    for (int j = 0; j < n; ++j)
        if (match_b[static_cast<std::size_t>(j)] >= 0)
            perm[static_cast<std::size_t>(match_b[static_cast<std::size_t>(j)])] = j;
    return all[lo];
}

}  // namespace

MatchResult match_point_multisets(const std::vector<std::complex<double>>& a,
                                  const std::vector<std::complex<double>>& b,
                                  double greedy_tol) {
    if (a.size() != b.size()) throw std::invalid_argument("match_point_multisets: size mismatch");
    MatchResult res;
    int n = static_cast<int>(a.size());
    if (n == 0) return res;

    std::vector<std::vector<double>> dist(static_cast<std::size_t>(n),
                                          std::vector<double>(static_cast<std::size_t>(n)));
    struct Pair { double d; int i, j; };
    std::vector<Pair> pairs;
    pairs.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double dd = std::abs(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(j)]);
            dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = dd;
            pairs.push_back({dd, i, j});
        }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.d < y.d; });

    // Globally greedy: accept pairs in ascending distance order.
    res.permutation.assign(static_cast<std::size_t>(n), -1);
    std::vector<char> used_b(static_cast<std::size_t>(n), 0);
    int placed = 0;
    for (const auto& pr : pairs) {
        if (res.permutation[static_cast<std::size_t>(pr.i)] >= 0 || used_b[static_cast<std::size_t>(pr.j)]) continue;
        res.permutation[static_cast<std::size_t>(pr.i)] = pr.j;
        used_b[static_cast<std::size_t>(pr.j)] = 1;
        res.max_distance = std::max(res.max_distance, pr.d);
        if (++placed == n) break;
    }

    if (res.max_distance > greedy_tol) {
        res.used_fallback = true;
        res.max_distance = bottleneck_assignment(dist, res.permutation);
    }
    return res;
}

}  // namespace kaclab::polyroots
