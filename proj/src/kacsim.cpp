#include "kaclab/kacsim.hpp"

#include <cmath>
#include <stdexcept>

namespace kaclab::kacsim {

namespace {
using cplx = std::complex<double>;
constexpr double kPi = 3.14159265358979323846264338328;
}  // namespace

LocalFrame::LocalFrame(double theta_, int n_) : theta(theta_), n(n_) {
    if (!(theta > 0.0 && theta < kPi)) {
        throw std::invalid_argument("LocalFrame: theta must lie strictly in (0, pi)");
    }
    if (n < 1) throw std::invalid_argument("LocalFrame: n must be >= 1");
    zeta0 = std::polar(1.0, theta);
}

polyroots::Polynomial sample_kac(const coeffs::CoefficientLaw& law,
                                 const LocalFrame& frame,
                                 coeffs::RngStream& stream,
                                 long long* resamples) {
    for (;;) {
        auto cs = coeffs::sample_coeffs(law, frame.n, stream);
        if (cs.back() != cplx(0.0, 0.0)) {
            return polyroots::Polynomial(std::move(cs));
        }
        if (resamples) ++*resamples;
    }
}

std::complex<double> eval_Fn(const polyroots::Polynomial& p, const LocalFrame& frame,
                             std::complex<double> z) {
    cplx arg = frame.zeta0 * (1.0 + z / static_cast<double>(frame.n));
    polyroots::HornerResult h = polyroots::horner_eval(p, arg);
    return h.value / std::sqrt(static_cast<double>(frame.n));
}

double eval_Fn_scale(const polyroots::Polynomial& p, const LocalFrame& frame,
                     std::complex<double> z) {
    cplx arg = frame.zeta0 * (1.0 + z / static_cast<double>(frame.n));
    polyroots::HornerResult h = polyroots::horner_eval(p, arg);
    return h.magnitude_scale / std::sqrt(static_cast<double>(frame.n));
}

PointConfiguration local_roots(const polyroots::RootReport& report,
                               const LocalFrame& frame, double R) {
    if (!report.converged) {
        throw std::invalid_argument("local_roots: root report did not converge");
    }
    PointConfiguration config;
    config.window_R = R;
    double n = static_cast<double>(frame.n);
    for (const auto& alpha : report.roots) {
        cplx w = n * (alpha / frame.zeta0 - 1.0);
        if (std::abs(w) <= R) config.points.push_back(w);
    }
    return config;
}

int disk_count(const PointConfiguration& config, double R) {
    if (R > config.window_R) {
        throw std::invalid_argument("disk_count: R exceeds the configuration window");
    }
    int count = 0;
    for (const auto& w : config.points) {
        if (std::abs(w) <= R) ++count;
    }
    return count;
}

std::complex<double> geometric_sum(std::complex<double> ratio, int n) {
    if (std::abs(1.0 - ratio) < 1e-6) {
        cplx sum = 0.0, pw = 1.0;
        for (int k = 0; k <= n; ++k) {
            sum += pw;
            pw *= ratio;
        }
        return sum;
    }
    return (std::pow(ratio, n + 1) - 1.0) / (ratio - 1.0);
}

FnCov fn_cov(const LocalFrame& frame, const coeffs::CoefficientLaw& law,
             std::complex<double> z, std::complex<double> w) {
    double n = static_cast<double>(frame.n);
    cplx psi_conj = (1.0 + z / n) * (1.0 + std::conj(w) / n);
    cplx psi = (1.0 + z / n) * (1.0 + w / n);
    cplx zeta2 = frame.zeta0 * frame.zeta0;
    FnCov out;
    out.cov = geometric_sum(psi_conj, frame.n) / n;
    out.pseudo_cov = law.pseudo_moment * geometric_sum(zeta2 * psi, frame.n) / n;
    return out;
}

}  // namespace kaclab::kacsim
