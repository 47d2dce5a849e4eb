#include "kaclab/kpoint.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace kaclab::kpoint {

namespace {
using cplx = std::complex<double>;
}

const char* battery_version() { return "phi-battery/v1"; }

std::vector<TestFunction> phi_battery(int k, double window_R) {
    if (window_R < 4.0) {
        throw std::invalid_argument("phi_battery: window_R must be >= 4 to hold the battery");
    }
    std::vector<TestFunction> out;
    if (k == 1) {
        const cplx centers[3] = {{0.0, 0.0}, {1.0, 1.0}, {-2.0, 0.0}};
        const double radii[3] = {1.0, 1.5, 2.0};
        const char* names[3] = {"k1_origin", "k1_offaxis", "k1_left"};
        for (int i = 0; i < 3; ++i) {
            TestFunction f;
            f.k = 1;
            f.factors = {{centers[i], radii[i]}};
            f.id = names[i];
            out.push_back(std::move(f));
        }
    } else if (k == 2) {
        // Center pairs on the real axis at the stated separations, unit radii.
        const double seps[4] = {0.5, 1.0, 2.0, 4.0};
        const char* names[4] = {"k2_sep05", "k2_sep1", "k2_sep2", "k2_sep4"};
        for (int i = 0; i < 4; ++i) {
            TestFunction f;
            f.k = 2;
            f.factors = {{cplx(-seps[i] / 2.0, 0.0), 1.0}, {cplx(seps[i] / 2.0, 0.0), 1.0}};
            f.id = names[i];
            out.push_back(std::move(f));
        }
    } else if (k == 3) {
        TestFunction f;
        f.k = 3;
        for (int j = 0; j < 3; ++j) {
            double ang = 2.0943951023931954923 * j;  // 2 pi / 3
            f.factors.push_back({std::polar(1.5, ang), 1.0});
        }
        f.id = "k3_triple";
        out.push_back(std::move(f));
    } else {
        throw std::invalid_argument("phi_battery: k must be 1, 2 or 3");
    }
    return out;
}

std::string battery_descriptor_json(const std::vector<TestFunction>& battery) {
    std::string s = "{\"version\":\"";
    s += battery_version();
    s += "\",\"smoothness_exponent\":2,\"members\":[";
    char buf[128];
    for (std::size_t i = 0; i < battery.size(); ++i) {
        const TestFunction& f = battery[i];
        if (i) s += ',';
        s += "{\"id\":\"" + f.id + "\",\"k\":" + std::to_string(f.k) + ",\"factors\":[";
        for (std::size_t j = 0; j < f.factors.size(); ++j) {
            if (j) s += ',';
            std::snprintf(buf, sizeof(buf), "{\"re\":%.17g,\"im\":%.17g,\"radius\":%.17g}",
                          f.factors[j].center.real(), f.factors[j].center.imag(),
                          f.factors[j].radius);
            s += buf;
        }
        s += "]}";
    }
    s += "]}";
    return s;
}

double t_phi(const kacsim::PointConfiguration& config, const TestFunction& phi) {
    for (const auto& b : phi.factors) {
        if (std::abs(b.center) + b.radius > config.window_R + 1e-9) {
            throw std::invalid_argument("t_phi: factor support exceeds the configuration window");
        }
    }

    // Support pruning: only points inside a factor's disk can contribute to
    // that slot.
    std::vector<std::vector<int>> candidates(static_cast<std::size_t>(phi.k));
    for (int j = 0; j < phi.k; ++j) {
        const Bump& b = phi.factors[static_cast<std::size_t>(j)];
        for (int i = 0; i < static_cast<int>(config.points.size()); ++i) {
            if (std::abs(config.points[static_cast<std::size_t>(i)] - b.center) <= b.radius) {
                candidates[static_cast<std::size_t>(j)].push_back(i);
            }
        }
    }
    return sum_over_distinct_tuples(config.points, candidates,
                                    [&](const std::vector<cplx>& tuple) { return phi.eval(tuple); });
}

long long factorial_moment(const kacsim::PointConfiguration& config, int k, double R) {
    if (k < 1) throw std::invalid_argument("factorial_moment: k must be >= 1");
    long long z = kacsim::disk_count(config, R);
    long long prod = 1;
    for (int j = 0; j < k; ++j) {
        long long factor = z - j;
        if (factor <= 0) return 0;
        prod *= factor;
    }
    return prod;
}

CorrelationEstimate estimate_from_values(const std::vector<double>& values) {
    if (values.size() < 2) {
        throw std::invalid_argument("estimate: at least two trials required");
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));

    CorrelationEstimate est;
    est.mean = mean;
    est.stderr_ = sd / std::sqrt(static_cast<double>(values.size()));
    est.trials = static_cast<long long>(values.size());
    return est;
}

CorrelationEstimate estimate(const std::vector<kacsim::PointConfiguration>& configs,
                             const TestFunction& phi) {
    std::vector<double> values;
    values.reserve(configs.size());
    for (const auto& c : configs) values.push_back(t_phi(c, phi));
    CorrelationEstimate est = estimate_from_values(values);
    est.k = phi.k;
    est.phi_id = phi.id;
    return est;
}

}  // namespace kaclab::kpoint
