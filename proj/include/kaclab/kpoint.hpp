// Compactly supported test functions, the k-point linear statistic over
// configurations, factorial moments, and Monte Carlo aggregation.

#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "kaclab/kacsim.hpp"

namespace kaclab::kpoint {

struct Bump {
    std::complex<double> center;
    double radius;
};

/// Product bump Phi(z_1..z_k) = prod_j max(0, 1 - |z_j - c_j|^2 / r_j^2)^2.
/// Continuous, 0 <= Phi <= 1, supported in the product of the closed disks.
struct TestFunction {
    int k = 0;
    std::vector<Bump> factors;
    std::string id;

    double eval_factor(int j, std::complex<double> z) const {
        const Bump& b = factors[static_cast<std::size_t>(j)];
        double t = 1.0 - std::norm(z - b.center) / (b.radius * b.radius);
        return (t > 0.0) ? t * t : 0.0;
    }

    double eval(const std::vector<std::complex<double>>& tuple) const {
        double prod = 1.0;
        for (int j = 0; j < k; ++j) {
            prod *= eval_factor(j, tuple[static_cast<std::size_t>(j)]);
            if (prod == 0.0) return 0.0;
        }
        return prod;
    }
};

// The frozen battery (see battery_version): k in {1, 2, 3}, all supports
// inside the disk of radius window_R (which must be >= 4).
std::vector<TestFunction> phi_battery(int k, double window_R);

const char* battery_version();

// JSON descriptor of a battery, shipped next to result files.
std::string battery_descriptor_json(const std::vector<TestFunction>& battery);

// sum over ordered k-tuples of pairwise-distinct configuration slots of
// Phi(tuple). Requires every factor support to sit inside the configuration
// window. Points are distinct as slots: repeated values still form tuples.
double t_phi(const kacsim::PointConfiguration& config, const TestFunction& phi);

// Z (Z-1) ... (Z-k+1) with Z = disk_count(config, R).
long long factorial_moment(const kacsim::PointConfiguration& config, int k, double R);

struct CorrelationEstimate {
    int k = 0;
    std::string phi_id;
    std::string law_id;  // coefficient law, or "GAF" for the baseline
    int n = 0;           // degree; 0 for the GAF baseline
    double mean = 0.0;
    double stderr_ = 0.0;
    long long trials = 0;
};

// Mean and standard error of t_phi across configurations, aggregated in
// input order. Requires at least two configurations.
CorrelationEstimate estimate(const std::vector<kacsim::PointConfiguration>& configs,
                             const TestFunction& phi);

// Same aggregation from precomputed per-trial values (the experiment runner
// computes t_phi inside its workers and reduces sequentially).
CorrelationEstimate estimate_from_values(const std::vector<double>& values);

// Generic ordered-tuple enumerator used by t_phi and by the sharp-indicator
// cross-checks in the tests. Calls fn on every ordered k-tuple of distinct
// slots drawn from the candidate index lists.
template <typename Fn>
double sum_over_distinct_tuples(const std::vector<std::complex<double>>& points,
                                const std::vector<std::vector<int>>& candidates,
                                Fn&& fn) {
    int k = static_cast<int>(candidates.size());
    std::vector<int> chosen(static_cast<std::size_t>(k), -1);
    std::vector<std::complex<double>> tuple(static_cast<std::size_t>(k));
    double total = 0.0;

    auto recurse = [&](auto&& self, int depth) -> void {
        if (depth == k) {
            total += fn(tuple);
            return;
        }
        for (int idx : candidates[static_cast<std::size_t>(depth)]) {
            bool taken = false;
            for (int d = 0; d < depth; ++d) {
                if (chosen[static_cast<std::size_t>(d)] == idx) {
                    taken = true;
                    break;
                }
            }
            if (taken) continue;
            chosen[static_cast<std::size_t>(depth)] = idx;
            tuple[static_cast<std::size_t>(depth)] = points[static_cast<std::size_t>(idx)];
            self(self, depth + 1);
        }
        chosen[static_cast<std::size_t>(depth)] = -1;
    };
    recurse(recurse, 0);
    return total;
}

}  // namespace kaclab::kpoint
