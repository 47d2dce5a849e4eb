// Command-line front end: root dumps, GAF zero dumps, intensity tables,
// experiment runs and report regeneration.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "kaclab/coeffs.hpp"
#include "kaclab/gaf.hpp"
#include "kaclab/harness.hpp"
#include "kaclab/kacsim.hpp"
#include "kaclab/kpoint.hpp"
#include "kaclab/polyroots.hpp"

namespace {

using kaclab::harness::fmt17;

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << body;
}

int cmd_roots(const std::string& law_id, int degree, int trials,
              std::uint64_t seed, double theta, const std::string& out_path) {
    auto law = kaclab::coeffs::parse_law(law_id);
    kaclab::kacsim::LocalFrame frame(theta, degree);
    std::string body = "trial,root_re,root_im,residual\n";
    for (int t = 0; t < trials; ++t) {
        kaclab::coeffs::RngStream stream(seed, static_cast<std::uint64_t>(t));
        auto p = kaclab::kacsim::sample_kac(law, frame, stream);
        auto report = kaclab::polyroots::aberth_roots(p);
        if (!report.converged) {
            std::cerr << "trial " << t << ": solver did not converge\n";
            return 1;
        }
        for (std::size_t i = 0; i < report.roots.size(); ++i) {
            body += std::to_string(t) + ',' + fmt17(report.roots[i].real()) + ',' +
                    fmt17(report.roots[i].imag()) + ',' + fmt17(report.residuals[i]) + '\n';
        }
    }
    write_file(out_path, body);
    std::cout << "wrote " << out_path << " (" << trials << " trials, degree " << degree
              << ")\n";
    return 0;
}

int cmd_gaf(int trials, double window, double tol, std::uint64_t seed,
            const std::string& out_path) {
    std::string body = "trial,z_re,z_im\n";
    int flagged = 0;
    for (int t = 0; t < trials; ++t) {
        kaclab::coeffs::RngStream stream(seed, static_cast<std::uint64_t>(t));
        auto sample = kaclab::gaf::sample_gaf(stream, window, tol);
        auto ex = kaclab::gaf::gaf_zeros(sample, window);
        if (!ex.ok()) {
            ++flagged;
            continue;
        }
        for (const auto& z : ex.config.points) {
            body += std::to_string(t) + ',' + fmt17(z.real()) + ',' + fmt17(z.imag()) + '\n';
        }
    }
    write_file(out_path, body);
    std::cout << "wrote " << out_path << " (" << trials << " trials";
    if (flagged) std::cout << ", " << flagged << " flagged and skipped";
    std::cout << ")\n";
    return 0;
}

int cmd_intensity(const std::string& out_dir, double xmax, double step, double rmax) {
    std::filesystem::create_directories(out_dir);
    std::string rho = "x,rho1\n";
    for (double x = -xmax; x <= xmax + 1e-12; x += step) {
        rho += fmt17(x) + ',' + fmt17(kaclab::gaf::intensity1({x, 0.0})) + '\n';
    }
    write_file(out_dir + "/intensity_rho1.csv", rho);

    std::string counts = "R,expected_count\n";
    for (double r = 0.5; r <= rmax + 1e-12; r += 0.5) {
        counts += fmt17(r) + ',' + fmt17(kaclab::gaf::intensity_integral(r)) + '\n';
    }
    write_file(out_dir + "/intensity_expected_count.csv", counts);
    std::cout << "wrote " << out_dir << "/intensity_rho1.csv and "
              << out_dir << "/intensity_expected_count.csv\n";
    return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out_dir) {
    std::string text = "{}";
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::runtime_error("cannot read config: " + config_path);
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    auto config = kaclab::harness::parse_config(text);
    auto result = kaclab::harness::run_experiment(config, out_dir);
    std::cout << "experiment finished in " << fmt17(result.wall_seconds) << " s; "
              << result.rows.size() << " result rows; budget "
              << (result.budget_ok ? "ok" : "MISMATCH") << "\n";
    for (const auto& cell : result.cells) {
        if (cell.voided) {
            std::cout << "cell " << cell.law_id << " n=" << cell.n << " VOIDED ("
                      << cell.failures << "/" << cell.trials << " failures)\n";
        }
    }
    std::cout << "artifacts under " << out_dir << "\n";
    return 0;
}

int cmd_report(const std::string& in_dir) {
    auto estimates = kaclab::harness::read_correlations_csv(in_dir + "/correlations.csv");
    auto rows = kaclab::harness::rows_from_correlations(estimates);
    kaclab::harness::emit_report(rows, in_dir);
    std::cout << "rebuilt gap_table.csv and plot files under " << in_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Microscopic root statistics of random Kac polynomials vs. the limiting GAF"};
    app.require_subcommand(1);

    auto* roots = app.add_subcommand("roots", "solve sampled Kac polynomials, dump roots");
    std::string law = "gaussian-complex", out = "roots.csv";
    int degree = 64, trials = 1;
    std::uint64_t seed = 1;
    double theta = 1.5707963267948966;
    roots->add_option("--degree", degree, "polynomial degree")->required();
    roots->add_option("--law", law, "coefficient law id");
    roots->add_option("--seed", seed, "master seed");
    roots->add_option("--trials", trials, "number of draws");
    roots->add_option("--theta", theta, "frame angle in (0, pi)");
    roots->add_option("--out", out, "output CSV path")->required();

    auto* gaf = app.add_subcommand("gaf", "sample the limiting GAF, dump zeros");
    int gtrials = 100;
    double window = 4.0, tol = 1e-10;
    std::string gout = "gaf_zeros.csv";
    gaf->add_option("--trials", gtrials, "number of samples");
    gaf->add_option("--window", window, "zero window radius");
    gaf->add_option("--tol", tol, "Parseval truncation tolerance");
    gaf->add_option("--seed", seed, "master seed");
    gaf->add_option("--out", gout, "output CSV path")->required();

    auto* intensity = app.add_subcommand("intensity", "first-intensity tables for plotting");
    std::string idir = "intensity-out";
    double xmax = 6.0, step = 0.05, rmax = 6.0;
    intensity->add_option("--out", idir, "output directory")->required();
    intensity->add_option("--xmax", xmax, "real-axis range for rho1");
    intensity->add_option("--step", step, "real-axis step");
    intensity->add_option("--rmax", rmax, "largest disk radius for expected counts");

    auto* experiment = app.add_subcommand("experiment", "run a universality experiment");
    std::string config_path, exp_out = "experiment-out";
    experiment->add_option("--config", config_path, "JSON config ({} = all defaults)");
    experiment->add_option("--out", exp_out, "output directory")->required();

    auto* report = app.add_subcommand("report", "rebuild gap table and plot data");
    std::string in_dir;
    report->add_option("--in", in_dir, "experiment output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (roots->parsed()) return cmd_roots(law, degree, trials, seed, theta, out);
        if (gaf->parsed()) return cmd_gaf(gtrials, window, tol, seed, gout);
        if (intensity->parsed()) return cmd_intensity(idir, xmax, step, rmax);
        if (experiment->parsed()) return cmd_experiment(config_path, exp_out);
        if (report->parsed()) return cmd_report(in_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
