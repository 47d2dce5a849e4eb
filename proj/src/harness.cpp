#include "kaclab/harness.hpp"

#include <json.hpp>

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "kaclab/gaf.hpp"
#include "kaclab/polyroots.hpp"

namespace kaclab::harness {

namespace {

using cplx = std::complex<double>;
using nlohmann::json;

constexpr double kPi = 3.14159265358979323846264338328;
constexpr double kTwoPi = 6.28318530717958647692528676656;
constexpr const char* kArtifactVersion = "kaclab 0.1.0";

coeffs::RngStream cell_stream(std::uint64_t master_seed, const std::string& cell_id,
                              long long trial) {
    std::uint64_t idx =
        coeffs::fnv1a64(cell_id.data(), cell_id.size()) ^ static_cast<std::uint64_t>(trial);
    return coeffs::RngStream(master_seed, idx);
}

std::string sanitize_for_filename(const std::string& id) {
    std::string out;
    for (char c : id) {
        if (c == '(') out += '_';
        else if (c == ')') continue;
        else if (c == '.') out += 'p';
        else out += c;
    }
    return out;
}

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

std::string fmt17(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

int resolve_workers(int hint) {
    if (const char* env = std::getenv("KACLAB_WORKERS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    if (hint > 0) return hint;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(long long count, int workers,
                  const std::function<void(long long)>& fn) {
    if (count <= 0) return;
    workers = std::max(1, workers);
    if (workers == 1 || count == 1) {
        for (long long i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<long long> next{0};
    std::exception_ptr first_error;
    std::mutex error_mtx;
    auto body = [&]() {
        for (;;) {
            long long i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mtx);
                if (!first_error) first_error = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

ExperimentConfig default_config() {
    ExperimentConfig c;
    c.laws = {"gaussian-complex", "gaussian-real", "rademacher", "uniform-real",
              "two-point(0.2)"};
    c.degrees = {128, 512};
    c.ks = {1, 2};
    return c;
}

namespace {

void validate_config(const ExperimentConfig& c) {
    if (!(c.theta > 0.1 && c.theta < kPi - 0.1)) {
        throw std::invalid_argument("theta: must lie in (0.1, pi - 0.1)");
    }
    if (!(c.window_R >= 1.0)) throw std::invalid_argument("window_R: must be >= 1");
    if (c.trials_per_cell < 100) throw std::invalid_argument("trials_per_cell: must be >= 100");
    if (c.gaf_trials < 100) throw std::invalid_argument("gaf_trials: must be >= 100");
    if (!(c.tol > 0.0)) throw std::invalid_argument("tol: must be positive");
    if (c.laws.empty()) throw std::invalid_argument("laws: must not be empty");
    if (c.degrees.empty()) throw std::invalid_argument("degrees: must not be empty");
    if (c.ks.empty()) throw std::invalid_argument("ks: must not be empty");
    for (int n : c.degrees) {
        if (n < 1) throw std::invalid_argument("degrees: entries must be >= 1");
    }
    for (int k : c.ks) {
        if (k < 1 || k > 3) throw std::invalid_argument("ks: every k must lie in 1..3");
    }
    if (c.workers < 0) throw std::invalid_argument("workers: must be >= 0");
    for (const auto& id : c.laws) coeffs::parse_law(id);  // throws on bad names
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");

    static const std::set<std::string> known = {
        "laws",   "degrees",         "theta",      "window_R", "ks",
        "trials_per_cell", "gaf_trials", "tol", "master_seed", "workers"};
    for (const auto& item : j.items()) {
        if (!known.count(item.key())) {
            throw std::invalid_argument("config: unknown key \"" + item.key() + "\"");
        }
    }

    ExperimentConfig c = default_config();
    try {
        if (j.contains("laws")) {
            c.laws.clear();
            for (const auto& v : j.at("laws")) {
                c.laws.push_back(coeffs::parse_law(v.get<std::string>()).id);
            }
        }
        if (j.contains("degrees")) c.degrees = j.at("degrees").get<std::vector<int>>();
        if (j.contains("theta")) c.theta = j.at("theta").get<double>();
        if (j.contains("window_R")) c.window_R = j.at("window_R").get<double>();
        if (j.contains("ks")) c.ks = j.at("ks").get<std::vector<int>>();
        if (j.contains("trials_per_cell")) c.trials_per_cell = j.at("trials_per_cell").get<int>();
        if (j.contains("gaf_trials")) c.gaf_trials = j.at("gaf_trials").get<int>();
        if (j.contains("tol")) c.tol = j.at("tol").get<double>();
        if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
        if (j.contains("workers")) c.workers = j.at("workers").get<int>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: type error: ") + e.what());
    }
    validate_config(c);
    return c;
}

namespace {

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["laws"] = c.laws;
    j["degrees"] = c.degrees;
    j["theta"] = c.theta;
    j["window_R"] = c.window_R;
    j["ks"] = c.ks;
    j["trials_per_cell"] = c.trials_per_cell;
    j["gaf_trials"] = c.gaf_trials;
    j["tol"] = c.tol;
    j["master_seed"] = c.master_seed;
    j["workers"] = c.workers;
    return j;
}

}  // namespace

std::string emit_config(const ExperimentConfig& config) {
    return config_to_json(config).dump(2);
}

// ---------------------------------------------------------------------------
// Experiment runner.

namespace {

struct TrialData {
    bool ok = false;
    long long resamples = 0;
    std::vector<cplx> points;
    std::vector<double> values;  // one t_phi per battery member
};

std::vector<double> eval_battery(const kacsim::PointConfiguration& config,
                                 const std::vector<kpoint::TestFunction>& battery) {
    std::vector<double> vals;
    vals.reserve(battery.size());
    for (const auto& phi : battery) vals.push_back(kpoint::t_phi(config, phi));
    return vals;
}

struct CellSummary {
    std::string law_id;
    int n = 0;
    std::vector<kpoint::CorrelationEstimate> estimates;  // one per battery member
    CellDiagnostics diag;
};

CellSummary reduce_cell(const std::string& law_id, int n,
                        const std::vector<TrialData>& trials,
                        const std::vector<kpoint::TestFunction>& battery) {
    CellSummary cell;
    cell.law_id = law_id;
    cell.n = n;
    cell.diag.law_id = law_id;
    cell.diag.n = n;
    cell.diag.trials = static_cast<long long>(trials.size());

    std::vector<std::vector<double>> per_member(battery.size());
    for (const auto& td : trials) {
        cell.diag.resamples += td.resamples;
        if (!td.ok) {
            ++cell.diag.failures;
            continue;
        }
        for (std::size_t m = 0; m < battery.size(); ++m) {
            per_member[m].push_back(td.values[m]);
        }
    }
    cell.diag.voided =
        cell.diag.failures * 100 > cell.diag.trials;  // failure rate > 1% voids the cell

    for (std::size_t m = 0; m < battery.size(); ++m) {
        kpoint::CorrelationEstimate est;
        if (!cell.diag.voided && per_member[m].size() >= 2) {
            est = kpoint::estimate_from_values(per_member[m]);
        } else {
            est.mean = nan_value();
            est.stderr_ = nan_value();
            est.trials = static_cast<long long>(per_member[m].size());
        }
        est.k = battery[m].k;
        est.phi_id = battery[m].id;
        est.law_id = law_id;
        est.n = n;
        cell.estimates.push_back(std::move(est));
    }
    return cell;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << body;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

std::vector<ResultRow> rows_from_correlations(
    const std::vector<kpoint::CorrelationEstimate>& estimates) {
    std::vector<ResultRow> rows;
    auto find_gaf = [&](int k, const std::string& phi_id) -> const kpoint::CorrelationEstimate* {
        for (const auto& e : estimates) {
            if (e.law_id == "GAF" && e.k == k && e.phi_id == phi_id) return &e;
        }
        return nullptr;
    };
    for (const auto& e : estimates) {
        ResultRow row;
        row.law_id = e.law_id;
        row.n = e.n;
        row.k = e.k;
        row.phi_id = e.phi_id;
        row.mean = e.mean;
        row.stderr_ = e.stderr_;
        row.trials = e.trials;
        row.status = std::isnan(e.mean) ? "voided" : "ok";
        if (e.law_id == "GAF") {
            row.gaf_mean = e.mean;
            row.gaf_stderr = e.stderr_;
            row.gap = nan_value();
            row.gap_sigma = nan_value();
        } else {
            const auto* g = find_gaf(e.k, e.phi_id);
            if (g && !std::isnan(g->mean) && !std::isnan(e.mean)) {
                row.gaf_mean = g->mean;
                row.gaf_stderr = g->stderr_;
                row.gap = std::abs(e.mean - g->mean);
                row.gap_sigma = row.gap / std::sqrt(e.stderr_ * e.stderr_ +
                                                    g->stderr_ * g->stderr_);
            } else {
                row.gaf_mean = nan_value();
                row.gaf_stderr = nan_value();
                row.gap = nan_value();
                row.gap_sigma = nan_value();
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void emit_report(const std::vector<ResultRow>& rows, const std::string& out_dir) {
    if (rows.empty()) throw std::invalid_argument("emit_report: no rows");
    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);

    std::string gap = "law,n,k,phi_id,mean,stderr,trials,gaf_mean,gaf_stderr,gap,gap_sigma,status\n";
    for (const auto& r : rows) {
        gap += r.law_id + ',' + (r.is_gaf() ? std::string("GAF") : std::to_string(r.n)) + ',' +
               std::to_string(r.k) + ',' + r.phi_id + ',' + fmt17(r.mean) + ',' +
               fmt17(r.stderr_) + ',' + std::to_string(r.trials) + ',' + fmt17(r.gaf_mean) +
               ',' + fmt17(r.gaf_stderr) + ',' + fmt17(r.gap) + ',' + fmt17(r.gap_sigma) +
               ',' + r.status + '\n';
    }
    write_file(dir / "gap_table.csv", gap);

    // One plot file per battery member: series = law, x = degree.
    std::vector<std::pair<int, std::string>> figures;
    for (const auto& r : rows) {
        auto key = std::make_pair(r.k, r.phi_id);
        bool seen = false;
        for (const auto& f : figures) seen = seen || f == key;
        if (!seen) figures.push_back(key);
    }
    for (const auto& [k, phi_id] : figures) {
        std::vector<const ResultRow*> sel;
        for (const auto& r : rows) {
            if (!r.is_gaf() && r.k == k && r.phi_id == phi_id) sel.push_back(&r);
        }
        std::stable_sort(sel.begin(), sel.end(), [](const ResultRow* a, const ResultRow* b) {
            if (a->law_id != b->law_id) return a->law_id < b->law_id;
            return a->n < b->n;
        });
        std::string body = "series,x,y,yerr\n";
        for (const ResultRow* r : sel) {
            body += r->law_id + ',' + std::to_string(r->n) + ',' + fmt17(r->mean) + ',' +
                    fmt17(r->stderr_) + '\n';
        }
        write_file(dir / ("plot_" + sanitize_for_filename(phi_id) + ".csv"), body);
    }
}

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::string& out_dir) {
    validate_config(config);
    if (config.window_R < 4.0) {
        throw std::invalid_argument(
            "run_experiment: the frozen battery needs window_R >= 4");
    }
    auto t_start = std::chrono::steady_clock::now();

    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);

    std::vector<kpoint::TestFunction> battery;
    for (int k : config.ks) {
        for (auto& f : kpoint::phi_battery(k, config.window_R)) battery.push_back(std::move(f));
    }

    const int workers = resolve_workers(config.workers);
    const double solver_window = config.window_R + 1.0;

    ExperimentResult result;
    std::vector<CellSummary> cells;

    // GAF baseline cell.
    {
        std::vector<TrialData> trials(static_cast<std::size_t>(config.gaf_trials));
        parallel_for(config.gaf_trials, workers, [&](long long t) {
            coeffs::RngStream stream = cell_stream(config.master_seed, "gaf", t);
            gaf::GafSample sample = gaf::sample_gaf(stream, solver_window, config.tol);
            gaf::ZeroExtraction ex = gaf::gaf_zeros(sample, solver_window);
            TrialData& td = trials[static_cast<std::size_t>(t)];
            if (!ex.ok()) return;
            td.ok = true;
            td.points = ex.config.points;
            td.values = eval_battery(ex.config, battery);
        });
        CellSummary cell = reduce_cell("GAF", 0, trials, battery);
        // gaf_zeros.csv: trial,z_re,z_im
        std::string body = "trial,z_re,z_im\n";
        for (std::size_t t = 0; t < trials.size(); ++t) {
            for (const auto& z : trials[t].points) {
                body += std::to_string(t) + ',' + fmt17(z.real()) + ',' + fmt17(z.imag()) + '\n';
            }
        }
        write_file(dir / "gaf_zeros.csv", body);
        cells.push_back(std::move(cell));
    }

    // Kac cells.
    for (const auto& law_id : config.laws) {
        coeffs::CoefficientLaw law = coeffs::parse_law(law_id);
        for (int n : config.degrees) {
            kacsim::LocalFrame frame(config.theta, n);
            std::string cell_id = "law=" + law.id + ";n=" + std::to_string(n);
            std::vector<TrialData> trials(static_cast<std::size_t>(config.trials_per_cell));
            parallel_for(config.trials_per_cell, workers, [&](long long t) {
                coeffs::RngStream stream = cell_stream(config.master_seed, cell_id, t);
                TrialData& td = trials[static_cast<std::size_t>(t)];
                polyroots::Polynomial p =
                    kacsim::sample_kac(law, frame, stream, &td.resamples);
                polyroots::RootReport rr = polyroots::aberth_roots(p);
                if (!rr.converged) return;
                kacsim::PointConfiguration cfg =
                    kacsim::local_roots(rr, frame, solver_window);
                td.ok = true;
                td.points = cfg.points;
                td.values = eval_battery(cfg, battery);
            });

            result.expected_coeff_draws +=
                static_cast<long long>(config.trials_per_cell) * (n + 1);
            for (const auto& td : trials) {
                result.actual_coeff_draws += (td.resamples + 1) * (n + 1);
                result.leading_resamples += td.resamples;
            }

            CellSummary cell = reduce_cell(law.id, n, trials, battery);

            // scaled_roots CSV with a frame echo header line.
            json echo;
            echo["law"] = law.id;
            echo["n"] = n;
            echo["theta"] = config.theta;
            echo["window_R"] = config.window_R;
            echo["solver_window"] = solver_window;
            std::string body = "# " + echo.dump() + '\n';
            body += "trial,law,n,theta,w_re,w_im\n";
            std::string prefix = law.id + ',' + std::to_string(n) + ',' + fmt17(config.theta);
            for (std::size_t t = 0; t < trials.size(); ++t) {
                for (const auto& w : trials[t].points) {
                    body += std::to_string(t) + ',' + prefix + ',' + fmt17(w.real()) + ',' +
                            fmt17(w.imag()) + '\n';
                }
            }
            write_file(dir / ("scaled_roots_" + sanitize_for_filename(law.id) + "_" +
                              std::to_string(n) + ".csv"),
                       body);
            cells.push_back(std::move(cell));
        }
    }

    // Correlations CSV (Kac cells first, then the GAF baseline) and gap rows.
    std::vector<kpoint::CorrelationEstimate> estimates;
    for (const auto& cell : cells) {
        if (cell.law_id == "GAF") continue;
        for (const auto& e : cell.estimates) estimates.push_back(e);
    }
    for (const auto& cell : cells) {
        if (cell.law_id != "GAF") continue;
        for (const auto& e : cell.estimates) estimates.push_back(e);
    }
    std::string corr = "law,n,k,phi_id,mean,stderr,trials\n";
    for (const auto& e : estimates) {
        corr += e.law_id + ',' + (e.law_id == "GAF" ? std::string("GAF") : std::to_string(e.n)) +
                ',' + std::to_string(e.k) + ',' + e.phi_id + ',' + fmt17(e.mean) + ',' +
                fmt17(e.stderr_) + ',' + std::to_string(e.trials) + '\n';
    }
    write_file(dir / "correlations.csv", corr);

    result.rows = rows_from_correlations(estimates);
    // Voided flags come from the diagnostics, not from NaN sniffing alone.
    for (auto& row : result.rows) {
        for (const auto& cell : cells) {
            if (cell.law_id == row.law_id && cell.n == row.n && cell.diag.voided) {
                row.status = "voided";
            }
        }
    }
    emit_report(result.rows, out_dir);
    write_file(dir / "phi_battery.json", kpoint::battery_descriptor_json(battery));

    for (const auto& cell : cells) result.cells.push_back(cell.diag);
    result.budget_ok =
        result.actual_coeff_draws ==
        result.expected_coeff_draws + [&] {
            long long extra = 0;
            for (const auto& cell : cells) {
                if (cell.law_id == "GAF") continue;
                extra += cell.diag.resamples * (cell.n + 1);
            }
            return extra;
        }();

    auto t_end = std::chrono::steady_clock::now();
    result.wall_seconds = std::chrono::duration<double>(t_end - t_start).count();

    json manifest;
    manifest["config"] = config_to_json(config);
    manifest["seed"] = config.master_seed;
    manifest["versions"] = {{"artifact", kArtifactVersion},
                            {"battery", kpoint::battery_version()},
                            {"format", 1}};
    manifest["wall_clock_seconds"] = result.wall_seconds;
    manifest["budget"] = {{"expected_coeff_draws", result.expected_coeff_draws},
                          {"actual_coeff_draws", result.actual_coeff_draws},
                          {"leading_resamples", result.leading_resamples},
                          {"ok", result.budget_ok}};
    json cell_list = json::array();
    for (const auto& d : result.cells) {
        cell_list.push_back({{"law", d.law_id},
                             {"n", d.n},
                             {"trials", d.trials},
                             {"failures", d.failures},
                             {"resamples", d.resamples},
                             {"voided", d.voided}});
    }
    manifest["cells"] = cell_list;
    write_file(dir / "manifest.json", manifest.dump(2));

    return result;
}

// ---------------------------------------------------------------------------
// Bound checks.

double max_abs_fn_boundary(const polyroots::Polynomial& p,
                           const kacsim::LocalFrame& frame, double R, int angular) {
    double best = 0.0;
    for (int j = 0; j < angular; ++j) {
        cplx z = std::polar(R, kTwoPi * j / angular);
        best = std::max(best, std::abs(kacsim::eval_Fn(p, frame, z)));
    }
    return best;
}

double max_abs_fn_grid(const polyroots::Polynomial& p,
                       const kacsim::LocalFrame& frame, double R, int radial,
                       int angular) {
    double best = std::abs(kacsim::eval_Fn(p, frame, cplx(0.0, 0.0)));
    for (int i = 1; i <= radial; ++i) {
        double r = R * i / radial;
        for (int j = 0; j < angular; ++j) {
            cplx z = std::polar(r, kTwoPi * j / angular);
            best = std::max(best, std::abs(kacsim::eval_Fn(p, frame, z)));
        }
    }
    return best;
}

MaxModulusStat max_modulus_stat(const coeffs::CoefficientLaw& law, int n, double R,
                                int trials, std::uint64_t seed, double theta,
                                int workers) {
    if (!(R >= 1.0)) throw std::invalid_argument("max_modulus_stat: R must be >= 1");
    kacsim::LocalFrame frame(theta, n);
    std::string cell_id = "maxmod;law=" + law.id + ";n=" + std::to_string(n) +
                          ";R=" + fmt17(R);
    std::vector<double> vals(static_cast<std::size_t>(trials));
    parallel_for(trials, resolve_workers(workers), [&](long long t) {
        coeffs::RngStream stream = cell_stream(seed, cell_id, t);
        polyroots::Polynomial p = kacsim::sample_kac(law, frame, stream);
        vals[static_cast<std::size_t>(t)] = max_abs_fn_boundary(p, frame, R);
    });
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= trials;
    double ss = 0.0;
    for (double v : vals) ss += (v - mean) * (v - mean);
    MaxModulusStat st;
    st.mean = mean;
    st.stderr_ = std::sqrt(ss / (static_cast<double>(trials) - 1.0)) / std::sqrt(trials);
    st.trials = trials;
    return st;
}

std::vector<MomentRow> moment_tail_scan(const coeffs::CoefficientLaw& law, int k,
                                        double R, const std::vector<int>& degrees,
                                        int trials, int gaf_trials,
                                        std::uint64_t seed, double theta,
                                        int workers) {
    if (k < 1 || k > 4) throw std::invalid_argument("moment_tail_scan: k must lie in 1..4");
    const int w = resolve_workers(workers);
    const double solver_window = R + 1.0;
    std::vector<MomentRow> rows;

    auto reduce = [&](const std::vector<double>& vals, const std::vector<char>& ok,
                      int n) {
        MomentRow row;
        row.n = n;
        std::vector<double> good;
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (ok[i]) good.push_back(vals[i]);
            else ++row.failures;
        }
        row.trials = static_cast<long long>(good.size());
        double mean = 0.0;
        for (double v : good) mean += v;
        mean /= std::max<std::size_t>(good.size(), 1);
        double ss = 0.0;
        for (double v : good) ss += (v - mean) * (v - mean);
        row.mean = mean;
        row.stderr_ = good.size() > 1
                          ? std::sqrt(ss / (static_cast<double>(good.size()) - 1.0)) /
                                std::sqrt(static_cast<double>(good.size()))
                          : nan_value();
        return row;
    };

    // GAF reference first (n = 0 row).
    {
        std::vector<double> vals(static_cast<std::size_t>(gaf_trials), 0.0);
        std::vector<char> ok(static_cast<std::size_t>(gaf_trials), 0);
        parallel_for(gaf_trials, w, [&](long long t) {
            coeffs::RngStream stream = cell_stream(seed, "moments;gaf", t);
            gaf::GafSample sample = gaf::sample_gaf(stream, solver_window, 1e-10);
            gaf::ZeroExtraction ex = gaf::gaf_zeros(sample, solver_window);
            if (!ex.ok()) return;
            double z = kacsim::disk_count(ex.config, R);
            vals[static_cast<std::size_t>(t)] = std::pow(z, k);
            ok[static_cast<std::size_t>(t)] = 1;
        });
        rows.push_back(reduce(vals, ok, 0));
    }

    for (int n : degrees) {
        kacsim::LocalFrame frame(theta, n);
        std::string cell_id = "moments;law=" + law.id + ";n=" + std::to_string(n);
        std::vector<double> vals(static_cast<std::size_t>(trials), 0.0);
        std::vector<char> ok(static_cast<std::size_t>(trials), 0);
        parallel_for(trials, w, [&](long long t) {
            coeffs::RngStream stream = cell_stream(seed, cell_id, t);
            polyroots::Polynomial p = kacsim::sample_kac(law, frame, stream);
            polyroots::RootReport rr = polyroots::aberth_roots(p);
            if (!rr.converged) return;
            kacsim::PointConfiguration cfg = kacsim::local_roots(rr, frame, solver_window);
            double z = kacsim::disk_count(cfg, R);
            vals[static_cast<std::size_t>(t)] = std::pow(z, k);
            ok[static_cast<std::size_t>(t)] = 1;
        });
        rows.push_back(reduce(vals, ok, n));
    }
    return rows;
}

std::vector<SmallBallRow> small_ball_probe(const coeffs::CoefficientLaw& law,
                                           const std::vector<int>& degrees,
                                           double phi, long long trials,
                                           std::uint64_t seed, double theta,
                                           int workers) {
    if (trials < 1000000) {
        throw std::invalid_argument("small_ball_probe: trials >= 1e6 required");
    }
    const int w = resolve_workers(workers);
    std::vector<SmallBallRow> rows;
    cplx zeta0 = std::polar(1.0, theta);

    for (std::size_t d = 0; d < degrees.size(); ++d) {
        int n = degrees[d];
        std::string cell_id = "smallball;law=" + law.id + ";n=" + std::to_string(n) +
                              ";phi=" + fmt17(phi);
        std::vector<std::uint8_t> flags(static_cast<std::size_t>(trials), 0);
        cplx q = zeta0 * cplx(1.0, phi / n);
        parallel_for(trials, w, [&](long long t) {
            coeffs::RngStream stream = cell_stream(seed, cell_id, t);
            // sqrt(n) F_n(i phi) = sum_k xi_k q^k with q = zeta0 (1 + i phi / n).
            cplx sum = 0.0, pw = 1.0;
            for (int k = 0; k <= n; ++k) {
                sum += law.sample(stream) * pw;
                pw *= q;
            }
            double a = std::abs(sum);
            std::uint8_t f = 0;
            if (a <= 0.5) f |= 1;
            if (a <= 1.0) f |= 2;
            flags[static_cast<std::size_t>(t)] = f;
        });

        SmallBallRow row;
        row.n = n;
        row.trials = trials;
        for (std::uint8_t f : flags) {
            row.hits_half += (f & 1) ? 1 : 0;
            row.hits_one += (f & 2) ? 1 : 0;
        }
        row.p_half = static_cast<double>(row.hits_half) / static_cast<double>(trials);
        row.p_one = static_cast<double>(row.hits_one) / static_cast<double>(trials);
        row.se_one = std::sqrt(row.p_one * (1.0 - row.p_one) / static_cast<double>(trials));
        row.flagged = (row.hits_one == 0);
        row.ratio_to_prev =
            (d == 0) ? nan_value() : rows.back().p_one / std::max(row.p_one, 1e-300);
        rows.push_back(row);
    }
    return rows;
}

std::vector<kpoint::CorrelationEstimate> read_correlations_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty correlations file");
    if (line != "law,n,k,phi_id,mean,stderr,trials") {
        throw std::runtime_error("unexpected correlations header: " + line);
    }
    std::vector<kpoint::CorrelationEstimate> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        kpoint::CorrelationEstimate e;
        std::getline(ss, e.law_id, ',');
        std::getline(ss, field, ',');
        e.n = (field == "GAF") ? 0 : std::stoi(field);
        std::getline(ss, field, ',');
        e.k = std::stoi(field);
        std::getline(ss, e.phi_id, ',');
        std::getline(ss, field, ',');
        e.mean = std::strtod(field.c_str(), nullptr);
        std::getline(ss, field, ',');
        e.stderr_ = std::strtod(field.c_str(), nullptr);
        std::getline(ss, field, ',');
        e.trials = std::stoll(field);
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace kaclab::harness
