#include "ccv/harness.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

namespace ccv::harness {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json rvector_to_json(const RVector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json snapshot_to_json(const StateSnapshot& snap) {
    json out;
    out["backend"] = snap.backend == Backend::Gaussian ? "gaussian" : "fock";
    out["n_modes"] = snap.n_modes;
    out["hbar"] = snap.conv.hbar;
    if (snap.backend == Backend::Fock) {
        out["cutoff"] = snap.cutoff;
        json amps = json::array();
        for (Eigen::Index i = 0; i < snap.amplitudes.size(); ++i)
            amps.push_back(json::array({snap.amplitudes(i).real(), snap.amplitudes(i).imag()}));
        out["amplitudes"] = amps;
    } else {
        out["mean"] = rvector_to_json(snap.mean);
        json cov = json::array();
        for (Eigen::Index r = 0; r < snap.cov.rows(); ++r)
            cov.push_back(rvector_to_json(snap.cov.row(r).transpose()));
        out["cov"] = cov;
    }
    return out;
}

StateSnapshot snapshot_from_json(const json& j) {
    StateSnapshot snap;
    snap.backend = j.at("backend").get<std::string>() == "fock" ? Backend::Fock
                                                                : Backend::Gaussian;
    snap.n_modes = j.at("n_modes").get<int>();
    snap.conv = HbarConvention(j.at("hbar").get<double>());
    if (snap.backend == Backend::Fock) {
        snap.cutoff = j.at("cutoff").get<int>();
        const auto& amps = j.at("amplitudes");
        snap.amplitudes.resize(static_cast<Eigen::Index>(amps.size()));
        for (Eigen::Index i = 0; i < snap.amplitudes.size(); ++i)
            snap.amplitudes(i) = Complex(amps[i][0].get<double>(), amps[i][1].get<double>());
    } else {
        const auto& mean = j.at("mean");
        snap.mean.resize(static_cast<Eigen::Index>(mean.size()));
        for (Eigen::Index i = 0; i < snap.mean.size(); ++i) snap.mean(i) = mean[i].get<double>();
        const auto& cov = j.at("cov");
        snap.cov.resize(static_cast<Eigen::Index>(cov.size()),
                        static_cast<Eigen::Index>(cov.size()));
        for (Eigen::Index r = 0; r < snap.cov.rows(); ++r)
            for (Eigen::Index c = 0; c < snap.cov.cols(); ++c)
                snap.cov(r, c) = cov[r][c].get<double>();
    }
    return snap;
}

void write_trace_csv(const RunResult& result, int depth, const std::string& provenance,
                     const std::string& path) {
    std::ofstream out(path);
    out.precision(12);
    out << "# " << provenance << '\n';
    out << "t";
    for (int j = 1; j <= depth; ++j) out << ",gamma_" << j;
    for (int j = 1; j <= depth; ++j) out << ",beta_" << j;
    out << ",cost_estimate,best_sample_cost\n";
    for (const auto& rec : result.trace) {
        out << rec.t;
        for (Eigen::Index j = 0; j < rec.gamma.size(); ++j) out << ',' << rec.gamma(j);
        for (Eigen::Index j = 0; j < rec.beta.size(); ++j) out << ',' << rec.beta(j);
        out << ',' << rec.cost_estimate << ',' << rec.best_sample_cost << '\n';
    }
}

void write_samples_csv(const RunResult& result, const EncodedProblem& encoded,
                       const std::string& provenance, const std::string& path) {
    std::ofstream out(path);
    out.precision(12);
    out << "# " << provenance << '\n';
    for (int m = 0; m < encoded.n_modes; ++m)
        out << (m ? "," : "") << 'x' << m << ",p" << m;
    out << ",cost\n";
    for (Eigen::Index k = 0; k < result.final_samples.rows(); ++k) {
        for (Eigen::Index c = 0; c < result.final_samples.cols(); ++c)
            out << (c ? "," : "") << result.final_samples(k, c);
        out << ',' << encoded.classical_cost_interleaved(result.final_samples.row(k).transpose())
            << '\n';
    }
}

struct ReportRow {
    std::string axis;
    double value = 0.0;
    std::string encoding = "ccv";
    int n_modes = 0, depth = 0, cutoff = 0;
    std::uint64_t seed = 0;
    double best_cost = 0.0, success_p = 0.0;
    int iterations = 0;
    double wall_ms = 0.0, trunc_loss = 0.0;
    bool failed = false;
    std::string error;
};

void write_report_csv(const std::vector<ReportRow>& rows, const std::string& provenance,
                      const std::string& path) {
    std::ofstream out(path);
    out.precision(12);
    out << "# " << provenance << '\n';
    out << "axis,value,encoding,n_modes,depth,cutoff,seed,best_cost,success_p,iterations,"
           "wall_ms,trunc_loss,status\n";
    const auto emit = [&](const ReportRow& r, const std::string& status,
                          const std::string& seed_text) {
        out << r.axis << ',' << r.value << ',' << r.encoding << ',' << r.n_modes << ',' << r.depth
            << ',' << r.cutoff << ',' << seed_text << ',' << r.best_cost << ',' << r.success_p
            << ',' << r.iterations << ',' << r.wall_ms << ',' << r.trunc_loss << ',' << status
            << '\n';
    };
    for (const auto& r : rows)
        emit(r, r.failed ? "failed: " + r.error : "ok", std::to_string(r.seed));

    // aggregate rows (median and mean over seeds) per (axis, value, encoding)
    std::vector<std::pair<std::string, std::vector<const ReportRow*>>> groups;
    for (const auto& r : rows) {
        if (r.failed) continue;
        const std::string key = r.axis + "/" + std::to_string(r.value) + "/" + r.encoding;
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const auto& g) { return g.first == key; });
        if (it == groups.end())
            groups.push_back({key, {&r}});
        else
            it->second.push_back(&r);
    }
    const auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };
    for (const auto& [key, members] : groups) {
        std::vector<double> costs, succ, wall;
        for (const auto* r : members) {
            costs.push_back(r->best_cost);
            succ.push_back(r->success_p);
            wall.push_back(r->wall_ms);
        }
        ReportRow med = *members.front();
        med.best_cost = median(costs);
        med.success_p = median(succ);
        med.wall_ms = median(wall);
        emit(med, "median", "aggregate");
        ReportRow mean = *members.front();
        mean.best_cost = std::accumulate(costs.begin(), costs.end(), 0.0) / costs.size();
        mean.success_p = std::accumulate(succ.begin(), succ.end(), 0.0) / succ.size();
        mean.wall_ms = std::accumulate(wall.begin(), wall.end(), 0.0) / wall.size();
        emit(mean, "mean", "aggregate");
    }
}

void run_pool(int jobs, int n_tasks, const std::function<void(int)>& task) {
    if (jobs <= 1) {
        for (int i = 0; i < n_tasks; ++i) task(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int workers = std::min(jobs, n_tasks);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) task(i);
        });
    for (auto& t : pool) t.join();
}

void write_wigner_outputs(const StateSnapshot& snap, int mode, const fs::path& dir) {
    WignerGrid grid;
    int cutoff = 0;
    if (snap.backend == Backend::Fock) {
        FockState state;
        state.n_modes = snap.n_modes;
        state.cutoff = snap.cutoff;
        state.conv = snap.conv;
        state.amplitudes = snap.amplitudes;
        grid = wigner::wigner_fock(state, mode);
        cutoff = snap.cutoff;
    } else {
        GaussianState state;
        state.n_modes = snap.n_modes;
        state.mean = snap.mean;
        state.cov = snap.cov;
        state.conv = snap.conv;
        grid = wigner::wigner_gaussian(state, mode);
    }
    const std::string base = (dir / ("wigner_" + std::to_string(mode))).string();
    wigner::write_csv(grid, base + ".csv");
    wigner::write_json_sidecar(grid, cutoff, base + ".json");
}

}  // namespace

json result_to_json(const RunResult& result, const ExperimentConfig& cfg, std::uint64_t seed) {
    json out;
    out["config_hash"] = config::hash(cfg.resolved);
    out["seed"] = seed;
    out["gamma_opt"] = rvector_to_json(result.gamma_opt);
    out["beta_opt"] = rvector_to_json(result.beta_opt);
    out["iterations_used"] = result.iterations_used;
    out["best_sample"] = rvector_to_json(result.best_sample);
    out["best_sample_cost"] = result.best_sample_cost;
    out["success_probability"] = result.success_probability;
    out["reference"] = {{"argmin", rvector_to_json(result.reference_argmin)},
                        {"value", result.reference_value}};
    out["final_samples_count"] = result.final_samples.rows();
    out["snapshot"] = snapshot_to_json(result.snapshot);
    // wall time is isolated here and excluded from determinism guarantees
    out["diagnostics"] = {{"wall_ms", result.wall_ms},
                          {"truncation_loss", result.truncation_loss},
                          {"cutoff_warning", result.cutoff_warning}};
    return out;
}

int cmd_run(const CliOptions& opts) {
    ExperimentConfig cfg;
    try {
        cfg = config::load(opts.config_path);
        if (opts.seed) cfg.qaoa.seed = *opts.seed;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    if (opts.dry_run) {
        std::cout << cfg.resolved.dump(2) << '\n';
        return kExitOk;
    }
    try {
        const fs::path dir(cfg.output_dir);
        fs::create_directories(dir);
        const RunResult result = qaoa::run(cfg.encoded, cfg.qaoa);
        {
            std::ofstream out(dir / "result.json");
            out << result_to_json(result, cfg, cfg.qaoa.seed).dump(2) << '\n';
        }
        const std::string provenance =
            "config " + config::hash(cfg.resolved) + " seed " + std::to_string(cfg.qaoa.seed);
        write_trace_csv(result, cfg.qaoa.depth, provenance, (dir / "trace.csv").string());
        write_samples_csv(result, cfg.encoded, provenance, (dir / "samples.csv").string());
        if (cfg.wigner_enabled)
            for (int mode : cfg.wigner_modes)
                write_wigner_outputs(result.snapshot, mode, dir);
        std::cout << "best sampled cost " << result.best_sample_cost << ", success probability "
                  << result.success_probability << " (" << result.iterations_used
                  << " iterations)\n";
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "simulation error: " << e.what() << '\n';
        return kExitSimulation;
    }
}

int cmd_sweep(const CliOptions& opts, const std::string& axis, const std::vector<double>& values) {
    ExperimentConfig cfg;
    try {
        cfg = config::load(opts.config_path);
        if (values.empty()) throw ConfigError("sweep needs a non-empty values list");
        if (axis != "depth" && axis != "size" && axis != "cutoff")
            throw ConfigError("sweep axis must be depth, size or cutoff");
        if (axis == "size" && !cfg.quadratic)
            throw ConfigError("size sweep needs a complex-quadratic problem family");
        if (axis == "cutoff" && cfg.qaoa.backend != Backend::Fock)
            throw ConfigError("cutoff sweep needs the fock backend");
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    if (opts.dry_run) {
        std::cout << cfg.resolved.dump(2) << '\n';
        return kExitOk;
    }

    std::vector<std::uint64_t> seeds = cfg.seeds;
    if (seeds.empty()) seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};

    struct Cell {
        double value;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (double v : values)
        for (auto s : seeds) cells.push_back({v, s});
    std::vector<ReportRow> rows(cells.size());

    run_pool(opts.jobs, static_cast<int>(cells.size()), [&](int i) {
        const Cell& cell = cells[static_cast<std::size_t>(i)];
        ReportRow& row = rows[static_cast<std::size_t>(i)];
        row.axis = axis;
        row.value = cell.value;
        row.seed = cell.seed;
        row.encoding = cfg.resolved["encoding"].get<std::string>();
        try {
            EncodedProblem enc = cfg.encoded;
            QaoaConfig qc = cfg.qaoa;
            qc.seed = cell.seed;
            if (axis == "depth")
                qc.depth = static_cast<int>(cell.value);
            else if (axis == "cutoff")
                qc.cutoff = static_cast<int>(cell.value);
            else {
                const auto family = config::quadratic_family(static_cast<int>(cell.value));
                enc = row.encoding == "ccv" ? encoding::encode_complex_quadratic(family)
                                            : encoding::encode_cv_baseline(family);
            }
            row.depth = qc.depth;
            row.cutoff = qc.backend == Backend::Fock ? qc.cutoff : 0;
            row.n_modes = enc.n_modes;
            const RunResult r = qaoa::run(enc, qc);
            row.best_cost = r.best_sample_cost;
            row.success_p = r.success_probability;
            row.iterations = r.iterations_used;
            row.wall_ms = r.wall_ms;
            row.trunc_loss = r.truncation_loss;
        } catch (const std::exception& e) {
            row.failed = true;  // partial failures recorded; the sweep continues
            row.error = e.what();
        }
    });

    try {
        const fs::path dir(cfg.output_dir);
        fs::create_directories(dir);
        write_report_csv(rows, "config " + config::hash(cfg.resolved),
                         (dir / "report.csv").string());
    } catch (const std::exception& e) {
        std::cerr << "simulation error: " << e.what() << '\n';
        return kExitSimulation;
    }
    return kExitOk;
}

int cmd_compare(const CliOptions& opts) {
    ExperimentConfig cfg;
    try {
        cfg = config::load(opts.config_path);
        if (!cfg.quadratic) throw ConfigError("compare needs a complex-quadratic problem");
        if (cfg.qaoa.backend != Backend::Fock)
            throw ConfigError("compare runs on the fock backend");
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    if (opts.dry_run) {
        std::cout << cfg.resolved.dump(2) << '\n';
        return kExitOk;
    }

    std::vector<std::uint64_t> seeds = cfg.seeds;
    if (seeds.empty()) seeds = {0, 1, 2, 3, 4};
    std::vector<ReportRow> rows(2 * seeds.size());

    run_pool(opts.jobs, static_cast<int>(seeds.size()), [&](int i) {
        QaoaConfig qc = cfg.qaoa;
        qc.seed = seeds[static_cast<std::size_t>(i)];
        try {
            const auto cmp = qaoa::compare_baseline(*cfg.quadratic, qc);
            const auto fill = [&](ReportRow& row, const RunResult& r, const std::string& enc,
                                  int modes, Eigen::Index dim) {
                row.axis = "compare";
                row.value = static_cast<double>(dim);
                row.encoding = enc;
                row.n_modes = modes;
                row.depth = qc.depth;
                row.cutoff = qc.cutoff;
                row.seed = qc.seed;
                row.best_cost = r.best_sample_cost;
                row.success_p = r.success_probability;
                row.iterations = r.iterations_used;
                row.wall_ms = r.wall_ms;
                row.trunc_loss = r.truncation_loss;
            };
            fill(rows[2 * static_cast<std::size_t>(i)], cmp.ccv, "ccv", cmp.ccv_modes,
                 cmp.ccv_hilbert_dim);
            fill(rows[2 * static_cast<std::size_t>(i) + 1], cmp.baseline, "cv-baseline",
                 cmp.baseline_modes, cmp.baseline_hilbert_dim);
        } catch (const std::exception& e) {
            for (int k = 0; k < 2; ++k) {
                auto& row = rows[2 * static_cast<std::size_t>(i) + k];
                row.axis = "compare";
                row.seed = qc.seed;
                row.failed = true;
                row.error = e.what();
            }
        }
    });

    try {
        const fs::path dir(cfg.output_dir);
        fs::create_directories(dir);
        write_report_csv(rows, "config " + config::hash(cfg.resolved),
                         (dir / "report.csv").string());
    } catch (const std::exception& e) {
        std::cerr << "simulation error: " << e.what() << '\n';
        return kExitSimulation;
    }
    return kExitOk;
}

int cmd_wigner(const std::string& result_path, int mode) {
    try {
        std::ifstream in(result_path);
        if (!in) throw ConfigError("cannot open result file: " + result_path);
        json j;
        in >> j;
        if (!j.contains("snapshot"))
            throw SimulationError("result file carries no state snapshot");
        const StateSnapshot snap = snapshot_from_json(j["snapshot"]);
        if (mode < 0 || mode >= snap.n_modes) throw ConfigError("mode out of range");
        write_wigner_outputs(snap, mode, fs::path(result_path).parent_path());
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "simulation error: " << e.what() << '\n';
        return kExitSimulation;
    }
}

}  // namespace ccv::harness
