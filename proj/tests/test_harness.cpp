#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ccv/harness.hpp"

using namespace ccv;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json tiny_config(const std::string& outdir) {
    json j = {{"problem", {{"preset", "quadratic-n1"}}},
              {"encoding", "ccv"},
              {"qaoa",
               {{"depth", 1},
                {"shots", 10},
                {"max_iters", 3},
                {"seed", 4},
                {"backend", "gaussian"},
                {"squeeze_r", 0.1}}},
              {"output_dir", outdir},
              {"wigner", {{"enabled", true}, {"modes", {0}}}}};
    return j;
}

std::string write_config(const json& j, const std::string& name) {
    const std::string path = (fs::temp_directory_path() / name).string();
    std::ofstream out(path);
    out << j.dump(2);
    return path;
}

}  // namespace

TEST_CASE("config parsing, presets and unknown keys") {
    const auto cfg = config::parse(tiny_config("/tmp/ccv_run"));
    CHECK(cfg.encoded.n_modes == 1);
    CHECK(cfg.qaoa.depth == 1);
    CHECK(cfg.quadratic.has_value());

    json bad = tiny_config("/tmp/ccv_run");
    bad["qaoa"]["shotz"] = 5;
    CHECK_THROWS_AS(config::parse(bad), ConfigError);

    json bad2 = tiny_config("/tmp/ccv_run");
    bad2["problem"]["weird"] = 1;
    CHECK_THROWS_AS(config::parse(bad2), ConfigError);

    for (const char* name : {"quadratic-n1", "quadratic-n3", "constrained-quadratic",
                             "styblinski-tang-2d", "quartic-complex"}) {
        json c = {{"problem", {{"preset", name}}},
                  {"qaoa", {{"backend", "fock"}, {"cutoff", 4}}}};
        CHECK_NOTHROW(config::parse(c));
    }

    // constrained preset carries the penalty into the Hamiltonian
    json c = {{"problem", {{"preset", "constrained-quadratic"}}}};
    const auto con = config::parse(c);
    CHECK(con.encoded.penalty_lambda == doctest::Approx(10.0));
    CHECK(con.encoded.n_modes == 2);
}

TEST_CASE("resolved config round-trips idempotently") {
    const auto cfg = config::parse(tiny_config("/tmp/ccv_run"));
    const auto cfg2 = config::parse(cfg.resolved);
    CHECK(cfg.resolved.dump() == cfg2.resolved.dump());
    CHECK(config::hash(cfg.resolved) == config::hash(cfg2.resolved));
    CHECK(config::hash(cfg.resolved).size() == 16);
}

TEST_CASE("polynomial json round trip") {
    QuadraturePolynomial q(2);
    q.add_term(1.5, {ModePower{0, 2, 0}});
    q.add_term(-0.5, {ModePower{0, 1, 0}, ModePower{1, 0, 1}});
    const auto j = config::polynomial_to_json(q);
    const auto back = config::polynomial_from_json(j);
    RVector xp(4);
    xp << 0.3, -1.0, 2.0, 0.7;
    CHECK(back.evaluate_interleaved(xp) == doctest::Approx(q.evaluate_interleaved(xp)));
}

TEST_CASE("cmd_run produces deterministic artifacts") {
    const std::string outdir = (fs::temp_directory_path() / "ccv_run_t1").string();
    fs::remove_all(outdir);
    const auto path = write_config(tiny_config(outdir), "ccv_cfg_run.json");

    harness::CliOptions opts;
    opts.config_path = path;
    REQUIRE(harness::cmd_run(opts) == harness::kExitOk);
    for (const char* f : {"result.json", "trace.csv", "samples.csv", "wigner_0.csv",
                          "wigner_0.json"})
        CHECK(fs::exists(fs::path(outdir) / f));

    json first;
    {
        std::ifstream in(fs::path(outdir) / "result.json");
        in >> first;
    }
    REQUIRE(harness::cmd_run(opts) == harness::kExitOk);
    json second;
    {
        std::ifstream in(fs::path(outdir) / "result.json");
        in >> second;
    }
    // byte-identical apart from the isolated diagnostics block
    first.erase("diagnostics");
    second.erase("diagnostics");
    CHECK(first.dump() == second.dump());

    // malformed config: exit 2
    const std::string badpath = (fs::temp_directory_path() / "ccv_bad.json").string();
    std::ofstream(badpath) << "{ not json";
    harness::CliOptions bad;
    bad.config_path = badpath;
    CHECK(harness::cmd_run(bad) == harness::kExitConfig);

    // dry run validates without executing
    harness::CliOptions dry = opts;
    dry.dry_run = true;
    CHECK(harness::cmd_run(dry) == harness::kExitOk);
}

TEST_CASE("cmd_wigner recomputes a grid from the snapshot") {
    const std::string outdir = (fs::temp_directory_path() / "ccv_run_t2").string();
    fs::remove_all(outdir);
    json cfg = tiny_config(outdir);
    cfg["wigner"]["enabled"] = false;
    const auto path = write_config(cfg, "ccv_cfg_wig.json");
    harness::CliOptions opts;
    opts.config_path = path;
    REQUIRE(harness::cmd_run(opts) == harness::kExitOk);
    const std::string result = (fs::path(outdir) / "result.json").string();
    CHECK(harness::cmd_wigner(result, 0) == harness::kExitOk);
    CHECK(fs::exists(fs::path(outdir) / "wigner_0.csv"));
    CHECK(harness::cmd_wigner(result, 5) == harness::kExitConfig);

    // a result without a snapshot is a simulation error
    json stripped;
    {
        std::ifstream in(result);
        in >> stripped;
    }
    stripped.erase("snapshot");
    const std::string nosnap = (fs::path(outdir) / "nosnap.json").string();
    std::ofstream(nosnap) << stripped.dump();
    CHECK(harness::cmd_wigner(nosnap, 0) == harness::kExitSimulation);
}

TEST_CASE("cmd_sweep writes per-cell and aggregate rows") {
    const std::string outdir = (fs::temp_directory_path() / "ccv_sweep_t").string();
    fs::remove_all(outdir);
    json cfg = tiny_config(outdir);
    cfg["wigner"]["enabled"] = false;
    cfg["seeds"] = {0, 1};
    const auto path = write_config(cfg, "ccv_cfg_sweep.json");

    harness::CliOptions opts;
    opts.config_path = path;
    opts.jobs = 2;
    REQUIRE(harness::cmd_sweep(opts, "depth", {1.0, 2.0}) == harness::kExitOk);
    std::ifstream report(fs::path(outdir) / "report.csv");
    REQUIRE(report.good());
    int lines = 0, aggregates = 0;
    std::string line;
    while (std::getline(report, line)) {
        ++lines;
        if (line.find("aggregate") != std::string::npos) ++aggregates;
    }
    CHECK(lines == 1 + 1 + 4 + 4);  // provenance, header, 2 depths x 2 seeds, aggregates
    CHECK(aggregates == 4);

    CHECK(harness::cmd_sweep(opts, "depth", {}) == harness::kExitConfig);
    CHECK(harness::cmd_sweep(opts, "bogus", {1.0}) == harness::kExitConfig);
    // cutoff sweep requires the fock backend
    CHECK(harness::cmd_sweep(opts, "cutoff", {4.0}) == harness::kExitConfig);
}

TEST_CASE("cmd_compare pairs the encodings") {
    const std::string outdir = (fs::temp_directory_path() / "ccv_cmp_t").string();
    fs::remove_all(outdir);
    json cfg = tiny_config(outdir);
    cfg["wigner"]["enabled"] = false;
    cfg["qaoa"]["backend"] = "fock";
    cfg["qaoa"]["cutoff"] = 5;
    cfg["qaoa"]["max_iters"] = 2;
    cfg["seeds"] = {0};
    const auto path = write_config(cfg, "ccv_cfg_cmp.json");
    harness::CliOptions opts;
    opts.config_path = path;
    REQUIRE(harness::cmd_compare(opts) == harness::kExitOk);
    std::ifstream report(fs::path(outdir) / "report.csv");
    std::string all((std::istreambuf_iterator<char>(report)), std::istreambuf_iterator<char>());
    CHECK(all.find("ccv") != std::string::npos);
    CHECK(all.find("cv-baseline") != std::string::npos);
}
