#include "ccv/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace ccv::config {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

Complex complex_from(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigError(where + ": complex values are [re, im] pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

json complex_to(Complex z) { return json::array({z.real(), z.imag()}); }

CMatrix cmatrix_from(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a matrix");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j[0].size());
    CMatrix m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        if (static_cast<int>(j[r].size()) != cols) throw ConfigError(where + ": ragged matrix");
        for (int c = 0; c < cols; ++c) m(r, c) = complex_from(j[r][c], where);
    }
    return m;
}

CVector cvector_from(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + ": expected a vector");
    CVector v(static_cast<int>(j.size()));
    for (int i = 0; i < v.size(); ++i) v(i) = complex_from(j[i], where);
    return v;
}

json cmatrix_to(const CMatrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to(m(r, c)));
        rows.push_back(row);
    }
    return rows;
}

json cvector_to(const CVector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to(v(i)));
    return out;
}

}  // namespace

QuadraturePolynomial polynomial_from_json(const json& j) {
    check_keys(j, {"n_modes", "terms"}, "polynomial");
    if (!j.contains("n_modes") || !j.contains("terms"))
        throw ConfigError("polynomial: needs n_modes and terms");
    QuadraturePolynomial poly(j["n_modes"].get<int>());
    for (const auto& t : j["terms"]) {
        check_keys(t, {"coeff", "factors"}, "polynomial term");
        std::vector<ModePower> factors;
        if (t.contains("factors"))
            for (const auto& f : t["factors"]) {
                check_keys(f, {"mode", "x_pow", "p_pow"}, "polynomial factor");
                factors.push_back(ModePower{f.value("mode", 0), f.value("x_pow", 0),
                                            f.value("p_pow", 0)});
            }
        poly.add_term(t["coeff"].get<double>(), std::move(factors));
    }
    return poly;
}

json polynomial_to_json(const QuadraturePolynomial& poly) {
    json terms = json::array();
    for (const auto& t : poly.terms()) {
        json factors = json::array();
        for (const auto& f : t.factors)
            factors.push_back({{"mode", f.mode}, {"x_pow", f.x_pow}, {"p_pow", f.p_pow}});
        terms.push_back({{"coeff", t.coeff}, {"factors", factors}});
    }
    return {{"n_modes", poly.n_modes()}, {"terms", terms}};
}

ComplexQuadraticProblem quadratic_family(int n) {
    ComplexQuadraticProblem p;
    p.a = CMatrix::Identity(n, n);
    p.c = CVector::Constant(n, Complex(-4.0, -4.0));
    return p;
}

json preset(const std::string& name) {
    if (name.rfind("quadratic-n", 0) == 0) {
        const int n = std::stoi(name.substr(11));
        if (n < 1 || n > 9) throw ConfigError("preset size out of range: " + name);
        const auto p = quadratic_family(n);
        return {{"kind", "complex-quadratic"}, {"a", cmatrix_to(p.a)}, {"c", cvector_to(p.c)}};
    }
    if (name == "constrained-quadratic") {
        CMatrix a(2, 2);
        a << Complex(1, 0), Complex(0.5, -1.0), Complex(0.5, 1.0), Complex(2, 0);
        const double s10 = std::sqrt(10.0);
        CMatrix b = (1.0 / s10) * CMatrix::Identity(2, 2);
        CVector d(2);
        d << Complex(1.0 / (2.0 * s10), -s10 / 4.0), Complex(3.0 / (2.0 * s10), 1.0 / s10);
        return {{"kind", "complex-quadratic"},
                {"a", cmatrix_to(a)},
                {"c", cvector_to(CVector::Zero(2))},
                {"equalities", {{"c_mat", cmatrix_to(b)}, {"d", cvector_to(d)}}},
                {"penalty_lambda", 10.0}};
    }
    if (name == "styblinski-tang-2d") {
        json terms = json::array();
        const auto st = encoding::styblinski_tang(2);
        for (const auto& t : st.terms)
            terms.push_back({{"coeff", t.coeff}, {"powers", t.powers}});
        return {{"kind", "real-multivariate"},
                {"real_polynomial", {{"n_vars", 2}, {"terms", terms}}}};
    }
    if (name == "quartic-complex") {
        return {{"kind", "quartic-complex"},
                {"quartic",
                 {{"h", complex_to(Complex(0, 0))},
                  {"b", complex_to(Complex(3, 0))},
                  {"c", complex_to(Complex(2, -2))}}}};
    }
    throw ConfigError("unknown preset: " + name);
}

namespace {

encoding::RealPolynomial real_poly_from(const json& j) {
    check_keys(j, {"n_vars", "terms"}, "real_polynomial");
    encoding::RealPolynomial f;
    f.n_vars = j.at("n_vars").get<int>();
    for (const auto& t : j.at("terms")) {
        check_keys(t, {"coeff", "powers"}, "real_polynomial term");
        encoding::RealPolynomial::Term term;
        term.coeff = t.at("coeff").get<double>();
        term.powers = t.at("powers").get<std::vector<int>>();
        f.terms.push_back(std::move(term));
    }
    return f;
}

}  // namespace

ExperimentConfig parse(const json& root) {
    check_keys(root, {"problem", "encoding", "qaoa", "output_dir", "seeds", "wigner"}, "config");
    if (!root.contains("problem")) throw ConfigError("config: missing 'problem'");

    ExperimentConfig cfg;

    json prob = root["problem"];
    check_keys(prob,
               {"kind", "preset", "a", "c", "equalities", "penalty_lambda", "real_polynomial",
                "pad_odd", "quartic", "slack_inequalities", "swish"},
               "problem");
    if (prob.value("kind", "") == "preset" || prob.contains("preset")) {
        json merged = preset(prob.at("preset").get<std::string>());
        // explicit keys override the preset's
        for (const auto& [key, value] : prob.items())
            if (key != "preset" && key != "kind") merged[key] = value;
        prob = merged;
    }
    cfg.problem_kind = prob.value("kind", "complex-quadratic");

    const std::string encoding_kind = root.value("encoding", "ccv");
    if (encoding_kind != "ccv" && encoding_kind != "cv-baseline")
        throw ConfigError("encoding must be 'ccv' or 'cv-baseline'");

    if (cfg.problem_kind == "complex-quadratic") {
        if (!prob.contains("a") || !prob.contains("c"))
            throw ConfigError("complex-quadratic problem needs 'a' and 'c'");
        ComplexQuadraticProblem p;
        p.a = cmatrix_from(prob["a"], "problem.a");
        p.c = cvector_from(prob["c"], "problem.c");
        cfg.quadratic = p;
        cfg.encoded = encoding_kind == "ccv" ? encoding::encode_complex_quadratic(p)
                                             : encoding::encode_cv_baseline(p);
        if (prob.contains("equalities")) {
            check_keys(prob["equalities"], {"c_mat", "d"}, "equalities");
            AffineEqualities eq;
            eq.c_mat = cmatrix_from(prob["equalities"].at("c_mat"), "equalities.c_mat");
            eq.d = cvector_from(prob["equalities"].at("d"), "equalities.d");
            const double lambda = prob.value("penalty_lambda", 1.0);
            cfg.encoded = encoding::apply_equality_penalty(cfg.encoded, eq, lambda);
        }
    } else if (cfg.problem_kind == "real-multivariate") {
        if (encoding_kind != "ccv")
            throw ConfigError("real-multivariate problems use the ccv encoding");
        cfg.encoded = encoding::encode_real_multivariate(
            real_poly_from(prob.at("real_polynomial")), prob.value("pad_odd", false));
    } else if (cfg.problem_kind == "quartic-complex") {
        if (encoding_kind != "ccv")
            throw ConfigError("quartic-complex problems use the ccv encoding");
        const json q = prob.at("quartic");
        check_keys(q, {"h", "b", "c"}, "quartic");
        cfg.encoded = encoding::encode_quartic_complex(complex_from(q.at("h"), "quartic.h"),
                                                       complex_from(q.at("b"), "quartic.b"),
                                                       complex_from(q.at("c"), "quartic.c"));
    } else {
        throw ConfigError("unknown problem kind: " + cfg.problem_kind);
    }

    if (prob.contains("slack_inequalities"))
        for (const auto& hj : prob["slack_inequalities"])
            cfg.encoded = encoding::apply_slack_reformulation(cfg.encoded,
                                                              polynomial_from_json(hj),
                                                              prob.value("penalty_lambda", 1.0));
    if (prob.contains("swish"))
        for (const auto& sj : prob["swish"]) {
            check_keys(sj, {"h", "lambda", "taylor_degree"}, "swish");
            cfg.encoded = encoding::apply_swish_penalty(cfg.encoded,
                                                        polynomial_from_json(sj.at("h")),
                                                        sj.value("lambda", 1.0),
                                                        sj.value("taylor_degree", 0));
        }

    json q = root.value("qaoa", json::object());
    check_keys(q,
               {"depth", "shots", "squeeze_r", "backend", "cutoff", "tolerance", "max_iters",
                "seed", "hbar", "measurement", "success_tol", "heterodyne_bias_correction",
                "final_samples", "init_param_range", "cma_sigma0", "population",
                "eval_shot_multiplier", "oracle_box", "mixer"},
               "qaoa");
    QaoaConfig& qc = cfg.qaoa;
    qc.depth = q.value("depth", 1);
    qc.shots = q.value("shots", 50);
    qc.squeeze_r = q.value("squeeze_r", 0.0);
    const std::string backend = q.value("backend", "gaussian");
    if (backend == "gaussian")
        qc.backend = Backend::Gaussian;
    else if (backend == "fock")
        qc.backend = Backend::Fock;
    else
        throw ConfigError("backend must be 'gaussian' or 'fock'");
    qc.cutoff = q.value("cutoff", 10);
    qc.tolerance = q.value("tolerance", 1e-6);
    qc.max_iters = q.value("max_iters", 100);
    qc.seed = q.value("seed", 0ull);
    qc.conv = HbarConvention(q.value("hbar", 2.0));
    if (q.contains("measurement")) {
        const std::string m = q["measurement"].get<std::string>();
        if (m == "heterodyne")
            qc.measurement = Measurement::Heterodyne;
        else if (m == "two-phase-homodyne")
            qc.measurement = Measurement::TwoPhaseHomodyne;
        else
            throw ConfigError("measurement must be 'heterodyne' or 'two-phase-homodyne'");
    }
    qc.success_tol = q.value("success_tol", 0.05);
    qc.heterodyne_bias_correction = q.value("heterodyne_bias_correction", false);
    qc.final_samples = q.value("final_samples", 0);
    qc.init_param_range = q.value("init_param_range", 0.1);
    qc.cma_sigma0 = q.value("cma_sigma0", 0.2);
    qc.population = q.value("population", 0);
    qc.eval_shot_multiplier = q.value("eval_shot_multiplier", 1);
    qc.oracle_box = q.value("oracle_box", 16.0);
    if (q.contains("mixer")) qc.mixer = polynomial_from_json(q["mixer"]);

    cfg.output_dir = root.value("output_dir", ".");
    cfg.seeds = root.value("seeds", std::vector<std::uint64_t>{});
    if (root.contains("wigner")) {
        check_keys(root["wigner"], {"enabled", "modes"}, "wigner");
        cfg.wigner_enabled = root["wigner"].value("enabled", false);
        cfg.wigner_modes = root["wigner"].value("modes", std::vector<int>{0});
    }

    // canonical resolved form
    json resolved;
    resolved["problem"] = prob;
    resolved["encoding"] = encoding_kind;
    resolved["qaoa"] = {{"depth", qc.depth},
                        {"shots", qc.shots},
                        {"squeeze_r", qc.squeeze_r},
                        {"backend", backend},
                        {"cutoff", qc.cutoff},
                        {"tolerance", qc.tolerance},
                        {"max_iters", qc.max_iters},
                        {"seed", qc.seed},
                        {"hbar", qc.conv.hbar},
                        {"measurement", resolve_measurement(qc) == Measurement::Heterodyne
                                            ? "heterodyne"
                                            : "two-phase-homodyne"},
                        {"success_tol", qc.success_tol},
                        {"heterodyne_bias_correction", qc.heterodyne_bias_correction},
                        {"final_samples", qc.final_samples},
                        {"init_param_range", qc.init_param_range},
                        {"cma_sigma0", qc.cma_sigma0},
                        {"population", qc.population},
                        {"eval_shot_multiplier", qc.eval_shot_multiplier},
                        {"oracle_box", qc.oracle_box}};
    if (qc.mixer) resolved["qaoa"]["mixer"] = polynomial_to_json(*qc.mixer);
    resolved["output_dir"] = cfg.output_dir;
    resolved["seeds"] = cfg.seeds;
    resolved["wigner"] = {{"enabled", cfg.wigner_enabled}, {"modes", cfg.wigner_modes}};
    cfg.resolved = std::move(resolved);
    return cfg;
}

ExperimentConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse(j);
}

std::string hash(const json& resolved) {
    const std::string dump = resolved.dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace ccv::config
