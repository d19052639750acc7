#include "ccv/qaoa.hpp"

#include <chrono>
#include <cmath>

namespace ccv::qaoa {

Measurement resolve(const QaoaConfig& config) {
    if (config.measurement) return *config.measurement;
    return config.backend == Backend::Gaussian ? Measurement::Heterodyne
                                               : Measurement::TwoPhaseHomodyne;
}

namespace {

void validate_config(const EncodedProblem& encoded, const QaoaConfig& config) {
    if (config.depth < 1) throw ConfigError("depth must be >= 1");
    if (config.shots < 1) throw ConfigError("shots must be >= 1");
    if (config.max_iters < 0) throw ConfigError("max_iters must be >= 0");
    if (!(config.tolerance > 0.0)) throw ConfigError("tolerance must be > 0");
    if (config.backend == Backend::Fock && config.cutoff < 2)
        throw ConfigError("Fock backend requires cutoff >= 2");
    if (config.backend == Backend::Gaussian && encoded.hamiltonian.total_degree() > 2)
        throw ConfigError("Gaussian backend requires a Hamiltonian of degree <= 2");
    if (config.backend == Backend::Fock && resolve(config) == Measurement::Heterodyne)
        throw ConfigError("Fock backend uses two-phase homodyne, not heterodyne");
}

QuadraturePolynomial mixer_of(const EncodedProblem& encoded, const QaoaConfig& config) {
    if (config.mixer) {
        if (config.mixer->n_modes() != encoded.n_modes)
            throw ConfigError("mixer mode count must match the encoded problem");
        return *config.mixer;
    }
    return QuadraturePolynomial::kinetic_mixer(encoded.n_modes);
}

/// Structural commutation check for quadratic Hamiltonians: the affine
/// Heisenberg flows commute iff the generator matrices, their action on the
/// linear parts, and the symplectic pairing of the linear parts all vanish.
bool gaussian_commute(const QuadraturePolynomial& a, const QuadraturePolynomial& b,
                      const HbarConvention& conv) {
    const double eps = 1e-6;
    auto generator = [&](const QuadraturePolynomial& poly) {
        auto [s, d] = gaussian::symplectic_of(poly, eps, conv);
        const RMatrix g = (s - RMatrix::Identity(s.rows(), s.cols())) / eps;
        const RVector c = d / eps;
        return std::pair<RMatrix, RVector>{g, c};
    };
    auto [ga, ca] = generator(a);
    auto [gb, cb] = generator(b);
    const double scale = std::max({1.0, ga.norm(), gb.norm(), ca.norm(), cb.norm()});
    const double bracket = (ga * gb - gb * ga).norm();
    const double cross = (ga * cb - gb * ca).norm();
    // c-number part of [H_a, H_b] from the symplectic pairing of the drifts
    const int n_modes = static_cast<int>(ga.rows()) / 2;
    const double pairing = std::abs(ca.dot(gaussian::symplectic_form(n_modes) * cb));
    const double tol = 1e-8 * scale * scale;
    return bracket < tol && cross < tol && pairing < tol;
}

}  // namespace

LayerPlan build_layers(const EncodedProblem& encoded, const QaoaConfig& config) {
    validate_config(encoded, config);
    LayerPlan plan;
    plan.cost = encoded.hamiltonian;
    plan.mixer = mixer_of(encoded, config);
    plan.depth = config.depth;
    if (plan.cost.empty()) throw ConfigError("cost Hamiltonian is empty");

    bool commute;
    if (config.backend == Backend::Fock) {
        // verified on Fock matrices at a fixed probe cutoff: the statement is
        // operator-level, and tiny run cutoffs (D = 2) truncate every
        // quadratic to a multiple of the identity
        const int probe = encoded.n_modes > 2 ? 4 : 8;
        const CMatrix hc = ops::hamiltonian_matrix(plan.cost, probe, config.conv);
        const CMatrix hm = ops::hamiltonian_matrix(plan.mixer, probe, config.conv);
        const double scale = std::max(1.0, hc.norm() * hm.norm());
        commute = ops::commutator(hm, hc).norm() < 1e-10 * scale;
    } else {
        commute = gaussian_commute(plan.mixer, plan.cost, config.conv);
    }
    if (commute)
        throw ConfigError("degenerate-mixer: [H_M, H_C] = 0 gives no exploration");
    return plan;
}

namespace {

double phase_squeeze(const QaoaConfig& config, PreparePhase phase) {
    switch (phase) {
        case PreparePhase::Single:
            return config.squeeze_r;
        case PreparePhase::RealPart:
            return -std::abs(config.squeeze_r);
        case PreparePhase::ImagPart:
            return std::abs(config.squeeze_r);
    }
    return config.squeeze_r;
}

}  // namespace

GaussianState prepare_initial_gaussian(const QaoaConfig& config, PreparePhase phase, int n_modes) {
    GaussianState s = gaussian::vacuum(n_modes, config.conv);
    const double r = phase_squeeze(config, phase);
    if (r != 0.0)
        for (int m = 0; m < n_modes; ++m) s = gaussian::squeeze(s, m, r);
    return s;
}

FockState prepare_initial_fock(const QaoaConfig& config, PreparePhase phase, int n_modes) {
    FockState s = fock::vacuum_state(n_modes, config.cutoff, config.conv);
    const double r = phase_squeeze(config, phase);
    if (r != 0.0)
        for (int m = 0; m < n_modes; ++m) s = fock::apply_gate(s, gate::squeezing(m, r));
    return s;
}

namespace {

/// Precompiled circuit machinery shared by estimate_cost and run().
class Engine {
public:
    Engine(const EncodedProblem& encoded, const QaoaConfig& config)
        : enc_(encoded), cfg_(config), meas_(resolve(config)), plan_(build_layers(encoded, config)) {
        if (cfg_.backend == Backend::Fock) {
            cost_ev_.emplace(plan_.cost, cfg_.cutoff, cfg_.conv);
            mixer_ev_.emplace(plan_.mixer, cfg_.cutoff, cfg_.conv);
        }
    }

    const LayerPlan& plan() const { return plan_; }
    Measurement measurement() const { return meas_; }

    GaussianState gaussian_final(const RVector& params, PreparePhase phase) const {
        GaussianState s = prepare_initial_gaussian(cfg_, phase, enc_.n_modes);
        for (int j = 0; j < cfg_.depth; ++j) {
            s = gaussian::quadratic_evolution(s, plan_.cost, params(j));
            s = gaussian::quadratic_evolution(s, plan_.mixer, params(cfg_.depth + j));
        }
        return s;
    }

    FockState fock_final(const RVector& params, PreparePhase phase) const {
        FockState s = initial_fock(phase);
        for (int j = 0; j < cfg_.depth; ++j) {
            s = cost_ev_->apply(s, params(j));
            s = mixer_ev_->apply(s, params(cfg_.depth + j));
        }
        return s;
    }

    /// Interleaved sample matrix of `count` shots at the given parameters.
    RMatrix draw_samples(const RVector& params, int count, Rng& rng) const {
        const int n = enc_.n_modes;
        if (cfg_.backend == Backend::Gaussian && meas_ == Measurement::Heterodyne) {
            return gaussian::heterodyne_sample(gaussian_final(params, PreparePhase::Single), count,
                                               rng);
        }
        RMatrix xs, ps;
        if (cfg_.backend == Backend::Gaussian) {
            xs = gaussian::homodyne_sample_joint(gaussian_final(params, PreparePhase::RealPart),
                                                 gaussian::Quadrature::X, count, rng);
            ps = gaussian::homodyne_sample_joint(gaussian_final(params, PreparePhase::ImagPart),
                                                 gaussian::Quadrature::P, count, rng);
        } else {
            xs = fock::homodyne_sample_joint(fock_final(params, PreparePhase::RealPart),
                                             fock::Quadrature::X, count, rng);
            ps = fock::homodyne_sample_joint(fock_final(params, PreparePhase::ImagPart),
                                             fock::Quadrature::P, count, rng);
        }
        RMatrix out(count, 2 * n);
        for (int k = 0; k < count; ++k)
            for (int m = 0; m < n; ++m) {
                out(k, 2 * m) = xs(k, m);
                out(k, 2 * m + 1) = ps(k, m);
            }
        return out;
    }

    CostEstimate estimate(const RVector& params, Rng& rng, int shot_multiplier = 1) const {
        CostEstimate est;
        est.samples = draw_samples(params, cfg_.shots * std::max(1, shot_multiplier), rng);
        double acc = 0.0;
        for (Eigen::Index k = 0; k < est.samples.rows(); ++k)
            acc += enc_.classical_cost_interleaved(est.samples.row(k).transpose());
        est.value = acc / static_cast<double>(est.samples.rows());
        if (meas_ == Measurement::Heterodyne && cfg_.heterodyne_bias_correction)
            est.value -= (cfg_.conv.hbar / 2.0) * enc_.hamiltonian.quadratic_coefficient_trace();
        return est;
    }

    StateSnapshot snapshot(const RVector& params) const {
        StateSnapshot snap;
        snap.backend = cfg_.backend;
        snap.n_modes = enc_.n_modes;
        snap.conv = cfg_.conv;
        if (cfg_.backend == Backend::Gaussian) {
            const GaussianState s = gaussian_final(params, PreparePhase::Single);
            snap.mean = s.mean;
            snap.cov = s.cov;
        } else {
            const FockState s = fock_final(params, PreparePhase::Single);
            snap.cutoff = s.cutoff;
            snap.amplitudes = s.amplitudes;
            trunc_loss_ = s.cumulative_trunc_loss;
            cutoff_warning_ = s.cutoff_warning;
        }
        return snap;
    }

    double truncation_loss() const { return trunc_loss_; }
    bool cutoff_warning() const { return cutoff_warning_; }

private:
    const FockState& initial_fock(PreparePhase phase) const {
        auto& slot = fock_init_[static_cast<int>(phase)];
        if (!slot) slot = prepare_initial_fock(cfg_, phase, enc_.n_modes);
        return *slot;
    }

    EncodedProblem enc_;
    QaoaConfig cfg_;
    Measurement meas_;
    LayerPlan plan_;
    std::optional<fock::FockEvolver> cost_ev_, mixer_ev_;
    mutable std::array<std::optional<FockState>, 3> fock_init_;
    mutable double trunc_loss_ = 0.0;
    mutable bool cutoff_warning_ = false;
};

}  // namespace

CostEstimate estimate_cost(const EncodedProblem& encoded, const QaoaConfig& config,
                           const RVector& params, Rng& rng) {
    if (params.size() != 2 * config.depth)
        throw ConfigError("parameter vector must have length 2*depth");
    Engine engine(encoded, config);
    return engine.estimate(params, rng);
}

double success_probability(const RMatrix& samples, const EncodedProblem& encoded,
                           double reference_value, double tol) {
    if (samples.rows() == 0) throw SimulationError("success_probability: empty sample set");
    const double threshold = reference_value + tol * std::max(1.0, std::abs(reference_value));
    Eigen::Index hits = 0;
    for (Eigen::Index k = 0; k < samples.rows(); ++k)
        if (encoded.classical_cost_interleaved(samples.row(k).transpose()) <= threshold) ++hits;
    return static_cast<double>(hits) / static_cast<double>(samples.rows());
}

RunResult run(const EncodedProblem& encoded, const QaoaConfig& config) {
    const auto t_start = std::chrono::steady_clock::now();
    Engine engine(encoded, config);
    const int q = config.depth;
    const int dim = 2 * q;

    Rng init_rng(derive_seed(config.seed, 0x1217));
    RVector theta0(dim);
    for (int i = 0; i < dim; ++i)
        theta0(i) = init_rng.uniform(-config.init_param_range, config.init_param_range);

    RunResult result;
    RVector best_params = theta0;
    double best_fitness = std::numeric_limits<double>::infinity();

    if (config.max_iters > 0) {
        CmaState cma = cmaes::init(dim, theta0, config.cma_sigma0, config.population);
        Rng ask_rng(derive_seed(config.seed, 0xA5C));
        double prev_cost = std::numeric_limits<double>::quiet_NaN();
        for (int t = 0; t < config.max_iters; ++t) {
            const auto candidates = cmaes::ask(cma, ask_rng);
            std::vector<double> fitness(candidates.size());
            int gen_best = -1;
            RVector gen_best_sample;
            double gen_best_sample_cost = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < candidates.size(); ++i) {
                Rng eval_rng(derive_seed(config.seed, static_cast<std::uint64_t>(t) + 1,
                                         static_cast<std::uint64_t>(i)));
                const CostEstimate est =
                    engine.estimate(candidates[i], eval_rng, config.eval_shot_multiplier);
                fitness[i] = est.value;
                if (gen_best < 0 || est.value < fitness[static_cast<std::size_t>(gen_best)])
                    gen_best = static_cast<int>(i);
                for (Eigen::Index k = 0; k < est.samples.rows(); ++k) {
                    const double c =
                        encoded.classical_cost_interleaved(est.samples.row(k).transpose());
                    if (c < gen_best_sample_cost) {
                        gen_best_sample_cost = c;
                        gen_best_sample = est.samples.row(k).transpose();
                    }
                }
            }
            const double gen_cost = fitness[static_cast<std::size_t>(gen_best)];
            if (!std::isfinite(gen_cost))
                throw SimulationError("non-finite cost estimate; aborting run");
            if (gen_cost < best_fitness) {
                best_fitness = gen_cost;
                best_params = candidates[static_cast<std::size_t>(gen_best)];
            }

            IterationRecord rec;
            rec.t = t;
            rec.gamma = candidates[static_cast<std::size_t>(gen_best)].head(q);
            rec.beta = candidates[static_cast<std::size_t>(gen_best)].tail(q);
            rec.cost_estimate = gen_cost;
            rec.best_sample = gen_best_sample;
            rec.best_sample_cost = gen_best_sample_cost;
            result.trace.push_back(std::move(rec));

            if (t > 0 && std::abs(gen_cost - prev_cost) < config.tolerance) break;
            prev_cost = gen_cost;
            cma = cmaes::tell(cma, candidates, fitness);
        }
    }

    result.gamma_opt = best_params.head(q);
    result.beta_opt = best_params.tail(q);
    result.iterations_used = static_cast<int>(result.trace.size());

    const int n_final = config.final_samples > 0 ? config.final_samples : config.shots;
    Rng final_rng(derive_seed(config.seed, 0xF17A1));
    result.final_samples = engine.draw_samples(best_params, n_final, final_rng);

    double best_cost = std::numeric_limits<double>::infinity();
    Eigen::Index best_row = 0;
    for (Eigen::Index k = 0; k < result.final_samples.rows(); ++k) {
        const double c =
            encoded.classical_cost_interleaved(result.final_samples.row(k).transpose());
        if (c < best_cost) {
            best_cost = c;
            best_row = k;
        }
    }
    result.best_sample = result.final_samples.row(best_row).transpose();
    result.best_sample_cost = best_cost;

    const auto oracle =
        encoding::classical_oracle(encoded, encoding::OracleBudget{0, config.oracle_box});
    result.reference_argmin = oracle.argmin;
    result.reference_value = oracle.value;
    result.success_probability = success_probability(result.final_samples, encoded, oracle.value,
                                                     config.success_tol);

    result.snapshot = engine.snapshot(best_params);
    result.truncation_loss = engine.truncation_loss();
    result.cutoff_warning = engine.cutoff_warning();
    result.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                               t_start)
                         .count();
    return result;
}

ComparisonResult compare_baseline(const ComplexQuadraticProblem& problem,
                                  const QaoaConfig& config) {
    ComparisonResult out;
    const EncodedProblem ccv = encoding::encode_complex_quadratic(problem);
    const EncodedProblem baseline = encoding::encode_cv_baseline(problem);
    out.ccv_modes = ccv.n_modes;
    out.baseline_modes = baseline.n_modes;
    if (config.backend == Backend::Fock) {
        out.ccv_hilbert_dim = ipow(config.cutoff, ccv.n_modes);
        out.baseline_hilbert_dim = ipow(config.cutoff, baseline.n_modes);
    } else {
        out.ccv_hilbert_dim = 2 * ccv.n_modes;
        out.baseline_hilbert_dim = 2 * baseline.n_modes;
    }
    out.ccv = run(ccv, config);
    out.baseline = run(baseline, config);
    out.ccv_wall_ms = out.ccv.wall_ms;
    out.baseline_wall_ms = out.baseline.wall_ms;
    return out;
}

}  // namespace ccv::qaoa

namespace ccv {
Measurement resolve_measurement(const QaoaConfig& config) { return qaoa::resolve(config); }
}  // namespace ccv
