#include "ccv/cmaes.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace ccv::cmaes {

int default_population(int dim) {
    return 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(dim))));
}

namespace {

void refresh_spectral(CmaState& s) {
    Eigen::SelfAdjointEigenSolver<RMatrix> es(s.cov);
    RVector lam = es.eigenvalues();
    const double top = std::max(lam.maxCoeff(), 1e-300);
    for (Eigen::Index i = 0; i < lam.size(); ++i)
        lam(i) = std::sqrt(std::max(lam(i), 1e-14 * top));  // covariance repair
    s.cov_basis = es.eigenvectors();
    s.cov_scale = lam;
    s.cov = s.cov_basis * lam.cwiseProduct(lam).asDiagonal() * s.cov_basis.transpose();
}

}  // namespace

CmaState init(int dim, const RVector& x0, double sigma0, int lambda_pop) {
    if (dim < 1) throw DimensionError("CMA-ES dimension must be >= 1");
    if (!(sigma0 > 0.0)) throw DimensionError("sigma0 must be > 0");
    if (x0.size() != dim) throw DimensionError("x0 length mismatch");
    CmaState s;
    s.dim = dim;
    s.mean = x0;
    s.sigma = sigma0;
    s.cov = RMatrix::Identity(dim, dim);
    s.path_sigma = RVector::Zero(dim);
    s.path_cov = RVector::Zero(dim);
    s.generation = 0;
    s.lambda_pop = lambda_pop > 0 ? lambda_pop : default_population(dim);
    s.mu = s.lambda_pop / 2;

    RVector w(s.mu);
    for (int i = 0; i < s.mu; ++i)
        w(i) = std::log(s.mu + 0.5) - std::log(static_cast<double>(i + 1));
    w /= w.sum();
    s.weights = w;
    s.mu_eff = 1.0 / w.squaredNorm();

    const double n = dim;
    s.c_sigma = (s.mu_eff + 2.0) / (n + s.mu_eff + 5.0);
    s.d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((s.mu_eff - 1.0) / (n + 1.0)) - 1.0) + s.c_sigma;
    s.c_cov_path = (4.0 + s.mu_eff / n) / (n + 4.0 + 2.0 * s.mu_eff / n);
    s.c1 = 2.0 / ((n + 1.3) * (n + 1.3) + s.mu_eff);
    s.c_mu = std::min(1.0 - s.c1, 2.0 * (s.mu_eff - 2.0 + 1.0 / s.mu_eff) /
                                      ((n + 2.0) * (n + 2.0) + s.mu_eff));
    s.chi_n = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));
    refresh_spectral(s);
    return s;
}

std::vector<RVector> ask(const CmaState& state, Rng& rng) {
    std::vector<RVector> out;
    out.reserve(state.lambda_pop);
    for (int k = 0; k < state.lambda_pop; ++k) {
        const RVector z = rng.normal_vector(state.dim);
        out.push_back(state.mean +
                      state.sigma * (state.cov_basis * state.cov_scale.cwiseProduct(z)));
    }
    return out;
}

CmaState tell(const CmaState& state, const std::vector<RVector>& candidates,
              const std::vector<double>& fitnesses) {
    if (candidates.size() != static_cast<std::size_t>(state.lambda_pop) ||
        fitnesses.size() != candidates.size())
        throw DimensionError("tell: population size mismatch");

    std::vector<int> idx(candidates.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        const bool fa = std::isfinite(fitnesses[a]), fb = std::isfinite(fitnesses[b]);
        if (fa != fb) return fa;  // non-finite fitness ranks worst
        if (!fa) return false;
        return fitnesses[a] < fitnesses[b];
    });

    CmaState s = state;
    const int n = s.dim;

    // y_i = (x_i - m) / sigma for the mu best
    RVector y_w = RVector::Zero(n);
    std::vector<RVector> ys(s.mu);
    for (int i = 0; i < s.mu; ++i) {
        ys[i] = (candidates[idx[i]] - state.mean) / state.sigma;
        y_w += s.weights(i) * ys[i];
    }

    s.mean = state.mean + state.sigma * y_w;

    // C^{-1/2} y_w through the cached spectral factors
    RVector c_inv_sqrt_y =
        state.cov_basis * state.cov_scale.cwiseInverse().cwiseProduct(
                              state.cov_basis.transpose() * y_w);
    s.path_sigma = (1.0 - s.c_sigma) * state.path_sigma +
                   std::sqrt(s.c_sigma * (2.0 - s.c_sigma) * s.mu_eff) * c_inv_sqrt_y;

    const double ps_norm = s.path_sigma.norm();
    s.sigma = state.sigma * std::exp((s.c_sigma / s.d_sigma) * (ps_norm / s.chi_n - 1.0));

    const double denom = std::sqrt(
        1.0 - std::pow(1.0 - s.c_sigma, 2.0 * (state.generation + 1)));
    const bool h_sigma = ps_norm / denom < (1.4 + 2.0 / (n + 1.0)) * s.chi_n;

    s.path_cov = (1.0 - s.c_cov_path) * state.path_cov;
    if (h_sigma)
        s.path_cov += std::sqrt(s.c_cov_path * (2.0 - s.c_cov_path) * s.mu_eff) * y_w;

    RMatrix rank_mu = RMatrix::Zero(n, n);
    for (int i = 0; i < s.mu; ++i) rank_mu += s.weights(i) * (ys[i] * ys[i].transpose());

    const double c1a = s.c1 * (1.0 - (h_sigma ? 0.0 : 1.0) * s.c_cov_path * (2.0 - s.c_cov_path));
    s.cov = (1.0 - c1a - s.c_mu) * state.cov +
            s.c1 * (s.path_cov * s.path_cov.transpose()) + s.c_mu * rank_mu;
    s.cov = 0.5 * (s.cov + RMatrix(s.cov.transpose())).eval();

    s.generation = state.generation + 1;
    refresh_spectral(s);
    return s;
}

std::pair<RVector, double> minimize(const std::function<double(const RVector&)>& f,
                                    const RVector& x0, double sigma0, int generations,
                                    std::uint64_t seed) {
    CmaState s = init(static_cast<int>(x0.size()), x0, sigma0);
    Rng rng(seed);
    RVector best_x = x0;
    double best_f = f(x0);
    for (int g = 0; g < generations; ++g) {
        const auto cands = ask(s, rng);
        std::vector<double> fits(cands.size());
        for (std::size_t i = 0; i < cands.size(); ++i) {
            fits[i] = f(cands[i]);
            if (std::isfinite(fits[i]) && fits[i] < best_f) {
                best_f = fits[i];
                best_x = cands[i];
            }
        }
        s = tell(s, cands, fits);
    }
    return {best_x, best_f};
}

}  // namespace cmaes
