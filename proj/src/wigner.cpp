#include "ccv/wigner.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace ccv::wigner {

double default_half_width(int cutoff, const HbarConvention& conv) {
    return 4.0 + std::sqrt(conv.hbar * (2.0 * cutoff + 1.0));
}

namespace {

RVector linspace(double lo, double hi, int n) {
    RVector v(n);
    for (int i = 0; i < n; ++i) v(i) = lo + (hi - lo) * i / (n - 1.0);
    return v;
}

void finalize(WignerGrid& grid) {
    grid.negativity_volume = grid.values.cwiseAbs().sum() * grid.dx() * grid.dp() - 1.0;
}

}  // namespace

WignerGrid wigner_fock(const FockState& state, int mode, const GridSpec& spec) {
    const int d = state.cutoff;
    const double hbar = state.conv.hbar;
    const double l = spec.half_width > 0.0 ? spec.half_width : default_half_width(d, state.conv);
    WignerGrid grid;
    grid.conv = state.conv;
    grid.mode = mode;
    grid.xs = linspace(-l, l, spec.points);
    grid.ps = linspace(-l, l, spec.points);
    grid.values.resize(spec.points, spec.points);

    const CMatrix rho = fock::reduced_density(state, mode);

    // series coefficient sqrt(m! n!) / 2^{(m+n)/2} * (-2)^k / ((m-k)!(n-k)!k!)
    const auto coeff = [](int m, int n, int k) {
        const double lg = 0.5 * (std::lgamma(m + 1.0) + std::lgamma(n + 1.0)) -
                          std::lgamma(m - k + 1.0) - std::lgamma(n - k + 1.0) -
                          std::lgamma(k + 1.0) - 0.5 * (m + n) * std::log(2.0) +
                          k * std::log(2.0);
        return (k % 2 == 0 ? 1.0 : -1.0) * std::exp(lg);
    };

    std::vector<std::vector<std::vector<double>>> cmnk(d);
    for (int m = 0; m < d; ++m) {
        cmnk[m].resize(d);
        for (int n = 0; n < d; ++n) {
            const int kmax = std::min(m, n);
            cmnk[m][n].resize(kmax + 1);
            for (int k = 0; k <= kmax; ++k) cmnk[m][n][k] = coeff(m, n, k);
        }
    }

    std::vector<Complex> apow(d), bpow(d);
    for (int i = 0; i < spec.points; ++i) {
        const double p = grid.ps(i);
        for (int j = 0; j < spec.points; ++j) {
            const double x = grid.xs(j);
            const Complex a = 2.0 * Complex(x, p) / std::sqrt(hbar);
            const Complex b = std::conj(a);
            apow[0] = bpow[0] = 1.0;
            for (int k = 1; k < d; ++k) {
                apow[k] = apow[k - 1] * a;
                bpow[k] = bpow[k - 1] * b;
            }
            const double env = std::exp(-(x * x + p * p) / hbar) / (M_PI * hbar);

            // W = sum_{m,n} K_{mn} rho_{nm}; Hermitian symmetry halves the work
            double acc = 0.0;
            for (int m = 0; m < d; ++m) {
                for (int n = m; n < d; ++n) {
                    Complex kern = 0.0;
                    for (int k = 0; k <= m; ++k)
                        kern += cmnk[m][n][k] * apow[m - k] * bpow[n - k];
                    const Complex contrib = kern * rho(n, m);
                    acc += (n == m) ? contrib.real() : 2.0 * contrib.real();
                }
            }
            grid.values(i, j) = env * acc;
        }
    }
    finalize(grid);
    if (grid.mass() < 0.999)
        throw SimulationError("grid-too-small: Wigner grid misses state mass");
    return grid;
}

WignerGrid wigner_gaussian(const GaussianState& state, int mode, const GridSpec& spec) {
    const double l = spec.half_width > 0.0
                         ? spec.half_width
                         : 4.0 + std::sqrt(state.conv.hbar) +
                               state.mode_cov(mode).diagonal().cwiseSqrt().maxCoeff() * 4.0 +
                               std::max(std::abs(state.mode_mean(mode).first),
                                        std::abs(state.mode_mean(mode).second));
    WignerGrid grid;
    grid.conv = state.conv;
    grid.mode = mode;
    grid.xs = linspace(-l, l, spec.points);
    grid.ps = linspace(-l, l, spec.points);
    grid.values.resize(spec.points, spec.points);

    const Eigen::Matrix2d cov = state.mode_cov(mode);
    const Eigen::Matrix2d prec = cov.inverse();
    const double norm = 1.0 / (2.0 * M_PI * std::sqrt(cov.determinant()));
    const auto [mx, mp] = state.mode_mean(mode);
    for (int i = 0; i < spec.points; ++i)
        for (int j = 0; j < spec.points; ++j) {
            const Eigen::Vector2d delta(grid.xs(j) - mx, grid.ps(i) - mp);
            grid.values(i, j) = norm * std::exp(-0.5 * delta.dot(prec * delta));
        }
    finalize(grid);
    return grid;
}

std::pair<double, double> marginal_check(const WignerGrid& grid, const FockState& state,
                                         int mode) {
    const RVector x_marg = grid.values.colwise().sum() * grid.dp();
    const RVector p_marg = grid.values.rowwise().sum() * grid.dx();
    const RVector x_dens = fock::marginal_density(state, fock::Quadrature::X, mode, grid.xs);
    const RVector p_dens = fock::marginal_density(state, fock::Quadrature::P, mode, grid.ps);
    return {(x_marg - x_dens).cwiseAbs().maxCoeff(), (p_marg - p_dens).cwiseAbs().maxCoeff()};
}

void write_csv(const WignerGrid& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SimulationError("cannot open " + path);
    out.precision(12);
    for (Eigen::Index j = 0; j < grid.xs.size(); ++j) out << ',' << grid.xs(j);
    out << '\n';
    for (Eigen::Index i = 0; i < grid.ps.size(); ++i) {
        out << grid.ps(i);
        for (Eigen::Index j = 0; j < grid.xs.size(); ++j) out << ',' << grid.values(i, j);
        out << '\n';
    }
}

void write_json_sidecar(const WignerGrid& grid, int cutoff, const std::string& path) {
    nlohmann::json j{{"hbar", grid.conv.hbar},
                     {"cutoff", cutoff},
                     {"mode", grid.mode},
                     {"negativity_volume", grid.negativity_volume}};
    std::ofstream out(path);
    if (!out) throw SimulationError("cannot open " + path);
    out << j.dump(2) << '\n';
}

}  // namespace ccv::wigner
