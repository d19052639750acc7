#include "ccv/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace ccv {

double EncodedProblem::classical_cost(std::span<const double> x, std::span<const double> p) const {
    double v = hamiltonian.evaluate(x, p) + constant;
    for (const auto& s : swish) v += encoding::swish(s.lambda * s.h.evaluate(x, p));
    return v;
}

double EncodedProblem::classical_cost_interleaved(const RVector& xp) const {
    double v = hamiltonian.evaluate_interleaved(xp) + constant;
    for (const auto& s : swish) v += encoding::swish(s.lambda * s.h.evaluate_interleaved(xp));
    return v;
}

CVector EncodedProblem::sample_to_z(const RVector& xp) const {
    CVector z(problem_vars);
    if (kind == EncodingKind::Ccv) {
        for (int j = 0; j < problem_vars; ++j) z(j) = Complex(xp(2 * j), xp(2 * j + 1));
    } else {
        for (int j = 0; j < problem_vars; ++j) z(j) = Complex(xp(4 * j), xp(4 * j + 2));
    }
    return z;
}

namespace encoding {

double swish(double u) { return u / (1.0 + std::exp(-u)); }

namespace {

/// Complex-coefficient polynomial over the 2n real quadrature variables,
/// used while expanding z-expressions; keys are per-variable powers in
/// (x0,p0,x1,p1,...) order.
class CPoly {
public:
    explicit CPoly(int n_modes) : n_(n_modes) {}

    static CPoly constant(Complex v, int n_modes) {
        CPoly p(n_modes);
        p.terms_[Key(2 * n_modes, 0)] = v;
        return p;
    }
    static CPoly variable(int idx, int n_modes) {
        CPoly p(n_modes);
        Key k(2 * n_modes, 0);
        k[idx] = 1;
        p.terms_[k] = 1.0;
        return p;
    }
    /// z_j for the CCV encoding: x_j + i p_j.
    static CPoly z_ccv(int j, int n_modes) {
        CPoly p = variable(2 * j, n_modes);
        p += Complex(0, 1) * variable(2 * j + 1, n_modes);
        return p;
    }
    /// z_j for the CV baseline: x_{2j} + i x_{2j+1} (x quadratures only).
    static CPoly z_baseline(int j, int n_modes) {
        CPoly p = variable(4 * j, n_modes);
        p += Complex(0, 1) * variable(4 * j + 2, n_modes);
        return p;
    }

    CPoly conj() const {
        CPoly out(n_);
        for (const auto& [k, v] : terms_) out.terms_[k] = std::conj(v);
        return out;
    }

    CPoly& operator+=(const CPoly& o) {
        for (const auto& [k, v] : o.terms_) {
            auto& slot = terms_[k];
            slot += v;
        }
        return *this;
    }
    friend CPoly operator+(CPoly a, const CPoly& b) { return a += b; }
    friend CPoly operator*(Complex s, CPoly p) {
        for (auto& [k, v] : p.terms_) v *= s;
        return p;
    }
    CPoly operator*(const CPoly& o) const {
        CPoly out(n_);
        for (const auto& [ka, va] : terms_)
            for (const auto& [kb, vb] : o.terms_) {
                Key k = ka;
                for (std::size_t i = 0; i < k.size(); ++i) k[i] += kb[i];
                out.terms_[k] += va * vb;
            }
        return out;
    }

    /// Real part as a quadrature polynomial; throws if residual imaginary
    /// coefficients exceed the tolerance.
    QuadraturePolynomial to_real_polynomial(int n_modes) const {
        QuadraturePolynomial out(n_modes);
        double scale = 0.0;
        for (const auto& [k, v] : terms_) scale = std::max(scale, std::abs(v));
        scale = std::max(scale, 1.0);
        for (const auto& [k, v] : terms_) {
            if (std::abs(v.imag()) > 1e-10 * scale)
                throw EncodingError(
                    "encoding-error: residual imaginary coefficient (non-Hermitian objective?)");
            if (v.real() == 0.0) continue;
            std::vector<ModePower> factors;
            for (int m = 0; m < n_modes; ++m) {
                const int xp = k[2 * m], pp = k[2 * m + 1];
                if (xp || pp) factors.push_back(ModePower{m, xp, pp});
            }
            out.add_term(v.real(), std::move(factors));
        }
        return out;
    }

private:
    using Key = std::vector<int>;
    int n_;
    std::map<Key, Complex> terms_;
};

void require_hermitian(const CMatrix& a) {
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if ((a - CMatrix(a.adjoint())).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw EncodingError("encoding-error: A must be Hermitian");
}

/// z^H A z + Re(c^H z) expanded over the chosen variable encoding.
CPoly objective_cpoly(const ComplexQuadraticProblem& problem, EncodingKind kind, int n_modes) {
    const int n = problem.n();
    if (problem.c.size() != n) throw DimensionError("c length must match A");
    require_hermitian(problem.a);
    const auto z = [&](int j) {
        return kind == EncodingKind::Ccv ? CPoly::z_ccv(j, n_modes)
                                         : CPoly::z_baseline(j, n_modes);
    };
    CPoly acc(n_modes);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            if (problem.a(j, k) == Complex(0, 0)) continue;
            acc += problem.a(j, k) * (z(j).conj() * z(k));
        }
        // Re(c^H z) = (conj(c_j) z_j + c_j conj(z_j)) / 2
        if (problem.c(j) != Complex(0, 0)) {
            acc += (0.5 * std::conj(problem.c(j))) * z(j);
            acc += (0.5 * problem.c(j)) * z(j).conj();
        }
    }
    return acc;
}

EncodedProblem finish_encoding(const QuadraturePolynomial& full, EncodingKind kind, int n_modes,
                               int problem_vars) {
    EncodedProblem out;
    out.n_modes = n_modes;
    out.kind = kind;
    out.problem_vars = problem_vars;
    out.constant = full.constant_part();
    out.hamiltonian = full.without_constant();
    return out;
}

}  // namespace

EncodedProblem encode_complex_quadratic(const ComplexQuadraticProblem& problem) {
    const int n = problem.n();
    if (n < 1) throw DimensionError("problem must have at least one variable");
    const CPoly acc = objective_cpoly(problem, EncodingKind::Ccv, n);
    return finish_encoding(acc.to_real_polynomial(n), EncodingKind::Ccv, n, n);
}

EncodedProblem encode_cv_baseline(const ComplexQuadraticProblem& problem) {
    const int n = problem.n();
    if (n < 1) throw DimensionError("problem must have at least one variable");
    const CPoly acc = objective_cpoly(problem, EncodingKind::CvBaseline, 2 * n);
    return finish_encoding(acc.to_real_polynomial(2 * n), EncodingKind::CvBaseline, 2 * n, n);
}

EncodedProblem apply_equality_penalty(const EncodedProblem& encoded,
                                      const AffineEqualities& equalities, double lambda) {
    if (!(lambda > 0.0)) throw EncodingError("penalty lambda must be > 0");
    const int m = static_cast<int>(equalities.c_mat.rows());
    const int n = static_cast<int>(equalities.c_mat.cols());
    if (equalities.d.size() != m) throw DimensionError("equality rhs length mismatch");
    if (n != encoded.problem_vars)
        throw DimensionError("equality constraint width must match problem variables");

    const auto z = [&](int j) {
        return encoded.kind == EncodingKind::Ccv ? CPoly::z_ccv(j, encoded.n_modes)
                                                 : CPoly::z_baseline(j, encoded.n_modes);
    };
    CPoly acc(encoded.n_modes);
    for (int i = 0; i < m; ++i) {
        CPoly g = CPoly::constant(-equalities.d(i), encoded.n_modes);
        for (int j = 0; j < n; ++j)
            if (equalities.c_mat(i, j) != Complex(0, 0)) g += equalities.c_mat(i, j) * z(j);
        acc += g.conj() * g;  // |g_i|^2
    }
    QuadraturePolynomial penalty = acc.to_real_polynomial(encoded.n_modes);
    penalty *= lambda;

    EncodedProblem out = encoded;
    out.penalty_lambda = lambda;
    out.constant += penalty.constant_part();
    out.hamiltonian += penalty.without_constant();
    return out;
}

EncodedProblem apply_slack_reformulation(const EncodedProblem& encoded,
                                         const QuadraturePolynomial& h, double lambda) {
    if (!(lambda > 0.0)) throw EncodingError("penalty lambda must be > 0");
    const int n_new = encoded.n_modes + 1;
    const int slack = encoded.n_modes;

    QuadraturePolynomial g(n_new);
    for (const auto& t : h.terms()) g.add_term(t.coeff, t.factors);
    g.add_term(1.0, {ModePower{slack, 2, 0}});  // h(z) + s^2

    QuadraturePolynomial penalty = g.product(g);
    penalty *= lambda;

    EncodedProblem out = encoded;
    out.n_modes = n_new;
    out.slack_modes += 1;
    out.penalty_lambda = lambda;
    QuadraturePolynomial widened(n_new);
    for (const auto& t : encoded.hamiltonian.terms()) widened.add_term(t.coeff, t.factors);
    widened += penalty.without_constant();
    out.hamiltonian = widened;
    out.constant += penalty.constant_part();
    return out;
}

namespace {

/// Maclaurin coefficients of R(u) = u * sigma(u) up to degree 6:
/// u/2 + u^2/4 - u^4/48 + u^6/480.
QuadraturePolynomial swish_taylor(const QuadraturePolynomial& u, int degree) {
    QuadraturePolynomial out(u.n_modes());
    const std::vector<std::pair<int, double>> coeffs = {
        {1, 0.5}, {2, 0.25}, {4, -1.0 / 48.0}, {6, 1.0 / 480.0}};
    QuadraturePolynomial power = QuadraturePolynomial::constant(1.0, u.n_modes());
    int cur = 0;
    for (const auto& [k, c] : coeffs) {
        if (k > degree) break;
        while (cur < k) {
            power = power.product(u);
            ++cur;
        }
        QuadraturePolynomial scaled = power;
        scaled *= c;
        out += scaled;
    }
    return out;
}

}  // namespace

EncodedProblem apply_swish_penalty(const EncodedProblem& encoded, const QuadraturePolynomial& h,
                                   double lambda, int hamiltonian_taylor_degree) {
    if (!(lambda > 0.0)) throw EncodingError("penalty lambda must be > 0");
    EncodedProblem out = encoded;
    out.swish.push_back(SwishTerm{h, lambda});
    if (hamiltonian_taylor_degree > 0) {
        QuadraturePolynomial scaled = h;
        scaled *= lambda;
        QuadraturePolynomial taylor = swish_taylor(scaled, hamiltonian_taylor_degree);
        out.constant += taylor.constant_part();
        out.hamiltonian += taylor.without_constant();
    }
    return out;
}

EncodedProblem encode_real_multivariate(const RealPolynomial& f, bool pad_odd) {
    if (f.n_vars < 1) throw DimensionError("need at least one variable");
    int n_vars = f.n_vars;
    if (n_vars % 2 != 0) {
        if (!pad_odd)
            throw EncodingError("odd variable count requires the pad_odd flag");
        n_vars += 1;
    }
    const int n_modes = n_vars / 2;
    QuadraturePolynomial poly(n_modes);
    for (const auto& t : f.terms) {
        if (static_cast<int>(t.powers.size()) != f.n_vars)
            throw DimensionError("term power vector length mismatch");
        std::vector<ModePower> factors;
        for (int v = 0; v < f.n_vars; ++v) {
            if (t.powers[v] == 0) continue;
            if (v % 2 == 0)
                factors.push_back(ModePower{v / 2, t.powers[v], 0});
            else
                factors.push_back(ModePower{v / 2, 0, t.powers[v]});
        }
        poly.add_term(t.coeff, std::move(factors));
    }
    EncodedProblem out = finish_encoding(poly, EncodingKind::Ccv, n_modes, 0);
    out.problem_vars = n_modes;  // z readout is per mode
    return out;
}

RealPolynomial styblinski_tang(int n_vars) {
    if (n_vars < 1) throw DimensionError("need at least one variable");
    RealPolynomial f;
    f.n_vars = n_vars;
    for (int v = 0; v < n_vars; ++v) {
        std::vector<int> p4(n_vars, 0), p2(n_vars, 0), p1(n_vars, 0);
        p4[v] = 4;
        p2[v] = 2;
        p1[v] = 1;
        f.terms.push_back({0.5, p4});
        f.terms.push_back({-8.0, p2});
        f.terms.push_back({2.5, p1});
    }
    return f;
}

EncodedProblem encode_quartic_complex(Complex hconst, Complex b, Complex c) {
    const int n_modes = 1;
    CPoly z = CPoly::z_ccv(0, n_modes);
    CPoly w = z + CPoly::constant(-hconst, n_modes);
    CPoly w2 = w.conj() * w;                     // ||z-h||^2
    CPoly acc = w2 * w2;                         // ||z-h||^4
    acc += (-std::norm(b)) * (z.conj() * z);     // -|b z|^2
    acc += (0.5 * c) * z;                        // Re(c z)
    acc += (0.5 * std::conj(c)) * z.conj();
    EncodedProblem out =
        finish_encoding(acc.to_real_polynomial(n_modes), EncodingKind::Ccv, n_modes, 1);
    return out;
}

std::pair<RVector, double> nelder_mead(const std::function<double(const RVector&)>& f,
                                       const RVector& x0, double step, int max_iters,
                                       double ftol) {
    const int n = static_cast<int>(x0.size());
    std::vector<RVector> pts(n + 1, x0);
    std::vector<double> vals(n + 1);
    for (int i = 0; i < n; ++i) pts[i + 1](i) += step;
    for (int i = 0; i <= n; ++i) vals[i] = f(pts[i]);

    const auto order = [&] {
        std::vector<int> idx(n + 1);
        for (int i = 0; i <= n; ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return vals[a] < vals[b]; });
        std::vector<RVector> np(n + 1);
        std::vector<double> nv(n + 1);
        for (int i = 0; i <= n; ++i) {
            np[i] = pts[idx[i]];
            nv[i] = vals[idx[i]];
        }
        pts = std::move(np);
        vals = std::move(nv);
    };

    order();
    for (int it = 0; it < max_iters; ++it) {
        if (std::abs(vals[n] - vals[0]) < ftol * (1.0 + std::abs(vals[0]))) break;
        RVector centroid = RVector::Zero(n);
        for (int i = 0; i < n; ++i) centroid += pts[i];
        centroid /= n;

        RVector xr = centroid + (centroid - pts[n]);
        const double fr = f(xr);
        if (fr < vals[0]) {
            RVector xe = centroid + 2.0 * (centroid - pts[n]);
            const double fe = f(xe);
            if (fe < fr) {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
        } else if (fr < vals[n - 1]) {
            pts[n] = xr;
            vals[n] = fr;
        } else {
            RVector xc = centroid + 0.5 * (pts[n] - centroid);
            const double fc = f(xc);
            if (fc < vals[n]) {
                pts[n] = xc;
                vals[n] = fc;
            } else {
                for (int i = 1; i <= n; ++i) {
                    pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
                    vals[i] = f(pts[i]);
                }
            }
        }
        order();
    }
    return {pts[0], vals[0]};
}

OracleResult classical_oracle(const EncodedProblem& encoded, const OracleBudget& budget) {
    const int dim = 2 * encoded.n_modes;

    // active coordinates: those the cost actually reads
    std::vector<bool> active(dim, false);
    const auto mark = [&](const QuadraturePolynomial& poly) {
        for (const auto& t : poly.terms())
            for (const auto& fac : t.factors) {
                if (fac.x_pow > 0) active[2 * fac.mode] = true;
                if (fac.p_pow > 0) active[2 * fac.mode + 1] = true;
            }
    };
    mark(encoded.hamiltonian);
    for (const auto& s : encoded.swish) mark(s.h);
    std::vector<int> act;
    for (int i = 0; i < dim; ++i)
        if (active[i]) act.push_back(i);
    const int d = static_cast<int>(act.size());

    const auto cost_full = [&](const RVector& xp) { return encoded.classical_cost_interleaved(xp); };
    const auto embed = [&](const RVector& reduced) {
        RVector xp = RVector::Zero(dim);
        for (int i = 0; i < d; ++i) xp(act[i]) = reduced(i);
        return xp;
    };
    const auto cost = [&](const RVector& reduced) { return cost_full(embed(reduced)); };

    OracleResult best;
    best.argmin = RVector::Zero(dim);
    best.value = cost_full(best.argmin);
    if (d == 0) return best;

    // per-axis resolution: largest odd count with g^d within the budget
    int per_axis = 41;
    while (per_axis > 5) {
        double total = 1.0;
        for (int i = 0; i < d; ++i) total *= per_axis;
        if (total <= static_cast<double>(budget.max_grid)) break;
        per_axis -= 2;
    }

    using Seed = std::pair<double, RVector>;
    std::vector<Seed> seeds;
    RVector probe(d);
    std::vector<int> counter(d, 0);
    const double lo = -budget.box, step = 2.0 * budget.box / (per_axis - 1);
    bool done = false;
    while (!done) {
        for (int i = 0; i < d; ++i) probe(i) = lo + counter[i] * step;
        seeds.emplace_back(cost(probe), probe);
        int carry = 0;
        while (carry < d && ++counter[carry] == per_axis) counter[carry++] = 0;
        done = carry == d;
    }
    std::stable_sort(seeds.begin(), seeds.end(),
                     [](const Seed& a, const Seed& b) { return a.first < b.first; });

    const int k = std::min<int>(budget.polish_starts, static_cast<int>(seeds.size()));
    RVector best_red = seeds.front().second;
    double best_val = seeds.front().first;
    for (int i = 0; i < k; ++i) {
        auto [xm, fm] = nelder_mead(cost, seeds[i].second, step * 0.5, budget.polish_iters);
        if (fm < best_val) {
            best_val = fm;
            best_red = xm;
        }
    }
    // second polish pass from the winner with a finer simplex
    auto [xf, ff] = nelder_mead(cost, best_red, step * 0.05, budget.polish_iters);
    if (ff < best_val) {
        best_val = ff;
        best_red = xf;
    }

    if (best_val < best.value) {
        best.value = best_val;
        best.argmin = embed(best_red);
        best.improved = true;
    } else {
        best.improved = false;
    }
    return best;
}

}  // namespace encoding
}  // namespace ccv
