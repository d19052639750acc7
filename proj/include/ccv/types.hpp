#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ccv {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Value of the commutation constant in [x,p] = i*hbar. The same value must
/// be threaded through every component of a run; the library default is 2.
struct HbarConvention {
    double hbar = 2.0;

    HbarConvention() = default;
    explicit HbarConvention(double h) : hbar(h) {
        if (!(h > 0.0)) throw std::invalid_argument("hbar must be > 0");
    }
};

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct EncodingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Kronecker product, mode 0 as the leftmost (most significant) factor.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic>
kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    using Mat = Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Eigen::Index ipow(Eigen::Index base, int exp) {
    Eigen::Index r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

}  // namespace ccv
