#ifndef CQDUAL_LINALG_HPP
#define CQDUAL_LINALG_HPP

// Dense Hermitian spectral calculus for small dimensions (d <= ~64).
// All matrix functions use the support convention: 0^t = 0 for any t,
// and log 0 -> 0. Callers handle the infinite branches of divergences
// via explicit support-containment tests.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

namespace cqdual {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;

constexpr double kHermTol = 1e-10;
constexpr double kSupportCut = 1e-9;   // relative eigenvalue cutoff for support
constexpr double kPositiveCut = 1e-12; // strict-positivity cutoff

inline double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

/// Hermitian matrix with a validated symmetry tolerance.
class HermitianOperator {
public:
    explicit HermitianOperator(Matrix m) : mat_(std::move(m)) {
        if (mat_.rows() != mat_.cols())
            throw std::invalid_argument("HermitianOperator: matrix not square");
        const double dev = max_abs(mat_ - mat_.adjoint());
        if (dev > kHermTol)
            throw std::invalid_argument("HermitianOperator: not Hermitian, deviation " +
                                        std::to_string(dev));
        // symmetrize away the residual
        mat_ = ((mat_ + mat_.adjoint()) / 2.0).eval();
    }

    int dim() const { return static_cast<int>(mat_.rows()); }
    const Matrix& mat() const { return mat_; }
    double trace() const { return mat_.trace().real(); }

private:
    Matrix mat_;
};

struct SpectralDecomposition {
    Vector eigenvalues;  // ascending
    Matrix eigenvectors; // unitary, columns

    Matrix reconstruct() const {
        return eigenvectors * eigenvalues.asDiagonal().toDenseMatrix().cast<Complex>() *
               eigenvectors.adjoint();
    }
};

/// Eigendecomposition of a Hermitian operator, ascending eigenvalues.
inline SpectralDecomposition eigh(const HermitianOperator& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a.mat());
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigh: eigensolver failed to converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

inline SpectralDecomposition eigh(const Matrix& a) { return eigh(HermitianOperator(a)); }

namespace detail {

// Applies f eigenvalue-wise on the support of a PSD operator. Eigenvalues
// at or below cut * lambda_max are treated as exact zeros and mapped to 0.
template <typename F>
Matrix spectral_map(const SpectralDecomposition& sd, F f, double cut) {
    const double lmax = sd.eigenvalues.size() ? sd.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
    const double thresh = cut * std::max(lmax, 0.0);
    Vector mapped(sd.eigenvalues.size());
    for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i) {
        const double lam = sd.eigenvalues[i];
        mapped[i] = (lam > thresh) ? f(lam) : 0.0;
    }
    return sd.eigenvectors * mapped.asDiagonal().toDenseMatrix().cast<Complex>() *
           sd.eigenvectors.adjoint();
}

} // namespace detail

/// A^t on the support of A; 0^t = 0 for every t (including negative t).
inline Matrix frac_power(const Matrix& a, double t) {
    return detail::spectral_map(eigh(a), [t](double lam) { return std::pow(lam, t); },
                                kSupportCut);
}

/// Natural log on the support; zero eigenvalues map to 0.
inline Matrix matrix_log(const Matrix& a) {
    return detail::spectral_map(eigh(a), [](double lam) { return std::log(lam); },
                                kSupportCut);
}

/// Projector onto eigenspaces with lambda > 1e-9 * lambda_max.
inline Matrix support_projector(const Matrix& a) {
    return detail::spectral_map(eigh(a), [](double) { return 1.0; }, kSupportCut);
}

/// Projector onto the strictly-positive eigenspace (lambda > 1e-12).
inline Matrix positive_part_projector(const Matrix& a) {
    const SpectralDecomposition sd = eigh(a);
    Vector mapped(sd.eigenvalues.size());
    for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i)
        mapped[i] = (sd.eigenvalues[i] > kPositiveCut) ? 1.0 : 0.0;
    return sd.eigenvectors * mapped.asDiagonal().toDenseMatrix().cast<Complex>() *
           sd.eigenvectors.adjoint();
}

/// Trace norm ||A||_1 of a Hermitian matrix.
inline double trace_norm(const Matrix& a) {
    return eigh(a).eigenvalues.cwiseAbs().sum();
}

/// Density operator: PSD (clamped), unit trace.
class DensityOperator {
public:
    explicit DensityOperator(Matrix m) : base_(std::move(m)) {
        const SpectralDecomposition sd = eigh(base_.mat());
        const double lmin = sd.eigenvalues.minCoeff();
        if (lmin < -kHermTol)
            throw std::invalid_argument("DensityOperator: negative eigenvalue " +
                                        std::to_string(lmin));
        const double tr = base_.trace();
        if (std::abs(tr - 1.0) > kHermTol)
            throw std::invalid_argument("DensityOperator: trace " + std::to_string(tr));
        if (lmin < 0.0) {
            // clamp the tolerated negative dust to zero
            Vector clamped = sd.eigenvalues.cwiseMax(0.0);
            Matrix m2 = sd.eigenvectors * clamped.asDiagonal().toDenseMatrix().cast<Complex>() *
                        sd.eigenvectors.adjoint();
            base_ = HermitianOperator(m2 / m2.trace().real());
        }
    }

    int dim() const { return base_.dim(); }
    const Matrix& mat() const { return base_.mat(); }

private:
    HermitianOperator base_;
};

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Matrix maximally_mixed(int d) {
    return Matrix::Identity(d, d) / static_cast<double>(d);
}

} // namespace cqdual

#endif // CQDUAL_LINALG_HPP
