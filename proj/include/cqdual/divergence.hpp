#ifndef CQDUAL_DIVERGENCE_HPP
#define CQDUAL_DIVERGENCE_HPP

// Quantum relative entropy, conditional entropy, and the Petz and
// sandwiched Renyi divergence families. All values are in bits.
//
// Infinite divergences (support violations) are returned as IEEE +inf,
// which propagates arithmetically: x + inf = inf, min(x, inf) = x.

#include "cqdual/ensemble.hpp"
#include "cqdual/linalg.hpp"

#include <cmath>
#include <limits>

namespace cqdual {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAlphaOneWindow = 1e-6; // delegate to relative entropy near alpha = 1

inline bool is_inf(double v) { return std::isinf(v) && v > 0; }

namespace detail {

/// Mass of rho outside the support of sigma (0 iff supp(rho) <= supp(sigma)).
inline double support_escape(const Matrix& rho, const SpectralDecomposition& sigma_sd) {
    const double lmax = sigma_sd.eigenvalues.cwiseAbs().maxCoeff();
    const double thresh = kSupportCut * lmax;
    double escape = 0.0;
    for (Eigen::Index j = 0; j < sigma_sd.eigenvalues.size(); ++j) {
        if (sigma_sd.eigenvalues[j] > thresh) continue;
        const auto v = sigma_sd.eigenvectors.col(j);
        escape += (v.adjoint() * rho * v)(0, 0).real();
    }
    return escape;
}

} // namespace detail

/// Von Neumann entropy in bits.
inline double vn_entropy(const Matrix& rho) {
    const SpectralDecomposition sd = eigh(rho);
    double h = 0.0;
    for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i) {
        const double lam = sd.eigenvalues[i];
        if (lam > 0.0) h -= lam * std::log2(lam);
    }
    return h;
}

/// D(rho||sigma) = Tr[rho (log rho - log sigma)] in bits; +inf on support violation.
inline double relative_entropy(const Matrix& rho, const Matrix& sigma) {
    const SpectralDecomposition rho_sd = eigh(rho);
    const SpectralDecomposition sig_sd = eigh(sigma);
    if (detail::support_escape(rho, sig_sd) > 1e-10) return kInf;
    double d = 0.0;
    for (Eigen::Index i = 0; i < rho_sd.eigenvalues.size(); ++i) {
        const double lam = rho_sd.eigenvalues[i];
        if (lam > 0.0) d += lam * std::log2(lam);
    }
    const double sig_max = sig_sd.eigenvalues.cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < sig_sd.eigenvalues.size(); ++j) {
        const double mu = sig_sd.eigenvalues[j];
        if (mu <= kSupportCut * sig_max) continue;
        const auto v = sig_sd.eigenvectors.col(j);
        const double weight = (v.adjoint() * rho * v)(0, 0).real();
        d -= weight * std::log2(mu);
    }
    return d;
}

/// Conditional entropy H(X|B) of the c-q state of an ensemble, in bits.
inline double conditional_entropy(const CqEnsemble& ensemble) {
    const Matrix joint = ensemble.joint_state();
    return vn_entropy(joint) - vn_entropy(ensemble.prior_mixture());
}

/// Petz trace functional K_alpha = Tr[rho^alpha sigma^(1-alpha)], support convention.
inline double petz_K(const Matrix& rho, const Matrix& sigma, double alpha) {
    const Matrix ra = frac_power(rho, alpha);
    const Matrix sb = frac_power(sigma, 1.0 - alpha);
    return (ra * sb).trace().real();
}

/// Petz Renyi divergence in bits; +inf markers per the support conventions.
inline double petz_D(const Matrix& rho, const Matrix& sigma, double alpha) {
    if (alpha < 0.0) throw std::invalid_argument("petz_D: alpha must be nonnegative");
    if (alpha == 0.0) {
        // D_0(rho||sigma) = -log2 Tr[Pi_rho sigma]
        const double t = (support_projector(rho) * sigma).trace().real();
        return t > 0.0 ? -std::log2(t) : kInf;
    }
    if (std::abs(alpha - 1.0) < kAlphaOneWindow) return relative_entropy(rho, sigma);
    if (alpha > 1.0 && detail::support_escape(rho, eigh(sigma)) > 1e-10) return kInf;
    const double k = petz_K(rho, sigma, alpha);
    if (k <= 0.0) return kInf; // disjoint supports, alpha < 1
    return std::log2(k) / (alpha - 1.0);
}

namespace detail {

/// Eigensolver noise floor: eigenvalues below this are indistinguishable
/// from exact zeros in double precision. Deliberately far below the support
/// cutoff: genuinely tiny eigenvalues of rho^1/2 sigma^c rho^1/2 carry real
/// mass in Tr[M^alpha] for small alpha and must not be discarded.
inline double noise_cut(Eigen::Index d, double lmax) {
    return 16.0 * static_cast<double>(d) * 2.23e-16 * std::max(lmax, 0.0);
}

/// log2 sum lam^alpha over the numerically positive part of a spectrum,
/// evaluated in log domain so that huge alpha (s near -1) cannot overflow.
/// Returns -inf when no eigenvalue survives the noise cut.
inline double log2_power_sum(const Vector& eigenvalues, double alpha) {
    const double cut = noise_cut(eigenvalues.size(), eigenvalues.cwiseAbs().maxCoeff());
    double lmax = 0.0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
        if (eigenvalues[i] > cut) lmax = std::max(lmax, eigenvalues[i]);
    if (lmax <= 0.0) return -std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
        if (eigenvalues[i] > cut)
            acc += std::exp2(alpha * std::log2(eigenvalues[i] / lmax));
    return alpha * std::log2(lmax) + std::log2(acc);
}

/// Sum of lam^alpha over the numerically positive spectrum of a PSD matrix.
inline double trace_power_sum(const Matrix& psd, double alpha) {
    const SpectralDecomposition sd = eigh(((psd + psd.adjoint()) / 2.0).eval());
    const double cut = noise_cut(sd.eigenvalues.size(), sd.eigenvalues.cwiseAbs().maxCoeff());
    double k = 0.0;
    for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i)
        if (sd.eigenvalues[i] > cut) k += std::pow(sd.eigenvalues[i], alpha);
    return k;
}

/// log2 of the spectrum of rho^{1/2} sigma^c rho^{1/2}, as squared singular
/// values of rho^{1/2} sigma^{c/2}. The SVD resolves small singular values
/// with relative accuracy, unlike an eigendecomposition of the assembled
/// product, whose tiny eigenvalues drown in the eps * lambda_max noise floor;
/// for alpha < 1 those tiny eigenvalues carry real mass in Tr[M^alpha].
inline std::vector<double> sandwich_log2_spectrum(const Matrix& rho, const Matrix& sigma,
                                                  double c) {
    const Matrix m = frac_power(rho, 0.5) * frac_power(sigma, c / 2.0);
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    // singular values below the product's forming error are numeric zeros
    const double cut = 16.0 * static_cast<double>(s.size()) * 2.23e-16 * s.maxCoeff();
    std::vector<double> out;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] > cut) out.push_back(2.0 * std::log2(s[i]));
    return out;
}

/// log2 sum_i 2^{alpha * l2lam_i} by log-sum-exp; -inf on an empty spectrum.
inline double log2_power_sum_from_log2(const std::vector<double>& l2lams, double alpha) {
    if (l2lams.empty()) return -std::numeric_limits<double>::infinity();
    double tmax = -std::numeric_limits<double>::infinity();
    for (double l : l2lams) tmax = std::max(tmax, alpha * l);
    double acc = 0.0;
    for (double l : l2lams) acc += std::exp2(alpha * l - tmax);
    return tmax + std::log2(acc);
}

} // namespace detail

/// Sandwiched trace functional K*_alpha = Tr[(rho^1/2 sigma^((1-alpha)/alpha) rho^1/2)^alpha].
inline double sandwiched_K(const Matrix& rho, const Matrix& sigma, double alpha) {
    const auto l2 = detail::sandwich_log2_spectrum(rho, sigma, (1.0 - alpha) / alpha);
    double k = 0.0;
    for (double l : l2) k += std::exp2(alpha * l);
    return k;
}

/// Sandwiched Renyi divergence in bits; same conventions as petz_D.
inline double sandwiched_D(const Matrix& rho, const Matrix& sigma, double alpha) {
    if (alpha <= 0.0) throw std::invalid_argument("sandwiched_D: alpha must be positive");
    if (std::abs(alpha - 1.0) < kAlphaOneWindow) return relative_entropy(rho, sigma);
    if (alpha > 1.0 && detail::support_escape(rho, eigh(sigma)) > 1e-10) return kInf;
    // log-domain evaluation: alpha can be enormous (s near -1) without overflow
    const auto l2 = detail::sandwich_log2_spectrum(rho, sigma, (1.0 - alpha) / alpha);
    const double l2k = detail::log2_power_sum_from_log2(l2, alpha);
    if (std::isinf(l2k)) return kInf;
    return l2k / (alpha - 1.0);
}

/// Classical Renyi divergence D_alpha(p||q) in bits (vectors).
inline double classical_renyi(const std::vector<double>& p, const std::vector<double>& q,
                              double alpha) {
    if (std::abs(alpha - 1.0) < kAlphaOneWindow) return kl_bits(p, q);
    double k = 0.0;
    bool escape = false;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0) { escape = true; continue; }
        k += std::pow(p[i], alpha) * std::pow(q[i], 1.0 - alpha);
    }
    if (alpha > 1.0 && escape) return kInf;
    if (k <= 0.0) return kInf;
    return std::log2(k) / (alpha - 1.0);
}

} // namespace cqdual

#endif // CQDUAL_DIVERGENCE_HPP
