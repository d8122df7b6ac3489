#ifndef CQDUAL_RNG_HPP
#define CQDUAL_RNG_HPP

// Seeded random helpers. Distributions are implemented directly (not via
// <random> distribution classes) so that a given seed produces the same
// stream on every standard library.

#include "cqdual/linalg.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace cqdual {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed), seed_mix_(seed) {}

    /// Independent child generator for (master seed, stream index).
    Rng child(std::uint64_t index) const {
        std::uint64_t s = seed_mix_ ^ (0x9e3779b97f4a7c15ULL * (index + 1));
        return Rng(s);
    }

    std::uint64_t bits() { return engine_(); }

    double uniform() { return std::ldexp(static_cast<double>(engine_() >> 11), -53); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t below(std::uint64_t n) {
        // rejection sampling, unbiased
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do { v = engine_(); } while (v >= limit);
        return v % n;
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = uniform(-1.0, 1.0);
            v = uniform(-1.0, 1.0);
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    /// Uniform random permutation of {0,...,n-1} (Fisher-Yates).
    std::vector<int> permutation(int n) {
        std::vector<int> p(n);
        for (int i = 0; i < n; ++i) p[i] = i;
        for (int i = n - 1; i > 0; --i) {
            const int j = static_cast<int>(below(static_cast<std::uint64_t>(i) + 1));
            std::swap(p[i], p[j]);
        }
        return p;
    }

    /// Haar-ish random density matrix: G G^dag / Tr, G with iid Gaussian entries.
    Matrix density_matrix(int d) {
        Matrix g(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                g(i, j) = Complex(gaussian(), gaussian());
        Matrix m = g * g.adjoint();
        return m / m.trace().real();
    }

    /// Random PSD matrix with unit spectral scale.
    Matrix psd_matrix(int d) {
        Matrix g(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                g(i, j) = Complex(gaussian(), gaussian());
        Matrix m = g * g.adjoint();
        return m / static_cast<double>(d);
    }

    /// Random Hermitian matrix (GUE-like scaling).
    Matrix hermitian_matrix(int d) {
        Matrix g(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                g(i, j) = Complex(gaussian(), gaussian());
        return (g + g.adjoint()) / 2.0;
    }

    /// Random rank-r projector (span of r Haar-ish vectors).
    Matrix projector(int d, int r) {
        Matrix g(d, r);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < r; ++j)
                g(i, j) = Complex(gaussian(), gaussian());
        Eigen::HouseholderQR<Matrix> qr(g);
        Matrix q = qr.householderQ() * Matrix::Identity(d, r);
        return q * q.adjoint();
    }

    /// Strictly positive probability vector (Dirichlet-ish via exponentials).
    std::vector<double> distribution(int k, double floor = 0.02) {
        std::vector<double> p(k);
        double sum = 0.0;
        for (int i = 0; i < k; ++i) {
            p[i] = floor - std::log(1.0 - uniform());
            sum += p[i];
        }
        for (double& v : p) v /= sum;
        return p;
    }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_mix_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace cqdual

#endif // CQDUAL_RNG_HPP
