#ifndef CQDUAL_ENSEMBLE_HPP
#define CQDUAL_ENSEMBLE_HPP

// The classical-quantum ensemble: an alphabet, a strictly positive prior,
// and one density operator per letter on a common space. The same object
// serves as the c-q channel x -> rho_B^x and as the source's side
// information map.

#include "cqdual/cqtypes.hpp"
#include "cqdual/linalg.hpp"

#include <vector>

namespace cqdual {

class CqEnsemble {
public:
    CqEnsemble(std::vector<double> prior, std::vector<Matrix> states)
        : prior_(std::move(prior)) {
        if (prior_.size() < 2) throw std::invalid_argument("CqEnsemble: need at least 2 letters");
        if (prior_.size() != states.size())
            throw std::invalid_argument("CqEnsemble: prior/states size mismatch");
        double sum = 0.0;
        for (double p : prior_) {
            if (p <= 0.0) throw std::invalid_argument("CqEnsemble: prior must be strictly positive");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("CqEnsemble: prior does not sum to 1");
        states_.reserve(states.size());
        for (auto& m : states) {
            states_.emplace_back(std::move(m));
            if (states_.back().dim() != states_.front().dim())
                throw std::invalid_argument("CqEnsemble: states must share a dimension");
        }
    }

    int alphabet_size() const { return static_cast<int>(prior_.size()); }
    Alphabet alphabet() const { return Alphabet(alphabet_size()); }
    int dim() const { return states_.front().dim(); }
    const std::vector<double>& prior() const { return prior_; }
    const Matrix& state(int x) const { return states_.at(x).mat(); }

    /// Mixture sum_x q(x) rho_x for an arbitrary weight vector q.
    Matrix mixture(const std::vector<double>& q) const {
        Matrix m = Matrix::Zero(dim(), dim());
        for (int x = 0; x < alphabet_size(); ++x) m += q[x] * state(x);
        return m;
    }

    Matrix prior_mixture() const { return mixture(prior_); }

    /// Block-diagonal joint state sum_x p(x) |x><x| (x) rho_x, dimension |X| d.
    Matrix joint_state() const { return joint_state(prior_); }

    Matrix joint_state(const std::vector<double>& q) const {
        const int d = dim();
        const int k = alphabet_size();
        Matrix j = Matrix::Zero(k * d, k * d);
        for (int x = 0; x < k; ++x)
            j.block(x * d, x * d, d, d) = q[x] * state(x);
        return j;
    }

    /// True when all states commute pairwise (classical side information).
    bool is_classical(double tol = 1e-9) const {
        for (int a = 0; a < alphabet_size(); ++a)
            for (int b = a + 1; b < alphabet_size(); ++b) {
                Matrix comm = state(a) * state(b) - state(b) * state(a);
                if (max_abs(comm) > tol) return false;
            }
        return true;
    }

    /// Common eigenbasis U and conditional rows p(y|x) = diag(U^dag rho_x U).
    /// Only valid for commuting families.
    std::pair<Matrix, std::vector<std::vector<double>>> classical_form() const {
        if (!is_classical()) throw std::invalid_argument("classical_form: states do not commute");
        // diagonalize a generic mixture; retry with different weights if a
        // degeneracy of the probe hides structure of an individual state
        for (int attempt = 0; attempt < 4; ++attempt) {
            std::vector<double> w(alphabet_size());
            double sum = 0.0;
            for (int x = 0; x < alphabet_size(); ++x) {
                w[x] = 1.0 + 0.618033988749894848 * (x + 1) * (attempt + 1) +
                       0.1 * attempt * std::sin(1.0 + x);
                sum += w[x];
            }
            for (double& v : w) v /= sum;
            Matrix u = eigh(mixture(w)).eigenvectors;
            std::vector<std::vector<double>> rows(alphabet_size(),
                                                  std::vector<double>(dim()));
            bool ok = true;
            for (int x = 0; x < alphabet_size() && ok; ++x) {
                Matrix diag = u.adjoint() * state(x) * u;
                if (max_abs(diag - Matrix(diag.diagonal().asDiagonal())) > 1e-7) ok = false;
                for (int y = 0; y < dim(); ++y) rows[x][y] = std::max(0.0, diag(y, y).real());
            }
            if (ok) return {u, rows};
        }
        throw std::runtime_error("classical_form: common basis extraction failed");
    }

private:
    std::vector<double> prior_;
    std::vector<DensityOperator> states_;
};

} // namespace cqdual

#endif // CQDUAL_ENSEMBLE_HPP
