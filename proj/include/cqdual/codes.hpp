#ifndef CQDUAL_CODES_HPP
#define CQDUAL_CODES_HPP

// Finite-blocklength operational machinery: exact construction and error
// evaluation of source and channel codes at small n, the type covering /
// expurgation / pigeonhole constructions that convert between the two
// tasks, and the random-coding square-root decoder with its one-shot bound.

#include "cqdual/cqtypes.hpp"
#include "cqdual/divergence.hpp"
#include "cqdual/ensemble.hpp"
#include "cqdual/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <unordered_map>
#include <utility>

namespace cqdual {

constexpr std::size_t kTensorDimBudget = 4096;

/// rho^x = rho^{x_1} (x) ... (x) rho^{x_n}, leftmost factor most significant.
inline Matrix tensor_state(const Sequence& x, const CqEnsemble& ensemble) {
    std::size_t dim = 1;
    for (std::size_t k = 0; k < x.size(); ++k) {
        dim *= static_cast<std::size_t>(ensemble.dim());
        if (dim > kTensorDimBudget)
            throw std::length_error("tensor_state: dimension budget exceeded");
    }
    Matrix out = Matrix::Identity(1, 1);
    for (int letter : x) out = kron(out, ensemble.state(letter)).eval();
    return out;
}

/// Unitary V on (C^d)^{(x) n} permuting the tensor factors so that
/// V rho^x V^dag = rho^{pi x}, with the same left action as apply_permutation.
inline Matrix permutation_unitary(const Permutation& pi, int d) {
    const int n = static_cast<int>(pi.size());
    std::size_t dim = 1;
    for (int k = 0; k < n; ++k) {
        dim *= static_cast<std::size_t>(d);
        if (dim > kTensorDimBudget)
            throw std::length_error("permutation_unitary: dimension budget exceeded");
    }
    Matrix v = Matrix::Zero(dim, dim);
    Sequence digits(n);
    for (std::size_t j = 0; j < dim; ++j) {
        std::size_t rem = j;
        for (int k = n - 1; k >= 0; --k) {
            digits[k] = static_cast<int>(rem % d);
            rem /= d;
        }
        const std::size_t jp = sequence_index(apply_permutation(pi, digits), d);
        v(jp, j) = 1.0;
    }
    return v;
}

/// A channel code: message m maps to codeword codebook[m]. The decoder is
/// either an explicit sub-POVM, or (for permutation-realized codes) a success
/// functional m -> Tr[Lambda_m rho^{E(m)}] evaluated without materializing
/// the conjugated operators.
struct ChannelCode {
    int n = 0;
    std::vector<Sequence> codebook;
    std::vector<Matrix> decoder;          // empty when realized via `success`
    std::function<double(int)> success;
    bool constant_composition = false;
};

struct ChannelErrorReport {
    double avg = 0.0;
    double max = 0.0;
    std::vector<double> per_message;
};

namespace detail {

inline void validate_channel_code(const ChannelCode& code) {
    if (code.codebook.empty()) throw std::invalid_argument("channel code: empty codebook");
    if (!code.decoder.empty()) {
        if (code.decoder.size() != code.codebook.size())
            throw std::invalid_argument("channel code: decoder/codebook size mismatch");
        Matrix sum = Matrix::Zero(code.decoder[0].rows(), code.decoder[0].cols());
        for (const Matrix& lam : code.decoder) {
            if (eigh(lam).eigenvalues.minCoeff() < -1e-9)
                throw std::invalid_argument("channel code: decoder element not PSD");
            sum += lam;
        }
        sum -= Matrix::Identity(sum.rows(), sum.cols());
        if (eigh(sum).eigenvalues.maxCoeff() > 1e-9)
            throw std::invalid_argument("channel code: decoder exceeds identity");
    }
    if (code.constant_composition) {
        for (const Sequence& w : code.codebook)
            if (!std::is_permutation(w.begin(), w.end(), code.codebook[0].begin()))
                throw std::invalid_argument("channel code: composition not constant");
    }
}

} // namespace detail

inline ChannelErrorReport channel_error(const ChannelCode& code, const CqEnsemble& ensemble) {
    detail::validate_channel_code(code);
    ChannelErrorReport rep;
    const int m_count = static_cast<int>(code.codebook.size());
    rep.per_message.resize(m_count);
    for (int m = 0; m < m_count; ++m) {
        double s;
        if (!code.decoder.empty())
            s = (code.decoder[m] * tensor_state(code.codebook[m], ensemble)).trace().real();
        else
            s = code.success(m);
        rep.per_message[m] = std::clamp(1.0 - s, 0.0, 1.0);
        rep.avg += rep.per_message[m];
        rep.max = std::max(rep.max, rep.per_message[m]);
    }
    rep.avg /= m_count;
    return rep;
}

/// Keeps the floor(M/2) messages with smallest error (ties by index);
/// the result's maximal error is at most twice the input's average error.
inline ChannelCode expurgate(const ChannelCode& code, const CqEnsemble& ensemble) {
    const int m_count = static_cast<int>(code.codebook.size());
    if (m_count < 2) throw std::invalid_argument("expurgate: need at least 2 messages");
    const ChannelErrorReport rep = channel_error(code, ensemble);
    std::vector<int> order(m_count);
    for (int m = 0; m < m_count; ++m) order[m] = m;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return rep.per_message[a] < rep.per_message[b];
    });
    order.resize(m_count / 2);
    std::sort(order.begin(), order.end());
    ChannelCode out;
    out.n = code.n;
    out.constant_composition = code.constant_composition;
    for (int m : order) {
        out.codebook.push_back(code.codebook[m]);
        if (!code.decoder.empty()) out.decoder.push_back(code.decoder[m]);
    }
    if (code.decoder.empty()) {
        auto base = code.success;
        auto kept = std::make_shared<std::vector<int>>(order);
        out.success = [base, kept](int m) { return base((*kept)[m]); };
    }
    return out;
}

struct CoveringResult {
    std::vector<Permutation> permutations;
    int batches_drawn = 0;
    std::uint64_t L_Q = 0;
    bool covered = false;
    bool fallback = false;
};

/// Covers T_Q^n by permutations of U: batches of 2 L_Q seeded uniform draws
/// until a batch covers by itself; after 16 failed batches, a deterministic
/// greedy cover (random candidates plus direct target-hitting permutations).
inline CoveringResult cover_type_class(const std::vector<Sequence>& u, const Alphabet& alphabet,
                                       std::uint64_t seed) {
    if (u.empty()) throw std::invalid_argument("cover_type_class: empty U");
    const int n = static_cast<int>(u[0].size());
    const TypeDistribution q = type_of(u[0], alphabet);
    const std::vector<Sequence> tc = enumerate_type_class(q);
    std::unordered_map<std::size_t, int> pos;
    pos.reserve(tc.size());
    for (int i = 0; i < static_cast<int>(tc.size()); ++i)
        pos.emplace(sequence_index(tc[i], alphabet.size), i);
    const double t_sz = static_cast<double>(tc.size());
    CoveringResult res;
    res.L_Q = std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(
               std::ceil(t_sz * std::log2(t_sz) / static_cast<double>(u.size()))));

    auto batch_covers = [&](const std::vector<Permutation>& perms) {
        std::vector<char> hit(tc.size(), 0);
        std::size_t left = tc.size();
        for (const Permutation& pi : perms) {
            for (const Sequence& uu : u) {
                char& h = hit[pos.at(sequence_index(apply_permutation(pi, uu), alphabet.size))];
                if (!h) {
                    h = 1;
                    if (--left == 0) return true;
                }
            }
        }
        return left == 0;
    };

    Rng rng(seed);
    for (int batch = 1; batch <= 16; ++batch) {
        std::vector<Permutation> perms;
        perms.reserve(2 * res.L_Q);
        for (std::uint64_t i = 0; i < 2 * res.L_Q; ++i) perms.push_back(rng.permutation(n));
        res.batches_drawn = batch;
        if (batch_covers(perms)) {
            res.permutations = std::move(perms);
            res.covered = true;
            return res;
        }
    }

    // greedy fallback: each round adds the candidate covering the most
    // uncovered sequences; direct-hit candidates guarantee progress
    res.fallback = true;
    std::vector<char> hit(tc.size(), 0);
    std::size_t left = tc.size();
    auto hit_by = [&](const Sequence& x) {
        return hit[pos.at(sequence_index(x, alphabet.size))] != 0;
    };
    // permutation sending u0 to the target x: position pi[k] of x gets u0[k]
    auto aiming = [&](const Sequence& target) {
        std::vector<std::vector<int>> slots(alphabet.size);
        for (int k = 0; k < n; ++k) slots[target[k]].push_back(k);
        Permutation pi(n);
        std::vector<int> used(alphabet.size, 0);
        for (int k = 0; k < n; ++k) pi[k] = slots[u[0][k]][used[u[0][k]]++];
        return pi;
    };
    while (left > 0) {
        std::vector<Permutation> candidates;
        for (int i = 0; i < 64; ++i) candidates.push_back(rng.permutation(n));
        int added = 0;
        for (const Sequence& x : tc) {
            if (hit_by(x)) continue;
            candidates.push_back(aiming(x));
            if (++added == 64) break;
        }
        std::size_t best_gain = 0;
        int best = 0;
        for (int c = 0; c < static_cast<int>(candidates.size()); ++c) {
            std::size_t gain = 0;
            for (const Sequence& uu : u)
                if (!hit_by(apply_permutation(candidates[c], uu))) ++gain;
            if (gain > best_gain) {
                best_gain = gain;
                best = c;
            }
        }
        for (const Sequence& uu : u)
            hit[pos.at(sequence_index(apply_permutation(candidates[best], uu), alphabet.size))] = 1;
        left = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 0));
        res.permutations.push_back(candidates[best]);
    }
    res.covered = true;
    return res;
}

/// A source code on an explicit domain (T_Q^n or X^n). The decoder is given
/// as a success functional (z, domain index) -> Tr[Pi_x^{(z)} rho^x]; for
/// permutation-realized codes this avoids materializing V_i Lambda V_i^dag.
/// decoder_op, when set, exposes the explicit operator for spot checks.
struct SourceCode {
    int n = 0;
    std::vector<Sequence> domain;
    std::vector<int> encoder; // domain index -> z in [0, num_z)
    int num_z = 0;
    std::function<double(int z, int idx)> success;
    std::function<Matrix(int z, int idx)> decoder_op; // optional
};

enum class SourceModel { iid, constant_type };

inline double source_error(const SourceCode& code, SourceModel model,
                           const CqEnsemble& ensemble) {
    double succ = 0.0;
    for (int idx = 0; idx < static_cast<int>(code.domain.size()); ++idx) {
        double w;
        if (model == SourceModel::constant_type) {
            w = 1.0 / static_cast<double>(code.domain.size());
        } else {
            w = 1.0;
            for (int letter : code.domain[idx]) w *= ensemble.prior()[letter];
        }
        succ += w * code.success(code.encoder[idx], idx);
    }
    return std::clamp(1.0 - succ, 0.0, 1.0);
}

struct SourceFromChannelReport {
    double source_error = 0.0;      // P_e of the constructed code, constant-type source
    double channel_avg_error = 0.0; // P_e^avg of the input channel code
    double max_expurgated_error = 0.0;
    std::uint64_t L_Q = 0;
    double rate_R = 0.0;            // R with the input code at rate H(Q) - R
    double rate_bound = 0.0;        // 2^{n (R + delta_n)}
    int num_z = 0;
    bool fallback = false;
    bool error_ok = false;          // P_e(C_s) <= 2 P_e^avg(C_c)
    bool rate_ok = false;           // L_Q <= rate_bound
};

/// Builds a constant-type source code from a constant-composition channel
/// code: expurgation, permutation cover of T_Q^n, sequential partition
/// S_i = pi_i U \ (union of earlier pi U), decoder realized by permutation.
inline std::pair<SourceCode, SourceFromChannelReport>
source_from_channel(const ChannelCode& code, const CqEnsemble& ensemble, std::uint64_t seed) {
    const Alphabet alphabet(ensemble.alphabet_size());
    const int n = code.n;
    const TypeDistribution q = type_of(code.codebook.at(0), alphabet);
    for (const Sequence& w : code.codebook)
        if (type_of(w, alphabet).counts != q.counts)
            throw std::invalid_argument("source_from_channel: code not constant composition");

    const ChannelErrorReport in_rep = channel_error(code, ensemble);
    const ChannelCode ex = expurgate(code, ensemble);
    const ChannelErrorReport ex_rep = channel_error(ex, ensemble);

    const CoveringResult cover = cover_type_class(ex.codebook, alphabet, seed);
    const std::vector<Sequence> tc = enumerate_type_class(q);
    std::unordered_map<std::size_t, int> pos;
    for (int i = 0; i < static_cast<int>(tc.size()); ++i)
        pos.emplace(sequence_index(tc[i], alphabet.size), i);

    std::vector<int> bucket(tc.size(), -1);  // encoder
    std::vector<int> message(tc.size(), -1); // m with x = pi_z E(m)
    for (int z = 0; z < static_cast<int>(cover.permutations.size()); ++z) {
        for (int m = 0; m < static_cast<int>(ex.codebook.size()); ++m) {
            const int idx = pos.at(sequence_index(
                apply_permutation(cover.permutations[z], ex.codebook[m]), alphabet.size));
            if (bucket[idx] < 0) {
                bucket[idx] = z;
                message[idx] = m;
            }
        }
    }

    SourceCode src;
    src.n = n;
    src.domain = tc;
    src.encoder = bucket;
    src.num_z = static_cast<int>(cover.permutations.size());
    auto msgs = std::make_shared<std::vector<int>>(message);
    auto enc = std::make_shared<std::vector<int>>(bucket);
    auto errs = std::make_shared<std::vector<double>>(ex_rep.per_message);
    src.success = [msgs, enc, errs](int z, int idx) {
        return (z == (*enc)[idx]) ? 1.0 - (*errs)[(*msgs)[idx]] : 0.0;
    };
    if (!ex.decoder.empty()) {
        auto perms = std::make_shared<std::vector<Permutation>>(cover.permutations);
        auto dec = std::make_shared<std::vector<Matrix>>(ex.decoder);
        const int d = ensemble.dim();
        src.decoder_op = [msgs, enc, perms, dec, d](int z, int idx) {
            if (z != (*enc)[idx])
                return Matrix(Matrix::Zero((*dec)[0].rows(), (*dec)[0].cols()));
            const Matrix v = permutation_unitary((*perms)[z], d);
            return Matrix(v * (*dec)[(*msgs)[idx]] * v.adjoint());
        };
    }

    SourceFromChannelReport rep;
    rep.source_error = source_error(src, SourceModel::constant_type, ensemble);
    rep.channel_avg_error = in_rep.avg;
    rep.max_expurgated_error = ex_rep.max;
    rep.L_Q = cover.L_Q;
    rep.num_z = src.num_z;
    rep.fallback = cover.fallback;
    const double h_q = entropy_bits(q);
    rep.rate_R =
        h_q - std::log2(static_cast<double>(code.codebook.size())) / static_cast<double>(n);
    rep.rate_bound = std::exp2(n * (rep.rate_R + slack(n, alphabet).delta_n));
    rep.error_ok = rep.source_error <= 2.0 * rep.channel_avg_error + 1e-12;
    rep.rate_ok = static_cast<double>(rep.L_Q) <= rep.rate_bound * (1.0 + 1e-12);
    return {std::move(src), rep};
}

struct ChannelFromSourceReport {
    double source_error = 0.0;
    double channel_avg_error = 0.0;
    int chosen_z = -1;
    double rate = 0.0;       // log2 |M| / n
    double rate_bound = 0.0; // H(Q) - R - delta_n'
    bool cond2_ok = false;
    bool error_ok = false;   // P_e^avg(C_c) <= (1 + 1/n) P_e(C_s)
    bool rate_ok = false;
    bool degenerate = false; // zero total source error
};

/// Extracts a constant-composition channel code from a constant-type source
/// code by the three-step pigeonhole selection with m = n + 1 (default).
inline std::pair<ChannelCode, ChannelFromSourceReport>
channel_from_source(const SourceCode& code, const CqEnsemble& ensemble, int m = 0) {
    const int n = code.n;
    if (m == 0) m = n + 1;
    if (m < 2) throw std::invalid_argument("channel_from_source: m must be >= 2");
    const std::uint64_t t_sz = code.domain.size();
    const std::uint64_t z_sz = code.num_z;
    std::vector<std::uint64_t> sizes(code.num_z, 0);
    for (int z : code.encoder) ++sizes[z];

    // cond1: |S_j| >= |T|/(m |Z|), as exact integer arithmetic
    std::vector<int> good;
    std::uint64_t good_mass = 0;
    for (int j = 0; j < code.num_z; ++j)
        if (sizes[j] * m * z_sz >= t_sz) {
            good.push_back(j);
            good_mass += sizes[j];
        }
    ChannelFromSourceReport rep;
    rep.cond2_ok = good_mass * m >= static_cast<std::uint64_t>(m - 1) * t_sz;

    std::vector<double> err(code.domain.size());
    double total = 0.0;
    for (int idx = 0; idx < static_cast<int>(code.domain.size()); ++idx) {
        err[idx] = std::clamp(1.0 - code.success(code.encoder[idx], idx), 0.0, 1.0);
        total += err[idx];
    }
    int chosen = -1;
    if (total <= 1e-14) {
        rep.degenerate = true;
        chosen = good.front();
    } else {
        std::vector<double> q_mass(code.num_z, 0.0);
        for (int idx = 0; idx < static_cast<int>(code.domain.size()); ++idx)
            q_mass[code.encoder[idx]] += err[idx] / total;
        for (int j : good) {
            const double bound = static_cast<double>(m) / (m - 1) *
                                 static_cast<double>(sizes[j]) / static_cast<double>(t_sz);
            if (q_mass[j] <= bound + 1e-12) {
                chosen = j;
                break;
            }
        }
    }
    if (chosen < 0)
        throw std::logic_error("channel_from_source: pigeonhole selection failed");
    rep.chosen_z = chosen;

    ChannelCode out;
    out.n = n;
    out.constant_composition = true;
    std::vector<int> members;
    for (int idx = 0; idx < static_cast<int>(code.domain.size()); ++idx)
        if (code.encoder[idx] == chosen) {
            out.codebook.push_back(code.domain[idx]);
            members.push_back(idx);
        }
    if (code.decoder_op) {
        for (int idx : members) out.decoder.push_back(code.decoder_op(chosen, idx));
    } else {
        auto mem = std::make_shared<std::vector<int>>(members);
        auto succ = code.success;
        const int z = chosen;
        out.success = [mem, succ, z](int msg) { return succ(z, (*mem)[msg]); };
    }

    rep.source_error = std::clamp(
        total / static_cast<double>(t_sz), 0.0, 1.0);
    double ch_err = 0.0;
    for (int idx : members) ch_err += err[idx];
    rep.channel_avg_error = ch_err / static_cast<double>(members.size());
    rep.rate = std::log2(static_cast<double>(members.size())) / n;
    const Alphabet alphabet(ensemble.alphabet_size());
    const double r_source = std::log2(static_cast<double>(z_sz)) / n;
    const double h_q = entropy_bits(type_of(code.domain.at(0), alphabet));
    rep.rate_bound = h_q - r_source - slack(n, alphabet).delta_n_prime;
    rep.error_ok =
        rep.channel_avg_error <= (1.0 + 1.0 / n) * rep.source_error + 1e-12;
    rep.rate_ok = rep.rate >= rep.rate_bound - 1e-12;
    return {std::move(out), rep};
}

struct OneShotReport {
    double avg_error = 0.0;
    double bound = 0.0; // Hayashi-Nagaoka + Audenaert closed form, best alpha
    double best_alpha = 1.0;
    double p_b = 0.0;   // probability of the codeword set B
    double gamma = 0.0;
};

/// Random code with i.i.d. codewords from P restricted to B and the
/// square-root decoder Pi_m = S^{-1/2} Lambda_m S^{-1/2},
/// Lambda_m = {W(E(m)) - gamma (PW)^{(x)n} > 0}, gamma = (M-1)/P(B).
inline std::pair<ChannelCode, OneShotReport>
random_channel_code(const CqEnsemble& ensemble, const std::vector<Sequence>& b, int m_count,
                    std::uint64_t seed) {
    if (b.empty()) throw std::invalid_argument("random_channel_code: empty B");
    const int n = static_cast<int>(b[0].size());
    std::size_t dim = 1;
    for (int k = 0; k < n; ++k) {
        dim *= static_cast<std::size_t>(ensemble.dim());
        if (dim > kTensorDimBudget)
            throw std::length_error("random_channel_code: dimension budget exceeded");
    }
    std::vector<double> weight(b.size());
    double p_b = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        double w = 1.0;
        for (int letter : b[i]) w *= ensemble.prior()[letter];
        weight[i] = w;
        p_b += w;
    }
    if (p_b <= 0.0) throw std::invalid_argument("random_channel_code: P(B) = 0");

    Rng rng(seed);
    ChannelCode code;
    code.n = n;
    for (int m = 0; m < m_count; ++m) {
        double r = rng.uniform() * p_b;
        std::size_t pick = 0;
        for (; pick + 1 < b.size(); ++pick) {
            if (r < weight[pick]) break;
            r -= weight[pick];
        }
        code.codebook.push_back(b[pick]);
    }

    Matrix pw_n = Matrix::Identity(1, 1);
    const Matrix pw = ensemble.prior_mixture();
    for (int k = 0; k < n; ++k) pw_n = kron(pw_n, pw).eval();
    const double gamma = static_cast<double>(m_count - 1) / p_b;
    std::vector<Matrix> lambdas;
    Matrix s = Matrix::Zero(pw_n.rows(), pw_n.cols());
    for (int m = 0; m < m_count; ++m) {
        const Matrix w_m = tensor_state(code.codebook[m], ensemble);
        lambdas.push_back(positive_part_projector((w_m - gamma * pw_n).eval()));
        s += lambdas.back();
    }
    const Matrix s_inv_half = frac_power(s, -0.5);
    for (int m = 0; m < m_count; ++m) {
        Matrix pi = s_inv_half * lambdas[m] * s_inv_half;
        code.decoder.push_back(((pi + pi.adjoint()) / 2.0).eval());
    }

    OneShotReport rep;
    rep.p_b = p_b;
    rep.gamma = gamma;
    rep.avg_error = channel_error(code, ensemble).avg;
    if (m_count >= 2) {
        rep.bound = kInf;
        for (double alpha = 0.5; alpha <= 1.0 + 1e-12; alpha += 1e-3) {
            const double a = std::min(alpha, 1.0);
            const double t = 2.0 - 1.0 / a;
            double gam_min = kInf;
            for (const Sequence& x : b) {
                double acc = 0.0;
                for (int letter : x)
                    acc += petz_D(ensemble.state(letter), pw, t);
                gam_min = std::min(gam_min, acc);
            }
            const double log2_bound = (t - 1.0) * (gam_min - std::log2(m_count - 1.0)) +
                                      std::log2(6.0 / p_b);
            if (std::exp2(log2_bound) < rep.bound) {
                rep.bound = std::exp2(log2_bound);
                rep.best_alpha = a;
            }
        }
    } else {
        rep.bound = 1.0;
    }
    return {std::move(code), rep};
}

/// Exact minimal error of the MAP decoder for a fixed encoder, valid for
/// commuting (classical) side information only.
inline double map_oracle(const CqEnsemble& ensemble, const std::vector<Sequence>& domain,
                         const std::vector<int>& encoder, int num_z,
                         const std::vector<double>& weights) {
    if (!ensemble.is_classical())
        throw std::invalid_argument("map_oracle: side information must be classical");
    const auto [u, rows] = ensemble.classical_form();
    (void)u;
    const int n = static_cast<int>(domain.at(0).size());
    const int d = ensemble.dim();
    std::size_t y_total = 1;
    for (int k = 0; k < n; ++k) {
        y_total *= static_cast<std::size_t>(d);
        if (y_total > kSequenceEnumBudget)
            throw std::length_error("map_oracle: output space budget exceeded");
    }
    double succ = 0.0;
    Sequence y(n, 0);
    for (std::size_t yi = 0; yi < y_total; ++yi) {
        std::vector<double> best(num_z, 0.0);
        for (std::size_t idx = 0; idx < domain.size(); ++idx) {
            double pxy = weights[idx];
            for (int k = 0; k < n; ++k) pxy *= rows[domain[idx][k]][y[k]];
            best[encoder[idx]] = std::max(best[encoder[idx]], pxy);
        }
        for (double v : best) succ += v;
        for (int k = n - 1; k >= 0; --k) {
            if (++y[k] < d) break;
            y[k] = 0;
        }
    }
    return std::clamp(1.0 - succ, 0.0, 1.0);
}

/// Exhaustive minimum of map_oracle over all encoders domain -> [0, num_z).
inline double brute_force_optimal_source_error(const CqEnsemble& ensemble,
                                               const std::vector<Sequence>& domain,
                                               int num_z,
                                               const std::vector<double>& weights) {
    double combos = 1.0;
    for (std::size_t i = 0; i < domain.size(); ++i) combos *= num_z;
    if (combos > 1e7)
        throw std::length_error("brute_force_optimal_source_error: budget exceeded");
    std::vector<int> enc(domain.size(), 0);
    double best = 1.0;
    while (true) {
        best = std::min(best, map_oracle(ensemble, domain, enc, num_z, weights));
        int pos = static_cast<int>(domain.size()) - 1;
        for (; pos >= 0; --pos) {
            if (++enc[pos] < num_z) break;
            enc[pos] = 0;
        }
        if (pos < 0) break;
    }
    return best;
}

struct OperatorInequalityReport {
    double hn_min_slack = kInf;        // min eigenvalue of RHS - LHS, Hayashi-Nagaoka
    double audenaert_min_slack = kInf; // scalar slack, Audenaert
    int trials = 0;
    bool pass = false;
};

/// Random-instance verification of the two operator inequalities used in
/// the one-shot achievability proof.
inline OperatorInequalityReport operator_inequality_checks(std::uint64_t seed, int trials) {
    Rng rng(seed);
    OperatorInequalityReport rep;
    rep.trials = trials;
    for (int trial = 0; trial < trials; ++trial) {
        Rng local = rng.child(trial);
        const int d = 2 + static_cast<int>(local.below(3));
        // Hayashi-Nagaoka: 1 - S^{-1/2} L_m S^{-1/2} <= 2(1 - L_m) + 4 sum_{i != m} L_i
        const int m_count = 2 + static_cast<int>(local.below(3));
        std::vector<Matrix> lam;
        Matrix s = Matrix::Zero(d, d);
        for (int i = 0; i < m_count; ++i) {
            lam.push_back(local.projector(d, 1 + static_cast<int>(local.below(d))));
            s += lam.back();
        }
        const Matrix s_inv_half = frac_power(s, -0.5);
        const Matrix eye = Matrix::Identity(d, d);
        const Matrix pi0 = s_inv_half * lam[0] * s_inv_half;
        Matrix rhs = 2.0 * (eye - lam[0]);
        for (int i = 1; i < m_count; ++i) rhs += 4.0 * lam[i];
        const Matrix diff = rhs - (eye - pi0);
        rep.hn_min_slack =
            std::min(rep.hn_min_slack, eigh(((diff + diff.adjoint()) / 2.0).eval())
                                           .eigenvalues.minCoeff());
        // Audenaert: Tr[{A-B>0} B + (1-{A-B>0}) A] <= Tr[A^t B^{1-t}]
        const Matrix a = local.psd_matrix(d);
        const Matrix b = local.psd_matrix(d);
        const Matrix p = positive_part_projector((a - b).eval());
        const double lhs = (p * b + (eye - p) * a).trace().real();
        for (int ti = 0; ti <= 16; ++ti) {
            const double t = ti / 16.0;
            const double rhs_t = (frac_power(a, t) * frac_power(b, 1.0 - t)).trace().real();
            rep.audenaert_min_slack = std::min(rep.audenaert_min_slack, rhs_t - lhs);
        }
    }
    rep.pass = rep.hn_min_slack >= -1e-9 && rep.audenaert_min_slack >= -1e-10;
    return rep;
}

struct TypeDecompositionReport {
    double max_diff = 0.0;
    bool pass = false;
};

/// rho_XB^{(x) n} = sum_Q Pr[x in T_Q^n] rho^{(Q)} as explicit matrices,
/// assembled in the interleaved (X B X B ...) factor order.
inline TypeDecompositionReport type_decomposition_check(const CqEnsemble& ensemble, int n) {
    const int k = ensemble.alphabet_size();
    const int d = ensemble.dim();
    std::size_t dim = 1;
    for (int i = 0; i < n; ++i) {
        dim *= static_cast<std::size_t>(k) * d;
        if (dim > kTensorDimBudget)
            throw std::length_error("type_decomposition_check: dimension budget exceeded");
    }
    const Matrix joint = ensemble.joint_state();
    Matrix lhs = Matrix::Identity(1, 1);
    for (int i = 0; i < n; ++i) lhs = kron(lhs, joint).eval();

    const Alphabet alphabet(k);
    Matrix rhs = Matrix::Zero(dim, dim);
    for (const TypeDistribution& q : enumerate_types(n, alphabet)) {
        const std::vector<Sequence> tc = enumerate_type_class(q);
        const double pr = type_class_probability(q, ensemble.prior());
        Matrix block = Matrix::Zero(dim, dim);
        for (const Sequence& x : tc) {
            Matrix term = Matrix::Identity(1, 1);
            for (int letter : x) {
                Matrix unit = Matrix::Zero(k, k);
                unit(letter, letter) = 1.0;
                term = kron(term, kron(unit, ensemble.state(letter)).eval()).eval();
            }
            block += term;
        }
        rhs += (pr / static_cast<double>(tc.size())) * block;
    }
    TypeDecompositionReport rep;
    rep.max_diff = (lhs - rhs).cwiseAbs().maxCoeff();
    rep.pass = rep.max_diff <= 1e-9;
    return rep;
}

struct DualityExperimentRecord {
    double source_error = 0.0;
    double two_channel_error = 0.0;
    bool source_ok = false;
    double channel_error = 0.0;
    double channel_bound = 0.0;
    bool channel_ok = false;
};

struct DualityExperimentReport {
    std::vector<DualityExperimentRecord> records;
    bool all_pass = true;
};

/// For seeded random constant-composition codes, verifies both operational
/// building-block inequalities with the constructed codes' exact errors.
inline DualityExperimentReport duality_inequality_experiment(const CqEnsemble& ensemble, int n,
                                                             double rate,
                                                             const TypeDistribution& q,
                                                             int num_seeds,
                                                             std::uint64_t master_seed) {
    DualityExperimentReport out;
    const std::vector<Sequence> tc = enumerate_type_class(q);
    const double h_q = entropy_bits(q);
    const int m_count =
        std::max(2, static_cast<int>(std::llround(std::exp2(n * (h_q - rate)))));
    Rng master(master_seed);
    for (int trial = 0; trial < num_seeds; ++trial) {
        Rng local = master.child(trial);
        const std::uint64_t s1 = local.bits();
        const std::uint64_t s2 = local.bits();
        auto [chan, one_shot] = random_channel_code(ensemble, tc, m_count, s1);
        chan.constant_composition = true;
        (void)one_shot;
        auto [src, src_rep] = source_from_channel(chan, ensemble, s2);
        auto [chan2, chan_rep] = channel_from_source(src, ensemble);
        (void)chan2;
        DualityExperimentRecord rec;
        rec.source_error = src_rep.source_error;
        rec.two_channel_error = 2.0 * src_rep.channel_avg_error;
        rec.source_ok = src_rep.error_ok;
        rec.channel_error = chan_rep.channel_avg_error;
        rec.channel_bound = (1.0 + 1.0 / n) * chan_rep.source_error;
        rec.channel_ok = chan_rep.error_ok;
        out.all_pass = out.all_pass && rec.source_ok && rec.channel_ok;
        out.records.push_back(rec);
    }
    return out;
}

} // namespace cqdual

#endif // CQDUAL_CODES_HPP
