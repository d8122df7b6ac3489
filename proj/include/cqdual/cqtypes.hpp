#ifndef CQDUAL_CQTYPES_HPP
#define CQDUAL_CQTYPES_HPP

// Method-of-types combinatorics: enumeration of the type lattice, type
// classes, sequence and permutation utilities, and blocklength slack terms.
// All entropies and logs are base 2.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace cqdual {

using Sequence = std::vector<int>;
using Permutation = std::vector<int>; // images: k -> pi[k], a bijection

constexpr std::uint64_t kTypeEnumBudget = 10'000'000;     // max number of types
constexpr std::uint64_t kSequenceEnumBudget = 1'000'000;  // max type-class size

struct Alphabet {
    int size;
    explicit Alphabet(int k) : size(k) {
        if (k < 2 || k > 16) throw std::invalid_argument("Alphabet: size must be in [2,16]");
    }
};

/// A rational distribution with denominator n: counts over the alphabet.
struct TypeDistribution {
    int n = 0;
    std::vector<int> counts;

    TypeDistribution() = default;
    TypeDistribution(int n_, std::vector<int> counts_) : n(n_), counts(std::move(counts_)) {
        int sum = 0;
        for (int c : counts) {
            if (c < 0) throw std::invalid_argument("TypeDistribution: negative count");
            sum += c;
        }
        if (sum != n) throw std::invalid_argument("TypeDistribution: counts do not sum to n");
    }

    int alphabet_size() const { return static_cast<int>(counts.size()); }
    double prob(int x) const { return static_cast<double>(counts[x]) / n; }

    std::vector<double> distribution() const {
        std::vector<double> q(counts.size());
        for (std::size_t x = 0; x < counts.size(); ++x) q[x] = prob(static_cast<int>(x));
        return q;
    }

    bool operator==(const TypeDistribution& o) const { return n == o.n && counts == o.counts; }
};

/// Shannon entropy in bits, with the 0 log 0 = 0 convention.
inline double entropy_bits(const std::vector<double>& p) {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log2(v);
    return h;
}

inline double entropy_bits(const TypeDistribution& q) { return entropy_bits(q.distribution()); }

/// KL divergence D(q||p) in bits; +inf if supp(q) escapes supp(p).
inline double kl_bits(const std::vector<double>& q, const std::vector<double>& p) {
    double d = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] <= 0.0) continue;
        if (p[i] <= 0.0) return std::numeric_limits<double>::infinity();
        d += q[i] * std::log2(q[i] / p[i]);
    }
    return d;
}

inline std::uint64_t binomial_u64(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
        if (r > UINT64_MAX) throw std::overflow_error("binomial_u64: overflow");
    }
    return static_cast<std::uint64_t>(r);
}

/// All types in P_n(X), lexicographic by counts. |P_n| = C(n+|X|-1, |X|-1).
inline std::vector<TypeDistribution> enumerate_types(int n, const Alphabet& alphabet) {
    if (n < 1) throw std::invalid_argument("enumerate_types: n must be >= 1");
    const int k = alphabet.size;
    std::uint64_t count = 0;
    try {
        count = binomial_u64(n + k - 1, k - 1);
    } catch (const std::overflow_error&) {
        throw std::length_error("enumerate_types: enumeration budget exceeded");
    }
    if (count > kTypeEnumBudget)
        throw std::length_error("enumerate_types: enumeration budget exceeded");
    std::vector<TypeDistribution> out;
    out.reserve(count);
    std::vector<int> cur(k, 0);
    // compositions of n into k parts, lexicographic ascending on the count vector
    std::function<void(int, int)> rec = [&](int pos, int rem) {
        if (pos == k - 1) {
            cur[pos] = rem;
            out.emplace_back(n, cur);
            return;
        }
        for (int c = 0; c <= rem; ++c) {
            cur[pos] = c;
            rec(pos + 1, rem - c);
        }
    };
    rec(0, n);
    return out;
}

/// Empirical type of a sequence.
inline TypeDistribution type_of(const Sequence& x, const Alphabet& alphabet) {
    if (x.empty()) throw std::invalid_argument("type_of: empty sequence");
    std::vector<int> counts(alphabet.size, 0);
    for (int letter : x) {
        if (letter < 0 || letter >= alphabet.size)
            throw std::invalid_argument("type_of: letter out of range");
        ++counts[letter];
    }
    return TypeDistribution(static_cast<int>(x.size()), std::move(counts));
}

/// |T_Q^n| = n! / prod counts!, exact via 128-bit intermediates.
inline std::uint64_t type_class_size(const TypeDistribution& q) {
    unsigned __int128 r = 1;
    int seen = 0;
    // multiply binomials C(seen + c, c) sequentially; each step stays integral
    for (int c : q.counts) {
        // r *= C(seen + c, c)
        unsigned __int128 b = 1;
        for (int i = 1; i <= c; ++i)
            b = b * static_cast<unsigned>(seen + i) / static_cast<unsigned>(i);
        r *= b;
        if (r > UINT64_MAX) throw std::overflow_error("type_class_size: exceeds 64-bit");
        seen += c;
    }
    return static_cast<std::uint64_t>(r);
}

/// log2 |T_Q^n| via lgamma; usable when the exact value overflows.
inline double log2_type_class_size(const TypeDistribution& q) {
    double lg = std::lgamma(static_cast<double>(q.n) + 1.0);
    for (int c : q.counts) lg -= std::lgamma(static_cast<double>(c) + 1.0);
    return lg / std::log(2.0);
}

/// All sequences of type Q, lexicographic.
inline std::vector<Sequence> enumerate_type_class(const TypeDistribution& q) {
    std::uint64_t size = 0;
    try {
        size = type_class_size(q);
    } catch (const std::overflow_error&) {
        throw std::length_error("enumerate_type_class: enumeration budget exceeded");
    }
    if (size > kSequenceEnumBudget)
        throw std::length_error("enumerate_type_class: enumeration budget exceeded");
    std::vector<Sequence> out;
    out.reserve(size);
    Sequence cur;
    cur.reserve(q.n);
    std::vector<int> rem = q.counts;
    std::function<void()> rec = [&]() {
        if (static_cast<int>(cur.size()) == q.n) {
            out.push_back(cur);
            return;
        }
        for (std::size_t x = 0; x < rem.size(); ++x) {
            if (rem[x] == 0) continue;
            --rem[x];
            cur.push_back(static_cast<int>(x));
            rec();
            cur.pop_back();
            ++rem[x];
        }
    };
    rec();
    return out;
}

/// Pr[x in T_Q^n] under iid P: |T_Q^n| * prod P(x)^counts(x).
inline double type_class_probability(const TypeDistribution& q, const std::vector<double>& p) {
    for (double v : p)
        if (v <= 0.0) throw std::invalid_argument("type_class_probability: P must be strictly positive");
    double log2p = log2_type_class_size(q);
    for (std::size_t x = 0; x < q.counts.size(); ++x)
        log2p += q.counts[x] * std::log2(p[x]);
    return std::exp2(log2p);
}

/// Left action y_{pi(k)} = x_k; preserves the type.
inline Sequence apply_permutation(const Permutation& pi, const Sequence& x) {
    if (pi.size() != x.size())
        throw std::invalid_argument("apply_permutation: length mismatch");
    Sequence y(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) y[pi[k]] = x[k];
    return y;
}

inline Permutation invert_permutation(const Permutation& pi) {
    Permutation inv(pi.size());
    for (std::size_t k = 0; k < pi.size(); ++k) inv[pi[k]] = static_cast<int>(k);
    return inv;
}

struct BlocklengthSlack {
    double delta_n;       // (1/n) log2(2 n log2|X| + 1)
    double delta_n_prime; // (|X|+1) log2(n+1) / n
};

inline BlocklengthSlack slack(int n, const Alphabet& alphabet) {
    if (n < 1) throw std::invalid_argument("slack: n must be >= 1");
    const double k = static_cast<double>(alphabet.size);
    BlocklengthSlack s{};
    s.delta_n = std::log2(2.0 * n * std::log2(k) + 1.0) / n;
    s.delta_n_prime = (k + 1.0) * std::log2(static_cast<double>(n) + 1.0) / n;
    return s;
}

/// Sequence index in the lexicographic ordering of X^n (row-major).
inline std::size_t sequence_index(const Sequence& x, int alphabet_size) {
    std::size_t idx = 0;
    for (int letter : x) idx = idx * alphabet_size + static_cast<std::size_t>(letter);
    return idx;
}

inline std::vector<Sequence> enumerate_all_sequences(int n, const Alphabet& alphabet) {
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) {
        total *= alphabet.size;
        if (total > kSequenceEnumBudget)
            throw std::length_error("enumerate_all_sequences: budget exceeded");
    }
    std::vector<Sequence> out;
    out.reserve(total);
    Sequence cur(n, 0);
    for (std::size_t i = 0; i < total; ++i) {
        out.push_back(cur);
        for (int pos = n - 1; pos >= 0; --pos) {
            if (++cur[pos] < alphabet.size) break;
            cur[pos] = 0;
        }
    }
    return out;
}

} // namespace cqdual

#endif // CQDUAL_CQTYPES_HPP
