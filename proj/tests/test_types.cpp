#include "cqdual/cqtypes.hpp"
#include "cqdual/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <set>

using namespace cqdual;

TEST_CASE("enumerate_types counts") {
    CHECK(enumerate_types(3, Alphabet(2)).size() == 4);
    CHECK(enumerate_types(1, Alphabet(3)).size() == 3);
    const auto t22 = enumerate_types(2, Alphabet(2));
    REQUIRE(t22.size() == 3);
    CHECK(t22[0].counts == std::vector<int>{0, 2});
    CHECK(t22[1].counts == std::vector<int>{1, 1});
    CHECK(t22[2].counts == std::vector<int>{2, 0});
}

TEST_CASE("type_of") {
    CHECK(type_of({0, 0, 1}, Alphabet(2)).counts == std::vector<int>{2, 1});
    CHECK(type_of({1, 1, 1}, Alphabet(2)).counts == std::vector<int>{0, 3});
    CHECK_THROWS(type_of({}, Alphabet(2)));
}

TEST_CASE("type_class_size") {
    CHECK(type_class_size(TypeDistribution(3, {2, 1})) == 3);
    CHECK(type_class_size(TypeDistribution(3, {3, 0})) == 1);
    CHECK(type_class_size(TypeDistribution(4, {2, 2})) == 6);
}

TEST_CASE("enumerate_type_class") {
    const auto c = enumerate_type_class(TypeDistribution(2, {1, 1}));
    REQUIRE(c.size() == 2);
    CHECK(c[0] == Sequence{0, 1});
    CHECK(c[1] == Sequence{1, 0});
    CHECK(enumerate_type_class(TypeDistribution(2, {2, 0})) ==
          std::vector<Sequence>{{0, 0}});
    CHECK(enumerate_type_class(TypeDistribution(3, {1, 1, 1})).size() == 6);
}

TEST_CASE("type_class_probability") {
    CHECK(type_class_probability(TypeDistribution(2, {1, 1}), {0.5, 0.5}) ==
          Catch::Approx(0.5));
    CHECK(type_class_probability(TypeDistribution(2, {2, 0}), {0.5, 0.5}) ==
          Catch::Approx(0.25));
    // oracle: exhaustive sum over the 8 binary length-3 sequences
    const std::vector<double> p{0.7, 0.3};
    const TypeDistribution q(3, {2, 1});
    double direct = 0.0;
    for (const auto& x : enumerate_all_sequences(3, Alphabet(2))) {
        if (!(type_of(x, Alphabet(2)) == q)) continue;
        double px = 1.0;
        for (int letter : x) px *= p[letter];
        direct += px;
    }
    CHECK(direct == Catch::Approx(0.441).epsilon(1e-12));
    CHECK(type_class_probability(q, p) == Catch::Approx(direct).epsilon(1e-12));
}

TEST_CASE("apply_permutation") {
    CHECK(apply_permutation({0, 1, 2}, {0, 1, 1}) == Sequence{0, 1, 1});
    CHECK(apply_permutation({1, 0}, {0, 1}) == Sequence{1, 0});
    CHECK(apply_permutation({2, 0, 1}, {1, 1, 1}) == Sequence{1, 1, 1});
    // convention y_{pi(k)} = x_k
    const Sequence y = apply_permutation({2, 0, 1}, {5, 6, 7});
    CHECK(y == Sequence{6, 7, 5});
    CHECK_THROWS(apply_permutation({0, 1}, {0, 1, 2}));
}

TEST_CASE("slack formulas") {
    const auto s1 = slack(1, Alphabet(2));
    CHECK(s1.delta_n_prime == Catch::Approx(3.0));
    CHECK(s1.delta_n == Catch::Approx(std::log2(3.0)));
    CHECK(slack(4, Alphabet(2)).delta_n_prime == Catch::Approx(3.0 * std::log2(5.0) / 4.0));
}

TEST_CASE("partition property") {
    for (int k = 2; k <= 3; ++k) {
        for (int n = 1; n <= 8; ++n) {
            std::uint64_t total = 0;
            std::set<Sequence> seen;
            for (const auto& q : enumerate_types(n, Alphabet(k))) {
                total += type_class_size(q);
                if (type_class_size(q) <= 10000)
                    for (const auto& x : enumerate_type_class(q)) {
                        CHECK(type_of(x, Alphabet(k)) == q);
                        CHECK(seen.insert(x).second); // disjointness
                    }
            }
            std::uint64_t expect = 1;
            for (int i = 0; i < n; ++i) expect *= k;
            CHECK(total == expect);
        }
    }
}

TEST_CASE("type count bound") {
    for (int k = 2; k <= 3; ++k)
        for (int n = 1; n <= 50; ++n) {
            const double count = static_cast<double>(binomial_u64(n + k - 1, k - 1));
            CHECK(count <= std::pow(n + 1.0, k));
            CHECK(enumerate_types(n, Alphabet(k)).size() == count);
        }
}

TEST_CASE("sandwich bounds on size and probability") {
    const std::vector<double> p2{0.6, 0.4};
    const std::vector<double> p3{0.5, 0.3, 0.2};
    for (int k = 2; k <= 3; ++k) {
        const auto& p = (k == 2) ? p2 : p3;
        for (int n = 1; n <= 12; ++n) {
            double prob_sum = 0.0;
            for (const auto& q : enumerate_types(n, Alphabet(k))) {
                const double sz = static_cast<double>(type_class_size(q));
                const double h = entropy_bits(q);
                const double poly = std::pow(n + 1.0, k);
                CHECK(sz <= std::exp2(n * h) * (1 + 1e-9));
                CHECK(sz >= std::exp2(n * h) / poly * (1 - 1e-9));
                const double pr = type_class_probability(q, p);
                const double d = kl_bits(q.distribution(), p);
                CHECK(pr <= std::exp2(-n * d) * (1 + 1e-9));
                CHECK(pr >= std::exp2(-n * d) / poly * (1 - 1e-9));
                prob_sum += pr;
            }
            CHECK(prob_sum == Catch::Approx(1.0).margin(1e-10));
        }
    }
}

TEST_CASE("permutations map type classes onto themselves") {
    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(4));
        const auto types = enumerate_types(n, Alphabet(2));
        const auto& q = types[rng.below(types.size())];
        const auto cls = enumerate_type_class(q);
        const Permutation pi = rng.permutation(n);
        std::set<Sequence> image;
        for (const auto& x : cls) image.insert(apply_permutation(pi, x));
        CHECK(image.size() == cls.size());
        for (const auto& x : cls) CHECK(image.count(x) == 1);
    }
}

TEST_CASE("budget refusals") {
    CHECK_THROWS_AS(enumerate_types(3000, Alphabet(8)), std::length_error);
    CHECK_THROWS_AS(enumerate_type_class(TypeDistribution(30, {15, 15})), std::length_error);
}

TEST_CASE("log2_type_class_size matches exact values") {
    for (const auto& q : enumerate_types(10, Alphabet(3)))
        CHECK(log2_type_class_size(q) ==
              Catch::Approx(std::log2(static_cast<double>(type_class_size(q)))).margin(1e-9));
}
