#include "cqdual/divergence.hpp"
#include "cqdual/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace cqdual;

namespace {

Matrix diag2(double a, double b) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

Matrix ket0() { return diag2(1, 0); }

Matrix ket_plus() {
    Matrix m(2, 2);
    m << 0.5, 0.5, 0.5, 0.5;
    return m;
}

} // namespace

TEST_CASE("relative entropy basics") {
    Rng rng(31);
    const Matrix rho = rng.density_matrix(3);
    CHECK(relative_entropy(rho, rho) == Catch::Approx(0.0).margin(1e-10));
    CHECK(is_inf(relative_entropy(ket0(), diag2(0, 1))));
    const double expect = 0.5 * std::log2(0.5 / 0.75) + 0.5 * std::log2(0.5 / 0.25);
    CHECK(relative_entropy(diag2(0.5, 0.5), diag2(0.75, 0.25)) ==
          Catch::Approx(expect).margin(1e-12));
}

TEST_CASE("relative entropy nonnegativity") {
    Rng rng(32);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 2 + static_cast<int>(rng.below(3));
        const double v = relative_entropy(rng.density_matrix(d), rng.density_matrix(d));
        CHECK(v >= -1e-9);
    }
}

TEST_CASE("conditional entropy") {
    SECTION("identical states: side information useless") {
        Rng rng(33);
        const Matrix rho = rng.density_matrix(2);
        CqEnsemble ens({0.3, 0.7}, {rho, rho});
        CHECK(conditional_entropy(ens) ==
              Catch::Approx(entropy_bits(std::vector<double>{0.3, 0.7})).margin(1e-9));
    }
    SECTION("orthogonal pure states: perfectly distinguishable") {
        CqEnsemble ens({0.5, 0.5}, {ket0(), diag2(0, 1)});
        CHECK(conditional_entropy(ens) == Catch::Approx(0.0).margin(1e-9));
    }
    SECTION("half-half |0> and |+>: scalar oracle") {
        CqEnsemble ens({0.5, 0.5}, {ket0(), ket_plus()});
        // H(XB) = 1 (two rank-1 blocks of weight 1/2); H(B) from the 2x2 mixture
        const double disc = std::sqrt(0.5);
        const double l1 = (1 + disc) / 2, l2 = (1 - disc) / 2;
        const double hb = -l1 * std::log2(l1) - l2 * std::log2(l2);
        CHECK(conditional_entropy(ens) == Catch::Approx(1.0 - hb).margin(1e-9));
    }
}

TEST_CASE("petz divergence examples") {
    Rng rng(34);
    const Matrix rho = rng.density_matrix(2);
    for (double alpha : {0.3, 0.5, 2.0, 3.5})
        CHECK(petz_D(rho, rho, alpha) == Catch::Approx(0.0).margin(1e-9));
    // commuting case, alpha = 1/2
    const double expect = -2.0 * std::log2(std::sqrt(3.0 / 8.0) + std::sqrt(1.0 / 8.0));
    CHECK(petz_D(diag2(0.5, 0.5), diag2(0.75, 0.25), 0.5) ==
          Catch::Approx(expect).margin(1e-10));
    // rank-1 projectors: K_1/2 = |<0|+>|^2 = 1/2
    CHECK(petz_D(ket0(), ket_plus(), 0.5) == Catch::Approx(2.0).margin(1e-9));
}

TEST_CASE("sandwiched divergence examples") {
    Rng rng(35);
    const Matrix rho = rng.density_matrix(2);
    for (double alpha : {0.3, 0.5, 2.0, 3.5})
        CHECK(sandwiched_D(rho, rho, alpha) == Catch::Approx(0.0).margin(1e-9));
    // commuting reduction equals petz
    for (double alpha : {0.25, 0.5, 0.75, 2.0, 3.0})
        CHECK(sandwiched_D(diag2(0.6, 0.4), diag2(0.2, 0.8), alpha) ==
              Catch::Approx(petz_D(diag2(0.6, 0.4), diag2(0.2, 0.8), alpha)).margin(1e-9));
    // ordering D* <= D at alpha = 2 on a random pair
    const Matrix sigma = rng.density_matrix(2);
    CHECK(sandwiched_D(rho, sigma, 2.0) <= petz_D(rho, sigma, 2.0) + 1e-9);
}

TEST_CASE("support conventions for infinite values") {
    CHECK(is_inf(petz_D(ket0(), diag2(0, 1), 0.5)));
    CHECK(is_inf(petz_D(ket0(), ket_plus(), 2.0)));
    CHECK(is_inf(sandwiched_D(ket0(), diag2(0, 1), 0.5)));
    CHECK(is_inf(sandwiched_D(ket0(), ket_plus(), 2.0)));
    // alpha < 1 with overlapping support stays finite
    CHECK(!is_inf(petz_D(ket0(), ket_plus(), 0.5)));
}

TEST_CASE("monotonicity in alpha") {
    // Small alpha raises sigma to a large power, so eigenvalues of the
    // sandwiched inner matrix span many orders of magnitude; floor the
    // spectra to keep the evaluation within double-precision resolution.
    Rng rng(36);
    for (int trial = 0; trial < 30; ++trial) {
        const int d = 2 + static_cast<int>(rng.below(2));
        const double eps = 0.2;
        const Matrix rho =
            ((1 - eps) * rng.density_matrix(d) + eps * maximally_mixed(d)).eval();
        const Matrix sigma =
            ((1 - eps) * rng.density_matrix(d) + eps * maximally_mixed(d)).eval();
        double prev_p = -kInf, prev_s = -kInf;
        for (double alpha = 0.1; alpha <= 5.0; alpha += 0.1) {
            const double dp = petz_D(rho, sigma, alpha);
            const double ds = sandwiched_D(rho, sigma, alpha);
            CHECK(dp >= prev_p - 1e-8);
            CHECK(ds >= prev_s - 1e-6);
            prev_p = dp;
            prev_s = ds;
        }
    }
}

TEST_CASE("sandwiched below petz") {
    Rng rng(37);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 2 + static_cast<int>(rng.below(2));
        const Matrix rho = rng.density_matrix(d);
        const Matrix sigma = rng.density_matrix(d);
        for (double alpha : {0.3, 0.7, 1.5, 2.5, 4.0})
            CHECK(sandwiched_D(rho, sigma, alpha) <= petz_D(rho, sigma, alpha) + 1e-9);
    }
}

TEST_CASE("additivity under tensor products") {
    Rng rng(38);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix r1 = rng.density_matrix(2), r2 = rng.density_matrix(2);
        const Matrix s1 = rng.density_matrix(2), s2 = rng.density_matrix(2);
        for (double alpha : {0.5, 1.5, 2.0}) {
            CHECK(petz_D(kron(r1, r2), kron(s1, s2), alpha) ==
                  Catch::Approx(petz_D(r1, s1, alpha) + petz_D(r2, s2, alpha)).margin(1e-8));
            CHECK(sandwiched_D(kron(r1, r2), kron(s1, s2), alpha) ==
                  Catch::Approx(sandwiched_D(r1, s1, alpha) + sandwiched_D(r2, s2, alpha))
                      .margin(1e-8));
        }
    }
}

TEST_CASE("classical reduction") {
    Rng rng(39);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = rng.distribution(3);
        const auto q = rng.distribution(3);
        Matrix dp = Matrix::Zero(3, 3), dq = Matrix::Zero(3, 3);
        for (int i = 0; i < 3; ++i) { dp(i, i) = p[i]; dq(i, i) = q[i]; }
        for (double alpha : {0.3, 0.6, 1.7, 3.0}) {
            const double cls = classical_renyi(p, q, alpha);
            CHECK(petz_D(dp, dq, alpha) == Catch::Approx(cls).margin(1e-9));
            CHECK(sandwiched_D(dp, dq, alpha) == Catch::Approx(cls).margin(1e-9));
        }
    }
}

TEST_CASE("alpha near one delegates to relative entropy") {
    Rng rng(40);
    const Matrix rho = rng.density_matrix(2);
    const Matrix sigma = rng.density_matrix(2);
    const double d1 = relative_entropy(rho, sigma);
    CHECK(petz_D(rho, sigma, 1.0 + 1e-8) == Catch::Approx(d1).margin(1e-12));
    CHECK(sandwiched_D(rho, sigma, 1.0 - 1e-8) == Catch::Approx(d1).margin(1e-12));
    // and continuity: nearby alpha outside the window is close
    CHECK(petz_D(rho, sigma, 1.0 + 1e-4) == Catch::Approx(d1).margin(1e-2));
}

TEST_CASE("convexity of sigma -> sandwiched divergence") {
    Rng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix rho = rng.density_matrix(2);
        const Matrix s0 = rng.density_matrix(2);
        const Matrix s1 = rng.density_matrix(2);
        const Matrix mid = (s0 + s1) / 2.0;
        // convexity in sigma holds for alpha = 1/(1+s) >= 1/2, i.e. s <= 1;
        // numerically refuted for s > 1, so the check stays in (-1,0) u (0,1]
        for (double s : {-0.5, -0.25, 0.5, 1.0}) {
            const double alpha = 1.0 / (1.0 + s);
            const double fm = sandwiched_D(rho, mid, alpha);
            const double avg =
                0.5 * sandwiched_D(rho, s0, alpha) + 0.5 * sandwiched_D(rho, s1, alpha);
            CHECK(fm <= avg + 1e-8);
        }
    }
}

TEST_CASE("vn entropy") {
    CHECK(vn_entropy(diag2(0.5, 0.5)) == Catch::Approx(1.0));
    CHECK(vn_entropy(ket0()) == Catch::Approx(0.0).margin(1e-12));
}
