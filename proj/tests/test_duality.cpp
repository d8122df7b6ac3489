#include "cqdual/duality.hpp"
#include "cqdual/rng.hpp"
#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace cqdual;

namespace {

CqEnsemble random_qubit_pair(Rng& rng, double floor_eps = 0.05) {
    auto draw = [&] {
        Matrix m = rng.density_matrix(2);
        return ((1 - floor_eps) * m + floor_eps * maximally_mixed(2)).eval();
    };
    auto p = rng.distribution(2, 0.1);
    return CqEnsemble(p, {draw(), draw()});
}

} // namespace

TEST_CASE("G function forms agree") {
    Rng rng(71);
    SECTION("Q = P, s = 0 gives zero") {
        const CqEnsemble ens = random_qubit_pair(rng);
        const Matrix tau = rng.density_matrix(2);
        CHECK(G_function(AuxVariant::petz, 0.0, ens.prior(), tau, ens.prior(), ens) ==
              Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("identical states, tau = that state") {
        const Matrix rho = rng.density_matrix(2);
        CqEnsemble same({0.5, 0.5}, {rho, rho});
        for (double s : {0.5, 1.0}) {
            const double g =
                G_function(AuxVariant::petz, s, same.prior(), rho, same.prior(), same);
            CHECK(g == Catch::Approx(-s * 1.0).margin(1e-9)); // -s H(P), H(P) = 1
            CHECK(G_function_def_form(AuxVariant::petz, s, same.prior(), rho, same.prior(),
                                      same) == Catch::Approx(g).margin(1e-8));
        }
    }
    SECTION("random instances, both variants") {
        for (int trial = 0; trial < 10; ++trial) {
            const CqEnsemble ens = random_qubit_pair(rng);
            const Matrix tau = rng.density_matrix(2);
            const auto q = rng.distribution(2);
            for (double s : {-0.5, 0.5, 2.0}) {
                const AuxVariant variant =
                    s < 0 ? AuxVariant::sandwiched : AuxVariant::petz;
                CHECK(G_function(variant, s, q, tau, ens.prior(), ens) ==
                      Catch::Approx(G_function_def_form(variant, s, q, tau, ens.prior(), ens))
                          .margin(1e-8));
            }
        }
    }
}

TEST_CASE("classical variational formula") {
    SECTION("P = Q gives zero") {
        const auto rep = classical_variational_check({0.3, 0.7}, {0.3, 0.7}, 1.0);
        CHECK(rep.pass);
        CHECK(rep.closed_form == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("s = 0 reduces to min D(R||P) = 0") {
        const auto rep = classical_variational_check({0.4, 0.6}, {0.9, 0.1}, 0.0);
        CHECK(rep.pass);
        CHECK(rep.closed_form == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("worked example P=(.7,.3), Q=(.4,.6), s=1") {
        const auto rep = classical_variational_check({0.7, 0.3}, {0.4, 0.6}, 1.0);
        CHECK(rep.pass);
        CHECK(rep.minimizer_value == Catch::Approx(rep.closed_form).margin(1e-9));
    }
    SECTION("random instances incl. negative s") {
        Rng rng(72);
        for (int trial = 0; trial < 10; ++trial) {
            const auto p = rng.distribution(3);
            const auto q = rng.distribution(3);
            for (double s : {-0.5, 0.25, 2.0}) {
                const auto rep = classical_variational_check(p, q, s);
                INFO("s " << s);
                CHECK(rep.pass);
            }
        }
    }
}

TEST_CASE("auxiliary duality, identical states") {
    // all states identical: the side information is useless and
    // E_0(s) = -(1+s) log2 sum_x P(x)^{1/(1+s)} in closed form
    Rng rng(73);
    const Matrix rho = rng.density_matrix(2);
    CqEnsemble same({0.25, 0.75}, {rho, rho});
    for (double s : {0.5, 1.0}) {
        const auto rep = aux_duality_check(AuxVariant::petz, s, same, {2, 16}, 3);
        CHECK(rep.pass);
        double z = 0.0;
        for (double px : same.prior()) z += std::pow(px, 1.0 / (1.0 + s));
        CHECK(rep.lhs == Catch::Approx(-(1.0 + s) * std::log2(z)).margin(1e-5));
    }
}

TEST_CASE("auxiliary duality, qubit ensembles") {
    Rng rng(74);
    for (int trial = 0; trial < 2; ++trial) {
        const CqEnsemble ens = random_qubit_pair(rng);
        for (double s : {0.5, 1.0}) {
            const auto rep = aux_duality_check(AuxVariant::petz, s, ens, {2, 16}, 3);
            INFO("petz s " << s << " lhs " << rep.lhs << " rhs " << rep.rhs << " gap "
                           << rep.grid_gap);
            CHECK(rep.pass);
            CHECK(rep.lhs <= rep.rhs + 1e-9);
        }
        for (double s : {-0.5, -0.25}) {
            const auto rep = aux_duality_check(AuxVariant::sandwiched, s, ens, {2, 16}, 3);
            INFO("sandwiched s " << s << " lhs " << rep.lhs << " rhs " << rep.rhs);
            CHECK(rep.pass);
            CHECK(rep.lhs <= rep.rhs + 1e-9);
        }
    }
}

TEST_CASE("mirror symmetry") {
    Rng rng(75);
    SECTION("boundaries") {
        const CqEnsemble ens = random_qubit_pair(rng);
        const std::vector<double> q{0.5, 0.5};
        for (MirrorKind kind : {MirrorKind::sp, MirrorKind::r_down, MirrorKind::sc}) {
            CHECK(mirror_symmetry_check(kind, 0.0, q, ens).pass);
            CHECK(mirror_symmetry_check(kind, entropy_bits(q), q, ens).pass);
        }
    }
    SECTION("random midpoints") {
        for (int trial = 0; trial < 10; ++trial) {
            const CqEnsemble ens = random_qubit_pair(rng);
            const auto q = rng.distribution(2, 0.15);
            const double rate = rng.uniform(0.0, entropy_bits(q));
            for (MirrorKind kind : {MirrorKind::sp, MirrorKind::r_down, MirrorKind::sc}) {
                const auto rep = mirror_symmetry_check(kind, rate, q, ens);
                INFO("kind " << static_cast<int>(kind) << " rate " << rate << " lhs "
                             << rep.lhs << " rhs " << rep.rhs);
                CHECK(rep.pass);
            }
        }
    }
}

TEST_CASE("exponent duality") {
    Rng rng(76);
    const CqEnsemble ens = random_qubit_pair(rng);
    const auto cq = channel_quantities(ens.prior(), ens);
    SECTION("sphere packing above the conditional entropy") {
        const double rate = cq.cond_entropy + 0.2;
        const auto rep =
            exponent_duality_check(ExponentDualityKind::sp, rate, ens, {2, 16}, 3);
        INFO("lhs " << rep.lhs << " rhs " << rep.rhs << " gap " << rep.grid_gap);
        CHECK(rep.lhs <= rep.rhs + 1e-9);
        CHECK(rep.pass);
    }
    SECTION("strong converse below the conditional entropy") {
        const double rate = std::max(cq.cond_entropy - 0.2, 0.01);
        const auto rep =
            exponent_duality_check(ExponentDualityKind::sc, rate, ens, {2, 16}, 3);
        INFO("lhs " << rep.lhs << " rhs " << rep.rhs << " gap " << rep.grid_gap);
        CHECK(rep.lhs <= rep.rhs + 1e-9);
        CHECK(rep.pass);
    }
    SECTION("classical ensemble matches scalar Gallager identity") {
        Matrix w0 = Matrix::Zero(2, 2), w1 = Matrix::Zero(2, 2);
        w0(0, 0) = 0.85; w0(1, 1) = 0.15;
        w1(0, 0) = 0.2; w1(1, 1) = 0.8;
        CqEnsemble cls({0.5, 0.5}, {w0, w1});
        const auto joint = oracles::classical_joint(cls);
        const double rate = conditional_entropy(cls) + 0.15;
        const auto rep =
            exponent_duality_check(ExponentDualityKind::sp, rate, cls, {2, 16}, 3);
        // scalar oracle: sup_s { gallager E0(s) + s R }
        double best = 0.0;
        for (double s = 0.0; s <= 8.0; s += 1e-3)
            best = std::max(best, oracles::gallager_E0(s, joint) + s * rate);
        CHECK(rep.lhs == Catch::Approx(best).margin(1e-3));
        CHECK(rep.pass);
    }
}

TEST_CASE("r duality probe reports a gap") {
    Rng rng(77);
    const CqEnsemble ens = random_qubit_pair(rng);
    const auto cq = channel_quantities(ens.prior(), ens);
    const auto rep = r_duality_probe(cq.cond_entropy + 0.1, ens, {2, 8}, 2);
    CHECK(std::isfinite(rep.lhs));
    CHECK(std::isfinite(rep.rhs));
    CHECK(rep.lhs <= rep.rhs + 1e-6); // min over all Q of a pointwise-larger family
}

TEST_CASE("minimax interchange for the sandwiched G") {
    Rng rng(78);
    for (int trial = 0; trial < 2; ++trial) {
        const CqEnsemble ens = random_qubit_pair(rng);
        for (double s : {-0.5, -0.25}) {
            const auto rep = minimax_interchange_check(s, ens, {2, 16}, 3);
            INFO("s " << s << " lhs " << rep.lhs << " rhs " << rep.rhs);
            CHECK(rep.pass);
        }
    }
}

TEST_CASE("refinement monotonicity of the rhs") {
    Rng rng(79);
    const CqEnsemble ens = random_qubit_pair(rng);
    double prev = kInf;
    for (int m : {4, 8, 16, 32}) {
        const auto rep = aux_duality_check(AuxVariant::petz, 1.0, ens, {2, m}, 0);
        CHECK(rep.rhs <= prev + 1e-12);
        prev = rep.rhs;
    }
}
