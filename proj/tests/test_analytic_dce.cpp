#include <doctest.h>

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "dce/analytic_dce.hpp"
#include "dce/error.hpp"
#include "dce/system_model.hpp"

using namespace dce;

namespace {

double binomial(int n, int r) {
    double out = 1.0;
    for (int i = 1; i <= r; ++i) {
        out = out * (n - r + i) / i;
    }
    return out;
}

// Explicit power series of L_k^m(x).
double laguerre_series(int k, int m, double x) {
    double sum = 0.0;
    double fact = 1.0;
    for (int i = 0; i <= k; ++i) {
        if (i > 0) {
            fact *= i;
        }
        sum += ((i % 2 == 0) ? 1.0 : -1.0) * binomial(k + m, k - i) * std::pow(x, i) / fact;
    }
    return sum;
}

// exp(alpha (b^dag - b)) on a large truncation.
Eigen::MatrixXd displacement_expm(double alpha, int dim) {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(dim, dim);
    for (int j = 0; j + 1 < dim; ++j) {
        b(j, j + 1) = std::sqrt(j + 1.0);
    }
    const Eigen::MatrixXd gen = alpha * (b.transpose() - b);
    return gen.exp();
}

SystemParams params_with(double g, SpaceDims dims) {
    SystemParams p;
    p.g = g;
    p.dims = dims;
    return p;
}

}  // namespace

TEST_CASE("Laguerre polynomials") {
    for (int m : {0, 1, 3, 7}) {
        for (double x : {0.0, 0.04, 0.3}) {
            CHECK(assoc_laguerre(0, m, x) == 1.0);
            CHECK(assoc_laguerre(1, m, x) == doctest::Approx(1.0 + m - x));
        }
    }
    CHECK(assoc_laguerre(3, 2, 0.04) == doctest::Approx(laguerre_series(3, 2, 0.04)).epsilon(1e-14));
    for (int k = 0; k <= 15; ++k) {
        for (int m : {0, 1, 2, 5}) {
            for (double x : {0.01, 0.16, 0.64}) {
                CHECK(assoc_laguerre(k, m, x) == doctest::Approx(laguerre_series(k, m, x)).epsilon(1e-11));
            }
        }
    }
    CHECK_THROWS_AS(assoc_laguerre(-1, 0, 0.1), DomainError);
}

TEST_CASE("displacement elements") {
    CHECK(displacement_element(0, 0, 0.2) == doctest::Approx(std::exp(-0.02)).epsilon(1e-15));
    CHECK(displacement_element(0, 0, 0.2) == doctest::Approx(0.980199).epsilon(1e-6));
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            CHECK(displacement_element(i, j, 0.0) == (i == j ? 1.0 : 0.0));
        }
    }
    // large indices stay finite
    CHECK(std::isfinite(displacement_element(40, 3, 0.3)));
    CHECK(std::isfinite(displacement_element(3, 40, 0.3)));
}

TEST_CASE("displacement elements match the matrix exponential") {
    for (double alpha : {0.05, 0.2, 0.4}) {
        const Eigen::MatrixXd d = displacement_expm(alpha, 60);
        double worst = 0.0;
        for (int i = 0; i <= 10; ++i) {
            for (int j = 0; j <= 10; ++j) {
                const double ref = d(i, j);
                const double err = std::abs(displacement_element(i, j, alpha) - ref);
                worst = std::max(worst, err / std::max(std::abs(ref), 1e-300));
            }
        }
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("displacement matrix is unitary in the low block") {
    const int dim = 30;
    Eigen::MatrixXd d(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            d(i, j) = displacement_element(i, j, 0.2);
        }
    }
    const Eigen::MatrixXd u = d.transpose() * d;
    CHECK((u.topLeftCorner(10, 10) - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("displaced Fock states") {
    const SystemParams p = params_with(0.1, SpaceDims(6, 14));
    for (int k = 0; k < 5; ++k) {
        CHECK((displaced_fock_state(0, k, p) - basis_state(p.dims, 0, k)).norm() < 1e-15);
    }
    const SystemParams free = params_with(0.0, SpaceDims(6, 14));
    CHECK((displaced_fock_state(2, 3, free) - basis_state(free.dims, 2, 3)).norm() < 1e-15);

    const StateVector v = displaced_fock_state(2, 0, p);
    CHECK(std::abs(v(p.dims.index(2, 0))) == doctest::Approx(std::exp(-0.02)).epsilon(1e-10));
    CHECK(v.norm() == doctest::Approx(1.0));

    // <k|k'_2> = D_{k,k'}(-2 beta) = (-1)^(k-k') D_{k,k'}(2 beta)
    for (int kp = 0; kp < 4; ++kp) {
        const StateVector w = displaced_fock_state(2, kp, p);
        for (int k = 0; k < 6; ++k) {
            CHECK(std::abs(w(p.dims.index(2, k)).real() - displacement_element(k, kp, -0.2)) < 1e-10);
            CHECK(std::abs(std::abs(w(p.dims.index(2, k))) - std::abs(displacement_element(k, kp, 0.2))) < 1e-10);
        }
    }
    CHECK_THROWS_AS(displaced_fock_state(6, 0, p), DimensionError);
    CHECK_THROWS_AS(displaced_fock_state(0, 14, p), DimensionError);
}

TEST_CASE("displaced Fock states are eigenstates of the standard Hamiltonian") {
    SystemParams p = params_with(0.1, SpaceDims(4, 40));
    p.omega_c = 1.37;
    const Operator h = build_hs(p, false);
    for (int n = 0; n < 4; ++n) {
        for (int k = 0; k < 8; ++k) {
            const StateVector v = displaced_fock_state(n, k, p);
            const StateVector r = h.mat() * v - standard_energy(n, k, p) * v;
            CHECK(r.norm() < 1e-10);
        }
    }
}

TEST_CASE("standard optomechanics energies") {
    SystemParams p = params_with(0.1, SpaceDims(6, 14));
    p.omega_c = 1.37;
    CHECK(standard_energy(0, 4, p) == doctest::Approx(4.0));
    CHECK(standard_energy(2, 0, p) == doctest::Approx(2 * 1.37 - 0.04));
    for (double g : {0.01, 0.04, 0.1}) {
        p.g = g;
        const double w = first_order_resonance(1, p);
        CHECK(w == doctest::Approx(0.5 + 2 * g * g));
        p.omega_c = w;
        CHECK(standard_energy(0, 1, p) == doctest::Approx(standard_energy(2, 0, p)).epsilon(1e-14));
        for (int q = 1; q <= 4; ++q) {
            p.omega_c = first_order_resonance(q, p);
            CHECK(standard_energy(0, q + 2, p) == doctest::Approx(standard_energy(2, 2, p)).epsilon(1e-14));
        }
    }
}

TEST_CASE("first-order splittings") {
    SplittingQuery q1{1, 1, params_with(0.01, SpaceDims(6, 14))};
    CHECK(2 * casimir_rabi_splitting(q1) == doctest::Approx(0.01 * std::sqrt(2.0)).epsilon(2e-4));

    for (int k = 1; k <= 5; ++k) {
        const double g = 1e-6;
        SplittingQuery q{k, 1, params_with(g, SpaceDims(6, 14))};
        CHECK(casimir_rabi_splitting(q) / (g * std::sqrt(2.0 * k) / 2) == doctest::Approx(1.0).epsilon(1e-4));
    }

    SplittingQuery q33{3, 3, params_with(0.1, SpaceDims(6, 14))};
    CHECK(2 * casimir_rabi_splitting(q33) == doctest::Approx(6.9e-3).epsilon(0.02));

    CHECK_THROWS_AS(casimir_rabi_splitting(SplittingQuery{2, 3, params_with(0.1, SpaceDims(6, 14))}), DomainError);
    CHECK_THROWS_AS(casimir_rabi_splitting(SplittingQuery{2, 0, params_with(0.1, SpaceDims(6, 14))}), DomainError);
}

TEST_CASE("splitting equals the brute-force matrix element") {
    for (double g : {0.01, 0.1}) {
        const SystemParams p = params_with(g, SpaceDims(6, 20));
        const Operator v = build_v_dce(p);
        for (const auto& [k, q] : {std::pair{2, 2}, std::pair{3, 3}, std::pair{4, 2}, std::pair{3, 1}}) {
            const StateVector bra = basis_state(p.dims, 0, k);
            const StateVector ket = displaced_fock_state(2, k - q, p);
            const double brute = std::abs(bra.dot(v.mat() * ket));
            CHECK(casimir_rabi_splitting(SplittingQuery{k, q, p}) == doctest::Approx(brute).epsilon(1e-9));
        }
    }
}

TEST_CASE("splittings shrink with q at fixed k") {
    for (double g : {0.01, 0.1}) {
        const SystemParams p = params_with(g, SpaceDims(6, 14));
        for (int k = 4; k <= 8; ++k) {
            const double s2 = casimir_rabi_splitting(SplittingQuery{k, 2, p});
            const double s3 = casimir_rabi_splitting(SplittingQuery{k, 3, p});
            const double s4 = casimir_rabi_splitting(SplittingQuery{k, 4, p});
            CHECK(s3 < s2);
            CHECK(s4 < s3);
        }
    }
}
