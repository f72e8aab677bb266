#include <doctest.h>

#include <random>

#include "dce/error.hpp"
#include "dce/fock_algebra.hpp"

using namespace dce;

namespace {

Eigen::MatrixXcd random_matrix(int rows, int cols, std::mt19937& rng) {
    std::normal_distribution<double> d;
    Eigen::MatrixXcd m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            m(i, j) = Complex(d(rng), d(rng));
        }
    }
    return m;
}

}  // namespace

TEST_CASE("annihilation matrix entries") {
    const ModeMatrix a = annihilation(3);
    ModeMatrix expected = ModeMatrix::Zero(3, 3);
    expected(0, 1) = 1.0;
    expected(1, 2) = std::sqrt(2.0);
    CHECK((a - expected).norm() == 0.0);

    Eigen::VectorXcd one = Eigen::VectorXcd::Zero(2);
    one(1) = 1.0;
    const Eigen::VectorXcd lowered = annihilation(2) * one;
    CHECK(std::abs(lowered(0) - Complex(1.0)) == 0.0);
    CHECK(std::abs(lowered(1)) == 0.0);

    const ModeMatrix n = dagger(annihilation(3)) * annihilation(3);
    CHECK((n - number_matrix(3)).norm() < 1e-15);
    CHECK(n(2, 2).real() == doctest::Approx(2.0));

    CHECK_THROWS_AS(annihilation(1), DimensionError);
    CHECK_THROWS_AS(creation(0), DimensionError);
}

TEST_CASE("dagger") {
    const SpaceDims dims(2, 3);
    const Operator id = Operator::identity(dims);
    CHECK((dagger(id).mat() - id.mat()).norm() == 0.0);

    std::mt19937 rng(7);
    const Operator x(dims, random_matrix(6, 6, rng));
    CHECK((dagger(dagger(x)).mat() - x.mat()).norm() == 0.0);
    CHECK(dagger(x).dims() == dims);

    ModeMatrix expected = ModeMatrix::Zero(2, 2);
    expected(1, 0) = 1.0;
    CHECK((dagger(annihilation(2)) - expected).norm() == 0.0);
}

TEST_CASE("tensor ordering and examples") {
    CHECK((tensor(mode_identity(2), mode_identity(3)).mat() - Eigen::MatrixXcd::Identity(6, 6)).norm() == 0.0);

    const SpaceDims dims(2, 2);
    const StateVector out = tensor(annihilation(2), mode_identity(2)).mat() * basis_state(dims, 1, 0);
    CHECK((out - basis_state(dims, 0, 0)).norm() < 1e-15);

    ModeMatrix p = ModeMatrix::Zero(2, 2);
    p(1, 1) = 1.0;
    const Operator pp = tensor(p, p);
    int nonzero = 0;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            if (std::abs(pp(i, j)) != 0.0) {
                ++nonzero;
            }
        }
    }
    CHECK(nonzero == 1);
    CHECK(pp.element(1, 1, 1, 1) == Complex(1.0));

    CHECK_THROWS_AS(tensor(mode_identity(3), mode_identity(3), SpaceDims(2, 3)), DimensionError);
}

TEST_CASE("tensor element formula") {
    std::mt19937 rng(11);
    const Eigen::MatrixXcd a = random_matrix(3, 3, rng);
    const Eigen::MatrixXcd b = random_matrix(4, 4, rng);
    const Operator t = tensor(a, b);
    for (int n = 0; n < 3; ++n) {
        for (int k = 0; k < 4; ++k) {
            for (int n2 = 0; n2 < 3; ++n2) {
                for (int k2 = 0; k2 < 4; ++k2) {
                    CHECK(std::abs(t.element(n, k, n2, k2) - a(n, n2) * b(k, k2)) < 1e-14);
                    CHECK(std::abs(t(n * 4 + k, n2 * 4 + k2) - a(n, n2) * b(k, k2)) < 1e-14);
                }
            }
        }
    }
}

TEST_CASE("mixed product property") {
    std::mt19937 rng(3);
    for (const auto& [nc, nm] : {std::pair{2, 2}, std::pair{3, 5}, std::pair{4, 3}}) {
        const Eigen::MatrixXcd a = random_matrix(nc, nc, rng);
        const Eigen::MatrixXcd b = random_matrix(nm, nm, rng);
        const Eigen::MatrixXcd c = random_matrix(nc, nc, rng);
        const Eigen::MatrixXcd d = random_matrix(nm, nm, rng);
        const Operator lhs = tensor(a, b) * tensor(c, d);
        const Operator rhs = tensor(a * c, b * d);
        CHECK((lhs.mat() - rhs.mat()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("lifted ladder operators commute across modes") {
    const SpaceDims dims(4, 6);
    const Operator comm = commutator(cavity_lowering(dims), mechanics_lowering(dims));
    CHECK(comm.mat().cwiseAbs().maxCoeff() == 0.0);
    const Operator comm2 = commutator(dagger(cavity_lowering(dims)), mechanics_lowering(dims));
    CHECK(comm2.mat().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("canonical commutator away from the truncation edge") {
    const int dim = 6;
    const ModeMatrix a = annihilation(dim);
    const ModeMatrix c = a * dagger(a) - dagger(a) * a;
    for (int i = 0; i < dim - 1; ++i) {
        for (int j = 0; j < dim - 1; ++j) {
            CHECK(std::abs(c(i, j) - Complex(i == j ? 1.0 : 0.0)) < 1e-14);
        }
    }
    CHECK(std::abs(c(dim - 1, dim - 1) - Complex(1.0 - dim)) < 1e-12);
}

TEST_CASE("number operator spectra") {
    const SpaceDims dims(4, 3);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(photon_number(dims).mat());
    std::vector<int> counts(4, 0);
    for (int i = 0; i < dims.joint(); ++i) {
        const double v = es.eigenvalues()(i);
        const int r = static_cast<int>(std::lround(v));
        CHECK(std::abs(v - r) < 1e-12);
        REQUIRE(r >= 0);
        REQUIRE(r < 4);
        ++counts[r];
    }
    for (int c : counts) {
        CHECK(c == dims.n_m);
    }
    const Operator nb = phonon_number(dims);
    CHECK(nb.element(2, 2, 2, 2).real() == 2.0);
}

TEST_CASE("space dims bookkeeping") {
    const SpaceDims dims(6, 14);
    CHECK(dims.joint() == 84);
    CHECK(dims.index(2, 3) == 31);
    CHECK(dims.photon_of(31) == 2);
    CHECK(dims.phonon_of(31) == 3);
    CHECK_THROWS_AS(dims.index(6, 0), DimensionError);
    CHECK_THROWS_AS(dims.index(0, -1), DimensionError);
    CHECK_THROWS_AS(SpaceDims(1, 4), DimensionError);

    const Operator parity = photon_parity(SpaceDims(3, 2));
    CHECK(parity.element(1, 0, 1, 0).real() == -1.0);
    CHECK(parity.element(2, 1, 2, 1).real() == 1.0);
}

TEST_CASE("operator arithmetic checks dimensions") {
    const Operator a = Operator::identity(SpaceDims(2, 3));
    const Operator b = Operator::identity(SpaceDims(3, 2));
    CHECK_THROWS_AS(a + b, DimensionError);
    CHECK_THROWS_AS(a * b, DimensionError);
    CHECK_THROWS_AS(Operator(SpaceDims(2, 2), Eigen::MatrixXcd::Zero(3, 3)), DimensionError);
    const Operator s = (a + a) * Complex(0.5);
    CHECK((s.mat() - a.mat()).norm() == 0.0);
    CHECK(a.hermiticity_defect() == 0.0);
}
