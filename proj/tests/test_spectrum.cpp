#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dce/analytic_dce.hpp"
#include "dce/error.hpp"
#include "dce/spectrum.hpp"

using namespace dce;

namespace {

SystemParams params_with(double g, double omega_c, SpaceDims dims) {
    SystemParams p;
    p.g = g;
    p.omega_c = omega_c;
    p.dims = dims;
    return p;
}

}  // namespace

TEST_CASE("eigensystem residual and orthonormality") {
    const SystemParams p = params_with(0.1, 1.52, SpaceDims(6, 14));
    const Operator h = build_hs(p);
    const EigenSystem es = diagonalize(h);
    REQUIRE(es.size() == 84);
    const Eigen::MatrixXcd residual = h.mat() * es.states - es.states * es.energies.asDiagonal();
    CHECK(residual.norm() < 1e-9 * h.mat().norm());
    const Eigen::MatrixXcd gram = es.states.adjoint() * es.states;
    CHECK((gram - Eigen::MatrixXcd::Identity(84, 84)).cwiseAbs().maxCoeff() < 1e-10);
    for (int j = 1; j < es.size(); ++j) {
        CHECK(es.energies(j) >= es.energies(j - 1));
    }
}

TEST_CASE("diagonalize rejects non-Hermitian input") {
    const SpaceDims dims(2, 2);
    Operator h = Operator::identity(dims);
    h.mat()(0, 1) = 1.0;
    CHECK_THROWS_AS(diagonalize(h), DomainError);
}

TEST_CASE("uncoupled energies") {
    const SystemParams p = params_with(0.0, 1.37, SpaceDims(4, 6));
    const EigenSystem es = diagonalize(build_hs(p));
    std::vector<double> expected;
    for (int n = 0; n < 4; ++n) {
        for (int k = 0; k < 6; ++k) {
            expected.push_back(1.37 * n + k);
        }
    }
    std::sort(expected.begin(), expected.end());
    for (int j = 0; j < es.size(); ++j) {
        CHECK(es.energies(j) == doctest::Approx(expected[j]).epsilon(1e-13));
    }
    // ties ordered by dominant bare index: omega_c = 1 gives |0,1> and |1,0> degenerate
    const SystemParams tie = params_with(0.0, 1.0, SpaceDims(3, 3));
    const EigenSystem et = diagonalize(build_hs(tie));
    const LevelLabel l1 = label_state(et.state(1), tie.dims);
    const LevelLabel l2 = label_state(et.state(2), tie.dims);
    CHECK(l1.n == 0);
    CHECK(l1.k == 1);
    CHECK(l2.n == 1);
    CHECK(l2.k == 0);
}

TEST_CASE("standard optomechanics energies from diagonalization") {
    const SystemParams p = params_with(0.1, 1.37, SpaceDims(4, 40));
    const EigenSystem es = diagonalize(build_hs(p, false));
    std::vector<double> expected;
    for (int n = 0; n < 4; ++n) {
        for (int k = 0; k < 40; ++k) {
            const double e = standard_energy(n, k, p);
            if (e < 10.0) {
                expected.push_back(e);
            }
        }
    }
    std::sort(expected.begin(), expected.end());
    for (std::size_t j = 0; j < expected.size(); ++j) {
        CHECK(std::abs(es.energies(static_cast<int>(j)) - expected[j]) < 1e-10);
    }
}

TEST_CASE("level labels") {
    const SystemParams p = params_with(0.04, 0.7, SpaceDims(6, 14));
    const EigenSystem es = diagonalize(build_hs(p));
    const LevelLabel ground = label_state(es.state(0), p.dims);
    CHECK(ground.n == 0);
    CHECK(ground.k == 0);
    CHECK_FALSE(ground.hybridized);
    CHECK(ground.weight > 0.99);
    CHECK(ground.str() == "0:0");

    StateVector mix = (basis_state(p.dims, 0, 1) + basis_state(p.dims, 2, 0)) / std::sqrt(2.0);
    const LevelLabel hyb = label_state(mix, p.dims);
    CHECK(hyb.hybridized);
    CHECK(hyb.str().find(',') == std::string::npos);
    CHECK(hyb.weight + hyb.weight2 == doctest::Approx(1.0));
}

TEST_CASE("level scan without pair creation is piecewise linear") {
    const SystemParams p = params_with(0.04, 1.0, SpaceDims(6, 14));
    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i) {
        grid.push_back(0.2 + 0.9 * i / 40.0);
    }
    const LevelScan scan = level_scan(p, grid, 12, false);
    REQUIRE(scan.levels.rows() == 41);
    REQUIRE(scan.levels.cols() == 12);
    int checked = 0;
    for (int i = 0; i + 1 < 41; ++i) {
        for (int j = 0; j < 12; ++j) {
            if (j > 0) {
                CHECK(scan.levels(i, j) >= scan.levels(i, j - 1));
            }
            const LevelLabel& a = scan.labels[i][j];
            const LevelLabel& b = scan.labels[i + 1][j];
            if (a.n == b.n && a.k == b.k && !a.hybridized && !b.hybridized) {
                const double slope = (scan.levels(i + 1, j) - scan.levels(i, j)) / (grid[i + 1] - grid[i]);
                CHECK(slope == doctest::Approx(a.n).epsilon(1e-9));
                ++checked;
            }
        }
    }
    CHECK(checked > 200);
}

TEST_CASE("level scan is independent of the thread count") {
    const SystemParams p = params_with(0.1, 1.0, SpaceDims(6, 14));
    std::vector<double> grid;
    for (int i = 0; i < 23; ++i) {
        grid.push_back(0.9 + 0.05 * i);
    }
    const LevelScan a = level_scan(p, grid, 10, true, 1);
    const LevelScan b = level_scan(p, grid, 10, true, 3);
    CHECK((a.levels - b.levels).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.omega_c_grid == b.omega_c_grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (int j = 0; j < 10; ++j) {
            CHECK(a.labels[i][j].str() == b.labels[i][j].str());
        }
    }
    CHECK_THROWS_AS(level_scan(p, {1.0, 0.9}, 4, true), DomainError);
    CHECK_THROWS_AS(level_scan(p, grid, 0, true), DomainError);
}

TEST_CASE("q = 1 anticrossing at g = 0.04") {
    const SystemParams p = params_with(0.04, 0.5, SpaceDims(6, 14));
    const double first = first_order_resonance(1, p);
    const SplittingResult r = min_splitting(p, 2, 3, {first - 0.02, first + 0.02});
    CHECK(r.level_lo == 2);
    CHECK(r.level_hi == 3);
    CHECK(std::abs(r.omega_c_star - first) < 1e-4);
    CHECK(r.gap == doctest::Approx(0.04 * std::sqrt(2.0)).epsilon(0.02));
    CHECK(r.gap == doctest::Approx(level_gap(p, r.omega_c_star, 2, 3)));

    const auto [lo, hi] = resonance_levels(p, first, 1, 1);
    CHECK(lo == 2);
    CHECK(hi == 3);
    const SplittingResult located = locate_resonance(p, 1, 1);
    CHECK(located.omega_c_star == doctest::Approx(r.omega_c_star).epsilon(1e-8));
}

TEST_CASE("higher-q anticrossings at g = 0.1") {
    const SystemParams p = params_with(0.1, 1.0, SpaceDims(6, 14));
    for (int q = 2; q <= 4; ++q) {
        const SplittingResult r = locate_resonance(p, q, q);
        CHECK(std::abs(r.omega_c_star - first_order_resonance(q, p)) < 0.02);
        CHECK(r.gap > 0.0);
        CHECK(r.gap < 0.05);
    }
    const SplittingResult r33 = locate_resonance(p, 3, 3);
    CHECK(r33.gap == doctest::Approx(8e-3).epsilon(0.1));
}

TEST_CASE("anticrossings at integer omega_c ignore odd-photon levels") {
    // |1,2> is degenerate with |0,4> and |2,0> near omega_c = 2 but never couples to them.
    for (double g : {0.02, 0.1}) {
        const SystemParams p = params_with(g, 2.0, SpaceDims(6, 14));
        const SplittingResult r = locate_resonance(p, 4, 4);
        CHECK(r.level_hi == r.level_lo + 1);
        SystemParams at = p;
        at.omega_c = r.omega_c_star;
        const EigenSystem es = diagonalize(build_hs(at));
        const StateVector zero = basis_state(p.dims, 0, 4);
        const StateVector pair = displaced_fock_state(2, 0, at);
        for (int j : {r.level_lo, r.level_hi}) {
            const StateVector v = es.state(j);
            CHECK(std::norm(zero.dot(v)) + std::norm(pair.dot(v)) > 0.9);
        }
        CHECK(r.gap == doctest::Approx(level_gap(p, r.omega_c_star, r.level_lo, r.level_hi)).epsilon(1e-9));
        // same order as the first-order coupling, not the odd-level crossing
        const double analytic = 2.0 * casimir_rabi_splitting(SplittingQuery{4, 4, p});
        CHECK(r.gap / analytic > 1.0);
        CHECK(r.gap / analytic < 2.0);
    }
}

TEST_CASE("decoupled limit") {
    const SystemParams p = params_with(1e-3, 0.5, SpaceDims(6, 14));
    const SplittingResult r = locate_resonance(p, 1, 1);
    CHECK(r.gap < 2e-3);
    CHECK(std::abs(r.omega_c_star - 0.5) < 1e-4);
}

TEST_CASE("bracket errors") {
    const SystemParams p = params_with(0.04, 0.5, SpaceDims(6, 14));
    CHECK_THROWS_AS(min_splitting(p, 2, 3, {0.7, 0.8}), BracketError);
    CHECK_THROWS_AS(min_splitting(p, 2, 3, {0.6, 0.5}), BracketError);
    CHECK_THROWS_AS(min_splitting(p, 3, 2, {0.4, 0.6}), DomainError);
}

TEST_CASE("truncation report") {
    const SystemParams p = params_with(0.1, 1.52, SpaceDims(6, 14));
    const TruncationReport r = truncation_check(p, 20);
    CHECK(r.enlarged == SpaceDims(8, 18));
    CHECK(r.n_levels == 20);
    CHECK(r.max_relative_change >= 0.0);
    CHECK(r.converged == (r.max_relative_change < 1e-6));

    const SystemParams free = params_with(0.0, 1.52, SpaceDims(6, 14));
    CHECK(truncation_check(free, 20).max_relative_change < 1e-12);
    CHECK(truncation_check(free, 20).converged);
}
