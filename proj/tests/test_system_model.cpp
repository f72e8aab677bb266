#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dce/error.hpp"
#include "dce/system_model.hpp"

using namespace dce;

namespace {

SystemParams params_with(double g, SpaceDims dims = SpaceDims(6, 14)) {
    SystemParams p;
    p.g = g;
    p.dims = dims;
    return p;
}

}  // namespace

TEST_CASE("build_h0 diagonal") {
    SystemParams p = params_with(0.3, SpaceDims(2, 2));
    const Operator h0 = build_h0(p);
    const Eigen::Vector4d expected(0.0, 1.0, 1.5, 2.5);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            CHECK(std::abs(h0(i, j) - Complex(i == j ? expected(i) : 0.0)) == 0.0);
        }
    }
    p.g = 0.0;
    CHECK((build_h0(p).mat() - h0.mat()).norm() == 0.0);
}

TEST_CASE("build_v_om elements") {
    const SystemParams p = params_with(0.07);
    const Operator v = build_v_om(p);
    CHECK(std::abs(v.element(1, 0, 1, 1) - Complex(0.07)) < 1e-15);
    // g n sqrt(k+1) between |n,k> and |n,k+1>
    CHECK(std::abs(v.element(3, 4, 3, 5) - Complex(0.07 * 3 * std::sqrt(5.0))) < 1e-14);
    const SpaceDims& d = p.dims;
    for (int i = 0; i < d.joint(); ++i) {
        for (int j = 0; j < d.joint(); ++j) {
            if (d.photon_of(i) != d.photon_of(j)) {
                CHECK(std::abs(v(i, j)) == 0.0);
            }
        }
    }
    CHECK(build_v_om(params_with(0.0)).mat().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("build_v_dce elements and selection rule") {
    const SystemParams p = params_with(0.1);
    const Operator v = build_v_dce(p);
    CHECK(std::abs(v.element(2, 0, 0, 1) - Complex(0.1 / std::sqrt(2.0))) < 1e-15);
    // (g/2) sqrt((n+1)(n+2)) sqrt(k) for <n+2,k-1|a^dag^2 b|n,k>
    CHECK(std::abs(v.element(3, 2, 1, 3) - Complex(0.05 * std::sqrt(2.0 * 3.0) * std::sqrt(3.0))) < 1e-14);
    const SpaceDims& d = p.dims;
    for (int i = 0; i < d.joint(); ++i) {
        for (int j = 0; j < d.joint(); ++j) {
            if (std::abs(d.photon_of(i) - d.photon_of(j)) != 2) {
                CHECK(std::abs(v(i, j)) == 0.0);
            }
        }
    }
    CHECK(v.hermiticity_defect() == 0.0);
}

TEST_CASE("build_hs composition") {
    SystemParams p = params_with(0.0);
    CHECK((build_hs(p).mat() - build_h0(p).mat()).norm() == 0.0);

    p.g = 0.1;
    const Operator full = build_hs(p, true);
    const Operator std_om = build_hs(p, false);
    CHECK((std_om.mat() - (build_h0(p) + build_v_om(p)).mat()).norm() < 1e-15);
    CHECK((full.mat() - (std_om + build_v_dce(p)).mat()).norm() < 1e-15);
    CHECK(full.hermiticity_defect() < 1e-15);
    CHECK(build_v_om(p).hermiticity_defect() < 1e-15);
}

TEST_CASE("photon number and parity conservation") {
    SystemParams p = params_with(0.1);
    p.omega_c = 1.3;
    const Operator n = photon_number(p.dims);
    CHECK(commutator(build_hs(p, false), n).mat().cwiseAbs().maxCoeff() < 1e-12);
    CHECK(commutator(build_hs(p, true), n).mat().cwiseAbs().maxCoeff() > 1e-3);
    const Operator parity = photon_parity(p.dims);
    CHECK(commutator(build_hs(p, true), parity).mat().cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("drive values") {
    DriveSpec off;
    CHECK(drive_value(3.7, off) == 0.0);

    const double gamma = 3e-2;
    DriveSpec cw;
    cw.variant = ContinuousWave{2 * gamma, 1.0};
    CHECK(drive_value(0.0, cw) == doctest::Approx(2 * gamma));
    CHECK(drive_value(std::numbers::pi, cw) == doctest::Approx(-2 * gamma));

    const double sigma = 12.0;
    const double area = std::numbers::pi / 3;
    DriveSpec pulse;
    pulse.variant = GaussianPulse{area, 6 * sigma, sigma, 1.0};
    const double peak = area / (sigma * std::sqrt(2 * std::numbers::pi));
    CHECK(drive_value(6 * sigma, pulse) == doctest::Approx(peak * std::cos(6 * sigma)));
    for (double t : {0.0, 12 * sigma}) {
        CHECK(std::abs(drive_value(t, pulse)) < area * 6.1e-9 / sigma);
    }

    // unit area of the envelope: integrate with omega_d = 0
    DriveSpec envelope;
    envelope.variant = GaussianPulse{1.0, 0.0, 0.7, 0.0};
    double sum = 0.0;
    const double h = 1e-3;
    for (double t = -10.0; t <= 10.0; t += h) {
        sum += drive_value(t, envelope) * h;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("drive operators") {
    const SpaceDims dims(2, 2);
    DriveSpec mirror;
    const Operator x = drive_operator(mirror, dims);
    CHECK(x.hermiticity_defect() == 0.0);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const bool coupled = dims.photon_of(i) == dims.photon_of(j) && dims.phonon_of(i) != dims.phonon_of(j);
            CHECK(std::abs(x(i, j) - Complex(coupled ? 1.0 : 0.0)) == 0.0);
        }
    }
    DriveSpec cav;
    cav.target = DriveTarget::cavity;
    const Operator y = drive_operator(cav, dims);
    CHECK(std::abs(y.element(0, 1, 1, 1) - Complex(1.0)) == 0.0);
    CHECK(std::abs(y.element(0, 0, 0, 1)) == 0.0);
}

TEST_CASE("parameter validation") {
    SystemParams p;
    p.kappa = -1e-3;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p.kappa = 0.0;
    p.omega_m = 0.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p.omega_m = 1.0;
    CHECK_NOTHROW(p.validate());
    CHECK(params_with(0.25).beta() == 0.25);

    DriveSpec d;
    d.variant = GaussianPulse{1.0, 0.0, 0.0, 1.0};
    CHECK_THROWS_AS(d.validate(), DomainError);
}
