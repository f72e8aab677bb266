#pragma once

#include <variant>

#include "dce/fock_algebra.hpp"

namespace dce {

// Physical parameters. hbar = 1 and omega_m sets the unit of frequency;
// rates are angular and expressed in units of omega_m, times in 1/omega_m.
// omega_c is the (already renormalized) cavity frequency.
struct SystemParams {
    double omega_c = 1.5;
    double omega_m = 1.0;
    double g = 0.0;
    double kappa = 0.0;
    double gamma = 0.0;
    SpaceDims dims{6, 14};

    double beta() const noexcept { return g / omega_m; }

    // Throws DomainError for negative rates or non-positive frequencies.
    void validate() const;
};

struct DriveOff {};

struct ContinuousWave {
    double amplitude = 0.0;
    double omega_d = 1.0;
};

// amplitude * G(t - t0) * cos(omega_d t) with G a unit-area Gaussian of
// standard deviation sigma, so the amplitude is a pulse area.
struct GaussianPulse {
    double area = 0.0;
    double t0 = 0.0;
    double sigma = 1.0;
    double omega_d = 1.0;
};

enum class DriveTarget { mirror, cavity };

struct DriveSpec {
    std::variant<DriveOff, ContinuousWave, GaussianPulse> variant = DriveOff{};
    DriveTarget target = DriveTarget::mirror;

    bool is_off() const noexcept { return std::holds_alternative<DriveOff>(variant); }
    void validate() const;
};

Operator build_h0(const SystemParams& params);
Operator build_v_om(const SystemParams& params);
Operator build_v_dce(const SystemParams& params);
Operator build_hs(const SystemParams& params, bool include_dce = true);

double drive_value(double t, const DriveSpec& spec);

// Bare quadrature the drive couples to: I (x) (b + b^dagger) for the mirror,
// (a + a^dagger) (x) I for the cavity.
Operator drive_operator(const DriveSpec& spec, SpaceDims dims);

}  // namespace dce
