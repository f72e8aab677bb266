#include "dce/system_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dce/error.hpp"

namespace dce {

void SystemParams::validate() const {
    if (!(omega_m > 0.0)) {
        throw DomainError("omega_m must be > 0, got " + std::to_string(omega_m));
    }
    if (!(omega_c > 0.0)) {
        throw DomainError("omega_c must be > 0, got " + std::to_string(omega_c));
    }
    if (!(g >= 0.0)) {
        throw DomainError("g must be >= 0, got " + std::to_string(g));
    }
    if (!(kappa >= 0.0)) {
        throw DomainError("kappa must be >= 0, got " + std::to_string(kappa));
    }
    if (!(gamma >= 0.0)) {
        throw DomainError("gamma must be >= 0, got " + std::to_string(gamma));
    }
    if (dims.n_c < 2 || dims.n_m < 2) {
        throw DimensionError("truncation dimensions must be >= 2");
    }
}

void DriveSpec::validate() const {
    if (const auto* cw = std::get_if<ContinuousWave>(&variant)) {
        if (!(cw->omega_d >= 0.0)) {
            throw DomainError("drive omega_d must be >= 0");
        }
    } else if (const auto* p = std::get_if<GaussianPulse>(&variant)) {
        if (!(p->sigma > 0.0)) {
            throw DomainError("pulse sigma must be > 0");
        }
        if (!(p->omega_d >= 0.0)) {
            throw DomainError("drive omega_d must be >= 0");
        }
    }
}

Operator build_h0(const SystemParams& params) {
    const SpaceDims d = params.dims;
    Operator h(d);
    for (int n = 0; n < d.n_c; ++n) {
        for (int k = 0; k < d.n_m; ++k) {
            const int i = d.index(n, k);
            h.mat()(i, i) = params.omega_c * n + params.omega_m * k;
        }
    }
    return h;
}

Operator build_v_om(const SystemParams& params) {
    const SpaceDims d = params.dims;
    const ModeMatrix b = annihilation(d.n_m);
    return tensor(number_matrix(d.n_c), b + b.adjoint(), d) * Complex(params.g);
}

Operator build_v_dce(const SystemParams& params) {
    const SpaceDims d = params.dims;
    const ModeMatrix a = annihilation(d.n_c);
    const ModeMatrix b = annihilation(d.n_m);
    const ModeMatrix a2 = a * a;
    return tensor(a2 + a2.adjoint(), b + b.adjoint(), d) * Complex(0.5 * params.g);
}

Operator build_hs(const SystemParams& params, bool include_dce) {
    Operator h = build_h0(params) + build_v_om(params);
    if (include_dce) {
        h += build_v_dce(params);
    }
    return h;
}

double drive_value(double t, const DriveSpec& spec) {
    struct Visitor {
        double t;
        double operator()(const DriveOff&) const { return 0.0; }
        double operator()(const ContinuousWave& cw) const { return cw.amplitude * std::cos(cw.omega_d * t); }
        double operator()(const GaussianPulse& p) const {
            const double tau = (t - p.t0) / p.sigma;
            const double envelope = std::exp(-0.5 * tau * tau) / (p.sigma * std::sqrt(2.0 * std::numbers::pi));
            return p.area * envelope * std::cos(p.omega_d * t);
        }
    };
    return std::visit(Visitor{t}, spec.variant);
}

Operator drive_operator(const DriveSpec& spec, SpaceDims dims) {
    if (spec.target == DriveTarget::mirror) {
        const ModeMatrix b = annihilation(dims.n_m);
        return tensor(mode_identity(dims.n_c), b + b.adjoint(), dims);
    }
    const ModeMatrix a = annihilation(dims.n_c);
    return tensor(a + a.adjoint(), mode_identity(dims.n_m), dims);
}

}  // namespace dce
