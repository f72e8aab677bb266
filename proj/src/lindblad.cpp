#include "dce/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "dce/error.hpp"

namespace dce {

DensityMatrix DensityMatrix::pure(SpaceDims dims, const StateVector& psi) {
    if (psi.size() != dims.joint()) {
        throw DimensionError("state vector size does not match joint dimension");
    }
    const StateVector v = psi / psi.norm();
    return DensityMatrix{dims, v * v.adjoint()};
}

DensityMatrix DensityMatrix::basis(SpaceDims dims, int n, int k) { return pure(dims, basis_state(dims, n, k)); }

IntegrityReport DensityMatrix::integrity(bool with_spectrum) const {
    IntegrityReport r;
    r.trace_error = std::abs(rho.trace() - Complex(1.0));
    r.hermiticity = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (with_spectrum) {
        const Eigen::MatrixXcd h = 0.5 * (rho + rho.adjoint());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
        r.min_eigenvalue = solver.eigenvalues().minCoeff();
    }
    return r;
}

Operator dressed_lowering(const Operator& bare, const EigenSystem& eigsys, double deg_tol) {
    if (!(bare.dims() == eigsys.dims)) {
        throw DimensionError("dressed_lowering: operator and eigensystem dimensions differ");
    }
    const Eigen::MatrixXcd& u = eigsys.states;
    const Eigen::MatrixXcd quadrature = bare.mat() + bare.mat().adjoint();
    Eigen::MatrixXcd in_eig = u.adjoint() * quadrature * u;
    const int dim = eigsys.size();
    for (int n = 0; n < dim; ++n) {
        for (int m = 0; m < dim; ++m) {
            if (!(eigsys.energies(n) - eigsys.energies(m) > deg_tol)) {
                in_eig(m, n) = 0.0;
            }
        }
    }
    return Operator(bare.dims(), u * in_eig * u.adjoint());
}

DressedOperators build_dressed(const EigenSystem& eigsys, double deg_tol) {
    return DressedOperators{dressed_lowering(cavity_lowering(eigsys.dims), eigsys, deg_tol),
                            dressed_lowering(mechanics_lowering(eigsys.dims), eigsys, deg_tol)};
}

Eigen::MatrixXcd dissipator(const Eigen::MatrixXcd& o, const Eigen::MatrixXcd& rho) {
    const Eigen::MatrixXcd od_o = o.adjoint() * o;
    return o * rho * o.adjoint() - 0.5 * (od_o * rho + rho * od_o);
}

Eigen::MatrixXcd lindblad_rhs(const DensityMatrix& rho, double t, const Operator& h_s, const DriveSpec& drive,
                              const DressedOperators& dressed, const SystemParams& params) {
    if (!(rho.dims == h_s.dims()) || !(rho.dims == dressed.A.dims()) || !(rho.dims == dressed.B.dims())) {
        throw DimensionError("lindblad_rhs: dimension mismatch between state and operators");
    }
    const Eigen::MatrixXcd h = h_s.mat() + drive_value(t, drive) * drive_operator(drive, rho.dims).mat();
    const Complex i(0.0, 1.0);
    Eigen::MatrixXcd out = i * (rho.rho * h - h * rho.rho);
    out += params.kappa * dissipator(dressed.A.mat(), rho.rho);
    out += params.gamma * dissipator(dressed.B.mat(), rho.rho);
    return out;
}

EvolutionContext::EvolutionContext(const SystemParams& params, const DriveSpec& drive, bool include_dce)
    : params_(params), drive_(drive) {
    params_.validate();
    drive_.validate();
    h_s_ = build_hs(params_, include_dce);
    eigsys_ = diagonalize(h_s_);
    dressed_ = build_dressed(eigsys_);
    drive_op_ = drive_operator(drive_, params_.dims);

    const Eigen::MatrixXcd& a = dressed_.A.mat();
    const Eigen::MatrixXcd& b = dressed_.B.mat();
    const Eigen::MatrixXcd decay = params_.kappa * (a.adjoint() * a) + params_.gamma * (b.adjoint() * b);
    h_eff_ = h_s_.mat() - Complex(0.0, 0.5) * decay;
    jump_a_ = std::sqrt(params_.kappa) * a;
    jump_b_ = std::sqrt(params_.gamma) * b;
}

void EvolutionContext::rhs(const Eigen::MatrixXcd& rho, double t, Eigen::MatrixXcd& out) const {
    // Only the Hermitian part of rho is propagated, so roundoff cannot seed an
    // anti-Hermitian component. With rho Hermitian:
    // -i(H_eff rho - rho H_eff^dagger) = -i(K - K^dagger), K = H_eff rho.
    const Eigen::MatrixXcd rho_h = 0.5 * (rho + rho.adjoint());
    Eigen::MatrixXcd k(rho.rows(), rho.cols());
    const double f = drive_value(t, drive_);
    if (f != 0.0) {
        k.noalias() = (h_eff_ + f * drive_op_.mat()) * rho_h;
    } else {
        k.noalias() = h_eff_ * rho_h;
    }
    out = Complex(0.0, -1.0) * (k - k.adjoint());
    if (params_.kappa > 0.0) {
        k.noalias() = jump_a_ * rho_h;
        out.noalias() += k * jump_a_.adjoint();
    }
    if (params_.gamma > 0.0) {
        k.noalias() = jump_b_ * rho_h;
        out.noalias() += k * jump_b_.adjoint();
    }
    k = 0.5 * (out + out.adjoint());
    out.swap(k);
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                 a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Continuous extension (Hairer, Norsett & Wanner).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

}  // namespace

DensityMatrix evolve(const DensityMatrix& rho0, double t_start, double t_end, double sample_dt,
                     const EvolutionContext& ctx, const SampleObserver& observer, const EvolveOptions& options,
                     EvolveStats* stats_out) {
    if (!(rho0.dims == ctx.params().dims)) {
        throw DimensionError("evolve: state and context dimensions differ");
    }
    if (!(sample_dt > 0.0)) {
        throw DomainError("evolve: sample_dt must be > 0");
    }
    if (!(t_end >= t_start)) {
        throw DomainError("evolve: t_end must be >= t_start");
    }

    EvolveStats stats;
    const int dim = rho0.dims.joint();
    const long n_samples = static_cast<long>(std::floor((t_end - t_start) / sample_dt + 1e-9)) + 1;

    auto emit = [&](long index, Eigen::MatrixXcd raw) {
        const double herm = (raw - raw.adjoint()).cwiseAbs().maxCoeff();
        DensityMatrix sample{rho0.dims, 0.5 * (raw + raw.adjoint())};
        const bool spectral = options.positivity_every > 0 &&
                              (index % options.positivity_every == 0 || index == n_samples - 1);
        IntegrityReport report = sample.integrity(spectral);
        stats.max_trace_error = std::max(stats.max_trace_error, report.trace_error);
        stats.max_hermiticity = std::max(stats.max_hermiticity, herm);
        const double ts = t_start + static_cast<double>(index) * sample_dt;
        if (spectral) {
            ++stats.positivity_checks;
            stats.min_eigenvalue = std::min(stats.min_eigenvalue, report.min_eigenvalue);
        }
        if (report.trace_error > options.integrity_tol || herm > options.integrity_tol ||
            (spectral && report.min_eigenvalue < -options.integrity_tol)) {
            std::ostringstream os;
            os << "evolve: density matrix integrity violated at t = " << ts << " (|tr-1| = " << report.trace_error
               << ", hermiticity = " << herm;
            if (spectral) {
                os << ", min eigenvalue = " << report.min_eigenvalue;
            }
            os << ")";
            throw IntegrityError(os.str());
        }
        ++stats.samples;
        if (observer) {
            observer(ts, sample);
        }
    };

    Eigen::MatrixXcd y = rho0.rho;
    emit(0, y);
    long next_sample = 1;

    double t = t_start;
    const double span = t_end - t_start;
    if (span <= 0.0) {
        if (stats_out) {
            *stats_out = stats;
        }
        return DensityMatrix{rho0.dims, 0.5 * (y + y.adjoint())};
    }

    Eigen::MatrixXcd k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), k5(dim, dim), k6(dim, dim),
        k7(dim, dim), stage(dim, dim), y_new(dim, dim), err(dim, dim);
    Eigen::MatrixXcd r2(dim, dim), r3(dim, dim), r4(dim, dim), r5(dim, dim);

    ctx.rhs(y, t, k1);
    ++stats.rhs_evaluations;

    double h = options.initial_step > 0.0 ? options.initial_step : std::min({0.05, 0.5 * sample_dt, span});
    h = std::min(h, options.max_step);
    const double h_min = 1e-12 * std::max(1.0, std::abs(t_end));
    bool last_rejected = false;

    while (t < t_end) {
        if (t + h > t_end) {
            h = t_end - t;
        }
        if (h < h_min) {
            std::ostringstream os;
            os << "evolve: step size underflow at t = " << t << " (h = " << h << "); problem is too stiff for "
               << "rtol = " << options.rtol << ", atol = " << options.atol;
            throw StiffnessError(os.str());
        }

        stage = y + h * a21 * k1;
        ctx.rhs(stage, t + c2 * h, k2);
        stage = y + h * (a31 * k1 + a32 * k2);
        ctx.rhs(stage, t + c3 * h, k3);
        stage = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        ctx.rhs(stage, t + c4 * h, k4);
        stage = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        ctx.rhs(stage, t + c5 * h, k5);
        stage = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        ctx.rhs(stage, t + h, k6);
        y_new = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        ctx.rhs(y_new, t + h, k7);
        stats.rhs_evaluations += 6;

        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double err_norm =
            (err.cwiseAbs().array() /
             (options.atol + options.rtol * y.cwiseAbs().cwiseMax(y_new.cwiseAbs()).array()))
                .maxCoeff();

        if (!std::isfinite(err_norm)) {
            ++stats.rejected_steps;
            h *= 0.1;
            last_rejected = true;
            continue;
        }

        if (err_norm <= 1.0) {
            const double t_new = t + h;
            if (next_sample < n_samples && t_start + static_cast<double>(next_sample) * sample_dt <= t_new + 1e-12) {
                r2 = y_new - y;
                r3 = h * k1 - r2;
                r4 = r2 - h * k7 - r3;
                r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
                while (next_sample < n_samples) {
                    const double ts = t_start + static_cast<double>(next_sample) * sample_dt;
                    if (ts > t_new + 1e-12) {
                        break;
                    }
                    const double theta = std::clamp((ts - t) / h, 0.0, 1.0);
                    const double theta1 = 1.0 - theta;
                    emit(next_sample, y + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5))));
                    ++next_sample;
                }
            }
            y.swap(y_new);
            k1.swap(k7);
            t = t_new;
            ++stats.accepted_steps;

            double factor = 0.9 * std::pow(std::max(err_norm, 1e-10), -0.2);
            factor = std::clamp(factor, 0.2, last_rejected ? 1.0 : 5.0);
            h = std::min(h * factor, options.max_step);
            last_rejected = false;
        } else {
            ++stats.rejected_steps;
            h *= std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
            last_rejected = true;
        }
    }

    while (next_sample < n_samples) {
        emit(next_sample, y);
        ++next_sample;
    }
    if (stats_out) {
        *stats_out = stats;
    }
    return DensityMatrix{rho0.dims, 0.5 * (y + y.adjoint())};
}

Eigen::MatrixXcd liouvillian_matrix(const Operator& h_total, const DressedOperators& dressed,
                                    const SystemParams& params) {
    const int dim = h_total.dims().joint();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);
    auto kron = [](const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
        Eigen::MatrixXcd out(x.rows() * y.rows(), x.cols() * y.cols());
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            for (Eigen::Index j = 0; j < x.cols(); ++j) {
                out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
            }
        }
        return out;
    };
    // vec(X rho Y) = (Y^T (x) X) vec(rho) for column stacking.
    const Eigen::MatrixXcd& h = h_total.mat();
    Eigen::MatrixXcd l = Complex(0.0, -1.0) * (kron(id, h) - kron(h.transpose(), id));
    auto add_channel = [&](const Eigen::MatrixXcd& o, double rate) {
        if (rate == 0.0) {
            return;
        }
        const Eigen::MatrixXcd od_o = o.adjoint() * o;
        l += rate * (kron(o.conjugate(), o) - 0.5 * kron(id, od_o) - 0.5 * kron(od_o.transpose(), id));
    };
    add_channel(dressed.A.mat(), params.kappa);
    add_channel(dressed.B.mat(), params.gamma);
    return l;
}

DensityMatrix propagate_exact(const DensityMatrix& rho0, double t, const Operator& h_total,
                              const DressedOperators& dressed, const SystemParams& params) {
    const int dim = rho0.dims.joint();
    if (dim > 120) {
        throw DimensionError("propagate_exact: joint dimension " + std::to_string(dim) +
                             " exceeds the 120 limit (Liouvillian would have " + std::to_string(dim * dim) +
                             " rows)");
    }
    if (!(h_total.dims() == rho0.dims)) {
        throw DimensionError("propagate_exact: state and generator dimensions differ");
    }
    if (t == 0.0) {
        return rho0;
    }
    const Eigen::MatrixXcd l = liouvillian_matrix(h_total, dressed, params);
    const Eigen::MatrixXcd propagator = (l * t).exp();
    const Eigen::VectorXcd v0 = Eigen::Map<const Eigen::VectorXcd>(rho0.rho.data(), dim * dim);
    const Eigen::VectorXcd v = propagator * v0;
    return DensityMatrix{rho0.dims, Eigen::Map<const Eigen::MatrixXcd>(v.data(), dim, dim)};
}

EvolutionContext retune_cavity(const DensityMatrix& state, const SystemParams& params_old,
                               const SystemParams& params_new, const DriveSpec& drive, bool include_dce) {
    SystemParams probe = params_new;
    probe.omega_c = params_old.omega_c;
    if (!(probe.dims == params_old.dims) || probe.omega_m != params_old.omega_m || probe.g != params_old.g ||
        probe.kappa != params_old.kappa || probe.gamma != params_old.gamma) {
        throw DomainError("retune_cavity: parameters may differ only in omega_c");
    }
    if (!(state.dims == params_new.dims)) {
        throw DimensionError("retune_cavity: state dimensions differ from parameters");
    }
    return EvolutionContext(params_new, drive, include_dce);
}

}  // namespace dce
