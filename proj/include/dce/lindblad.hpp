#pragma once

#include <functional>
#include <limits>

#include <Eigen/Dense>

#include "dce/fock_algebra.hpp"
#include "dce/spectrum.hpp"
#include "dce/system_model.hpp"

namespace dce {

struct IntegrityReport {
    double trace_error = 0.0;  // |tr rho - 1|
    double hermiticity = 0.0;  // max |rho - rho^dagger| elementwise
    double min_eigenvalue = std::numeric_limits<double>::quiet_NaN();  // only when requested
};

struct DensityMatrix {
    SpaceDims dims;
    Eigen::MatrixXcd rho;

    static DensityMatrix pure(SpaceDims dims, const StateVector& psi);
    static DensityMatrix basis(SpaceDims dims, int n, int k);

    Complex trace() const { return rho.trace(); }
    IntegrityReport integrity(bool with_spectrum = false) const;
};

// Dressed lowering operators built from the eigenbasis of H_s, returned in
// the bare basis. They only contain energy-lowering transitions.
struct DressedOperators {
    Operator A;  // photon
    Operator B;  // phonon
};

// O = sum_{E_n - E_m > deg_tol} <psi_m|(o + o^dagger)|psi_n> |psi_m><psi_n|.
Operator dressed_lowering(const Operator& bare, const EigenSystem& eigsys, double deg_tol = 1e-9);
DressedOperators build_dressed(const EigenSystem& eigsys, double deg_tol = 1e-9);

// D[O] rho = O rho O^dagger - (O^dagger O rho + rho O^dagger O) / 2.
Eigen::MatrixXcd dissipator(const Eigen::MatrixXcd& o, const Eigen::MatrixXcd& rho);

// Direct evaluation of i[rho, H_s + F(t) X] + kappa D[A] rho + gamma D[B] rho.
Eigen::MatrixXcd lindblad_rhs(const DensityMatrix& rho, double t, const Operator& h_s, const DriveSpec& drive,
                              const DressedOperators& dressed, const SystemParams& params);

// Immutable evolution context: H_s, its eigensystem, dressed operators and
// the drive. Shareable across threads and observers once built.
class EvolutionContext {
public:
    EvolutionContext(const SystemParams& params, const DriveSpec& drive, bool include_dce = true);

    const SystemParams& params() const noexcept { return params_; }
    const DriveSpec& drive() const noexcept { return drive_; }
    const Operator& hamiltonian() const noexcept { return h_s_; }
    const EigenSystem& eigensystem() const noexcept { return eigsys_; }
    const DressedOperators& dressed() const noexcept { return dressed_; }
    const Operator& drive_quadrature() const noexcept { return drive_op_; }

    // out = d rho / dt at time t. out must not alias rho.
    void rhs(const Eigen::MatrixXcd& rho, double t, Eigen::MatrixXcd& out) const;

private:
    SystemParams params_;
    DriveSpec drive_;
    Operator h_s_;
    EigenSystem eigsys_;
    DressedOperators dressed_;
    Operator drive_op_;
    // H_s - (i/2)(kappa A^dagger A + gamma B^dagger B)
    Eigen::MatrixXcd h_eff_;
    Eigen::MatrixXcd jump_a_;  // sqrt(kappa) A
    Eigen::MatrixXcd jump_b_;  // sqrt(gamma) B
};

struct EvolveOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    double initial_step = 0.0;  // 0 picks a default
    double max_step = std::numeric_limits<double>::infinity();
    // Samples are checked for trace and Hermiticity drift against this bound.
    double integrity_tol = 1e-6;
    // Every n-th sample also gets its spectrum checked for positivity.
    int positivity_every = 50;
};

struct EvolveStats {
    long accepted_steps = 0;
    long rejected_steps = 0;
    long rhs_evaluations = 0;
    int samples = 0;
    int positivity_checks = 0;
    double max_trace_error = 0.0;
    double max_hermiticity = 0.0;
    double min_eigenvalue = std::numeric_limits<double>::infinity();
};

// Called at every sample time with the re-Hermitized state.
using SampleObserver = std::function<void(double t, const DensityMatrix& rho)>;

// Dormand-Prince 5(4) with per-element error control
// |err| <= atol + rtol |rho_ij| and 4th-order dense output. Samples land at
// t_start + i * sample_dt up to t_end inclusive. Returns the state at t_end.
DensityMatrix evolve(const DensityMatrix& rho0, double t_start, double t_end, double sample_dt,
                     const EvolutionContext& ctx, const SampleObserver& observer, const EvolveOptions& options = {},
                     EvolveStats* stats = nullptr);

// Column-stacked Liouvillian matrix of the time-independent generator.
Eigen::MatrixXcd liouvillian_matrix(const Operator& h_total, const DressedOperators& dressed,
                                    const SystemParams& params);

// exp(L t) applied to vec(rho0). Refuses joint dimensions above 120.
DensityMatrix propagate_exact(const DensityMatrix& rho0, double t, const Operator& h_total,
                              const DressedOperators& dressed, const SystemParams& params);

// Sudden cavity retuning: the state is carried over unchanged and a new
// context is built for params_new. Only omega_c may differ.
EvolutionContext retune_cavity(const DensityMatrix& state, const SystemParams& params_old,
                               const SystemParams& params_new, const DriveSpec& drive, bool include_dce = true);

}  // namespace dce
