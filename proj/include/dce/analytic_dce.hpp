#pragma once

#include "dce/fock_algebra.hpp"
#include "dce/system_model.hpp"

namespace dce {

// Closed-form results for the standard optomechanics Hamiltonian and the
// first-order pair-creation couplings. Used as oracles by the numerical
// modules and by the fig7/fig8 scenarios.

// Associated Laguerre polynomial L_k^m(x) by upward three-term recurrence.
double assoc_laguerre(int k, int m, double x);

// <k_to| exp(alpha (b^dagger - b)) |k_from> for real alpha.
double displacement_element(int k_to, int k_from, double alpha);

// Eigenstate |n> (x) D(-n beta)|k> of H_0 + V_om, normalized on the truncated
// space. With V_om = +g a^dag a (b + b^dag) the mirror is pushed towards
// negative displacement; amplitudes are (-1)^(j-k) D_{j,k}(n beta).
StateVector displaced_fock_state(int n, int k, const SystemParams& params);

// E_{n,k} = omega_c n - g^2 n^2 / omega_m + omega_m k.
double standard_energy(int n, int k, const SystemParams& params);

// Cavity frequency where E_{0,k} = E_{2,k-q}: q omega_m / 2 + 2 g^2 / omega_m.
double first_order_resonance(int q, const SystemParams& params);

struct SplittingQuery {
    int k = 1;  // initial phonon number
    int q = 1;  // phonons converted into the photon pair
    SystemParams params;
};

// First-order half-splitting |Omega_{0,k}^{2,k-q}| = |<0,k|V_DCE|2,(k-q)_2>|.
// Requires k >= q >= 1.
double casimir_rabi_splitting(const SplittingQuery& query);

}  // namespace dce
