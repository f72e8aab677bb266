#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dce/fock_algebra.hpp"
#include "dce/system_model.hpp"

namespace dce {

struct EigenSystem {
    SpaceDims dims;
    Eigen::VectorXd energies;  // ascending
    Eigen::MatrixXcd states;   // column j is |psi_j> in the bare basis

    int size() const noexcept { return static_cast<int>(energies.size()); }
    StateVector state(int j) const { return states.col(j); }
};

// Hermitian eigendecomposition. Ties in energy are ordered by the
// lexicographic dominant bare label, and every eigenvector is phased so that
// its largest component is real and positive.
EigenSystem diagonalize(const Operator& h);

// Dominant bare component of an eigenvector. A level with top weight <= 0.5
// is reported as hybridized together with its second component.
struct LevelLabel {
    int n = 0;
    int k = 0;
    double weight = 0.0;
    bool hybridized = false;
    int n2 = 0;
    int k2 = 0;
    double weight2 = 0.0;

    // "0:3" or "hyb(0:3|2:0)"; never contains a comma.
    std::string str() const;
};

LevelLabel label_state(const StateVector& psi, SpaceDims dims);

struct LevelScan {
    std::vector<double> omega_c_grid;
    Eigen::MatrixXd levels;  // grid point x level
    std::vector<std::vector<LevelLabel>> labels;
};

// Lowest n_levels eigenvalues of H_s at every omega_c of the grid. Grid
// points are evaluated on up to `jobs` threads; assembly is by index.
LevelScan level_scan(const SystemParams& params_template, const std::vector<double>& omega_c_grid, int n_levels,
                     bool include_dce, int jobs = 1);

struct SplittingResult {
    double omega_c_star = 0.0;
    double gap = 0.0;
    int level_lo = 0;
    int level_hi = 0;
};

// E_hi - E_lo of the full H_s at the given cavity frequency.
double level_gap(const SystemParams& params_template, double omega_c, int level_lo, int level_hi);

// Golden-section minimization of the adjacent-level gap over omega_c inside
// `bracket`, to |d omega_c| < tol. Throws BracketError when the minimum sits
// on the bracket boundary.
SplittingResult min_splitting(const SystemParams& params_template, int level_lo, int level_hi,
                              std::pair<double, double> bracket, double tol = 1e-10);

// The two eigenstates of H_s, at omega_c, with the largest combined weight
// on |0,k> and the displaced |2,(k-q)_2>. Returned as (lower, upper) index.
std::pair<int, int> resonance_levels(const SystemParams& params_template, double omega_c, int k, int q);

// Anticrossing |0,k> <-> |2,(k-q)_2>: identifies the level pair at the
// first-order resonance and minimizes its gap inside the even photon-parity
// block, where no uncoupled level can cross it. level_lo and level_hi are
// full-spectrum indices at omega_c_star.
SplittingResult locate_resonance(const SystemParams& params_template, int k, int q, double half_width = 0.0);

// Relative change of the lowest `n_levels` eigenvalues of H_s when the
// truncation grows from (n_c, n_m) to (n_c + 2, n_m + 4).
struct TruncationReport {
    SpaceDims base;
    SpaceDims enlarged;
    int n_levels = 0;
    double max_relative_change = 0.0;
    bool converged = false;
};

TruncationReport truncation_check(const SystemParams& params, int n_levels, double threshold = 1e-6);

}  // namespace dce
