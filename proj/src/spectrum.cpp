#include "dce/spectrum.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dce/analytic_dce.hpp"
#include "dce/error.hpp"

namespace dce {

namespace {

int dominant_index(const Eigen::VectorXcd& v) {
    Eigen::Index idx = 0;
    v.cwiseAbs2().maxCoeff(&idx);
    return static_cast<int>(idx);
}

}  // namespace

EigenSystem diagonalize(const Operator& h) {
    const double scale = h.mat().norm();
    const double defect = h.hermiticity_defect();
    if (defect > 1e-10 * std::max(scale, 1e-300)) {
        std::ostringstream os;
        os << "diagonalize: operator is not Hermitian (||H - H^dagger|| = " << defect << ", ||H|| = " << scale << ")";
        throw DomainError(os.str());
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.mat(), Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("diagonalize: Hermitian eigensolver did not converge");
    }

    const int dim = static_cast<int>(h.mat().rows());
    const Eigen::VectorXd& raw_energies = solver.eigenvalues();
    const Eigen::MatrixXcd& raw_states = solver.eigenvectors();

    std::vector<int> dominant(dim);
    for (int j = 0; j < dim; ++j) {
        dominant[j] = dominant_index(raw_states.col(j));
    }

    // Eigen already returns ascending eigenvalues; only exact ties need the
    // label tie-break.
    std::vector<int> order(dim);
    std::iota(order.begin(), order.end(), 0);
    const double tie_tol = 1e-12 * std::max(1.0, raw_energies.cwiseAbs().maxCoeff());
    for (int start = 0; start < dim;) {
        int stop = start + 1;
        while (stop < dim && raw_energies(stop) - raw_energies(stop - 1) <= tie_tol) {
            ++stop;
        }
        if (stop - start > 1) {
            std::stable_sort(order.begin() + start, order.begin() + stop,
                             [&](int a, int b) { return dominant[a] < dominant[b]; });
        }
        start = stop;
    }

    EigenSystem es;
    es.dims = h.dims();
    es.energies.resize(dim);
    es.states.resize(dim, dim);
    for (int j = 0; j < dim; ++j) {
        const int src = order[j];
        es.energies(j) = raw_energies(src);
        Eigen::VectorXcd v = raw_states.col(src);
        const Complex pivot = v(dominant[src]);
        v *= std::abs(pivot) / pivot;
        es.states.col(j) = v;
    }
    return es;
}

std::string LevelLabel::str() const {
    std::ostringstream os;
    if (!hybridized) {
        os << n << ':' << k;
    } else {
        os << "hyb(" << n << ':' << k << '|' << n2 << ':' << k2 << ')';
    }
    return os.str();
}

LevelLabel label_state(const StateVector& psi, SpaceDims dims) {
    const Eigen::VectorXd w = psi.cwiseAbs2();
    int first = 0;
    int second = -1;
    for (int i = 1; i < w.size(); ++i) {
        if (w(i) > w(first)) {
            second = first;
            first = i;
        } else if (second < 0 || w(i) > w(second)) {
            second = i;
        }
    }
    LevelLabel label;
    label.n = dims.photon_of(first);
    label.k = dims.phonon_of(first);
    label.weight = w(first);
    label.hybridized = w(first) <= 0.5;
    if (second >= 0) {
        label.n2 = dims.photon_of(second);
        label.k2 = dims.phonon_of(second);
        label.weight2 = w(second);
    }
    return label;
}

LevelScan level_scan(const SystemParams& params_template, const std::vector<double>& omega_c_grid, int n_levels,
                     bool include_dce, int jobs) {
    const SpaceDims dims = params_template.dims;
    if (n_levels < 1 || n_levels > dims.joint()) {
        throw DomainError("level_scan: n_levels must lie in [1, joint dimension]");
    }
    if (!std::is_sorted(omega_c_grid.begin(), omega_c_grid.end())) {
        throw DomainError("level_scan: omega_c grid must be ascending");
    }
    const int points = static_cast<int>(omega_c_grid.size());
    LevelScan scan;
    scan.omega_c_grid = omega_c_grid;
    scan.levels.resize(points, n_levels);
    scan.labels.assign(points, std::vector<LevelLabel>(n_levels));

    auto evaluate = [&](int i) {
        SystemParams p = params_template;
        p.omega_c = omega_c_grid[i];
        const EigenSystem es = diagonalize(build_hs(p, include_dce));
        for (int j = 0; j < n_levels; ++j) {
            scan.levels(i, j) = es.energies(j);
            scan.labels[i][j] = label_state(es.states.col(j), dims);
        }
    };

    const int workers = std::clamp(jobs, 1, std::max(points, 1));
    if (workers == 1) {
        for (int i = 0; i < points; ++i) {
            evaluate(i);
        }
        return scan;
    }
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next++; i < points; i = next++) {
                evaluate(i);
            }
        });
    }
    pool.clear();
    return scan;
}

double level_gap(const SystemParams& params_template, double omega_c, int level_lo, int level_hi) {
    SystemParams p = params_template;
    p.omega_c = omega_c;
    const Operator h = build_hs(p, true);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.mat(), Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& e = solver.eigenvalues();
    return e(level_hi) - e(level_lo);
}

namespace {

// Golden-section minimum of gap(w) strictly inside the bracket; returns (w, gap).
template <typename Gap>
std::pair<double, double> golden_minimum(const Gap& gap, std::pair<double, double> bracket, double tol,
                                         const std::string& what) {
    auto [a, b] = bracket;
    if (!(a < b)) {
        throw BracketError("min_splitting: bracket must satisfy lo < hi");
    }
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    const double gap_a = gap(a);
    const double gap_b = gap(b);
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = gap(x1);
    double f2 = gap(x2);
    if (std::min(f1, f2) >= std::min(gap_a, gap_b)) {
        std::ostringstream os;
        os << "min_splitting: no interior minimum of " << what << " in [" << bracket.first << ", " << bracket.second
           << "]";
        throw BracketError(os.str());
    }
    while (b - a > tol) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = gap(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = gap(x2);
        }
    }
    const double x = 0.5 * (a + b);
    const double edge_tol = 4.0 * tol;
    if (x - bracket.first < edge_tol || bracket.second - x < edge_tol) {
        throw BracketError("min_splitting: minimum of " + what + " lies on the bracket boundary");
    }
    return {x, gap(x)};
}

std::string gap_name(int lo, int hi) {
    return "E_" + std::to_string(hi) + " - E_" + std::to_string(lo);
}

// Basis indices with an even photon number. V_om and V_DCE both conserve
// photon parity, so H_s is block diagonal in this split.
std::vector<int> even_photon_indices(SpaceDims dims) {
    std::vector<int> idx;
    for (int i = 0; i < dims.joint(); ++i) {
        if (dims.photon_of(i) % 2 == 0) {
            idx.push_back(i);
        }
    }
    return idx;
}

Eigen::MatrixXcd even_block(const SystemParams& p, const std::vector<int>& idx) {
    const Operator h = build_hs(p, true);
    const int m = static_cast<int>(idx.size());
    Eigen::MatrixXcd sub(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            sub(i, j) = h(idx[i], idx[j]);
        }
    }
    return sub;
}

}  // namespace

SplittingResult min_splitting(const SystemParams& params_template, int level_lo, int level_hi,
                              std::pair<double, double> bracket, double tol) {
    const int dim = params_template.dims.joint();
    if (level_lo < 0 || level_hi >= dim || level_lo >= level_hi) {
        throw DomainError("min_splitting: need 0 <= level_lo < level_hi < joint dimension");
    }
    auto gap = [&](double w) { return level_gap(params_template, w, level_lo, level_hi); };
    const auto [x, g] = golden_minimum(gap, bracket, tol, gap_name(level_lo, level_hi));
    return SplittingResult{x, g, level_lo, level_hi};
}

std::pair<int, int> resonance_levels(const SystemParams& params_template, double omega_c, int k, int q) {
    if (q < 1 || k < q) {
        throw DomainError("resonance requires k >= q >= 1");
    }
    SystemParams p = params_template;
    p.omega_c = omega_c;
    const EigenSystem es = diagonalize(build_hs(p, true));
    const SpaceDims d = p.dims;
    const StateVector zero_photon = basis_state(d, 0, k);
    const StateVector pair = displaced_fock_state(2, k - q, p);
    std::vector<std::pair<double, int>> weights;
    weights.reserve(es.size());
    for (int j = 0; j < es.size(); ++j) {
        const double w = std::norm(zero_photon.dot(es.states.col(j))) + std::norm(pair.dot(es.states.col(j)));
        weights.emplace_back(w, j);
    }
    std::partial_sort(weights.begin(), weights.begin() + 2, weights.end(),
                      [](const auto& x, const auto& y) { return x.first > y.first || (x.first == y.first && x.second < y.second); });
    const int lo = std::min(weights[0].second, weights[1].second);
    const int hi = std::max(weights[0].second, weights[1].second);
    return {lo, hi};
}

SplittingResult locate_resonance(const SystemParams& params_template, int k, int q, double half_width) {
    const double guess = first_order_resonance(q, params_template);
    const auto [lo_full, hi_full] = resonance_levels(params_template, guess, k, q);
    const double width = half_width > 0.0 ? half_width : 0.05 * params_template.omega_m;

    // The search runs inside the even photon-parity block: odd-parity levels
    // (|1,k-1> at integer omega_c, for instance) cross the anticrossing
    // without coupling to it and would otherwise reshuffle the level indices.
    const std::vector<int> idx = even_photon_indices(params_template.dims);
    SystemParams p = params_template;
    p.omega_c = guess;
    const Eigen::VectorXd e_full = diagonalize(build_hs(p, true)).energies;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> at_guess(even_block(p, idx), Eigen::EigenvaluesOnly);
    auto sector_index = [&](int full) {
        const Eigen::VectorXd& e = at_guess.eigenvalues();
        int best = 0;
        for (int j = 1; j < e.size(); ++j) {
            if (std::abs(e(j) - e_full(full)) < std::abs(e(best) - e_full(full))) {
                best = j;
            }
        }
        return best;
    };
    const int lo = sector_index(lo_full);
    const int hi = sector_index(hi_full);
    if (lo >= hi) {
        throw DomainError("locate_resonance: resonance levels do not separate in the even photon-parity block");
    }

    auto gap = [&](double w) {
        SystemParams pw = params_template;
        pw.omega_c = w;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(even_block(pw, idx), Eigen::EigenvaluesOnly);
        return solver.eigenvalues()(hi) - solver.eigenvalues()(lo);
    };
    const auto [x, g] = golden_minimum(gap, {guess - width, guess + width}, 1e-10 * params_template.omega_m,
                                       "the even-parity gap " + gap_name(lo, hi));

    // Report full-spectrum indices at the minimum.
    p.omega_c = x;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> sector(even_block(p, idx), Eigen::EigenvaluesOnly);
    const Eigen::VectorXd e_star = diagonalize(build_hs(p, true)).energies;
    auto full_index = [&](double e) {
        int best = 0;
        for (int j = 1; j < e_star.size(); ++j) {
            if (std::abs(e_star(j) - e) < std::abs(e_star(best) - e)) {
                best = j;
            }
        }
        return best;
    };
    return SplittingResult{x, g, full_index(sector.eigenvalues()(lo)), full_index(sector.eigenvalues()(hi))};
}

TruncationReport truncation_check(const SystemParams& params, int n_levels, double threshold) {
    TruncationReport report;
    report.base = params.dims;
    report.enlarged = SpaceDims(params.dims.n_c + 2, params.dims.n_m + 4);
    report.n_levels = std::min(n_levels, params.dims.joint());

    auto energies = [](const SystemParams& p) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(build_hs(p, true).mat(), Eigen::EigenvaluesOnly);
        return Eigen::VectorXd(solver.eigenvalues());
    };
    SystemParams big = params;
    big.dims = report.enlarged;
    const Eigen::VectorXd e0 = energies(params);
    const Eigen::VectorXd e1 = energies(big);
    double worst = 0.0;
    for (int j = 0; j < report.n_levels; ++j) {
        const double denom = std::max(std::abs(e0(j)), params.omega_m);
        worst = std::max(worst, std::abs(e1(j) - e0(j)) / denom);
    }
    report.max_relative_change = worst;
    report.converged = worst < threshold;
    return report;
}

}  // namespace dce
