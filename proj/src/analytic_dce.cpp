#include "dce/analytic_dce.hpp"

#include <cmath>
#include <string>

#include "dce/error.hpp"

namespace dce {

double assoc_laguerre(int k, int m, double x) {
    if (k < 0) {
        throw DomainError("Laguerre degree must be >= 0, got " + std::to_string(k));
    }
    if (k == 0) {
        return 1.0;
    }
    double prev = 1.0;
    double curr = 1.0 + m - x;
    for (int j = 2; j <= k; ++j) {
        const double next = ((2.0 * j - 1.0 + m - x) * curr - (j - 1.0 + m) * prev) / j;
        prev = curr;
        curr = next;
    }
    return curr;
}

double displacement_element(int k_to, int k_from, double alpha) {
    if (k_to < 0 || k_from < 0) {
        throw DomainError("Fock indices must be >= 0");
    }
    if (k_to < k_from) {
        const double sign = ((k_from - k_to) % 2 == 0) ? 1.0 : -1.0;
        return sign * displacement_element(k_from, k_to, alpha);
    }
    // sqrt(k_from!/k_to!) alpha^(k_to - k_from) as a running product.
    double prefactor = 1.0;
    for (int j = k_from + 1; j <= k_to; ++j) {
        prefactor *= alpha / std::sqrt(static_cast<double>(j));
    }
    const double x = alpha * alpha;
    return prefactor * std::exp(-0.5 * x) * assoc_laguerre(k_from, k_to - k_from, x);
}

StateVector displaced_fock_state(int n, int k, const SystemParams& params) {
    const SpaceDims d = params.dims;
    if (n < 0 || n >= d.n_c || k < 0 || k >= d.n_m) {
        throw DimensionError("displaced Fock label |" + std::to_string(n) + "," + std::to_string(k) +
                             "> outside truncation");
    }
    const double alpha = -n * params.beta();
    StateVector v = StateVector::Zero(d.joint());
    for (int j = 0; j < d.n_m; ++j) {
        v(d.index(n, j)) = displacement_element(j, k, alpha);
    }
    return v / v.norm();
}

double standard_energy(int n, int k, const SystemParams& params) {
    return params.omega_c * n - params.g * params.g * n * n / params.omega_m + params.omega_m * k;
}

double first_order_resonance(int q, const SystemParams& params) {
    return 0.5 * q * params.omega_m + 2.0 * params.g * params.g / params.omega_m;
}

double casimir_rabi_splitting(const SplittingQuery& query) {
    const int k = query.k;
    const int q = query.q;
    if (q < 1 || k < q) {
        throw DomainError("splitting requires k >= q >= 1, got k=" + std::to_string(k) + ", q=" + std::to_string(q));
    }
    const double alpha = 2.0 * query.params.beta();
    const int final_k = k - q;
    const double bracket = std::sqrt(k + 1.0) * displacement_element(k + 1, final_k, alpha) +
                           std::sqrt(static_cast<double>(k)) * displacement_element(k - 1, final_k, alpha);
    return std::abs(0.5 * std::sqrt(2.0) * query.params.g * bracket);
}

}  // namespace dce
