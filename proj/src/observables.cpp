#include "dce/observables.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include <fftw3.h>

#include "dce/error.hpp"

namespace dce {

TimeSeries::TimeSeries(std::vector<std::string> channel_names)
    : names_(std::move(channel_names)), values_(names_.size()) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (names_[i] == names_[j]) {
                throw DomainError("TimeSeries: duplicate channel '" + names_[i] + "'");
            }
        }
    }
}

void TimeSeries::append(double t, const std::vector<double>& values) {
    if (values.size() != names_.size()) {
        throw DimensionError("TimeSeries::append: wrong number of channel values");
    }
    if (!t_.empty() && !(t > t_.back())) {
        throw DomainError("TimeSeries::append: time must be strictly increasing");
    }
    t_.push_back(t);
    for (std::size_t i = 0; i < values.size(); ++i) {
        values_[i].push_back(values[i]);
    }
}

const std::vector<double>& TimeSeries::channel(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) {
            return values_[i];
        }
    }
    throw DomainError("TimeSeries: no channel named '" + name + "'");
}

bool TimeSeries::has_channel(const std::string& name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

double TimeSeries::step() const {
    if (t_.size() < 2) {
        throw DomainError("TimeSeries::step: fewer than two samples");
    }
    const double dt = (t_.back() - t_.front()) / static_cast<double>(t_.size() - 1);
    for (std::size_t i = 1; i < t_.size(); ++i) {
        if (std::abs(t_[i] - t_[i - 1] - dt) > 1e-9 * std::max(1.0, dt)) {
            throw DomainError("TimeSeries::step: samples are not uniformly spaced");
        }
    }
    return dt;
}

Complex expectation(const DensityMatrix& rho, const Operator& op) {
    if (!(rho.dims == op.dims())) {
        throw DimensionError("expectation: state and operator dimensions differ");
    }
    // tr(rho O) without forming the product.
    return (rho.rho.transpose().cwiseProduct(op.mat())).sum();
}

std::optional<double> g2_equal_time(const DensityMatrix& rho, const Operator& a) {
    if (!(rho.dims == a.dims())) {
        throw DimensionError("g2_equal_time: state and operator dimensions differ");
    }
    const Eigen::MatrixXcd ad = a.mat().adjoint();
    const Eigen::MatrixXcd n_op = ad * a.mat();
    const double n = (rho.rho.transpose().cwiseProduct(n_op)).sum().real();
    if (!(n >= g2_photon_floor)) {
        return std::nullopt;
    }
    const Eigen::MatrixXcd aa = a.mat() * a.mat();
    const Eigen::MatrixXcd pair = aa.adjoint() * aa;
    const double num = (rho.rho.transpose().cwiseProduct(pair)).sum().real();
    return num / (n * n);
}

Eigen::MatrixXcd partial_transpose(const DensityMatrix& rho, Subsystem over) {
    const SpaceDims d = rho.dims;
    if (rho.rho.rows() != d.joint() || rho.rho.cols() != d.joint()) {
        throw DimensionError("partial_transpose: matrix does not match dims");
    }
    Eigen::MatrixXcd out(d.joint(), d.joint());
    for (int n = 0; n < d.n_c; ++n) {
        for (int k = 0; k < d.n_m; ++k) {
            for (int n2 = 0; n2 < d.n_c; ++n2) {
                for (int k2 = 0; k2 < d.n_m; ++k2) {
                    const int row = d.index(n, k);
                    const int col = d.index(n2, k2);
                    out(row, col) = over == Subsystem::cavity ? rho.rho(d.index(n2, k), d.index(n, k2))
                                                              : rho.rho(d.index(n, k2), d.index(n2, k));
                }
            }
        }
    }
    return out;
}

double negativity(const DensityMatrix& rho, Subsystem over) {
    Eigen::MatrixXcd pt = partial_transpose(rho, over);
    pt = 0.5 * (pt + pt.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(pt, Eigen::EigenvaluesOnly);
    double sum = 0.0;
    for (double lambda : solver.eigenvalues()) {
        sum += 0.5 * (std::abs(lambda) - lambda);
    }
    return sum;
}

namespace {

// Absolute scale below which two window means are treated as equal.
constexpr double steady_abs_floor = 1e-10;

bool means_agree(double a, double b) {
    return std::abs(a - b) < 0.01 * std::max({std::abs(a), std::abs(b), steady_abs_floor});
}

}  // namespace

SteadyState steady_state_average(const TimeSeries& series, const std::string& channel, int n_periods,
                                 double omega_d) {
    if (n_periods < 1 || !(omega_d > 0.0)) {
        throw DomainError("steady_state_average: need n_periods >= 1 and omega_d > 0");
    }
    const std::vector<double>& y = series.channel(channel);
    const double dt = series.step();
    const double span = n_periods * 2.0 * std::numbers::pi / omega_d;
    const auto window = static_cast<std::size_t>(std::llround(span / dt));
    if (window < 2) {
        throw DomainError("steady_state_average: averaging window shorter than two samples");
    }
    const std::size_t blocks = y.size() / window;
    if (blocks < 3) {
        std::ostringstream os;
        os << "steady_state_average: record holds " << blocks << " windows of " << n_periods
           << " drive periods, at least 3 are needed";
        throw ConvergenceError(os.str());
    }
    // Blocks are aligned to the end of the record so that the last one is
    // exactly the reported window.
    const std::size_t offset = y.size() - blocks * window;
    std::vector<double> means(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < window; ++i) {
            s += y[offset + b * window + i];
        }
        means[b] = s / static_cast<double>(window);
    }

    std::size_t settled = blocks;
    for (std::size_t b = 1; b < blocks; ++b) {
        bool rest_agree = true;
        for (std::size_t c = b; c < blocks; ++c) {
            if (!means_agree(means[c - 1], means[c])) {
                rest_agree = false;
                break;
            }
        }
        if (rest_agree) {
            settled = b - 1;
            break;
        }
    }
    if (settled == blocks || blocks - settled < 3) {
        std::ostringstream os;
        os << "steady_state_average: channel '" << channel << "' has not settled (last window means "
           << means[blocks - 2] << ", " << means[blocks - 1] << ")";
        throw ConvergenceError(os.str());
    }

    const std::size_t first = offset + (blocks - 1) * window;
    const auto [lo, hi] = std::minmax_element(y.begin() + static_cast<std::ptrdiff_t>(first), y.end());
    SteadyState out;
    out.mean = means[blocks - 1];
    out.peak_to_peak = *hi - *lo;
    out.window_start = series.t()[first];
    out.transient_end = series.t()[offset + settled * window];
    return out;
}

double photon_flux(double kappa_norm, double n_ss, double omega_m_lab_hz, FluxConvention convention) {
    if (kappa_norm < 0.0 || n_ss < 0.0 || omega_m_lab_hz < 0.0) {
        throw DomainError("photon_flux: inputs must be non-negative");
    }
    const double factor = convention == FluxConvention::cycles_per_second ? 1.0 : 2.0 * std::numbers::pi;
    return kappa_norm * omega_m_lab_hz * factor * n_ss;
}

namespace {

// FFTW planning is not thread safe.
std::mutex fftw_plan_mutex;

}  // namespace

Spectrum fourier_spectrum(const TimeSeries& series, const std::string& channel, double t_start, Window window) {
    const std::vector<double>& y = series.channel(channel);
    const double dt = series.step();
    const std::vector<double>& t = series.t();
    if (t_start < t.front() - 1e-9 * dt || t_start > t.back()) {
        throw DomainError("fourier_spectrum: t_start lies outside the record");
    }
    const auto first = static_cast<std::size_t>(
        std::lower_bound(t.begin(), t.end(), t_start - 1e-9 * dt) - t.begin());
    const std::size_t n = y.size() - first;
    if (n < 256) {
        std::ostringstream os;
        os << "fourier_spectrum: " << n << " samples after t_start, at least 256 are needed";
        throw DomainError(os.str());
    }

    std::vector<double> in(n);
    for (std::size_t i = 0; i < n; ++i) {
        double w = 1.0;
        if (window == Window::hann) {
            w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1)));
        }
        in[i] = w * y[first + i];
    }
    const std::size_t bins = n / 2 + 1;
    std::vector<fftw_complex> out(bins);
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_plan_mutex);
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), out.data(), FFTW_ESTIMATE);
    }
    if (plan == nullptr) {
        throw Error("fourier_spectrum: FFTW planning failed");
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(fftw_plan_mutex);
        fftw_destroy_plan(plan);
    }

    Spectrum s;
    s.omega.resize(bins);
    s.magnitude.resize(bins);
    const double length = static_cast<double>(n) * dt;
    for (std::size_t k = 0; k < bins; ++k) {
        // Interior bins stand for both +k and -k.
        const bool self_conjugate = k == 0 || (n % 2 == 0 && k == n / 2);
        const double weight = self_conjugate ? 1.0 : 2.0;
        const double abs = std::hypot(out[k][0], out[k][1]);
        s.omega[k] = 2.0 * std::numbers::pi * static_cast<double>(k) / length;
        s.magnitude[k] = abs * std::sqrt(weight / static_cast<double>(n));
    }
    return s;
}

Spectrum normalize_to_peak(const Spectrum& spectrum) {
    double top = 0.0;
    const std::vector<double>& m = spectrum.magnitude;
    for (std::size_t i = 1; i + 1 < m.size(); ++i) {
        if (m[i] > m[i - 1] && m[i] >= m[i + 1]) {
            top = std::max(top, m[i]);
        }
    }
    if (!(top > 0.0)) {
        throw DomainError("normalize_to_peak: spectrum has no peak away from omega = 0");
    }
    Spectrum out = spectrum;
    for (double& v : out.magnitude) {
        v /= top;
    }
    return out;
}

std::vector<Peak> find_peaks(const Spectrum& spectrum, double omega_max, double rel_threshold) {
    const std::vector<double>& m = spectrum.magnitude;
    const std::vector<double>& w = spectrum.omega;
    std::vector<Peak> candidates;
    double top = 0.0;
    for (std::size_t i = 1; i + 1 < m.size() && w[i] <= omega_max; ++i) {
        if (m[i] > m[i - 1] && m[i] >= m[i + 1]) {
            candidates.push_back(Peak{i, w[i], m[i]});
            top = std::max(top, m[i]);
        }
    }
    std::vector<Peak> peaks;
    if (m.size() > 1 && m[0] > m[1] && m[0] >= rel_threshold * top) {
        peaks.push_back(Peak{0, w[0], m[0]});
    }
    for (const Peak& p : candidates) {
        if (p.magnitude >= rel_threshold * top) {
            peaks.push_back(p);
        }
    }
    return peaks;
}

}  // namespace dce
