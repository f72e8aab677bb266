#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dce/fock_algebra.hpp"
#include "dce/lindblad.hpp"

namespace dce {

// Uniformly sampled record of named real channels.
class TimeSeries {
public:
    TimeSeries() = default;
    explicit TimeSeries(std::vector<std::string> channel_names);

    void append(double t, const std::vector<double>& values);

    const std::vector<double>& t() const noexcept { return t_; }
    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::vector<double>& channel(const std::string& name) const;
    const std::vector<double>& channel(std::size_t index) const { return values_.at(index); }
    bool has_channel(const std::string& name) const;
    std::size_t size() const noexcept { return t_.size(); }
    std::size_t channel_count() const noexcept { return names_.size(); }

    // Sample step; throws DomainError when the record is not uniform.
    double step() const;

private:
    std::vector<double> t_;
    std::vector<std::string> names_;
    std::vector<std::vector<double>> values_;
};

Complex expectation(const DensityMatrix& rho, const Operator& op);

// Below this mean photon number g2 is reported as undefined.
inline constexpr double g2_photon_floor = 1e-6;

// <A^dagger A^dagger A A> / <A^dagger A>^2, or nullopt below the floor.
std::optional<double> g2_equal_time(const DensityMatrix& rho, const Operator& a);

enum class Subsystem { cavity, mechanics };

Eigen::MatrixXcd partial_transpose(const DensityMatrix& rho, Subsystem over = Subsystem::cavity);

// Sum of the negative parts of the spectrum of the partial transpose.
double negativity(const DensityMatrix& rho, Subsystem over = Subsystem::cavity);

struct SteadyState {
    double mean = 0.0;
    double peak_to_peak = 0.0;
    double window_start = 0.0;  // start of the averaging window
    double transient_end = 0.0;
};

// Mean and peak-to-peak of `channel` over the final n_periods drive periods.
// The transient is over once the means of two consecutive windows of that
// length differ by less than 1%; throws ConvergenceError otherwise.
SteadyState steady_state_average(const TimeSeries& series, const std::string& channel, int n_periods,
                                 double omega_d);

enum class FluxConvention { cycles_per_second, radians_per_second };

// Output flux kappa <n>_ss in photons per second, with kappa given in units
// of omega_m and omega_m in laboratory Hz.
double photon_flux(double kappa_norm, double n_ss, double omega_m_lab_hz,
                   FluxConvention convention = FluxConvention::cycles_per_second);

struct Spectrum {
    std::vector<double> omega;      // units of omega_m
    std::vector<double> magnitude;  // one-sided, sum of squares = windowed signal energy
};

enum class Window { rectangular, hann };

// One-sided DFT magnitude of `channel` from t_start to the end of the record.
// No detrending. Needs at least 256 samples.
Spectrum fourier_spectrum(const TimeSeries& series, const std::string& channel, double t_start,
                          Window window = Window::rectangular);

// Scales so that the largest local maximum away from omega = 0 equals 1.
Spectrum normalize_to_peak(const Spectrum& spectrum);

struct Peak {
    std::size_t bin = 0;
    double omega = 0.0;
    double magnitude = 0.0;
};

// Local maxima up to omega_max. The omega = 0 bin counts as a peak when it
// exceeds its neighbour. Peaks away from zero are kept when they reach
// rel_threshold times the largest of them.
std::vector<Peak> find_peaks(const Spectrum& spectrum, double omega_max, double rel_threshold);

}  // namespace dce
