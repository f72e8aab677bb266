#include "dce/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "dce/analytic_dce.hpp"
#include "dce/error.hpp"

namespace dce {

std::string format_number(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12e", value);
    return buf;
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open '" + path.string() + "' for writing");
    }
    return out;
}

std::string short_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

void write_timeseries_csv(const std::filesystem::path& path, const TimeSeries& series) {
    std::ofstream out = open_output(path);
    out << 't';
    for (const std::string& name : series.names()) {
        out << ',' << name;
    }
    out << '\n';
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << format_number(series.t()[i]);
        for (std::size_t c = 0; c < series.channel_count(); ++c) {
            out << ',' << format_number(series.channel(c)[i]);
        }
        out << '\n';
    }
}

void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& spectrum) {
    std::ofstream out = open_output(path);
    out << "omega,magnitude\n";
    for (std::size_t i = 0; i < spectrum.omega.size(); ++i) {
        out << format_number(spectrum.omega[i]) << ',' << format_number(spectrum.magnitude[i]) << '\n';
    }
}

void write_level_scan_csv(const std::filesystem::path& path, const LevelScan& scan) {
    std::ofstream out = open_output(path);
    const auto n_levels = scan.levels.cols();
    out << "omega_c";
    for (Eigen::Index j = 0; j < n_levels; ++j) {
        out << ",E_" << j;
    }
    for (Eigen::Index j = 0; j < n_levels; ++j) {
        out << ",label_" << j;
    }
    out << '\n';
    for (std::size_t i = 0; i < scan.omega_c_grid.size(); ++i) {
        out << format_number(scan.omega_c_grid[i]);
        for (Eigen::Index j = 0; j < n_levels; ++j) {
            out << ',' << format_number(scan.levels(static_cast<Eigen::Index>(i), j));
        }
        for (Eigen::Index j = 0; j < n_levels; ++j) {
            out << ',' << scan.labels[i][static_cast<std::size_t>(j)].str();
        }
        out << '\n';
    }
}

const std::string* RunSummary::result(const std::string& key) const {
    for (const auto& [k, v] : results) {
        if (k == key) {
            return &v;
        }
    }
    return nullptr;
}

namespace {

DensityMatrix initial_state(const ScenarioConfig& config, const EvolutionContext& ctx) {
    const SpaceDims dims = config.params.dims;
    switch (config.initial.kind) {
        case InitialState::Kind::ground:
            return DensityMatrix::pure(dims, ctx.eigensystem().state(0));
        case InitialState::Kind::bare_fock:
            return DensityMatrix::basis(dims, config.initial.n, config.initial.k);
        case InitialState::Kind::eigenstate:
            return DensityMatrix::pure(dims, ctx.eigensystem().state(config.initial.index));
    }
    return DensityMatrix::pure(dims, ctx.eigensystem().state(0));
}

// Samples observables with the dressed operators of one evolution context.
class Recorder {
public:
    Recorder(const ScenarioConfig& config, TimeSeries& series, long& index)
        : config_(config), series_(series), index_(index) {}

    SampleObserver observer(const EvolutionContext& ctx, bool skip_first) {
        n_a_ = dagger(ctx.dressed().A) * ctx.dressed().A;
        n_b_ = dagger(ctx.dressed().B) * ctx.dressed().B;
        a_ = &ctx.dressed().A;
        states_ = &ctx.eigensystem().states;
        skip_ = skip_first;
        return [this](double, const DensityMatrix& rho) { record(rho); };
    }

private:
    void record(const DensityMatrix& rho) {
        if (skip_) {
            skip_ = false;
            return;
        }
        std::vector<double> row;
        row.reserve(series_.channel_count());
        row.push_back(expectation(rho, n_a_).real());
        row.push_back(expectation(rho, n_b_).real());
        const auto g2 = g2_equal_time(rho, *a_);
        row.push_back(g2 ? *g2 : std::numeric_limits<double>::quiet_NaN());
        row.push_back(config_.analysis.negativity ? negativity(rho) : std::numeric_limits<double>::quiet_NaN());
        row.push_back(rho.trace().real());
        if (config_.populations) {
            for (int j = 0; j < config_.population_levels; ++j) {
                const auto psi = states_->col(j);
                row.push_back((psi.adjoint() * rho.rho * psi).value().real());
            }
        }
        series_.append(static_cast<double>(index_) * config_.evolution.sample_dt, row);
        ++index_;
    }

    const ScenarioConfig& config_;
    TimeSeries& series_;
    long& index_;
    Operator n_a_;
    Operator n_b_;
    const Operator* a_ = nullptr;
    const Eigen::MatrixXcd* states_ = nullptr;
    bool skip_ = false;
};

void merge_stats(EvolveStats& into, const EvolveStats& s) {
    into.accepted_steps += s.accepted_steps;
    into.rejected_steps += s.rejected_steps;
    into.rhs_evaluations += s.rhs_evaluations;
    into.samples += s.samples;
    into.positivity_checks += s.positivity_checks;
    into.max_trace_error = std::max(into.max_trace_error, s.max_trace_error);
    into.max_hermiticity = std::max(into.max_hermiticity, s.max_hermiticity);
    into.min_eigenvalue = std::min(into.min_eigenvalue, s.min_eigenvalue);
}

}  // namespace

DynamicsResult simulate_dynamics(const ScenarioConfig& config) {
    if (config.kind != ScenarioKind::dynamics) {
        throw DomainError("simulate_dynamics: scenario '" + config.name + "' is not a dynamics scenario");
    }
    std::vector<std::string> names{"photon", "phonon", "g2", "negativity", "trace"};
    if (config.populations) {
        for (int j = 0; j < config.population_levels; ++j) {
            names.push_back("pop_" + std::to_string(j));
        }
    }
    DynamicsResult result{TimeSeries(names), EvolveStats{}, DensityMatrix{}};
    long index = 0;
    Recorder recorder(config, result.series, index);

    const EvolutionContext ctx(config.params, config.drive, config.include_dce);
    const DensityMatrix rho0 = initial_state(config, ctx);
    const double dt = config.evolution.sample_dt;
    const EvolveOptions& options = config.evolution.options;

    if (!config.retune) {
        result.final_state = evolve(rho0, 0.0, config.evolution.t_end, dt, ctx, recorder.observer(ctx, false),
                                    options, &result.stats);
        return result;
    }
    const RetuneSpec& rt = *config.retune;
    EvolveStats first;
    const DensityMatrix mid = evolve(rho0, 0.0, rt.t_switch, dt, ctx, recorder.observer(ctx, false), options, &first);
    SystemParams after = config.params;
    after.omega_c = rt.omega_c_new;
    const EvolutionContext ctx2 = retune_cavity(mid, config.params, after, config.drive, config.include_dce);
    EvolveStats second;
    // The sample at t_switch was already taken with the pre-switch operators.
    result.final_state =
        evolve(mid, rt.t_switch, config.evolution.t_end, dt, ctx2, recorder.observer(ctx2, true), options, &second);
    result.stats = first;
    merge_stats(result.stats, second);
    result.stats.samples -= 1;
    return result;
}

namespace {

using Results = std::vector<std::pair<std::string, std::string>>;

void add(Results& r, const std::string& key, const std::string& value) { r.emplace_back(key, value); }
void add(Results& r, const std::string& key, double value) { r.emplace_back(key, short_number(value)); }

double drive_frequency(const DriveSpec& drive) {
    if (const auto* cw = std::get_if<ContinuousWave>(&drive.variant)) {
        return cw->omega_d;
    }
    if (const auto* p = std::get_if<GaussianPulse>(&drive.variant)) {
        return p->omega_d;
    }
    return 1.0;
}

void analyse_dynamics(const ScenarioConfig& config, const std::filesystem::path& dir, RunSummary& summary) {
    DynamicsResult dyn = simulate_dynamics(config);
    summary.stats = dyn.stats;
    const auto ts_path = dir / (config.name + "_timeseries.csv");
    write_timeseries_csv(ts_path, dyn.series);
    summary.files.push_back(ts_path);

    const AnalysisSettings& a = config.analysis;
    if (a.steady_state) {
        std::vector<std::string> channels{"photon", "phonon"};
        if (a.negativity) {
            channels.push_back("negativity");
        }
        const double omega_d = drive_frequency(config.drive);
        for (const std::string& ch : channels) {
            const std::string key = "steady." + ch;
            try {
                const SteadyState ss = steady_state_average(dyn.series, ch, a.steady_periods, omega_d);
                add(summary.results, key + ".mean", ss.mean);
                add(summary.results, key + ".peak_to_peak", ss.peak_to_peak);
                add(summary.results, key + ".window_start", ss.window_start);
                add(summary.results, key + ".transient_end", ss.transient_end);
                if (ch == "photon" && a.flux_lab_omega_c_hz) {
                    const double omega_m_hz = *a.flux_lab_omega_c_hz / config.params.omega_c;
                    add(summary.results, "flux.photons_per_second",
                        photon_flux(config.params.kappa, ss.mean, omega_m_hz, a.flux_convention));
                }
            } catch (const ConvergenceError& e) {
                add(summary.results, key + ".status", std::string("not_converged: ") + e.what());
            }
        }
    }
    if (a.fft) {
        Spectrum spectrum = fourier_spectrum(dyn.series, "photon", a.fft_t_start, a.fft_window);
        const std::vector<Peak> peaks = find_peaks(spectrum, a.peak_omega_max, a.peak_threshold);
        std::string list;
        for (const Peak& p : peaks) {
            list += (list.empty() ? "" : ";") + short_number(p.omega);
        }
        add(summary.results, "fft.resolution", spectrum.omega.size() > 1 ? spectrum.omega[1] : 0.0);
        add(summary.results, "fft.peak_count", std::to_string(peaks.size()));
        add(summary.results, "fft.peaks", list);
        if (a.fft_normalize) {
            spectrum = normalize_to_peak(spectrum);
        }
        const auto sp_path = dir / (config.name + "_spectrum.csv");
        write_spectrum_csv(sp_path, spectrum);
        summary.files.push_back(sp_path);
        summary.spectrum = std::move(spectrum);
    }
    summary.series = std::move(dyn.series);
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        v[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return v;
}

void analyse_level_scan(const ScenarioConfig& config, const std::filesystem::path& dir, int jobs,
                        RunSummary& summary) {
    const AnalysisSettings& a = config.analysis;
    const std::vector<double> grid = linspace(a.scan_min, a.scan_max, a.scan_points);
    LevelScan scan = level_scan(config.params, grid, a.scan_levels, config.include_dce, jobs);
    const auto path = dir / (config.name + "_levels.csv");
    write_level_scan_csv(path, scan);
    summary.files.push_back(path);
    if (a.scan_compare) {
        const LevelScan bare = level_scan(config.params, grid, a.scan_levels, !config.include_dce, jobs);
        const auto bare_path = dir / (config.name + (config.include_dce ? "_levels_nodce.csv" : "_levels_dce.csv"));
        write_level_scan_csv(bare_path, bare);
        summary.files.push_back(bare_path);
    }
    if (a.splitting_levels) {
        const SplittingResult s =
            min_splitting(config.params, a.splitting_levels->first, a.splitting_levels->second, a.splitting_bracket);
        add(summary.results, "splitting.omega_c_star", s.omega_c_star);
        add(summary.results, "splitting.gap", s.gap);
    }
    summary.scan = std::move(scan);
}

void analyse_matrix_elements(const ScenarioConfig& config, const std::filesystem::path& dir, RunSummary& summary) {
    const AnalysisSettings& a = config.analysis;
    const auto path = dir / (config.name + "_matrix_elements.csv");
    std::ofstream out = open_output(path);
    out << "g,q,k,two_omega\n";
    for (double g : a.g_values) {
        for (int q : a.q_values) {
            for (int k : a.k_values) {
                if (k < q) {
                    continue;
                }
                SystemParams p = config.params;
                p.g = g;
                const double two_omega = 2.0 * casimir_rabi_splitting(SplittingQuery{k, q, p});
                out << format_number(g) << ',' << q << ',' << k << ',' << format_number(two_omega) << '\n';
            }
        }
    }
    summary.files.push_back(path);
}

void analyse_splitting_comparison(const ScenarioConfig& config, const std::filesystem::path& dir,
                                  RunSummary& summary) {
    const AnalysisSettings& a = config.analysis;
    const auto path = dir / (config.name + "_splitting.csv");
    std::ofstream out = open_output(path);
    out << "g,q,k,omega_c_first_order,omega_c_star,numeric_two_omega,analytic_two_omega,ratio\n";
    for (int q : a.q_values) {
        for (int k : a.k_values) {
            if (k < q) {
                continue;
            }
            for (double g : a.g_values) {
                SystemParams p = config.params;
                p.g = g;
                const SplittingResult s = locate_resonance(p, k, q);
                const double analytic = 2.0 * casimir_rabi_splitting(SplittingQuery{k, q, p});
                out << format_number(g) << ',' << q << ',' << k << ',' << format_number(first_order_resonance(q, p))
                    << ',' << format_number(s.omega_c_star) << ',' << format_number(s.gap) << ','
                    << format_number(analytic) << ',' << format_number(s.gap / analytic) << '\n';
            }
        }
    }
    summary.files.push_back(path);
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

RunSummary run_scenario(const ScenarioConfig& config, const RunOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    RunSummary summary;
    summary.output_dir = options.output_root ? *options.output_root / config.name : config.output_dir;
    std::filesystem::create_directories(summary.output_dir);
    const std::filesystem::path& dir = summary.output_dir;

    Results pre;
    if (config.resonance) {
        const ResonanceInfo& r = *config.resonance;
        add(pre, "resonance.k", std::to_string(r.k));
        add(pre, "resonance.q", std::to_string(r.q));
        add(pre, "resonance.omega_c_first_order", r.first_order);
        add(pre, "resonance.omega_c_refined", r.refined.omega_c_star);
        add(pre, "resonance.refined_minus_first_order", r.refined.omega_c_star - r.first_order);
        add(pre, "resonance.offset_from_q_half", r.refined.omega_c_star - 0.5 * r.q);
        add(pre, "resonance.gap", r.refined.gap);
        add(pre, "resonance.half_splitting", r.half_splitting());
        add(pre, "resonance.levels", std::to_string(r.refined.level_lo) + "," + std::to_string(r.refined.level_hi));
    }
    if (config.kind == ScenarioKind::dynamics || config.kind == ScenarioKind::level_scan) {
        const TruncationReport tr = truncation_check(config.params, config.analysis.truncation_levels);
        add(pre, "truncation.base", std::to_string(tr.base.n_c) + "," + std::to_string(tr.base.n_m));
        add(pre, "truncation.enlarged", std::to_string(tr.enlarged.n_c) + "," + std::to_string(tr.enlarged.n_m));
        add(pre, "truncation.levels", std::to_string(tr.n_levels));
        add(pre, "truncation.max_relative_change", tr.max_relative_change);
        add(pre, "truncation.converged", tr.converged ? "true" : "false");
    }

    try {
        switch (config.kind) {
            case ScenarioKind::dynamics:
                analyse_dynamics(config, dir, summary);
                break;
            case ScenarioKind::level_scan:
                analyse_level_scan(config, dir, options.jobs, summary);
                break;
            case ScenarioKind::matrix_elements:
                analyse_matrix_elements(config, dir, summary);
                break;
            case ScenarioKind::splitting_comparison:
                analyse_splitting_comparison(config, dir, summary);
                break;
        }
    } catch (const IntegrityError& e) {
        throw IntegrityError("scenario '" + config.name + "': " + e.what());
    }
    summary.results.insert(summary.results.begin(), pre.begin(), pre.end());
    summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const auto manifest = dir / (config.name + "_manifest.txt");
    std::ofstream out = open_output(manifest);
    out << "version = " << options.version << '\n';
    out << "scenario = " << config.name << '\n';
    out << "started_utc = " << utc_timestamp() << '\n';
    for (const auto& [k, v] : config.echo) {
        out << "config." << k << " = " << v << '\n';
    }
    for (const auto& [k, v] : summary.results) {
        out << k << " = " << v << '\n';
    }
    if (config.kind == ScenarioKind::dynamics) {
        const EvolveStats& s = summary.stats;
        out << "stats.accepted_steps = " << s.accepted_steps << '\n';
        out << "stats.rejected_steps = " << s.rejected_steps << '\n';
        out << "stats.rhs_evaluations = " << s.rhs_evaluations << '\n';
        out << "stats.samples = " << s.samples << '\n';
        out << "stats.positivity_checks = " << s.positivity_checks << '\n';
        out << "stats.max_trace_error = " << short_number(s.max_trace_error) << '\n';
        out << "stats.max_hermiticity = " << short_number(s.max_hermiticity) << '\n';
        out << "stats.min_eigenvalue = " << short_number(s.min_eigenvalue) << '\n';
    }
    for (const auto& f : summary.files) {
        out << "file = " << f.filename().string() << '\n';
    }
    out << "wall_seconds = " << short_number(summary.wall_seconds) << '\n';
    summary.files.push_back(manifest);
    return summary;
}

}  // namespace dce
