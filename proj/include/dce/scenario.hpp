#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dce/lindblad.hpp"
#include "dce/observables.hpp"
#include "dce/spectrum.hpp"
#include "dce/system_model.hpp"

namespace dce {

// Raw configuration document: sections of `key = value` lines, order kept.
struct ConfigEntry {
    std::string key;
    std::string value;
    int line = 0;
};

struct ConfigDocument {
    std::vector<std::pair<std::string, std::vector<ConfigEntry>>> sections;

    const std::string* find(const std::string& section, const std::string& key) const;
    // Replaces or appends section.key.
    void set(const std::string& section, const std::string& key, const std::string& value);
};

ConfigDocument parse_document(const std::string& text);

// Evaluates an arithmetic expression: numbers, + - * / ^, parentheses,
// sqrt/exp/log/sin/cos, and names looked up through `lookup`.
double evaluate_expression(const std::string& text, const std::function<double(const std::string&)>& lookup);

enum class ScenarioKind { dynamics, level_scan, matrix_elements, splitting_comparison };

std::string to_string(ScenarioKind kind);

struct InitialState {
    enum class Kind { ground, bare_fock, eigenstate } kind = Kind::ground;
    int n = 0;
    int k = 0;
    int index = 0;

    std::string str() const;
};

struct ResonanceInfo {
    int k = 0;
    int q = 0;
    double first_order = 0.0;
    SplittingResult refined;
    double half_splitting() const { return 0.5 * refined.gap; }
};

struct RetuneSpec {
    double t_switch = 0.0;  // snapped to the sample grid
    double omega_c_new = 0.0;
};

struct EvolutionSettings {
    double t_end = 0.0;
    double sample_dt = 0.0;
    EvolveOptions options;
};

struct AnalysisSettings {
    bool steady_state = false;
    int steady_periods = 20;
    bool fft = false;
    double fft_t_start = 0.0;
    Window fft_window = Window::rectangular;
    bool fft_normalize = false;
    bool negativity = true;
    // find_peaks settings for the FFT summary
    double peak_threshold = 0.1;
    double peak_omega_max = 0.1;
    std::optional<double> flux_lab_omega_c_hz;  // laboratory omega_c / 2 pi
    FluxConvention flux_convention = FluxConvention::cycles_per_second;
    int truncation_levels = 20;
    // level_scan
    double scan_min = 0.0;
    double scan_max = 0.0;
    int scan_points = 0;
    int scan_levels = 0;
    bool scan_compare = false;  // also scan without V_DCE
    // min_splitting on explicit levels
    std::optional<std::pair<int, int>> splitting_levels;
    std::pair<double, double> splitting_bracket{0.0, 0.0};
    // matrix_elements / splitting_comparison
    std::vector<int> q_values;
    std::vector<int> k_values;
    std::vector<double> g_values;
};

struct ScenarioConfig {
    std::string name;
    std::string description;
    ScenarioKind kind = ScenarioKind::dynamics;
    SystemParams params;
    bool include_dce = true;
    DriveSpec drive;
    InitialState initial;
    EvolutionSettings evolution;
    std::optional<RetuneSpec> retune;
    std::optional<ResonanceInfo> resonance;
    AnalysisSettings analysis;
    std::filesystem::path output_dir;
    bool populations = false;  // per-eigenstate population columns
    int population_levels = 0;
    // Every resolved setting as section.key = value, defaults included.
    std::vector<std::pair<std::string, std::string>> echo;
};

// section.key=value strings applied on top of the document before resolution.
using Overrides = std::vector<std::string>;

// Throws ConfigError carrying the offending key path.
ScenarioConfig parse_config(const std::string& text, const Overrides& overrides = {});
ScenarioConfig parse_config(const ConfigDocument& doc);

struct ScenarioInfo {
    std::string name;
    std::string description;
    std::string figure;
    std::string source;  // "builtin" or a file path
};

const std::vector<ScenarioInfo>& builtin_scenarios();
// Built-in scenario text; throws ConfigError for unknown names.
const std::string& builtin_config_text(const std::string& name);

// Built-ins followed by every *.cfg file in config_dir (when it exists).
std::vector<ScenarioInfo> list_scenarios(const std::filesystem::path& config_dir = {});

// A built-in name or a path to a config file.
std::string load_scenario_text(const std::string& name_or_path);

// Time evolution of a dynamics scenario, including the optional retune.
// Channels: photon, phonon, g2, negativity, trace, then pop_<j> when
// populations are requested. g2 is NaN below the photon floor.
struct DynamicsResult {
    TimeSeries series;
    EvolveStats stats;
    DensityMatrix final_state;
};

DynamicsResult simulate_dynamics(const ScenarioConfig& config);

struct RunSummary {
    std::filesystem::path output_dir;
    std::vector<std::filesystem::path> files;
    double wall_seconds = 0.0;
    EvolveStats stats;
    std::optional<TimeSeries> series;
    std::optional<Spectrum> spectrum;
    std::optional<LevelScan> scan;
    std::vector<std::pair<std::string, std::string>> results;  // also in the manifest

    const std::string* result(const std::string& key) const;
};

struct RunOptions {
    std::optional<std::filesystem::path> output_root;  // replaces output.dir's parent
    int jobs = 1;
    std::string version = "unknown";
};

RunSummary run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

// CSV helpers, %.12e formatting.
std::string format_number(double value);
void write_timeseries_csv(const std::filesystem::path& path, const TimeSeries& series);
void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& spectrum);
void write_level_scan_csv(const std::filesystem::path& path, const LevelScan& scan);

}  // namespace dce
