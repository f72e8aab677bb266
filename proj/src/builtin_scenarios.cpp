#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "dce/error.hpp"
#include "dce/scenario.hpp"

namespace dce {

namespace {

struct Builtin {
    ScenarioInfo info;
    std::string text;
};

const std::vector<Builtin>& builtins() {
    static const std::vector<Builtin> all{
        {{"fig2a", "level scan around the (1,1) anticrossing, g = 0.04, with and without V_DCE", "Fig. 2a",
          "builtin"},
         R"([scenario]
name = fig2a
description = lowest levels vs omega_c, g = 0.04
kind = level_scan

[system]
n_c = 8
n_m = 24
g = 0.04
resonance = 1,1

[analysis]
scan_min = 0.2
scan_max = 1.1
scan_points = 451
scan_levels = 12
scan_compare = true
)"},
        {{"fig2b", "level scan up to omega_c = 2.1, g = 0.1, (3,3) anticrossing refined", "Fig. 2b-d", "builtin"},
         R"([scenario]
name = fig2b
description = lowest levels vs omega_c, g = 0.1
kind = level_scan

[system]
n_c = 8
n_m = 24
g = 0.1
resonance = 3,3

[analysis]
scan_min = 0.2
scan_max = 2.1
scan_points = 951
scan_levels = 14
scan_compare = true
)"},
        {{"fig3", "CW-driven mirror at the (3,3) resonance, g = 0.1, steady photons and g2", "Fig. 3", "builtin"},
         R"([scenario]
name = fig3
description = CW drive at omega_c near 1.5, g = 0.1

[system]
g = 0.1
resonance = 3,3
kappa = 3e-3
gamma = 10*kappa

[drive]
type = cw
amplitude = 2*gamma
omega_d = 1

[initial]
state = ground

[evolution]
t_end = 2000

[analysis]
steady_state = true
flux_lab_omega_c_hz = 6e9
)"},
        {{"fig4a", "CW-driven mirror at the (2,2) resonance, g = 0.1", "Fig. 4a", "builtin"},
         R"([scenario]
name = fig4a
description = CW drive at omega_c near 1, g = 0.1

[system]
g = 0.1
resonance = 2,2
kappa = 3e-3
gamma = 10*kappa

[drive]
type = cw
amplitude = 2*gamma
omega_d = 1

[initial]
state = ground

[evolution]
t_end = 2000

[analysis]
steady_state = true
)"},
        {{"fig4b", "CW-driven mirror at the (2,2) resonance, g = 0.01", "Fig. 4b", "builtin"},
         R"([scenario]
name = fig4b
description = CW drive at omega_c near 1, g = 0.01

[system]
g = 0.01
resonance = 2,2
kappa = 3e-3
gamma = 10*kappa

[drive]
type = cw
amplitude = 2*gamma
omega_d = 1

[initial]
state = ground

[evolution]
t_end = 2000

[analysis]
steady_state = true
)"},
        {{"fig5", "Gaussian mechanical pulse at the (3,3) resonance, photon nutations and their spectrum",
          "Fig. 5", "builtin"},
         R"([scenario]
name = fig5
description = pulsed mirror, Casimir-Rabi nutations, area set with --amp

[system]
g = 0.1
resonance = 3,3
gamma = 0.15*Omega
kappa = gamma/2

[drive]
type = pulse
area = pi/3
sigma = 1/(20*Omega)
omega_d = 1

[initial]
state = ground

[evolution]
t_end = 5000
atol = 1e-10

[analysis]
fft = true
fft_normalize = true
)"},
        {{"fig6a", "|0,2> prepared off resonance, cavity quenched onto the (2,2) resonance, high losses", "Fig. 6a",
          "builtin"},
         R"([scenario]
name = fig6a
description = mechanical Fock state decay after a cavity quench

[system]
g = 0.1
resonance = 2,2
omega_c = 1.1*omega_c0
gamma = Omega/5
kappa = 2.5*gamma

[initial]
state = bare_fock(0,2)

[evolution]
t_end = 4*pi/Omega

[retune]
t_switch = 2*pi
omega_c_new = omega_c0
)"},
        {{"fig6b", "|0,2> prepared off resonance, cavity quenched onto the (2,2) resonance, low losses", "Fig. 6b",
          "builtin"},
         R"([scenario]
name = fig6b
description = vacuum Casimir-Rabi oscillations after a cavity quench

[system]
g = 0.1
resonance = 2,2
omega_c = 1.1*omega_c0
gamma = Omega/80
kappa = gamma

[initial]
state = bare_fock(0,2)

[evolution]
t_end = 6*pi/Omega

[retune]
t_switch = 2*pi
omega_c_new = omega_c0
)"},
        {{"fig7", "first-order splittings 2 Omega_{0,k}^{2,k-q} for q = 2,3,4 (analytic, no evolution)", "Fig. 7",
          "builtin"},
         R"([scenario]
name = fig7
description = analytic pair-creation couplings vs k
kind = matrix_elements

[analysis]
q_values = 2, 3, 4
k_values = 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12
g_values = 0.1, 0.01
)"},
        {{"fig8", "numeric vs first-order splittings for (3,3), (4,3) and (4,4) over g (no evolution)", "Fig. 8",
          "builtin"},
         R"([scenario]
name = fig8
description = numeric min_splitting against the first-order couplings
kind = splitting_comparison

[analysis]
q_values = 3, 4
k_values = 3, 4
g_values = 0.01, 0.015, 0.02, 0.025, 0.03, 0.035, 0.04, 0.045, 0.05, 0.055, 0.06, 0.065, 0.07, 0.075, 0.08, 0.085, 0.09, 0.095, 0.1
)"},
    };
    return all;
}

}  // namespace

const std::vector<ScenarioInfo>& builtin_scenarios() {
    static const std::vector<ScenarioInfo> infos = [] {
        std::vector<ScenarioInfo> v;
        for (const Builtin& b : builtins()) {
            v.push_back(b.info);
        }
        return v;
    }();
    return infos;
}

const std::string& builtin_config_text(const std::string& name) {
    for (const Builtin& b : builtins()) {
        if (b.info.name == name) {
            return b.text;
        }
    }
    throw ConfigError("scenario.name", "no built-in scenario named '" + name + "'");
}

std::vector<ScenarioInfo> list_scenarios(const std::filesystem::path& config_dir) {
    std::vector<ScenarioInfo> out = builtin_scenarios();
    if (config_dir.empty() || !std::filesystem::is_directory(config_dir)) {
        return out;
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(config_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".cfg") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        ScenarioInfo info;
        info.source = path.string();
        info.name = path.stem().string();
        try {
            const ConfigDocument doc = parse_document(load_scenario_text(path.string()));
            if (const std::string* n = doc.find("scenario", "name")) {
                info.name = *n;
            }
            if (const std::string* d = doc.find("scenario", "description")) {
                info.description = *d;
            }
        } catch (const Error& e) {
            info.description = std::string("unreadable: ") + e.what();
        }
        info.figure = "-";
        out.push_back(info);
    }
    return out;
}

std::string load_scenario_text(const std::string& name_or_path) {
    for (const Builtin& b : builtins()) {
        if (b.info.name == name_or_path) {
            return b.text;
        }
    }
    std::ifstream in(name_or_path, std::ios::binary);
    if (!in) {
        throw ConfigError("", "'" + name_or_path + "' is neither a built-in scenario nor a readable file");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace dce
