#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>

#include "dce/analytic_dce.hpp"
#include "dce/error.hpp"
#include "dce/scenario.hpp"

namespace dce {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool valid_name(const std::string& s) {
    if (s.empty() || !(std::islower(static_cast<unsigned char>(s[0])) || s[0] == '_')) {
        return false;
    }
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_';
    });
}

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

const std::string* ConfigDocument::find(const std::string& section, const std::string& key) const {
    for (const auto& [name, entries] : sections) {
        if (name != section) {
            continue;
        }
        for (const ConfigEntry& e : entries) {
            if (e.key == key) {
                return &e.value;
            }
        }
    }
    return nullptr;
}

void ConfigDocument::set(const std::string& section, const std::string& key, const std::string& value) {
    for (auto& [name, entries] : sections) {
        if (name != section) {
            continue;
        }
        for (ConfigEntry& e : entries) {
            if (e.key == key) {
                e.value = value;
                return;
            }
        }
        entries.push_back(ConfigEntry{key, value, 0});
        return;
    }
    sections.emplace_back(section, std::vector<ConfigEntry>{ConfigEntry{key, value, 0}});
}

ConfigDocument parse_document(const std::string& text) {
    ConfigDocument doc;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    std::vector<ConfigEntry>* current = nullptr;
    std::string current_name;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) {
            continue;
        }
        const std::string where = "line " + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(where, "malformed section header '" + line + "'");
            }
            current_name = trim(line.substr(1, line.size() - 2));
            if (!valid_name(current_name)) {
                throw ConfigError(where, "invalid section name '" + current_name + "'");
            }
            for (const auto& s : doc.sections) {
                if (s.first == current_name) {
                    throw ConfigError(current_name, "section appears twice");
                }
            }
            doc.sections.emplace_back(current_name, std::vector<ConfigEntry>{});
            current = &doc.sections.back().second;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(where, "expected 'key = value'");
        }
        if (current == nullptr) {
            throw ConfigError(where, "key outside of any section");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!valid_name(key)) {
            throw ConfigError(current_name + "." + key, "invalid key name");
        }
        for (const ConfigEntry& e : *current) {
            if (e.key == key) {
                throw ConfigError(current_name + "." + key, "key appears twice");
            }
        }
        current->push_back(ConfigEntry{key, value, line_no});
    }
    return doc;
}

namespace {

class ExpressionParser {
public:
    ExpressionParser(const std::string& text, const std::function<double(const std::string&)>& lookup)
        : s_(text), lookup_(lookup) {}

    double parse() {
        const double v = expr();
        skip();
        if (pos_ != s_.size()) {
            fail("unexpected '" + s_.substr(pos_) + "'");
        }
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw DomainError("expression '" + s_ + "': " + what);
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    double expr() {
        double v = term();
        for (;;) {
            if (accept('+')) {
                v += term();
            } else if (accept('-')) {
                v -= term();
            } else {
                return v;
            }
        }
    }

    double term() {
        double v = unary();
        for (;;) {
            if (accept('*')) {
                v *= unary();
            } else if (accept('/')) {
                v /= unary();
            } else {
                return v;
            }
        }
    }

    double unary() {
        if (accept('-')) {
            return -unary();
        }
        if (accept('+')) {
            return unary();
        }
        const double base = primary();
        if (accept('^')) {
            return std::pow(base, unary());
        }
        return base;
    }

    double primary() {
        skip();
        if (pos_ >= s_.size()) {
            fail("unexpected end");
        }
        if (accept('(')) {
            const double v = expr();
            if (!accept(')')) {
                fail("missing ')'");
            }
            return v;
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
            if (ec != std::errc()) {
                fail("bad number");
            }
            pos_ = static_cast<std::size_t>(ptr - s_.data());
            return v;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
                ++pos_;
            }
            const std::string name = s_.substr(start, pos_ - start);
            if (accept('(')) {
                const double arg = expr();
                if (!accept(')')) {
                    fail("missing ')'");
                }
                return call(name, arg);
            }
            if (name == "pi") {
                return std::numbers::pi;
            }
            return lookup_(name);
        }
        fail(std::string("unexpected '") + c + "'");
    }

    double call(const std::string& name, double arg) const {
        if (name == "sqrt") {
            return std::sqrt(arg);
        }
        if (name == "exp") {
            return std::exp(arg);
        }
        if (name == "log") {
            return std::log(arg);
        }
        if (name == "sin") {
            return std::sin(arg);
        }
        if (name == "cos") {
            return std::cos(arg);
        }
        fail("unknown function '" + name + "'");
    }

    std::string s_;
    std::size_t pos_ = 0;
    const std::function<double(const std::string&)>& lookup_;
};

}  // namespace

double evaluate_expression(const std::string& text, const std::function<double(const std::string&)>& lookup) {
    return ExpressionParser(text, lookup).parse();
}

std::string to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::dynamics:
            return "dynamics";
        case ScenarioKind::level_scan:
            return "level_scan";
        case ScenarioKind::matrix_elements:
            return "matrix_elements";
        case ScenarioKind::splitting_comparison:
            return "splitting_comparison";
    }
    return "unknown";
}

std::string InitialState::str() const {
    switch (kind) {
        case Kind::ground:
            return "ground";
        case Kind::bare_fock:
            return "bare_fock(" + std::to_string(n) + "," + std::to_string(k) + ")";
        case Kind::eigenstate:
            return "eigenstate(" + std::to_string(index) + ")";
    }
    return "ground";
}

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"scenario", {"name", "description", "kind"}},
        {"system", {"n_c", "n_m", "g", "omega_c", "resonance", "kappa", "gamma", "include_dce"}},
        {"drive", {"type", "target", "amplitude", "omega_d", "area", "sigma", "t0"}},
        {"initial", {"state"}},
        {"evolution", {"t_end", "sample_dt", "rtol", "atol", "positivity_every"}},
        {"retune", {"t_switch", "omega_c_new"}},
        {"analysis",
         {"steady_state", "steady_periods", "fft", "fft_t_start", "fft_window", "fft_normalize", "negativity",
          "peak_threshold", "peak_omega_max", "flux_lab_omega_c_hz", "flux_convention", "scan_min", "scan_max",
          "scan_points", "scan_levels", "scan_compare", "splitting_levels", "splitting_bracket", "q_values",
          "k_values", "g_values", "truncation_levels"}},
        {"output", {"dir", "populations", "population_levels"}},
    };
    return keys;
}

struct SymbolSource {
    std::string section;
    std::string key;
    std::string fallback;  // default expression, empty when required
};

// Named values that expressions may refer to.
const std::map<std::string, SymbolSource>& symbol_table() {
    static const std::map<std::string, SymbolSource> table{
        {"g", {"system", "g", ""}},
        {"kappa", {"system", "kappa", "0"}},
        {"gamma", {"system", "gamma", "0"}},
        {"omega_c", {"system", "omega_c", ""}},
        {"omega_d", {"drive", "omega_d", "1"}},
        {"amplitude", {"drive", "amplitude", ""}},
        {"area", {"drive", "area", ""}},
        {"sigma", {"drive", "sigma", ""}},
        {"t0", {"drive", "t0", "6*sigma"}},
        {"t_end", {"evolution", "t_end", ""}},
        {"sample_dt", {"evolution", "sample_dt", "2*pi/40"}},
        {"t_switch", {"retune", "t_switch", ""}},
    };
    return table;
}

class Resolver {
public:
    explicit Resolver(const ConfigDocument& doc) : doc_(doc) {}

    const ConfigDocument& doc() const { return doc_; }

    const std::string* raw(const std::string& section, const std::string& key) const {
        return doc_.find(section, key);
    }

    bool has(const std::string& section, const std::string& key) const { return raw(section, key) != nullptr; }

    std::string path(const std::string& section, const std::string& key) const { return section + "." + key; }

    double eval(const std::string& section, const std::string& key, const std::string& text) {
        try {
            return evaluate_expression(text, [this](const std::string& name) { return symbol(name); });
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(path(section, key), e.what());
        }
    }

    // Value of a key, or its default expression; nullopt when both are absent.
    std::optional<double> number(const std::string& section, const std::string& key,
                                 const std::string& fallback = "") {
        const std::string p = path(section, key);
        if (auto it = cache_.find(p); it != cache_.end()) {
            return it->second;
        }
        const std::string* text = raw(section, key);
        if (text == nullptr && fallback.empty()) {
            return std::nullopt;
        }
        if (active_.count(p)) {
            throw ConfigError(p, "circular reference");
        }
        active_.insert(p);
        const double v = eval(section, key, text ? *text : fallback);
        active_.erase(p);
        if (!std::isfinite(v)) {
            throw ConfigError(p, "value is not finite");
        }
        cache_[p] = v;
        return v;
    }

    double required(const std::string& section, const std::string& key, const std::string& fallback = "") {
        const auto v = number(section, key, fallback);
        if (!v) {
            throw ConfigError(path(section, key), "required key is missing");
        }
        return *v;
    }

    int integer(const std::string& section, const std::string& key, const std::string& fallback) {
        const double v = required(section, key, fallback);
        if (std::abs(v - std::round(v)) > 1e-9 || std::abs(v) > 1e9) {
            throw ConfigError(path(section, key), "must be an integer");
        }
        return static_cast<int>(std::lround(v));
    }

    bool boolean(const std::string& section, const std::string& key, bool fallback) const {
        const std::string* text = raw(section, key);
        if (text == nullptr) {
            return fallback;
        }
        if (*text == "true" || *text == "yes" || *text == "on") {
            return true;
        }
        if (*text == "false" || *text == "no" || *text == "off") {
            return false;
        }
        throw ConfigError(path(section, key), "expected true or false, got '" + *text + "'");
    }

    std::string word(const std::string& section, const std::string& key, const std::string& fallback,
                     const std::vector<std::string>& allowed) const {
        const std::string* text = raw(section, key);
        const std::string v = text ? *text : fallback;
        if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
            std::string list;
            for (const auto& a : allowed) {
                list += (list.empty() ? "" : ", ") + a;
            }
            throw ConfigError(path(section, key), "expected one of {" + list + "}, got '" + v + "'");
        }
        return v;
    }

    std::vector<double> list(const std::string& section, const std::string& key) {
        std::vector<double> out;
        const std::string* text = raw(section, key);
        if (text == nullptr) {
            return out;
        }
        std::stringstream ss(*text);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) {
                throw ConfigError(path(section, key), "empty list item");
            }
            out.push_back(eval(section, key, item));
        }
        return out;
    }

    std::vector<int> int_list(const std::string& section, const std::string& key) {
        std::vector<int> out;
        for (double v : list(section, key)) {
            if (std::abs(v - std::round(v)) > 1e-9) {
                throw ConfigError(path(section, key), "list items must be integers");
            }
            out.push_back(static_cast<int>(std::lround(v)));
        }
        return out;
    }

    void set_resonance_symbols(double omega_c0, double omega, double omega_analytic) {
        resonance_symbols_ = {{"omega_c0", omega_c0}, {"Omega", omega}, {"Omega_analytic", omega_analytic}};
    }

    std::function<void()> need_resonance;

    double symbol(const std::string& name) {
        if (name == "omega_m") {
            return 1.0;
        }
        if (name == "omega_c0" || name == "Omega" || name == "Omega_analytic") {
            if (resonance_symbols_.empty() && need_resonance) {
                need_resonance();
            }
            if (auto it = resonance_symbols_.find(name); it != resonance_symbols_.end()) {
                return it->second;
            }
            throw ConfigError("system.resonance", "'" + name + "' is only defined when system.resonance is set");
        }
        const auto& table = symbol_table();
        const auto it = table.find(name);
        if (it == table.end()) {
            throw DomainError("unknown name '" + name + "'");
        }
        const SymbolSource& src = it->second;
        const auto v = number(src.section, src.key, src.fallback);
        if (!v) {
            throw ConfigError(path(src.section, src.key), "referenced as '" + name + "' but not set");
        }
        return *v;
    }

private:
    const ConfigDocument& doc_;
    std::map<std::string, double> cache_;
    std::set<std::string> active_;
    std::map<std::string, double> resonance_symbols_;
};

std::pair<int, int> parse_pair_int(Resolver& r, const std::string& section, const std::string& key) {
    const std::vector<int> v = r.int_list(section, key);
    if (v.size() != 2) {
        throw ConfigError(section + "." + key, "expected two comma-separated integers");
    }
    return {v[0], v[1]};
}

InitialState parse_initial(const std::string& text) {
    static const std::regex fock(R"(^bare_fock\(\s*(\d+)\s*,\s*(\d+)\s*\)$)");
    static const std::regex eig(R"(^eigenstate\(\s*(\d+)\s*\)$)");
    InitialState s;
    std::smatch m;
    if (text == "ground") {
        s.kind = InitialState::Kind::ground;
    } else if (std::regex_match(text, m, fock)) {
        s.kind = InitialState::Kind::bare_fock;
        s.n = std::stoi(m[1].str());
        s.k = std::stoi(m[2].str());
    } else if (std::regex_match(text, m, eig)) {
        s.kind = InitialState::Kind::eigenstate;
        s.index = std::stoi(m[1].str());
    } else {
        throw ConfigError("initial.state", "expected ground, bare_fock(n,k) or eigenstate(j), got '" + text + "'");
    }
    return s;
}

}  // namespace

ScenarioConfig parse_config(const ConfigDocument& doc) {
    for (const auto& [section, entries] : doc.sections) {
        const auto it = known_keys().find(section);
        if (it == known_keys().end()) {
            throw ConfigError(section, "unknown section");
        }
        for (const ConfigEntry& e : entries) {
            if (!it->second.count(e.key)) {
                throw ConfigError(section + "." + e.key, "unknown key");
            }
        }
    }

    Resolver r(doc);
    ScenarioConfig c;
    auto echo = [&c](const std::string& key, const std::string& value) { c.echo.emplace_back(key, value); };
    auto echo_num = [&](const std::string& key, double v) { echo(key, format_value(v)); };

    // [scenario]
    const std::string* name = r.raw("scenario", "name");
    if (name == nullptr || name->empty()) {
        throw ConfigError("scenario.name", "required key is missing");
    }
    if (!valid_name(*name)) {
        throw ConfigError("scenario.name", "use lower-case letters, digits and '_'");
    }
    c.name = *name;
    c.description = r.raw("scenario", "description") ? *r.raw("scenario", "description") : "";
    const std::string kind =
        r.word("scenario", "kind", "dynamics", {"dynamics", "level_scan", "matrix_elements", "splitting_comparison"});
    if (kind == "dynamics") {
        c.kind = ScenarioKind::dynamics;
    } else if (kind == "level_scan") {
        c.kind = ScenarioKind::level_scan;
    } else if (kind == "matrix_elements") {
        c.kind = ScenarioKind::matrix_elements;
    } else {
        c.kind = ScenarioKind::splitting_comparison;
    }
    echo("scenario.name", c.name);
    echo("scenario.description", c.description);
    echo("scenario.kind", kind);

    // [system]
    const bool scan_kind = c.kind == ScenarioKind::level_scan;
    const int n_c = r.integer("system", "n_c", scan_kind ? "8" : "6");
    const int n_m = r.integer("system", "n_m", scan_kind ? "24" : "14");
    if (n_c < 2) {
        throw ConfigError("system.n_c", "must be >= 2");
    }
    if (n_m < 2) {
        throw ConfigError("system.n_m", "must be >= 2");
    }
    c.params.dims = SpaceDims(n_c, n_m);
    c.params.omega_m = 1.0;
    c.include_dce = r.boolean("system", "include_dce", true);
    echo("system.n_c", std::to_string(n_c));
    echo("system.n_m", std::to_string(n_m));
    echo("system.include_dce", c.include_dce ? "true" : "false");

    const bool needs_g = c.kind != ScenarioKind::matrix_elements && c.kind != ScenarioKind::splitting_comparison;
    if (needs_g || r.has("system", "g")) {
        c.params.g = r.required("system", "g");
        if (c.params.g < 0.0) {
            throw ConfigError("system.g", "must be >= 0");
        }
        echo_num("system.g", c.params.g);
    }

    r.need_resonance = [&]() {
        if (!r.has("system", "resonance")) {
            return;
        }
        const auto [k, q] = parse_pair_int(r, "system", "resonance");
        if (q < 1 || k < q) {
            throw ConfigError("system.resonance", "need k >= q >= 1");
        }
        if (k >= n_m || 2 >= n_c) {
            throw ConfigError("system.resonance", "levels |0,k> and |2,k-q> do not fit in the truncation");
        }
        SystemParams p = c.params;
        p.g = r.required("system", "g");
        ResonanceInfo info;
        info.k = k;
        info.q = q;
        info.first_order = first_order_resonance(q, p);
        try {
            info.refined = locate_resonance(p, k, q);
        } catch (const Error& e) {
            throw ConfigError("system.resonance", e.what());
        }
        const double omega_analytic = casimir_rabi_splitting(SplittingQuery{k, q, p});
        c.resonance = info;
        r.set_resonance_symbols(info.refined.omega_c_star, info.half_splitting(), omega_analytic);
    };
    if (r.has("system", "resonance")) {
        r.need_resonance();
        echo("system.resonance", std::to_string(c.resonance->k) + "," + std::to_string(c.resonance->q));
    }

    if (r.has("system", "omega_c") || c.resonance) {
        c.params.omega_c = r.required("system", "omega_c", "omega_c0");
        if (!(c.params.omega_c > 0.0)) {
            throw ConfigError("system.omega_c", "must be > 0");
        }
        echo_num("system.omega_c", c.params.omega_c);
    } else if (c.kind == ScenarioKind::dynamics) {
        throw ConfigError("system.omega_c", "required key is missing (or set system.resonance)");
    }

    c.params.kappa = r.required("system", "kappa", "0");
    if (c.params.kappa < 0.0) {
        throw ConfigError("system.kappa", "must be >= 0");
    }
    c.params.gamma = r.required("system", "gamma", "0");
    if (c.params.gamma < 0.0) {
        throw ConfigError("system.gamma", "must be >= 0");
    }
    echo_num("system.kappa", c.params.kappa);
    echo_num("system.gamma", c.params.gamma);

    if (c.kind == ScenarioKind::dynamics) {
        // [drive]
        const std::string type = r.word("drive", "type", "off", {"off", "cw", "pulse"});
        const std::string target = r.word("drive", "target", "mirror", {"mirror", "cavity"});
        c.drive.target = target == "mirror" ? DriveTarget::mirror : DriveTarget::cavity;
        echo("drive.type", type);
        echo("drive.target", target);
        auto forbid = [&](std::initializer_list<const char*> keys) {
            for (const char* k : keys) {
                if (r.has("drive", k)) {
                    throw ConfigError(std::string("drive.") + k, "not used by drive.type = " + type);
                }
            }
        };
        if (type == "off") {
            forbid({"amplitude", "omega_d", "area", "sigma", "t0"});
        } else if (type == "cw") {
            forbid({"area", "sigma", "t0"});
            ContinuousWave cw;
            cw.amplitude = r.required("drive", "amplitude");
            cw.omega_d = r.required("drive", "omega_d", "1");
            if (!(cw.omega_d > 0.0)) {
                throw ConfigError("drive.omega_d", "must be > 0");
            }
            c.drive.variant = cw;
            echo_num("drive.amplitude", cw.amplitude);
            echo_num("drive.omega_d", cw.omega_d);
        } else {
            forbid({"amplitude"});
            GaussianPulse pulse;
            pulse.area = r.required("drive", "area");
            pulse.sigma = r.required("drive", "sigma");
            if (!(pulse.sigma > 0.0)) {
                throw ConfigError("drive.sigma", "must be > 0");
            }
            pulse.t0 = r.required("drive", "t0", "6*sigma");
            pulse.omega_d = r.required("drive", "omega_d", "1");
            if (!(pulse.omega_d > 0.0)) {
                throw ConfigError("drive.omega_d", "must be > 0");
            }
            c.drive.variant = pulse;
            echo_num("drive.area", pulse.area);
            echo_num("drive.sigma", pulse.sigma);
            echo_num("drive.t0", pulse.t0);
            echo_num("drive.omega_d", pulse.omega_d);
        }

        // [initial]
        c.initial = parse_initial(r.raw("initial", "state") ? *r.raw("initial", "state") : "ground");
        if (c.initial.kind == InitialState::Kind::bare_fock && (c.initial.n >= n_c || c.initial.k >= n_m)) {
            throw ConfigError("initial.state", "bare Fock state lies outside the truncation");
        }
        if (c.initial.kind == InitialState::Kind::eigenstate && c.initial.index >= c.params.dims.joint()) {
            throw ConfigError("initial.state", "eigenstate index exceeds the joint dimension");
        }
        echo("initial.state", c.initial.str());

        // [evolution]
        c.evolution.t_end = r.required("evolution", "t_end");
        if (!(c.evolution.t_end > 0.0)) {
            throw ConfigError("evolution.t_end", "must be > 0");
        }
        c.evolution.sample_dt = r.required("evolution", "sample_dt", "2*pi/40");
        if (!(c.evolution.sample_dt > 0.0) || c.evolution.sample_dt > c.evolution.t_end) {
            throw ConfigError("evolution.sample_dt", "must lie in (0, t_end]");
        }
        c.evolution.options.rtol = r.required("evolution", "rtol", "1e-6");
        c.evolution.options.atol = r.required("evolution", "atol", "1e-8");
        if (!(c.evolution.options.rtol > 0.0) || !(c.evolution.options.atol > 0.0)) {
            throw ConfigError("evolution.rtol", "tolerances must be > 0");
        }
        c.evolution.options.positivity_every = r.integer("evolution", "positivity_every", "50");
        if (c.evolution.options.positivity_every < 1) {
            throw ConfigError("evolution.positivity_every", "must be >= 1");
        }
        echo_num("evolution.t_end", c.evolution.t_end);
        echo_num("evolution.sample_dt", c.evolution.sample_dt);
        echo_num("evolution.rtol", c.evolution.options.rtol);
        echo_num("evolution.atol", c.evolution.options.atol);
        echo("evolution.positivity_every", std::to_string(c.evolution.options.positivity_every));

        // [retune]
        if (r.has("retune", "t_switch") || r.has("retune", "omega_c_new")) {
            RetuneSpec rt;
            const double requested = r.required("retune", "t_switch");
            const double dt = c.evolution.sample_dt;
            const double steps = std::round(requested / dt);
            rt.t_switch = steps * dt;
            if (steps < 1.0 || rt.t_switch >= c.evolution.t_end) {
                throw ConfigError("retune.t_switch", "must lie inside (0, t_end) on the sample grid");
            }
            rt.omega_c_new = r.required("retune", "omega_c_new");
            if (!(rt.omega_c_new > 0.0)) {
                throw ConfigError("retune.omega_c_new", "must be > 0");
            }
            c.retune = rt;
            echo_num("retune.t_switch", rt.t_switch);
            echo_num("retune.omega_c_new", rt.omega_c_new);
        }
    } else {
        for (const char* section : {"drive", "initial", "evolution", "retune"}) {
            for (const auto& s : doc.sections) {
                if (s.first == section && !s.second.empty()) {
                    throw ConfigError(std::string(section) + "." + s.second.front().key,
                                      "only used by dynamics scenarios");
                }
            }
        }
    }

    try {
        c.params.validate();
    } catch (const DomainError& e) {
        throw ConfigError("system", e.what());
    }

    // [analysis]
    AnalysisSettings& a = c.analysis;
    a.truncation_levels = r.integer("analysis", "truncation_levels", "20");
    if (a.truncation_levels < 1) {
        throw ConfigError("analysis.truncation_levels", "must be >= 1");
    }
    echo("analysis.truncation_levels", std::to_string(a.truncation_levels));
    if (c.kind == ScenarioKind::dynamics) {
        a.negativity = r.boolean("analysis", "negativity", true);
        a.steady_state = r.boolean("analysis", "steady_state", false);
        a.steady_periods = r.integer("analysis", "steady_periods", "20");
        if (a.steady_periods < 1) {
            throw ConfigError("analysis.steady_periods", "must be >= 1");
        }
        a.fft = r.boolean("analysis", "fft", false);
        const auto* pulse = std::get_if<GaussianPulse>(&c.drive.variant);
        const std::string t_start_default = pulse ? "t0 + 6*sigma" : "0";
        a.fft_t_start = r.required("analysis", "fft_t_start", t_start_default);
        if (a.fft && (a.fft_t_start < 0.0 || a.fft_t_start >= c.evolution.t_end)) {
            throw ConfigError("analysis.fft_t_start", "must lie inside [0, t_end)");
        }
        a.fft_window = r.word("analysis", "fft_window", "rectangular", {"rectangular", "hann"}) == "hann"
                           ? Window::hann
                           : Window::rectangular;
        a.fft_normalize = r.boolean("analysis", "fft_normalize", false);
        a.peak_threshold = r.required("analysis", "peak_threshold", "0.1");
        a.peak_omega_max = r.required("analysis", "peak_omega_max", "0.1");
        if (r.has("analysis", "flux_lab_omega_c_hz")) {
            a.flux_lab_omega_c_hz = r.required("analysis", "flux_lab_omega_c_hz");
            if (!(*a.flux_lab_omega_c_hz > 0.0)) {
                throw ConfigError("analysis.flux_lab_omega_c_hz", "must be > 0");
            }
        }
        a.flux_convention = r.word("analysis", "flux_convention", "cycles", {"cycles", "radians"}) == "cycles"
                                ? FluxConvention::cycles_per_second
                                : FluxConvention::radians_per_second;
        echo("analysis.negativity", a.negativity ? "true" : "false");
        echo("analysis.steady_state", a.steady_state ? "true" : "false");
        echo("analysis.steady_periods", std::to_string(a.steady_periods));
        echo("analysis.fft", a.fft ? "true" : "false");
        echo_num("analysis.fft_t_start", a.fft_t_start);
        echo("analysis.fft_window", a.fft_window == Window::hann ? "hann" : "rectangular");
        echo("analysis.fft_normalize", a.fft_normalize ? "true" : "false");
        echo_num("analysis.peak_threshold", a.peak_threshold);
        echo_num("analysis.peak_omega_max", a.peak_omega_max);
        if (a.flux_lab_omega_c_hz) {
            echo_num("analysis.flux_lab_omega_c_hz", *a.flux_lab_omega_c_hz);
        }
        echo("analysis.flux_convention",
             a.flux_convention == FluxConvention::cycles_per_second ? "cycles" : "radians");
    }
    if (c.kind == ScenarioKind::level_scan) {
        a.scan_min = r.required("analysis", "scan_min");
        a.scan_max = r.required("analysis", "scan_max");
        if (!(a.scan_min > 0.0) || !(a.scan_max > a.scan_min)) {
            throw ConfigError("analysis.scan_max", "need 0 < scan_min < scan_max");
        }
        a.scan_points = r.integer("analysis", "scan_points", "451");
        if (a.scan_points < 2) {
            throw ConfigError("analysis.scan_points", "must be >= 2");
        }
        a.scan_levels = r.integer("analysis", "scan_levels", "12");
        if (a.scan_levels < 1 || a.scan_levels > c.params.dims.joint()) {
            throw ConfigError("analysis.scan_levels", "must lie in [1, joint dimension]");
        }
        a.scan_compare = r.boolean("analysis", "scan_compare", false);
        echo_num("analysis.scan_min", a.scan_min);
        echo_num("analysis.scan_max", a.scan_max);
        echo("analysis.scan_points", std::to_string(a.scan_points));
        echo("analysis.scan_levels", std::to_string(a.scan_levels));
        echo("analysis.scan_compare", a.scan_compare ? "true" : "false");
        if (r.has("analysis", "splitting_levels")) {
            a.splitting_levels = parse_pair_int(r, "analysis", "splitting_levels");
            const auto [lo, hi] = *a.splitting_levels;
            if (lo < 0 || hi <= lo || hi >= c.params.dims.joint()) {
                throw ConfigError("analysis.splitting_levels", "need 0 <= lo < hi < joint dimension");
            }
            const std::vector<double> b = r.list("analysis", "splitting_bracket");
            if (b.size() != 2 || !(b[0] < b[1])) {
                throw ConfigError("analysis.splitting_bracket", "expected 'lo, hi' with lo < hi");
            }
            a.splitting_bracket = {b[0], b[1]};
            echo("analysis.splitting_levels", std::to_string(lo) + "," + std::to_string(hi));
            echo("analysis.splitting_bracket", format_value(b[0]) + "," + format_value(b[1]));
        }
    }
    if (c.kind == ScenarioKind::matrix_elements || c.kind == ScenarioKind::splitting_comparison) {
        a.q_values = r.int_list("analysis", "q_values");
        a.k_values = r.int_list("analysis", "k_values");
        a.g_values = r.list("analysis", "g_values");
        if (a.q_values.empty()) {
            throw ConfigError("analysis.q_values", "required key is missing");
        }
        if (a.k_values.empty()) {
            throw ConfigError("analysis.k_values", "required key is missing");
        }
        if (a.g_values.empty()) {
            throw ConfigError("analysis.g_values", "required key is missing");
        }
        for (int q : a.q_values) {
            if (q < 1) {
                throw ConfigError("analysis.q_values", "must be >= 1");
            }
        }
        for (int k : a.k_values) {
            if (k < 1 || k >= n_m) {
                throw ConfigError("analysis.k_values", "must lie in [1, n_m)");
            }
        }
        for (double g : a.g_values) {
            if (!(g > 0.0)) {
                throw ConfigError("analysis.g_values", "must be > 0");
            }
        }
        auto join = [](const auto& v) {
            std::string s;
            for (const auto& x : v) {
                s += (s.empty() ? "" : ",") + format_value(static_cast<double>(x));
            }
            return s;
        };
        echo("analysis.q_values", join(a.q_values));
        echo("analysis.k_values", join(a.k_values));
        echo("analysis.g_values", join(a.g_values));
    }

    // [output]
    const std::string* dir = r.raw("output", "dir");
    c.output_dir = dir ? std::filesystem::path(*dir) : std::filesystem::path("out") / c.name;
    c.populations = r.boolean("output", "populations", false);
    c.population_levels = r.integer("output", "population_levels", "10");
    if (c.populations && (c.population_levels < 1 || c.population_levels > c.params.dims.joint())) {
        throw ConfigError("output.population_levels", "must lie in [1, joint dimension]");
    }
    echo("output.dir", c.output_dir.string());
    echo("output.populations", c.populations ? "true" : "false");
    if (c.populations) {
        echo("output.population_levels", std::to_string(c.population_levels));
    }
    return c;
}

ScenarioConfig parse_config(const std::string& text, const Overrides& overrides) {
    ConfigDocument doc = parse_document(text);
    for (const std::string& o : overrides) {
        const auto eq = o.find('=');
        const auto dot = o.find('.');
        if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
            throw ConfigError(o, "override must look like section.key=value");
        }
        const std::string section = trim(o.substr(0, dot));
        const std::string key = trim(o.substr(dot + 1, eq - dot - 1));
        if (!valid_name(section) || !valid_name(key)) {
            throw ConfigError(o, "override must look like section.key=value");
        }
        doc.set(section, key, trim(o.substr(eq + 1)));
    }
    return parse_config(doc);
}

}  // namespace dce
