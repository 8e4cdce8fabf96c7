#include "phaselab/config.hpp"

#include "phaselab/shallow_net.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

namespace phaselab {

namespace {

const std::pair<ExperimentKind, const char*> kind_names[] = {
    {ExperimentKind::isotropic_sweep, "isotropic_sweep"}, {ExperimentKind::powerlaw_sweep, "powerlaw_sweep"},
    {ExperimentKind::landscape, "landscape"},             {ExperimentKind::ode_compare, "ode_compare"},
    {ExperimentKind::surgery, "surgery"},                 {ExperimentKind::texture_train, "texture_train"},
    {ExperimentKind::validate_stats, "validate_stats"},
};

std::string joined(const std::vector<std::string>& in) {
    std::string s;
    for (std::size_t i = 0; i < in.size(); ++i) s += (i ? "," : "") + in[i];
    return s;
}

template <class T>
T parse_scalar(const std::string& key, const std::string& s) {
    std::istringstream is(s);
    T v{};
    is >> v;
    if (is.fail() || !(is >> std::ws).eof()) throw ConfigError("config: cannot parse '" + s + "' for key " + key);
    return v;
}

bool parse_bool(const std::string& key, const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("config: expected a boolean for key " + key);
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::vector<std::string>& in) {
    std::vector<T> out;
    for (const auto& s : in)
        if (!s.empty()) out.push_back(parse_scalar<T>(key, s));
    return out;
}

// "powerlaw(1.5, 4)" or "isotropic"
SpectrumSpec parse_spectrum(const std::string& s, SpectrumSpec base) {
    const auto open = s.find('(');
    base.kind = s.substr(0, open);
    if (open != std::string::npos) {
        const auto close = s.find(')', open);
        if (close == std::string::npos) throw ConfigError("config: unbalanced parentheses in spectrum");
        std::string args = s.substr(open + 1, close - open - 1);
        std::replace(args.begin(), args.end(), ',', ' ');
        std::istringstream is(args);
        if (base.kind != "powerlaw" || !(is >> base.exponent >> base.top_modes))
            throw ConfigError("config: expected powerlaw(exponent, top_modes)");
    }
    if (base.kind != "isotropic" && base.kind != "extensive" && base.kind != "powerlaw" && base.kind != "explicit")
        throw ConfigError("config: unknown spectrum '" + s + "'");
    return base;
}

template <class T>
std::string list_text(const std::vector<T>& v) {
    std::ostringstream os;
    os << std::setprecision(17) << '[';
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << ']';
    return os.str();
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::vector<std::string>&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto one = [](const std::vector<std::string>& in, const std::string& key) {
            if (in.size() != 1) throw ConfigError("config: key " + key + " takes a single value");
            return in.front();
        };
#define PHASELAB_SCALAR(field, type)                                                                   \
    t[#field] = [one](ExperimentConfig& c, const std::string& k, const std::vector<std::string>& in) { \
        c.field = parse_scalar<type>(k, one(in, k));                                                   \
    }
#define PHASELAB_STRING(field) \
    t[#field] = [](ExperimentConfig& c, const std::string&, const std::vector<std::string>& in) { c.field = joined(in); }
        PHASELAB_SCALAR(n, int);
        PHASELAB_SCALAR(epsilon, double);
        PHASELAB_SCALAR(k0, int);
        PHASELAB_STRING(activation);
        PHASELAB_STRING(variant);
        PHASELAB_SCALAR(delta_scale, double);
        PHASELAB_SCALAR(beta, double);
        PHASELAB_SCALAR(steps, long);
        PHASELAB_SCALAR(cubic_factor, double);
        PHASELAB_SCALAR(record_every, long);
        PHASELAB_SCALAR(eta, double);
        PHASELAB_SCALAR(seeds, int);
        PHASELAB_SCALAR(seed_base, std::uint64_t);
        PHASELAB_SCALAR(grid, int);
        PHASELAB_SCALAR(n_mc, long);
        PHASELAB_SCALAR(uniformity_fail_epsilon, double);
        PHASELAB_STRING(regime);
        PHASELAB_SCALAR(a_k0, double);
        PHASELAB_SCALAR(dt, double);
        PHASELAB_STRING(corpus);
        PHASELAB_SCALAR(synth_length, int);
        PHASELAB_SCALAR(synth_per_class, int);
        PHASELAB_SCALAR(synth_exponent, double);
        PHASELAB_STRING(hidden_activation);
        PHASELAB_SCALAR(hidden, int);
        PHASELAB_SCALAR(lr, double);
        PHASELAB_SCALAR(epochs, int);
        PHASELAB_SCALAR(eval_points, int);
#undef PHASELAB_SCALAR
#undef PHASELAB_STRING
        t["kind"] = [one](ExperimentConfig& c, const std::string& k, const std::vector<std::string>& in) {
            c.kind = parse_kind(one(in, k));
        };
        t["corrector"] = [one](ExperimentConfig& c, const std::string& k, const std::vector<std::string>& in) {
            c.corrector = parse_bool(k, one(in, k));
        };
        t["ascent"] = [one](ExperimentConfig& c, const std::string& k, const std::vector<std::string>& in) {
            c.ascent = parse_bool(k, one(in, k));
        };
        t["spectrum"] = [](ExperimentConfig& c, const std::string&, const std::vector<std::string>& in) {
            c.spectrum = parse_spectrum(joined(in), c.spectrum);
        };
        t["principal_modes"] = [](ExperimentConfig& c, const std::string& k, const std::vector<std::string>& in) {
            c.principal_modes = parse_list<int>(k, in);
        };
        t["extensive_modes"] = [](ExperimentConfig& c, const std::string& k, const std::vector<std::string>& in) {
            c.spectrum.modes = parse_list<int>(k, in);
        };
        t["extensive_exponents"] = [](ExperimentConfig& c, const std::string& k, const std::vector<std::string>& in) {
            c.spectrum.exponents = parse_list<double>(k, in);
        };
        t["eigenvalues"] = [](ExperimentConfig& c, const std::string& k, const std::vector<std::string>& in) {
            c.spectrum.eigenvalues = parse_list<double>(k, in);
        };
        return t;
    }();
    return table;
}

}  // namespace

const char* kind_name(ExperimentKind k) {
    for (const auto& [kk, name] : kind_names)
        if (kk == k) return name;
    return "unknown";
}

ExperimentKind parse_kind(const std::string& s) {
    std::string t = s;
    std::replace(t.begin(), t.end(), '-', '_');
    for (const auto& [kk, name] : kind_names)
        if (t == name) return kk;
    throw ConfigError("config: unknown experiment kind '" + s + "'");
}

std::string ExperimentConfig::echo() const {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "kind = " << kind_name(kind) << "\n"
       << "n = " << n << "\nepsilon = " << epsilon << "\nk0 = " << k0 << "\ncorrector = " << (corrector ? "true" : "false")
       << "\n";
    os << "spectrum = \"" << spectrum.kind;
    if (spectrum.kind == "powerlaw") os << '(' << spectrum.exponent << ", " << spectrum.top_modes << ')';
    os << "\"\n";
    os << "extensive_modes = " << list_text(spectrum.modes) << "\nextensive_exponents = " << list_text(spectrum.exponents)
       << "\neigenvalues = " << list_text(spectrum.eigenvalues) << "\n";
    os << "activation = " << activation << "\nvariant = " << variant << "\ndelta_scale = " << delta_scale
       << "\nbeta = " << beta << "\nsteps = " << steps << "\ncubic_factor = " << cubic_factor
       << "\nrecord_every = " << record_every << "\neta = " << eta << "\nascent = " << (ascent ? "true" : "false")
       << "\nprincipal_modes = " << list_text(principal_modes) << "\nseeds = " << seeds << "\nseed_base = " << seed_base
       << "\n";
    os << "grid = " << grid << "\nn_mc = " << n_mc << "\nuniformity_fail_epsilon = " << uniformity_fail_epsilon << "\n";
    os << "regime = " << regime << "\na_k0 = " << a_k0 << "\ndt = " << dt << "\n";
    os << "corpus = \"" << corpus << "\"\nsynth_length = " << synth_length << "\nsynth_per_class = " << synth_per_class
       << "\nsynth_exponent = " << synth_exponent << "\nhidden_activation = " << hidden_activation
       << "\nhidden = " << hidden << "\nlr = " << lr << "\nepochs = " << epochs << "\neval_points = " << eval_points
       << "\n";
    return os.str();
}

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& m) { throw ConfigError("config: " + m); };
    if (n < 4) fail("n must be at least 4");
    if (k0 < 1 || 2 * k0 >= n) fail("k0 must lie in [1, n/2)");
    if (!(epsilon >= 0)) fail("epsilon must be non-negative");
    if (seeds < 1) fail("seeds must be at least 1");
    if (!(delta_scale > 0)) fail("delta_scale must be positive");
    if (beta < 0) fail("beta must be non-negative");
    if (variant != "spherical" && variant != "penalized") fail("variant must be spherical or penalized");
    if (grid < 3) fail("grid must be at least 3");
    if (n_mc < 1) fail("n_mc must be positive");
    if (!(dt > 0)) fail("dt must be positive");
    if (regime != "near_isotropic" && regime != "extensive" && regime != "beta_only")
        fail("regime must be near_isotropic, extensive or beta_only");
    if (eval_points < 1 || epochs < 0 || hidden < 1 || lr < 0) fail("invalid training settings");
    if (synth_length < 4 || synth_per_class < 2) fail("invalid synthetic corpus size");
    if (spectrum.kind == "extensive" && spectrum.modes.size() != spectrum.exponents.size())
        fail("extensive_modes and extensive_exponents differ in length");
    if (spectrum.kind == "explicit" && static_cast<int>(spectrum.eigenvalues.size()) != n)
        fail("eigenvalues must list n values");
    for (int m : spectrum.modes)
        if (m < 1 || 2 * m >= n) fail("extensive mode " + std::to_string(m) + " is not in [1, n/2)");
    for (int m : principal_modes)
        if (m < 1 || 2 * m >= n || m == k0) fail("principal mode " + std::to_string(m) + " is invalid");
    Activation::from_name(activation);
    Activation::from_name(hidden_activation);
}

long ExperimentConfig::budget() const {
    return steps >= 0 ? steps : std::lround(cubic_factor * std::pow(static_cast<double>(n), 3));
}

CirculantSpectrum ExperimentConfig::make_spectrum() const {
    if (spectrum.kind == "isotropic") return CirculantSpectrum::identity(n);
    if (spectrum.kind == "extensive") {
        std::vector<double> lam;
        for (double p : spectrum.exponents) lam.push_back(std::pow(static_cast<double>(n), p / 2.0));
        return CirculantSpectrum::with_modes(n, spectrum.modes, lam);
    }
    if (spectrum.kind == "powerlaw") return power_law_spectrum(n, spectrum.exponent);
    return CirculantSpectrum::from_eigenvalues(spectrum.eigenvalues);
}

std::vector<int> ExperimentConfig::tracked_modes() const {
    if (!principal_modes.empty()) return principal_modes;
    std::vector<int> out;
    if (spectrum.kind == "extensive") {
        for (int m : spectrum.modes)
            if (m != k0) out.push_back(m);
    } else if (spectrum.kind == "powerlaw") {
        for (int m = 1; 2 * m < n && static_cast<int>(out.size()) < spectrum.top_modes; ++m)
            if (m != k0) out.push_back(m);
    }
    return out;
}

ExperimentConfig parse_config(std::istream& is) {
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigTOML().from_config(is);
    } catch (const CLI::Error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    ExperimentConfig c;
    // The kind selects the defaults the remaining keys override.
    for (const auto& it : items)
        if (it.name == "kind" && it.parents.empty()) c = default_config(parse_kind(joined(it.inputs)));
    for (const auto& it : items) {
        if (it.name == "++" || it.name == "--" || it.name == "kind") continue;
        const auto key = it.fullname();
        const auto s = setters().find(key);
        if (s == setters().end()) throw ConfigError("config: unknown key '" + key + "'");
        s->second(c, key, it.inputs);
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open " + path.string());
    return parse_config(is);
}

ExperimentConfig default_config(ExperimentKind kind) {
    ExperimentConfig c;
    c.kind = kind;
    switch (kind) {
        case ExperimentKind::validate_stats:
            c.n_mc = 1'000'000;
            break;
        case ExperimentKind::isotropic_sweep:
            c.seeds = 40;
            c.cubic_factor = 8;
            break;
        case ExperimentKind::powerlaw_sweep:
            c.n = 128;
            c.spectrum.kind = "extensive";
            c.spectrum.modes = {6, 15, 24, 20, 9, 18};
            c.spectrum.exponents = {1.0, 1.2, 1.1, 1.3, 1.4, 0.9};
            c.delta_scale = 0.03;
            c.activation = "logcosh";
            c.cubic_factor = 1;
            c.seeds = 8;
            break;
        case ExperimentKind::landscape:
            c.grid = 41;
            c.n_mc = 20'000;
            break;
        case ExperimentKind::ode_compare:
            c.n = 128;
            c.variant = "penalized";
            c.activation = "logcosh";
            c.delta_scale = 0.03;
            c.beta = 0.1;
            c.spectrum.kind = "extensive";
            c.spectrum.modes = {6};
            c.spectrum.exponents = {1.0};
            c.cubic_factor = 0.25;
            c.seeds = 8;
            c.dt = 0.01;
            break;
        case ExperimentKind::surgery:
        case ExperimentKind::texture_train:
            c.k0 = 1;
            c.synth_length = 16;
            c.seeds = 8;
            break;
    }
    return c;
}

}  // namespace phaselab
