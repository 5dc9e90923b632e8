#include "spinsim/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace spinsim {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// schema: section -> allowed keys
const std::map<std::string, std::set<std::string>> kSchema = {
    {"device",
     {"e_z", "de_z", "j", "t1_1down", "t1_1up", "t1_2down", "t1_2up", "t2star_1down",
      "t2star_1up", "t2star_2down", "t2star_2up", "t2rabi_1down", "t2rabi_1up", "t2rabi_2down",
      "t2rabi_2up", "echo_exponent_1down", "echo_exponent_1up", "echo_exponent_2down",
      "echo_exponent_2up"}},
    {"drive", {"k", "f_r", "trotter_n"}},
    {"noise",
     {"kind", "sigma_f1", "sigma_f2", "sigma_j", "trace_path", "ou_sigma", "ou_tau_c", "seed"}},
    {"spam",
     {"init_error", "flip1_up_down", "flip1_down_up", "flip2_up_down", "flip2_down_up",
      "shots"}},
    {"rb",
     {"qubits", "target_qubit", "lengths", "sequences", "shots", "noise_repeats", "protocol",
      "interleave", "single_tone", "control", "mc_resamples", "use_spam", "inject_depol",
      "rabi_decay_channel"}},
    {"sweep",
     {"fr_list", "fr_min", "fr_max", "fr_points", "mode", "sequences", "noise_repeats",
      "lengths", "t2star", "sigma_j"}},
    {"tomo", {"state", "gates", "shots", "resamples", "noisy", "exact"}},
    {"algo", {"algorithm", "oracle", "noisy", "ensemble"}},
    {"coherence", {"transition", "kind", "ensemble", "detuning", "t_max", "points"}},
    {"estimate",
     {"f_true", "window", "grid", "t2star", "visibility", "shots_per_point", "cycles",
      "trace_path"}},
    {"run", {"seed", "threads", "out", "table_cache"}},
};

}  // namespace

Config Config::parse_string(const std::string& text, const std::string& origin) {
    Config c;
    c.origin_ = origin;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                         ": malformed section header '" + s + "'");
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty())
                throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                         ": empty section name");
            c.sections_[section];
            continue;
        }
        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": expected key = value, got '" + s + "'");
        if (section.empty())
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": key outside any [section]");
        std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": empty key");
        if (c.sections_[section].count(key))
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": duplicate key '" +
                                     section + "." + key + "'");
        c.sections_[section][key] = value;
        c.line_of_[section + "." + key] = lineno;
    }
    return c;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

const std::string* Config::find(const std::string& sec, const std::string& key) const {
    auto s = sections_.find(sec);
    if (s == sections_.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
}

bool Config::has(const std::string& sec, const std::string& key) const {
    return find(sec, key) != nullptr;
}

std::string Config::get_str(const std::string& sec, const std::string& key,
                            const std::string& fallback) const {
    const std::string* v = find(sec, key);
    return v ? *v : fallback;
}

double Config::get_double(const std::string& sec, const std::string& key, double fallback) const {
    const std::string* v = find(sec, key);
    if (!v) return fallback;
    if (*v == "inf") return std::numeric_limits<double>::infinity();
    char* end = nullptr;
    double x = std::strtod(v->c_str(), &end);
    if (end == v->c_str() || *end != '\0')
        throw std::runtime_error(origin_ + ":" + std::to_string(line_of_.at(sec + "." + key)) +
                                 ": '" + sec + "." + key + "' is not a number: " + *v);
    return x;
}

int Config::get_int(const std::string& sec, const std::string& key, int fallback) const {
    double x = get_double(sec, key, fallback);
    return static_cast<int>(std::llround(x));
}

std::uint64_t Config::get_u64(const std::string& sec, const std::string& key,
                              std::uint64_t fallback) const {
    const std::string* v = find(sec, key);
    if (!v) return fallback;
    return std::strtoull(v->c_str(), nullptr, 10);
}

bool Config::get_bool(const std::string& sec, const std::string& key, bool fallback) const {
    const std::string* v = find(sec, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw std::runtime_error(origin_ + ":" + std::to_string(line_of_.at(sec + "." + key)) +
                             ": '" + sec + "." + key + "' is not a boolean: " + *v);
}

std::vector<double> Config::get_list(const std::string& sec, const std::string& key) const {
    const std::string* v = find(sec, key);
    std::vector<double> out;
    if (!v) return out;
    std::istringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(std::strtod(item.c_str(), nullptr));
    }
    return out;
}

void Config::reject_unknown() const {
    for (const auto& [sec, keys] : sections_) {
        auto it = kSchema.find(sec);
        if (it == kSchema.end())
            throw std::runtime_error(origin_ + ": unknown section [" + sec + "]");
        for (const auto& [key, value] : keys) {
            (void)value;
            if (!it->second.count(key))
                throw std::runtime_error(origin_ + ":" +
                                         std::to_string(line_of_.at(sec + "." + key)) +
                                         ": unknown key '" + sec + "." + key + "'");
        }
    }
}

DeviceParams device_from_config(const Config& c) {
    DeviceParams p;
    p.E_Z = c.get_double("device", "e_z", p.E_Z);
    p.dE_Z = c.get_double("device", "de_z", p.dE_Z);
    p.J = c.get_double("device", "j", p.J);
    const char* names[4] = {"1down", "1up", "2down", "2up"};
    bool any = false;
    for (int i = 0; i < 4; ++i) {
        std::string n = names[i];
        if (c.has("device", "t2star_" + n) || c.has("device", "t2rabi_" + n) ||
            c.has("device", "t1_" + n) || c.has("device", "echo_exponent_" + n))
            any = true;
        p.T1[i] = c.get_double("device", "t1_" + n, p.T1[i]);
        p.T2star[i] = c.get_double("device", "t2star_" + n, p.T2star[i]);
        p.T2rabi[i] = c.get_double("device", "t2rabi_" + n, p.T2rabi[i]);
        p.echo_exponent[i] = c.get_double("device", "echo_exponent_" + n, p.echo_exponent[i]);
    }
    p.coherence_defaults = !any;
    return p;
}

NoiseModel noise_from_config(const Config& c, const DeviceParams& p, std::uint64_t seed) {
    NoiseModel m;
    m.seed = c.get_u64("noise", "seed", seed);
    std::string kind = c.get_str("noise", "kind", "quasistatic");
    if (kind == "quasistatic") {
        QuasiStaticGaussian qs;
        // sigma defaults calibrated from the device T2* (per-qubit mean)
        double t1 = (p.T2star[0] + p.T2star[1]) / 2.0;
        double t2 = (p.T2star[2] + p.T2star[3]) / 2.0;
        qs.sigma_f1 = c.get_double("noise", "sigma_f1", sigma_from_t2star(t1));
        qs.sigma_f2 = c.get_double("noise", "sigma_f2", sigma_from_t2star(t2));
        qs.sigma_J = c.get_double("noise", "sigma_j", 0.015);
        m.kind = qs;
    } else if (kind == "trace") {
        std::string path = c.get_str("noise", "trace_path", "");
        if (path.empty()) throw std::runtime_error("noise.kind = trace requires trace_path");
        m.kind = TraceReplay{load_trace(path)};
    } else if (kind == "ou") {
        OrnsteinUhlenbeck ou;
        ou.sigma = c.get_double("noise", "ou_sigma", 0.075);
        ou.tau_c = c.get_double("noise", "ou_tau_c", 10.0);
        m.kind = ou;
    } else if (kind == "none") {
        m.kind = QuasiStaticGaussian{0, 0, 0};
    } else {
        throw std::runtime_error("noise.kind must be quasistatic, trace, ou or none");
    }
    return m;
}

SpamConfig spam_from_config(const Config& c) {
    SpamConfig s;
    s.init_error = c.get_double("spam", "init_error", 0.02);
    s.flip_up_to_down[0] = c.get_double("spam", "flip1_up_down", 0.01);
    s.flip_down_to_up[0] = c.get_double("spam", "flip1_down_up", 0.01);
    s.flip_up_to_down[1] = c.get_double("spam", "flip2_up_down", 0.01);
    s.flip_down_to_up[1] = c.get_double("spam", "flip2_down_up", 0.01);
    s.shots = c.get_int("spam", "shots", 10000);
    return s;
}

TrotterConfig trotter_from_config(const Config& c) {
    TrotterConfig t;
    t.steps_per_halfpi = c.get_int("drive", "trotter_n", 1000);
    return t;
}

double round12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

}  // namespace spinsim
