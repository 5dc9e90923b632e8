#include "spinsim/noise.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spinsim {

bool NoiseModel::is_trivial() const {
    if (auto* qs = std::get_if<QuasiStaticGaussian>(&kind))
        return qs->sigma_f1 == 0 && qs->sigma_f2 == 0 && qs->sigma_J == 0;
    if (auto* ou = std::get_if<OrnsteinUhlenbeck>(&kind)) return ou->sigma == 0;
    return false;
}

namespace {
NoiseSample from_qubit_offsets(double df1, double df2, double dJ) {
    NoiseSample s;
    s.dEz = (df1 + df2) / 2.0;
    s.ddEz = df2 - df1;
    s.dJ = dJ;
    return s;
}
}  // namespace

NoiseSample draw_sample(const NoiseModel& model, std::uint64_t shot_index) {
    if (auto* qs = std::get_if<QuasiStaticGaussian>(&model.kind)) {
        Rng rng = Rng::stream(model.seed, RngStream::noise, {shot_index});
        double d1 = qs->sigma_f1 * rng.gauss();
        double d2 = qs->sigma_f2 * rng.gauss();
        double dJ = qs->sigma_J * rng.gauss();
        return from_qubit_offsets(d1, d2, dJ);
    }
    if (auto* tr = std::get_if<TraceReplay>(&model.kind)) {
        if (tr->trace.size() == 0)
            throw std::invalid_argument("draw_sample: empty noise trace");
        std::size_t i = shot_index % tr->trace.size();
        return from_qubit_offsets(tr->trace.df1_mhz[i], tr->trace.df2_mhz[i],
                                  2.0 * tr->trace.djhalf_mhz[i]);
    }
    const auto& ou = std::get<OrnsteinUhlenbeck>(model.kind);
    Rng rng = Rng::stream(model.seed, RngStream::noise, {shot_index});
    return from_qubit_offsets(ou.sigma * rng.gauss(), ou.sigma * rng.gauss(), 0.0);
}

double sigma_from_t2star(double t2star_us) {
    if (!(t2star_us > 0)) throw std::invalid_argument("sigma_from_t2star: T2* must be > 0");
    return std::sqrt(2.0) / (kTwoPi * t2star_us);
}

double t2star_from_sigma(double sigma_mhz) {
    if (!(sigma_mhz > 0)) throw std::invalid_argument("t2star_from_sigma: sigma must be > 0");
    return std::sqrt(2.0) / (kTwoPi * sigma_mhz);
}

NoiseTrace load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_trace: cannot open " + path);
    NoiseTrace t;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (lineno == 1) {
            if (line != "time_s,df1_mhz,df2_mhz,djhalf_mhz")
                throw std::runtime_error("load_trace: " + path + ":1: bad header '" + line + "'");
            continue;
        }
        std::istringstream ss(line);
        double v[4];
        char comma;
        for (int i = 0; i < 4; ++i) {
            if (!(ss >> v[i]))
                throw std::runtime_error("load_trace: " + path + ":" + std::to_string(lineno) +
                                         ": expected 4 numeric fields");
            if (i < 3 && !(ss >> comma && comma == ','))
                throw std::runtime_error("load_trace: " + path + ":" + std::to_string(lineno) +
                                         ": expected comma after field " + std::to_string(i + 1));
        }
        if (!t.time_s.empty() && v[0] <= t.time_s.back())
            throw std::runtime_error("load_trace: " + path + ":" + std::to_string(lineno) +
                                     ": times must be strictly increasing");
        t.time_s.push_back(v[0]);
        t.df1_mhz.push_back(v[1]);
        t.df2_mhz.push_back(v[2]);
        t.djhalf_mhz.push_back(v[3]);
    }
    if (t.size() == 0) throw std::runtime_error("load_trace: " + path + ": no data rows");
    return t;
}

void save_trace(const NoiseTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_trace: cannot open " + path);
    out << "time_s,df1_mhz,df2_mhz,djhalf_mhz\n";
    char buf[128];
    for (std::size_t i = 0; i < trace.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g\n", trace.time_s[i],
                      trace.df1_mhz[i], trace.df2_mhz[i], trace.djhalf_mhz[i]);
        out << buf;
    }
}

double ou_step(double x, double sigma, double tau_c, double dt, Rng& rng) {
    double a = std::exp(-dt / tau_c);
    return x * a + sigma * std::sqrt(1.0 - a * a) * rng.gauss();
}

NoiseTrace ou_trace(const OrnsteinUhlenbeck& ou, double duration_us, double dt_us,
                    std::uint64_t seed, std::uint64_t path_index) {
    if (!(ou.tau_c > 0)) throw std::invalid_argument("ou_trace: tau_c must be > 0");
    if (!(dt_us > 0)) throw std::invalid_argument("ou_trace: dt must be > 0");
    Rng rng = Rng::stream(seed, RngStream::ou_path, {path_index});
    std::size_t n = static_cast<std::size_t>(std::floor(duration_us / dt_us)) + 1;
    NoiseTrace t;
    t.time_s.reserve(n);
    double x1 = ou.sigma * rng.gauss();
    double x2 = ou.sigma * rng.gauss();
    for (std::size_t i = 0; i < n; ++i) {
        t.time_s.push_back(i * dt_us * 1e-6);
        t.df1_mhz.push_back(x1);
        t.df2_mhz.push_back(x2);
        t.djhalf_mhz.push_back(0.0);
        x1 = ou_step(x1, ou.sigma, ou.tau_c, dt_us, rng);
        x2 = ou_step(x2, ou.sigma, ou.tau_c, dt_us, rng);
    }
    return t;
}

}  // namespace spinsim
