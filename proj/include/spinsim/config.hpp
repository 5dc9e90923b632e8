#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "spinsim/benchmark.hpp"

namespace spinsim {

// Flat INI-style configuration: [section] blocks of key = value lines,
// '#' comments. Unknown keys are rejected against the schema at load time.
class Config {
  public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& sec, const std::string& key) const;
    std::string get_str(const std::string& sec, const std::string& key,
                        const std::string& fallback) const;
    double get_double(const std::string& sec, const std::string& key, double fallback) const;
    int get_int(const std::string& sec, const std::string& key, int fallback) const;
    bool get_bool(const std::string& sec, const std::string& key, bool fallback) const;
    std::vector<double> get_list(const std::string& sec, const std::string& key) const;
    std::uint64_t get_u64(const std::string& sec, const std::string& key,
                          std::uint64_t fallback) const;

    // throws naming the offending key and its line number
    void reject_unknown() const;

    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return sections_;
    }

  private:
    std::string origin_;
    std::map<std::string, std::map<std::string, std::string>> sections_;
    std::map<std::string, int> line_of_;  // "section.key" -> line number
    const std::string* find(const std::string& sec, const std::string& key) const;
};

// typed views assembled from the config (defaults = reference operating point)
DeviceParams device_from_config(const Config& c);
NoiseModel noise_from_config(const Config& c, const DeviceParams& p, std::uint64_t seed);
SpamConfig spam_from_config(const Config& c);
TrotterConfig trotter_from_config(const Config& c);

double round12(double x);  // 12 significant digits for serialized output

}  // namespace spinsim
