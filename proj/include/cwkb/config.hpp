#pragma once

#include "cwkb/limits.hpp"
#include "cwkb/poly.hpp"
#include "cwkb/zeros.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cwkb {

inline constexpr const char* tool_version = "0.1.0";

// Invalid or missing configuration; names the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key + ": " + what), key_(std::move(key))
    {
    }
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

// Flat "section.key" -> value view of an INI-style file plus overrides.
using Settings = std::map<std::string, std::string>;

Settings read_settings(const std::string& path);
// key=value with key of the form section.key
void apply_override(Settings& s, const std::string& assignment);

// FNV-1a over the canonical "key=value\n" listing (map order)
std::uint64_t settings_digest(const Settings& s);
std::string digest_hex(std::uint64_t d);

struct PotentialSpec {
    Poly poly;
    std::string text;  // canonical description for exports
    std::optional<Family> family;
    std::vector<double> family_params;
    std::vector<double> roots;  // real roots when given in factored form
};

struct RunConfig {
    std::string command;
    std::optional<PotentialSpec> potential;
    std::string out_dir = ".";

    double lambda_max = 0.0;
    double tol_eig = 1e-9;
    double series_tol = 1e-15;
    double cutoff = 0.0;
    bool use_parity = true;

    std::optional<Box> region;
    std::optional<int> index;  // eigenvalue index for zeros; default the last one
    double residual_tol = 1e-10;
    double kappa = 10.0;
    double arc_mass = 0.0;

    double tol_line = 1e-6;
    double bound_radius = 0.0;

    double delta = 0.1;
    int count = 500;
    std::optional<double> ratio;  // calibrate the roots to this ratio before density runs

    double target = 0.0;
    int free_index = 3;
    double calibrate_tol = 1e-10;

    Settings settings;
    std::uint64_t digest = 0;
};

// Validates every key; throws ConfigError.
RunConfig resolve(const std::string& command, const Settings& s);

}  // namespace cwkb
