#include "cwkb/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace cwkb {

namespace {

const std::set<std::string> known_keys = {
    "potential.coefficients", "potential.roots", "potential.leading", "potential.family",
    "potential.params", "output.dir", "spectrum.lambda_max", "spectrum.tol_eig",
    "spectrum.series_tol", "spectrum.cutoff", "spectrum.parity", "zeros.region", "zeros.index",
    "zeros.residual_tol", "zeros.kappa", "zeros.arc_mass", "graph.tol_line", "graph.bound_radius",
    "density.delta", "density.count", "density.ratio", "calibrate.target", "calibrate.free_index",
    "calibrate.tol",
};

std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text)
{
    std::string t = trim(text);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
        throw ConfigError(key, "expected a finite number, got '" + text + "'");
    return v;
}

int parse_int(const std::string& key, const std::string& text)
{
    std::string t = trim(text);
    int v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw ConfigError(key, "expected an integer, got '" + text + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& text)
{
    std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes")
        return true;
    if (t == "false" || t == "0" || t == "no")
        return false;
    throw ConfigError(key, "expected true or false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_double(key, item));
    if (out.empty())
        throw ConfigError(key, "empty list");
    return out;
}

std::string list_text(const std::vector<double>& v)
{
    std::string out;
    char buf[32];
    for (std::size_t k = 0; k < v.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", v[k]);
        out += (k ? "," : "") + std::string(buf);
    }
    return out;
}

double positive(const std::string& key, double v)
{
    if (!(v > 0.0))
        throw ConfigError(key, "must be positive");
    return v;
}

PotentialSpec parse_potential(const Settings& s)
{
    auto get = [&](const std::string& k) -> const std::string* {
        auto it = s.find(k);
        return it == s.end() ? nullptr : &it->second;
    };
    const std::string* coeffs = get("potential.coefficients");
    const std::string* roots = get("potential.roots");
    const std::string* family = get("potential.family");
    int given = (coeffs != nullptr) + (roots != nullptr) + (family != nullptr && get("potential.params"));
    if (given == 0)
        throw ConfigError("potential", "one of coefficients, roots, or family with params is required");
    if (given > 1)
        throw ConfigError("potential", "give exactly one of coefficients, roots, or family with params");

    PotentialSpec spec;
    try {
        if (coeffs) {
            auto c = parse_list("potential.coefficients", *coeffs);
            spec.poly = Poly::real(c);
            spec.text = "coefficients " + list_text(c);
        } else if (roots) {
            auto r = parse_list("potential.roots", *roots);
            double lead = get("potential.leading") ? parse_double("potential.leading", *get("potential.leading")) : 1.0;
            std::vector<cplx> rc(r.begin(), r.end());
            spec.poly = Poly::from_roots(rc, lead);
            spec.roots = r;
            spec.text = "roots " + list_text(r);
        } else {
            auto pr = parse_list("potential.params", *get("potential.params"));
            Family f;
            try {
                f = parse_family(trim(*family));
            } catch (const std::exception& e) {
                throw ConfigError("potential.family", e.what());
            }
            spec.poly = family_poly(f, pr);
            spec.family = f;
            spec.family_params = pr;
            if (f == Family::nonsymmetric_double_well)
                spec.roots = pr;
            spec.text = to_string(f) + " " + list_text(pr);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("potential", e.what());
    }
    // a family name alongside explicit coefficients labels the prediction only
    if (family && !spec.family) {
        try {
            spec.family = parse_family(trim(*family));
        } catch (const std::exception&) {
            spec.family.reset();
        }
    }
    return spec;
}

}  // namespace

Settings read_settings(const std::string& path)
{
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(path, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("config", e.what());
    }
    Settings out;
    for (const auto& [section, body] : tree) {
        if (body.empty())
            throw ConfigError(section, "key outside of a section");
        for (const auto& [key, value] : body)
            out[section + "." + key] = trim(value.data());
    }
    return out;
}

void apply_override(Settings& s, const std::string& assignment)
{
    auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError(assignment, "expected section.key=value");
    s[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

std::uint64_t settings_digest(const Settings& s)
{
    std::uint64_t h = 14695981039346656037ull;
    auto feed = [&](const std::string& t) {
        for (unsigned char c : t) {
            h ^= c;
            h *= 1099511628211ull;
        }
    };
    for (const auto& [k, v] : s)
        feed(k + "=" + v + "\n");
    return h;
}

std::string digest_hex(std::uint64_t d)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(d));
    return buf;
}

RunConfig resolve(const std::string& command, const Settings& s)
{
    for (const auto& [k, v] : s)
        if (!known_keys.count(k))
            throw ConfigError(k, "unknown key");

    RunConfig cfg;
    cfg.command = command;
    cfg.settings = s;
    Settings tagged = s;
    tagged["command"] = command;
    tagged.erase("output.dir");
    cfg.digest = settings_digest(tagged);

    auto num = [&](const std::string& k, double& dst) {
        if (auto it = s.find(k); it != s.end())
            dst = parse_double(k, it->second);
    };
    auto integer = [&](const std::string& k, int& dst) {
        if (auto it = s.find(k); it != s.end())
            dst = parse_int(k, it->second);
    };

    if (auto it = s.find("output.dir"); it != s.end())
        cfg.out_dir = it->second;

    num("spectrum.lambda_max", cfg.lambda_max);
    num("spectrum.tol_eig", cfg.tol_eig);
    positive("spectrum.tol_eig", cfg.tol_eig);
    num("spectrum.series_tol", cfg.series_tol);
    positive("spectrum.series_tol", cfg.series_tol);
    num("spectrum.cutoff", cfg.cutoff);
    if (cfg.cutoff < 0.0)
        throw ConfigError("spectrum.cutoff", "must be non-negative");
    if (auto it = s.find("spectrum.parity"); it != s.end())
        cfg.use_parity = parse_bool("spectrum.parity", it->second);

    if (auto it = s.find("zeros.region"); it != s.end()) {
        auto r = parse_list("zeros.region", it->second);
        if (r.size() != 4)
            throw ConfigError("zeros.region", "expected x0,x1,y0,y1");
        if (!(r[1] > r[0]) || !(r[3] > r[2]))
            throw ConfigError("zeros.region", "region must be nonempty");
        cfg.region = Box{r[0], r[1], r[2], r[3]};
    }
    if (auto it = s.find("zeros.index"); it != s.end()) {
        cfg.index = parse_int("zeros.index", it->second);
        if (*cfg.index < 0)
            throw ConfigError("zeros.index", "must be non-negative");
    }
    num("zeros.residual_tol", cfg.residual_tol);
    positive("zeros.residual_tol", cfg.residual_tol);
    num("zeros.kappa", cfg.kappa);
    if (cfg.kappa < 0.0)
        throw ConfigError("zeros.kappa", "must be non-negative");
    num("zeros.arc_mass", cfg.arc_mass);
    if (cfg.arc_mass < 0.0)
        throw ConfigError("zeros.arc_mass", "must be non-negative");

    num("graph.tol_line", cfg.tol_line);
    positive("graph.tol_line", cfg.tol_line);
    num("graph.bound_radius", cfg.bound_radius);
    if (cfg.bound_radius < 0.0)
        throw ConfigError("graph.bound_radius", "must be non-negative");

    num("density.delta", cfg.delta);
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
        throw ConfigError("density.delta", "must lie in (0, 1)");
    integer("density.count", cfg.count);
    if (cfg.count < 100)
        throw ConfigError("density.count", "must be at least 100");
    if (auto it = s.find("density.ratio"); it != s.end())
        cfg.ratio = positive("density.ratio", parse_double("density.ratio", it->second));

    num("calibrate.target", cfg.target);
    integer("calibrate.free_index", cfg.free_index);
    if (cfg.free_index < 0 || cfg.free_index > 3)
        throw ConfigError("calibrate.free_index", "must be 0..3");
    num("calibrate.tol", cfg.calibrate_tol);
    positive("calibrate.tol", cfg.calibrate_tol);

    const bool has_potential = s.count("potential.coefficients") || s.count("potential.roots") ||
                               s.count("potential.params");
    if (has_potential || command != "density")
        cfg.potential = parse_potential(s);

    if (command == "spectrum" || command == "zeros") {
        if (!(cfg.lambda_max > 0.0))
            throw ConfigError("spectrum.lambda_max", "required and must be positive");
    }
    if (command == "zeros" && !cfg.region)
        throw ConfigError("zeros.region", "required");
    if (command == "density" || command == "calibrate") {
        if (!cfg.potential || cfg.potential->roots.size() != 4)
            throw ConfigError("potential.roots", "four real roots of a double well are required");
        const auto& r = cfg.potential->roots;
        if (!(r[0] < r[1] && r[1] < r[2] && r[2] < r[3]))
            throw ConfigError("potential.roots", "roots must be strictly increasing");
    }
    if (command == "calibrate" && !(cfg.target > 0.0))
        throw ConfigError("calibrate.target", "required and must be positive");
    return cfg;
}

}  // namespace cwkb
