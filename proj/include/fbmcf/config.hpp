#pragma once

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "fbmcf/csv.hpp"

namespace fbmcf {

/// Effective configuration of a run. Flags override file values which
/// override the defaults below. Every output file echoes the full set
/// as `# key=value` header lines.
struct RunConfig {
    int dim = 2;
    double rho = 0.05;
    int grid = 400;                ///< profile nodes M (grid spacing 1/M)
    double cfl = 0.2;
    double stop_sin_theta = 0.9;
    double trace_interval = 1e-3;  ///< time between trace records
    int snapshot_every = 100;      ///< snapshot every K-th trace record
    double tol = 1e-12;            ///< root-finder tolerance (lambda0 etc.)
    double rho_max = 12.0;         ///< certified series range

    // Diagnostics tolerance overrides.
    double crude_tol = 1e-3;
    double ratio_tol = 5e-3;
    double drift_tol = 1e-6;
    double tv_tol = 5e-3;
    double fit_tol = 5e-3;
    double containment_tol = 1e-4;
    double shape_tol = 5e-3;
    double compare_tol = 1e-2;
    double align_height = 0.01;    ///< reference y_min for run alignment

    std::map<std::string, std::string> echo() const {
        std::map<std::string, std::string> m;
        m["dim"] = std::to_string(dim);
        m["rho"] = csv_number(rho);
        m["grid"] = std::to_string(grid);
        m["cfl"] = csv_number(cfl);
        m["stop_sin_theta"] = csv_number(stop_sin_theta);
        m["trace_interval"] = csv_number(trace_interval);
        m["snapshot_every"] = std::to_string(snapshot_every);
        m["tol"] = csv_number(tol);
        m["rho_max"] = csv_number(rho_max);
        m["crude_tol"] = csv_number(crude_tol);
        m["ratio_tol"] = csv_number(ratio_tol);
        m["drift_tol"] = csv_number(drift_tol);
        m["tv_tol"] = csv_number(tv_tol);
        m["fit_tol"] = csv_number(fit_tol);
        m["containment_tol"] = csv_number(containment_tol);
        m["shape_tol"] = csv_number(shape_tol);
        m["compare_tol"] = csv_number(compare_tol);
        m["align_height"] = csv_number(align_height);
        return m;
    }
};

namespace detail {

inline double parse_double(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: value for '" + key + "' is not a number: " + value);
    }
    if (pos != value.size())
        throw std::invalid_argument("config: trailing junk in value for '" + key + "': " + value);
    return x;
}

inline int parse_int(const std::string& key, const std::string& value) {
    const double x = parse_double(key, value);
    const int i = static_cast<int>(x);
    if (static_cast<double>(i) != x)
        throw std::invalid_argument("config: value for '" + key + "' must be an integer");
    return i;
}

}  // namespace detail

/// Apply a single key=value assignment; throws naming the key on unknown
/// keys or out-of-range values.
inline void config_set(RunConfig& cfg, const std::string& key, const std::string& value) {
    using detail::parse_double;
    using detail::parse_int;
    auto range_error = [&](const std::string& what) {
        throw std::out_of_range("config: '" + key + "' " + what);
    };

    if (key == "dim") {
        cfg.dim = parse_int(key, value);
        if (cfg.dim < 1 || cfg.dim > 10) range_error("must be in [1, 10]");
    } else if (key == "rho") {
        cfg.rho = parse_double(key, value);
        if (!(cfg.rho > 0.0 && cfg.rho <= 0.5)) range_error("must be in (0, 0.5]");
    } else if (key == "grid") {
        cfg.grid = parse_int(key, value);
        if (cfg.grid < 50) range_error("must be >= 50");
    } else if (key == "cfl") {
        cfg.cfl = parse_double(key, value);
        if (!(cfg.cfl > 0.0 && cfg.cfl <= 0.5)) range_error("must be in (0, 0.5]");
    } else if (key == "stop_sin_theta") {
        cfg.stop_sin_theta = parse_double(key, value);
        if (!(cfg.stop_sin_theta > 0.0 && cfg.stop_sin_theta < 1.0)) range_error("must be in (0, 1)");
    } else if (key == "trace_interval") {
        cfg.trace_interval = parse_double(key, value);
        if (!(cfg.trace_interval > 0.0)) range_error("must be > 0");
    } else if (key == "snapshot_every") {
        cfg.snapshot_every = parse_int(key, value);
        if (cfg.snapshot_every < 1) range_error("must be >= 1");
    } else if (key == "tol") {
        cfg.tol = parse_double(key, value);
        if (!(cfg.tol > 0.0)) range_error("must be > 0");
    } else if (key == "rho_max") {
        cfg.rho_max = parse_double(key, value);
        if (!(cfg.rho_max >= 4.0 && cfg.rho_max <= 30.0)) range_error("must be in [4, 30]");
    } else if (key == "crude_tol") {
        cfg.crude_tol = parse_double(key, value);
        if (!(cfg.crude_tol > 0.0)) range_error("must be > 0");
    } else if (key == "ratio_tol") {
        cfg.ratio_tol = parse_double(key, value);
        if (!(cfg.ratio_tol > 0.0)) range_error("must be > 0");
    } else if (key == "drift_tol") {
        cfg.drift_tol = parse_double(key, value);
        if (!(cfg.drift_tol > 0.0)) range_error("must be > 0");
    } else if (key == "tv_tol") {
        cfg.tv_tol = parse_double(key, value);
        if (!(cfg.tv_tol > 0.0)) range_error("must be > 0");
    } else if (key == "fit_tol") {
        cfg.fit_tol = parse_double(key, value);
        if (!(cfg.fit_tol > 0.0)) range_error("must be > 0");
    } else if (key == "containment_tol") {
        cfg.containment_tol = parse_double(key, value);
        if (!(cfg.containment_tol > 0.0)) range_error("must be > 0");
    } else if (key == "shape_tol") {
        cfg.shape_tol = parse_double(key, value);
        if (!(cfg.shape_tol > 0.0)) range_error("must be > 0");
    } else if (key == "compare_tol") {
        cfg.compare_tol = parse_double(key, value);
        if (!(cfg.compare_tol > 0.0)) range_error("must be > 0");
    } else if (key == "align_height") {
        cfg.align_height = parse_double(key, value);
        if (!(cfg.align_height > 0.0 && cfg.align_height < 1.0)) range_error("must be in (0, 1)");
    } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

/// Read a key=value file ('#' comments, blank lines allowed) into cfg.
inline void config_load_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: unreadable file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: missing '=' at " + path + ":" +
                                        std::to_string(lineno));
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        config_set(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

}  // namespace fbmcf
