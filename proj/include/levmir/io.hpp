#pragma once

// Config loading and deterministic file output for the sweep drivers.
//
// Config files are flat JSON objects.  Scalar physics keys:
//   L_m, lambda_L_m, kappa_rad_s, Gamma_rad_s, g_m_s2 (default 9.81),
//   p_tilde, m_ref_kg (default 1e-3), c_m_s (default 3e8).
// Grid keys follow the pattern <name>_min/_max/_count/_scale with
// scale "lin" or "log": p_tilde_min..., omega_min_rad_s...,
// kappa_min_rad_s..., Gamma_min_rad_s....  A scalar p_tilde and a p_tilde
// grid are mutually exclusive.
//
// Output rules that make reruns byte-identical: shortest round-trip float
// formatting (std::to_chars), fixed row order, fixed metadata key order,
// '\n' line endings, no timestamps.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "levmir/params.hpp"
#include "levmir/steady_state.hpp"

namespace levmir {

// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

struct grid_spec {
    double lo = 0.0;
    double hi = 0.0;
    int count = 0;
    bool log_scale = true;
};

// linspace/logspace semantics: count-1 equal steps, last point set to the
// endpoint exactly (in log space for log grids).
inline std::vector<double> generate(const grid_spec& g) {
    std::vector<double> v(static_cast<std::size_t>(g.count));
    if (g.count == 1) {
        v[0] = g.lo;
        return v;
    }
    const double a = g.log_scale ? std::log10(g.lo) : g.lo;
    const double b = g.log_scale ? std::log10(g.hi) : g.hi;
    const double step = (b - a) / (g.count - 1);
    for (int k = 0; k < g.count; ++k) {
        const double x = a + k * step;
        v[static_cast<std::size_t>(k)] = g.log_scale ? std::pow(10.0, x) : x;
    }
    // The log path round-trips through log10/pow, which can cost an ulp;
    // callers rely on the requested bounds appearing verbatim.
    v.front() = g.lo;
    v.back() = g.hi;
    return v;
}

enum class sweep_kind { steady_state, stability_map, entanglement, variance };

inline const char* to_string(sweep_kind k) {
    switch (k) {
        case sweep_kind::steady_state: return "steady-state";
        case sweep_kind::stability_map: return "stability-map";
        case sweep_kind::entanglement: return "entangle-sweep";
        default: return "variance-sweep";
    }
}

struct sweep_config {
    system_params params;                 // params.p_tilde used when p_grid is absent
    std::optional<grid_spec> p_grid;
    std::optional<grid_spec> omega_grid;  // default derived from the first usable branch
    std::optional<grid_spec> kappa_grid;  // stability maps only
    std::optional<grid_spec> Gamma_grid;
    branch_label branch = branch_label::blue;
    int threads = 1;
};

namespace detail {

inline double require_number(const nlohmann::json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key)) throw std::runtime_error(path + ": missing required key '" + key + "'");
    if (!j.at(key).is_number()) throw std::runtime_error(path + ": key '" + key + "' must be a number");
    return j.at(key).get<double>();
}

inline double number_or(const nlohmann::json& j, const std::string& key, double fallback,
                        const std::string& path) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw std::runtime_error(path + ": key '" + key + "' must be a number");
    return j.at(key).get<double>();
}

// Reads <base>_min/_max/_count/_scale if the _min key is present.
inline std::optional<grid_spec> read_grid(const nlohmann::json& j, const std::string& base,
                                          const std::string& unit_suffix, const std::string& path) {
    const std::string kmin = base + "_min" + unit_suffix;
    if (!j.contains(kmin)) return std::nullopt;
    grid_spec g;
    g.lo = require_number(j, kmin, path);
    g.hi = require_number(j, base + "_max" + unit_suffix, path);
    const double cnt = number_or(j, base + "_count", 0.0, path);
    if (!(cnt >= 1.0) || cnt != std::floor(cnt)) {
        throw std::runtime_error(path + ": key '" + base + "_count' must be an integer >= 1");
    }
    g.count = static_cast<int>(cnt);
    const std::string scale = j.value(base + "_scale", std::string("log"));
    if (scale == "log") {
        g.log_scale = true;
    } else if (scale == "lin") {
        g.log_scale = false;
    } else {
        throw std::runtime_error(path + ": key '" + base + "_scale' must be \"lin\" or \"log\"");
    }
    if (!(g.lo <= g.hi)) throw std::runtime_error(path + ": grid '" + base + "' range must be ordered");
    if (g.log_scale && !(g.lo > 0.0)) {
        throw std::runtime_error(path + ": log grid '" + base + "' requires positive bounds");
    }
    return g;
}

} // namespace detail

inline sweep_config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open config file");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path + ": JSON parse error: " + e.what());
    }
    if (!j.is_object()) throw std::runtime_error(path + ": config root must be a JSON object");

    sweep_config cfg;
    cfg.params.L = detail::require_number(j, "L_m", path);
    cfg.params.lambda_L = detail::require_number(j, "lambda_L_m", path);
    cfg.params.kappa = detail::require_number(j, "kappa_rad_s", path);
    cfg.params.Gamma = detail::require_number(j, "Gamma_rad_s", path);
    cfg.params.g = detail::number_or(j, "g_m_s2", 9.81, path);
    cfg.params.m_ref = detail::number_or(j, "m_ref_kg", 1.0e-3, path);
    cfg.params.consts.c = detail::number_or(j, "c_m_s", cfg.params.consts.c, path);

    cfg.p_grid = detail::read_grid(j, "p_tilde", "", path);
    if (cfg.p_grid && j.contains("p_tilde")) {
        throw std::runtime_error(path + ": give either p_tilde or a p_tilde_min/_max grid, not both");
    }
    if (cfg.p_grid) {
        cfg.params.p_tilde = cfg.p_grid->lo;  // placeholder so validate() passes
    } else {
        cfg.params.p_tilde = detail::require_number(j, "p_tilde", path);
    }
    cfg.omega_grid = detail::read_grid(j, "omega", "_rad_s", path);
    cfg.kappa_grid = detail::read_grid(j, "kappa", "_rad_s", path);
    cfg.Gamma_grid = detail::read_grid(j, "Gamma", "_rad_s", path);

    try {
        cfg.params.validate();
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return cfg;
}

// Tabular output with '#' metadata lines, one header row, then data rows.
struct table_output {
    std::vector<std::pair<std::string, std::string>> metadata;  // emitted in insertion order
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    nlohmann::json summary;
};

inline void append_params_metadata(table_output& t, const system_params& p) {
    t.metadata.emplace_back("L_m", format_double(p.L));
    t.metadata.emplace_back("lambda_L_m", format_double(p.lambda_L));
    t.metadata.emplace_back("kappa_rad_s", format_double(p.kappa));
    t.metadata.emplace_back("Gamma_rad_s", format_double(p.Gamma));
    t.metadata.emplace_back("g_m_s2", format_double(p.g));
    t.metadata.emplace_back("m_ref_kg", format_double(p.m_ref));
    t.metadata.emplace_back("c_m_s", format_double(p.consts.c));
}

// Metadata keys mirror the config key pattern: <base>_min<unit>, ...,
// <base>_count, <base>_scale.
inline void append_grid_metadata(table_output& t, const std::string& base,
                                 const std::string& unit_suffix, const grid_spec& g) {
    t.metadata.emplace_back(base + "_min" + unit_suffix, format_double(g.lo));
    t.metadata.emplace_back(base + "_max" + unit_suffix, format_double(g.hi));
    t.metadata.emplace_back(base + "_count", std::to_string(g.count));
    t.metadata.emplace_back(base + "_scale", g.log_scale ? "log" : "lin");
}

inline std::string render_csv(const table_output& t) {
    std::ostringstream out;
    for (const auto& [k, v] : t.metadata) out << "# " << k << "=" << v << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        out << t.columns[i] << (i + 1 < t.columns.size() ? "," : "");
    }
    out << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << row[i] << (i + 1 < row.size() ? "," : "");
        }
        out << "\n";
    }
    return out.str();
}

inline std::filesystem::path summary_path_for(const std::filesystem::path& csv_path) {
    std::filesystem::path p = csv_path;
    p.replace_extension();
    p += ".summary.json";
    return p;
}

// Writes <out> (CSV) and the sibling <out stem>.summary.json.
inline void write_outputs(const std::filesystem::path& csv_path, const table_output& t) {
    {
        std::ofstream f(csv_path, std::ios::binary);
        if (!f) throw std::runtime_error(csv_path.string() + ": cannot open for writing");
        f << render_csv(t);
        if (!f) throw std::runtime_error(csv_path.string() + ": write failed");
    }
    {
        const auto sp = summary_path_for(csv_path);
        std::ofstream f(sp, std::ios::binary);
        if (!f) throw std::runtime_error(sp.string() + ": cannot open for writing");
        f << t.summary.dump(2) << "\n";
        if (!f) throw std::runtime_error(sp.string() + ": write failed");
    }
}

} // namespace levmir
