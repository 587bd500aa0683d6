#pragma once

// Batch drivers behind the CLI subcommands: steady-state report,
// stability map, entanglement sweep, variance sweep.
//
// Grid cells are independent, so they run on a worker pool that claims
// indices from an atomic counter and writes into a pre-sized result
// buffer.  Rows are assembled from that buffer in grid order afterwards,
// which makes the output independent of thread count and completion
// order.  Cell-level failures are recorded as row status codes; only
// config-level problems throw out of the drivers.

#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "levmir/gaussian_state.hpp"
#include "levmir/io.hpp"
#include "levmir/linearization.hpp"
#include "levmir/params.hpp"
#include "levmir/spectra.hpp"
#include "levmir/steady_state.hpp"

namespace levmir {

enum class row_status { ok, no_steady_state, unstable, numerical_error };

inline const char* to_string(row_status s) {
    switch (s) {
        case row_status::ok: return "ok";
        case row_status::no_steady_state: return "no_steady_state";
        case row_status::unstable: return "unstable";
        default: return "numerical_error";
    }
}

namespace detail {

constexpr double row_nan = std::numeric_limits<double>::quiet_NaN();

// fn(i) must not throw; drivers catch per cell.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    std::size_t width = threads < 1 ? 1 : static_cast<std::size_t>(threads);
    width = std::min(width, n);
    if (width <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(width - 1);
    for (std::size_t t = 0; t + 1 < width; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
}

// Formatted cell helpers: empty string = field not populated.
inline std::string cell(double v) { return std::isnan(v) ? std::string() : format_double(v); }

struct branch_prep {
    row_status status = row_status::ok;
    bool has_model = false;
    steady_state_branch branch{};
    linearized_model model{};
    double max_real_part = row_nan;
};

inline branch_prep prepare_branch(system_params p, double p_tilde, branch_label which) {
    p.p_tilde = p_tilde;
    branch_prep out;
    try {
        const auto pair = solve_branches(p);
        out.branch = which == branch_label::blue ? pair.blue : pair.red;
        out.model = linearize(out.branch, p);
        out.has_model = true;
        const auto v = stability(out.model);
        out.max_real_part = v.max_real_part;
        out.status = v.stable ? row_status::ok : row_status::unstable;
    } catch (const no_real_steady_state&) {
        out.status = row_status::no_steady_state;
    } catch (const std::exception&) {
        out.status = row_status::numerical_error;
    }
    return out;
}

inline std::vector<double> p_tilde_values(const sweep_config& cfg) {
    if (cfg.p_grid) return generate(*cfg.p_grid);
    return {cfg.params.p_tilde};
}

inline void append_p_metadata(table_output& t, const sweep_config& cfg) {
    if (cfg.p_grid) {
        append_grid_metadata(t, "p_tilde", "", *cfg.p_grid);
    } else {
        t.metadata.emplace_back("p_tilde", format_double(cfg.params.p_tilde));
    }
}

// Default sideband grid when the config gives none: log-spaced over
// [1e-2 Omega_M, 1e3 g_C], 400 points, anchored at the first p_tilde on
// the grid that yields a branch (Omega_M and g_C vary only weakly with
// p_tilde, so the anchor choice is not delicate).
inline std::vector<double> resolve_omega_grid(const sweep_config& cfg,
                                              const std::vector<branch_prep>& preps,
                                              table_output& t) {
    grid_spec g;
    if (cfg.omega_grid) {
        g = *cfg.omega_grid;
    } else {
        const branch_prep* anchor = nullptr;
        for (const auto& pr : preps) {
            if (pr.has_model) {
                anchor = &pr;
                break;
            }
        }
        if (anchor == nullptr) {
            throw std::runtime_error(
                "no p_tilde on the grid yields a steady state; cannot derive the default "
                "omega grid (set omega_min_rad_s/omega_max_rad_s explicitly)");
        }
        g.lo = 1e-2 * anchor->model.Omega_M;
        g.hi = 1e3 * anchor->model.g_C;
        g.count = 400;
        g.log_scale = true;
    }
    append_grid_metadata(t, "omega", "_rad_s", g);
    return generate(g);
}

} // namespace detail

// Steady-state report: one blue and one red row per p_tilde, with
// residuals and regime ratios; threshold power in metadata and summary.
inline table_output run_steady_state_report(const sweep_config& cfg) {
    table_output t;
    t.metadata.emplace_back("kind", to_string(sweep_kind::steady_state));
    append_params_metadata(t, cfg.params);
    detail::append_p_metadata(t, cfg);

    double pmin = detail::row_nan, pmin_bisect = detail::row_nan;
    try {
        const auto th = threshold_power(cfg.params);
        pmin = th.p_tilde_min;
        pmin_bisect = th.p_tilde_min_bisect;
        t.metadata.emplace_back("p_tilde_min", format_double(pmin));
        t.metadata.emplace_back("p_tilde_min_bisect", format_double(pmin_bisect));
    } catch (const threshold_not_found&) {
        t.metadata.emplace_back("p_tilde_min", "not_found");
    }

    t.columns = {"p_tilde", "branch", "status", "Delta_rad_s", "Omega_c_rad_s", "q_m",
                 "N_c", "alpha", "r_a", "r_p", "r_f", "regime_r1", "regime_r2"};

    const auto ps = detail::p_tilde_values(cfg);
    std::size_t n_no_steady = 0;
    for (double pt : ps) {
        system_params p = cfg.params;
        p.p_tilde = pt;
        std::array<const steady_state_branch*, 2> order{};
        branch_pair pair;
        row_status status = row_status::ok;
        try {
            pair = solve_branches(p);
            order = {&pair.blue, &pair.red};
        } catch (const no_real_steady_state&) {
            status = row_status::no_steady_state;
            ++n_no_steady;
        } catch (const std::exception&) {
            status = row_status::numerical_error;
        }
        for (int bi = 0; bi < 2; ++bi) {
            const char* label = bi == 0 ? "blue" : "red";
            if (status != row_status::ok) {
                t.rows.push_back({format_double(pt), label, to_string(status),
                                  "", "", "", "", "", "", "", "", "", ""});
                continue;
            }
            const auto& b = *order[static_cast<std::size_t>(bi)];
            const auto res = residual(b, p);
            const auto reg = validate_regime(p, b.Delta, b.q);
            t.rows.push_back({format_double(pt), label, "ok", format_double(b.Delta),
                              format_double(b.Omega_c), format_double(b.q), format_double(b.N_c),
                              format_double(b.alpha), format_double(res.r_a), format_double(res.r_p),
                              format_double(res.r_f), format_double(reg.r1), format_double(reg.r2)});
        }
    }

    t.summary["kind"] = to_string(sweep_kind::steady_state);
    if (!std::isnan(pmin)) {
        t.summary["p_tilde_min"] = pmin;
        t.summary["p_tilde_min_bisect"] = pmin_bisect;
    } else {
        t.summary["p_tilde_min"] = nullptr;
    }
    t.summary["n_p_tilde"] = ps.size();
    t.summary["n_no_steady_state"] = n_no_steady;
    return t;
}

// Stability map over a (kappa, Gamma) grid, kappa as the slow index.
// The default window spans the stability boundary of the blue branch.
// Far above Gamma ~ 1e5 the heavily damped red branch acquires a stable
// corner at small kappa; pass explicit grids to chart it.
inline table_output run_stability_map(const sweep_config& cfg) {
    grid_spec kg = cfg.kappa_grid.value_or(grid_spec{1e5, 1e9, 40, true});
    grid_spec gg = cfg.Gamma_grid.value_or(grid_spec{1e2, 1e5, 40, true});

    table_output t;
    t.metadata.emplace_back("kind", to_string(sweep_kind::stability_map));
    append_params_metadata(t, cfg.params);
    detail::append_p_metadata(t, cfg);
    t.metadata.emplace_back("branch", to_string(cfg.branch));
    append_grid_metadata(t, "kappa", "_rad_s", kg);
    append_grid_metadata(t, "Gamma", "_rad_s", gg);
    t.columns = {"kappa_rad_s", "Gamma_rad_s", "status", "stable", "max_real_part"};

    const auto kappas = generate(kg);
    const auto Gammas = generate(gg);
    const std::size_t n = kappas.size() * Gammas.size();

    struct cell_result {
        row_status status;
        bool stable;
        double max_real_part;
    };
    std::vector<cell_result> results(n);
    detail::parallel_for(n, cfg.threads, [&](std::size_t i) {
        const double kap = kappas[i / Gammas.size()];
        const double Gam = Gammas[i % Gammas.size()];
        cell_result& r = results[i];
        r.stable = false;
        r.max_real_part = detail::row_nan;
        try {
            system_params p = cfg.params;
            p.kappa = kap;
            p.Gamma = Gam;
            const auto pair = solve_branches(p);
            const auto& b = cfg.branch == branch_label::blue ? pair.blue : pair.red;
            const auto v = stability(linearize(b, p));
            r.status = row_status::ok;
            r.stable = v.stable;
            r.max_real_part = v.max_real_part;
        } catch (const no_real_steady_state&) {
            r.status = row_status::no_steady_state;
        } catch (const std::exception&) {
            r.status = row_status::numerical_error;
        }
    });

    std::size_t n_stable = 0, n_unstable = 0, n_no_steady = 0, n_numerical = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = results[i];
        const double kap = kappas[i / Gammas.size()];
        const double Gam = Gammas[i % Gammas.size()];
        if (r.status == row_status::ok) {
            (r.stable ? n_stable : n_unstable)++;
            t.rows.push_back({format_double(kap), format_double(Gam), "ok",
                              r.stable ? "1" : "0", format_double(r.max_real_part)});
        } else {
            (r.status == row_status::no_steady_state ? n_no_steady : n_numerical)++;
            t.rows.push_back({format_double(kap), format_double(Gam), to_string(r.status), "", ""});
        }
    }

    t.summary["kind"] = to_string(sweep_kind::stability_map);
    t.summary["branch"] = to_string(cfg.branch);
    t.summary["n_cells"] = n;
    t.summary["n_stable"] = n_stable;
    t.summary["n_unstable"] = n_unstable;
    t.summary["n_no_steady_state"] = n_no_steady;
    t.summary["n_numerical_error"] = n_numerical;
    return t;
}

namespace detail {

struct surface_result {
    row_status status = row_status::ok;
    double E2 = row_nan, E2_disc = row_nan;
    double var_Q_b = row_nan, var_P_b = row_nan, var_Q_a = row_nan, var_P_a = row_nan;
    double mineig_b = row_nan, maxeig_b = row_nan;
    double purity_dev = row_nan;
};

// Shared (p_tilde, omega) surface walk for the entanglement and variance
// sweeps; both fill the full functional set, the caller picks columns.
inline table_output run_surface_sweep(const sweep_config& cfg, sweep_kind kind) {
    table_output t;
    t.metadata.emplace_back("kind", to_string(kind));
    append_params_metadata(t, cfg.params);
    append_p_metadata(t, cfg);
    t.metadata.emplace_back("branch", to_string(cfg.branch));

    const auto ps = p_tilde_values(cfg);
    std::vector<branch_prep> preps;
    preps.reserve(ps.size());
    for (double pt : ps) preps.push_back(prepare_branch(cfg.params, pt, cfg.branch));
    const auto omegas = resolve_omega_grid(cfg, preps, t);

    // Flatten the ok cells into a task list; failed p_tilde values get a
    // single status row instead of a full omega scan.
    std::vector<std::pair<std::size_t, std::size_t>> tasks;
    for (std::size_t pi = 0; pi < ps.size(); ++pi) {
        if (preps[pi].status != row_status::ok) continue;
        for (std::size_t wi = 0; wi < omegas.size(); ++wi) tasks.emplace_back(pi, wi);
    }
    std::vector<surface_result> results(tasks.size());
    parallel_for(tasks.size(), cfg.threads, [&](std::size_t i) {
        const auto [pi, wi] = tasks[i];
        surface_result& r = results[i];
        try {
            const auto sc = covariance_at<long double>(preps[pi].model, static_cast<long double>(omegas[wi]));
            const auto blocks = submatrices(sc);
            const auto ent = entanglement_entropy(sc);
            const auto var = quadrature_variances(sc);
            const auto sq = max_squeezing(blocks.sigma_b);
            r.E2 = static_cast<double>(ent.E2_from_b);
            r.E2_disc = static_cast<double>(ent.discrepancy);
            r.var_Q_b = static_cast<double>(var.Q_b);
            r.var_P_b = static_cast<double>(var.P_b);
            r.var_Q_a = static_cast<double>(var.Q_a);
            r.var_P_a = static_cast<double>(var.P_a);
            r.mineig_b = static_cast<double>(sq.first);
            r.maxeig_b = static_cast<double>(sq.second);
            r.purity_dev = static_cast<double>(purity_check(sc));
        } catch (const std::exception&) {
            r = surface_result{};
            r.status = row_status::numerical_error;
        }
    });

    const bool entangle = kind == sweep_kind::entanglement;
    if (entangle) {
        t.columns = {"p_tilde", "omega_rad_s", "status", "stable", "Delta_rad_s", "Omega_M_rad_s",
                     "g_C_rad_s", "E2_ebits", "E2_discrepancy_ebits", "purity_dev"};
    } else {
        t.columns = {"p_tilde", "omega_rad_s", "status", "stable", "Delta_rad_s", "Omega_M_rad_s",
                     "g_C_rad_s", "var_Q_b", "var_P_b", "var_Q_a", "var_P_a",
                     "mineig_sigma_b", "maxeig_sigma_b", "purity_dev"};
    }

    nlohmann::json per_p = nlohmann::json::array();
    std::size_t task_offset = 0;
    for (std::size_t pi = 0; pi < ps.size(); ++pi) {
        const auto& pr = preps[pi];
        const std::string pt_s = format_double(ps[pi]);
        const std::string Delta_s = pr.has_model ? format_double(pr.model.Delta) : "";
        const std::string Om_s = pr.has_model ? format_double(pr.model.Omega_M) : "";
        const std::string gC_s = pr.has_model ? format_double(pr.model.g_C) : "";
        nlohmann::json ps_summary;
        ps_summary["p_tilde"] = ps[pi];
        ps_summary["status"] = to_string(pr.status);

        if (pr.status != row_status::ok) {
            const std::string stable_s = pr.has_model ? "0" : "";
            std::vector<std::string> row = {pt_s, "", to_string(pr.status), stable_s, Delta_s, Om_s, gC_s};
            row.resize(t.columns.size());
            t.rows.push_back(std::move(row));
            per_p.push_back(std::move(ps_summary));
            continue;
        }

        double peak_E2 = -1.0, peak_omega = row_nan;
        double min_var = std::numeric_limits<double>::infinity(), min_var_omega = row_nan;
        double min_eig = std::numeric_limits<double>::infinity();
        std::size_t n_ok = 0;
        for (std::size_t wi = 0; wi < omegas.size(); ++wi) {
            const auto& r = results[task_offset + wi];
            const std::string w_s = format_double(omegas[wi]);
            if (r.status != row_status::ok) {
                std::vector<std::string> row = {pt_s, w_s, to_string(r.status), "1", Delta_s, Om_s, gC_s};
                row.resize(t.columns.size());
                t.rows.push_back(std::move(row));
                continue;
            }
            ++n_ok;
            if (r.E2 > peak_E2) {
                peak_E2 = r.E2;
                peak_omega = omegas[wi];
            }
            if (r.var_Q_b < min_var) {
                min_var = r.var_Q_b;
                min_var_omega = omegas[wi];
            }
            min_eig = std::min(min_eig, r.mineig_b);
            if (entangle) {
                t.rows.push_back({pt_s, w_s, "ok", "1", Delta_s, Om_s, gC_s,
                                  format_double(r.E2), format_double(r.E2_disc),
                                  format_double(r.purity_dev)});
            } else {
                t.rows.push_back({pt_s, w_s, "ok", "1", Delta_s, Om_s, gC_s,
                                  format_double(r.var_Q_b), format_double(r.var_P_b),
                                  format_double(r.var_Q_a), format_double(r.var_P_a),
                                  format_double(r.mineig_b), format_double(r.maxeig_b),
                                  format_double(r.purity_dev)});
            }
        }
        task_offset += omegas.size();

        ps_summary["n_ok"] = n_ok;
        if (n_ok > 0) {
            if (entangle) {
                ps_summary["peak_E2_ebits"] = peak_E2;
                ps_summary["omega_at_peak_rad_s"] = peak_omega;
            } else {
                ps_summary["min_var_Q_b"] = min_var;
                ps_summary["omega_at_min_var_rad_s"] = min_var_omega;
                ps_summary["min_mineig_sigma_b"] = min_eig;
            }
        }
        per_p.push_back(std::move(ps_summary));
    }

    t.summary["kind"] = to_string(kind);
    t.summary["branch"] = to_string(cfg.branch);
    t.summary["n_p_tilde"] = ps.size();
    t.summary["n_omega"] = omegas.size();
    t.summary["per_p_tilde"] = std::move(per_p);
    return t;
}

} // namespace detail

inline table_output run_entanglement_sweep(const sweep_config& cfg) {
    return detail::run_surface_sweep(cfg, sweep_kind::entanglement);
}

inline table_output run_variance_sweep(const sweep_config& cfg) {
    return detail::run_surface_sweep(cfg, sweep_kind::variance);
}

} // namespace levmir
