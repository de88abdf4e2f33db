#include "cvmdi/studies.hpp"

#include "cvmdi/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

namespace cvmdi {

namespace {

constexpr double k_nan = std::numeric_limits<double>::quiet_NaN();

// CSV cells must stay comma-free, and error markers land in cells.
std::string sanitize_marker(std::string s) {
    for (char& ch : s) {
        if (ch == ',' || ch == '\n' || ch == '\r') {
            ch = ';';
        }
    }
    return s;
}

double report_field(const RateReport& r, const std::string& name) {
    if (name == "P") return r.P;
    if (name == "a") return r.cov.a;
    if (name == "b") return r.cov.b;
    if (name == "c") return r.cov.c;
    if (name == "I_AB") return r.I_AB;
    if (name == "lambda1") return r.lambda1;
    if (name == "lambda2") return r.lambda2;
    if (name == "lambda3") return r.lambda3;
    if (name == "chi_BE") return r.chi_BE;
    if (name == "K_raw") return r.K_raw;
    if (name == "K") return r.K;
    throw domain_error("sweep: unknown output column '" + name + "'");
}

const std::vector<std::string>& all_report_fields() {
    static const std::vector<std::string> names = {
        "P", "a", "b", "c", "I_AB", "lambda1", "lambda2", "lambda3",
        "chi_BE", "K_raw", "K"};
    return names;
}

std::string axis_name(Axis axis) {
    switch (axis) {
        case Axis::V: return "V";
        case Axis::k: return "k";
        case Axis::T_PS: return "T_PS";
        case Axis::L_AC: return "L_AC";
        case Axis::L_BC: return "L_BC";
        case Axis::L_AB_symmetric: return "L_AB_symmetric";
        case Axis::eta: return "eta";
        case Axis::v_el: return "v_el";
        case Axis::beta: return "beta";
        case Axis::eps: return "eps";
    }
    throw domain_error("sweep: unknown axis");
}

void apply_axis(ProtocolConfig& cfg, Axis axis, double value) {
    switch (axis) {
        case Axis::V:
            cfg.src.V = value;
            cfg.link.V_B = value;
            return;
        case Axis::k: {
            const double r = std::round(value);
            if (std::abs(value - r) > 1e-9 || r < 0.0) {
                std::ostringstream os;
                os << "sweep: k axis value " << value
                   << " is not a nonnegative integer";
                throw domain_error(os.str());
            }
            cfg.src.k = static_cast<int>(r);
            return;
        }
        case Axis::T_PS: cfg.src.T_PS = value; return;
        case Axis::L_AC: cfg.link.L_AC = value; return;
        case Axis::L_BC: cfg.link.L_BC = value; return;
        case Axis::L_AB_symmetric:
            cfg.link.L_AC = value / 2.0;
            cfg.link.L_BC = value / 2.0;
            return;
        case Axis::eta: cfg.link.eta = value; return;
        case Axis::v_el: cfg.link.v_el = value; return;
        case Axis::beta: cfg.beta = value; return;
        case Axis::eps:
            cfg.link.eps_A = value;
            cfg.link.eps_B = value;
            return;
    }
    throw domain_error("sweep: unknown axis");
}

// Run fn(i) for i in [0, n) on up to `jobs` threads. Each index owns its
// output slot, so the result is identical for any thread count.
void parallel_for(std::size_t n, int jobs,
                  const std::function<void(std::size_t)>& fn) {
    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n;
                 i = next.fetch_add(1)) {
                fn(i);
            }
        });
    }
    for (std::thread& t : pool) t.join();
}

double k_raw_at(const ProtocolConfig& cfg) {
    return secret_key_rate(cfg).K_raw;
}

// Retune the subtraction beamsplitter for the current (V, k); k = 0 means
// no subtraction stage at all, represented as the T_PS = 1 passthrough.
void retune_tps(ProtocolConfig& cfg) {
    cfg.src.T_PS = (cfg.src.k == 0) ? 1.0 : optimal_T_PS(cfg.src.V, cfg.src.k);
}

} // namespace

StudyResult sweep(const SweepSpec& spec, int jobs) {
    if (spec.grid1.empty()) {
        throw domain_error("sweep: axis1 grid is empty");
    }
    if (spec.axis2.has_value() == spec.grid2.empty() &&
        spec.axis2.has_value()) {
        throw domain_error("sweep: axis2 set but its grid is empty");
    }

    const std::vector<std::string>& outputs =
        spec.outputs.empty() ? all_report_fields() : spec.outputs;
    for (const std::string& name : outputs) {
        report_field(RateReport{}, name); // validates the name
    }

    StudyResult result;
    result.columns.push_back(axis_name(spec.axis1));
    if (spec.axis2) {
        result.columns.push_back(axis_name(*spec.axis2));
    }
    result.columns.insert(result.columns.end(), outputs.begin(),
                          outputs.end());

    const std::size_t n2 = spec.axis2 ? spec.grid2.size() : 1;
    const std::size_t n = spec.grid1.size() * n2;
    result.rows.resize(n);

    parallel_for(n, jobs, [&](std::size_t idx) {
        const std::size_t i1 = idx / n2;
        const std::size_t i2 = idx % n2;

        StudyRow& row = result.rows[idx];
        row.axis.push_back(spec.grid1[i1]);
        if (spec.axis2) {
            row.axis.push_back(spec.grid2[i2]);
        }
        row.values.assign(outputs.size(), k_nan);

        try {
            ProtocolConfig cfg = spec.base;
            apply_axis(cfg, spec.axis1, spec.grid1[i1]);
            if (spec.axis2) {
                apply_axis(cfg, *spec.axis2, spec.grid2[i2]);
            }
            if (spec.auto_tps) {
                retune_tps(cfg);
            }
            const RateReport r = secret_key_rate(cfg);
            for (std::size_t j = 0; j < outputs.size(); ++j) {
                row.values[j] = report_field(r, outputs[j]);
            }
        } catch (const std::exception& e) {
            row.err = sanitize_marker(e.what());
        }
    });

    return result;
}

ProtocolConfig with_distance(ProtocolConfig cfg, Mode mode, double L_AB_km) {
    if (!(L_AB_km >= 0.0)) {
        throw domain_error("distance: L_AB must be >= 0");
    }
    switch (mode) {
        case Mode::symmetric:
            cfg.link.L_AC = L_AB_km / 2.0;
            cfg.link.L_BC = L_AB_km / 2.0;
            break;
        case Mode::extreme_asymmetric:
            cfg.link.L_AC = L_AB_km;
            cfg.link.L_BC = 0.0;
            break;
    }
    return cfg;
}

double max_distance(const ProtocolConfig& cfg, Mode mode, double tol_km) {
    if (!(tol_km > 0.0)) {
        throw domain_error("max_distance: tolerance must be > 0");
    }
    const auto rate = [&](double L) {
        return k_raw_at(with_distance(cfg, mode, L));
    };

    double lo = 1e-6; // "zero" distance, but avoids the exact L = 0 corner
    if (!(rate(lo) > 0.0)) {
        return 0.0;
    }
    double hi = 1.0;
    while (rate(hi) > 0.0) {
        lo = hi;
        if (hi >= 500.0) {
            throw no_key_error(
                "max_distance: rate still positive at 500 km; the bracket "
                "is unbounded, which lossy fiber cannot produce");
        }
        hi = std::min(hi * 2.0, 500.0);
    }
    // Invariant: rate(lo) > 0 >= rate(hi).
    while (hi - lo > tol_km) {
        const double mid = 0.5 * (lo + hi);
        (rate(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

VariancePoint optimal_variance(const ProtocolConfig& cfg, Mode mode,
                               double L_AB_km, double V_lo, double V_hi) {
    if (!(V_lo >= 1.1) || !(V_hi <= 1e4) || !(V_lo < V_hi)) {
        std::ostringstream os;
        os << "optimal_variance: range [" << V_lo << ", " << V_hi
           << "] must satisfy 1.1 <= V_lo < V_hi <= 1e4";
        throw domain_error(os.str());
    }

    const ProtocolConfig at_dist = with_distance(cfg, mode, L_AB_km);
    const auto rate = [&](double V) {
        ProtocolConfig c = at_dist;
        c.src.V = V;
        c.link.V_B = V;
        if (c.src.k >= 1) {
            // The subtraction stage is retuned with the source; variances
            // below the feasibility edge have no interior optimum and are
            // treated as rateless.
            if (V <= 2.0 * c.src.k + 1.0) {
                return -std::numeric_limits<double>::infinity();
            }
            c.src.T_PS = optimal_T_PS(V, c.src.k);
        }
        return k_raw_at(c);
    };

    // Coarse log grid to localize the peak.
    constexpr int grid_n = 200;
    const double x_lo = std::log(V_lo), x_hi = std::log(V_hi);
    int best = -1;
    double best_rate = 0.0;
    std::vector<double> vals(grid_n);
    for (int i = 0; i < grid_n; ++i) {
        const double V =
            std::exp(x_lo + (x_hi - x_lo) * i / double(grid_n - 1));
        vals[i] = rate(V);
        if (vals[i] > best_rate) {
            best_rate = vals[i];
            best = i;
        }
    }
    if (best < 0) {
        std::ostringstream os;
        os << "optimal_variance: K_raw is nonpositive over the whole range ["
           << V_lo << ", " << V_hi << "] at L_AB = " << L_AB_km << " km";
        throw no_key_error(os.str());
    }

    // Golden-section refinement inside the bracketing cells, in log V so the
    // stopping rule is the relative tolerance on V itself.
    const double step = (x_hi - x_lo) / double(grid_n - 1);
    double a = x_lo + step * std::max(best - 1, 0);
    double b = x_lo + step * std::min(best + 1, grid_n - 1);
    constexpr double invphi = 0.6180339887498949; // (sqrt(5) - 1) / 2
    double c1 = b - invphi * (b - a);
    double c2 = a + invphi * (b - a);
    double f1 = rate(std::exp(c1));
    double f2 = rate(std::exp(c2));
    while (b - a > 1e-4) {
        if (f1 >= f2) {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - invphi * (b - a);
            f1 = rate(std::exp(c1));
        } else {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + invphi * (b - a);
            f2 = rate(std::exp(c2));
        }
    }
    const double V_star = std::exp(0.5 * (a + b));
    return {V_star, rate(V_star)};
}

double eta_threshold(const ProtocolConfig& cfg, Mode mode, double L_AB_km,
                     double tol) {
    if (!(tol > 0.0)) {
        throw domain_error("eta_threshold: tolerance must be > 0");
    }
    const ProtocolConfig at_dist = with_distance(cfg, mode, L_AB_km);
    const auto rate = [&](double eta) {
        ProtocolConfig c = at_dist;
        c.link.eta = eta;
        return k_raw_at(c);
    };

    if (!(rate(1.0) > 0.0)) {
        std::ostringstream os;
        os << "eta_threshold: no key even with a perfect detector at L_AB = "
           << L_AB_km << " km";
        throw no_key_error(os.str());
    }

    // Walk down until the rate dies; detection noise diverges as eta -> 0,
    // so this terminates for every configuration with finite rate.
    double lo = 0.5;
    while (rate(lo) > 0.0) {
        lo /= 2.0;
        if (lo < 1e-6) {
            throw no_key_error(
                "eta_threshold: rate still positive at eta = 1e-6, no "
                "threshold in the searchable range");
        }
    }
    double hi = std::min(1.0, lo * 2.0);
    // Invariant: rate(lo) <= 0 < rate(hi).
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (rate(mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

std::optional<double> crossover(const ProtocolConfig& cfg_a,
                                const ProtocolConfig& cfg_b, Mode mode,
                                double tol_km) {
    const double d_a = max_distance(cfg_a, mode, tol_km);
    const double d_b = max_distance(cfg_b, mode, tol_km);
    const double L_max = std::min(d_a, d_b);
    if (!(L_max > 0.0)) {
        return std::nullopt;
    }

    const auto diff = [&](double L) {
        return k_raw_at(with_distance(cfg_a, mode, L)) -
               k_raw_at(with_distance(cfg_b, mode, L));
    };

    // A crossing means the sign of the rate difference flips. Exact zeros
    // are skipped rather than reported: identical rates or a tangency do
    // not swap which configuration dominates.
    constexpr int scan_n = 200;
    double L_sign = 0.0;
    double f_sign = 0.0;
    for (int i = 1; i <= scan_n; ++i) {
        const double L = L_max * i / scan_n;
        const double f = diff(L);
        if (f == 0.0) {
            continue;
        }
        if (f_sign != 0.0 && f_sign * f < 0.0) {
            double lo = L_sign, hi = L;
            double f_lo = f_sign;
            while (hi - lo > tol_km) {
                const double mid = 0.5 * (lo + hi);
                const double fm = diff(mid);
                if (fm == 0.0) {
                    return mid;
                }
                if (f_lo * fm < 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    f_lo = fm;
                }
            }
            return 0.5 * (lo + hi);
        }
        L_sign = L;
        f_sign = f;
    }
    return std::nullopt;
}

namespace {

// Shared scaffolding for the wide preset tables: one row per grid value,
// one rate column per photon number, errors collected per row.
struct PresetBuilder {
    FigureTable table;

    void init(std::size_t rows, std::vector<std::string> columns) {
        table.columns = std::move(columns);
        table.rows.assign(rows,
                          std::vector<double>(table.columns.size(), k_nan));
        table.row_err.assign(rows, "");
    }

    void note(std::size_t row, const std::string& label,
              const std::exception& e) {
        std::string& err = table.row_err[row];
        if (!err.empty()) {
            err += "; ";
        }
        err += label + ": " + sanitize_marker(e.what());
    }
};

ProtocolConfig preset_config(const ProtocolConfig& base, double V, int k,
                             Mode mode, double L_AB) {
    ProtocolConfig cfg = with_distance(base, mode, L_AB);
    cfg.src.V = V;
    cfg.link.V_B = V;
    cfg.src.k = k;
    retune_tps(cfg);
    return cfg;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    const double x_lo = std::log(lo), x_hi = std::log(hi);
    for (int i = 0; i < n; ++i) {
        g[i] = std::exp(x_lo + (x_hi - x_lo) * i / double(n - 1));
    }
    return g;
}

std::vector<double> step_grid(double lo, double step, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) {
        g[i] = lo + step * i;
    }
    return g;
}

// Rate-vs-V preset shared by fig4 (symmetric) and fig5 (extreme asymmetric).
FigureTable rate_vs_variance(const ProtocolConfig& base, Mode mode,
                             double L_AB, int jobs) {
    const std::vector<double> grid = log_grid(2.0, 300.0, 150);
    PresetBuilder pb;
    pb.init(grid.size(), {"V", "K_k0", "K_k1", "K_k2", "K_k3", "K_k4"});
    parallel_for(grid.size(), jobs, [&](std::size_t i) {
        pb.table.rows[i][0] = grid[i];
        for (int k = 0; k <= 4; ++k) {
            try {
                const ProtocolConfig cfg =
                    preset_config(base, grid[i], k, mode, L_AB);
                pb.table.rows[i][1 + k] = secret_key_rate(cfg).K;
            } catch (const std::exception& e) {
                pb.note(i, "K_k" + std::to_string(k), e);
            }
        }
    });
    return pb.table;
}

// Rate-vs-distance preset shared by fig6 and fig7.
FigureTable rate_vs_distance(const ProtocolConfig& base, Mode mode, double V,
                             const std::vector<double>& grid, int jobs) {
    PresetBuilder pb;
    pb.init(grid.size(),
            {"L_km", "K_k0", "K_k1", "K_k2", "K_k3", "K_k4", "PLOB"});
    parallel_for(grid.size(), jobs, [&](std::size_t i) {
        pb.table.rows[i][0] = grid[i];
        for (int k = 0; k <= 4; ++k) {
            try {
                const ProtocolConfig cfg =
                    preset_config(base, V, k, mode, grid[i]);
                pb.table.rows[i][1 + k] = secret_key_rate(cfg).K;
            } catch (const std::exception& e) {
                pb.note(i, "K_k" + std::to_string(k), e);
            }
        }
        pb.table.rows[i][6] = plob_bound(grid[i], base.link.loss_coeff);
    });
    return pb.table;
}

} // namespace

const std::vector<std::string>& figure_names() {
    static const std::vector<std::string> names = {
        "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"};
    return names;
}

FigureTable figure_preset(const std::string& name, const ProtocolConfig& base,
                          int jobs) {
    if (name == "fig3") {
        // Heralding probability against the subtraction transmittance.
        const std::vector<double> grid = step_grid(0.005, 0.005, 199);
        PresetBuilder pb;
        pb.init(grid.size(), {"T_PS", "P_k1", "P_k2", "P_k3", "P_k4"});
        parallel_for(grid.size(), jobs, [&](std::size_t i) {
            pb.table.rows[i][0] = grid[i];
            for (int k = 1; k <= 4; ++k) {
                try {
                    pb.table.rows[i][k] =
                        success_probability({15.0, k, grid[i]});
                } catch (const std::exception& e) {
                    pb.note(i, "P_k" + std::to_string(k), e);
                }
            }
        });
        return pb.table;
    }
    if (name == "fig4") {
        return rate_vs_variance(base, Mode::symmetric, 6.0, jobs);
    }
    if (name == "fig5") {
        return rate_vs_variance(base, Mode::extreme_asymmetric, 30.0, jobs);
    }
    if (name == "fig6") {
        return rate_vs_distance(base, Mode::symmetric, 100.0,
                                step_grid(0.1, 0.1, 100), jobs);
    }
    if (name == "fig7") {
        return rate_vs_distance(base, Mode::extreme_asymmetric, 15.0,
                                step_grid(0.5, 0.5, 40), jobs);
    }
    if (name == "fig8") {
        // Maximum distance against detector efficiency, with and without
        // subtraction. A zero entry means no key even arbitrarily close in.
        const std::vector<double> grid = step_grid(0.80, 0.005, 41);
        PresetBuilder pb;
        pb.init(grid.size(), {"eta", "Dmax_km_k0", "Dmax_km_k1"});
        parallel_for(grid.size(), jobs, [&](std::size_t i) {
            pb.table.rows[i][0] = grid[i];
            for (int k = 0; k <= 1; ++k) {
                try {
                    ProtocolConfig cfg =
                        preset_config(base, 15.0, k,
                                      Mode::extreme_asymmetric, 0.0);
                    cfg.link.eta = grid[i];
                    pb.table.rows[i][1 + k] =
                        max_distance(cfg, Mode::extreme_asymmetric);
                } catch (const std::exception& e) {
                    pb.note(i, "Dmax_km_k" + std::to_string(k), e);
                }
            }
        });
        return pb.table;
    }
    if (name == "fig9") {
        // Rate against detector efficiency at a fixed 20 km link.
        const std::vector<double> grid = step_grid(0.80, 0.005, 41);
        PresetBuilder pb;
        pb.init(grid.size(),
                {"eta", "K_k0", "K_k1", "K_k2", "K_k3", "K_k4"});
        parallel_for(grid.size(), jobs, [&](std::size_t i) {
            pb.table.rows[i][0] = grid[i];
            for (int k = 0; k <= 4; ++k) {
                try {
                    ProtocolConfig cfg = preset_config(
                        base, 15.0, k, Mode::extreme_asymmetric, 20.0);
                    cfg.link.eta = grid[i];
                    pb.table.rows[i][1 + k] = secret_key_rate(cfg).K;
                } catch (const std::exception& e) {
                    pb.note(i, "K_k" + std::to_string(k), e);
                }
            }
        });
        return pb.table;
    }
    throw domain_error("figure: unknown preset '" + name +
                       "' (expected fig3..fig9)");
}

} // namespace cvmdi
