#include "cvmdi/cli.hpp"

#include "cvmdi/errors.hpp"
#include "cvmdi/fock_oracle.hpp"
#include "cvmdi/format.hpp"
#include "cvmdi/keyrate.hpp"
#include "cvmdi/source.hpp"
#include "cvmdi/studies.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace cvmdi::cli {

namespace {

using nlohmann::json;

// Usage-level failures (bad tokens, bad config keys, unwritable output)
// that should exit 1 rather than 2.
class usage_error : public std::runtime_error {
public:
    explicit usage_error(const std::string& what)
        : std::runtime_error(what) {}
};

// All tunables a user can set, with sentinels for "not given": tps < 0
// means retune automatically, L_AC/L_BC < 0 mean derive from mode and L,
// eps* < 0 mean fall back to the blanket eps or the default.
struct BaseOpts {
    double V = 15.0;
    int k = 0;
    double tps = -1.0;
    std::string mode = "extreme-asym";
    double L = 0.0;
    double L_AC = -1.0;
    double L_BC = -1.0;
    double eps = -1.0;
    double eps_A = -1.0;
    double eps_B = -1.0;
    double eta = 0.975;
    double v_el = 0.01;
    double beta = 0.96;
    double loss = 0.2;
    std::string format = "csv";
    std::string out;
    std::string config_path;
    int jobs = 1;
};

Mode parse_mode(const std::string& token) {
    if (token == "symmetric") {
        return Mode::symmetric;
    }
    if (token == "extreme-asym") {
        return Mode::extreme_asymmetric;
    }
    throw usage_error("unknown mode '" + token +
                      "' (expected symmetric or extreme-asym)");
}

double resolved_eps(double specific, double blanket) {
    if (specific >= 0.0) {
        return specific;
    }
    return blanket >= 0.0 ? blanket : 0.01;
}

// Assemble the engine configuration from the resolved options. auto_tps
// callers (sweep --auto-tps, optimize variance/crossover) retune T_PS per
// point themselves, so the base gets a passthrough placeholder instead of a
// possibly infeasible upfront resolution.
ProtocolConfig build_config(const BaseOpts& o, Mode mode,
                            bool defer_tps = false) {
    ProtocolConfig cfg;
    cfg.src.V = o.V;
    cfg.src.k = o.k;
    if (defer_tps) {
        cfg.src.T_PS = 1.0;
    } else if (o.tps >= 0.0) {
        cfg.src.T_PS = o.tps;
    } else {
        cfg.src.T_PS = (o.k == 0) ? 1.0 : optimal_T_PS(o.V, o.k);
    }

    cfg.link.loss_coeff = o.loss;
    cfg.link.eps_A = resolved_eps(o.eps_A, o.eps);
    cfg.link.eps_B = resolved_eps(o.eps_B, o.eps);
    cfg.link.V_B = o.V;
    cfg.link.eta = o.eta;
    cfg.link.v_el = o.v_el;
    cfg.beta = o.beta;

    cfg = with_distance(cfg, mode, o.L);
    if (o.L_AC >= 0.0) {
        cfg.link.L_AC = o.L_AC;
    }
    if (o.L_BC >= 0.0) {
        cfg.link.L_BC = o.L_BC;
    }
    return cfg;
}

// One table is the output of every subcommand: provenance pairs, column
// names, numeric rows, and (for sweeps and figures) a row error channel.
struct TableDoc {
    std::string command;
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> row_err;
    bool has_err_col = false;
};

void echo_double(TableDoc& doc, const std::string& key, double v) {
    doc.config.emplace_back(key, format_value(v));
}

void echo_base(TableDoc& doc, const BaseOpts& o, const ProtocolConfig& cfg,
               const std::string& mode_token) {
    echo_double(doc, "V", cfg.src.V);
    doc.config.emplace_back("k", std::to_string(cfg.src.k));
    echo_double(doc, "T_PS", cfg.src.T_PS);
    doc.config.emplace_back("mode", mode_token);
    echo_double(doc, "L_AC", cfg.link.L_AC);
    echo_double(doc, "L_BC", cfg.link.L_BC);
    echo_double(doc, "eps_A", cfg.link.eps_A);
    echo_double(doc, "eps_B", cfg.link.eps_B);
    echo_double(doc, "eta", cfg.link.eta);
    echo_double(doc, "v_el", cfg.link.v_el);
    echo_double(doc, "beta", cfg.beta);
    echo_double(doc, "loss", o.loss);
}

void render_csv(const TableDoc& doc, std::ostream& os) {
    os << "# cvmdi " << doc.command << "\n";
    for (const auto& [key, value] : doc.config) {
        os << "# " << key << " = " << value << "\n";
    }
    for (std::size_t i = 0; i < doc.columns.size(); ++i) {
        os << (i ? "," : "") << doc.columns[i];
    }
    if (doc.has_err_col) {
        os << ",err";
    }
    os << "\n";
    for (std::size_t i = 0; i < doc.rows.size(); ++i) {
        os << csv_row(doc.rows[i]);
        if (doc.has_err_col) {
            os << ',' << (i < doc.row_err.size() ? doc.row_err[i] : "");
        }
        os << "\n";
    }
}

void render_json(const TableDoc& doc, std::ostream& os) {
    json j;
    j["command"] = doc.command;
    json cfg = json::object();
    for (const auto& [key, value] : doc.config) {
        cfg[key] = value;
    }
    j["config"] = cfg;
    j["columns"] = doc.columns;
    j["rows"] = doc.rows; // NaN/inf serialize as null
    if (doc.has_err_col) {
        j["row_errors"] = doc.row_err;
    }
    os << j.dump(2) << "\n";
}

void render(const TableDoc& doc, const BaseOpts& o, std::ostream& out) {
    std::ostringstream buf;
    if (o.format == "csv") {
        render_csv(doc, buf);
    } else if (o.format == "json") {
        render_json(doc, buf);
    } else {
        throw usage_error("unknown format '" + o.format +
                          "' (expected csv or json)");
    }
    if (o.out.empty()) {
        out << buf.str();
        return;
    }
    std::ofstream file(o.out, std::ios::binary);
    if (!file) {
        throw usage_error("cannot open output file '" + o.out + "'");
    }
    file << buf.str();
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    return parts;
}

std::vector<double> parse_grid_list(const std::string& s) {
    std::vector<double> grid;
    for (const std::string& tok : split_list(s)) {
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size()) {
                throw std::invalid_argument(tok);
            }
            grid.push_back(v);
        } catch (const std::exception&) {
            throw usage_error("grid entry '" + tok + "' is not a number");
        }
    }
    return grid;
}

Axis parse_axis(const std::string& token) {
    if (token == "V") return Axis::V;
    if (token == "k") return Axis::k;
    if (token == "T_PS") return Axis::T_PS;
    if (token == "L_AC") return Axis::L_AC;
    if (token == "L_BC") return Axis::L_BC;
    if (token == "L_AB_symmetric") return Axis::L_AB_symmetric;
    if (token == "eta") return Axis::eta;
    if (token == "v_el") return Axis::v_el;
    if (token == "beta") return Axis::beta;
    if (token == "eps") return Axis::eps;
    throw usage_error(
        "unknown axis '" + token +
        "' (expected one of V, k, T_PS, L_AC, L_BC, L_AB_symmetric, eta, "
        "v_el, beta, eps)");
}

std::vector<double> linear_grid(double from, double to, int steps) {
    if (steps < 1) {
        throw usage_error("sweep: --steps must be >= 1");
    }
    std::vector<double> g(steps);
    for (int i = 0; i < steps; ++i) {
        g[i] = (steps == 1)
                   ? from
                   : from + (to - from) * i / static_cast<double>(steps - 1);
    }
    return g;
}

// Apply a flat key-value JSON config file onto the option struct. Unknown
// keys are rejected so typos cannot silently fall back to defaults.
void apply_config_file(const std::string& path, BaseOpts& o) {
    std::ifstream in(path);
    if (!in) {
        throw usage_error("cannot read config file '" + path + "'");
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw usage_error("config file '" + path + "': " + e.what());
    }
    if (!j.is_object()) {
        throw usage_error("config file '" + path +
                          "' must be a flat JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "V") o.V = value.get<double>();
            else if (key == "k") o.k = value.get<int>();
            else if (key == "tps") o.tps = value.get<double>();
            else if (key == "mode") o.mode = value.get<std::string>();
            else if (key == "L") o.L = value.get<double>();
            else if (key == "L_AC") o.L_AC = value.get<double>();
            else if (key == "L_BC") o.L_BC = value.get<double>();
            else if (key == "eps") o.eps = value.get<double>();
            else if (key == "eps_A") o.eps_A = value.get<double>();
            else if (key == "eps_B") o.eps_B = value.get<double>();
            else if (key == "eta") o.eta = value.get<double>();
            else if (key == "v_el") o.v_el = value.get<double>();
            else if (key == "beta") o.beta = value.get<double>();
            else if (key == "loss") o.loss = value.get<double>();
            else if (key == "format") o.format = value.get<std::string>();
            else if (key == "jobs") o.jobs = value.get<int>();
            else {
                throw usage_error("config file: unknown key '" + key + "'");
            }
        } catch (const json::exception&) {
            throw usage_error("config file: key '" + key +
                              "' has the wrong type");
        }
    }
}

void add_common_options(CLI::App* sub, BaseOpts& o) {
    sub->add_option("--config", o.config_path,
                    "JSON config file (flags override file values)");
    sub->add_option("--format", o.format, "Output format: csv or json");
    sub->add_option("--out", o.out, "Write the table to this file");
}

void add_model_options(CLI::App* sub, BaseOpts& o) {
    sub->add_option("--V", o.V, "Source variance in shot-noise units");
    sub->add_option("--k", o.k, "Subtracted photon number");
    sub->add_option("--tps", o.tps,
                    "Subtraction transmittance (default: optimal for k >= 1, "
                    "1 for k = 0)");
    sub->add_option("--mode", o.mode,
                    "Relay placement: symmetric or extreme-asym");
    sub->add_option("--L", o.L, "Total Alice-Bob distance in km");
    sub->add_option("--L-AC", o.L_AC, "Alice-relay span in km (overrides --L)");
    sub->add_option("--L-BC", o.L_BC, "Bob-relay span in km (overrides --L)");
    sub->add_option("--eps", o.eps, "Excess noise for both spans");
    sub->add_option("--eps-A", o.eps_A, "Excess noise on the Alice span");
    sub->add_option("--eps-B", o.eps_B, "Excess noise on the Bob span");
    sub->add_option("--eta", o.eta, "Homodyne detector efficiency");
    sub->add_option("--vel", o.v_el, "Detector electronic noise");
    sub->add_option("--beta", o.beta, "Reconciliation efficiency");
    sub->add_option("--loss", o.loss, "Fiber loss in dB/km");
}

TableDoc run_rate(const BaseOpts& o) {
    const Mode mode = parse_mode(o.mode);
    const ProtocolConfig cfg = build_config(o, mode);
    const RateReport r = secret_key_rate(cfg);

    TableDoc doc;
    doc.command = "rate";
    echo_base(doc, o, cfg, o.mode);
    doc.columns = {"P",       "a",       "b",       "c",      "I_AB",
                   "lambda1", "lambda2", "lambda3", "chi_BE", "K_raw",
                   "K"};
    doc.rows = {{r.P, r.cov.a, r.cov.b, r.cov.c, r.I_AB, r.lambda1,
                 r.lambda2, r.lambda3, r.chi_BE, r.K_raw, r.K}};
    return doc;
}

struct SweepOpts {
    std::string axis1;
    std::string axis2;
    double from1 = 0.0, to1 = 0.0;
    int steps1 = 0;
    std::string grid1;
    double from2 = 0.0, to2 = 0.0;
    int steps2 = 0;
    std::string grid2;
    std::string outputs;
    bool auto_tps = false;
};

std::vector<double> resolve_grid(const std::string& explicit_grid,
                                 double from, double to, int steps,
                                 const char* which) {
    const bool has_list = !explicit_grid.empty();
    const bool has_range = steps > 0;
    if (has_list == has_range) {
        throw usage_error(std::string("sweep: give exactly one of --grid") +
                          which + " or --from" + which + "/--to" + which +
                          "/--steps" + which);
    }
    return has_list ? parse_grid_list(explicit_grid)
                    : linear_grid(from, to, steps);
}

TableDoc run_sweep(const BaseOpts& o, const SweepOpts& so) {
    const Mode mode = parse_mode(o.mode);

    SweepSpec spec;
    spec.base = build_config(o, mode, so.auto_tps);
    spec.axis1 = parse_axis(so.axis1);
    spec.grid1 = resolve_grid(so.grid1, so.from1, so.to1, so.steps1, "");
    if (!so.axis2.empty()) {
        spec.axis2 = parse_axis(so.axis2);
        spec.grid2 =
            resolve_grid(so.grid2, so.from2, so.to2, so.steps2, "2");
    } else if (!so.grid2.empty() || so.steps2 > 0) {
        throw usage_error("sweep: axis2 grid given without --axis2");
    }
    spec.auto_tps = so.auto_tps;
    if (!so.outputs.empty()) {
        spec.outputs = split_list(so.outputs);
    }

    StudyResult res;
    try {
        res = sweep(spec, o.jobs);
    } catch (const domain_error& e) {
        // Bad output-column names are command line mistakes, not model ones.
        const std::string what = e.what();
        if (what.find("unknown output column") != std::string::npos) {
            throw usage_error(what);
        }
        throw;
    }

    TableDoc doc;
    doc.command = "sweep";
    echo_base(doc, o, spec.base, o.mode);
    doc.config.emplace_back("axis", so.axis1);
    if (!so.axis2.empty()) {
        doc.config.emplace_back("axis2", so.axis2);
    }
    doc.config.emplace_back("auto_tps", so.auto_tps ? "1" : "0");
    doc.config.emplace_back("jobs", std::to_string(o.jobs));
    doc.columns = res.columns;
    doc.has_err_col = true;
    doc.rows.reserve(res.rows.size());
    for (const StudyRow& row : res.rows) {
        std::vector<double> vals = row.axis;
        vals.insert(vals.end(), row.values.begin(), row.values.end());
        doc.rows.push_back(std::move(vals));
        doc.row_err.push_back(row.err);
    }
    return doc;
}

TableDoc run_figure(const BaseOpts& o, const std::string& name) {
    ProtocolConfig base;
    base.link.loss_coeff = o.loss;
    base.link.eps_A = resolved_eps(o.eps_A, o.eps);
    base.link.eps_B = resolved_eps(o.eps_B, o.eps);
    base.link.eta = o.eta;
    base.link.v_el = o.v_el;
    base.beta = o.beta;

    const FigureTable table = figure_preset(name, base, o.jobs);

    TableDoc doc;
    doc.command = "figure " + name;
    echo_double(doc, "eps_A", base.link.eps_A);
    echo_double(doc, "eps_B", base.link.eps_B);
    echo_double(doc, "eta", base.link.eta);
    echo_double(doc, "v_el", base.link.v_el);
    echo_double(doc, "beta", base.beta);
    echo_double(doc, "loss", base.link.loss_coeff);
    doc.config.emplace_back("jobs", std::to_string(o.jobs));
    doc.columns = table.columns;
    doc.rows = table.rows;
    doc.row_err = table.row_err;
    doc.has_err_col = true;
    return doc;
}

struct OptimizeOpts {
    double tol_km = 0.01;
    double tol_eta = 1e-6;
    double V_min = 2.0;
    double V_max = 1000.0;
    int k_a = 1;
    int k_b = 0;
};

TableDoc run_opt_max_distance(const BaseOpts& o, const OptimizeOpts& oo) {
    const Mode mode = parse_mode(o.mode);
    const ProtocolConfig cfg = build_config(o, mode);
    const double d = max_distance(cfg, mode, oo.tol_km);

    TableDoc doc;
    doc.command = "optimize max-distance";
    echo_base(doc, o, cfg, o.mode);
    echo_double(doc, "tol_km", oo.tol_km);
    doc.columns = {"Dmax_km"};
    doc.rows = {{d}};
    return doc;
}

TableDoc run_opt_variance(const BaseOpts& o, const OptimizeOpts& oo) {
    const Mode mode = parse_mode(o.mode);
    const ProtocolConfig cfg = build_config(o, mode, /*defer_tps=*/true);
    const VariancePoint vp =
        optimal_variance(cfg, mode, o.L, oo.V_min, oo.V_max);

    TableDoc doc;
    doc.command = "optimize variance";
    doc.config.emplace_back("k", std::to_string(o.k));
    doc.config.emplace_back("mode", o.mode);
    echo_double(doc, "L", o.L);
    echo_double(doc, "V_min", oo.V_min);
    echo_double(doc, "V_max", oo.V_max);
    doc.columns = {"V_star", "K_star"};
    doc.rows = {{vp.V_star, vp.K_star}};
    return doc;
}

TableDoc run_opt_tps(const BaseOpts& o) {
    const double t_star = optimal_T_PS(o.V, o.k);
    const double p_star = success_probability({o.V, o.k, t_star});

    TableDoc doc;
    doc.command = "optimize tps";
    echo_double(doc, "V", o.V);
    doc.config.emplace_back("k", std::to_string(o.k));
    doc.columns = {"T_star", "P_star"};
    doc.rows = {{t_star, p_star}};
    return doc;
}

TableDoc run_opt_eta_threshold(const BaseOpts& o, const OptimizeOpts& oo) {
    const Mode mode = parse_mode(o.mode);
    const ProtocolConfig cfg = build_config(o, mode);
    const double eta_min = eta_threshold(cfg, mode, o.L, oo.tol_eta);

    TableDoc doc;
    doc.command = "optimize eta-threshold";
    echo_base(doc, o, cfg, o.mode);
    echo_double(doc, "tol", oo.tol_eta);
    doc.columns = {"eta_min"};
    doc.rows = {{eta_min}};
    return doc;
}

TableDoc run_opt_crossover(const BaseOpts& o, const OptimizeOpts& oo) {
    const Mode mode = parse_mode(o.mode);
    // Both sides share every parameter except the photon number; T_PS is
    // retuned per side.
    BaseOpts oa = o;
    oa.k = oo.k_a;
    oa.tps = -1.0;
    BaseOpts ob = o;
    ob.k = oo.k_b;
    ob.tps = -1.0;
    const ProtocolConfig cfg_a = build_config(oa, mode);
    const ProtocolConfig cfg_b = build_config(ob, mode);

    const std::optional<double> cross =
        crossover(cfg_a, cfg_b, mode, oo.tol_km);
    if (!cross) {
        std::ostringstream os;
        os << "optimize crossover: the k = " << oo.k_a << " and k = "
           << oo.k_b
           << " rates do not cross anywhere both are positive";
        throw no_key_error(os.str());
    }

    TableDoc doc;
    doc.command = "optimize crossover";
    echo_double(doc, "V", o.V);
    doc.config.emplace_back("k_a", std::to_string(oo.k_a));
    doc.config.emplace_back("k_b", std::to_string(oo.k_b));
    doc.config.emplace_back("mode", o.mode);
    echo_double(doc, "tol_km", oo.tol_km);
    doc.columns = {"L_cross_km"};
    doc.rows = {{*cross}};
    return doc;
}

TableDoc run_validate(double tol, bool& all_pass) {
    const double grid_V[] = {3.0, 15.0, 60.0};
    const double grid_T[] = {0.5, 0.857, 0.95};

    TableDoc doc;
    doc.command = "validate";
    echo_double(doc, "tol", tol);
    doc.columns = {"V",     "T_PS",  "k",     "err_P",
                   "err_X", "err_Y", "err_Z", "pass"};
    all_pass = true;
    for (double V : grid_V) {
        for (double T : grid_T) {
            for (int k = 0; k <= 3; ++k) {
                const ValidationReport r =
                    validate_against_analytic(V, T, k, tol);
                all_pass = all_pass && r.pass;
                doc.rows.push_back({V, T, static_cast<double>(k), r.err_P,
                                    r.err_X, r.err_Y, r.err_Z,
                                    r.pass ? 1.0 : 0.0});
            }
        }
    }
    return doc;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
    BaseOpts opts;

    // The config file must be applied before CLI11 sees the flags, so that
    // flags override file values; scan for it by hand.
    try {
        for (std::size_t i = 0; i < args.size(); ++i) {
            const std::string& a = args[i];
            if (a == "--config" && i + 1 < args.size()) {
                apply_config_file(args[i + 1], opts);
            } else if (a.rfind("--config=", 0) == 0) {
                apply_config_file(a.substr(9), opts);
            }
        }
    } catch (const usage_error& e) {
        err << "usage error: " << e.what() << "\n";
        return 1;
    }

    CLI::App app{
        "cvmdi: asymptotic key rates for a relay-based continuous-variable "
        "protocol with photon subtraction"};
    app.require_subcommand(1);

    CLI::App* rate = app.add_subcommand("rate", "Rate at a single point");
    add_model_options(rate, opts);
    add_common_options(rate, opts);

    SweepOpts sweep_opts;
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "Rate table over one or two axes");
    add_model_options(sweep_cmd, opts);
    add_common_options(sweep_cmd, opts);
    sweep_cmd->add_option("--axis", sweep_opts.axis1, "Swept quantity")
        ->required();
    sweep_cmd->add_option("--from", sweep_opts.from1, "Axis start");
    sweep_cmd->add_option("--to", sweep_opts.to1, "Axis end");
    sweep_cmd->add_option("--steps", sweep_opts.steps1,
                          "Number of axis points");
    sweep_cmd->add_option("--grid", sweep_opts.grid1,
                          "Explicit comma-separated axis values");
    sweep_cmd->add_option("--axis2", sweep_opts.axis2,
                          "Optional second (inner) axis");
    sweep_cmd->add_option("--from2", sweep_opts.from2, "Second axis start");
    sweep_cmd->add_option("--to2", sweep_opts.to2, "Second axis end");
    sweep_cmd->add_option("--steps2", sweep_opts.steps2,
                          "Second axis point count");
    sweep_cmd->add_option("--grid2", sweep_opts.grid2,
                          "Explicit second axis values");
    sweep_cmd->add_option("--outputs", sweep_opts.outputs,
                          "Comma-separated report columns (default: all)");
    sweep_cmd->add_flag("--auto-tps", sweep_opts.auto_tps,
                        "Retune T_PS to the optimum at every point");
    sweep_cmd->add_option("--jobs", opts.jobs, "Worker threads");

    std::string figure_name;
    CLI::App* figure =
        app.add_subcommand("figure", "Preset study tables fig3..fig9");
    figure->add_option("name", figure_name, "Preset name")
        ->required()
        ->check(CLI::IsMember(figure_names()));
    add_model_options(figure, opts);
    add_common_options(figure, opts);
    figure->add_option("--jobs", opts.jobs, "Worker threads");

    OptimizeOpts opt_opts;
    CLI::App* optimize =
        app.add_subcommand("optimize", "Roots and optima of the rate");
    optimize->require_subcommand(1);
    CLI::App* opt_dist = optimize->add_subcommand(
        "max-distance", "Largest distance with positive rate");
    CLI::App* opt_var =
        optimize->add_subcommand("variance", "Rate-optimal source variance");
    CLI::App* opt_tps = optimize->add_subcommand(
        "tps", "Success-probability-optimal subtraction transmittance");
    CLI::App* opt_eta = optimize->add_subcommand(
        "eta-threshold", "Smallest detector efficiency with positive rate");
    CLI::App* opt_cross = optimize->add_subcommand(
        "crossover", "Distance where two photon numbers trade places");
    for (CLI::App* sub : {opt_dist, opt_var, opt_tps, opt_eta, opt_cross}) {
        add_model_options(sub, opts);
        add_common_options(sub, opts);
    }
    opt_dist->add_option("--tol-km", opt_opts.tol_km, "Bisection tolerance");
    opt_var->add_option("--V-min", opt_opts.V_min, "Search range start");
    opt_var->add_option("--V-max", opt_opts.V_max, "Search range end");
    opt_eta->add_option("--tol", opt_opts.tol_eta, "Bisection tolerance");
    opt_cross->add_option("--tol-km", opt_opts.tol_km, "Bisection tolerance");
    opt_cross->add_option("--k-a", opt_opts.k_a, "Photon number, first side");
    opt_cross->add_option("--k-b", opt_opts.k_b, "Photon number, second side");

    double validate_tol = 1e-8;
    CLI::App* validate = app.add_subcommand(
        "validate", "Check the closed forms against the Fock-space oracle");
    validate->add_option("--tol", validate_tol, "Comparison tolerance");
    add_common_options(validate, opts);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 1;
    }

    try {
        TableDoc doc;
        if (rate->parsed()) {
            doc = run_rate(opts);
        } else if (sweep_cmd->parsed()) {
            doc = run_sweep(opts, sweep_opts);
        } else if (figure->parsed()) {
            doc = run_figure(opts, figure_name);
        } else if (optimize->parsed()) {
            if (opt_dist->parsed()) {
                doc = run_opt_max_distance(opts, opt_opts);
            } else if (opt_var->parsed()) {
                doc = run_opt_variance(opts, opt_opts);
            } else if (opt_tps->parsed()) {
                doc = run_opt_tps(opts);
            } else if (opt_eta->parsed()) {
                doc = run_opt_eta_threshold(opts, opt_opts);
            } else {
                doc = run_opt_crossover(opts, opt_opts);
            }
        } else if (validate->parsed()) {
            bool all_pass = false;
            doc = run_validate(validate_tol, all_pass);
            render(doc, opts, out);
            return all_pass ? 0 : 2;
        }
        render(doc, opts, out);
        return 0;
    } catch (const usage_error& e) {
        err << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const no_key_error& e) {
        err << "no key: " << e.what() << "\n";
        return 3;
    } catch (const domain_error& e) {
        err << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace cvmdi::cli
