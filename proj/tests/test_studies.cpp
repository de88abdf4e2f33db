#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cvmdi/errors.hpp"
#include "cvmdi/studies.hpp"

#include <cmath>

using namespace cvmdi;

namespace {

ProtocolConfig defaults_with(double V, int k, double T_PS) {
    ProtocolConfig cfg;
    cfg.src = {V, k, T_PS};
    cfg.link.V_B = V;
    return cfg;
}

double k_raw(const ProtocolConfig& cfg, Mode mode, double L) {
    return secret_key_rate(with_distance(cfg, mode, L)).K_raw;
}

} // namespace

TEST_CASE("distance splitting per mode") {
    const ProtocolConfig cfg = defaults_with(15.0, 0, 1.0);
    const ProtocolConfig sym = with_distance(cfg, Mode::symmetric, 10.0);
    CHECK(sym.link.L_AC == 5.0);
    CHECK(sym.link.L_BC == 5.0);
    const ProtocolConfig ext =
        with_distance(cfg, Mode::extreme_asymmetric, 10.0);
    CHECK(ext.link.L_AC == 10.0);
    CHECK(ext.link.L_BC == 0.0);
}

TEST_CASE("maximum distance of the baseline protocol") {
    const ProtocolConfig cfg = defaults_with(15.0, 0, 1.0);
    const double d = max_distance(cfg, Mode::extreme_asymmetric);
    CHECK(d == doctest::Approx(13.083).epsilon(0.005));
    // The returned root genuinely brackets the sign change.
    CHECK(k_raw(cfg, Mode::extreme_asymmetric, d - 0.05) > 0.0);
    CHECK(k_raw(cfg, Mode::extreme_asymmetric, d + 0.05) < 0.0);
}

TEST_CASE("maximum distance with one-photon subtraction") {
    const double t_star = optimal_T_PS(15.0, 1);
    const ProtocolConfig cfg = defaults_with(15.0, 1, t_star);
    const double d = max_distance(cfg, Mode::extreme_asymmetric);
    CHECK(d == doctest::Approx(9.605).epsilon(0.005));
}

TEST_CASE("subtraction costs rate at short distance") {
    const ProtocolConfig k0 = defaults_with(15.0, 0, 1.0);
    const ProtocolConfig k1 = defaults_with(15.0, 1, optimal_T_PS(15.0, 1));
    for (Mode mode : {Mode::symmetric, Mode::extreme_asymmetric}) {
        CHECK(k_raw(k1, mode, 1.0) < k_raw(k0, mode, 1.0));
    }
}

TEST_CASE("rate decreases monotonically with distance while positive") {
    const ProtocolConfig cfg = defaults_with(15.0, 0, 1.0);
    double prev = k_raw(cfg, Mode::extreme_asymmetric, 0.5);
    for (double L = 1.0; L <= 13.0; L += 0.5) {
        const double k = k_raw(cfg, Mode::extreme_asymmetric, L);
        CHECK(k < prev);
        prev = k;
    }
}

TEST_CASE("no reconciliation means no distance") {
    ProtocolConfig cfg = defaults_with(15.0, 0, 1.0);
    cfg.beta = 0.0;
    CHECK(max_distance(cfg, Mode::extreme_asymmetric) == 0.0);
}

TEST_CASE("lossless fiber cannot bound the bracket") {
    ProtocolConfig cfg = defaults_with(15.0, 0, 1.0);
    cfg.link.loss_coeff = 0.0;
    CHECK_THROWS_AS(max_distance(cfg, Mode::extreme_asymmetric),
                    no_key_error);
}

TEST_CASE("optimal variance at a workable distance") {
    const ProtocolConfig cfg = defaults_with(15.0, 0, 1.0);
    const VariancePoint vp = optimal_variance(
        cfg, Mode::extreme_asymmetric, 5.0, 2.0, 1000.0);
    CHECK(vp.K_star > 0.0);
    CHECK(vp.V_star > 2.0);
    CHECK(vp.V_star < 1000.0);
    // Local maximum: nudging V either way does not beat the optimum.
    for (double f : {0.99, 1.01}) {
        ProtocolConfig probe =
            with_distance(cfg, Mode::extreme_asymmetric, 5.0);
        probe.src.V = vp.V_star * f;
        probe.link.V_B = probe.src.V;
        CHECK(secret_key_rate(probe).K_raw <= vp.K_star + 1e-12);
    }
}

TEST_CASE("optimal variance reports when no variance gives key") {
    const ProtocolConfig cfg = defaults_with(15.0, 0, 1.0);
    CHECK_THROWS_AS(
        optimal_variance(cfg, Mode::symmetric, 6.0, 2.0, 1000.0),
        no_key_error);
    CHECK_THROWS_AS(
        optimal_variance(cfg, Mode::extreme_asymmetric, 30.0, 2.0, 1000.0),
        no_key_error);
}

TEST_CASE("optimal variance validates its range") {
    const ProtocolConfig cfg = defaults_with(15.0, 0, 1.0);
    CHECK_THROWS_AS(
        optimal_variance(cfg, Mode::extreme_asymmetric, 5.0, 1.0, 100.0),
        domain_error);
    CHECK_THROWS_AS(
        optimal_variance(cfg, Mode::extreme_asymmetric, 5.0, 50.0, 5.0),
        domain_error);
}

TEST_CASE("detector efficiency threshold at 20 km") {
    const ProtocolConfig cfg = defaults_with(15.0, 0, 1.0);
    const double eta0 =
        eta_threshold(cfg, Mode::extreme_asymmetric, 20.0, 1e-6);
    CHECK(eta0 == doctest::Approx(0.9906).epsilon(0.002));
    // Bracket the root directly.
    ProtocolConfig probe =
        with_distance(cfg, Mode::extreme_asymmetric, 20.0);
    probe.link.eta = eta0 + 0.005;
    CHECK(secret_key_rate(probe).K_raw > 0.0);
    probe.link.eta = eta0 - 0.005;
    CHECK(secret_key_rate(probe).K_raw < 0.0);
}

TEST_CASE("efficiency threshold with otherwise ideal devices") {
    ProtocolConfig cfg = defaults_with(15.0, 0, 1.0);
    cfg.link.eps_A = 0.0;
    cfg.link.eps_B = 0.0;
    cfg.link.v_el = 0.0;
    const double eta0 =
        eta_threshold(cfg, Mode::extreme_asymmetric, 0.0, 1e-6);
    // Detection loss feeds the eavesdropper here, so even a noiseless,
    // lossless configuration tolerates only ~10% detection loss.
    CHECK(eta0 > 0.85);
    CHECK(eta0 < 0.95);
    ProtocolConfig probe = with_distance(cfg, Mode::extreme_asymmetric, 0.0);
    probe.link.eta = eta0 + 0.01;
    CHECK(secret_key_rate(probe).K_raw > 0.0);
    probe.link.eta = eta0 - 0.01;
    CHECK(secret_key_rate(probe).K_raw < 0.0);
}

TEST_CASE("efficiency threshold requires key at eta = 1") {
    const ProtocolConfig cfg = defaults_with(15.0, 0, 1.0);
    CHECK_THROWS_AS(eta_threshold(cfg, Mode::extreme_asymmetric, 50.0, 1e-6),
                    no_key_error);
}

TEST_CASE("identical configurations never cross") {
    const ProtocolConfig cfg = defaults_with(15.0, 0, 1.0);
    CHECK_FALSE(crossover(cfg, cfg, Mode::extreme_asymmetric).has_value());
}

TEST_CASE("subtracted and baseline rates do not cross here") {
    // The one-photon rate stays below the baseline at every distance where
    // both are positive, so there is no trade-off point to report.
    const ProtocolConfig k0 = defaults_with(15.0, 0, 1.0);
    const ProtocolConfig k1 = defaults_with(15.0, 1, optimal_T_PS(15.0, 1));
    CHECK_FALSE(crossover(k1, k0, Mode::extreme_asymmetric).has_value());
    ProtocolConfig k0_sym = defaults_with(100.0, 0, 1.0);
    ProtocolConfig k1_sym = defaults_with(100.0, 1, optimal_T_PS(100.0, 1));
    CHECK_FALSE(crossover(k1_sym, k0_sym, Mode::symmetric).has_value());
}

TEST_CASE("a genuine trade-off is located") {
    // Side a: clean detector on much lossier fiber. Side b: standard
    // detector on standard fiber. a wins close in, b reaches farther
    // (12.4 vs 13.1 km), so the rates must cross somewhere in between.
    ProtocolConfig a = defaults_with(15.0, 0, 1.0);
    a.link.loss_coeff = 0.7;
    a.link.eta = 1.0;
    a.link.v_el = 0.0;
    const ProtocolConfig b = defaults_with(15.0, 0, 1.0);

    const Mode mode = Mode::extreme_asymmetric;
    CHECK(k_raw(a, mode, 0.5) > k_raw(b, mode, 0.5));
    const std::optional<double> cross = crossover(a, b, mode, 0.005);
    REQUIRE(cross.has_value());
    const double L = *cross;
    CHECK(L > 0.5);
    CHECK(L < 8.0);
    // The difference changes sign across the reported point.
    const double before = k_raw(a, mode, L - 0.1) - k_raw(b, mode, L - 0.1);
    const double after = k_raw(a, mode, L + 0.1) - k_raw(b, mode, L + 0.1);
    CHECK(before > 0.0);
    CHECK(after < 0.0);
}

TEST_CASE("sweep covers the grid in order and matches direct evaluation") {
    SweepSpec spec;
    spec.base = defaults_with(15.0, 0, 1.0);
    spec.axis1 = Axis::L_AC;
    spec.grid1 = {1.0, 5.0, 10.0};
    spec.outputs = {"K_raw", "K"};
    const StudyResult res = sweep(spec);

    REQUIRE(res.rows.size() == 3);
    REQUIRE(res.columns.size() == 3);
    CHECK(res.columns[0] == "L_AC");
    CHECK(res.columns[1] == "K_raw");
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(res.rows[i].axis[0] == spec.grid1[i]);
        CHECK(res.rows[i].err.empty());
        ProtocolConfig cfg = spec.base;
        cfg.link.L_AC = spec.grid1[i];
        CHECK(res.rows[i].values[0] == secret_key_rate(cfg).K_raw);
    }
}

TEST_CASE("two-axis sweep is row-major") {
    SweepSpec spec;
    spec.base = defaults_with(15.0, 0, 1.0);
    spec.axis1 = Axis::V;
    spec.grid1 = {10.0, 15.0};
    spec.axis2 = Axis::L_AC;
    spec.grid2 = {1.0, 2.0};
    const StudyResult res = sweep(spec);
    REQUIRE(res.rows.size() == 4);
    CHECK(res.rows[0].axis == std::vector<double>{10.0, 1.0});
    CHECK(res.rows[1].axis == std::vector<double>{10.0, 2.0});
    CHECK(res.rows[2].axis == std::vector<double>{15.0, 1.0});
    CHECK(res.rows[3].axis == std::vector<double>{15.0, 2.0});
}

TEST_CASE("sweeping k needs the retuning flag to stay feasible") {
    SweepSpec spec;
    spec.base = defaults_with(15.0, 0, 1.0);
    spec.axis1 = Axis::k;
    spec.grid1 = {0.0, 1.0, 2.0};

    // Without retuning, k >= 1 at T_PS = 1 is a zero-probability herald:
    // the rows carry markers instead of numbers.
    StudyResult res = sweep(spec);
    CHECK(res.rows[0].err.empty());
    CHECK_FALSE(res.rows[1].err.empty());
    CHECK_FALSE(res.rows[2].err.empty());
    CHECK(std::isnan(res.rows[1].values[0]));

    spec.auto_tps = true;
    res = sweep(spec);
    for (const StudyRow& row : res.rows) {
        CHECK(row.err.empty());
    }
}

TEST_CASE("sweep results do not depend on the thread count") {
    SweepSpec spec;
    spec.base = defaults_with(15.0, 0, 1.0);
    spec.axis1 = Axis::L_AC;
    spec.grid1.clear();
    for (int i = 0; i <= 40; ++i) {
        spec.grid1.push_back(0.25 * i);
    }
    const StudyResult serial = sweep(spec, 1);
    const StudyResult parallel = sweep(spec, 4);
    REQUIRE(serial.rows.size() == parallel.rows.size());
    for (std::size_t i = 0; i < serial.rows.size(); ++i) {
        CHECK(serial.rows[i].values == parallel.rows[i].values);
        CHECK(serial.rows[i].err == parallel.rows[i].err);
    }
}

TEST_CASE("figure preset catalog") {
    CHECK(figure_names().size() == 7);
    CHECK_THROWS_AS(figure_preset("fig2", ProtocolConfig{}), domain_error);
}

TEST_CASE("fig3 tabulates heralding probabilities") {
    const FigureTable t = figure_preset("fig3", ProtocolConfig{});
    REQUIRE(t.columns.size() == 5);
    REQUIRE(t.rows.size() == 199);
    CHECK(t.rows.front()[0] == doctest::Approx(0.005));
    CHECK(t.rows.back()[0] == doctest::Approx(0.995));
    for (const auto& row : t.rows) {
        for (std::size_t c = 1; c < row.size(); ++c) {
            CHECK(row[c] > 0.0);
            CHECK(row[c] <= 0.25); // P*(1) bounds every column
        }
    }
}

TEST_CASE("fig7 crosses the baseline's maximum distance") {
    const FigureTable t = figure_preset("fig7", ProtocolConfig{});
    REQUIRE(t.columns.size() == 7);
    REQUIRE(t.rows.size() == 40);
    for (const auto& err : t.row_err) {
        CHECK(err.empty());
    }
    for (const auto& row : t.rows) {
        CHECK(row[6] > 0.0);            // repeaterless bound column
        for (int c = 1; c <= 5; ++c) {
            CHECK(row[c] >= 0.0);       // clamped rates
            CHECK(row[c] <= row[6]);    // never above the bound
        }
    }
    // The baseline reach is ~13.08 km: row 25 (L = 13 km) still carries a
    // sliver of key, row 26 (L = 13.5 km) is clamped to zero.
    CHECK(t.rows[25][1] > 0.0);
    CHECK(t.rows[26][1] == 0.0);
}

TEST_CASE("fig4 marks infeasible subtraction cells") {
    const FigureTable t = figure_preset("fig4", ProtocolConfig{});
    REQUIRE(t.rows.size() == 150);
    // First grid point is V = 2 < 2k+1 for every k >= 1.
    CHECK(t.rows.front()[0] == doctest::Approx(2.0));
    CHECK_FALSE(t.row_err.front().empty());
    CHECK(std::isnan(t.rows.front()[2]));
    // Last grid point V = 300 is feasible for all columns.
    CHECK(t.row_err.back().empty());
}

TEST_CASE("fig9 rates grow with detector efficiency") {
    const FigureTable t = figure_preset("fig9", ProtocolConfig{});
    REQUIRE(t.rows.size() == 41);
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
        CHECK(t.rows[i][1] >= t.rows[i - 1][1]);
    }
}

TEST_CASE("figure output does not depend on the thread count") {
    const FigureTable a = figure_preset("fig9", ProtocolConfig{}, 1);
    const FigureTable b = figure_preset("fig9", ProtocolConfig{}, 3);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i] == b.rows[i]);
        CHECK(a.row_err[i] == b.row_err[i]);
    }
}
