#pragma once

// Parameter studies on top of the rate engine: 1D/2D sweeps, maximum
// distance, optimal variance, detector-efficiency thresholds, and rate
// crossovers between two configurations. All grids and row orders are
// deterministic; degenerate points are reported in place, never dropped.

#include "cvmdi/keyrate.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cvmdi {

// How a total Alice-Bob distance L_AB is split across the two spans.
enum class Mode {
    symmetric,         // L_AC = L_BC = L_AB / 2
    extreme_asymmetric // L_AC = L_AB, L_BC = 0 (relay at Bob's doorstep)
};

// Sweepable quantities. V also retunes link.V_B; eps sets both spans;
// L_AB_symmetric splits the value across both spans.
enum class Axis { V, k, T_PS, L_AC, L_BC, L_AB_symmetric, eta, v_el, beta, eps };

struct SweepSpec {
    ProtocolConfig base{};
    Axis axis1 = Axis::L_AC;
    std::vector<double> grid1;
    std::optional<Axis> axis2;       // optional inner axis
    std::vector<double> grid2;
    // Report columns, subset of {P, a, b, c, I_AB, lambda1, lambda2,
    // lambda3, chi_BE, K_raw, K}; empty means all of them.
    std::vector<std::string> outputs;
    // Re-derive T_PS = optimal_T_PS(V, k) at every point with k >= 1
    // (and T_PS = 1 at k = 0). Used by the figure presets.
    bool auto_tps = false;
};

struct StudyRow {
    std::vector<double> axis;   // axis1 value, then axis2 value if present
    std::vector<double> values; // NaN-filled when err is nonempty
    std::string err;            // empty for a clean point
};

struct StudyResult {
    std::vector<std::string> columns; // axis names then output names
    std::vector<StudyRow> rows;
};

// Evaluate the grid row-major (axis1 outer). Degenerate points become rows
// with an error marker. jobs > 1 fans rows out across threads; the row
// order of the result does not depend on jobs.
StudyResult sweep(const SweepSpec& spec, int jobs = 1);

// Distance overrides for a mode, applied to a copy of cfg.
ProtocolConfig with_distance(ProtocolConfig cfg, Mode mode, double L_AB_km);

// Largest L_AB with K_raw > 0, by bracket doubling from 1 km and bisection
// to tol_km. Returns 0 when the rate is already nonpositive at L -> 0+.
// Throws no_key_error if the rate is still positive at 500 km (unbounded
// bracket; no such regime exists for lossy fiber, so this flags a bug).
double max_distance(const ProtocolConfig& cfg, Mode mode, double tol_km = 0.01);

struct VariancePoint {
    double V_star; // maximizing variance
    double K_star; // rate there
};

// Maximize K_raw over V in [V_lo, V_hi] (subset of [1.1, 1e4]) at the fixed
// distance: 200-point log grid, then golden-section refinement to relative
// tolerance 1e-4 on V. With k >= 1 the subtraction beamsplitter is retuned
// to optimal_T_PS(V, k) at every V. Throws no_key_error when the rate is
// nonpositive over the whole range.
VariancePoint optimal_variance(const ProtocolConfig& cfg, Mode mode,
                               double L_AB_km, double V_lo, double V_hi);

// Smallest detector efficiency with K_raw > 0 at the given distance, by
// bisection in eta to tol. Requires a positive rate at eta = 1, else
// no_key_error.
double eta_threshold(const ProtocolConfig& cfg, Mode mode, double L_AB_km,
                     double tol = 1e-6);

// Distance where K_raw of cfg_a and cfg_b cross, scanned up to the shorter
// of the two maximum distances. std::nullopt when the difference never
// changes sign there (a distinguished outcome, not an error).
std::optional<double> crossover(const ProtocolConfig& cfg_a,
                                const ProtocolConfig& cfg_b, Mode mode,
                                double tol_km = 0.01);

// A rendered preset table: column names plus numeric rows, with an error
// marker string per row (empty when clean).
struct FigureTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> row_err;
};

// Named preset tables fig3..fig9 (heralding probability vs T_PS, rate vs V,
// rate and max distance vs distance or efficiency). The base config carries
// the noise/detector defaults; each preset pins its own V, k set, distances,
// and grid. jobs as in sweep().
FigureTable figure_preset(const std::string& name, const ProtocolConfig& base,
                          int jobs = 1);

// Names accepted by figure_preset, in presentation order.
const std::vector<std::string>& figure_names();

} // namespace cvmdi
