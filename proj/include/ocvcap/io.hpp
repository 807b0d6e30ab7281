#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "ocvcap/coulomb.hpp"
#include "ocvcap/curve.hpp"
#include "ocvcap/errors.hpp"
#include "ocvcap/estimator.hpp"
#include "ocvcap/metrics.hpp"
#include "ocvcap/synth.hpp"

namespace ocvcap {

// Named x/y series with declared units, the unit of exchange for plot data.
struct PlotSeries {
    std::string name;
    std::string x_unit;
    std::string y_unit;
    std::vector<double> x;
    std::vector<double> y;
};

// --- CSV -------------------------------------------------------------------
// All CSV formats: UTF-8, header row required, '.' decimal point, Unix or
// Windows line endings accepted, Unix emitted. Numbers are written with 17
// significant digits so a write/read cycle reproduces doubles exactly.

// Schema `soc,ocv_v`, rows in any order. With repair_monotone the OCV column
// is passed through enforce_monotone after sorting by SOC.
OCVCurve read_curve_csv(const std::filesystem::path& path, bool repair_monotone = false);
void write_curve_csv(const OCVCurve& curve, const std::filesystem::path& path);

// Schema `time_s,current_a[,ocv_v]`; q_dc is integrated on load.
DischargeTrace read_trace_csv(const std::filesystem::path& path);
void write_trace_csv(const DischargeTrace& trace, const std::filesystem::path& path);

// Batch-validation manifest, schema `cycle_id,trace_path,actual_capacity_ah`.
// Relative trace paths are resolved against the manifest's directory.
struct ManifestRow {
    std::string cycle_id;
    std::filesystem::path trace_path;
    double actual_capacity_ah = 0.0;
};
std::vector<ManifestRow> read_manifest_csv(const std::filesystem::path& path);

// Schema `cycle_id,estimated_ah,actual_ah,are_percent`.
void write_report_csv(const EvaluationReport& report, const std::filesystem::path& path);

// Two series sufficient to overlay the fitted alignment on the nominal
// curve: the nominal knots, then the aged samples at their calibrated SOC.
// Schema `series,soc,ocv_v`; one data row per knot plus one per residual.
void write_alignment_plot_data(const EstimationResult& result, const EstimationProblem& problem,
                               const std::filesystem::path& path);
std::vector<PlotSeries> alignment_plot_series(const EstimationResult& result,
                                              const EstimationProblem& problem);

// --- JSON ------------------------------------------------------------------

// Result document fields: capacity_ah, z0, rmse_v, objective_v2, k, b,
// n_residuals, flatness_indicator, converged, window (only when windowed).
struct WindowSpec {
    std::size_t start = 0;
    std::size_t end = 0; // half-open [start, end)
};
nlohmann::json result_to_json(const EstimationResult& result,
                              const WindowSpec* window = nullptr);
void write_result_json(const EstimationResult& result, const std::filesystem::path& path,
                       const WindowSpec* window = nullptr);

nlohmann::json report_to_json(const EvaluationReport& report);

// Scenario config document. Fields: nominal_curve ("builtin" or a curve CSV
// path, resolved against the config's directory), nominal_capacity_ah
// (optional, defaults to true_capacity for identity scenarios),
// true_capacity_ah, true_z0, soc_stop, sample_period_s, seed,
// ocv_noise_sigma_v, and either discharge_current_a (constant) or
// current_program ([[duration_s, current_a], ...]).
AgingScenario read_scenario_json(const std::filesystem::path& path);

} // namespace ocvcap
