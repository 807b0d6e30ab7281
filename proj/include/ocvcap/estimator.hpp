#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ocvcap/coulomb.hpp"
#include "ocvcap/curve.hpp"
#include "ocvcap/errors.hpp"

namespace ocvcap {

// Scale/translate map from uncalibrated 1-initialized SOC to calibrated SOC:
// z_cal = k * z_tilde + b with k = C_n / C_a and b = Z0 - k.
struct SocTransform {
    double k = 1.0; // scaling factor, nominal over calibrated capacity
    double b = 0.0; // translation factor, Z0 - k

    double apply(double z_tilde) const { return k * z_tilde + b; }
};

// Uncalibrated 1-initialized SOC: 1 - q_dc / nominal_capacity.
double uncalibrated_soc(double q_dc, double nominal_capacity);

struct Bounds {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    double clamp(double x) const { return x < lo ? lo : (x > hi ? hi : x); }
};

// The two-parameter OCV alignment problem: find calibrated capacity and
// initial SOC such that the aged OCV samples, re-indexed to calibrated SOC,
// fall onto the nominal curve.
struct EstimationProblem {
    OCVCurve nominal;         // reference OCV-SOC relationship
    std::vector<double> q_dc; // ampere-hours, q_dc[0] == 0
    std::vector<double> v_oc; // volts, aged OCV samples
    Bounds capacity_bounds;   // ampere-hours, lo > 0
    Bounds z0_bounds;         // fractions within [0, 1]
    double nominal_capacity;  // ampere-hours (C_n), used by the SOC transform

    EstimationProblem(OCVCurve nominal_curve, std::vector<double> q_dc_samples,
                      std::vector<double> v_oc_samples, double nominal_capacity_ah,
                      std::optional<Bounds> capacity_bounds_override = std::nullopt,
                      std::optional<Bounds> z0_bounds_override = std::nullopt);
};

// Convenience: problem from a trace that carries OCV samples.
// Throws MissingOCV when the trace has none.
EstimationProblem make_problem(const OCVCurve& nominal, const DischargeTrace& trace,
                               double nominal_capacity_ah,
                               std::optional<Bounds> capacity_bounds = std::nullopt,
                               std::optional<Bounds> z0_bounds = std::nullopt);

struct SolverOptions {
    std::size_t grid_capacity = 64; // stage-1 scan resolution per axis
    std::size_t grid_z0 = 64;
    std::size_t max_iterations = 500;  // stage-2 simplex budget
    double spread_tolerance = 1e-14;   // volts^2, simplex objective spread
};

struct EstimationResult {
    double capacity = 0.0;  // ampere-hours
    double z0 = 0.0;        // fraction at the first sample of the fitted data
    double rmse = 0.0;      // volts, sqrt(objective / n_residuals)
    double objective = 0.0; // volts^2, sum of squared alignment residuals
    SocTransform transform;
    std::size_t n_residuals = 0;
    double flatness_indicator = 0.0; // min/max eigenvalue ratio of J^T J; small on plateaus
    bool converged = false;
};

// Alignment objective at a candidate (capacity, z0): sum of squared
// differences between the aged OCV samples and the nominal curve evaluated
// at z_k = z0 - q_dc[k]/capacity. Returns nullopt when any z_k leaves the
// nominal curve's SOC range (infeasible candidate; never extrapolated).
std::optional<double> objective(const EstimationProblem& problem, double capacity, double z0);

// Two-stage bounded solve: coarse feasible grid scan, then derivative-free
// simplex refinement from the best cell; the refined point is kept only if
// it does not lose to the grid. Deterministic. Throws NoFeasiblePoint when
// the whole grid is infeasible and DegenerateData when the OCV samples span
// less than 1 mV.
EstimationResult estimate(const EstimationProblem& problem, const SolverOptions& options = {});

// Runs estimate on the half-open sample window [start, end) with q_dc
// re-based to zero at the window start, so z0 means SOC at window start.
EstimationResult estimate_window(const EstimationProblem& problem, std::size_t start,
                                 std::size_t end, const SolverOptions& options = {});

struct GridPoint {
    double capacity = 0.0;
    double z0 = 0.0;
    double objective = 0.0;
};

// Brute-force verifier: exhaustive argmin of the objective over an
// n_capacity x n_z0 uniform grid spanning the bound box, skipping
// infeasible cells. Ties resolve to the smallest capacity, then smallest z0.
GridPoint grid_oracle(const EstimationProblem& problem, std::size_t n_capacity,
                      std::size_t n_z0);

} // namespace ocvcap
