#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ocvcap/curve.hpp"
#include "ocvcap/errors.hpp"

namespace ocvcap {

// 100 * |estimated - actual| / actual, in percent. Throws NonPositiveActual.
double absolute_relative_error(double estimated_ah, double actual_ah);

struct AlignmentScore {
    double rmse_v = 0.0;      // over the included points
    std::size_t included = 0; // points whose SOC fell inside the nominal range
    std::size_t excluded = 0;
};

// RMS voltage gap between aged OCV samples re-indexed to calibrated SOC and
// the nominal curve. Points whose SOC falls outside the nominal range are
// excluded and counted. Throws NoIncludedPoints when nothing remains.
AlignmentScore curve_alignment_rmse(const OCVCurve& nominal,
                                    const std::vector<double>& transformed_soc,
                                    const std::vector<double>& v_oc);

struct CycleEstimate {
    std::string cycle_id;
    double estimated_ah = 0.0;
    double actual_ah = 0.0;
};

struct CycleScore {
    std::string cycle_id;
    double estimated_ah = 0.0;
    double actual_ah = 0.0;
    double are_percent = 0.0;
};

struct EvaluationReport {
    std::vector<CycleScore> per_cycle;
    double rmse_ah = 0.0;          // RMS of (estimated - actual)
    double mae_ah = 0.0;           // mean |estimated - actual|
    double mean_are_percent = 0.0; // arithmetic mean of per-cycle AREs
};

// Scores a batch of capacity estimates against ground truth.
// Throws EmptyInput on an empty batch.
EvaluationReport aggregate(const std::vector<CycleEstimate>& rows);

} // namespace ocvcap
