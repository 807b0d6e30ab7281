#include "ocvcap/metrics.hpp"

#include <cmath>

namespace ocvcap {

double absolute_relative_error(double estimated_ah, double actual_ah) {
    if (!(actual_ah > 0.0))
        throw NonPositiveActual("actual capacity must be positive, got " +
                                std::to_string(actual_ah));
    return 100.0 * std::abs(estimated_ah - actual_ah) / actual_ah;
}

AlignmentScore curve_alignment_rmse(const OCVCurve& nominal,
                                    const std::vector<double>& transformed_soc,
                                    const std::vector<double>& v_oc) {
    if (transformed_soc.size() != v_oc.size())
        throw LengthMismatch("soc and ocv sample counts differ");

    const SocRange range = nominal.soc_range();
    AlignmentScore score;
    double sum_sq = 0.0;
    for (std::size_t k = 0; k < transformed_soc.size(); ++k) {
        if (!range.contains(transformed_soc[k])) {
            ++score.excluded;
            continue;
        }
        const double d = v_oc[k] - nominal.ocv_at_unchecked(transformed_soc[k]);
        sum_sq += d * d;
        ++score.included;
    }
    if (score.included == 0)
        throw NoIncludedPoints("every transformed SOC lies outside the nominal curve range");
    score.rmse_v = std::sqrt(sum_sq / static_cast<double>(score.included));
    return score;
}

EvaluationReport aggregate(const std::vector<CycleEstimate>& rows) {
    if (rows.empty())
        throw EmptyInput("no cycles to aggregate");

    EvaluationReport report;
    report.per_cycle.reserve(rows.size());
    double sum_sq = 0.0, sum_abs = 0.0, sum_are = 0.0;
    for (const auto& row : rows) {
        const double are = absolute_relative_error(row.estimated_ah, row.actual_ah);
        report.per_cycle.push_back({row.cycle_id, row.estimated_ah, row.actual_ah, are});
        const double err = row.estimated_ah - row.actual_ah;
        sum_sq += err * err;
        sum_abs += std::abs(err);
        sum_are += are;
    }
    const double n = static_cast<double>(rows.size());
    report.rmse_ah = std::sqrt(sum_sq / n);
    report.mae_ah = sum_abs / n;
    report.mean_are_percent = sum_are / n;
    return report;
}

} // namespace ocvcap
