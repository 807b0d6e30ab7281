#pragma once

#include <cstddef>
#include <vector>

#include "ocvcap/errors.hpp"

namespace ocvcap {

// Time series of a (dis)charge experiment. Current follows the charging-
// positive sign convention, so discharge currents are negative and q_dc
// grows during discharge. v_oc is empty when the trace carries no OCV
// samples (dynamic data without a rest protocol).
struct DischargeTrace {
    std::vector<double> t;    // seconds, strictly increasing
    std::vector<double> i_b;  // amperes, positive = charging
    std::vector<double> v_oc; // volts, aligned with t; empty if absent
    std::vector<double> q_dc; // ampere-hours withdrawn since t[0]; q_dc[0] == 0

    bool has_ocv() const { return !v_oc.empty(); }
    std::size_t size() const { return t.size(); }
};

// Coulomb counting: q_dc[k] = -(1/3600) * trapezoidal integral of i_b over
// [t[0], t[k]]. Positive under net discharge. Throws NonMonotonicTime or
// LengthMismatch.
std::vector<double> integrate_discharge(const std::vector<double>& t,
                                        const std::vector<double>& i_b);

// SOC from discharge capacity under a declared total capacity:
// z0 - q_dc / capacity. Unclamped; feasibility is the caller's concern.
double soc_from_qdc(double q_dc, double z0, double capacity);

// Validates the arrays and fills q_dc via integrate_discharge.
DischargeTrace make_trace(std::vector<double> t, std::vector<double> i_b,
                          std::vector<double> v_oc = {});

// Keeps every stride-th sample plus the last one. Capacity is integrated on
// the full trace before decimation, so q_dc at kept indices is unchanged.
DischargeTrace resample_trace(const DischargeTrace& trace, std::size_t stride);

} // namespace ocvcap
