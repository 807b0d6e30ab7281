#include "ocvcap/coulomb.hpp"

#include <cmath>

namespace ocvcap {

std::vector<double> integrate_discharge(const std::vector<double>& t,
                                        const std::vector<double>& i_b) {
    if (t.size() != i_b.size())
        throw LengthMismatch("time and current sample counts differ: " +
                             std::to_string(t.size()) + " vs " + std::to_string(i_b.size()));
    if (t.empty())
        throw LengthMismatch("empty trace");

    std::vector<double> q_dc(t.size());
    q_dc[0] = 0.0;
    for (std::size_t k = 1; k < t.size(); ++k) {
        const double dt = t[k] - t[k - 1];
        if (!(dt > 0.0))
            throw NonMonotonicTime("time samples must be strictly increasing (index " +
                                   std::to_string(k) + ")");
        q_dc[k] = q_dc[k - 1] - dt * (i_b[k] + i_b[k - 1]) * (0.5 / 3600.0);
    }
    return q_dc;
}

double soc_from_qdc(double q_dc, double z0, double capacity) {
    if (!(capacity > 0.0))
        throw NonPositiveCapacity("capacity must be positive, got " + std::to_string(capacity));
    return z0 - q_dc / capacity;
}

DischargeTrace make_trace(std::vector<double> t, std::vector<double> i_b,
                          std::vector<double> v_oc) {
    if (!v_oc.empty() && v_oc.size() != t.size())
        throw LengthMismatch("ocv sample count differs from time samples");
    DischargeTrace trace;
    trace.q_dc = integrate_discharge(t, i_b);
    trace.t = std::move(t);
    trace.i_b = std::move(i_b);
    trace.v_oc = std::move(v_oc);
    return trace;
}

DischargeTrace resample_trace(const DischargeTrace& trace, std::size_t stride) {
    if (stride <= 1 || trace.size() <= 1)
        return trace;

    DischargeTrace out;
    const std::size_t n = trace.size();
    for (std::size_t k = 0; k < n; k += stride) {
        out.t.push_back(trace.t[k]);
        out.i_b.push_back(trace.i_b[k]);
        out.q_dc.push_back(trace.q_dc[k]);
        if (trace.has_ocv())
            out.v_oc.push_back(trace.v_oc[k]);
    }
    if (out.t.back() != trace.t.back()) {
        out.t.push_back(trace.t.back());
        out.i_b.push_back(trace.i_b.back());
        out.q_dc.push_back(trace.q_dc.back());
        if (trace.has_ocv())
            out.v_oc.push_back(trace.v_oc.back());
    }
    return out;
}

} // namespace ocvcap
