#include "ocvcap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ocvcap {

namespace {

// Tolerance for SOC landing a rounding error outside the curve range at the
// terminal sample; anything beyond this is a genuine range violation.
constexpr double kRangeSlack = 1e-9;

double interp_clamped(const OCVCurve& curve, double z) {
    const SocRange range = curve.soc_range();
    if (z < range.lo - kRangeSlack || z > range.hi + kRangeSlack)
        throw RangeExceeded("SOC " + std::to_string(z) + " leaves nominal curve range [" +
                            std::to_string(range.lo) + ", " + std::to_string(range.hi) + "]");
    return curve.ocv_at_unchecked(std::clamp(z, range.lo, range.hi));
}

void validate_scenario(const AgingScenario& s) {
    if (!(s.true_capacity_ah > 0.0))
        throw NonPositiveCapacity("true capacity must be positive");
    if (!(s.soc_stop >= 0.0 && s.soc_stop < s.true_z0 && s.true_z0 <= 1.0))
        throw ValidationError("scenario requires 0 <= soc_stop < true_z0 <= 1");
    if (s.ocv_noise_sigma_v < 0.0)
        throw ValidationError("noise sigma must be nonnegative");
    if (!(s.sample_period_s > 0.0))
        throw ValidationError("sample period must be positive");
    if (s.current_program.empty())
        throw ValidationError("current program needs at least one step");
    if (!(s.current_program.back().current_a < 0.0))
        throw ValidationError("final program step must discharge (negative current), otherwise "
                              "the stop SOC is never reached");
    const SocRange range = s.nominal.soc_range();
    if (!range.contains(s.true_z0) || !range.contains(s.soc_stop))
        throw RangeExceeded("nominal curve range does not cover [soc_stop, true_z0]");
}

} // namespace

AgingScenario AgingScenario::constant_current(OCVCurve nominal, double capacity_ah, double z0,
                                              double current_a, double soc_stop,
                                              double sample_period_s, double sigma_v,
                                              std::uint64_t seed) {
    AgingScenario s;
    s.nominal = std::move(nominal);
    s.true_capacity_ah = capacity_ah;
    s.true_z0 = z0;
    s.current_program = {{0.0, current_a}};
    s.ocv_noise_sigma_v = sigma_v;
    s.sample_period_s = sample_period_s;
    s.seed = seed;
    s.soc_stop = soc_stop;
    return s;
}

double GaussianStream::next() {
    // Basic Box-Muller; u1 shifted into (0, 1] so the log stays finite.
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

DischargeTrace generate(const AgingScenario& scenario) {
    validate_scenario(scenario);

    const double capacity = scenario.true_capacity_ah;
    const double q_target = (scenario.true_z0 - scenario.soc_stop) * capacity;

    // Absolute start time of each program step; the last step is unbounded.
    const auto& steps = scenario.current_program;
    std::vector<double> step_start(steps.size(), 0.0);
    for (std::size_t s = 1; s < steps.size(); ++s)
        step_start[s] = step_start[s - 1] + steps[s - 1].duration_s;

    const auto current_at = [&](double t) {
        std::size_t s = steps.size() - 1;
        while (s > 0 && t < step_start[s])
            --s;
        return steps[s].current_a;
    };

    DischargeTrace trace;
    trace.t.push_back(0.0);
    trace.i_b.push_back(current_at(0.0));
    trace.q_dc.push_back(0.0);

    // Sample instants are the uniform grid merged with the program's step
    // boundaries, ending at the exact instant the stop SOC is crossed.
    std::size_t uniform_index = 1;
    std::size_t next_boundary = 1;
    while (true) {
        const double t_prev = trace.t.back();
        while (next_boundary < step_start.size() && step_start[next_boundary] <= t_prev)
            ++next_boundary;
        const double t_uniform =
            static_cast<double>(uniform_index) * scenario.sample_period_s;
        if (t_uniform <= t_prev) { // a boundary sample landed on this grid instant
            ++uniform_index;
            continue;
        }
        const bool take_boundary =
            next_boundary < step_start.size() && step_start[next_boundary] <= t_uniform;
        const double t_next = take_boundary ? step_start[next_boundary] : t_uniform;

        const double i_prev = trace.i_b.back();
        double i_next = current_at(t_next);
        const double dt = t_next - t_prev;
        double q_next = trace.q_dc.back() - dt * (i_next + i_prev) * (0.5 / 3600.0);

        if (q_next >= q_target) {
            // Stop SOC is crossed inside this interval: the sampled current
            // ramps linearly across it, so the withdrawn charge is quadratic
            // in time. Solve for the crossing and land the final sample there.
            const double need = q_target - trace.q_dc.back();
            const double a = -(i_next - i_prev) / (2.0 * dt * 3600.0);
            const double b = -i_prev / 3600.0;
            const double disc = std::max(b * b + 4.0 * a * need, 0.0);
            double s = 2.0 * need / (b + std::sqrt(disc));
            if ((!(s > 0.0) || s > dt) && a != 0.0) {
                const double alt = (-b - std::sqrt(disc)) / (2.0 * a);
                if (alt > 0.0 && alt <= dt)
                    s = alt;
            }
            if (!(s > 0.0) || s > dt)
                s = dt;
            const double t_hit = t_prev + s;
            i_next = i_prev + (i_next - i_prev) * (s / dt);
            q_next = trace.q_dc.back() - s * (i_next + i_prev) * (0.5 / 3600.0);
            trace.t.push_back(t_hit);
            trace.i_b.push_back(i_next);
            trace.q_dc.push_back(q_next);
            break;
        }

        trace.t.push_back(t_next);
        trace.i_b.push_back(i_next);
        trace.q_dc.push_back(q_next);
        if (take_boundary)
            ++next_boundary;
        else
            ++uniform_index;
    }

    trace.v_oc.resize(trace.size());
    for (std::size_t k = 0; k < trace.size(); ++k)
        trace.v_oc[k] =
            interp_clamped(scenario.nominal, scenario.true_z0 - trace.q_dc[k] / capacity);

    if (scenario.ocv_noise_sigma_v > 0.0) {
        GaussianStream noise(scenario.seed);
        for (double& v : trace.v_oc)
            v += scenario.ocv_noise_sigma_v * noise.next();
    }
    return trace;
}

OCVCurve reference_nominal_curve() {
    // Fixed knot table, SOC 0..1 in steps of 0.025. Shape: steep rise out of
    // the 2.5 V cut-off, low-slope plateau through the mid range, steep
    // approach to the 4.2 V cut-off.
    static constexpr double kOcv[41] = {
        2.500000, 2.722419, 2.915800, 3.065073, 3.170897,
        3.242428, 3.290202, 3.322755, 3.345993, 3.363685,
        3.378126, 3.390678, 3.402139, 3.412972, 3.423444,
        3.433710, 3.443857, 3.453939, 3.463986, 3.474017,
        3.484045, 3.494083, 3.504141, 3.514238, 3.524397,
        3.534656, 3.545073, 3.555739, 3.566797, 3.578471,
        3.591113, 3.605271, 3.621797, 3.642004, 3.667888,
        3.702423, 3.749892, 3.816143, 3.908465, 4.034557,
        4.200000};

    std::vector<double> soc(41), ocv(kOcv, kOcv + 41);
    for (int i = 0; i < 41; ++i)
        soc[static_cast<std::size_t>(i)] = static_cast<double>(i) / 40.0;
    return OCVCurve(std::move(soc), std::move(ocv), "built-in reference");
}

} // namespace ocvcap
