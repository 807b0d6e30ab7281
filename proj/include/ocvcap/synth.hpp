#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ocvcap/coulomb.hpp"
#include "ocvcap/curve.hpp"
#include "ocvcap/errors.hpp"

namespace ocvcap {

// One step of a discharge program: hold current_a for duration_s seconds.
// The final step holds until the stop SOC is reached, whatever its duration.
struct CurrentStep {
    double duration_s = 0.0;
    double current_a = 0.0; // charging-positive, so discharge steps are negative
};

// Ground-truth description of a synthetic aged battery: the OCV samples are
// drawn from the nominal curve at the calibrated SOC, which is exactly the
// model the estimator inverts.
struct AgingScenario {
    OCVCurve nominal;
    double true_capacity_ah = 0.0;
    double true_z0 = 1.0;
    std::vector<CurrentStep> current_program; // at least one step
    double ocv_noise_sigma_v = 0.0;
    double sample_period_s = 1.0;
    std::uint64_t seed = 0;
    double soc_stop = 0.0; // terminate when calibrated SOC reaches this

    static AgingScenario constant_current(OCVCurve nominal, double capacity_ah, double z0,
                                          double current_a, double soc_stop,
                                          double sample_period_s, double sigma_v = 0.0,
                                          std::uint64_t seed = 0);
};

// Simulates the scenario and returns the sampled trace. The emitted samples
// are the ground truth signal: q_dc is their trapezoidal integral, the last
// sample lands exactly on soc_stop, and v_oc[k] is the nominal curve at
// z_k = true_z0 - q_dc[k]/true_capacity plus seeded Gaussian noise
// (mt19937_64 + Box-Muller, so traces are reproducible bit for bit).
// Throws RangeExceeded if the SOC leaves the curve range before soc_stop.
DischargeTrace generate(const AgingScenario& scenario);

// Built-in 41-knot NMC-like reference curve: SOC 0..1 in steps of 0.025,
// OCV rising from the 2.5 V lower cut-off to the 4.2 V upper cut-off, with
// steep ends and a low-slope mid region (minimum segment slope 0.40 V per
// unit SOC inside [0.3, 0.7]) to exercise plateau identifiability.
OCVCurve reference_nominal_curve();

// Deterministic standard-normal stream: mt19937_64 uniforms mapped through
// the basic Box-Muller transform, two engine draws per sample. Both pieces
// are fully specified, so identical seeds give identical traces on any
// conforming platform (std::normal_distribution would not).
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}
    double next();

private:
    std::mt19937_64 engine_;
};

} // namespace ocvcap
