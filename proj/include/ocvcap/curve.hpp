#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ocvcap/errors.hpp"

namespace ocvcap {

// Feasible SOC interval of a curve, [lo, hi].
struct SocRange {
    double lo = 0.0;
    double hi = 1.0;

    bool contains(double z) const { return z >= lo && z <= hi; }
};

// Open-circuit voltage versus state of charge, stored as an ordered sample
// table and queried by piecewise-linear interpolation. Both coordinates are
// strictly increasing, so the relationship is bijective and invertible.
// Immutable after construction; safe to query from any number of threads.
class OCVCurve {
public:
    // Validates and sorts the samples by SOC. Throws LengthMismatch,
    // NonFinite or NonMonotonic when the inputs cannot form a valid curve.
    OCVCurve(std::vector<double> soc, std::vector<double> ocv, std::string label = "");

    const std::vector<double>& soc() const { return soc_; }
    const std::vector<double>& ocv() const { return ocv_; }
    const std::string& label() const { return label_; }
    std::size_t size() const { return soc_.size(); }

    SocRange soc_range() const { return {soc_.front(), soc_.back()}; }
    double min_ocv() const { return ocv_.front(); }
    double max_ocv() const { return ocv_.back(); }

    // OCV at SOC z. Throws OutOfRange outside soc_range(); never extrapolates.
    double ocv_at(double z) const;

    // Inverse lookup: SOC at OCV v. Throws OutOfRange outside [min_ocv, max_ocv].
    double soc_at(double v) const;

    // Non-throwing variant for solver inner loops. The caller must have
    // checked z against soc_range(); out-of-range z yields the value of the
    // nearest boundary segment extended, which the estimator never uses.
    double ocv_at_unchecked(double z) const;

private:
    std::vector<double> soc_;
    std::vector<double> ocv_;
    std::string label_;
};

// Convenience factory matching the storage schema: sorts, validates, builds.
OCVCurve build_curve(std::vector<double> soc_samples, std::vector<double> ocv_samples,
                     std::string label = "");

// Repairs local monotonicity violations in measured OCV samples: isotonic
// (pool-adjacent-violators) regression over the OCV sequence followed by a
// 1e-9 V ascending perturbation of any remaining ties. Input must already be
// sorted by SOC. Idempotent; a no-op on strictly increasing input.
std::pair<std::vector<double>, std::vector<double>>
enforce_monotone(std::vector<double> soc_samples, std::vector<double> ocv_samples);

} // namespace ocvcap
