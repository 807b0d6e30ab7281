#include "ocvcap/curve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ocvcap {

namespace {

constexpr double kTieStep = 1e-9; // volts, used to split equal samples

bool all_finite(const std::vector<double>& xs) {
    return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

} // namespace

OCVCurve::OCVCurve(std::vector<double> soc, std::vector<double> ocv, std::string label)
    : soc_(std::move(soc)), ocv_(std::move(ocv)), label_(std::move(label)) {
    if (soc_.size() != ocv_.size())
        throw LengthMismatch("soc and ocv sample counts differ: " + std::to_string(soc_.size()) +
                             " vs " + std::to_string(ocv_.size()));
    if (soc_.size() < 2)
        throw LengthMismatch("curve needs at least 2 samples, got " + std::to_string(soc_.size()));
    if (!all_finite(soc_) || !all_finite(ocv_))
        throw NonFinite("curve samples must be finite");

    if (!std::is_sorted(soc_.begin(), soc_.end())) {
        std::vector<std::size_t> order(soc_.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [this](std::size_t a, std::size_t b) { return soc_[a] < soc_[b]; });
        std::vector<double> s(soc_.size()), v(soc_.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            s[i] = soc_[order[i]];
            v[i] = ocv_[order[i]];
        }
        soc_ = std::move(s);
        ocv_ = std::move(v);
    }

    for (std::size_t i = 1; i < soc_.size(); ++i) {
        if (!(soc_[i] > soc_[i - 1]))
            throw NonMonotonic("soc samples must be strictly increasing (index " +
                               std::to_string(i) + ")");
        if (!(ocv_[i] > ocv_[i - 1]))
            throw NonMonotonic("ocv samples must be strictly increasing (index " +
                               std::to_string(i) + "); run enforce_monotone to repair");
    }
    if (soc_.front() < 0.0 || soc_.back() > 1.0)
        throw OutOfRange("soc samples must lie within [0, 1]");
    if (ocv_.front() <= 0.0)
        throw OutOfRange("ocv samples must be positive");
}

double OCVCurve::ocv_at(double z) const {
    if (!(z >= soc_.front() && z <= soc_.back()))
        throw OutOfRange("soc " + std::to_string(z) + " outside curve range [" +
                         std::to_string(soc_.front()) + ", " + std::to_string(soc_.back()) + "]");
    return ocv_at_unchecked(z);
}

double OCVCurve::ocv_at_unchecked(double z) const {
    const std::size_t n = soc_.size();
    if (z == soc_[n - 1])
        return ocv_[n - 1];
    std::size_t j = static_cast<std::size_t>(
        std::upper_bound(soc_.begin(), soc_.end(), z) - soc_.begin());
    if (j == 0)
        j = 1;
    else if (j >= n)
        j = n - 1;
    const double w = (z - soc_[j - 1]) / (soc_[j] - soc_[j - 1]);
    return ocv_[j - 1] + w * (ocv_[j] - ocv_[j - 1]);
}

double OCVCurve::soc_at(double v) const {
    const std::size_t n = ocv_.size();
    if (!(v >= ocv_.front() && v <= ocv_.back()))
        throw OutOfRange("ocv " + std::to_string(v) + " outside curve range [" +
                         std::to_string(ocv_.front()) + ", " + std::to_string(ocv_.back()) + "]");
    if (v == ocv_[n - 1])
        return soc_[n - 1];
    std::size_t j = static_cast<std::size_t>(
        std::upper_bound(ocv_.begin(), ocv_.end(), v) - ocv_.begin());
    if (j == 0)
        j = 1;
    else if (j >= n)
        j = n - 1;
    const double w = (v - ocv_[j - 1]) / (ocv_[j] - ocv_[j - 1]);
    return soc_[j - 1] + w * (soc_[j] - soc_[j - 1]);
}

OCVCurve build_curve(std::vector<double> soc_samples, std::vector<double> ocv_samples,
                     std::string label) {
    return OCVCurve(std::move(soc_samples), std::move(ocv_samples), std::move(label));
}

std::pair<std::vector<double>, std::vector<double>>
enforce_monotone(std::vector<double> soc_samples, std::vector<double> ocv_samples) {
    if (soc_samples.size() != ocv_samples.size())
        throw LengthMismatch("soc and ocv sample counts differ");

    const std::size_t n = ocv_samples.size();
    if (n == 0)
        return {std::move(soc_samples), std::move(ocv_samples)};

    // Pool-adjacent-violators with uniform weights: merge blocks whose means
    // violate the nondecreasing order, then expand block means back out.
    std::vector<double> mean;   // running block means
    std::vector<std::size_t> count; // samples per block
    mean.reserve(n);
    count.reserve(n);
    for (double v : ocv_samples) {
        mean.push_back(v);
        count.push_back(1);
        while (mean.size() > 1 && mean[mean.size() - 2] >= mean.back()) {
            const double total = mean[mean.size() - 2] * static_cast<double>(count[count.size() - 2]) +
                                 mean.back() * static_cast<double>(count.back());
            const std::size_t c = count[count.size() - 2] + count.back();
            mean.pop_back();
            count.pop_back();
            mean.back() = total / static_cast<double>(c);
            count.back() = c;
        }
    }

    std::vector<double> repaired;
    repaired.reserve(n);
    for (std::size_t b = 0; b < mean.size(); ++b)
        repaired.insert(repaired.end(), count[b], mean[b]);

    // Split the flat runs left by pooling so the result is strictly increasing.
    for (std::size_t i = 1; i < n; ++i)
        if (repaired[i] <= repaired[i - 1])
            repaired[i] = repaired[i - 1] + kTieStep;

    return {std::move(soc_samples), std::move(repaired)};
}

} // namespace ocvcap
