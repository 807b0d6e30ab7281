#include "ocvcap/estimator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace ocvcap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDegenerateSpan = 1e-3; // volts

// Flat view of a problem for the solver's inner loops.
struct EvalContext {
    const double* soc;
    const double* ocv;
    std::size_t n_knots;
    double soc_lo;
    double soc_hi;
    const double* q;
    const double* v;
    std::size_t m;
    double q_min;
    double q_max;

    explicit EvalContext(const EstimationProblem& p)
        : soc(p.nominal.soc().data()),
          ocv(p.nominal.ocv().data()),
          n_knots(p.nominal.size()),
          soc_lo(p.nominal.soc().front()),
          soc_hi(p.nominal.soc().back()),
          q(p.q_dc.data()),
          v(p.v_oc.data()),
          m(p.q_dc.size()) {
        auto [lo, hi] = std::minmax_element(p.q_dc.begin(), p.q_dc.end());
        q_min = *lo;
        q_max = *hi;
    }

    double interp(double z) const {
        if (z == soc[n_knots - 1])
            return ocv[n_knots - 1];
        std::size_t j = static_cast<std::size_t>(std::upper_bound(soc, soc + n_knots, z) - soc);
        if (j == 0)
            j = 1;
        else if (j >= n_knots)
            j = n_knots - 1;
        const double w = (z - soc[j - 1]) / (soc[j] - soc[j - 1]);
        return ocv[j - 1] + w * (ocv[j] - ocv[j - 1]);
    }

    // Sum of squared residuals, or nullopt when the induced SOC sequence
    // leaves the curve range. z_k is monotone in q_dc[k], so checking the
    // extremes covers every sample.
    std::optional<double> operator()(double capacity, double z0) const {
        const double inv_c = 1.0 / capacity;
        if (z0 - q_max * inv_c < soc_lo || z0 - q_min * inv_c > soc_hi)
            return std::nullopt;
        double sum = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double d = v[k] - interp(z0 - q[k] * inv_c);
            sum += d * d;
        }
        return sum;
    }

    std::optional<std::vector<double>> residuals(double capacity, double z0) const {
        if (capacity <= 0.0)
            return std::nullopt;
        const double inv_c = 1.0 / capacity;
        if (z0 - q_max * inv_c < soc_lo || z0 - q_min * inv_c > soc_hi)
            return std::nullopt;
        std::vector<double> r(m);
        for (std::size_t k = 0; k < m; ++k)
            r[k] = v[k] - interp(z0 - q[k] * inv_c);
        return r;
    }
};

struct GridBest {
    bool found = false;
    double capacity = 0.0;
    double z0 = 0.0;
    double objective = kInf;
    std::size_t i_capacity = 0;
    std::size_t i_z0 = 0;
};

// Exhaustive scan over the inclusive-endpoint grid. Capacity-major ascending
// order with a strict comparison resolves ties to the smallest capacity,
// then the smallest z0.
GridBest scan_grid(const EvalContext& ctx, const Bounds& cap, const Bounds& z0b,
                   std::size_t n_capacity, std::size_t n_z0) {
    GridBest best;
    for (std::size_t ic = 0; ic < n_capacity; ++ic) {
        const double c = cap.lo + cap.width() * static_cast<double>(ic) /
                                      static_cast<double>(n_capacity - 1);
        for (std::size_t iz = 0; iz < n_z0; ++iz) {
            const double z = z0b.lo + z0b.width() * static_cast<double>(iz) /
                                          static_cast<double>(n_z0 - 1);
            const auto f = ctx(c, z);
            if (f && *f < best.objective) {
                best = {true, c, z, *f, ic, iz};
            }
        }
    }
    return best;
}

struct SimplexOutcome {
    double u = 0.0;
    double v = 0.0;
    double objective = kInf;
    bool converged = false;
};

// Nelder-Mead on the unit square; coordinates map affinely onto the bound
// box and anything outside the square or the curve range scores +inf.
SimplexOutcome refine_simplex(const EvalContext& ctx, const Bounds& cap, const Bounds& z0b,
                              double u0, double v0, double du, double dv,
                              const SolverOptions& opt) {
    const auto f = [&](double u, double v) -> double {
        if (u < 0.0 || u > 1.0 || v < 0.0 || v > 1.0)
            return kInf;
        const auto val = ctx(cap.lo + u * cap.width(), z0b.lo + v * z0b.width());
        return val ? *val : kInf;
    };

    std::array<std::array<double, 2>, 3> x = {{{u0, v0},
                                               {u0 + du <= 1.0 ? u0 + du : u0 - du, v0},
                                               {u0, v0 + dv <= 1.0 ? v0 + dv : v0 - dv}}};
    std::array<double, 3> fx = {f(x[0][0], x[0][1]), f(x[1][0], x[1][1]), f(x[2][0], x[2][1])};

    constexpr double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

    const auto order = [&] {
        if (fx[0] > fx[1]) { std::swap(fx[0], fx[1]); std::swap(x[0], x[1]); }
        if (fx[1] > fx[2]) { std::swap(fx[1], fx[2]); std::swap(x[1], x[2]); }
        if (fx[0] > fx[1]) { std::swap(fx[0], fx[1]); std::swap(x[0], x[1]); }
    };

    bool converged = false;
    for (std::size_t iter = 0; iter < opt.max_iterations; ++iter) {
        order();
        if (fx[2] - fx[0] < opt.spread_tolerance) {
            converged = true;
            break;
        }

        const double cu = 0.5 * (x[0][0] + x[1][0]);
        const double cv = 0.5 * (x[0][1] + x[1][1]);
        const double ru = cu + alpha * (cu - x[2][0]);
        const double rv = cv + alpha * (cv - x[2][1]);
        const double fr = f(ru, rv);

        if (fr < fx[0]) {
            const double eu = cu + gamma * (ru - cu);
            const double ev = cv + gamma * (rv - cv);
            const double fe = f(eu, ev);
            if (fe < fr) {
                x[2] = {eu, ev};
                fx[2] = fe;
            } else {
                x[2] = {ru, rv};
                fx[2] = fr;
            }
        } else if (fr < fx[1]) {
            x[2] = {ru, rv};
            fx[2] = fr;
        } else {
            const bool outside = fr < fx[2];
            const double bu = outside ? ru : x[2][0];
            const double bv = outside ? rv : x[2][1];
            const double qu = cu + rho * (bu - cu);
            const double qv = cv + rho * (bv - cv);
            const double fq = f(qu, qv);
            if (fq < (outside ? fr : fx[2])) {
                x[2] = {qu, qv};
                fx[2] = fq;
            } else {
                for (int j = 1; j < 3; ++j) {
                    x[j][0] = x[0][0] + sigma * (x[j][0] - x[0][0]);
                    x[j][1] = x[0][1] + sigma * (x[j][1] - x[0][1]);
                    fx[j] = f(x[j][0], x[j][1]);
                }
            }
        }
    }
    order();
    return {x[0][0], x[0][1], fx[0], converged};
}

// Identifiability diagnostic: ratio of the smallest to largest eigenvalue of
// the Gauss-Newton normal matrix, with the Jacobian taken by finite
// differences in bound-normalized coordinates. Near-zero ratios mean the two
// parameters are close to collinear (plateau windows).
double flatness_indicator(const EvalContext& ctx, const Bounds& cap, const Bounds& z0b,
                          double capacity, double z0) {
    const double h = 1e-6;
    const std::size_t m = ctx.m;

    const auto residuals_at = [&](double u, double v) {
        return ctx.residuals(cap.lo + u * cap.width(), z0b.lo + v * z0b.width());
    };
    const double u0 = (capacity - cap.lo) / cap.width();
    const double v0 = (z0 - z0b.lo) / z0b.width();

    const auto column = [&](bool cap_axis) -> std::vector<double> {
        const double up = cap_axis ? u0 + h : u0, vp = cap_axis ? v0 : v0 + h;
        const double um = cap_axis ? u0 - h : u0, vm = cap_axis ? v0 : v0 - h;
        const auto rp = residuals_at(up, vp);
        const auto rm = residuals_at(um, vm);
        std::vector<double> col(m, 0.0);
        if (rp && rm) {
            for (std::size_t k = 0; k < m; ++k)
                col[k] = ((*rp)[k] - (*rm)[k]) / (2.0 * h);
        } else if (rp || rm) {
            const auto r0 = residuals_at(u0, v0);
            if (r0) {
                const auto& r1 = rp ? *rp : *rm;
                const double sign = rp ? 1.0 : -1.0;
                for (std::size_t k = 0; k < m; ++k)
                    col[k] = sign * (r1[k] - (*r0)[k]) / h;
            }
        }
        return col;
    };

    const std::vector<double> jc = column(true);
    const std::vector<double> jz = column(false);

    double a = 0.0, b = 0.0, c = 0.0; // normal matrix [[a, b], [b, c]]
    for (std::size_t k = 0; k < m; ++k) {
        a += jc[k] * jc[k];
        b += jc[k] * jz[k];
        c += jz[k] * jz[k];
    }
    const double disc = std::sqrt((a - c) * (a - c) + 4.0 * b * b);
    const double lam_max = 0.5 * ((a + c) + disc);
    const double lam_min = 0.5 * ((a + c) - disc);
    if (!(lam_max > 0.0))
        return 0.0;
    return std::max(lam_min, 0.0) / lam_max;
}

void validate_problem(const EstimationProblem& p) {
    if (p.q_dc.size() != p.v_oc.size())
        throw LengthMismatch("q_dc and v_oc sample counts differ");
    if (p.q_dc.size() < 3)
        throw LengthMismatch("need at least 3 samples to fit two parameters, got " +
                             std::to_string(p.q_dc.size()));
    if (p.q_dc.front() != 0.0)
        throw ValidationError("q_dc must start at zero");
    if (!(p.capacity_bounds.lo > 0.0))
        throw NonPositiveCapacity("capacity lower bound must be positive");
    if (!(p.capacity_bounds.lo < p.capacity_bounds.hi))
        throw ValidationError("empty capacity bound box");
    if (!(p.z0_bounds.lo < p.z0_bounds.hi) || p.z0_bounds.lo < 0.0 || p.z0_bounds.hi > 1.0)
        throw ValidationError("z0 bounds must satisfy 0 <= lo < hi <= 1");
    if (!(p.nominal_capacity > 0.0))
        throw NonPositiveCapacity("nominal capacity must be positive");
}

} // namespace

double uncalibrated_soc(double q_dc, double nominal_capacity) {
    if (!(nominal_capacity > 0.0))
        throw NonPositiveCapacity("nominal capacity must be positive");
    return 1.0 - q_dc / nominal_capacity;
}

EstimationProblem::EstimationProblem(OCVCurve nominal_curve, std::vector<double> q_dc_samples,
                                     std::vector<double> v_oc_samples, double nominal_capacity_ah,
                                     std::optional<Bounds> capacity_bounds_override,
                                     std::optional<Bounds> z0_bounds_override)
    : nominal(std::move(nominal_curve)),
      q_dc(std::move(q_dc_samples)),
      v_oc(std::move(v_oc_samples)),
      capacity_bounds(capacity_bounds_override.value_or(
          Bounds{0.3 * nominal_capacity_ah, 1.5 * nominal_capacity_ah})),
      z0_bounds(z0_bounds_override.value_or(Bounds{0.0, 1.0})),
      nominal_capacity(nominal_capacity_ah) {
    validate_problem(*this);
}

EstimationProblem make_problem(const OCVCurve& nominal, const DischargeTrace& trace,
                               double nominal_capacity_ah, std::optional<Bounds> capacity_bounds,
                               std::optional<Bounds> z0_bounds) {
    if (!trace.has_ocv())
        throw MissingOCV("trace carries no OCV samples");
    return EstimationProblem(nominal, trace.q_dc, trace.v_oc, nominal_capacity_ah,
                             capacity_bounds, z0_bounds);
}

std::optional<double> objective(const EstimationProblem& problem, double capacity, double z0) {
    if (!(capacity > 0.0))
        throw NonPositiveCapacity("capacity must be positive, got " + std::to_string(capacity));
    return EvalContext(problem)(capacity, z0);
}

EstimationResult estimate(const EstimationProblem& problem, const SolverOptions& options) {
    validate_problem(problem);
    const auto [vmin, vmax] = std::minmax_element(problem.v_oc.begin(), problem.v_oc.end());
    if (*vmax - *vmin < kDegenerateSpan)
        throw DegenerateData("OCV samples span " + std::to_string((*vmax - *vmin) * 1e3) +
                             " mV; a flat segment cannot identify capacity");

    const EvalContext ctx(problem);
    const Bounds& cap = problem.capacity_bounds;
    const Bounds& z0b = problem.z0_bounds;

    const GridBest grid =
        scan_grid(ctx, cap, z0b, std::max<std::size_t>(options.grid_capacity, 2),
                  std::max<std::size_t>(options.grid_z0, 2));
    if (!grid.found)
        throw NoFeasiblePoint("no candidate in the bound box keeps the induced SOC inside the "
                              "nominal curve range");

    const double u0 = (grid.capacity - cap.lo) / cap.width();
    const double v0 = (grid.z0 - z0b.lo) / z0b.width();
    const double du = 0.5 / static_cast<double>(std::max<std::size_t>(options.grid_capacity, 2) - 1);
    const double dv = 0.5 / static_cast<double>(std::max<std::size_t>(options.grid_z0, 2) - 1);
    const SimplexOutcome refined = refine_simplex(ctx, cap, z0b, u0, v0, du, dv, options);

    double capacity = grid.capacity;
    double z0 = grid.z0;
    if (refined.objective <= grid.objective) {
        capacity = cap.clamp(cap.lo + refined.u * cap.width());
        z0 = z0b.clamp(z0b.lo + refined.v * z0b.width());
    }

    EstimationResult result;
    result.capacity = capacity;
    result.z0 = z0;
    result.objective = ctx(capacity, z0).value_or(refined.objective);
    result.n_residuals = problem.q_dc.size();
    result.rmse = std::sqrt(result.objective / static_cast<double>(result.n_residuals));
    result.transform.k = problem.nominal_capacity / capacity;
    result.transform.b = z0 - result.transform.k;
    result.flatness_indicator = flatness_indicator(ctx, cap, z0b, capacity, z0);
    result.converged = refined.converged;
    return result;
}

EstimationResult estimate_window(const EstimationProblem& problem, std::size_t start,
                                 std::size_t end, const SolverOptions& options) {
    if (end > problem.q_dc.size() || start >= end)
        throw WindowTooSmall("window [" + std::to_string(start) + ", " + std::to_string(end) +
                             ") does not select samples from a trace of size " +
                             std::to_string(problem.q_dc.size()));
    if (end - start < 3)
        throw WindowTooSmall("window selects " + std::to_string(end - start) +
                             " samples, need at least 3");

    std::vector<double> q(problem.q_dc.begin() + static_cast<std::ptrdiff_t>(start),
                          problem.q_dc.begin() + static_cast<std::ptrdiff_t>(end));
    std::vector<double> v(problem.v_oc.begin() + static_cast<std::ptrdiff_t>(start),
                          problem.v_oc.begin() + static_cast<std::ptrdiff_t>(end));
    const double q0 = q.front();
    for (double& x : q)
        x -= q0;
    q.front() = 0.0;

    const EstimationProblem sub(problem.nominal, std::move(q), std::move(v),
                                problem.nominal_capacity, problem.capacity_bounds,
                                problem.z0_bounds);
    return estimate(sub, options);
}

GridPoint grid_oracle(const EstimationProblem& problem, std::size_t n_capacity,
                      std::size_t n_z0) {
    validate_problem(problem);
    if (n_capacity < 2 || n_z0 < 2)
        throw Error("oracle grid must be at least 2x2");

    const EvalContext ctx(problem);
    const GridBest best =
        scan_grid(ctx, problem.capacity_bounds, problem.z0_bounds, n_capacity, n_z0);
    if (!best.found)
        throw NoFeasiblePoint("entire oracle grid is infeasible");
    return {best.capacity, best.z0, best.objective};
}

} // namespace ocvcap
