#include "ocvcap/cli.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <optional>
#include <ostream>

#include "CLI11.hpp"

#include "ocvcap/estimator.hpp"
#include "ocvcap/io.hpp"
#include "ocvcap/metrics.hpp"
#include "ocvcap/synth.hpp"

namespace ocvcap::cli {

namespace {

constexpr double kFlatnessWarning = 1e-6;

struct CommonInputs {
    std::string nominal = "builtin"; // curve CSV path or the builtin table
    bool repair_curve = false;
    double nominal_capacity = 4.85; // Ah, matches the builtin reference cell
    std::string cap_bounds;         // "lo:hi" override
    std::string z0_bounds;
};

std::pair<double, double> parse_pair(const std::string& text, const std::string& flag) {
    const auto colon = text.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == text.size())
        throw CLI::ValidationError(flag, "expected LO:HI, got '" + text + "'");
    try {
        return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
    } catch (const std::exception&) {
        throw CLI::ValidationError(flag, "expected numeric LO:HI, got '" + text + "'");
    }
}

OCVCurve load_nominal(const CommonInputs& common) {
    if (common.nominal == "builtin")
        return reference_nominal_curve();
    return read_curve_csv(common.nominal, common.repair_curve);
}

std::optional<Bounds> bounds_override(const std::string& text, const std::string& flag) {
    if (text.empty())
        return std::nullopt;
    const auto [lo, hi] = parse_pair(text, flag);
    return Bounds{lo, hi};
}

void add_common(CLI::App* cmd, CommonInputs& common) {
    cmd->add_option("--nominal", common.nominal,
                    "Nominal OCV-SOC curve CSV, or 'builtin' for the reference table")
        ->capture_default_str();
    cmd->add_flag("--repair-curve", common.repair_curve,
                  "Repair non-monotone OCV samples in the nominal curve on load");
    cmd->add_option("--nominal-capacity", common.nominal_capacity,
                    "Nominal capacity C_n in Ah (scales the SOC transform)")
        ->capture_default_str();
    cmd->add_option("--cap-bounds", common.cap_bounds,
                    "Capacity search bounds LO:HI in Ah (default 0.3:1.5 x nominal)");
    cmd->add_option("--z0-bounds", common.z0_bounds, "Initial-SOC search bounds LO:HI");
}

EstimationProblem build_problem(const CommonInputs& common, const std::string& trace_path) {
    const OCVCurve nominal = load_nominal(common);
    const DischargeTrace trace = read_trace_csv(trace_path);
    return make_problem(nominal, trace, common.nominal_capacity,
                        bounds_override(common.cap_bounds, "--cap-bounds"),
                        bounds_override(common.z0_bounds, "--z0-bounds"));
}

void warn_if_flat(const EstimationResult& result, std::ostream& err) {
    if (result.flatness_indicator < kFlatnessWarning)
        err << "warning: flatness indicator " << result.flatness_indicator
            << " below " << kFlatnessWarning
            << "; capacity and initial SOC are nearly unidentifiable on this data\n";
    if (!result.converged)
        err << "warning: refinement stopped on its iteration budget before meeting tolerance\n";
}

std::optional<WindowSpec> resolve_window(const std::string& fraction_spec,
                                         const std::string& index_spec, std::size_t n_samples) {
    if (!fraction_spec.empty() && !index_spec.empty())
        throw CLI::ValidationError("--window", "give either --window or --window-index, not both");
    if (!fraction_spec.empty()) {
        const auto [lo, hi] = parse_pair(fraction_spec, "--window");
        if (!(lo >= 0.0 && lo < hi && hi <= 1.0))
            throw CLI::ValidationError("--window", "fractions must satisfy 0 <= lo < hi <= 1");
        WindowSpec w;
        w.start = static_cast<std::size_t>(std::llround(lo * static_cast<double>(n_samples)));
        w.end = static_cast<std::size_t>(std::llround(hi * static_cast<double>(n_samples)));
        return w;
    }
    if (!index_spec.empty()) {
        const auto [lo, hi] = parse_pair(index_spec, "--window-index");
        WindowSpec w;
        w.start = static_cast<std::size_t>(lo);
        w.end = static_cast<std::size_t>(hi);
        return w;
    }
    return std::nullopt;
}

int cmd_estimate(const CommonInputs& common, const std::string& trace_path,
                 const std::string& window_spec, const std::string& window_index_spec,
                 std::size_t grid, const std::string& out_path, std::ostream& out,
                 std::ostream& err) {
    const EstimationProblem problem = build_problem(common, trace_path);
    SolverOptions options;
    options.grid_capacity = options.grid_z0 = grid;

    const auto window =
        resolve_window(window_spec, window_index_spec, problem.q_dc.size());
    const EstimationResult result =
        window ? estimate_window(problem, window->start, window->end, options)
               : estimate(problem, options);
    warn_if_flat(result, err);

    const auto doc = result_to_json(result, window ? &*window : nullptr);
    out << doc.dump(2) << '\n';
    if (!out_path.empty())
        write_result_json(result, out_path, window ? &*window : nullptr);
    return kExitOk;
}

int cmd_simulate(const std::string& scenario_path, std::optional<std::uint64_t> seed_override,
                 const std::string& out_path, std::ostream& out) {
    AgingScenario scenario = read_scenario_json(scenario_path);
    if (seed_override)
        scenario.seed = *seed_override;
    const DischargeTrace trace = generate(scenario);
    write_trace_csv(trace, out_path);
    out << nlohmann::json{{"samples", trace.size()},
                          {"duration_s", trace.t.back()},
                          {"q_dc_ah", trace.q_dc.back()},
                          {"trace", out_path}}
               .dump(2)
        << '\n';
    return kExitOk;
}

int cmd_validate(const CommonInputs& common, const std::string& manifest_path,
                 const std::string& out_path, std::size_t grid, std::ostream& out,
                 std::ostream& err) {
    const auto rows = read_manifest_csv(manifest_path);
    if (rows.empty())
        throw EmptyInput("manifest " + manifest_path + " has no data rows");
    const OCVCurve nominal = load_nominal(common);
    const auto cap_bounds = bounds_override(common.cap_bounds, "--cap-bounds");
    const auto z0_bounds = bounds_override(common.z0_bounds, "--z0-bounds");
    SolverOptions options;
    options.grid_capacity = options.grid_z0 = grid;

    // Rows solve independently; report order follows the manifest.
    std::vector<std::future<CycleEstimate>> futures;
    futures.reserve(rows.size());
    for (const auto& row : rows)
        futures.push_back(std::async(std::launch::async, [&, row] {
            const DischargeTrace trace = read_trace_csv(row.trace_path);
            const EstimationProblem problem =
                make_problem(nominal, trace, common.nominal_capacity, cap_bounds, z0_bounds);
            const EstimationResult result = estimate(problem, options);
            return CycleEstimate{row.cycle_id, result.capacity, row.actual_capacity_ah};
        }));

    std::vector<CycleEstimate> estimates;
    estimates.reserve(rows.size());
    for (auto& f : futures)
        estimates.push_back(f.get());

    const EvaluationReport report = aggregate(estimates);
    out << report_to_json(report).dump(2) << '\n';
    if (!out_path.empty())
        write_report_csv(report, out_path);
    err << "validated " << report.per_cycle.size() << " cycles: rmse " << report.rmse_ah
        << " Ah, mae " << report.mae_ah << " Ah, mean ARE " << report.mean_are_percent << " %\n";
    return kExitOk;
}

int cmd_plot_data(const CommonInputs& common, const std::string& trace_path,
                  const std::string& out_path, std::ostream& out, std::ostream& err) {
    const EstimationProblem problem = build_problem(common, trace_path);
    const EstimationResult result = estimate(problem);
    warn_if_flat(result, err);
    write_alignment_plot_data(result, problem, out_path);
    out << result_to_json(result).dump(2) << '\n';
    return kExitOk;
}

int cmd_oracle(const CommonInputs& common, const std::string& trace_path, std::size_t n_capacity,
               std::size_t n_z0, std::ostream& out, std::ostream& err) {
    const EstimationProblem problem = build_problem(common, trace_path);
    const EstimationResult result = estimate(problem);
    const GridPoint oracle = grid_oracle(problem, n_capacity, n_z0);

    const bool certified = result.objective <= oracle.objective + 1e-12;
    out << nlohmann::json{{"estimate", result_to_json(result)},
                          {"oracle",
                           {{"capacity_ah", oracle.capacity},
                            {"z0", oracle.z0},
                            {"objective_v2", oracle.objective},
                            {"grid", {n_capacity, n_z0}}}},
                          {"certified", certified}}
               .dump(2)
        << '\n';
    if (!certified) {
        err << "certificate FAILED: estimate objective " << result.objective
            << " exceeds oracle objective " << oracle.objective << " + 1e-12\n";
        return kExitCertificate;
    }
    err << "certificate ok: estimate " << result.objective << " <= oracle " << oracle.objective
        << " + 1e-12\n";
    return kExitOk;
}

} // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Battery capacity and initial-SOC estimation by OCV curve alignment"};
    app.name("ocvcap");
    app.require_subcommand(1);
    app.set_config("--config", "", "Read defaults from a TOML/INI file (flags win)");

    CommonInputs common;
    std::string trace_path, manifest_path, scenario_path, out_path;
    std::string window_spec, window_index_spec;
    std::size_t grid = 64;
    std::size_t oracle_nc = 200, oracle_nz = 200;
    std::optional<std::uint64_t> seed_override;

    auto* est = app.add_subcommand("estimate",
                                   "Estimate calibrated capacity and initial SOC from a trace");
    add_common(est, common);
    est->add_option("--trace", trace_path, "Discharge trace CSV with OCV samples")->required();
    est->add_option("--window", window_spec,
                    "Fit only a fraction window LO:HI of the samples, e.g. 0.33:0.66");
    est->add_option("--window-index", window_index_spec,
                    "Fit only the half-open sample index window LO:HI");
    est->add_option("--grid", grid, "Stage-1 scan resolution per axis")->capture_default_str();
    est->add_option("--out", out_path, "Also write the result document to this path");

    auto* sim = app.add_subcommand("simulate", "Generate a synthetic aged-battery trace");
    sim->add_option("--scenario", scenario_path, "Scenario JSON")->required();
    sim->add_option("--out", out_path, "Trace CSV to write")->required();
    std::uint64_t seed_value = 0;
    auto* seed_opt = sim->add_option("--seed", seed_value, "Override the scenario seed");

    auto* val = app.add_subcommand("validate",
                                   "Batch-estimate a manifest of traces with known capacities");
    add_common(val, common);
    val->add_option("--manifest", manifest_path,
                    "CSV manifest: cycle_id,trace_path,actual_capacity_ah")
        ->required();
    val->add_option("--grid", grid, "Stage-1 scan resolution per axis")->capture_default_str();
    val->add_option("--out", out_path, "Also write the per-cycle report CSV to this path");

    auto* plot = app.add_subcommand("plot-data",
                                    "Estimate, then emit nominal and aligned series for plotting");
    add_common(plot, common);
    plot->add_option("--trace", trace_path, "Discharge trace CSV with OCV samples")->required();
    plot->add_option("--out", out_path, "Plot data CSV to write")->required();

    auto* orc = app.add_subcommand("oracle",
                                   "Cross-check the solver against a brute-force grid scan");
    add_common(orc, common);
    orc->add_option("--trace", trace_path, "Discharge trace CSV with OCV samples")->required();
    orc->add_option("--nc", oracle_nc, "Oracle grid resolution, capacity axis")
        ->capture_default_str();
    orc->add_option("--nz", oracle_nz, "Oracle grid resolution, z0 axis")->capture_default_str();

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help and friends
            app.exit(e, out, err);
            return kExitOk;
        }
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (seed_opt->count() > 0)
            seed_override = seed_value;
        if (est->parsed())
            return cmd_estimate(common, trace_path, window_spec, window_index_spec, grid,
                                out_path, out, err);
        if (sim->parsed())
            return cmd_simulate(scenario_path, seed_override, out_path, out);
        if (val->parsed())
            return cmd_validate(common, manifest_path, out_path, grid, out, err);
        if (plot->parsed())
            return cmd_plot_data(common, trace_path, out_path, out, err);
        if (orc->parsed())
            return cmd_oracle(common, trace_path, oracle_nc, oracle_nz, out, err);
        err << "no subcommand selected\n";
        return kExitUsage;
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
}

} // namespace ocvcap::cli
