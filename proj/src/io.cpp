#include "ocvcap/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ocvcap {

namespace {

std::string trim(std::string s) {
    const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && is_space(static_cast<unsigned char>(s.back())))
        s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && is_space(static_cast<unsigned char>(s[i])))
        ++i;
    return s.substr(i);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ','))
        fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',')
        fields.emplace_back();
    return fields;
}

double parse_double(const std::string& text, long line_no, const std::string& column) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw ParseError("cannot parse '" + text + "' as a number", line_no, column);
    return value;
}

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string() + " for reading");
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

// Reads logical lines with CRLF tolerated; returns false at end of file.
bool next_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line))
        return false;
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    return true;
}

void expect_header(const std::vector<std::string>& got, const std::vector<std::string>& want,
                   bool allow_extra = false) {
    if (got.size() < want.size() || (!allow_extra && got.size() > want.size()))
        throw ParseError("expected header with " + std::to_string(want.size()) + " columns", 1);
    for (std::size_t i = 0; i < want.size(); ++i)
        if (got[i] != want[i])
            throw ParseError("expected column '" + want[i] + "', got '" + got[i] + "'", 1,
                             want[i]);
}

} // namespace

OCVCurve read_curve_csv(const std::filesystem::path& path, bool repair_monotone) {
    auto in = open_input(path);
    std::string line;
    if (!next_line(in, line))
        throw ParseError("empty file: " + path.string(), 1);
    expect_header(split_csv(line), {"soc", "ocv_v"});

    std::vector<double> soc, ocv;
    long line_no = 1;
    while (next_line(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        const auto fields = split_csv(line);
        if (fields.size() != 2)
            throw ParseError("expected 2 fields, got " + std::to_string(fields.size()), line_no);
        soc.push_back(parse_double(fields[0], line_no, "soc"));
        ocv.push_back(parse_double(fields[1], line_no, "ocv_v"));
    }

    try {
        if (repair_monotone) {
            // Sort by SOC first; repair operates on SOC-ordered samples.
            std::vector<std::size_t> order(soc.size());
            for (std::size_t i = 0; i < order.size(); ++i)
                order[i] = i;
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return soc[a] < soc[b]; });
            std::vector<double> s(soc.size()), v(soc.size());
            for (std::size_t i = 0; i < order.size(); ++i) {
                s[i] = soc[order[i]];
                v[i] = ocv[order[i]];
            }
            auto [rs, rv] = enforce_monotone(std::move(s), std::move(v));
            return build_curve(std::move(rs), std::move(rv), path.filename().string());
        }
        return build_curve(std::move(soc), std::move(ocv), path.filename().string());
    } catch (const Error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_curve_csv(const OCVCurve& curve, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << "soc,ocv_v\n";
    for (std::size_t i = 0; i < curve.size(); ++i)
        out << format_double(curve.soc()[i]) << ',' << format_double(curve.ocv()[i]) << '\n';
    if (!out)
        throw IoError("failed writing " + path.string());
}

DischargeTrace read_trace_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::string line;
    if (!next_line(in, line))
        throw ParseError("empty file: " + path.string(), 1);
    const auto header = split_csv(line);
    expect_header(header, {"time_s", "current_a"}, /*allow_extra=*/true);
    bool with_ocv = false;
    if (header.size() == 3) {
        if (header[2] != "ocv_v")
            throw ParseError("expected column 'ocv_v', got '" + header[2] + "'", 1, "ocv_v");
        with_ocv = true;
    } else if (header.size() > 3) {
        throw ParseError("too many columns (" + std::to_string(header.size()) + ")", 1);
    }

    std::vector<double> t, i_b, v_oc;
    long line_no = 1;
    while (next_line(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        const auto fields = split_csv(line);
        if (fields.size() != (with_ocv ? 3u : 2u))
            throw ParseError("expected " + std::to_string(with_ocv ? 3 : 2) + " fields, got " +
                                 std::to_string(fields.size()),
                             line_no);
        t.push_back(parse_double(fields[0], line_no, "time_s"));
        i_b.push_back(parse_double(fields[1], line_no, "current_a"));
        if (with_ocv)
            v_oc.push_back(parse_double(fields[2], line_no, "ocv_v"));
    }
    return make_trace(std::move(t), std::move(i_b), std::move(v_oc));
}

void write_trace_csv(const DischargeTrace& trace, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << (trace.has_ocv() ? "time_s,current_a,ocv_v\n" : "time_s,current_a\n");
    for (std::size_t k = 0; k < trace.size(); ++k) {
        out << format_double(trace.t[k]) << ',' << format_double(trace.i_b[k]);
        if (trace.has_ocv())
            out << ',' << format_double(trace.v_oc[k]);
        out << '\n';
    }
    if (!out)
        throw IoError("failed writing " + path.string());
}

std::vector<ManifestRow> read_manifest_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::string line;
    if (!next_line(in, line))
        throw ParseError("empty file: " + path.string(), 1);
    expect_header(split_csv(line), {"cycle_id", "trace_path", "actual_capacity_ah"});

    const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    std::vector<ManifestRow> rows;
    long line_no = 1;
    while (next_line(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        const auto fields = split_csv(line);
        if (fields.size() != 3)
            throw ParseError("expected 3 fields, got " + std::to_string(fields.size()), line_no);
        ManifestRow row;
        row.cycle_id = fields[0];
        std::filesystem::path trace(fields[1]);
        row.trace_path = trace.is_absolute() ? trace : base / trace;
        row.actual_capacity_ah = parse_double(fields[2], line_no, "actual_capacity_ah");
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_report_csv(const EvaluationReport& report, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << "cycle_id,estimated_ah,actual_ah,are_percent\n";
    for (const auto& row : report.per_cycle)
        out << row.cycle_id << ',' << format_double(row.estimated_ah) << ','
            << format_double(row.actual_ah) << ',' << format_double(row.are_percent) << '\n';
    if (!out)
        throw IoError("failed writing " + path.string());
}

std::vector<PlotSeries> alignment_plot_series(const EstimationResult& result,
                                              const EstimationProblem& problem) {
    PlotSeries nominal{"nominal", "soc", "ocv_v", problem.nominal.soc(), problem.nominal.ocv()};
    PlotSeries aligned{"aligned", "soc", "ocv_v", {}, {}};
    aligned.x.reserve(problem.q_dc.size());
    for (double q : problem.q_dc)
        aligned.x.push_back(result.z0 - q / result.capacity);
    aligned.y = problem.v_oc;
    return {std::move(nominal), std::move(aligned)};
}

void write_alignment_plot_data(const EstimationResult& result, const EstimationProblem& problem,
                               const std::filesystem::path& path) {
    const auto series = alignment_plot_series(result, problem);
    auto out = open_output(path);
    out << "series,soc,ocv_v\n";
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << s.name << ',' << format_double(s.x[i]) << ',' << format_double(s.y[i])
                << '\n';
    if (!out)
        throw IoError("failed writing " + path.string());
}

nlohmann::json result_to_json(const EstimationResult& result, const WindowSpec* window) {
    nlohmann::json doc{{"capacity_ah", result.capacity},
                       {"z0", result.z0},
                       {"rmse_v", result.rmse},
                       {"objective_v2", result.objective},
                       {"k", result.transform.k},
                       {"b", result.transform.b},
                       {"n_residuals", result.n_residuals},
                       {"flatness_indicator", result.flatness_indicator},
                       {"converged", result.converged}};
    if (window)
        doc["window"] = {{"start", window->start}, {"end", window->end}};
    return doc;
}

void write_result_json(const EstimationResult& result, const std::filesystem::path& path,
                       const WindowSpec* window) {
    auto out = open_output(path);
    out << result_to_json(result, window).dump(2) << '\n';
    if (!out)
        throw IoError("failed writing " + path.string());
}

nlohmann::json report_to_json(const EvaluationReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.per_cycle)
        rows.push_back({{"cycle_id", row.cycle_id},
                        {"estimated_ah", row.estimated_ah},
                        {"actual_ah", row.actual_ah},
                        {"are_percent", row.are_percent}});
    return {{"per_cycle", rows},
            {"rmse_ah", report.rmse_ah},
            {"mae_ah", report.mae_ah},
            {"mean_are_percent", report.mean_are_percent}};
}

AgingScenario read_scenario_json(const std::filesystem::path& path) {
    auto in = open_input(path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid scenario JSON: ") + e.what(), 1);
    }

    const auto require = [&](const char* key) -> const nlohmann::json& {
        if (!doc.contains(key))
            throw ValidationError("scenario is missing required field '" + std::string(key) +
                                  "'");
        return doc.at(key);
    };

    AgingScenario scenario;
    const std::string curve_ref = doc.value("nominal_curve", std::string("builtin"));
    if (curve_ref == "builtin") {
        scenario.nominal = reference_nominal_curve();
    } else {
        std::filesystem::path curve_path(curve_ref);
        if (!curve_path.is_absolute() && path.has_parent_path())
            curve_path = path.parent_path() / curve_path;
        scenario.nominal = read_curve_csv(curve_path);
    }

    scenario.true_capacity_ah = require("true_capacity_ah").get<double>();
    scenario.true_z0 = require("true_z0").get<double>();
    scenario.soc_stop = require("soc_stop").get<double>();
    scenario.sample_period_s = require("sample_period_s").get<double>();
    scenario.ocv_noise_sigma_v = doc.value("ocv_noise_sigma_v", 0.0);
    scenario.seed = doc.value("seed", std::uint64_t{0});

    if (doc.contains("current_program")) {
        for (const auto& step : doc.at("current_program")) {
            if (!step.is_array() || step.size() != 2)
                throw ValidationError("current_program steps must be [duration_s, current_a]");
            scenario.current_program.push_back(
                {step.at(0).get<double>(), step.at(1).get<double>()});
        }
    } else if (doc.contains("discharge_current_a")) {
        scenario.current_program = {{0.0, doc.at("discharge_current_a").get<double>()}};
    } else {
        throw ValidationError(
            "scenario needs either 'discharge_current_a' or 'current_program'");
    }
    return scenario;
}

} // namespace ocvcap
