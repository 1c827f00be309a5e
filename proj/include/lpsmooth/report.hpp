#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "grid.hpp"
#include "harness.hpp"

namespace lpsmooth {

using json = nlohmann::json;

/// Shortest round-trip decimal form; non-finite values as inf, -inf, nan.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// JSON has no infinities: non-finite values are stored as strings.
inline json number_json(double v) { return std::isfinite(v) ? json(v) : json(format_number(v)); }

/// One pass/fail decision with the measured quantity and the pinned threshold it was compared with.
struct Verdict {
    std::string name;
    /// Acceptance group the verdict belongs to; groups with separate runtime budgets inside one suite.
    std::string group;
    bool passed = false;
    double measured = 0.0;
    std::string relation;
    double threshold = 0.0;
    /// Second bound for interval checks.
    double upper = 0.0;
    std::string detail;
};

inline Verdict check_le(std::string name, std::string group, double measured, double bound, std::string detail = {}) {
    return {std::move(name), std::move(group), measured <= bound, measured, "<=", bound, 0.0, std::move(detail)};
}

inline Verdict check_lt(std::string name, std::string group, double measured, double bound, std::string detail = {}) {
    return {std::move(name), std::move(group), measured < bound, measured, "<", bound, 0.0, std::move(detail)};
}

inline Verdict check_gt(std::string name, std::string group, double measured, double bound, std::string detail = {}) {
    return {std::move(name), std::move(group), measured > bound, measured, ">", bound, 0.0, std::move(detail)};
}

inline Verdict check_in(std::string name, std::string group, double measured, double lo, double hi, std::string detail = {}) {
    return {std::move(name), std::move(group), measured >= lo && measured <= hi, measured, "in", lo, hi, std::move(detail)};
}

/// Passes when the value is a finite number (a bounded measured constant).
inline Verdict check_finite(std::string name, std::string group, double measured, std::string detail = {}) {
    return {std::move(name), std::move(group), std::isfinite(measured), measured, "finite", 0.0, 0.0, std::move(detail)};
}

/// One CSV line: an estimate evaluated on one case, with the grid and step it was computed on.
struct Row {
    std::string estimate;
    std::string label;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    int dim = 0;
    int points = 0;
    double half_width = 0.0;
    double time_step = 0.0;
};

inline Row make_row(const EstimateReport& r, std::string label, const Grid& g, double step = 0.0) {
    return {r.id, std::move(label), r.lhs, r.rhs, r.degenerate ? std::nan("") : r.ratio, g.dim(), g.points(), g.half_width(), step};
}

/// A row that is not tied to a grid (sequence kernels, radial engine, one-dimensional quadrature).
inline Row plain_row(std::string estimate, std::string label, double lhs, double rhs) {
    return {std::move(estimate), std::move(label), lhs, rhs, rhs != 0.0 ? lhs / rhs : std::nan(""), 0, 0, 0.0, 0.0};
}

struct SuiteResult {
    std::string suite;
    std::string anchor;
    std::vector<Row> rows;
    std::vector<Verdict> verdicts;
    /// Ensemble descriptor: sizes, seeds, draw ranges.
    json ensemble = json::object();
    /// Scale-probe and refinement ratios.
    json probes = json::object();
    /// Grids, step sizes, audit totals.
    json metadata = json::object();
    /// Wall time per verdict group, seconds. Kept out of the report files so they stay deterministic.
    std::map<std::string, double> group_seconds;

    bool passed() const {
        for (const auto& v : verdicts)
            if (!v.passed) return false;
        return true;
    }
    bool group_passed(const std::string& g) const {
        bool any = false;
        for (const auto& v : verdicts)
            if (v.group == g) {
                any = true;
                if (!v.passed) return false;
            }
        return any;
    }
};

/// Adds the elapsed wall time of its lifetime to a named group.
class GroupTimer {
public:
    GroupTimer(SuiteResult& r, std::string group) : result_(r), group_(std::move(group)), start_(std::chrono::steady_clock::now()) {}
    GroupTimer(const GroupTimer&) = delete;
    GroupTimer& operator=(const GroupTimer&) = delete;
    ~GroupTimer() {
        result_.group_seconds[group_] += std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    SuiteResult& result_;
    std::string group_;
    std::chrono::steady_clock::time_point start_;
};

inline json grid_json(const Grid& g) {
    return {{"dim", g.dim()}, {"half_width", g.half_width()}, {"points", g.points()}, {"spacing", g.spacing()}};
}

inline json verdict_json(const Verdict& v) {
    json j{{"name", v.name}, {"group", v.group}, {"passed", v.passed}, {"measured", number_json(v.measured)},
           {"relation", v.relation}, {"threshold", number_json(v.threshold)}};
    if (v.relation == "in") j["upper"] = number_json(v.upper);
    if (!v.detail.empty()) j["detail"] = v.detail;
    return j;
}

inline json row_json(const Row& r) {
    json j{{"estimate", r.estimate}, {"case", r.label}, {"lhs", number_json(r.lhs)}, {"rhs", number_json(r.rhs)},
           {"ratio", number_json(r.ratio)}};
    if (r.points > 0) j["grid"] = {{"dim", r.dim}, {"points", r.points}, {"half_width", r.half_width}};
    if (r.time_step > 0.0) j["time_step"] = r.time_step;
    return j;
}

inline json suite_json(const SuiteResult& r) {
    json j{{"suite", r.suite}, {"anchor", r.anchor}, {"passed", r.passed()}};
    j["verdicts"] = json::array();
    for (const auto& v : r.verdicts) j["verdicts"].push_back(verdict_json(v));
    j["estimates"] = json::array();
    for (const auto& row : r.rows) j["estimates"].push_back(row_json(row));
    j["ensemble"] = r.ensemble;
    j["scale_probes"] = r.probes;
    j["metadata"] = r.metadata;
    return j;
}

inline const char* kCsvHeader = "suite,estimate,case,lhs,rhs,ratio,dim,points,half_width,time_step";

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string csv_text(const SuiteResult& r) {
    std::string out = std::string(kCsvHeader) + "\n";
    for (const auto& row : r.rows) {
        out += csv_field(r.suite) + "," + csv_field(row.estimate) + "," + csv_field(row.label) + "," + format_number(row.lhs) + "," +
               format_number(row.rhs) + "," + format_number(row.ratio) + "," + std::to_string(row.dim) + "," + std::to_string(row.points) +
               "," + format_number(row.half_width) + "," + format_number(row.time_step) + "\n";
    }
    return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << text;
    if (!os) throw std::runtime_error("write failed for " + path.string());
}

/// DIR/<suite>/report.json and DIR/<suite>/results.csv.
inline void write_suite_outputs(const std::filesystem::path& dir, const SuiteResult& r) {
    write_text(dir / r.suite / "report.json", suite_json(r).dump(2) + "\n");
    write_text(dir / r.suite / "results.csv", csv_text(r));
}

} // namespace lpsmooth
