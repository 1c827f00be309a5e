#pragma once

#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "report.hpp"
#include "suites.hpp"

namespace lpsmooth::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Settings that are not suite parameters.
inline const std::vector<std::string>& core_keys() {
    static const std::vector<std::string> keys{"seed", "grid", "dim", "shells", "ensemble", "out", "parallel"};
    return keys;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Flat key=value file. Blank lines and lines starting with '#' are ignored.
inline std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config", "cannot read '" + path.string() + "'");
    std::map<std::string, std::string> out;
    int lineno = 0;
    for (std::string line; std::getline(is, line);) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos || trim(t.substr(0, eq)).empty())
            throw ConfigError("config:" + std::to_string(lineno), "expected key=value, got '" + t + "'");
        out[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return out;
}

struct Settings {
    SuiteConfig suite;
    std::filesystem::path out = "lpsmooth-out";
};

inline int parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const int x = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::logic_error&) {
        throw ConfigError(key, "expected an integer, got '" + v + "'");
    }
}

/// Validates merged settings; errors name the offending key.
inline Settings resolve(const std::map<std::string, std::string>& merged) {
    Settings s;
    for (const auto& [key, v] : merged) {
        if (key == "seed") {
            try {
                std::size_t used = 0;
                if (!v.empty() && v.front() == '-') throw std::invalid_argument("negative");
                s.suite.seed = std::stoull(v, &used);
                if (used != v.size()) throw std::invalid_argument("trailing");
            } catch (const std::logic_error&) {
                throw ConfigError("seed", "expected a non-negative integer, got '" + v + "'");
            }
        } else if (key == "grid") {
            s.suite.grid = parse_int(key, v);
            if (*s.suite.grid < 2 || (*s.suite.grid & (*s.suite.grid - 1)) != 0) throw ConfigError("grid", "points per axis must be a power of two >= 2");
        } else if (key == "dim") {
            s.suite.dim = parse_int(key, v);
            if (*s.suite.dim < 1 || *s.suite.dim > 6) throw ConfigError("dim", "dimension must be in [1, 6]");
        } else if (key == "shells") {
            s.suite.shells = parse_shells(v);
        } else if (key == "ensemble") {
            s.suite.ensemble = parse_int(key, v);
            if (*s.suite.ensemble < 1) throw ConfigError("ensemble", "ensemble size must be >= 1");
        } else if (key == "parallel") {
            s.suite.parallel = parse_int(key, v);
            if (s.suite.parallel < 1) throw ConfigError("parallel", "must be >= 1");
        } else if (key == "out") {
            if (v.empty()) throw ConfigError("out", "empty output directory");
            s.out = v;
        } else {
            s.suite.params[key] = v;
        }
    }
    return s;
}

/// Parameters a suite accepts, taken from the merged settings. With `strict`, unknown keys are errors.
inline SuiteConfig for_suite(const SuiteConfig& base, const SuiteInfo& info, bool strict) {
    SuiteConfig c = base;
    c.params.clear();
    for (const auto& [k, v] : base.params) {
        const bool known = std::find(info.params.begin(), info.params.end(), k) != info.params.end();
        if (known) c.params[k] = v;
        else if (strict) throw ConfigError(k, "not a parameter of suite '" + info.name + "'");
    }
    return c;
}

inline std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline json manifest_entry(const SuiteResult& r, const std::string& started, const std::string& finished) {
    std::size_t ok = 0;
    for (const auto& v : r.verdicts) ok += v.passed ? 1 : 0;
    json j{{"suite", r.suite},
           {"anchor", r.anchor},
           {"passed", r.passed()},
           {"verdicts_passed", ok},
           {"verdicts_total", r.verdicts.size()},
           {"report", r.suite + "/report.json"},
           {"results", r.suite + "/results.csv"},
           {"grids", r.metadata.value("grids", json::array())},
           {"started_at", started},
           {"finished_at", finished}};
    if (r.metadata.contains("time_step")) j["time_step"] = r.metadata["time_step"];
    if (r.metadata.contains("audit_total")) j["audit_total"] = r.metadata["audit_total"];
    return j;
}

/// A suite that threw a non-configuration error still produces a report with one failed verdict.
inline SuiteResult failed_result(const SuiteInfo& info, const std::exception& e) {
    SuiteResult r;
    r.suite = info.name;
    r.anchor = info.anchor;
    r.verdicts.push_back({"execution", "execution", false, 0.0, "completed", 0.0, 0.0, e.what()});
    return r;
}

/// Entry point of the command-line tool. Returns 0 when every verdict passes, 1 on a verdict failure, 2 on usage errors.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Numerical certification suites for dyadic smoothing estimates", "lpsmooth"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    std::string config_path;
    std::map<std::string, std::string> flags;
    std::vector<std::string> extra;
    auto* run_cmd = app.add_subcommand("run", "run one suite, or all of them");
    std::string suite;
    run_cmd->add_option("suite", suite, "suite name or 'all'")->required();
    run_cmd->add_option("--config", config_path, "flat key=value file; command-line flags win");
    struct FlagSpec {
        const char* name;
        const char* key;
        const char* help;
    };
    const FlagSpec specs[] = {
        {"--seed", "seed", "master seed"},
        {"--grid", "grid", "points per axis N"},
        {"--dim", "dim", "spatial dimension n"},
        {"--shells", "shells", "shell range kmin:kmax"},
        {"--ensemble", "ensemble", "ensemble size M"},
        {"--out", "out", "output directory"},
        {"--parallel", "parallel", "worker threads P"},
        {"--q", "q", "sequence or norm exponent(s)"},
        {"--lambda", "lambda", "kernel exponent or resolvent parameter re[,im]"},
        {"--mu", "mu", "kernel exponent"},
        {"--beta", "beta", "kernel decay"},
        {"--w", "w", "resolvent profile: box, packet, zero"},
    };
    std::map<std::string, std::string> flag_values;
    for (const auto& f : specs) run_cmd->add_option(f.name, flag_values[f.key], f.help);
    run_cmd->add_option("--param", extra, "suite parameter key=value (repeatable)");
    auto* list_cmd = app.add_subcommand("list", "list the suites and the estimate each certifies");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return 2;
    }

    if (list_cmd->parsed()) {
        for (const auto& s : list_suites()) out << catalog_line(s) << "\n";
        return 0;
    }

    Settings settings;
    std::vector<const SuiteInfo*> targets;
    std::map<std::string, std::string> merged;
    try {
        if (!config_path.empty()) merged = read_config_file(config_path);
        for (const auto& f : specs)
            if (!run_cmd->get_option(f.name)->empty()) merged[f.key] = flag_values[f.key];
        for (const auto& kv : extra) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos || eq == 0) throw ConfigError("param", "expected key=value, got '" + kv + "'");
            merged[kv.substr(0, eq)] = kv.substr(eq + 1);
        }
        settings = resolve(merged);
        if (suite == "all") {
            for (const auto& s : list_suites()) targets.push_back(&s);
            for (const auto& [k, v] : settings.suite.params) {
                bool known = false;
                for (const auto* t : targets) known = known || std::find(t->params.begin(), t->params.end(), k) != t->params.end();
                if (!known) throw ConfigError(k, "not a parameter of any suite");
            }
        } else {
            targets.push_back(&find_suite(suite));
            for_suite(settings.suite, *targets.front(), true);
        }
    } catch (const ConfigError& e) {
        err << "usage error: invalid config field '" << e.field() << "': " << e.what() << "\n";
        return 2;
    }

    json manifest{{"tool", "lpsmooth"}, {"version", kVersion}, {"command", "run"}, {"target", suite},
                  {"seed", settings.suite.seed}, {"config_file", config_path}, {"started_at", utc_timestamp()}};
    json effective = json::object();
    for (const auto& [k, v] : merged) effective[k] = v;
    manifest["settings"] = effective;
    manifest["suites"] = json::array();
    bool all_passed = true;
    try {
        for (const auto* info : targets) {
            const std::string started = utc_timestamp();
            SuiteResult r;
            try {
                r = run_suite(info->name, for_suite(settings.suite, *info, suite != "all"));
            } catch (const ConfigError&) {
                throw;
            } catch (const std::exception& e) {
                r = failed_result(*info, e);
            }
            write_suite_outputs(settings.out, r);
            manifest["suites"].push_back(manifest_entry(r, started, utc_timestamp()));
            all_passed = all_passed && r.passed();
            out << (r.passed() ? "PASS " : "FAIL ") << r.suite << "\n";
            for (const auto& v : r.verdicts)
                if (!v.passed) out << "  failed: " << v.name << " measured " << format_number(v.measured) << " " << v.relation << " "
                                   << format_number(v.threshold) << "\n";
        }
    } catch (const ConfigError& e) {
        err << "usage error: invalid config field '" << e.field() << "': " << e.what() << "\n";
        return 2;
    }
    manifest["passed"] = all_passed;
    manifest["finished_at"] = utc_timestamp();
    write_text(settings.out / "manifest.json", manifest.dump(2) + "\n");
    return all_passed ? 0 : 1;
}

} // namespace lpsmooth::cli
