// Acceptance run: every suite at its defaults, one PASS/FAIL line per criterion with the measured runtime.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <lpsmooth/suites.hpp>

using namespace lpsmooth;

namespace {

struct Criterion {
    int number;
    const char* title;
    const char* suite;
    const char* group;
    double seconds_limit;
};

const std::vector<Criterion> kCriteria{
    {1, "dyadic partition of unity", "partition", "partition", 5},
    {2, "discrete kernel bound", "discrete-bounds", "discrete", 10},
    {3, "commutator off-diagonal decay", "commutator-scan", "commutator", 180},
    {4, "norm-ordering equivalence", "equivalence", "equivalence", 120},
    {5, "phase-localized embeddings", "phase-localization", "phase", 120},
    {6, "smoothing estimate", "kpv", "kpv", 300},
    {7, "magnetic smoothing estimate", "main-estimate", "main", 300},
    {8, "one-dimensional resolvent bound", "resolvent-1d", "resolvent", 5},
    {9, "mixed-norm and shell inclusions", "mixed-norm", "mixed", 180},
    {10, "free propagator", "endpoint", "free", 10},
    {11, "magnetic solver", "main-estimate", "magnetic", 120},
    {12, "semilinear well-posedness", "semilinear", "semilinear", 600},
};

void print_failures(const SuiteResult& r, const std::string& group) {
    for (const auto& v : r.verdicts)
        if (v.group == group && !v.passed)
            std::cout << "    failed " << v.name << ": measured " << format_number(v.measured) << " " << v.relation << " "
                      << format_number(v.threshold) << (v.relation == "in" ? " " + format_number(v.upper) : std::string()) << "\n";
}

} // namespace

int main() {
    SuiteConfig cfg;
    cfg.seed = 1;
    std::map<std::string, SuiteResult> results;
    bool all = true;
    for (const auto& info : list_suites()) {
        try {
            results[info.name] = run_suite(info.name, cfg);
        } catch (const std::exception& e) {
            std::cout << "suite " << info.name << " aborted: " << e.what() << "\n";
            all = false;
        }
    }
    for (const auto& c : kCriteria) {
        const auto it = results.find(c.suite);
        bool ok = false;
        double secs = 0.0;
        if (it != results.end()) {
            secs = it->second.group_seconds.count(c.group) ? it->second.group_seconds.at(c.group) : 0.0;
            ok = it->second.group_passed(c.group) && secs < c.seconds_limit;
        }
        char line[256];
        std::snprintf(line, sizeof line, "%s criterion %2d: %-34s %8.2f s (limit %.0f s)", ok ? "PASS" : "FAIL", c.number, c.title, secs,
                      c.seconds_limit);
        std::cout << line << "\n";
        if (!ok && it != results.end()) print_failures(it->second, c.group);
        all = all && ok;
    }

    // Criterion 13: the same config and seed reproduce every CSV byte for byte, also with a different worker count.
    SuiteConfig again = cfg;
    again.parallel = 2;
    bool same = results.size() == list_suites().size();
    std::vector<std::string> differing;
    for (const auto& [name, r] : results) {
        bool eq = false;
        try {
            eq = csv_text(run_suite(name, again)) == csv_text(r);
        } catch (const std::exception&) {
        }
        if (!eq) differing.push_back(name);
        same = same && eq;
    }
    std::cout << (same ? "PASS" : "FAIL") << " criterion 13: byte-identical CSVs on re-run (" << results.size() << " suites)\n";
    for (const auto& d : differing) std::cout << "    differs: " << d << "\n";
    all = all && same;

    for (const auto& [name, r] : results)
        if (!r.passed()) {
            std::cout << "suite " << name << " has failing verdicts\n";
            for (const auto& v : r.verdicts)
                if (!v.passed) std::cout << "    " << v.group << "/" << v.name << ": measured " << format_number(v.measured) << "\n";
        }
    return all ? 0 : 1;
}
