#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <lpsmooth/cli.hpp>

using namespace lpsmooth;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("lpsmooth_cli_" + std::to_string(::getpid()) + "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    struct Outcome {
        int code;
        std::string out, err;
    };

    /// Runs the built binary with the given argument string.
    Outcome invoke(const std::string& args) const {
        const auto o = dir_ / "stdout.txt", e = dir_ / "stderr.txt";
        const std::string cmd = std::string("\"") + LPSMOOTH_CLI_PATH + "\" " + args + " > \"" + o.string() + "\" 2> \"" + e.string() + "\"";
        const int status = std::system(cmd.c_str());
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(o), slurp(e)};
    }

    static std::string slurp(const fs::path& p) {
        std::ifstream is(p, std::ios::binary);
        std::stringstream ss;
        ss << is.rdbuf();
        return ss.str();
    }

    fs::path dir_;
};

} // namespace

TEST(Config, FlatFileParsing) {
    const auto p = fs::temp_directory_path() / ("lpsmooth_cfg_" + std::to_string(::getpid()) + ".conf");
    std::ofstream(p) << "# comment\n\nseed = 7\nshells=0:2\n  q = 1,inf  \n";
    const auto kv = cli::read_config_file(p);
    EXPECT_EQ(kv.at("seed"), "7");
    EXPECT_EQ(kv.at("shells"), "0:2");
    EXPECT_EQ(kv.at("q"), "1,inf");
    std::ofstream(p) << "seed 7\n";
    try {
        cli::read_config_file(p);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field(), "config:1");
    }
    fs::remove(p);
}

TEST(Config, InvalidValuesNameTheField) {
    auto field_of = [](const std::map<std::string, std::string>& m) {
        try {
            cli::resolve(m);
        } catch (const ConfigError& e) {
            return e.field();
        }
        return std::string("none");
    };
    EXPECT_EQ(field_of({{"grid", "30"}}), "grid");
    EXPECT_EQ(field_of({{"grid", "abc"}}), "grid");
    EXPECT_EQ(field_of({{"dim", "0"}}), "dim");
    EXPECT_EQ(field_of({{"shells", "3:1"}}), "shells");
    EXPECT_EQ(field_of({{"shells", "x"}}), "shells");
    EXPECT_EQ(field_of({{"seed", "-1"}}), "seed");
    EXPECT_EQ(field_of({{"ensemble", "0"}}), "ensemble");
    EXPECT_EQ(field_of({{"parallel", "0"}}), "parallel");
    EXPECT_EQ(field_of({{"seed", "3"}, {"grid", "64"}, {"shells", "-1:2"}}), "none");
    const auto s = cli::resolve({{"seed", "3"}, {"q", "2"}, {"out", "x"}});
    EXPECT_EQ(s.suite.seed, 3u);
    EXPECT_EQ(s.suite.params.at("q"), "2");
    EXPECT_EQ(s.out, fs::path("x"));
}

TEST(Config, SuiteParametersAreCheckedAgainstTheCatalog) {
    SuiteConfig c;
    c.params["mu"] = "0.5";
    EXPECT_NO_THROW(cli::for_suite(c, find_suite("discrete-bounds"), true));
    EXPECT_THROW(cli::for_suite(c, find_suite("kpv"), true), ConfigError);
    EXPECT_TRUE(cli::for_suite(c, find_suite("kpv"), false).params.empty());
    EXPECT_THROW(run_suite("kpv", c), ConfigError);
    EXPECT_THROW(find_suite("nope"), ConfigError);
    SuiteConfig bad;
    bad.params["points"] = "many";
    try {
        run_suite("partition", bad);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field(), "points");
    }
}

TEST(Catalog, ThirteenSuitesWithDescriptiveAnchors) {
    const auto& cat = list_suites();
    ASSERT_EQ(cat.size(), 13u);
    std::set<std::string> names;
    for (const auto& s : cat) {
        names.insert(s.name);
        EXPECT_FALSE(s.anchor.empty());
        EXPECT_EQ(s.anchor.find_first_of("0123456789"), std::string::npos) << s.anchor;
    }
    EXPECT_EQ(names.size(), 13u);
    EXPECT_EQ(catalog_line(find_suite("kpv")), "kpv → smoothing estimate");
}

TEST_F(CliTest, ListPrintsTheCatalog) {
    const auto r = invoke("list");
    EXPECT_EQ(r.code, 0);
    std::istringstream is(r.out);
    int lines = 0;
    for (std::string line; std::getline(is, line);) ++lines;
    EXPECT_EQ(lines, 13);
    EXPECT_NE(r.out.find("kpv → smoothing estimate\n"), std::string::npos);
    EXPECT_NE(r.out.find("semilinear → "), std::string::npos);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
    EXPECT_EQ(invoke("").code, 2);
    EXPECT_EQ(invoke("frobnicate").code, 2);
    EXPECT_EQ(invoke("run").code, 2);
    const auto unknown = invoke("run nope --out \"" + (dir_ / "o").string() + "\"");
    EXPECT_EQ(unknown.code, 2);
    EXPECT_NE(unknown.err.find("'suite'"), std::string::npos);
    const auto shells = invoke("run partition --shells 4:1 --out \"" + (dir_ / "o").string() + "\"");
    EXPECT_EQ(shells.code, 2);
    EXPECT_NE(shells.err.find("'shells'"), std::string::npos);
    const auto param = invoke("run kpv --beta 1 --out \"" + (dir_ / "o").string() + "\"");
    EXPECT_EQ(param.code, 2);
    EXPECT_NE(param.err.find("'beta'"), std::string::npos);
    // shell range the grid cannot resolve
    const auto range = invoke("run equivalence --shells=-3:4 --out \"" + (dir_ / "o").string() + "\"");
    EXPECT_EQ(range.code, 2);
    EXPECT_NE(range.err.find("'shells'"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir_ / "o" / "manifest.json"));
}

TEST_F(CliTest, ConfigFileErrorsNameTheFieldAndFlagsWin) {
    const auto cfg = dir_ / "run.conf";
    std::ofstream(cfg) << "grid = 30\nseed = 5\n";
    const auto bad = invoke("run partition --config \"" + cfg.string() + "\" --out \"" + (dir_ / "a").string() + "\"");
    EXPECT_EQ(bad.code, 2);
    EXPECT_NE(bad.err.find("'grid'"), std::string::npos);
    const auto good = invoke("run partition --config \"" + cfg.string() + "\" --grid 32 --out \"" + (dir_ / "b").string() + "\"");
    EXPECT_EQ(good.code, 0) << good.err;
    const auto manifest = json::parse(slurp(dir_ / "b" / "manifest.json"));
    EXPECT_EQ(manifest.at("seed"), 5);
    EXPECT_EQ(manifest.at("settings").at("grid"), "32");
    EXPECT_EQ(manifest.at("suites").at(0).at("grids").at(0).at("points"), 32);
}

TEST_F(CliTest, RunWritesOutputsAndIsDeterministic) {
    const auto a = invoke("run resolvent-1d --seed 11 --out \"" + (dir_ / "a").string() + "\"");
    const auto b = invoke("run resolvent-1d --seed 11 --out \"" + (dir_ / "b").string() + "\"");
    ASSERT_EQ(a.code, 0) << a.out << a.err;
    ASSERT_EQ(b.code, 0);
    for (const char* f : {"manifest.json", "resolvent-1d/report.json", "resolvent-1d/results.csv"}) EXPECT_TRUE(fs::exists(dir_ / "a" / f)) << f;
    const std::string csv = slurp(dir_ / "a" / "resolvent-1d" / "results.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), kCsvHeader);
    EXPECT_EQ(csv, slurp(dir_ / "b" / "resolvent-1d" / "results.csv"));
    // reports are identical, the manifest differs only in timestamps
    EXPECT_EQ(slurp(dir_ / "a" / "resolvent-1d" / "report.json"), slurp(dir_ / "b" / "resolvent-1d" / "report.json"));
    auto strip = [](json m) {
        m.erase("started_at");
        m.erase("finished_at");
        m["settings"].erase("out");
        for (auto& s : m["suites"]) {
            s.erase("started_at");
            s.erase("finished_at");
        }
        return m;
    };
    EXPECT_EQ(strip(json::parse(slurp(dir_ / "a" / "manifest.json"))), strip(json::parse(slurp(dir_ / "b" / "manifest.json"))));
    const auto c = invoke("run resolvent-1d --seed 12 --out \"" + (dir_ / "c").string() + "\"");
    EXPECT_NE(csv, slurp(dir_ / "c" / "resolvent-1d" / "results.csv"));
    const auto report = json::parse(slurp(dir_ / "a" / "resolvent-1d" / "report.json"));
    EXPECT_EQ(report.at("anchor"), "one-dimensional resolvent bound");
    EXPECT_TRUE(report.at("passed").get<bool>());
    EXPECT_TRUE(report.contains("ensemble"));
    EXPECT_TRUE(report.contains("scale_probes"));
}

TEST_F(CliTest, RequestedResolventCase) {
    const auto r = invoke("run resolvent-1d --lambda -1 --w box --out \"" + (dir_ / "o").string() + "\"");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto report = json::parse(slurp(dir_ / "o" / "resolvent-1d" / "report.json"));
    EXPECT_NEAR(report.at("scale_probes").at("requested_sup_v").get<double>(), 1.0 - std::exp(-1.0), 1e-6);
    EXPECT_EQ(invoke("run resolvent-1d --lambda 0 --out \"" + (dir_ / "o").string() + "\"").code, 2);
    EXPECT_EQ(invoke("run resolvent-1d --w sphere --out \"" + (dir_ / "o").string() + "\"").code, 2);
}

TEST_F(CliTest, VerdictFailureExitsOneAndStillWritesReports) {
    // beta below the summability threshold: the window norms grow, so the drift verdicts fail
    const auto r = invoke("run discrete-bounds --beta 0.9 --q 1 --out \"" + (dir_ / "o").string() + "\"");
    EXPECT_EQ(r.code, 1) << r.err;
    EXPECT_NE(r.out.find("FAIL discrete-bounds"), std::string::npos);
    const auto report = json::parse(slurp(dir_ / "o" / "discrete-bounds" / "report.json"));
    EXPECT_FALSE(report.at("passed").get<bool>());
    EXPECT_TRUE(fs::exists(dir_ / "o" / "discrete-bounds" / "results.csv"));
    EXPECT_FALSE(json::parse(slurp(dir_ / "o" / "manifest.json")).at("passed").get<bool>());
}
