#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <set>
#include <sstream>
#include <string>

#include "gl3ba/suites.hpp"

using namespace gl3ba;

namespace {

struct CliResult {
    int code;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(GL3BA_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, {}};
    std::string out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string json_text(const VerificationReport& r) {
    std::ostringstream os;
    write_json_report(os, r);
    return os.str();
}

RunConfig quick(std::vector<std::string> suites) {
    RunConfig cfg;
    cfg.suites = std::move(suites);
    cfg.timing = false;
    return cfg;
}

} // namespace

TEST(Suites, Listing) {
    const auto& all = list_suites();
    EXPECT_GE(all.size(), 12u);
    std::set<std::string> names;
    for (const auto& s : all) {
        EXPECT_TRUE(names.insert(s.name).second) << s.name;
        EXPECT_FALSE(s.description.empty());
    }
    for (const char* want : {"all", "dwpf", "rtt", "comatrix", "bg-operator", "bethe-vectors", "duality", "actions",
                             "multi-action", "semi-onshell", "solver", "onshell"}) {
        EXPECT_TRUE(names.count(want)) << want;
    }
    EXPECT_EQ(find_suite("nope"), nullptr);
    EXPECT_THROW(resolve_suites({"nope"}), ConfigError);
    EXPECT_EQ(resolve_suites({"all"}).size(), all.size() - 1);
}

TEST(Config, ParsesJson) {
    const ojson doc = ojson::parse(R"({"chain": {"L": 3, "kappa": [0.5, 0.2], "c": 1.0},
                                       "seeds": 7, "suites": ["rtt"], "format": "csv-summary"})");
    const RunConfig cfg = config_from_json(doc);
    EXPECT_EQ(cfg.chain.length, 3);
    EXPECT_EQ(cfg.chain.kappa, cplx(0.5, 0.2));
    EXPECT_EQ(cfg.seed, 7u);
    EXPECT_EQ(cfg.format, ReportFormat::csv_summary);
    EXPECT_THROW(config_from_json(ojson::parse(R"({"bogus": 1})")), ConfigError);
}

TEST(Config, ValidationDiagnostics) {
    RunConfig cfg;
    cfg.chain.kappa = 1.0;
    try {
        cfg.validate();
        FAIL() << "kappa = 1 accepted";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("twist"), std::string::npos);
    }
    cfg = RunConfig{};
    cfg.chain.length = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = RunConfig{};
    cfg.chain.beta = 0.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    EXPECT_THROW(parse_format("xml"), ConfigError);
}

TEST(Run, SameSeedSameReport) {
    const RunConfig cfg = quick({"rtt", "bethe-vectors", "solver"});
    EXPECT_EQ(json_text(run(cfg)), json_text(run(cfg)));
}

TEST(Run, SeedChangesDraws) {
    RunConfig a = quick({"rtt"});
    RunConfig b = a;
    b.seed = a.seed + 1;
    const auto ra = run(a);
    const auto rb = run(b);
    ASSERT_EQ(ra.checks.size(), rb.checks.size());
    EXPECT_NE(ra.checks.front().params_hash, rb.checks.front().params_hash);
}

TEST(Run, AllSuitesPassAtTwoSites) {
    const VerificationReport r = run(quick({"all"}));
    EXPECT_GE(r.checks.size(), 40u);
    for (const auto& c : r.checks) {
        EXPECT_EQ(c.verdict, Verdict::pass) << c.suite << ": " << c.name << " residual " << c.residual;
        EXPECT_LE(c.residual, c.tolerance);
    }
    EXPECT_EQ(exit_status(r), 0);
}

TEST(Report, Formats) {
    const VerificationReport r = run(quick({"comatrix"}));
    std::ostringstream csv;
    write_csv_summary(csv, r);
    EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "suite,check,residual,tolerance,verdict");
    const ojson j = ojson::parse(json_text(r));
    EXPECT_EQ(j["schema"], kReportSchema);
    EXPECT_EQ(j["summary"]["total"], r.checks.size());
    EXPECT_FALSE(j["suites"][0].contains("wall_seconds"));
    EXPECT_EQ(j["config"]["chain"]["xi_values"].size(), 2u);
    std::ostringstream text;
    write_human_text(text, r);
    EXPECT_NE(text.str().find("checks passed"), std::string::npos);
}

TEST(Report, NonFiniteResidualIsNull) {
    VerificationReport r;
    CheckRecord c;
    c.suite = "x";
    c.name = "y";
    c.residual = std::numeric_limits<double>::infinity();
    c.verdict = Verdict::error;
    r.checks.push_back(c);
    const ojson j = ojson::parse(json_text(r));
    EXPECT_TRUE(j["checks"][0]["residual"].is_null());
    EXPECT_FALSE(r.all_pass());
}

TEST(Cli, ExitCodeContract) {
    EXPECT_EQ(run_cli("run --suite rtt --no-timing").code, 0);
    EXPECT_EQ(run_cli("list-suites").code, 0);
    EXPECT_EQ(run_cli("run --kappa 1").code, 2);
    EXPECT_EQ(run_cli("run --suite nope").code, 2);
    EXPECT_EQ(run_cli("run --length 9").code, 2);
    EXPECT_EQ(run_cli("run --format xml").code, 2);
    EXPECT_EQ(run_cli("run --bogus-flag").code, 2);
    // tolerance below rounding: identity checks fail
    EXPECT_EQ(run_cli("run --suite duality --tol 1e-30").code, 1);
    // at L = 1 the (1,1) system lambda(u) = 1 has no finite root
    EXPECT_EQ(run_cli("run --suite bg-operator --length 1").code, 3);
}

TEST(Cli, ByteIdenticalReports) {
    const CliResult a = run_cli("run --suite dwpf --suite solver --no-timing --format csv-summary");
    const CliResult b = run_cli("run --suite dwpf --suite solver --no-timing --format csv-summary");
    ASSERT_EQ(a.code, 0);
    EXPECT_FALSE(a.out.empty());
    EXPECT_EQ(a.out, b.out);
}
