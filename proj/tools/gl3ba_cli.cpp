// gl3ba: run the verification suites and emit a report.
//
//   gl3ba run [--config file.json] [--suite name]... [--seed n] [--length L]
//             [--c re[,im]] [--kappa re[,im]] [--beta re[,im]] [--tol x]
//             [--out path] [--format json-report|csv-summary|human-text]
//             [--no-timing]
//   gl3ba list-suites
//
// Exit status: 0 all checks pass, 1 a check failed, 2 bad configuration,
// 3 the Bethe-equation solver found no admissible root.

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "gl3ba/suites.hpp"

namespace {

using gl3ba::cplx;

cplx parse_complex_flag(const std::string& text, const char* flag) {
    std::stringstream ss(text);
    std::string re;
    std::string im;
    std::getline(ss, re, ',');
    std::getline(ss, im);
    try {
        std::size_t used = 0;
        const double r = std::stod(re, &used);
        if (used != re.size()) throw std::invalid_argument(re);
        double i = 0.0;
        if (!im.empty()) {
            i = std::stod(im, &used);
            if (used != im.size()) throw std::invalid_argument(im);
        }
        return {r, i};
    } catch (const std::exception&) {
        throw gl3ba::ConfigError(std::string(flag) + ": expected re or re,im, got '" + text + "'");
    }
}

void emit(const gl3ba::VerificationReport& report, const gl3ba::RunConfig& cfg, std::ostream& os) {
    switch (cfg.format) {
    case gl3ba::ReportFormat::json_report: gl3ba::write_json_report(os, report); break;
    case gl3ba::ReportFormat::csv_summary: gl3ba::write_csv_summary(os, report); break;
    case gl3ba::ReportFormat::human_text: gl3ba::write_human_text(os, report); break;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical certification of gl3 Bethe-vector identities"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run verification suites and write a report");
    std::string config_path;
    std::vector<std::string> suites;
    std::optional<std::uint64_t> seed;
    std::optional<int> length;
    std::optional<std::string> c_text;
    std::optional<std::string> kappa_text;
    std::optional<std::string> beta_text;
    std::optional<double> tol;
    std::optional<std::string> out;
    std::optional<std::string> format;
    bool no_timing = false;
    run->add_option("--config", config_path, "JSON configuration file");
    run->add_option("--suite", suites, "Suite to run (repeatable); see list-suites");
    run->add_option("--seed", seed, "Master seed");
    run->add_option("--length", length, "Chain length L");
    run->add_option("--c", c_text, "Coupling c as re or re,im");
    run->add_option("--kappa", kappa_text, "Twist eigenvalue kappa as re or re,im");
    run->add_option("--beta", beta_text, "Twist parameter beta as re or re,im");
    run->add_option("--tol", tol, "Relative tolerance for identity checks");
    run->add_option("--out", out, "Report path (default: standard output)");
    run->add_option("--format", format, "json-report, csv-summary or human-text");
    run->add_flag("--no-timing", no_timing, "Leave wall-clock fields out of the report");

    auto* list = app.add_subcommand("list-suites", "List the available suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (list->parsed()) {
        for (const auto& s : gl3ba::list_suites()) {
            std::cout << s.name << "\t" << s.description << "\n";
            for (const auto& a : s.anchors) std::cout << "\t  - " << a << "\n";
        }
        return 0;
    }

    gl3ba::RunConfig cfg;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw gl3ba::ConfigError("cannot open configuration file '" + config_path + "'");
            gl3ba::ojson doc;
            try {
                doc = gl3ba::ojson::parse(in);
            } catch (const gl3ba::ojson::parse_error& e) {
                throw gl3ba::ConfigError(std::string("configuration is not valid JSON: ") + e.what());
            }
            cfg = gl3ba::config_from_json(doc);
        }
        if (!suites.empty()) cfg.suites = suites;
        if (seed) cfg.seed = *seed;
        if (length) {
            cfg.chain.length = *length;
            if (cfg.chain.xi && static_cast<int>(cfg.chain.xi->size()) != *length) cfg.chain.xi.reset();
        }
        if (c_text) cfg.chain.c = parse_complex_flag(*c_text, "--c");
        if (kappa_text) cfg.chain.kappa = parse_complex_flag(*kappa_text, "--kappa");
        if (beta_text) cfg.chain.beta = parse_complex_flag(*beta_text, "--beta");
        if (tol) {
            if (!(*tol > 0.0)) throw gl3ba::ConfigError("--tol must be positive");
            cfg.tolerances.relative = *tol;
        }
        if (out) cfg.output = *out;
        if (format) cfg.format = gl3ba::parse_format(*format);
        if (no_timing) cfg.timing = false;
        cfg.validate();
    } catch (const gl3ba::ConfigError& e) {
        std::cerr << "gl3ba: configuration error: " << e.what() << "\n";
        return 2;
    }

    gl3ba::VerificationReport report;
    try {
        report = gl3ba::run(cfg);
    } catch (const gl3ba::ConfigError& e) {
        std::cerr << "gl3ba: configuration error: " << e.what() << "\n";
        return 2;
    }

    if (cfg.output.empty()) {
        emit(report, cfg, std::cout);
    } else {
        std::ofstream os(cfg.output);
        if (!os) {
            std::cerr << "gl3ba: cannot write '" << cfg.output << "'\n";
            return 2;
        }
        emit(report, cfg, os);
    }
    const int status = gl3ba::exit_status(report);
    if (status != 0) {
        std::cerr << "gl3ba: " << report.failed() << " failed, " << report.errors() << " errors out of "
                  << report.checks.size() << " checks\n";
    }
    return status;
}
