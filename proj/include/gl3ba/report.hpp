#pragma once

// Verification report: per-check records, summary, and the three output
// formats (JSON document, CSV summary, human-readable text).

#include "json.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gl3ba/kernel.hpp"
#include "gl3ba/sampling.hpp"

namespace gl3ba {

using ojson = nlohmann::ordered_json;

inline constexpr int kReportSchema = 1;

enum class Verdict { pass, fail, error };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::error: return "error";
    }
    return "?";
}

/// Streaming hash of the parameters a check was evaluated at. Values are
/// hashed through their 17-digit decimal form so the hash is a function of
/// what the report would print.
class ParamHash {
public:
    ParamHash& add(double x) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g;", x);
        text_ += buf;
        return *this;
    }
    ParamHash& add(cplx z) { return add(z.real()).add(z.imag()); }
    ParamHash& add(std::span<const cplx> zs) {
        for (cplx z : zs) add(z);
        text_ += '|';
        return *this;
    }
    ParamHash& add(std::string_view s) {
        text_ += s;
        text_ += '|';
        return *this;
    }

    std::string hex() const {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(text_)));
        return buf;
    }

private:
    std::string text_;
};

struct CheckRecord {
    std::string suite;
    std::string name;
    std::string anchor;
    std::string params_hash;
    double residual = 0.0;
    double tolerance = 0.0;
    Verdict verdict = Verdict::fail;
    int draws = 1;
    std::string note; ///< empty unless something about the check needs saying

    bool solver_failure = false;
};

struct SuiteSummary {
    std::string name;
    std::size_t checks = 0;
    std::size_t passed = 0;
    double wall_seconds = 0.0;
};

struct VerificationReport {
    ojson config;  ///< echo of the effective configuration
    std::vector<CheckRecord> checks;
    std::vector<SuiteSummary> suites;
    bool include_timing = true;

    std::size_t passed() const {
        std::size_t n = 0;
        for (const auto& c : checks) n += c.verdict == Verdict::pass ? 1 : 0;
        return n;
    }
    std::size_t failed() const {
        std::size_t n = 0;
        for (const auto& c : checks) n += c.verdict == Verdict::fail ? 1 : 0;
        return n;
    }
    std::size_t errors() const {
        std::size_t n = 0;
        for (const auto& c : checks) n += c.verdict == Verdict::error ? 1 : 0;
        return n;
    }
    bool solver_failures() const {
        for (const auto& c : checks) {
            if (c.solver_failure) return true;
        }
        return false;
    }
    bool all_pass() const { return !checks.empty() && passed() == checks.size(); }
};

// Serialization

namespace detail {

inline std::string number17(double x) {
    if (!std::isfinite(x)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// ordered_json printer with every floating-point number at 17 significant
/// digits (the library's own dump uses the shortest round-trip form).
inline void write_json(std::ostream& os, const ojson& j, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type()) {
    case ojson::value_t::object: {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) os << ",\n";
            first = false;
            os << pad << ojson(it.key()).dump() << ": ";
            write_json(os, it.value(), indent, depth + 1);
        }
        os << '\n' << close_pad << '}';
        return;
    }
    case ojson::value_t::array: {
        if (j.empty()) {
            os << "[]";
            return;
        }
        os << "[\n";
        bool first = true;
        for (const auto& el : j) {
            if (!first) os << ",\n";
            first = false;
            os << pad;
            write_json(os, el, indent, depth + 1);
        }
        os << '\n' << close_pad << ']';
        return;
    }
    case ojson::value_t::number_float: os << number17(j.get<double>()); return;
    default: os << j.dump(); return;
    }
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

} // namespace detail

inline ojson to_json(const CheckRecord& c) {
    ojson j;
    j["suite"] = c.suite;
    j["check"] = c.name;
    j["anchor"] = c.anchor;
    j["params_hash"] = c.params_hash;
    j["draws"] = c.draws;
    j["residual"] = c.residual;
    j["tolerance"] = c.tolerance;
    j["verdict"] = to_string(c.verdict);
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

inline ojson to_json(const VerificationReport& r) {
    ojson j;
    j["schema"] = kReportSchema;
    j["config"] = r.config;
    ojson suites = ojson::array();
    for (const auto& s : r.suites) {
        ojson e;
        e["name"] = s.name;
        e["checks"] = s.checks;
        e["passed"] = s.passed;
        if (r.include_timing) e["wall_seconds"] = s.wall_seconds;
        suites.push_back(std::move(e));
    }
    j["suites"] = std::move(suites);
    ojson checks = ojson::array();
    for (const auto& c : r.checks) checks.push_back(to_json(c));
    j["checks"] = std::move(checks);
    ojson summary;
    summary["total"] = r.checks.size();
    summary["passed"] = r.passed();
    summary["failed"] = r.failed();
    summary["errors"] = r.errors();
    summary["verdict"] = r.all_pass() ? "pass" : "fail";
    j["summary"] = std::move(summary);
    return j;
}

inline void write_json_report(std::ostream& os, const VerificationReport& r) {
    detail::write_json(os, to_json(r), 2, 0);
    os << '\n';
}

inline void write_csv_summary(std::ostream& os, const VerificationReport& r) {
    os << "suite,check,residual,tolerance,verdict\n";
    for (const auto& c : r.checks) {
        os << detail::csv_field(c.suite) << ',' << detail::csv_field(c.name) << ',' << detail::number17(c.residual)
           << ',' << detail::number17(c.tolerance) << ',' << to_string(c.verdict) << '\n';
    }
}

inline void write_human_text(std::ostream& os, const VerificationReport& r) {
    std::string current;
    for (const auto& c : r.checks) {
        if (c.suite != current) {
            current = c.suite;
            os << "[" << current << "]\n";
        }
        char buf[64];
        std::snprintf(buf, sizeof buf, "%-5s %10.3e / %-8.1e ", c.verdict == Verdict::pass ? "PASS" :
                      c.verdict == Verdict::fail ? "FAIL" : "ERROR", c.residual, c.tolerance);
        os << "  " << buf << c.name;
        if (!c.note.empty()) os << "  (" << c.note << ")";
        os << '\n';
    }
    if (r.include_timing) {
        os << "timing:";
        for (const auto& s : r.suites) {
            char buf[64];
            std::snprintf(buf, sizeof buf, " %s=%.2fs", s.name.c_str(), s.wall_seconds);
            os << buf;
        }
        os << '\n';
    }
    os << r.passed() << "/" << r.checks.size() << " checks passed";
    if (r.errors() > 0) os << ", " << r.errors() << " errors";
    os << " -> " << (r.all_pass() ? "PASS" : "FAIL") << '\n';
}

} // namespace gl3ba
