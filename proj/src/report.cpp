#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "srcguard/rendering.hpp"
#include "srcguard/session.hpp"
#include "srcguard/utf8.hpp"

#ifndef SRCGUARD_VERSION
#define SRCGUARD_VERSION "0.0.0"
#endif

namespace srcguard {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string plural(std::size_t n, std::string_view word) {
    std::string s = std::to_string(n) + " " + std::string(word);
    if (n != 1) s += 's';
    return s;
}

std::string percent(double share) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", share * 100.0);
    return buf;
}

ordered_json codepoint_list(const std::vector<char32_t>& cps) {
    ordered_json list = ordered_json::array();
    for (char32_t cp : cps) list.push_back(utf8::codepoint_label(cp));
    return list;
}

std::string prefilter_note(const SessionSummary& s) {
    return "prefilter passed " + std::to_string(s.files_scanned) + " of " + plural(s.files_seen, "file") + " (" +
           percent(s.selectivity()) + ")";
}

std::string human(const SessionSummary& s, const EmitOptions& options) {
    const auto paint = [&](std::string_view color, const std::string& text) {
        if (!options.color) return text;
        return std::string(color) + text + std::string(ansi::reset);
    };
    std::ostringstream out;
    const std::string tail = s.suppressed.empty() ? "" : "; " + std::to_string(s.suppressed.size()) + " suppressed by baseline";

    if (s.findings.empty()) {
        out << "srcguard: no findings; " << prefilter_note(s) << tail << "; exit status " << s.exit_code() << '\n';
        return out.str();
    }

    std::size_t errors = 0, warnings = 0;
    std::set<std::string> files;
    for (const auto& f : s.findings) {
        if (f.severity == Severity::Error) ++errors;
        if (f.severity == Severity::Warning) ++warnings;
        files.insert(f.path);
    }
    out << paint(ansi::bold, "srcguard: WARNING: " + plural(s.findings.size(), "finding") + " (" +
                                 plural(errors, "error") + ", " + plural(warnings, "warning") + ") in " +
                                 plural(files.size(), "file"))
        << "; " << prefilter_note(s) << tail << "; Unicode " << s.tables_version << '\n';

    const auto& counts = s.counts();
    out << "  rules:";
    for (const auto& r : rule_reference())
        if (counts[static_cast<std::size_t>(r.id)]) out << ' ' << r.name << '=' << counts[static_cast<std::size_t>(r.id)];
    out << '\n';

    for (const auto& f : s.findings) {
        const auto color = f.severity == Severity::Error ? ansi::red : ansi::yellow;
        out << '\n'
            << f.path << ':' << f.line << ':' << f.column << ": " << paint(color, std::string(to_string(f.severity)))
            << ": " << paint(ansi::bold, std::string(rule_name(f.rule)));
        if (!f.cve().empty()) out << " [" << f.cve() << ']';
        out << ": " << f.message << '\n';
        out << "  " << paint(color, "!") << " | " << f.preview << '\n';
        out << "    = guidance: " << rule_doc_link(f.rule) << '\n';
    }
    out << "\nexit status " << s.exit_code() << '\n';
    return out.str();
}

std::string lines(const SessionSummary& s) {
    std::string out;
    for (const auto& f : s.findings) {
        ordered_json j;
        j["rule"] = rule_name(f.rule);
        j["cve"] = f.cve().empty() ? ordered_json(nullptr) : ordered_json(f.cve());
        j["severity"] = to_string(f.severity);
        j["path"] = f.path;
        j["line"] = f.line;
        j["col"] = f.column;
        j["byte_offset"] = f.byte_offset;
        j["length"] = f.length;
        j["codepoints"] = codepoint_list(f.codepoints);
        j["message"] = f.message;
        j["preview"] = f.preview;
        j["unicode_version"] = s.tables_version;
        out += j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
        out += '\n';
    }
    return out;
}

std::string sarif_level(Severity s) {
    switch (s) {
        case Severity::Error: return "error";
        case Severity::Warning: return "warning";
        case Severity::Info: return "note";
    }
    return "error";
}

std::string rule_pascal(std::string_view name) {
    std::string out;
    bool upper = true;
    for (char c : name) {
        if (c == '_') {
            upper = true;
            continue;
        }
        out.push_back(upper ? c : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        upper = false;
    }
    return out;
}

// Relative URI reference: keep unreserved characters and '/', encode the rest.
std::string uri_escape(std::string_view path) {
    static constexpr char hex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : path) {
        if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~' || c == '/') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 15]);
        }
    }
    return out;
}

ordered_json sarif_result(const Finding& f, bool suppressed) {
    ordered_json r;
    r["ruleId"] = rule_name(f.rule);
    r["ruleIndex"] = static_cast<std::size_t>(f.rule);
    r["level"] = sarif_level(f.severity);
    r["message"] = {{"text", f.message}};
    ordered_json region;
    region["startLine"] = f.line;
    region["startColumn"] = f.column;
    region["byteOffset"] = f.byte_offset;
    region["byteLength"] = f.length;
    region["snippet"] = {{"text", f.preview}};
    r["locations"] = ordered_json::array(
        {{{"physicalLocation", {{"artifactLocation", {{"uri", uri_escape(f.path)}}}, {"region", region}}}}});
    r["partialFingerprints"] = {{"srcguard/v1", fingerprint_hex(f.fingerprint)}};
    if (suppressed) r["suppressions"] = ordered_json::array({{{"kind", "external"}}});
    ordered_json props;
    props["codepoints"] = codepoint_list(f.codepoints);
    if (!f.cve().empty()) props["cve"] = f.cve();
    r["properties"] = props;
    return r;
}

std::string sarif(const SessionSummary& s) {
    ordered_json rules = ordered_json::array();
    for (const auto& info : rule_reference()) {
        ordered_json r;
        r["id"] = info.name;
        r["name"] = rule_pascal(info.name);
        r["shortDescription"] = {{"text", info.summary}};
        r["fullDescription"] = {{"text", info.guidance}};
        r["helpUri"] = rule_doc_link(info.id);
        r["defaultConfiguration"] = {{"level", sarif_level(info.default_severity)}};
        ordered_json props;
        props["tags"] = ordered_json::array({"security"});
        if (!info.cve.empty()) props["cve"] = info.cve;
        r["properties"] = props;
        rules.push_back(r);
    }

    ordered_json results = ordered_json::array();
    for (const auto& f : s.findings) results.push_back(sarif_result(f, false));
    for (const auto& f : s.suppressed) results.push_back(sarif_result(f, true));

    ordered_json notifications = ordered_json::array();
    for (const auto& d : s.diagnostics) {
        ordered_json n;
        n["level"] = sarif_level(d.severity);
        n["message"] = {{"text", d.path.empty() ? d.message : d.path + ": " + d.message}};
        notifications.push_back(n);
    }

    ordered_json driver;
    driver["name"] = "srcguard";
    driver["version"] = SRCGUARD_VERSION;
    driver["rules"] = rules;

    ordered_json run;
    run["tool"] = {{"driver", driver}};
    run["invocations"] = ordered_json::array(
        {{{"executionSuccessful", !s.operational_error}, {"toolExecutionNotifications", notifications}}});
    run["columnKind"] = "unicodeCodePoints";
    run["results"] = results;
    run["properties"] = {{"unicodeVersion", s.tables_version},
                         {"mode", to_string(s.mode)},
                         {"filesSeen", s.files_seen},
                         {"filesScanned", s.files_scanned}};

    ordered_json doc;
    doc["$schema"] = "https://docs.oasis-open.org/sarif/sarif/v2.1.0/errata01/os/schemas/sarif-schema-2.1.0.json";
    doc["version"] = "2.1.0";
    doc["runs"] = ordered_json::array({run});
    return doc.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

}  // namespace

std::string emit_report(const SessionSummary& summary, ReportFormat format, const EmitOptions& options) {
    switch (format) {
        case ReportFormat::Human: return human(summary, options);
        case ReportFormat::Lines: return lines(summary);
        case ReportFormat::Sarif: return sarif(summary);
    }
    throw ConfigError("unknown report format");
}

}  // namespace srcguard
