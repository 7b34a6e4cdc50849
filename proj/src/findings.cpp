#include <algorithm>
#include <cstdio>
#include <tuple>
#include <unordered_map>

#include "srcguard/finding.hpp"

namespace srcguard {

namespace {

constexpr std::array<RuleInfo, rule_count> rules = {{
    {RuleId::BidiUnterminated, "BIDI_UNTERMINATED", "CVE-2021-42574", Severity::Error,
     "A bidirectional control opened inside a comment or string is still open at the end of that token.",
     "The open override or isolate carries over into the code that follows, so the displayed line can differ "
     "from what the compiler reads. Remove the control or close it inside the same token.",
     "bidi_unterminated"},
    {RuleId::BidiControlPresent, "BIDI_CONTROL_PRESENT", "CVE-2021-42574", Severity::Warning,
     "A comment or string contains balanced bidirectional controls.",
     "Balanced controls stay within their token and are common in right-to-left text. Check that the token "
     "displays as intended; strict mode treats this as an error.",
     "bidi_control_present"},
    {RuleId::BidiInCode, "BIDI_IN_CODE", "CVE-2021-42574", Severity::Error,
     "A bidirectional control appears outside any comment or string.",
     "Code has no legitimate use for these characters. Delete them.", "bidi_in_code"},
    {RuleId::InvisibleInCode, "INVISIBLE_IN_CODE", "", Severity::Error,
     "An invisible character appears outside any comment or string.",
     "Invisible characters can split or join identifiers and operators without any visible trace. Delete them.",
     "invisible_in_code"},
    {RuleId::InvisibleInLiteral, "INVISIBLE_IN_LITERAL", "", Severity::Warning,
     "A comment or string contains an invisible character.",
     "Some payloads need these characters; prefer an escape sequence so reviewers can see them.",
     "invisible_in_literal"},
    {RuleId::TerminatorSpoof, "TERMINATOR_SPOOF", "", Severity::Error,
     "A block comment contains what looks like its closing delimiter, broken up by invisible characters.",
     "The comment continues past the point where it appears to end, hiding the code after it. Remove the "
     "invisible characters and check where the comment really ends.",
     "terminator_spoof"},
    {RuleId::ConfusableIdentifiers, "CONFUSABLE_IDENTIFIERS", "CVE-2021-42694", Severity::Error,
     "Two distinct identifiers look the same.",
     "A homoglyph spelling can name a different function or variable than the one a reviewer sees. Rename or "
     "remove the non-ASCII spelling.",
     "confusable_identifiers"},
    {RuleId::MixedScriptIdentifier, "MIXED_SCRIPT_IDENTIFIER", "CVE-2021-42694", Severity::Warning,
     "An identifier mixes letters from more than one script.",
     "Mixed-script identifiers are a common homoglyph carrier. Use a single script per identifier.",
     "mixed_script_identifier"},
}};

constexpr std::uint64_t fnv_offset = 1469598103934665603ULL;
constexpr std::uint64_t fnv_prime = 1099511628211ULL;

void fnv(std::uint64_t& h, std::string_view bytes) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= fnv_prime;
    }
}

void fnv_u64(std::uint64_t& h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xFF;
        h *= fnv_prime;
    }
}

std::string normalize_whitespace(std::string_view line) {
    std::string out;
    bool space = false;
    for (char c : line) {
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
            space = true;
            continue;
        }
        if (space && !out.empty()) out.push_back(' ');
        space = false;
        out.push_back(c);
    }
    return out;
}

}  // namespace

std::string_view to_string(Severity s) {
    switch (s) {
        case Severity::Info: return "info";
        case Severity::Warning: return "warning";
        case Severity::Error: return "error";
    }
    return "error";
}

std::optional<Severity> parse_severity(std::string_view name) {
    if (name == "info") return Severity::Info;
    if (name == "warning") return Severity::Warning;
    if (name == "error") return Severity::Error;
    return std::nullopt;
}

const std::array<RuleInfo, rule_count>& rule_reference() { return rules; }

const RuleInfo& rule_info(RuleId id) { return rules[static_cast<std::size_t>(id)]; }

std::optional<RuleId> parse_rule(std::string_view name) {
    for (const auto& r : rules)
        if (r.name == name) return r.id;
    return std::nullopt;
}

std::string rule_doc_link(RuleId id) { return "docs/rules.md#" + std::string(rule_info(id).anchor); }

std::string_view to_string(Mode m) {
    switch (m) {
        case Mode::Strict: return "strict";
        case Mode::Default: return "default";
        case Mode::Permissive: return "permissive";
    }
    return "default";
}

std::optional<Mode> parse_mode(std::string_view name) {
    if (name == "strict") return Mode::Strict;
    if (name == "default") return Mode::Default;
    if (name == "permissive") return Mode::Permissive;
    return std::nullopt;
}

Policy Policy::for_mode(Mode mode) {
    Policy p;
    p.mode = mode;
    p.mixed_script_check = mode == Mode::Strict;
    return p;
}

bool Policy::reports(RuleId rule) const {
    if (rule == RuleId::MixedScriptIdentifier && !mixed_script_check) return false;
    if (mode != Mode::Permissive) return true;
    switch (rule) {
        case RuleId::BidiControlPresent:
        case RuleId::BidiInCode:
        case RuleId::InvisibleInLiteral:
        case RuleId::MixedScriptIdentifier: return false;
        default: return true;
    }
}

Severity Policy::severity(RuleId rule) const {
    if (const auto it = overrides.find(rule); it != overrides.end()) return it->second;
    if (mode == Mode::Strict && rule == RuleId::BidiControlPresent) return Severity::Error;
    return rule_info(rule).default_severity;
}

bool Policy::allows_pair(const std::u32string& a, const std::u32string& b) const {
    return allowed_identifier_pairs.count({a, b}) != 0 || allowed_identifier_pairs.count({b, a}) != 0;
}

bool unit_order(const Finding& a, const Finding& b) {
    return std::tie(a.line, a.column, a.rule, a.byte_offset) < std::tie(b.line, b.column, b.rule, b.byte_offset);
}

bool session_order(const Finding& a, const Finding& b) {
    if (a.path != b.path) return a.path < b.path;
    return unit_order(a, b);
}

void ScanReport::finalize() {
    std::stable_sort(findings.begin(), findings.end(), unit_order);
    counts.fill(0);
    for (const auto& f : findings) ++counts[static_cast<std::size_t>(f.rule)];
    assign_fingerprints(findings);
}

std::uint64_t context_hash(RuleId rule, std::string_view path, const std::vector<char32_t>& codepoints,
                           std::string_view line_text) {
    std::uint64_t h = fnv_offset;
    fnv(h, rule_name(rule));
    fnv(h, std::string_view("\0", 1));
    fnv(h, path);
    fnv(h, std::string_view("\0", 1));
    for (char32_t cp : codepoints) fnv_u64(h, cp);
    fnv(h, std::string_view("\0", 1));
    fnv(h, normalize_whitespace(line_text));
    return h;
}

void assign_fingerprints(std::vector<Finding>& findings) {
    std::unordered_map<std::uint64_t, std::uint64_t> seen;
    for (auto& f : findings) {
        std::uint64_t h = f.context_hash;
        fnv_u64(h, seen[f.context_hash]++);
        f.fingerprint = h;
    }
}

std::string fingerprint_hex(std::uint64_t fingerprint) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fingerprint));
    return buf;
}

}  // namespace srcguard
