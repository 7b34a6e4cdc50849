#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace srcguard {

enum class RuleId : std::uint8_t {
    BidiUnterminated,
    BidiControlPresent,
    BidiInCode,
    InvisibleInCode,
    InvisibleInLiteral,
    TerminatorSpoof,
    ConfusableIdentifiers,
    MixedScriptIdentifier,
};
inline constexpr std::size_t rule_count = 8;

enum class Severity : std::uint8_t { Info, Warning, Error };

std::string_view to_string(Severity s);
std::optional<Severity> parse_severity(std::string_view name);

struct RuleInfo {
    RuleId id;
    std::string_view name;     // stable public identifier, e.g. BIDI_UNTERMINATED
    std::string_view cve;      // empty when the rule has no CVE
    Severity default_severity;
    std::string_view summary;
    std::string_view guidance;
    std::string_view anchor;   // section anchor in docs/rules.md
};

const std::array<RuleInfo, rule_count>& rule_reference();
const RuleInfo& rule_info(RuleId id);
inline std::string_view rule_name(RuleId id) { return rule_info(id).name; }
inline std::string_view rule_cve(RuleId id) { return rule_info(id).cve; }
std::optional<RuleId> parse_rule(std::string_view name);
std::string rule_doc_link(RuleId id);

enum class Mode : std::uint8_t { Strict, Default, Permissive };

std::string_view to_string(Mode m);
std::optional<Mode> parse_mode(std::string_view name);

struct Policy {
    Mode mode = Mode::Default;
    std::map<RuleId, Severity> overrides;
    std::set<char32_t> allowed_codepoints;
    /// Confusable identifier pairs that are never reported, either order.
    std::set<std::pair<std::u32string, std::u32string>> allowed_identifier_pairs;
    bool mixed_script_check = false;
    bool fold_case = false;

    /// Mode defaults; mixed-script checking is on in strict mode only.
    static Policy for_mode(Mode mode);

    /// Whether the mode reports `rule` at all.
    bool reports(RuleId rule) const;
    /// Severity after mode adjustments and overrides.
    Severity severity(RuleId rule) const;
    bool allows(char32_t cp) const { return allowed_codepoints.count(cp) != 0; }
    bool allows_pair(const std::u32string& a, const std::u32string& b) const;
};

struct Finding {
    RuleId rule = RuleId::BidiUnterminated;
    Severity severity = Severity::Error;
    std::string path;
    std::size_t line = 1;
    std::size_t column = 1;
    std::size_t byte_offset = 0;
    std::size_t length = 0;
    std::vector<char32_t> codepoints;
    std::string message;
    std::string preview;
    /// Hash of rule, path, code points and the normalized source line.
    std::uint64_t context_hash = 0;
    /// Baseline fingerprint: context_hash plus an ordinal among equals.
    std::uint64_t fingerprint = 0;

    std::string_view cve() const { return rule_cve(rule); }
};

/// Ordering within one unit: line, column, rule.
bool unit_order(const Finding& a, const Finding& b);
/// Ordering across a session: path first.
bool session_order(const Finding& a, const Finding& b);

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string path;
    std::string message;
};

struct ScanReport {
    std::string path;
    std::vector<Finding> findings;
    std::array<std::size_t, rule_count> counts{};
    std::string tables_version;
    std::string profile_name;
    std::vector<Diagnostic> diagnostics;

    /// Sorts findings, recomputes counts and fingerprints.
    void finalize();
};

/// FNV-1a over the parts that identify a finding independent of position.
std::uint64_t context_hash(RuleId rule, std::string_view path, const std::vector<char32_t>& codepoints,
                           std::string_view line_text);

/// Sets `fingerprint` for findings already in their final order.
void assign_fingerprints(std::vector<Finding>& findings);

std::string fingerprint_hex(std::uint64_t fingerprint);

}  // namespace srcguard
