#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "srcguard/detection.hpp"
#include "srcguard/finding.hpp"
#include "srcguard/lexing.hpp"
#include "srcguard/unicode_tables.hpp"

namespace srcguard {

/// False only when `bytes` cannot hold a finding: every rule needs a
/// non-ASCII code point, so this tests for any byte >= 0x80.
bool prefilter(std::string_view bytes);

/// Second-stage filter for bidi-only scans: true when the UTF-8 encoding
/// of a bidi control (E2 80 AA..AE, E2 81 A6..A9) occurs.
bool prefilter_bidi(std::string_view bytes);

enum class ReportFormat : std::uint8_t { Human, Lines, Sarif };
std::optional<ReportFormat> parse_format(std::string_view name);

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ScanConfig {
    std::vector<std::filesystem::path> paths;
    Policy policy;
    ReportFormat format = ReportFormat::Human;
    std::optional<std::filesystem::path> baseline;
    std::optional<std::filesystem::path> write_baseline;
    std::optional<std::string> language;  // force one profile for every file
    std::vector<std::string> include;
    std::vector<std::string> exclude;
    std::size_t jobs = 1;
    bool use_prefilter = true;
    /// Only scan files holding a bidi control (after the ASCII prefilter).
    bool bidi_only = false;
    bool skip_hidden = true;
    bool follow_symlinks = false;

    /// Throws ConfigError.
    void validate() const;
};

/// One file picked by the walker.
struct WalkEntry {
    std::filesystem::path path;
    std::string display;  // path as reported
    std::string relative; // path below the argument it was found under
};

/// Expands `paths` into files, honoring the hidden, symlink, include and
/// exclude settings. Problems go to `diagnostics`.
std::vector<WalkEntry> walk(const ScanConfig& config, std::vector<Diagnostic>& diagnostics);

bool glob_match(std::string_view pattern, std::string_view path);

struct SessionSummary {
    std::vector<Finding> findings;    // active, in session order
    std::vector<Finding> suppressed;  // matched the baseline
    std::vector<Diagnostic> diagnostics;
    std::size_t files_seen = 0;
    std::size_t files_scanned = 0;  // passed the prefilter
    std::size_t bytes_seen = 0;
    std::size_t bytes_scanned = 0;
    std::string tables_version;
    Mode mode = Mode::Default;
    bool operational_error = false;

    std::array<std::size_t, rule_count> counts() const;
    /// Share of files that passed the prefilter, in [0, 1].
    double selectivity() const;
    /// 0 clean, 1 active findings, 2 operational error.
    int exit_code() const;
};

SessionSummary walk_and_scan(const ScanConfig& config, const UnicodeTables& tables,
                             const lex::ProfileRegistry& registry);

struct EmitOptions {
    bool color = false;
};

std::string emit_report(const SessionSummary& summary, ReportFormat format, const EmitOptions& options = {});

/// Set of hex fingerprints, one per line on disk; `#` lines are comments.
using Baseline = std::set<std::string>;

Baseline load_baseline(const std::filesystem::path& file);
/// Writes the fingerprints of active and suppressed findings, sorted.
void write_baseline(const SessionSummary& summary, const std::filesystem::path& file);

}  // namespace srcguard
