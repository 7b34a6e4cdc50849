#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "srcguard/finding.hpp"
#include "srcguard/lexing.hpp"
#include "srcguard/rendering.hpp"
#include "srcguard/unicode_tables.hpp"
#include "srcguard/utf8.hpp"

namespace srcguard {

/// A decoded unit under scan. `text` must be valid UTF-8.
struct SourceView {
    std::string_view path;
    std::string_view text;
    const utf8::LineIndex& index;
};

std::vector<Finding> detect_bidi(const SourceView& src, const std::vector<lex::Span>& spans,
                                 const UnicodeTables& tables, const Policy& policy);

std::vector<Finding> detect_invisible(const SourceView& src, const std::vector<lex::Span>& spans,
                                      const UnicodeTables& tables, const Policy& policy);

std::vector<Finding> detect_terminator_spoof(const SourceView& src, const std::vector<lex::Span>& spans,
                                             const lex::LanguageProfile& profile, const UnicodeTables& tables,
                                             const Policy& policy);

/// Identifier spellings gathered across one or more units, reduced into
/// homoglyph findings.
///
/// ASCII spellings are kept only as counts: they are the reference
/// spellings and are never reported. Non-ASCII occurrences keep their
/// location and source line for the report.
class IdentifierCensus {
public:
    void add(lex::IdentifierOccurrence occurrence, std::string_view line_text = {});
    /// Counts an ASCII spelling; ASCII spellings only serve as references.
    void add_ascii(std::string_view word);
    /// Counts every identifier of pure ASCII `bytes`.
    void add_ascii_text(std::string_view bytes, const lex::LanguageProfile& profile, const UnicodeTables& tables);
    void merge(IdentifierCensus&& other);

    bool has_non_ascii() const { return !non_ascii_.empty(); }
    std::size_t size() const { return non_ascii_.size() + ascii_total_; }

    std::vector<Finding> findings(const UnicodeTables& tables, const Policy& policy) const;

private:
    struct Entry {
        lex::IdentifierOccurrence occurrence;
        std::string line_text;
    };
    std::vector<Entry> non_ascii_;
    std::unordered_map<std::string, std::size_t> ascii_counts_;
    std::size_t ascii_total_ = 0;
};

std::vector<Finding> detect_homoglyphs(const std::vector<lex::IdentifierOccurrence>& identifiers,
                                       const UnicodeTables& tables, const Policy& policy);

/// Distinct scripts of `text`, Common and Inherited ignored, with Han
/// folded into Japanese, Korean and Bopomofo writing when it co-occurs
/// with kana, Hangul or Bopomofo.
std::set<std::string> identifier_scripts(std::u32string_view text, const UnicodeTables& tables);

struct ScanOptions {
    /// Group identifiers of this unit alone. Sessions turn this off and
    /// group across units instead.
    bool unit_homoglyphs = true;
    /// Fill `UnitScan::census`, ASCII spellings included.
    bool collect_identifiers = false;
};

struct UnitScan {
    ScanReport report;
    IdentifierCensus census;
};

UnitScan scan_unit_detailed(std::string_view path, std::string_view bytes, const lex::LanguageProfile& profile,
                            const UnicodeTables& tables, const Policy& policy, const ScanOptions& options = {});

ScanReport scan_unit(std::string_view path, std::string_view bytes, const lex::LanguageProfile& profile,
                     const UnicodeTables& tables, const Policy& policy);

}  // namespace srcguard
