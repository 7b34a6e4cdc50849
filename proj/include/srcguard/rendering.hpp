#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "srcguard/finding.hpp"
#include "srcguard/lexing.hpp"
#include "srcguard/unicode_tables.hpp"

namespace srcguard {

/// How suspect code points are made visible.
///
/// An escape reads `⟦U+202E RLO⟧`: open marker, the code point label,
/// the Unicode short alias when one exists, close marker.
struct RenderStyle {
    std::string open_marker = "⟦";
    std::string close_marker = "⟧";
    bool include_name = true;
    bool color = false;
    /// sanitize(): delete flagged code points everywhere instead of
    /// escaping them inside comments and strings.
    bool strip = false;
};

std::string escape_codepoint(char32_t cp, const UnicodeTables& tables, const RenderStyle& style = {});

/// Code points sanitize() and previews treat as suspect: bidi controls and
/// the invisible set, minus the policy allowlist. Callers exempt a BOM at
/// offset 0.
bool is_flagged(char32_t cp, const UnicodeTables& tables, const Policy& policy);

/// Replaces every flagged code point inside each finding's range by its
/// escape; homoglyph findings keep their characters and get an escape
/// appended after each non-ASCII one. Marker characters already present in
/// `text` are escaped too, so the output is unambiguous.
std::string visualize(std::string_view text, const std::vector<Finding>& findings, const UnicodeTables& tables,
                      const RenderStyle& style = {});

/// The line as a UAX #9 viewer shows it (LTR paragraphs, one per line),
/// with every bidi control dropped.
std::string render_preview(std::string_view text, const UnicodeTables& tables);

/// Escapes flagged code points inside comments and strings and deletes
/// them from code (or deletes them everywhere in strip mode).
std::string sanitize(std::string_view text, const lex::LanguageProfile& profile, const UnicodeTables& tables,
                     const Policy& policy, const RenderStyle& style = {});

/// One-line evidence excerpt: `line` with every bidi control and invisible
/// escaped, homoglyph annotations for [site_begin, site_end) when
/// `annotate_site` is set, clipped to about `width` code points around the
/// site.
std::string evidence_preview(std::string_view line, std::size_t site_begin, std::size_t site_end, bool annotate_site,
                             const UnicodeTables& tables, std::size_t width = 120);

namespace ansi {
inline constexpr std::string_view red = "\x1b[31m";
inline constexpr std::string_view yellow = "\x1b[33m";
inline constexpr std::string_view cyan = "\x1b[36m";
inline constexpr std::string_view bold = "\x1b[1m";
inline constexpr std::string_view reset = "\x1b[0m";
}  // namespace ansi

}  // namespace srcguard
