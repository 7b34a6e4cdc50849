#include "srcguard/rendering.hpp"

#include <algorithm>

#include "srcguard/bidi.hpp"
#include "srcguard/utf8.hpp"

namespace srcguard {

namespace {

constexpr char32_t bom = 0xFEFF;

bool is_marker(std::string_view text, std::size_t offset, const RenderStyle& style) {
    const auto rest = text.substr(offset);
    return (!style.open_marker.empty() && rest.starts_with(style.open_marker)) ||
           (!style.close_marker.empty() && rest.starts_with(style.close_marker));
}

bool needs_preview_escape(char32_t cp, const UnicodeTables& tables) {
    if (tables.is_bidi_control(cp) || tables.is_invisible(cp)) return true;
    // Terminal control characters other than tab.
    return (cp < 0x20 && cp != '\t') || cp == 0x7F || (cp >= 0x80 && cp < 0xA0);
}

}  // namespace

std::string escape_codepoint(char32_t cp, const UnicodeTables& tables, const RenderStyle& style) {
    std::string out;
    if (style.color) out += ansi::red;
    out += style.open_marker;
    out += utf8::codepoint_label(cp);
    if (style.include_name) {
        if (const auto alias = tables.short_alias(cp)) {
            out += ' ';
            out += *alias;
        }
    }
    out += style.close_marker;
    if (style.color) out += ansi::reset;
    return out;
}

bool is_flagged(char32_t cp, const UnicodeTables& tables, const Policy& policy) {
    return (tables.is_bidi_control(cp) || tables.is_invisible(cp)) && !policy.allows(cp);
}

std::string visualize(std::string_view text, const std::vector<Finding>& findings, const UnicodeTables& tables,
                      const RenderStyle& style) {
    enum Action : std::uint8_t { Keep, Escape, Annotate };
    std::vector<std::uint8_t> action;
    if (!findings.empty()) action.assign(text.size(), Keep);
    for (const auto& f : findings) {
        const std::size_t begin = std::min(f.byte_offset, text.size());
        const std::size_t end = std::min(f.byte_offset + f.length, text.size());
        const bool homoglyph =
            f.rule == RuleId::ConfusableIdentifiers || f.rule == RuleId::MixedScriptIdentifier;
        for (const auto& c : utf8::decode(text.substr(begin, end - begin))) {
            const std::size_t at = begin + c.offset;
            if (homoglyph) {
                if (c.cp >= 0x80 && action[at] == Keep) action[at] = Annotate;
            } else if (std::find(f.codepoints.begin(), f.codepoints.end(), c.cp) != f.codepoints.end()) {
                action[at] = Escape;
            }
        }
    }

    std::string out;
    out.reserve(text.size() + 16 * findings.size());
    for (const auto& c : utf8::decode(text)) {
        const std::uint8_t a = action.empty() ? std::uint8_t{Keep} : action[c.offset];
        if (a == Escape || is_marker(text, c.offset, style)) {
            out += escape_codepoint(c.cp, tables, style);
            continue;
        }
        out.append(text.substr(c.offset, c.length));
        if (a == Annotate) out += escape_codepoint(c.cp, tables, style);
    }
    return out;
}

std::string render_preview(std::string_view text, const UnicodeTables& tables) {
    const std::u32string cps = utf8::to_u32(text);
    std::string out;
    out.reserve(text.size());
    for (const auto& line : bidi::split_lines(cps)) {
        const std::u32string_view content(cps.data() + line.begin, line.end - line.begin);
        const auto order = bidi::display_order(tables, content, bidi::Direction::LTR);
        for (std::size_t i : order)
            if (!tables.is_bidi_control(content[i])) utf8::append(out, content[i]);
        for (std::size_t i = line.end; i < line.terminator_end; ++i) utf8::append(out, cps[i]);
    }
    return out;
}

std::string sanitize(std::string_view text, const lex::LanguageProfile& profile, const UnicodeTables& tables,
                     const Policy& policy, const RenderStyle& style) {
    RenderStyle plain = style;
    plain.color = false;
    std::string out;
    out.reserve(text.size());
    for (const auto& span : lex::classify_spans(text, profile)) {
        const auto slice = text.substr(span.start, span.end - span.start);
        if (utf8::is_ascii(slice)) {
            out.append(slice);
            continue;
        }
        for (const auto& c : utf8::decode(slice)) {
            const std::size_t at = span.start + c.offset;
            if (!is_flagged(c.cp, tables, policy) || (c.cp == bom && at == 0)) {
                out.append(text.substr(at, c.length));
            } else if (!style.strip && span.kind != lex::SpanKind::Code) {
                out += escape_codepoint(c.cp, tables, plain);
            }
        }
    }
    return out;
}

std::string evidence_preview(std::string_view line, std::size_t site_begin, std::size_t site_end, bool annotate_site,
                             const UnicodeTables& tables, std::size_t width) {
    const auto chars = utf8::decode(line);
    std::size_t first = 0;
    std::size_t last = chars.size();
    while (first < last && (chars[first].cp == ' ' || chars[first].cp == '\t')) ++first;
    while (last > first && (chars[last - 1].cp == ' ' || chars[last - 1].cp == '\t' || chars[last - 1].cp == '\r'))
        --last;

    std::size_t site = first;
    while (site < last && chars[site].offset < site_begin) ++site;
    bool clipped_front = false;
    bool clipped_back = false;
    if (last - first > width) {
        const std::size_t lead = width / 3;
        const std::size_t start = site > first + lead ? site - lead : first;
        clipped_front = start > first;
        first = start;
        if (last - first > width) {
            last = first + width;
            clipped_back = true;
        }
    }

    const RenderStyle style;
    std::string out;
    if (clipped_front) out += "...";
    for (std::size_t i = first; i < last; ++i) {
        const auto& c = chars[i];
        if (needs_preview_escape(c.cp, tables) || is_marker(line, c.offset, style)) {
            out += escape_codepoint(c.cp, tables, style);
            continue;
        }
        out.append(line.substr(c.offset, c.length));
        if (annotate_site && c.cp >= 0x80 && c.offset >= site_begin && c.offset < site_end)
            out += escape_codepoint(c.cp, tables, style);
    }
    if (clipped_back) out += "...";
    return out;
}

}  // namespace srcguard
