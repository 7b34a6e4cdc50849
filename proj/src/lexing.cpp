#include "srcguard/lexing.hpp"

#include <algorithm>
#include <array>

#include "srcguard/utf8.hpp"

namespace srcguard::lex {

namespace {

std::size_t cp_length(unsigned char lead) {
    if (lead < 0xC0) return 1;
    if (lead < 0xE0) return 2;
    if (lead < 0xF0) return 3;
    return 4;
}

std::size_t next_cp(std::string_view text, std::size_t pos) {
    return std::min(text.size(), pos + cp_length(static_cast<unsigned char>(text[pos])));
}

// Counts line terminators (LF, CR, CRLF, NEL, LS, PS) incrementally.
class LineCounter {
public:
    explicit LineCounter(std::string_view text) : text_(text) {}

    std::size_t line_at(std::size_t offset) {
        for (; pos_ < offset; ++pos_) {
            const auto c = static_cast<unsigned char>(text_[pos_]);
            if (c == '\n') {
                ++line_;
            } else if (c == '\r') {
                if (pos_ + 1 >= text_.size() || text_[pos_ + 1] != '\n') ++line_;
            } else if (c == 0xC2 && pos_ + 1 < text_.size() && static_cast<unsigned char>(text_[pos_ + 1]) == 0x85) {
                ++line_;
            } else if (c == 0xE2 && pos_ + 2 < text_.size() && static_cast<unsigned char>(text_[pos_ + 1]) == 0x80) {
                const auto c2 = static_cast<unsigned char>(text_[pos_ + 2]);
                if (c2 == 0xA8 || c2 == 0xA9) ++line_;
            }
        }
        return line_;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
};

enum class OpenerKind { LineComment, BlockComment, String };

struct Opener {
    std::string_view text;
    OpenerKind kind;
    std::size_t index;
};

bool is_ascii_letter(char32_t cp) { return (cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z'); }

}  // namespace

std::string_view to_string(SpanKind kind) {
    switch (kind) {
        case SpanKind::Code: return "code";
        case SpanKind::LineComment: return "line_comment";
        case SpanKind::BlockComment: return "block_comment";
        case SpanKind::StringLiteral: return "string";
    }
    return "code";
}

std::vector<Span> classify_spans(std::string_view text, const LanguageProfile& profile) {
    std::vector<Opener> openers;
    for (std::size_t i = 0; i < profile.line_comments.size(); ++i)
        openers.push_back({profile.line_comments[i], OpenerKind::LineComment, i});
    for (std::size_t i = 0; i < profile.block_comments.size(); ++i)
        openers.push_back({profile.block_comments[i].open, OpenerKind::BlockComment, i});
    for (std::size_t i = 0; i < profile.strings.size(); ++i)
        openers.push_back({profile.strings[i].open, OpenerKind::String, i});
    // Longest first, so `"""` wins over `"`.
    std::stable_sort(openers.begin(), openers.end(),
                     [](const Opener& a, const Opener& b) { return a.text.size() > b.text.size(); });

    std::array<bool, 256> may_open{};
    for (const auto& o : openers) may_open[static_cast<unsigned char>(o.text.front())] = true;

    std::vector<Span> spans;
    LineCounter lines(text);
    const auto emit = [&](std::size_t start, std::size_t end, SpanKind kind) {
        if (start < end) spans.push_back({start, end, kind, lines.line_at(start)});
    };
    const auto at = [&](std::size_t pos, std::string_view s) { return text.substr(pos, s.size()) == s; };

    std::size_t code_start = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        if (!may_open[static_cast<unsigned char>(text[pos])]) {
            pos = next_cp(text, pos);
            continue;
        }
        const Opener* hit = nullptr;
        for (const auto& o : openers) {
            if (at(pos, o.text)) {
                hit = &o;
                break;
            }
        }
        if (!hit) {
            pos = next_cp(text, pos);
            continue;
        }
        emit(code_start, pos, SpanKind::Code);
        std::size_t p = pos + hit->text.size();
        SpanKind kind = SpanKind::Code;
        switch (hit->kind) {
            case OpenerKind::LineComment:
                kind = SpanKind::LineComment;
                while (p < text.size() && text[p] != '\n' && text[p] != '\r') p = next_cp(text, p);
                break;
            case OpenerKind::BlockComment: {
                kind = SpanKind::BlockComment;
                const auto& bc = profile.block_comments[hit->index];
                int depth = 1;
                const char close0 = bc.close.front(), open0 = bc.open.front();
                while (p < text.size()) {
                    if (text[p] != close0 && (!bc.nestable || text[p] != open0)) {
                        p = next_cp(text, p);
                    } else if (at(p, bc.close)) {
                        p += bc.close.size();
                        if (--depth == 0) break;
                    } else if (bc.nestable && at(p, bc.open)) {
                        p += bc.open.size();
                        ++depth;
                    } else {
                        p = next_cp(text, p);
                    }
                }
                break;
            }
            case OpenerKind::String: {
                kind = SpanKind::StringLiteral;
                const auto& sd = profile.strings[hit->index];
                std::string escape;
                if (sd.escape) utf8::append(escape, *sd.escape);
                const char close0 = sd.close.front();
                const char escape0 = escape.empty() ? close0 : escape.front();
                while (p < text.size()) {
                    const char c = text[p];
                    if (c != close0 && c != escape0 && c != '\n' && c != '\r') {
                        p = next_cp(text, p);
                    } else if (!escape.empty() && at(p, escape)) {
                        p += escape.size();
                        if (p < text.size()) {
                            // A CRLF after a line continuation counts as one break.
                            if (text[p] == '\r' && p + 1 < text.size() && text[p + 1] == '\n') ++p;
                            p = next_cp(text, p);
                        }
                    } else if (at(p, sd.close)) {
                        p += sd.close.size();
                        break;
                    } else if (!sd.multiline && (text[p] == '\n' || text[p] == '\r')) {
                        break;
                    } else {
                        p = next_cp(text, p);
                    }
                }
                break;
            }
        }
        emit(pos, p, kind);
        pos = code_start = p;
    }
    emit(code_start, text.size(), SpanKind::Code);
    return spans;
}

bool is_identifier_start(char32_t cp, const IdentifierRules& rules, const UnicodeTables& tables) {
    if (cp == '_' || is_ascii_letter(cp)) return true;
    if (rules.extra_start.find(cp) != std::u32string::npos) return true;
    if (rules.charset == IdentifierCharset::Ascii || cp < 0x80) return false;
    return is_letter(tables.general_category(cp));
}

bool is_identifier_continue(char32_t cp, const IdentifierRules& rules, const UnicodeTables& tables) {
    if (cp == '_' || is_ascii_letter(cp) || (cp >= '0' && cp <= '9')) return true;
    if (rules.extra_continue.find(cp) != std::u32string::npos || rules.extra_start.find(cp) != std::u32string::npos)
        return true;
    if (rules.charset == IdentifierCharset::Ascii || cp < 0x80) return false;
    const auto gc = tables.general_category(cp);
    return is_letter(gc) || is_mark(gc) || gc == GeneralCategory::Nd;
}

std::vector<IdentifierOccurrence> extract_identifiers(std::string_view text, const LanguageProfile& profile,
                                                      const UnicodeTables& tables, std::string_view path) {
    return extract_identifiers(text, classify_spans(text, profile), profile, tables, path);
}

namespace {

// Calls visit(start, end) for every identifier in Code spans.
template <class Visit>
void visit_identifiers(std::string_view text, const std::vector<Span>& spans, const IdentifierRules& rules,
                       const UnicodeTables& tables, Visit&& visit) {
    for (const auto& span : spans) {
        if (span.kind != SpanKind::Code) continue;
        std::size_t pos = span.start;
        while (pos < span.end) {
            const auto lead = static_cast<unsigned char>(text[pos]);
            // Fast path for ASCII bytes that can't begin a word.
            if (lead < 0x80 && !(lead == '_' || is_ascii_letter(lead) || (lead >= '0' && lead <= '9')) &&
                rules.extra_start.find(lead) == std::u32string::npos) {
                ++pos;
                continue;
            }
            const std::size_t len = std::min(cp_length(lead), span.end - pos);
            const char32_t cp = lead < 0x80 ? lead : utf8::to_u32(text.substr(pos, len)).front();
            const bool digit = cp >= '0' && cp <= '9';
            const bool start = !digit && is_identifier_start(cp, rules, tables);
            const bool number = digit || (cp >= 0x80 && tables.general_category(cp) == GeneralCategory::Nd);
            if (!start && !number) {
                pos += len;
                continue;
            }
            const std::size_t word_start = pos;
            pos += len;
            while (pos < span.end) {
                const auto b = static_cast<unsigned char>(text[pos]);
                if (b < 0x80) {
                    if (b == '_' || is_ascii_letter(b) || (b >= '0' && b <= '9') ||
                        is_identifier_continue(b, rules, tables)) {
                        ++pos;
                        continue;
                    }
                    break;
                }
                const std::size_t l = std::min(cp_length(b), span.end - pos);
                if (!is_identifier_continue(utf8::to_u32(text.substr(pos, l)).front(), rules, tables)) break;
                pos += l;
            }
            if (start) visit(word_start, pos);
        }
    }
}

}  // namespace

std::vector<IdentifierOccurrence> extract_identifiers(std::string_view text, const std::vector<Span>& spans,
                                                      const LanguageProfile& profile, const UnicodeTables& tables,
                                                      std::string_view path) {
    std::vector<IdentifierOccurrence> out;
    std::size_t line = 1;
    std::size_t column = 1;
    std::size_t cursor = 0;  // position up to which line/column are known
    bool pending_cr = false;
    // Advances the line/column tracker to `target`, which is on a boundary.
    const auto advance_to = [&](std::size_t target) {
        while (cursor < target) {
            const auto lead = static_cast<unsigned char>(text[cursor]);
            const std::size_t len = cp_length(lead);
            char32_t cp = lead;
            if (len > 1) {
                const auto d = utf8::to_u32(text.substr(cursor, len));
                cp = d.empty() ? utf8::replacement_char : d.front();
            }
            if (cp == '\n' && pending_cr) {
                pending_cr = false;
            } else if (utf8::is_line_break(cp)) {
                ++line;
                column = 1;
                pending_cr = cp == '\r';
            } else {
                ++column;
                pending_cr = false;
            }
            cursor += len;
        }
    };
    visit_identifiers(text, spans, profile.identifiers, tables, [&](std::size_t start, std::size_t end) {
        advance_to(start);
        out.push_back({utf8::to_u32(text.substr(start, end - start)), std::string(path), line, column, start});
    });
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> identifier_ranges(std::string_view text, const std::vector<Span>& spans,
                                                                   const LanguageProfile& profile,
                                                                   const UnicodeTables& tables) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    visit_identifiers(text, spans, profile.identifiers, tables,
                      [&](std::size_t start, std::size_t end) { out.emplace_back(start, end); });
    return out;
}

}  // namespace srcguard::lex
