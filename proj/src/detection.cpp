#include "srcguard/detection.hpp"

#include <algorithm>

namespace srcguard {

namespace {

constexpr char32_t bom = 0xFEFF;

bool is_opener(const UnicodeTables& tables, char32_t cp) {
    switch (tables.bidi_class(cp)) {
        case BidiClass::LRE:
        case BidiClass::RLE:
        case BidiClass::LRO:
        case BidiClass::RLO:
        case BidiClass::LRI:
        case BidiClass::RLI:
        case BidiClass::FSI: return true;
        default: return false;
    }
}

std::string control_name(const UnicodeTables& tables, char32_t cp) {
    if (const auto alias = tables.short_alias(cp)) return std::string(*alias);
    return utf8::codepoint_label(cp);
}

std::string_view context_name(lex::SpanKind kind) {
    switch (kind) {
        case lex::SpanKind::LineComment:
        case lex::SpanKind::BlockComment: return "comment";
        case lex::SpanKind::StringLiteral: return "string literal";
        case lex::SpanKind::Code: return "code";
    }
    return "code";
}

// Spelling with an escape after every non-ASCII code point, for messages.
std::string annotated(std::u32string_view text, const UnicodeTables& tables) {
    std::string out;
    for (char32_t cp : text) {
        utf8::append(out, cp);
        if (cp >= 0x80) out += escape_codepoint(cp, tables);
    }
    return out;
}

std::string_view line_of(const SourceView& src, std::size_t line) {
    const auto [begin, end] = src.index.line_bounds(line);
    return src.text.substr(begin, end - begin);
}

Finding make_finding(RuleId rule, const Policy& policy, const SourceView& src, std::size_t begin, std::size_t end,
                     std::vector<char32_t> codepoints, std::string message, const UnicodeTables& tables) {
    Finding f;
    f.rule = rule;
    f.severity = policy.severity(rule);
    f.path = std::string(src.path);
    const auto pos = src.index.position(begin);
    f.line = pos.line;
    f.column = pos.column;
    f.byte_offset = begin;
    f.length = end - begin;
    f.codepoints = std::move(codepoints);
    f.message = std::move(message);
    const auto [line_begin, line_end] = src.index.line_bounds(pos.line);
    const auto line_text = src.text.substr(line_begin, line_end - line_begin);
    const bool homoglyph = rule == RuleId::ConfusableIdentifiers || rule == RuleId::MixedScriptIdentifier;
    f.preview = evidence_preview(line_text, begin - line_begin, std::min(end, line_end) - line_begin, homoglyph, tables);
    f.context_hash = context_hash(rule, f.path, f.codepoints, line_text);
    return f;
}

// Non-Code token: stack simulation over its controls.
void check_token(const SourceView& src, const lex::Span& span, const UnicodeTables& tables, const Policy& policy,
                 std::vector<Finding>& out) {
    struct Open {
        char32_t cp;
        std::size_t offset;
        bool isolate;
    };
    std::vector<Open> stack;
    std::vector<char32_t> controls;
    std::size_t first = 0, last_end = 0;
    const auto slice = src.text.substr(span.start, span.end - span.start);
    for (const auto& c : utf8::decode(slice)) {
        if (!tables.is_bidi_control(c.cp) || policy.allows(c.cp)) continue;
        const std::size_t at = span.start + c.offset;
        if (controls.empty()) first = at;
        controls.push_back(c.cp);
        last_end = at + c.length;
        const BidiClass cls = tables.bidi_class(c.cp);
        if (cls == BidiClass::PDF) {
            if (!stack.empty() && !stack.back().isolate) stack.pop_back();
        } else if (cls == BidiClass::PDI) {
            const auto it = std::find_if(stack.rbegin(), stack.rend(), [](const Open& o) { return o.isolate; });
            if (it != stack.rend()) stack.erase(std::prev(it.base()), stack.end());
        } else if (is_opener(tables, c.cp)) {
            const bool isolate = cls == BidiClass::LRI || cls == BidiClass::RLI || cls == BidiClass::FSI;
            stack.push_back({c.cp, at, isolate});
        }
    }
    if (controls.empty()) return;
    const auto context = context_name(span.kind);
    if (!stack.empty()) {
        if (!policy.reports(RuleId::BidiUnterminated)) return;
        std::string names;
        for (const auto& o : stack) names += (names.empty() ? "" : ", ") + control_name(tables, o.cp);
        out.push_back(make_finding(RuleId::BidiUnterminated, policy, src, first, last_end, std::move(controls),
                                   "unterminated bidirectional control (" + names + ") at end of " +
                                       std::string(context) + "; following text is displayed out of order",
                                   tables));
    } else if (policy.reports(RuleId::BidiControlPresent)) {
        out.push_back(make_finding(RuleId::BidiControlPresent, policy, src, first, last_end, std::move(controls),
                                   "balanced bidirectional controls in " + std::string(context), tables));
    }
}

}  // namespace

std::vector<Finding> detect_bidi(const SourceView& src, const std::vector<lex::Span>& spans,
                                 const UnicodeTables& tables, const Policy& policy) {
    std::vector<Finding> out;
    for (const auto& span : spans) {
        const auto slice = src.text.substr(span.start, span.end - span.start);
        if (utf8::is_ascii(slice)) continue;
        if (span.kind != lex::SpanKind::Code) {
            check_token(src, span, tables, policy, out);
            continue;
        }
        if (!policy.reports(RuleId::BidiInCode)) continue;
        std::vector<char32_t> run;
        std::size_t run_begin = 0, run_end = 0;
        const auto flush = [&] {
            if (run.empty()) return;
            std::string names;
            for (char32_t cp : run) names += (names.empty() ? "" : ", ") + control_name(tables, cp);
            out.push_back(make_finding(RuleId::BidiInCode, policy, src, run_begin, run_end, std::move(run),
                                       "bidirectional control (" + names + ") outside comments and strings", tables));
            run.clear();
        };
        for (const auto& c : utf8::decode(slice)) {
            const std::size_t at = span.start + c.offset;
            if (tables.is_bidi_control(c.cp) && !policy.allows(c.cp)) {
                if (!run.empty() && at != run_end) flush();
                if (run.empty()) run_begin = at;
                run.push_back(c.cp);
                run_end = at + c.length;
            }
        }
        flush();
    }
    return out;
}

std::vector<Finding> detect_invisible(const SourceView& src, const std::vector<lex::Span>& spans,
                                      const UnicodeTables& tables, const Policy& policy) {
    std::vector<Finding> out;
    for (const auto& span : spans) {
        const auto slice = src.text.substr(span.start, span.end - span.start);
        if (utf8::is_ascii(slice)) continue;
        const RuleId rule = span.kind == lex::SpanKind::Code ? RuleId::InvisibleInCode : RuleId::InvisibleInLiteral;
        if (!policy.reports(rule)) continue;
        std::vector<char32_t> run;
        std::size_t run_begin = 0, run_end = 0;
        const auto flush = [&] {
            if (run.empty()) return;
            std::string names;
            for (char32_t cp : run) names += (names.empty() ? "" : ", ") + control_name(tables, cp);
            out.push_back(make_finding(rule, policy, src, run_begin, run_end, std::move(run),
                                       "invisible character (" + names + ") in " +
                                           std::string(context_name(span.kind)),
                                       tables));
            run.clear();
        };
        for (const auto& c : utf8::decode(slice)) {
            const std::size_t at = span.start + c.offset;
            if (!tables.is_invisible(c.cp) || policy.allows(c.cp) || (c.cp == bom && at == 0)) continue;
            if (!run.empty() && at != run_end) flush();
            if (run.empty()) run_begin = at;
            run.push_back(c.cp);
            run_end = at + c.length;
        }
        flush();
    }
    return out;
}

std::vector<Finding> detect_terminator_spoof(const SourceView& src, const std::vector<lex::Span>& spans,
                                             const lex::LanguageProfile& profile, const UnicodeTables& tables,
                                             const Policy& policy) {
    std::vector<Finding> out;
    if (!profile.has_block_comments() || !policy.reports(RuleId::TerminatorSpoof)) return out;
    for (const auto& span : spans) {
        if (span.kind != lex::SpanKind::BlockComment) continue;
        const auto slice = src.text.substr(span.start, span.end - span.start);
        if (utf8::is_ascii(slice)) continue;
        const lex::BlockCommentSyntax* syntax = nullptr;
        for (const auto& bc : profile.block_comments)
            if (slice.starts_with(bc.open) && (!syntax || bc.open.size() > syntax->open.size())) syntax = &bc;
        if (!syntax) continue;
        const std::u32string close = utf8::to_u32(syntax->close);
        const auto chars = utf8::decode(slice);
        for (std::size_t i = 0; i < chars.size(); ++i) {
            if (chars[i].offset < syntax->open.size() || chars[i].cp != close.front()) continue;
            std::size_t k = 1, j = i + 1;
            std::vector<char32_t> hidden;
            while (k < close.size() && j < chars.size()) {
                if (chars[j].cp == close[k]) {
                    ++k;
                } else if (tables.is_invisible(chars[j].cp)) {
                    hidden.push_back(chars[j].cp);
                } else {
                    break;
                }
                ++j;
            }
            if (k < close.size() || hidden.empty()) continue;
            const std::size_t begin = span.start + chars[i].offset;
            const std::size_t end = span.start + chars[j - 1].offset + chars[j - 1].length;
            std::string names;
            for (char32_t cp : hidden) names += (names.empty() ? "" : ", ") + control_name(tables, cp);
            out.push_back(make_finding(RuleId::TerminatorSpoof, policy, src, begin, end, std::move(hidden),
                                       "apparent comment terminator '" + syntax->close + "' broken by invisible " +
                                           names + "; the comment continues",
                                       tables));
            i = j - 1;
        }
    }
    return out;
}

void IdentifierCensus::add(lex::IdentifierOccurrence occurrence, std::string_view line_text) {
    if (utf8::is_ascii(occurrence.text)) {
        add_ascii(utf8::encode(occurrence.text));
        return;
    }
    non_ascii_.push_back({std::move(occurrence), std::string(line_text)});
}

void IdentifierCensus::add_ascii(std::string_view word) {
    const auto it = ascii_counts_.find(std::string(word));
    if (it != ascii_counts_.end()) ++it->second;
    else ascii_counts_.emplace(word, 1);
    ++ascii_total_;
}

void IdentifierCensus::add_ascii_text(std::string_view bytes, const lex::LanguageProfile& profile,
                                      const UnicodeTables& tables) {
    for (const auto& [start, end] : lex::identifier_ranges(bytes, lex::classify_spans(bytes, profile), profile, tables))
        add_ascii(bytes.substr(start, end - start));
}

void IdentifierCensus::merge(IdentifierCensus&& other) {
    for (auto& [text, n] : other.ascii_counts_) ascii_counts_[text] += n;
    ascii_total_ += other.ascii_total_;
    non_ascii_.insert(non_ascii_.end(), std::make_move_iterator(other.non_ascii_.begin()),
                      std::make_move_iterator(other.non_ascii_.end()));
    other = IdentifierCensus{};
}

std::set<std::string> identifier_scripts(std::u32string_view text, const UnicodeTables& tables) {
    std::set<std::string> scripts;
    for (char32_t cp : text) {
        const auto s = tables.script_of(cp);
        if (s == "Common" || s == "Inherited" || s == "Unknown") continue;
        scripts.emplace(s);
    }
    if (scripts.size() > 1 && scripts.count("Han")) {
        const auto subset_of = [&](std::initializer_list<const char*> allowed) {
            return std::all_of(scripts.begin(), scripts.end(), [&](const std::string& s) {
                return std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return s == a; });
            });
        };
        if (subset_of({"Han", "Hiragana", "Katakana"})) return {"Japanese"};
        if (subset_of({"Han", "Hangul"})) return {"Korean"};
        if (subset_of({"Han", "Bopomofo"})) return {"Han with Bopomofo"};
    }
    return scripts;
}

std::vector<Finding> IdentifierCensus::findings(const UnicodeTables& tables, const Policy& policy) const {
    std::vector<Finding> out;
    if (non_ascii_.empty()) return out;

    struct Group {
        std::map<std::u32string, std::size_t> counts;  // spelling -> occurrences
    };
    std::map<std::u32string, Group> groups;
    std::map<std::u32string, std::size_t> spellings;
    for (const auto& e : non_ascii_) ++spellings[e.occurrence.text];
    for (const auto& [text, n] : spellings) groups[tables.skeleton(text, policy.fold_case)].counts[text] = n;
    for (const auto& [word, n] : ascii_counts_) {
        const std::u32string text(word.begin(), word.end());
        auto it = groups.find(tables.skeleton(text, policy.fold_case));
        if (it != groups.end()) it->second.counts[text] += n;
    }

    // For each reported spelling, the spelling it is confused with.
    std::map<std::u32string, std::u32string> counterpart;
    for (const auto& [sk, group] : groups) {
        if (group.counts.size() < 2) continue;
        const std::u32string* best_ascii = nullptr;
        std::size_t best_ascii_n = 0;
        std::size_t majority_n = 0;
        for (const auto& [text, n] : group.counts) {
            if (utf8::is_ascii(text) && n > best_ascii_n) best_ascii = &text, best_ascii_n = n;
            majority_n = std::max(majority_n, n);
        }
        std::vector<const std::u32string*> leaders;
        for (const auto& [text, n] : group.counts)
            if (n == majority_n) leaders.push_back(&text);

        for (const auto& [text, n] : group.counts) {
            if (utf8::is_ascii(text)) continue;
            const std::u32string* other = best_ascii;
            if (!other) {
                if (leaders.size() == 1 && *leaders.front() == text) continue;  // the likely original
                for (const auto* leader : leaders)
                    if (*leader != text) {
                        other = leader;
                        break;
                    }
            }
            if (!other || policy.allows_pair(text, *other)) continue;
            counterpart.emplace(text, *other);
        }
    }

    for (const auto& e : non_ascii_) {
        const auto& occ = e.occurrence;
        std::vector<char32_t> cps;
        for (char32_t cp : occ.text)
            if (cp >= 0x80 && std::find(cps.begin(), cps.end(), cp) == cps.end()) cps.push_back(cp);

        const auto emit = [&](RuleId rule, std::string message) {
            Finding f;
            f.rule = rule;
            f.severity = policy.severity(rule);
            f.path = occ.path;
            f.line = occ.line;
            f.column = occ.column;
            f.byte_offset = occ.byte_offset;
            f.length = utf8::encode(occ.text).size();
            f.codepoints = cps;
            f.message = std::move(message);
            const std::string_view line = e.line_text;
            if (!line.empty() && occ.column >= 1) {
                // Column is in code points; find the byte offset within the line.
                const auto chars = utf8::decode(line);
                const std::size_t local = occ.column - 1 < chars.size() ? chars[occ.column - 1].offset : line.size();
                f.preview = evidence_preview(line, local, local + f.length, true, tables);
            } else {
                f.preview = annotated(occ.text, tables);
            }
            f.context_hash = context_hash(rule, f.path, f.codepoints, line.empty() ? utf8::encode(occ.text) : line);
            out.push_back(std::move(f));
        };

        if (policy.reports(RuleId::ConfusableIdentifiers)) {
            if (const auto it = counterpart.find(occ.text); it != counterpart.end())
                emit(RuleId::ConfusableIdentifiers, "identifier '" + annotated(occ.text, tables) +
                                                        "' is confusable with '" + annotated(it->second, tables) +
                                                        "'");
        }
        if (policy.reports(RuleId::MixedScriptIdentifier)) {
            const auto scripts = identifier_scripts(occ.text, tables);
            if (scripts.size() >= 2) {
                std::string names;
                for (const auto& s : scripts) names += (names.empty() ? "" : ", ") + s;
                emit(RuleId::MixedScriptIdentifier,
                     "identifier '" + annotated(occ.text, tables) + "' mixes scripts: " + names);
            }
        }
    }
    return out;
}

std::vector<Finding> detect_homoglyphs(const std::vector<lex::IdentifierOccurrence>& identifiers,
                                       const UnicodeTables& tables, const Policy& policy) {
    IdentifierCensus census;
    for (const auto& occ : identifiers) census.add(occ);
    return census.findings(tables, policy);
}

UnitScan scan_unit_detailed(std::string_view path, std::string_view bytes, const lex::LanguageProfile& profile,
                            const UnicodeTables& tables, const Policy& policy, const ScanOptions& options) {
    UnitScan result;
    ScanReport& report = result.report;
    report.path = std::string(path);
    report.tables_version = tables.version();
    report.profile_name = profile.name;

    // Every finding needs a non-ASCII code point; ASCII text only feeds the
    // identifier census.
    if (utf8::is_ascii(bytes)) {
        if (options.collect_identifiers) result.census.add_ascii_text(bytes, profile, tables);
        return result;
    }

    std::string repaired;
    std::string_view text = bytes;
    if (!utf8::is_valid(bytes)) {
        std::size_t replaced = 0;
        repaired = utf8::repair(bytes, &replaced);
        text = repaired;
        report.diagnostics.push_back({Severity::Info, report.path,
                                      "invalid UTF-8: " + std::to_string(replaced) +
                                          " ill-formed sequence(s) replaced with U+FFFD before scanning"});
    }

    const utf8::LineIndex index(text);
    const SourceView src{path, text, index};
    const auto spans = lex::classify_spans(text, profile);

    auto bidi = detect_bidi(src, spans, tables, policy);
    auto invisible = detect_invisible(src, spans, tables, policy);
    auto spoof = detect_terminator_spoof(src, spans, profile, tables, policy);

    // A spoofed terminator already accounts for the invisibles inside it.
    std::erase_if(invisible, [&](const Finding& f) {
        if (f.rule != RuleId::InvisibleInLiteral) return false;
        return std::any_of(spoof.begin(), spoof.end(), [&](const Finding& s) {
            return f.byte_offset >= s.byte_offset && f.byte_offset + f.length <= s.byte_offset + s.length;
        });
    });

    auto& findings = report.findings;
    findings.insert(findings.end(), bidi.begin(), bidi.end());
    findings.insert(findings.end(), invisible.begin(), invisible.end());
    findings.insert(findings.end(), spoof.begin(), spoof.end());

    if (options.unit_homoglyphs || options.collect_identifiers) {
        IdentifierCensus census;
        for (auto& occ : lex::extract_identifiers(text, spans, profile, tables, path)) {
            const std::size_t line = occ.line;
            if (utf8::is_ascii(occ.text)) census.add(std::move(occ));
            else census.add(std::move(occ), line_of(src, line));
        }
        if (options.unit_homoglyphs) {
            auto homoglyphs = census.findings(tables, policy);
            findings.insert(findings.end(), homoglyphs.begin(), homoglyphs.end());
        }
        if (options.collect_identifiers) result.census = std::move(census);
    }

    report.finalize();
    return result;
}

ScanReport scan_unit(std::string_view path, std::string_view bytes, const lex::LanguageProfile& profile,
                     const UnicodeTables& tables, const Policy& policy) {
    return scan_unit_detailed(path, bytes, profile, tables, policy).report;
}

}  // namespace srcguard
