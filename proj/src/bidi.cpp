#include "srcguard/bidi.hpp"

#include <algorithm>
#include <optional>

namespace srcguard::bidi {

namespace {

using C = BidiClass;
constexpr std::size_t npos = static_cast<std::size_t>(-1);

bool removed_by_x9(C c) {
    return c == C::LRE || c == C::RLE || c == C::LRO || c == C::RLO || c == C::PDF || c == C::BN;
}

bool is_isolate_initiator(C c) { return c == C::LRI || c == C::RLI || c == C::FSI; }

bool is_neutral_or_isolate(C c) {
    return c == C::B || c == C::S || c == C::WS || c == C::ON || c == C::LRI || c == C::RLI ||
           c == C::FSI || c == C::PDI;
}

// Direction a resolved type contributes to N0/N1: numbers count as R.
std::optional<C> strong_direction(C c) {
    switch (c) {
        case C::L: return C::L;
        case C::R:
        case C::AL:
        case C::EN:
        case C::AN: return C::R;
        default: return std::nullopt;
    }
}

std::uint8_t next_odd(std::uint8_t level) { return static_cast<std::uint8_t>((level + 1) | 1); }
std::uint8_t next_even(std::uint8_t level) { return static_cast<std::uint8_t>((level + 2) & ~1); }

class ParagraphResolver {
public:
    ParagraphResolver(std::span<const C> classes, std::span<const char32_t> codepoints,
                      const UnicodeTables* tables, std::size_t begin, std::size_t end,
                      std::vector<std::uint8_t>& levels, std::vector<bool>& removed)
        : orig_(classes), cps_(codepoints), tables_(tables), begin_(begin), end_(end),
          types_(classes.begin(), classes.end()), levels_(levels), removed_(removed) {}

    std::uint8_t run(Direction direction) {
        match_isolates();
        if (direction == Direction::Auto) {
            para_level_ = first_strong(begin_, end_).value_or(0);
        } else {
            para_level_ = direction == Direction::RTL ? 1 : 0;
        }
        explicit_levels();
        explicit_levels_ = levels_;
        for (auto& seq : isolating_run_sequences()) resolve_sequence(seq);
        reset_whitespace_levels();
        return para_level_;
    }

private:
    // BD9: isolate initiators and their matching PDIs.
    void match_isolates() {
        matching_pdi_.assign(orig_.size(), npos);
        matched_initiator_.assign(orig_.size(), npos);
        std::vector<std::size_t> open;
        for (std::size_t i = begin_; i < end_; ++i) {
            if (is_isolate_initiator(orig_[i])) {
                open.push_back(i);
            } else if (orig_[i] == C::PDI && !open.empty()) {
                matching_pdi_[open.back()] = i;
                matched_initiator_[i] = open.back();
                open.pop_back();
            }
        }
    }

    // P2/P3: level of the first strong character, skipping isolates.
    std::optional<std::uint8_t> first_strong(std::size_t from, std::size_t to) const {
        for (std::size_t i = from; i < to; ++i) {
            const C c = orig_[i];
            if (c == C::L) return 0;
            if (c == C::R || c == C::AL) return 1;
            if (is_isolate_initiator(c)) {
                if (matching_pdi_[i] == npos) return std::nullopt;
                i = matching_pdi_[i];
            }
        }
        return std::nullopt;
    }

    // X1-X9.
    void explicit_levels() {
        struct Entry {
            std::uint8_t level;
            std::optional<C> override_dir;
            bool isolate;
        };
        std::vector<Entry> stack;
        stack.reserve(max_depth + 2);
        stack.push_back({para_level_, std::nullopt, false});
        int overflow_isolates = 0;
        int overflow_embeddings = 0;
        int valid_isolates = 0;

        for (std::size_t i = begin_; i < end_; ++i) {
            const C c = orig_[i];
            removed_[i] = removed_by_x9(c);
            switch (c) {
                case C::RLE:
                case C::LRE:
                case C::RLO:
                case C::LRO: {
                    levels_[i] = stack.back().level;
                    const bool rtl = c == C::RLE || c == C::RLO;
                    const std::uint8_t level = rtl ? next_odd(stack.back().level) : next_even(stack.back().level);
                    if (level <= max_depth && overflow_isolates == 0 && overflow_embeddings == 0) {
                        std::optional<C> dir;
                        if (c == C::RLO) dir = C::R;
                        if (c == C::LRO) dir = C::L;
                        stack.push_back({level, dir, false});
                    } else if (overflow_isolates == 0) {
                        ++overflow_embeddings;
                    }
                    break;
                }
                case C::RLI:
                case C::LRI:
                case C::FSI: {
                    levels_[i] = stack.back().level;
                    if (stack.back().override_dir) types_[i] = *stack.back().override_dir;
                    bool rtl = c == C::RLI;
                    if (c == C::FSI) {
                        const std::size_t stop = matching_pdi_[i] == npos ? end_ : matching_pdi_[i];
                        rtl = first_strong(i + 1, stop).value_or(0) == 1;
                    }
                    const std::uint8_t level = rtl ? next_odd(stack.back().level) : next_even(stack.back().level);
                    if (level <= max_depth && overflow_isolates == 0 && overflow_embeddings == 0) {
                        ++valid_isolates;
                        stack.push_back({level, std::nullopt, true});
                    } else {
                        ++overflow_isolates;
                    }
                    break;
                }
                case C::PDI: {
                    if (overflow_isolates > 0) {
                        --overflow_isolates;
                    } else if (valid_isolates > 0) {
                        overflow_embeddings = 0;
                        while (!stack.back().isolate) stack.pop_back();
                        stack.pop_back();
                        --valid_isolates;
                    }
                    levels_[i] = stack.back().level;
                    if (stack.back().override_dir) types_[i] = *stack.back().override_dir;
                    break;
                }
                case C::PDF: {
                    levels_[i] = stack.back().level;
                    if (overflow_isolates > 0) {
                    } else if (overflow_embeddings > 0) {
                        --overflow_embeddings;
                    } else if (!stack.back().isolate && stack.size() >= 2) {
                        stack.pop_back();
                    }
                    break;
                }
                case C::B:
                    levels_[i] = para_level_;
                    break;
                case C::BN:
                    levels_[i] = stack.back().level;
                    break;
                default:
                    levels_[i] = stack.back().level;
                    if (stack.back().override_dir) types_[i] = *stack.back().override_dir;
                    break;
            }
        }
    }

    // X10 / BD13.
    std::vector<std::vector<std::size_t>> isolating_run_sequences() {
        kept_.clear();
        for (std::size_t i = begin_; i < end_; ++i)
            if (!removed_[i]) kept_.push_back(i);
        kept_pos_.assign(orig_.size(), npos);
        for (std::size_t k = 0; k < kept_.size(); ++k) kept_pos_[kept_[k]] = k;

        std::vector<std::vector<std::size_t>> runs;
        for (std::size_t k = 0; k < kept_.size(); ++k) {
            if (k == 0 || levels_[kept_[k]] != levels_[kept_[k - 1]]) runs.emplace_back();
            runs.back().push_back(kept_[k]);
        }
        std::vector<std::size_t> run_starting_at(orig_.size(), npos);
        for (std::size_t r = 0; r < runs.size(); ++r) run_starting_at[runs[r].front()] = r;

        std::vector<std::vector<std::size_t>> sequences;
        for (std::size_t r = 0; r < runs.size(); ++r) {
            const std::size_t first = runs[r].front();
            if (orig_[first] == C::PDI && matched_initiator_[first] != npos) continue;
            std::vector<std::size_t> seq = runs[r];
            std::size_t cur = r;
            for (;;) {
                const std::size_t last = runs[cur].back();
                if (!is_isolate_initiator(orig_[last]) || matching_pdi_[last] == npos) break;
                const std::size_t next = run_starting_at[matching_pdi_[last]];
                if (next == npos) break;
                seq.insert(seq.end(), runs[next].begin(), runs[next].end());
                cur = next;
            }
            sequences.push_back(std::move(seq));
        }
        return sequences;
    }

    void resolve_sequence(const std::vector<std::size_t>& seq) {
        const std::size_t n = seq.size();
        const std::uint8_t level = levels_[seq.front()];
        const C embedding = (level & 1) ? C::R : C::L;

        const std::size_t first_pos = kept_pos_[seq.front()];
        const std::uint8_t before = first_pos == 0 ? para_level_ : explicit_levels_[kept_[first_pos - 1]];
        const C sos = (std::max(before, level) & 1) ? C::R : C::L;
        const std::size_t last = seq.back();
        const std::size_t last_pos = kept_pos_[last];
        std::uint8_t after = para_level_;
        if (!is_isolate_initiator(orig_[last]) && last_pos + 1 < kept_.size()) after = explicit_levels_[kept_[last_pos + 1]];
        const C eos = (std::max(after, level) & 1) ? C::R : C::L;

        auto type = [&](std::size_t j) -> C& { return types_[seq[j]]; };

        // W1
        C prev = sos;
        for (std::size_t j = 0; j < n; ++j) {
            if (type(j) == C::NSM) type(j) = (is_isolate_initiator(prev) || prev == C::PDI) ? C::ON : prev;
            prev = type(j);
        }
        // W2, W3
        C last_strong = sos;
        for (std::size_t j = 0; j < n; ++j) {
            const C t = type(j);
            if (t == C::L || t == C::R || t == C::AL) last_strong = t;
            else if (t == C::EN && last_strong == C::AL) type(j) = C::AN;
        }
        for (std::size_t j = 0; j < n; ++j)
            if (type(j) == C::AL) type(j) = C::R;
        // W4
        for (std::size_t j = 1; j + 1 < n; ++j) {
            const C t = type(j);
            const C a = type(j - 1);
            const C b = type(j + 1);
            if (t == C::ES && a == C::EN && b == C::EN) type(j) = C::EN;
            else if (t == C::CS && a == C::EN && b == C::EN) type(j) = C::EN;
            else if (t == C::CS && a == C::AN && b == C::AN) type(j) = C::AN;
        }
        // W5
        for (std::size_t j = 0; j < n;) {
            if (type(j) != C::ET) {
                ++j;
                continue;
            }
            std::size_t k = j;
            while (k < n && type(k) == C::ET) ++k;
            const bool adjacent_en = (j > 0 && type(j - 1) == C::EN) || (k < n && type(k) == C::EN);
            if (adjacent_en)
                for (std::size_t m = j; m < k; ++m) type(m) = C::EN;
            j = k;
        }
        // W6
        for (std::size_t j = 0; j < n; ++j) {
            const C t = type(j);
            if (t == C::ES || t == C::ET || t == C::CS) type(j) = C::ON;
        }
        // W7
        last_strong = sos;
        for (std::size_t j = 0; j < n; ++j) {
            const C t = type(j);
            if (t == C::L || t == C::R) last_strong = t;
            else if (t == C::EN && last_strong == C::L) type(j) = C::L;
        }

        resolve_paired_brackets(seq, sos, embedding);

        // N1, N2
        for (std::size_t j = 0; j < n;) {
            if (!is_neutral_or_isolate(type(j))) {
                ++j;
                continue;
            }
            std::size_t k = j;
            while (k < n && is_neutral_or_isolate(type(k))) ++k;
            const C leading = j == 0 ? sos : strong_direction(type(j - 1)).value_or(embedding);
            const C trailing = k == n ? eos : strong_direction(type(k)).value_or(embedding);
            const C resolved = leading == trailing ? leading : embedding;
            for (std::size_t m = j; m < k; ++m) type(m) = resolved;
            j = k;
        }

        // I1, I2
        for (std::size_t j = 0; j < n; ++j) {
            const C t = type(j);
            std::uint8_t& lv = levels_[seq[j]];
            if ((lv & 1) == 0) {
                if (t == C::R) lv += 1;
                else if (t == C::AN || t == C::EN) lv += 2;
            } else if (t == C::L || t == C::EN || t == C::AN) {
                lv += 1;
            }
        }
    }

    // BD16 + N0.
    void resolve_paired_brackets(const std::vector<std::size_t>& seq, C sos, C embedding) {
        if (!tables_ || cps_.empty()) return;
        const std::size_t n = seq.size();
        struct Opening {
            char32_t bracket;
            std::size_t pos;
        };
        std::vector<Opening> stack;
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        constexpr std::size_t max_stack = 63;
        for (std::size_t j = 0; j < n; ++j) {
            if (types_[seq[j]] != C::ON) continue;
            const char32_t cp = cps_[seq[j]];
            const Bracket b = tables_->bracket(cp);
            if (b.type == BracketType::Open) {
                if (stack.size() == max_stack) break;
                stack.push_back({tables_->canonical_bracket(b.pair), j});
            } else if (b.type == BracketType::Close) {
                const char32_t want = tables_->canonical_bracket(cp);
                for (std::size_t s = stack.size(); s-- > 0;) {
                    if (stack[s].bracket == want) {
                        pairs.emplace_back(stack[s].pos, j);
                        stack.resize(s);
                        break;
                    }
                }
            }
        }
        std::sort(pairs.begin(), pairs.end());

        const C opposite = embedding == C::L ? C::R : C::L;
        for (const auto& [open, close] : pairs) {
            bool found_embedding = false;
            bool found_opposite = false;
            for (std::size_t j = open + 1; j < close; ++j) {
                const auto dir = strong_direction(types_[seq[j]]);
                if (!dir) continue;
                if (*dir == embedding) {
                    found_embedding = true;
                    break;
                }
                found_opposite = true;
            }
            C resolved;
            if (found_embedding) {
                resolved = embedding;
            } else if (found_opposite) {
                C context = sos;
                for (std::size_t j = open; j-- > 0;) {
                    if (const auto dir = strong_direction(types_[seq[j]])) {
                        context = *dir;
                        break;
                    }
                }
                resolved = context == opposite ? opposite : embedding;
            } else {
                continue;
            }
            for (const std::size_t bracket_pos : {open, close}) {
                types_[seq[bracket_pos]] = resolved;
                for (std::size_t j = bracket_pos + 1; j < n && orig_[seq[j]] == C::NSM; ++j)
                    types_[seq[j]] = resolved;
            }
        }
    }

    // L1, using the original classes.
    void reset_whitespace_levels() {
        const auto trailing_whitespace = [&](std::size_t stop) {
            for (std::size_t j = stop; j-- > begin_;) {
                const C c = orig_[j];
                if (c == C::WS || is_isolate_initiator(c) || c == C::PDI || removed_[j]) levels_[j] = para_level_;
                else break;
            }
        };
        for (std::size_t i = begin_; i < end_; ++i) {
            if (orig_[i] == C::S || orig_[i] == C::B) {
                levels_[i] = para_level_;
                trailing_whitespace(i);
            }
        }
        trailing_whitespace(end_);
    }

    std::span<const C> orig_;
    std::span<const char32_t> cps_;
    const UnicodeTables* tables_;
    std::size_t begin_;
    std::size_t end_;
    std::vector<C> types_;
    std::vector<std::uint8_t>& levels_;
    std::vector<bool>& removed_;
    std::uint8_t para_level_ = 0;
    std::vector<std::uint8_t> explicit_levels_;  // before W1-I2, for sos/eos
    std::vector<std::size_t> matching_pdi_;
    std::vector<std::size_t> matched_initiator_;
    std::vector<std::size_t> kept_;
    std::vector<std::size_t> kept_pos_;
};

}  // namespace

Resolution resolve_classes(std::span<const BidiClass> classes, Direction direction,
                           std::span<const char32_t> codepoints, const UnicodeTables* tables) {
    Resolution out;
    out.levels.assign(classes.size(), 0);
    out.removed.assign(classes.size(), false);
    bool first = true;
    std::size_t begin = 0;
    while (begin < classes.size()) {
        std::size_t end = begin;
        while (end < classes.size() && classes[end] != C::B) ++end;
        if (end < classes.size()) ++end;  // the separator belongs to its paragraph
        ParagraphResolver resolver(classes, codepoints, tables, begin, end, out.levels, out.removed);
        const std::uint8_t level = resolver.run(direction);
        if (first) out.paragraph_level = level;
        first = false;
        begin = end;
    }
    if (classes.empty() && direction == Direction::RTL) out.paragraph_level = 1;
    return out;
}

BidiLine resolve_levels(const UnicodeTables& tables, std::span<const char32_t> codepoints, Direction direction) {
    std::vector<C> classes;
    classes.reserve(codepoints.size());
    for (char32_t cp : codepoints) classes.push_back(tables.bidi_class(cp));
    Resolution r = resolve_classes(classes, direction, codepoints, &tables);
    BidiLine line;
    line.codepoints.assign(codepoints.begin(), codepoints.end());
    line.para_direction = direction;
    line.paragraph_level = r.paragraph_level;
    line.levels = std::move(r.levels);
    line.removed = std::move(r.removed);
    return line;
}

std::vector<std::size_t> visual_order(std::span<const std::uint8_t> levels, const std::vector<bool>& removed) {
    std::vector<std::size_t> order;
    order.reserve(levels.size());
    std::uint8_t highest = 0;
    std::uint8_t lowest_odd = max_depth + 2;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (removed[i]) continue;
        order.push_back(i);
        highest = std::max(highest, levels[i]);
        if (levels[i] & 1) lowest_odd = std::min(lowest_odd, levels[i]);
    }
    for (int level = highest; level >= lowest_odd; --level) {
        for (std::size_t j = 0; j < order.size();) {
            if (levels[order[j]] < level) {
                ++j;
                continue;
            }
            std::size_t k = j;
            while (k < order.size() && levels[order[k]] >= level) ++k;
            std::reverse(order.begin() + static_cast<std::ptrdiff_t>(j), order.begin() + static_cast<std::ptrdiff_t>(k));
            j = k;
        }
    }
    return order;
}

std::vector<std::size_t> display_order(const UnicodeTables& tables, std::span<const char32_t> codepoints,
                                       Direction direction) {
    const BidiLine line = resolve_levels(tables, codepoints, direction);
    return visual_order(line.levels, line.removed);
}

bool line_reorders(const UnicodeTables& tables, std::span<const char32_t> codepoints) {
    bool plain = true;
    for (char32_t cp : codepoints) {
        const C c = tables.bidi_class(cp);
        if (c != C::L && c != C::EN && c != C::ES && c != C::ET && c != C::CS && c != C::WS && c != C::ON &&
            c != C::S) {
            plain = false;
            break;
        }
    }
    // Without strong RTL, numbers in RTL context, marks, controls or
    // removed characters, an LTR paragraph resolves to all even levels.
    if (plain) return false;

    const BidiLine line = resolve_levels(tables, codepoints, Direction::LTR);
    for (std::size_t i = 0; i < codepoints.size(); ++i) {
        if (line.removed[i]) return true;
        const C c = tables.bidi_class(codepoints[i]);
        if (is_isolate_initiator(c) || c == C::PDI) return true;
    }
    const auto order = visual_order(line.levels, line.removed);
    for (std::size_t k = 0; k < order.size(); ++k)
        if (order[k] != k) return true;
    return false;
}

std::vector<LineRange> split_lines(std::u32string_view text) {
    std::vector<LineRange> lines;
    std::size_t begin = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char32_t cp = text[i];
        if (!(cp == U'\n' || cp == U'\r' || cp == 0x85 || cp == 0x2028 || cp == 0x2029)) continue;
        std::size_t term_end = i + 1;
        if (cp == U'\r' && term_end < text.size() && text[term_end] == U'\n') ++term_end;
        lines.push_back({begin, i, term_end});
        begin = term_end;
        i = term_end - 1;
    }
    if (begin < text.size() || lines.empty()) lines.push_back({begin, text.size(), text.size()});
    return lines;
}

}  // namespace srcguard::bidi
