#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "srcguard/unicode_tables.hpp"

/// Unicode Bidirectional Algorithm (UAX #9) over single lines.
///
/// Covers P2-P3, X1-X10, W1-W7, N0-N2, I1-I2 and L1-L2. Mirroring (L4),
/// shaping and the higher-level protocols are not applied.
namespace srcguard::bidi {

enum class Direction : std::uint8_t { LTR, RTL, Auto };

inline constexpr int max_depth = 125;

/// One line after level resolution.
///
/// `levels[i]` is the resolved embedding level after L1. Characters
/// removed by X9 (LRE, RLE, LRO, RLO, PDF and BN) carry `removed[i]` and
/// a level that is only a placeholder; they take no part in reordering.
struct BidiLine {
    std::vector<char32_t> codepoints;
    Direction para_direction = Direction::LTR;
    std::uint8_t paragraph_level = 0;
    std::vector<std::uint8_t> levels;
    std::vector<bool> removed;
};

/// Class-level resolution, usable without code points (BidiTest.txt).
struct Resolution {
    std::uint8_t paragraph_level = 0;
    std::vector<std::uint8_t> levels;
    std::vector<bool> removed;
};

/// Resolves levels from bidi classes alone. `codepoints` may be empty, in
/// which case no paired-bracket matching takes place (every ON is an
/// ordinary neutral). When given, it must be parallel to `classes` and
/// `tables` supplies bracket data.
Resolution resolve_classes(std::span<const BidiClass> classes, Direction direction,
                           std::span<const char32_t> codepoints = {},
                           const UnicodeTables* tables = nullptr);

BidiLine resolve_levels(const UnicodeTables& tables, std::span<const char32_t> codepoints,
                        Direction direction);

/// Logical indices in visual order (rule L2), removed characters omitted.
std::vector<std::size_t> visual_order(std::span<const std::uint8_t> levels,
                                      const std::vector<bool>& removed);

std::vector<std::size_t> display_order(const UnicodeTables& tables, std::span<const char32_t> codepoints,
                                       Direction direction);

/// True when the displayed line differs from its encoding: the retained
/// characters are permuted, something was removed by X9, or an isolate
/// control shaped the layout. Paragraph direction is LTR.
bool line_reorders(const UnicodeTables& tables, std::span<const char32_t> codepoints);

/// Splits text into lines at LF, CR, CRLF, NEL, LS and PS. Each element
/// is {content begin, content end, terminator end} as indices into `text`.
struct LineRange {
    std::size_t begin;
    std::size_t end;
    std::size_t terminator_end;
};
std::vector<LineRange> split_lines(std::u32string_view text);

}  // namespace srcguard::bidi
