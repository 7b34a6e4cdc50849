#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace srcguard::utf8 {

inline constexpr char32_t replacement_char = 0xFFFD;

/// One decoded scalar value and where it sits in the source bytes.
struct DecodedChar {
    char32_t cp;
    std::uint32_t offset;
    std::uint8_t length;
};

bool is_valid(std::string_view bytes);

/// Replaces every ill-formed subsequence with U+FFFD, following the
/// "maximal subpart" practice. `replaced` receives the number of
/// substitutions made.
std::string repair(std::string_view bytes, std::size_t* replaced = nullptr);

/// Decodes well-formed UTF-8. Ill-formed input decodes with U+FFFD per
/// maximal subpart, so offsets stay meaningful either way.
std::vector<DecodedChar> decode(std::string_view text);

std::u32string to_u32(std::string_view text);
std::string encode(std::u32string_view text);
void append(std::string& out, char32_t cp);

inline bool is_ascii(std::string_view bytes) {
    for (unsigned char c : bytes)
        if (c >= 0x80) return false;
    return true;
}

inline bool is_ascii(std::u32string_view text) {
    for (char32_t c : text)
        if (c >= 0x80) return false;
    return true;
}

/// Line terminators: LF, CR, CRLF, NEL, LS, PS.
inline bool is_line_break(char32_t cp) {
    return cp == U'\n' || cp == U'\r' || cp == 0x85 || cp == 0x2028 || cp == 0x2029;
}

/// "U+202E" style label, 4 to 6 uppercase hex digits.
std::string codepoint_label(char32_t cp);

/// Maps byte offsets of a decoded text to 1-based line and code-point column.
class LineIndex {
public:
    explicit LineIndex(std::string_view text);

    struct Position {
        std::size_t line;    // 1-based
        std::size_t column;  // 1-based, in code points
    };

    Position position(std::size_t byte_offset) const;
    /// Byte range [begin, end) of the line's content, terminator excluded.
    std::pair<std::size_t, std::size_t> line_bounds(std::size_t line) const;
    std::size_t line_count() const { return line_starts_.size(); }
    const std::vector<DecodedChar>& chars() const { return chars_; }

private:
    std::vector<DecodedChar> chars_;
    std::vector<std::size_t> line_starts_;      // byte offsets
    std::vector<std::size_t> line_ends_;        // byte offsets, terminator excluded
    std::vector<std::size_t> line_first_char_;  // index into chars_
};

}  // namespace srcguard::utf8
