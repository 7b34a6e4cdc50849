#include "srcguard/utf8.hpp"

#include <algorithm>
#include <cstdio>

namespace srcguard::utf8 {

namespace {

// Decodes one scalar value at `i`. On an ill-formed sequence returns
// U+FFFD and the length of the maximal subpart (at least 1).
DecodedChar decode_one(std::string_view s, std::size_t i, bool& ok) {
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    const unsigned char b0 = byte(i);
    ok = true;
    if (b0 < 0x80) return {b0, static_cast<std::uint32_t>(i), 1};

    int need = 0;
    char32_t cp = 0;
    unsigned char lo = 0x80, hi = 0xBF;
    if (b0 >= 0xC2 && b0 <= 0xDF) {
        need = 1;
        cp = b0 & 0x1F;
    } else if (b0 >= 0xE0 && b0 <= 0xEF) {
        need = 2;
        cp = b0 & 0x0F;
        if (b0 == 0xE0) lo = 0xA0;
        if (b0 == 0xED) hi = 0x9F;
    } else if (b0 >= 0xF0 && b0 <= 0xF4) {
        need = 3;
        cp = b0 & 0x07;
        if (b0 == 0xF0) lo = 0x90;
        if (b0 == 0xF4) hi = 0x8F;
    } else {
        ok = false;
        return {replacement_char, static_cast<std::uint32_t>(i), 1};
    }
    std::size_t k = i + 1;
    for (int n = 0; n < need; ++n, ++k) {
        if (k >= s.size()) {
            ok = false;
            return {replacement_char, static_cast<std::uint32_t>(i), static_cast<std::uint8_t>(k - i)};
        }
        const unsigned char b = byte(k);
        const unsigned char min = n == 0 ? lo : 0x80;
        const unsigned char max = n == 0 ? hi : 0xBF;
        if (b < min || b > max) {
            ok = false;
            return {replacement_char, static_cast<std::uint32_t>(i), static_cast<std::uint8_t>(k - i)};
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    return {cp, static_cast<std::uint32_t>(i), static_cast<std::uint8_t>(need + 1)};
}

}  // namespace

bool is_valid(std::string_view bytes) {
    bool ok = true;
    for (std::size_t i = 0; i < bytes.size();) {
        if (static_cast<unsigned char>(bytes[i]) < 0x80) {
            ++i;
            continue;
        }
        const auto d = decode_one(bytes, i, ok);
        if (!ok) return false;
        i += d.length;
    }
    return true;
}

std::string repair(std::string_view bytes, std::size_t* replaced) {
    std::string out;
    out.reserve(bytes.size());
    std::size_t count = 0;
    bool ok = true;
    for (std::size_t i = 0; i < bytes.size();) {
        if (static_cast<unsigned char>(bytes[i]) < 0x80) {
            out.push_back(bytes[i++]);
            continue;
        }
        const auto d = decode_one(bytes, i, ok);
        if (ok) {
            out.append(bytes.substr(i, d.length));
        } else {
            append(out, replacement_char);
            ++count;
        }
        i += d.length;
    }
    if (replaced) *replaced = count;
    return out;
}

std::vector<DecodedChar> decode(std::string_view text) {
    std::vector<DecodedChar> out;
    out.reserve(text.size());
    bool ok = true;
    for (std::size_t i = 0; i < text.size();) {
        const auto d = decode_one(text, i, ok);
        out.push_back(d);
        i += d.length;
    }
    return out;
}

std::u32string to_u32(std::string_view text) {
    std::u32string out;
    out.reserve(text.size());
    bool ok = true;
    for (std::size_t i = 0; i < text.size();) {
        const auto d = decode_one(text, i, ok);
        out.push_back(d.cp);
        i += d.length;
    }
    return out;
}

void append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string encode(std::u32string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char32_t cp : text) append(out, cp);
    return out;
}

std::string codepoint_label(char32_t cp) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "U+%04X", static_cast<unsigned>(cp));
    return buf;
}

LineIndex::LineIndex(std::string_view text) : chars_(decode(text)) {
    line_starts_.push_back(0);
    line_first_char_.push_back(0);
    for (std::size_t i = 0; i < chars_.size(); ++i) {
        const char32_t cp = chars_[i].cp;
        if (!is_line_break(cp)) continue;
        line_ends_.push_back(chars_[i].offset);
        std::size_t next = i + 1;
        if (cp == U'\r' && next < chars_.size() && chars_[next].cp == U'\n') ++i, ++next;
        const std::size_t start =
            next < chars_.size() ? chars_[next].offset : text.size();
        line_starts_.push_back(start);
        line_first_char_.push_back(next);
    }
    line_ends_.push_back(text.size());
}

LineIndex::Position LineIndex::position(std::size_t byte_offset) const {
    const auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), byte_offset);
    const std::size_t line = static_cast<std::size_t>(it - line_starts_.begin());  // 1-based
    const std::size_t first = line_first_char_[line - 1];
    const auto cit = std::lower_bound(
        chars_.begin() + static_cast<std::ptrdiff_t>(first), chars_.end(), byte_offset,
        [](const DecodedChar& c, std::size_t off) { return c.offset < off; });
    const std::size_t column = static_cast<std::size_t>(cit - chars_.begin()) - first + 1;
    return {line, column};
}

std::pair<std::size_t, std::size_t> LineIndex::line_bounds(std::size_t line) const {
    if (line == 0 || line > line_starts_.size()) return {0, 0};
    return {line_starts_[line - 1], line_ends_[line - 1]};
}

}  // namespace srcguard::utf8
