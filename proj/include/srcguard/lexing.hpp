#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "srcguard/unicode_tables.hpp"

namespace srcguard::lex {

enum class SpanKind : std::uint8_t { Code, LineComment, BlockComment, StringLiteral };

std::string_view to_string(SpanKind kind);

struct BlockCommentSyntax {
    std::string open;
    std::string close;
    bool nestable = false;
};

struct StringSyntax {
    std::string open;
    std::string close;
    std::optional<char32_t> escape;
    bool multiline = false;
};

enum class IdentifierCharset : std::uint8_t { Unicode, Ascii };

/// Start: letter or `_` (ASCII letters only for the Ascii charset).
/// Continue: start characters, decimal digits and combining marks.
struct IdentifierRules {
    IdentifierCharset charset = IdentifierCharset::Unicode;
    std::u32string extra_start;
    std::u32string extra_continue;
};

struct LanguageProfile {
    std::string name;
    std::vector<std::string> extensions;  // lower case, with the leading dot
    std::vector<std::string> line_comments;
    std::vector<BlockCommentSyntax> block_comments;
    std::vector<StringSyntax> strings;
    IdentifierRules identifiers;

    bool has_block_comments() const { return !block_comments.empty(); }
};

class ProfileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The set of known languages. Extensions are unique across the set.
class ProfileRegistry {
public:
    /// C, C++, Python, JavaScript, Rust and Go.
    static ProfileRegistry builtin();
    /// Parses the JSON profile file format (see data/profiles.json).
    static ProfileRegistry from_json(std::string_view json);
    static ProfileRegistry load(const std::filesystem::path& file);

    /// Adds or replaces (by name) a profile. Throws ProfileError when the
    /// profile is malformed or claims another profile's extension.
    void add(LanguageProfile profile);

    const LanguageProfile* for_path(const std::filesystem::path& path) const;
    const LanguageProfile* by_name(std::string_view name) const;
    const std::vector<LanguageProfile>& profiles() const { return profiles_; }

    /// No comments, no strings: everything is Code.
    static const LanguageProfile& plain_text();

private:
    std::vector<LanguageProfile> profiles_;
};

void validate(const LanguageProfile& profile);

struct Span {
    std::size_t start = 0;
    std::size_t end = 0;  // exclusive
    SpanKind kind = SpanKind::Code;
    std::size_t line = 1;
    bool operator==(const Span&) const = default;
};

/// Partitions `text` (UTF-8) into spans. Line comments and single-line
/// strings end before a CR or LF; unterminated tokens run to end of input.
std::vector<Span> classify_spans(std::string_view text, const LanguageProfile& profile);

struct IdentifierOccurrence {
    std::u32string text;
    std::string path;
    std::size_t line = 0;
    std::size_t column = 0;
    std::size_t byte_offset = 0;
};

bool is_identifier_start(char32_t cp, const IdentifierRules& rules, const UnicodeTables& tables);
bool is_identifier_continue(char32_t cp, const IdentifierRules& rules, const UnicodeTables& tables);

/// Identifiers in Code spans, maximal munch, document order. Numeric
/// literals (a digit followed by identifier characters) are skipped.
std::vector<IdentifierOccurrence> extract_identifiers(std::string_view text, const LanguageProfile& profile,
                                                      const UnicodeTables& tables, std::string_view path = {});
std::vector<IdentifierOccurrence> extract_identifiers(std::string_view text, const std::vector<Span>& spans,
                                                      const LanguageProfile& profile, const UnicodeTables& tables,
                                                      std::string_view path = {});

/// Byte ranges [first, second) of the identifiers extract_identifiers
/// would return, without decoding or positions.
std::vector<std::pair<std::size_t, std::size_t>> identifier_ranges(std::string_view text, const std::vector<Span>& spans,
                                                                   const LanguageProfile& profile,
                                                                   const UnicodeTables& tables);

}  // namespace srcguard::lex
