#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace srcguard {

/// UAX #9 bidirectional character types.
enum class BidiClass : std::uint8_t {
    L, R, AL, EN, ES, ET, AN, CS, NSM, BN, B, S, WS, ON,
    LRE, RLE, LRO, RLO, PDF, LRI, RLI, FSI, PDI,
};
inline constexpr std::size_t bidi_class_count = 23;

std::string_view to_string(BidiClass c);
std::optional<BidiClass> parse_bidi_class(std::string_view name);

enum class GeneralCategory : std::uint8_t {
    Lu, Ll, Lt, Lm, Lo, Mn, Mc, Me, Nd, Nl, No, Pc, Pd, Ps, Pe, Pi, Pf, Po,
    Sm, Sc, Sk, So, Zs, Zl, Zp, Cc, Cf, Cs, Co, Cn,
};

std::string_view to_string(GeneralCategory c);
std::optional<GeneralCategory> parse_general_category(std::string_view name);

inline bool is_letter(GeneralCategory c) { return c <= GeneralCategory::Lo; }
inline bool is_mark(GeneralCategory c) {
    return c == GeneralCategory::Mn || c == GeneralCategory::Mc || c == GeneralCategory::Me;
}

enum class BracketType : std::uint8_t { None, Open, Close };

struct Bracket {
    char32_t pair = 0;
    BracketType type = BracketType::None;
    bool operator==(const Bracket&) const = default;
};

/// Raised when a table file is missing or malformed. `file()` names the
/// offending file; `line()` is 0 when the whole file is unusable.
class TableLoadError : public std::runtime_error {
public:
    TableLoadError(std::filesystem::path file, std::size_t line, const std::string& what);
    const std::filesystem::path& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::filesystem::path file_;
    std::size_t line_;
};

/// Adjustments applied on top of the shipped invisible set.
struct TableOptions {
    std::vector<char32_t> extra_invisibles;
    std::vector<char32_t> visible_overrides;  // removed from the invisible set
};

/// Immutable character-property database backing every detector.
///
/// Loaded from the `;`-separated table files under a data directory
/// (see data/ucd/README.md for the layout). All lookups are total over
/// Unicode scalar values; code points not listed in a range table take the
/// UCD default for that property.
class UnicodeTables {
public:
    static constexpr char32_t max_code_point = 0x10FFFF;

    /// Reads the table files in `dir`. Throws TableLoadError.
    static UnicodeTables load(const std::filesystem::path& dir, const TableOptions& options = {});

    const std::string& version() const noexcept { return version_; }

    BidiClass bidi_class(char32_t cp) const {
        return cp <= max_code_point ? static_cast<BidiClass>(bidi_[cp]) : BidiClass::L;
    }
    /// The nine explicit directional formatting characters.
    bool is_bidi_control(char32_t cp) const {
        return (cp >= 0x202A && cp <= 0x202E) || (cp >= 0x2066 && cp <= 0x2069);
    }
    bool is_invisible(char32_t cp) const { return cp <= max_code_point && invisible_[cp]; }
    std::string_view script_of(char32_t cp) const;
    GeneralCategory general_category(char32_t cp) const {
        return cp <= max_code_point ? static_cast<GeneralCategory>(gc_[cp]) : GeneralCategory::Cn;
    }
    std::uint8_t combining_class(char32_t cp) const { return cp <= max_code_point ? ccc_[cp] : 0; }
    Bracket bracket(char32_t cp) const;
    /// Canonical equivalent used when matching paired brackets.
    char32_t canonical_bracket(char32_t cp) const;
    std::optional<std::string_view> short_alias(char32_t cp) const;
    char32_t simple_case_fold(char32_t cp) const;

    std::u32string nfd(std::u32string_view text) const;

    /// Confusable skeleton: NFD, map each code point through the
    /// confusables table until nothing changes, NFD again.
    std::u32string skeleton(std::u32string_view text, bool fold_case = false) const;

    const std::unordered_map<char32_t, std::u32string>& confusable_map() const { return confusables_; }
    const std::vector<char32_t>& invisible_list() const { return invisible_list_; }
    const std::vector<char32_t>& bidi_control_list() const { return bidi_controls_; }

    bool operator==(const UnicodeTables&) const = default;

private:
    UnicodeTables() = default;

    std::string version_;
    std::vector<std::uint8_t> bidi_;
    std::vector<std::uint8_t> gc_;
    std::vector<std::uint8_t> ccc_;
    std::vector<std::uint8_t> script_;
    std::vector<std::string> script_names_;
    std::vector<bool> invisible_;
    std::vector<char32_t> invisible_list_;
    std::vector<char32_t> bidi_controls_;
    std::unordered_map<char32_t, std::u32string> confusables_;
    std::unordered_map<char32_t, std::u32string> decompositions_;
    std::unordered_map<char32_t, Bracket> brackets_;
    std::unordered_map<char32_t, std::string> aliases_;
    std::unordered_map<char32_t, char32_t> case_folding_;
};

/// Data directory compiled into the build, overridable with SRCGUARD_DATA.
std::filesystem::path default_data_dir();

/// Tables from `default_data_dir()/ucd`, loaded once per process.
std::shared_ptr<const UnicodeTables> default_tables();

}  // namespace srcguard
