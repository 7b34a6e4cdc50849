#include "srcguard/unicode_tables.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>

#ifndef SRCGUARD_DEFAULT_DATA_DIR
#define SRCGUARD_DEFAULT_DATA_DIR "data"
#endif

namespace srcguard {

namespace {

constexpr std::array<std::string_view, bidi_class_count> bidi_names = {
    "L", "R", "AL", "EN", "ES", "ET", "AN", "CS", "NSM", "BN", "B", "S", "WS", "ON",
    "LRE", "RLE", "LRO", "RLO", "PDF", "LRI", "RLI", "FSI", "PDI",
};

constexpr std::array<std::string_view, 30> gc_names = {
    "Lu", "Ll", "Lt", "Lm", "Lo", "Mn", "Mc", "Me", "Nd", "Nl", "No", "Pc", "Pd", "Ps", "Pe",
    "Pi", "Pf", "Po", "Sm", "Sc", "Sk", "So", "Zs", "Zl", "Zp", "Cc", "Cf", "Cs", "Co", "Cn",
};

constexpr char32_t hangul_s_base = 0xAC00;
constexpr char32_t hangul_l_base = 0x1100;
constexpr char32_t hangul_v_base = 0x1161;
constexpr char32_t hangul_t_base = 0x11A7;
constexpr char32_t hangul_t_count = 28;
constexpr char32_t hangul_n_count = 21 * hangul_t_count;
constexpr char32_t hangul_s_count = 19 * hangul_n_count;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

struct Row {
    std::size_t line;
    std::vector<std::string_view> fields;
};

// Reads a `;`-separated table, dropping `#` comments and blank lines.
class TableFile {
public:
    TableFile(const std::filesystem::path& dir, std::string name) : path_(dir / name) {
        std::ifstream in(path_, std::ios::binary);
        if (!in) throw TableLoadError(path_, 0, "cannot open table file " + path_.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        content_ = ss.str();

        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= content_.size()) {
            const std::size_t nl = content_.find('\n', pos);
            const std::size_t end = nl == std::string::npos ? content_.size() : nl;
            std::string_view line(content_.data() + pos, end - pos);
            ++line_no;
            constexpr std::string_view version_tag = "# Unicode-Version:";
            if (line.starts_with(version_tag)) version_ = std::string(trim(line.substr(version_tag.size())));
            if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
            line = trim(line);
            if (!line.empty()) {
                Row row{line_no, {}};
                std::size_t start = 0;
                for (;;) {
                    const std::size_t semi = line.find(';', start);
                    row.fields.push_back(trim(line.substr(start, semi == std::string_view::npos ? line.npos : semi - start)));
                    if (semi == std::string_view::npos) break;
                    start = semi + 1;
                }
                rows_.push_back(std::move(row));
            }
            if (nl == std::string::npos) break;
            pos = nl + 1;
        }
    }

    const std::vector<Row>& rows() const { return rows_; }
    const std::string& version() const { return version_; }
    const std::filesystem::path& path() const { return path_; }

    [[noreturn]] void fail(const Row& row, const std::string& what) const {
        throw TableLoadError(path_, row.line,
                             path_.filename().string() + ":" + std::to_string(row.line) + ": " + what);
    }

    void expect_fields(const Row& row, std::size_t n) const {
        if (row.fields.size() != n)
            fail(row, "expected " + std::to_string(n) + " fields, found " + std::to_string(row.fields.size()));
    }

    char32_t code_point(const Row& row, std::string_view text) const {
        if (text.size() < 4 || text.size() > 6) fail(row, "bad code point '" + std::string(text) + "'");
        std::uint32_t value = 0;
        for (char c : text) {
            if (!((c >= '0' && c <= '9') || (c >= 'A' && c <= 'F')))
                fail(row, "bad code point '" + std::string(text) + "'");
        }
        std::from_chars(text.data(), text.data() + text.size(), value, 16);
        if (value > UnicodeTables::max_code_point) fail(row, "code point out of range");
        return value;
    }

    std::pair<char32_t, char32_t> range(const Row& row, std::string_view text) const {
        const auto dots = text.find("..");
        if (dots == std::string_view::npos) {
            const char32_t cp = code_point(row, text);
            return {cp, cp};
        }
        const char32_t lo = code_point(row, text.substr(0, dots));
        const char32_t hi = code_point(row, text.substr(dots + 2));
        if (hi < lo) fail(row, "inverted range");
        return {lo, hi};
    }

    std::u32string sequence(const Row& row, std::string_view text) const {
        std::u32string out;
        std::size_t start = 0;
        while (start < text.size()) {
            const std::size_t space = text.find(' ', start);
            const std::string_view item = text.substr(start, space == std::string_view::npos ? text.npos : space - start);
            if (!item.empty()) out.push_back(code_point(row, item));
            if (space == std::string_view::npos) break;
            start = space + 1;
        }
        if (out.empty()) fail(row, "empty code point sequence");
        return out;
    }

private:
    std::filesystem::path path_;
    std::string content_;
    std::string version_;
    std::vector<Row> rows_;
};

bool is_hangul_syllable(char32_t cp) { return cp >= hangul_s_base && cp < hangul_s_base + hangul_s_count; }

}  // namespace

TableLoadError::TableLoadError(std::filesystem::path file, std::size_t line, const std::string& what)
    : std::runtime_error(what), file_(std::move(file)), line_(line) {}

std::string_view to_string(BidiClass c) { return bidi_names[static_cast<std::size_t>(c)]; }

std::optional<BidiClass> parse_bidi_class(std::string_view name) {
    for (std::size_t i = 0; i < bidi_names.size(); ++i)
        if (bidi_names[i] == name) return static_cast<BidiClass>(i);
    return std::nullopt;
}

std::string_view to_string(GeneralCategory c) { return gc_names[static_cast<std::size_t>(c)]; }

std::optional<GeneralCategory> parse_general_category(std::string_view name) {
    for (std::size_t i = 0; i < gc_names.size(); ++i)
        if (gc_names[i] == name) return static_cast<GeneralCategory>(i);
    return std::nullopt;
}

UnicodeTables UnicodeTables::load(const std::filesystem::path& dir, const TableOptions& options) {
    if (!std::filesystem::is_directory(dir))
        throw TableLoadError(dir, 0, "table directory not found: " + dir.string());

    UnicodeTables t;
    constexpr std::size_t space = max_code_point + 1;

    const TableFile bidi(dir, "bidi_classes.txt");
    t.version_ = bidi.version();
    if (t.version_.empty()) throw TableLoadError(bidi.path(), 0, "bidi_classes.txt: missing '# Unicode-Version:' header");

    const auto check_version = [&](const TableFile& f) {
        if (!f.version().empty() && f.version() != t.version_)
            throw TableLoadError(f.path(), 0,
                                 f.path().filename().string() + ": Unicode version " + f.version() +
                                     " does not match " + t.version_);
    };

    t.bidi_.assign(space, static_cast<std::uint8_t>(BidiClass::L));
    for (const auto& row : bidi.rows()) {
        bidi.expect_fields(row, 2);
        const auto [lo, hi] = bidi.range(row, row.fields[0]);
        const auto cls = parse_bidi_class(row.fields[1]);
        if (!cls) bidi.fail(row, "unknown bidi class '" + std::string(row.fields[1]) + "'");
        std::fill(t.bidi_.begin() + lo, t.bidi_.begin() + hi + 1, static_cast<std::uint8_t>(*cls));
    }
    for (char32_t cp : {0x202A, 0x202B, 0x202C, 0x202D, 0x202E, 0x2066, 0x2067, 0x2068, 0x2069}) {
        const auto cls = static_cast<BidiClass>(t.bidi_[cp]);
        if (cls < BidiClass::LRE)
            throw TableLoadError(bidi.path(), 0,
                                 "bidi_classes.txt: control " + std::to_string(cp) + " has non-control class");
        t.bidi_controls_.push_back(cp);
    }

    const TableFile invisibles(dir, "invisibles.txt");
    check_version(invisibles);
    t.invisible_.assign(space, false);
    for (const auto& row : invisibles.rows()) {
        invisibles.expect_fields(row, 1);
        const auto [lo, hi] = invisibles.range(row, row.fields[0]);
        for (char32_t cp = lo; cp <= hi; ++cp) t.invisible_[cp] = true;
    }
    for (char32_t cp : options.extra_invisibles)
        if (cp <= max_code_point) t.invisible_[cp] = true;
    for (char32_t cp : options.visible_overrides)
        if (cp <= max_code_point) t.invisible_[cp] = false;
    for (char32_t cp : t.bidi_controls_) t.invisible_[cp] = false;
    for (char32_t cp = 0; cp < space; ++cp)
        if (t.invisible_[cp]) t.invisible_list_.push_back(cp);

    const TableFile scripts(dir, "scripts.txt");
    check_version(scripts);
    t.script_names_ = {"Unknown"};
    t.script_.assign(space, 0);
    for (const auto& row : scripts.rows()) {
        scripts.expect_fields(row, 2);
        const auto [lo, hi] = scripts.range(row, row.fields[0]);
        if (row.fields[1].empty()) scripts.fail(row, "empty script name");
        auto it = std::find(t.script_names_.begin(), t.script_names_.end(), row.fields[1]);
        if (it == t.script_names_.end()) {
            if (t.script_names_.size() >= 255) scripts.fail(row, "too many scripts");
            t.script_names_.emplace_back(row.fields[1]);
            it = t.script_names_.end() - 1;
        }
        std::fill(t.script_.begin() + lo, t.script_.begin() + hi + 1,
                  static_cast<std::uint8_t>(it - t.script_names_.begin()));
    }

    const TableFile gc(dir, "general_categories.txt");
    check_version(gc);
    t.gc_.assign(space, static_cast<std::uint8_t>(GeneralCategory::Cn));
    for (const auto& row : gc.rows()) {
        gc.expect_fields(row, 2);
        const auto [lo, hi] = gc.range(row, row.fields[0]);
        const auto cat = parse_general_category(row.fields[1]);
        if (!cat) gc.fail(row, "unknown general category '" + std::string(row.fields[1]) + "'");
        std::fill(t.gc_.begin() + lo, t.gc_.begin() + hi + 1, static_cast<std::uint8_t>(*cat));
    }

    const TableFile ccc(dir, "combining_classes.txt");
    check_version(ccc);
    t.ccc_.assign(space, 0);
    for (const auto& row : ccc.rows()) {
        ccc.expect_fields(row, 2);
        const auto [lo, hi] = ccc.range(row, row.fields[0]);
        unsigned value = 0;
        const auto f = row.fields[1];
        const auto res = std::from_chars(f.data(), f.data() + f.size(), value);
        if (res.ec != std::errc{} || res.ptr != f.data() + f.size() || value > 254)
            ccc.fail(row, "bad combining class '" + std::string(f) + "'");
        std::fill(t.ccc_.begin() + lo, t.ccc_.begin() + hi + 1, static_cast<std::uint8_t>(value));
    }

    const TableFile decomp(dir, "decompositions.txt");
    check_version(decomp);
    for (const auto& row : decomp.rows()) {
        decomp.expect_fields(row, 2);
        t.decompositions_[decomp.code_point(row, row.fields[0])] = decomp.sequence(row, row.fields[1]);
    }

    const TableFile brackets(dir, "brackets.txt");
    check_version(brackets);
    for (const auto& row : brackets.rows()) {
        brackets.expect_fields(row, 3);
        const char32_t cp = brackets.code_point(row, row.fields[0]);
        const char32_t pair = brackets.code_point(row, row.fields[1]);
        BracketType type;
        if (row.fields[2] == "o") type = BracketType::Open;
        else if (row.fields[2] == "c") type = BracketType::Close;
        else brackets.fail(row, "bracket type must be 'o' or 'c'");
        t.brackets_[cp] = Bracket{pair, type};
    }

    const TableFile aliases(dir, "name_aliases.txt");
    check_version(aliases);
    for (const auto& row : aliases.rows()) {
        aliases.expect_fields(row, 2);
        if (row.fields[1].empty()) aliases.fail(row, "empty alias");
        t.aliases_.emplace(aliases.code_point(row, row.fields[0]), std::string(row.fields[1]));
    }

    const TableFile folding(dir, "case_folding.txt");
    check_version(folding);
    for (const auto& row : folding.rows()) {
        folding.expect_fields(row, 2);
        t.case_folding_[folding.code_point(row, row.fields[0])] = folding.code_point(row, row.fields[1]);
    }

    const TableFile confusables(dir, "confusables.txt");
    check_version(confusables);
    for (const auto& row : confusables.rows()) {
        confusables.expect_fields(row, 2);
        t.confusables_[confusables.code_point(row, row.fields[0])] = confusables.sequence(row, row.fields[1]);
    }
    // The skeleton loop must terminate: every target has to reach a fixed
    // point within a few rounds.
    for (const auto& [cp, target] : t.confusables_) {
        std::u32string current = target;
        bool stable = false;
        for (int round = 0; round < 8 && !stable; ++round) {
            std::u32string next;
            for (char32_t c : current) {
                const auto it = t.confusables_.find(c);
                if (it == t.confusables_.end()) next.push_back(c);
                else next += it->second;
            }
            next = t.nfd(next);
            stable = next == current;
            current = std::move(next);
        }
        if (!stable)
            throw TableLoadError(confusables.path(), 0,
                                 "confusables.txt: mapping for " + std::to_string(cp) + " does not converge");
    }
    return t;
}

std::string_view UnicodeTables::script_of(char32_t cp) const {
    if (cp > max_code_point) return script_names_.front();
    return script_names_[script_[cp]];
}

Bracket UnicodeTables::bracket(char32_t cp) const {
    const auto it = brackets_.find(cp);
    return it == brackets_.end() ? Bracket{} : it->second;
}

char32_t UnicodeTables::canonical_bracket(char32_t cp) const {
    const auto it = decompositions_.find(cp);
    if (it != decompositions_.end() && it->second.size() == 1) return it->second.front();
    return cp;
}

std::optional<std::string_view> UnicodeTables::short_alias(char32_t cp) const {
    const auto it = aliases_.find(cp);
    if (it == aliases_.end()) return std::nullopt;
    return std::string_view(it->second);
}

char32_t UnicodeTables::simple_case_fold(char32_t cp) const {
    const auto it = case_folding_.find(cp);
    return it == case_folding_.end() ? cp : it->second;
}

std::u32string UnicodeTables::nfd(std::u32string_view text) const {
    std::u32string out;
    out.reserve(text.size());
    for (char32_t cp : text) {
        if (cp < 0xC0) {
            out.push_back(cp);
        } else if (is_hangul_syllable(cp)) {
            const char32_t s = cp - hangul_s_base;
            out.push_back(hangul_l_base + s / hangul_n_count);
            out.push_back(hangul_v_base + (s % hangul_n_count) / hangul_t_count);
            if (const char32_t tail = s % hangul_t_count; tail != 0) out.push_back(hangul_t_base + tail);
        } else if (const auto it = decompositions_.find(cp); it != decompositions_.end()) {
            out += it->second;
        } else {
            out.push_back(cp);
        }
    }
    // Canonical ordering: stable sort each run of non-starters by class.
    for (std::size_t i = 0; i < out.size();) {
        if (combining_class(out[i]) == 0) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < out.size() && combining_class(out[j]) != 0) ++j;
        if (j - i > 1)
            std::stable_sort(out.begin() + static_cast<std::ptrdiff_t>(i), out.begin() + static_cast<std::ptrdiff_t>(j),
                             [this](char32_t a, char32_t b) { return combining_class(a) < combining_class(b); });
        i = j;
    }
    return out;
}

std::u32string UnicodeTables::skeleton(std::u32string_view text, bool fold_case) const {
    std::u32string current = nfd(text);
    // Load verified convergence of the plain mapping; the cap only matters
    // when case folding is mixed in.
    for (int round = 0; round < 16; ++round) {
        std::u32string next;
        next.reserve(current.size());
        for (char32_t c : current) {
            if (fold_case) c = simple_case_fold(c);
            const auto it = confusables_.find(c);
            if (it == confusables_.end()) next.push_back(c);
            else next += it->second;
        }
        next = nfd(next);
        if (next == current) break;
        current = std::move(next);
    }
    return current;
}

std::filesystem::path default_data_dir() {
    if (const char* env = std::getenv("SRCGUARD_DATA"); env && *env) return env;
    return SRCGUARD_DEFAULT_DATA_DIR;
}

std::shared_ptr<const UnicodeTables> default_tables() {
    static std::once_flag once;
    static std::shared_ptr<const UnicodeTables> tables;
    std::call_once(once, [] {
        tables = std::make_shared<const UnicodeTables>(UnicodeTables::load(default_data_dir() / "ucd"));
    });
    return tables;
}

}  // namespace srcguard
