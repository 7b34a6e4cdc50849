#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "srcguard/lexing.hpp"
#include "srcguard/utf8.hpp"

namespace srcguard::lex {

namespace {

using json = nlohmann::json;

StringSyntax quoted(std::string q, bool multiline = false) { return {q, q, U'\\', multiline}; }

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::u32string json_chars(const json& j, const char* key) {
    if (!j.contains(key)) return {};
    return utf8::to_u32(j.at(key).get<std::string>());
}

LanguageProfile profile_from_json(const json& j) {
    LanguageProfile p;
    p.name = j.at("name").get<std::string>();
    for (const auto& e : j.value("extensions", json::array())) p.extensions.push_back(lower(e.get<std::string>()));
    for (const auto& c : j.value("line_comments", json::array())) p.line_comments.push_back(c.get<std::string>());
    for (const auto& b : j.value("block_comments", json::array()))
        p.block_comments.push_back({b.at("open").get<std::string>(), b.at("close").get<std::string>(),
                                    b.value("nestable", false)});
    for (const auto& s : j.value("strings", json::array())) {
        StringSyntax sd;
        sd.open = s.at("open").get<std::string>();
        sd.close = s.value("close", sd.open);
        sd.multiline = s.value("multiline", false);
        if (s.contains("escape") && !s.at("escape").is_null()) {
            const auto esc = utf8::to_u32(s.at("escape").get<std::string>());
            if (esc.size() != 1) throw ProfileError("profile " + p.name + ": escape must be one character");
            sd.escape = esc.front();
        }
        p.strings.push_back(std::move(sd));
    }
    if (j.contains("identifiers")) {
        const auto& id = j.at("identifiers");
        const auto charset = id.value("charset", std::string("unicode"));
        if (charset == "ascii") p.identifiers.charset = IdentifierCharset::Ascii;
        else if (charset != "unicode") throw ProfileError("profile " + p.name + ": unknown charset '" + charset + "'");
        p.identifiers.extra_start = json_chars(id, "extra_start");
        p.identifiers.extra_continue = json_chars(id, "extra_continue");
    }
    return p;
}

}  // namespace

void validate(const LanguageProfile& p) {
    const auto fail = [&](const std::string& what) { throw ProfileError("profile " + p.name + ": " + what); };
    if (p.name.empty()) throw ProfileError("profile without a name");
    for (const auto& e : p.extensions)
        if (e.size() < 2 || e.front() != '.') fail("extension '" + e + "' must start with '.'");
    for (const auto& c : p.line_comments)
        if (c.empty()) fail("empty line comment marker");
    for (const auto& b : p.block_comments) {
        if (b.open.empty() || b.close.empty()) fail("empty block comment marker");
        if (b.open == b.close) fail("block comment open and close are identical");
    }
    for (const auto& s : p.strings)
        if (s.open.empty() || s.close.empty()) fail("empty string delimiter");
}

void ProfileRegistry::add(LanguageProfile profile) {
    validate(profile);
    for (auto& e : profile.extensions) e = lower(e);
    for (const auto& other : profiles_) {
        if (other.name == profile.name) continue;
        for (const auto& e : profile.extensions)
            if (std::find(other.extensions.begin(), other.extensions.end(), e) != other.extensions.end())
                throw ProfileError("extension " + e + " claimed by both " + other.name + " and " + profile.name);
    }
    const auto it = std::find_if(profiles_.begin(), profiles_.end(),
                                 [&](const LanguageProfile& p) { return p.name == profile.name; });
    if (it != profiles_.end()) *it = std::move(profile);
    else profiles_.push_back(std::move(profile));
}

ProfileRegistry ProfileRegistry::builtin() {
    ProfileRegistry r;
    const BlockCommentSyntax c_block{"/*", "*/", false};

    LanguageProfile c{"C", {".c", ".h"}, {"//"}, {c_block}, {quoted("\""), quoted("'")}, {}};
    LanguageProfile cpp{"C++", {".cpp", ".cc", ".cxx", ".hpp", ".hh", ".hxx"}, {"//"}, {c_block},
                        {quoted("\""), quoted("'")}, {}};
    LanguageProfile py{"Python", {".py", ".pyi"}, {"#"}, {},
                       {quoted("\"\"\"", true), quoted("'''", true), quoted("\""), quoted("'")}, {}};
    LanguageProfile js{"JavaScript", {".js", ".mjs", ".cjs", ".jsx"}, {"//"}, {c_block},
                       {quoted("\""), quoted("'"), quoted("`", true)}, {}};
    js.identifiers.extra_start = U"$";
    // No ' delimiter: it also introduces lifetimes.
    LanguageProfile rs{"Rust", {".rs"}, {"//"}, {{"/*", "*/", true}}, {quoted("\"", true)}, {}};
    LanguageProfile go{"Go", {".go"}, {"//"}, {c_block},
                       {quoted("\""), {"`", "`", std::nullopt, true}, quoted("'")}, {}};

    for (auto* p : {&c, &cpp, &py, &js, &rs, &go}) r.add(std::move(*p));
    return r;
}

ProfileRegistry ProfileRegistry::from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ProfileError(std::string("profile file is not valid JSON: ") + e.what());
    }
    ProfileRegistry r;
    try {
        for (const auto& p : j.at("profiles")) r.add(profile_from_json(p));
    } catch (const json::exception& e) {
        throw ProfileError(std::string("malformed profile file: ") + e.what());
    }
    return r;
}

ProfileRegistry ProfileRegistry::load(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ProfileError("cannot open profile file " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

const LanguageProfile* ProfileRegistry::for_path(const std::filesystem::path& path) const {
    const std::string ext = lower(path.extension().string());
    if (ext.empty()) return nullptr;
    for (const auto& p : profiles_)
        if (std::find(p.extensions.begin(), p.extensions.end(), ext) != p.extensions.end()) return &p;
    return nullptr;
}

const LanguageProfile* ProfileRegistry::by_name(std::string_view name) const {
    const std::string wanted = lower(std::string(name));
    for (const auto& p : profiles_)
        if (lower(p.name) == wanted) return &p;
    return nullptr;
}

const LanguageProfile& ProfileRegistry::plain_text() {
    static const LanguageProfile plain{"text", {}, {}, {}, {}, {}};
    return plain;
}

}  // namespace srcguard::lex
