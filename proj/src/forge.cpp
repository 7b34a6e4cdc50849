#include "srcguard/forge.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "srcguard/rendering.hpp"
#include "srcguard/utf8.hpp"

namespace srcguard::forge {

namespace {

using ojson = nlohmann::ordered_json;

constexpr std::string_view rlo = "\xE2\x80\xAE";  // U+202E
constexpr std::string_view lri = "\xE2\x81\xA6";  // U+2066
constexpr std::string_view pdi = "\xE2\x81\xA9";  // U+2069
constexpr std::string_view zwsp = "\xE2\x80\x8B";  // U+200B

struct Templates {
    std::string_view profile;
    std::string_view stretched;
    std::string_view spoof;  // empty when the language has no block comments
    std::string_view homoglyph;
};

// Placeholders: {A} access level, {S} stretched string body, {Z} invisible,
// {T} trojan function name, {F} genuine function name.
constexpr Templates templates[] = {
    {"C",
     R"(#include <stdio.h>
#include <string.h>

int main() {
    char* access_level = "{A}";
    if (strcmp(access_level, "{S}")) {
        printf("You are an admin.\n");
    }
    return 0;
}
)",
     R"(#include <stdio.h>
#include <string.h>

int main() {
    char* access_level = "{A}";
    /* Only admins may continue. *{Z}/
    if (strcmp(access_level, "admin") != 0) {
        return 1;
    }
    /* Admin area below. */
    printf("You are an admin.\n");
    return 0;
}
)",
     R"(#include <stdio.h>

void {T}(const char* message) {
    printf("You are an admin.\n");
}

void {F}(const char* message) {
    printf("%s\n", message);
}

int main() {
    const char* access_level = "{A}";
    {T}(access_level);
    return 0;
}
)"},
    {"C++",
     R"(#include <cstdio>
#include <cstring>

int main() {
    const char* access_level = "{A}";
    if (std::strcmp(access_level, "{S}")) {
        std::printf("You are an admin.\n");
    }
    return 0;
}
)",
     R"(#include <cstdio>
#include <string>

int main() {
    std::string access_level = "{A}";
    /* Only admins may continue. *{Z}/
    if (access_level != "admin") {
        return 1;
    }
    /* Admin area below. */
    std::printf("You are an admin.\n");
    return 0;
}
)",
     R"(#include <cstdio>

void {T}(const char* message) {
    std::printf("You are an admin.\n");
}

void {F}(const char* message) {
    std::printf("%s\n", message);
}

int main() {
    const char* access_level = "{A}";
    {T}(access_level);
    return 0;
}
)"},
    {"Python",
     R"(access_level = "{A}"
if access_level != "{S}":
    print("You are an admin.")
)",
     "",
     R"(def {T}(message):
    print("You are an admin.")


access_level = "{A}"
{F}(access_level)
{T}(access_level)
)"},
    {"JavaScript",
     R"(const accessLevel = "{A}";
if (accessLevel != "{S}") {
    console.log("You are an admin.");
}
)",
     R"(function check(accessLevel) {
    /* Only admins may continue. *{Z}/
    if (accessLevel != "admin") { return false; }
    /* Admin area below. */
    console.log("You are an admin.");
    return true;
}

check("{A}");
)",
     R"(function {T}(message) {
    console.log("You are an admin.");
}

function {F}(message) {
    console.log(message);
}

const accessLevel = "{A}";
{T}(accessLevel);
)"},
    {"Rust",
     R"(fn main() {
    let access_level = "{A}";
    if access_level != "{S}" {
        println!("You are an admin.");
    }
}
)",
     // Block comments nest in Rust, so the hidden code closes with a
     // trailing */ rather than a second comment.
     R"(fn main() {
    let access_level = "{A}";
    /* Only admins may continue. *{Z}/
    if access_level != "admin" { return; } // admins only */
    println!("You are an admin.");
}
)",
     R"(fn {T}(message: &str) {
    println!("You are an admin.");
}

fn {F}(message: &str) {
    println!("{}", message);
}

fn main() {
    let access_level = "{A}";
    {T}(access_level);
}
)"},
    {"Go",
     R"(package main

import "fmt"

func main() {
	accessLevel := "{A}"
	if accessLevel != "{S}" {
		fmt.Println("You are an admin.")
	}
}
)",
     R"(package main

import "fmt"

func main() {
	accessLevel := "{A}"
	/* Only admins may continue. *{Z}/
	if accessLevel != "admin" {
		return
	}
	/* Admin area below. */
	fmt.Println("You are an admin.")
}
)",
     R"(package main

import "fmt"

func {T}(message string) {
	fmt.Println("You are an admin.")
}

func {F}(message string) {
	fmt.Println(message)
}

func main() {
	accessLevel := "{A}"
	{T}(accessLevel)
}
)"},
};

const Templates* templates_for(std::string_view profile) {
    for (const auto& t : templates)
        if (t.profile == profile) return &t;
    return nullptr;
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
    for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size())
        s.replace(pos, from.size(), to);
}

// Cyrillic look-alikes for Latin lower-case letters.
std::optional<std::string> trojan_name(std::string_view name) {
    static constexpr std::pair<char, std::string_view> lookalikes[] = {
        {'p', "\xD1\x80"},  // U+0440
        {'a', "\xD0\xB0"},  // U+0430
        {'c', "\xD1\x81"},  // U+0441
        {'e', "\xD0\xB5"},  // U+0435
        {'o', "\xD0\xBE"},  // U+043E
        {'x', "\xD1\x85"},  // U+0445
        {'y', "\xD1\x83"},  // U+0443
        {'i', "\xD1\x96"},  // U+0456
    };
    for (std::size_t i = 0; i < name.size(); ++i) {
        for (const auto& [latin, cyrillic] : lookalikes) {
            if (name[i] == latin)
                return std::string(name.substr(0, i)) + std::string(cyrillic) + std::string(name.substr(i + 1));
        }
    }
    return std::nullopt;
}

bool valid_payload(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    });
}

const lex::LanguageProfile& require_profile(const ForgeSpec& spec, const lex::ProfileRegistry& registry) {
    const auto* profile = registry.by_name(spec.profile);
    if (!profile) throw ForgeError("unknown profile '" + spec.profile + "'");
    if (const auto reason = unsupported_reason(spec.variant, *profile)) throw ForgeError(*reason);
    if (!valid_payload(spec.access_level) || !valid_payload(spec.function_name))
        throw ForgeError("payload names must be non-empty ASCII words");
    return *profile;
}

std::string header(const ForgeSpec& spec, const lex::LanguageProfile& profile, bool control) {
    return profile.line_comments.front() + " srcguard forge: " + std::string(to_string(spec.variant)) +
           (control ? " control" : "") + " (" + profile.name + ")\n";
}

std::string body(const ForgeSpec& spec, const lex::LanguageProfile& profile) {
    const Templates& t = *templates_for(profile.name);
    std::string out;
    switch (spec.variant) {
        case Variant::StretchedString: {
            out = std::string(t.stretched);
            const std::string stretched = spec.access_level + std::string(rlo) + " " + std::string(lri) +
                                          profile.line_comments.front() + " Check if admin" + std::string(pdi) +
                                          " " + std::string(lri);
            replace_all(out, "{S}", stretched);
            break;
        }
        case Variant::CommentSpoof:
            out = std::string(t.spoof);
            replace_all(out, "{Z}", zwsp);
            break;
        case Variant::HomoglyphFunction: {
            out = std::string(t.homoglyph);
            const auto trojan = trojan_name(spec.function_name);
            if (!trojan) throw ForgeError("function name '" + spec.function_name + "' has no letter with a look-alike");
            replace_all(out, "{T}", *trojan);
            replace_all(out, "{F}", spec.function_name);
            break;
        }
    }
    replace_all(out, "{A}", spec.access_level);
    return out;
}

std::string trim_trailing_spaces(std::string_view text) {
    std::string out;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.pop_back();
        out += line;
        out += '\n';
    }
    return out;
}

std::string slug(std::string_view name) {
    std::string out;
    for (char c : name) {
        if (c == '+') out += 'p';
        else if (std::isalnum(static_cast<unsigned char>(c))) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        else out += '_';
    }
    return out;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw ForgeError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ForgeError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ForgeError("write failed for " + path.string());
}

void write_manifest(const std::filesystem::path& out_dir, const std::vector<ManifestEntry>& entries) {
    std::string text;
    for (const auto& e : entries) text += manifest_line(e) + "\n";
    write_file(out_dir / "manifest.jsonl", text);
}

// Portable integer draws: the standard distributions are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
    template <typename T, std::size_t N>
    const T& pick(const T (&items)[N]) { return items[below(N)]; }

private:
    std::mt19937_64 engine_;
};

constexpr const char* words[] = {"count", "total", "buffer", "index", "value", "offset", "length", "parse",
                                 "render", "config", "handle", "result", "cache", "token", "stream", "node",
                                 "queue", "limit", "scale", "check", "merge", "split", "flush", "entry"};

std::string identifier(Rng& rng) {
    return std::string(rng.pick(words)) + "_" + rng.pick(words);
}

std::string benign_function(std::string_view profile, Rng& rng, bool non_ascii) {
    const std::string name = identifier(rng) + std::to_string(rng.below(1000));
    const std::string a = rng.pick(words);
    const std::string b = std::string(rng.pick(words)) + "2";
    const std::string label = std::string(rng.pick(words)) + " " + rng.pick(words);
    static constexpr std::string_view friendly[] = {"café au lait", "שלום",
                                                    "你好世界", "naïve résumé"};
    const std::string text = non_ascii ? std::string(friendly[rng.below(4)]) : label;
    const int k = static_cast<int>(rng.below(97)) + 1;
    std::ostringstream o;
    if (profile == "Python") {
        o << "# " << label << "\n";
        o << "def " << name << "(" << a << ", " << b << "):\n";
        o << "    x = " << a << " * " << k << " + " << b << "\n";
        o << "    message = \"" << text << "\"\n";
        o << "    if x > " << k * 3 << ":\n        return len(message)\n";
        o << "    return x\n\n\n";
    } else if (profile == "JavaScript") {
        o << "// " << label << "\n";
        o << "function " << name << "(" << a << ", " << b << ") {\n";
        o << "    let x = " << a << " * " << k << " + " << b << ";\n";
        o << "    const message = \"" << text << "\";\n";
        o << "    if (x > " << k * 3 << ") { return message.length; }\n";
        o << "    return x;\n}\n\n";
    } else if (profile == "Rust") {
        o << "/// " << label << "\n";
        o << "fn " << name << "(" << a << ": i64, " << b << ": i64) -> i64 {\n";
        o << "    let x = " << a << " * " << k << " + " << b << ";\n";
        o << "    let message = \"" << text << "\";\n";
        o << "    if x > " << k * 3 << " { return message.len() as i64; }\n";
        o << "    x\n}\n\n";
    } else if (profile == "Go") {
        o << "// " << label << "\n";
        o << "func " << name << "(" << a << " int, " << b << " int) int {\n";
        o << "\tx := " << a << "*" << k << " + " << b << "\n";
        o << "\tmessage := \"" << text << "\"\n";
        o << "\tif x > " << k * 3 << " {\n\t\treturn len(message)\n\t}\n";
        o << "\treturn x\n}\n\n";
    } else {
        o << "/* " << label << " */\n";
        o << "static int " << name << "(int " << a << ", int " << b << ") {\n";
        o << "    int x = " << a << " * " << k << " + " << b << ";\n";
        o << "    const char* message = \"" << text << "\";\n";
        o << "    if (x > " << k * 3 << ") {\n        return (int)strlen(message);\n    }\n";
        o << "    return x; // " << label << "\n}\n\n";
    }
    return o.str();
}

std::string benign_file(std::string_view profile, Rng& rng, bool non_ascii) {
    std::string out;
    if (profile == "Go") out += "package main\n\n";
    if (profile == "C" || profile == "C++") out += "#include <string.h>\n\n";
    const std::size_t functions = 8 + rng.below(20);
    const std::size_t special = rng.below(functions);
    for (std::size_t i = 0; i < functions; ++i) out += benign_function(profile, rng, non_ascii && i == special);
    return out;
}

}  // namespace

std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::StretchedString: return "stretched_string";
        case Variant::CommentSpoof: return "comment_spoof";
        case Variant::HomoglyphFunction: return "homoglyph_function";
    }
    return "stretched_string";
}

std::optional<Variant> parse_variant(std::string_view name) {
    std::string key(name);
    std::replace(key.begin(), key.end(), '-', '_');
    for (Variant v : all_variants)
        if (to_string(v) == key) return v;
    return std::nullopt;
}

RuleId expected_rule(Variant v) {
    switch (v) {
        case Variant::StretchedString: return RuleId::BidiUnterminated;
        case Variant::CommentSpoof: return RuleId::TerminatorSpoof;
        case Variant::HomoglyphFunction: return RuleId::ConfusableIdentifiers;
    }
    return RuleId::BidiUnterminated;
}

std::optional<std::string> unsupported_reason(Variant v, const lex::LanguageProfile& profile) {
    const Templates* t = templates_for(profile.name);
    if (!t) return "no sample template for profile " + profile.name;
    if (profile.line_comments.empty()) return "profile " + profile.name + " has no line comment syntax";
    if (v == Variant::CommentSpoof && (!profile.has_block_comments() || t->spoof.empty()))
        return "comment_spoof needs a block comment syntax; profile " + profile.name + " has none";
    return std::nullopt;
}

std::string forge(const ForgeSpec& spec, const lex::ProfileRegistry& registry, const UnicodeTables&) {
    const auto& profile = require_profile(spec, registry);
    return header(spec, profile, false) + body(spec, profile);
}

std::string forge_control(const ForgeSpec& spec, const lex::ProfileRegistry& registry,
                          const UnicodeTables& tables) {
    const auto& profile = require_profile(spec, registry);
    std::string text = body(spec, profile);
    switch (spec.variant) {
        case Variant::StretchedString:
            // What a reviewer sees, typed out plainly.
            text = trim_trailing_spaces(render_preview(text, tables));
            break;
        case Variant::CommentSpoof:
            replace_all(text, zwsp, "");
            break;
        case Variant::HomoglyphFunction:
            replace_all(text, *trojan_name(spec.function_name), spec.function_name + "_impl");
            break;
    }
    return header(spec, profile, true) + text;
}

std::string manifest_line(const ManifestEntry& e) {
    ojson j;
    j["path"] = e.path;
    j["variant"] = e.variant;
    j["profile"] = e.profile;
    j["expected_rule"] = e.expected_rule ? ojson(std::string(rule_name(*e.expected_rule))) : ojson(nullptr);
    j["kind"] = e.kind;
    if (!e.reason.empty()) j["reason"] = e.reason;
    return j.dump();
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ForgeError("cannot read manifest " + file.string());
    std::vector<ManifestEntry> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = ojson::parse(line);
        ManifestEntry e;
        e.path = j.at("path").get<std::string>();
        e.variant = j.at("variant").get<std::string>();
        e.profile = j.at("profile").get<std::string>();
        if (!j.at("expected_rule").is_null()) e.expected_rule = parse_rule(j.at("expected_rule").get<std::string>());
        e.kind = j.at("kind").get<std::string>();
        e.reason = j.value("reason", std::string());
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<ManifestEntry> forge_corpus(const std::filesystem::path& out_dir,
                                        const std::vector<const lex::LanguageProfile*>& profiles,
                                        const lex::ProfileRegistry& registry, const UnicodeTables& tables) {
    std::vector<ManifestEntry> entries;
    for (const auto* profile : profiles) {
        for (Variant v : all_variants) {
            const std::string variant(to_string(v));
            if (const auto reason = unsupported_reason(v, *profile)) {
                entries.push_back({"", variant, profile->name, std::nullopt, "skipped", *reason});
                continue;
            }
            const ForgeSpec spec{v, profile->name};
            const std::string ext = profile->extensions.empty() ? ".txt" : profile->extensions.front();
            const std::string name = variant + "_" + slug(profile->name) + ext;
            const std::string attack = "attacks/" + name;
            const std::string control = "controls/" + name;
            write_file(out_dir / attack, forge(spec, registry, tables));
            write_file(out_dir / control, forge_control(spec, registry, tables));
            entries.push_back({attack, variant, profile->name, expected_rule(v), "attack", ""});
            entries.push_back({control, variant, profile->name, std::nullopt, "control", ""});
        }
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw ForgeError("cannot create directory " + out_dir.string() + ": " + ec.message());
    write_manifest(out_dir, entries);
    return entries;
}

std::vector<ManifestEntry> generate_seeded_corpus(const std::filesystem::path& out_dir,
                                                  const lex::ProfileRegistry& registry, const UnicodeTables& tables,
                                                  const SeededCorpusOptions& options) {
    static constexpr const char* languages[] = {"C", "C++", "Python", "JavaScript", "Rust", "Go"};
    Rng rng(options.seed);

    // Which files carry attacks and which carry harmless non-ASCII text.
    std::vector<std::size_t> order(options.files);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    std::vector<char> role(options.files, 'b');
    const std::size_t attacks = std::min(options.attacks, options.files);
    const std::size_t friendly = std::min(options.benign_non_ascii, options.files - attacks);
    for (std::size_t i = 0; i < attacks; ++i) role[order[i]] = 'a';
    for (std::size_t i = attacks; i < attacks + friendly; ++i) role[order[i]] = 'n';

    std::vector<std::pair<Variant, const lex::LanguageProfile*>> expressible;
    for (Variant v : all_variants)
        for (const char* lang : languages)
            if (const auto* p = registry.by_name(lang); p && !unsupported_reason(v, *p)) expressible.emplace_back(v, p);
    if (attacks > 0 && expressible.empty()) throw ForgeError("no expressible attack for the registered profiles");

    std::vector<ManifestEntry> entries;
    std::size_t next_attack = 0;
    for (std::size_t i = 0; i < options.files; ++i) {
        char dir[32];
        char file[32];
        std::snprintf(dir, sizeof dir, "pkg%02zu", i % 20);
        std::snprintf(file, sizeof file, "unit%04zu", i);
        if (role[i] == 'a') {
            const auto& [variant, profile] = expressible[next_attack++ % expressible.size()];
            const std::string rel = std::string(dir) + "/" + file + profile->extensions.front();
            write_file(out_dir / rel, forge({variant, profile->name}, registry, tables));
            entries.push_back({rel, std::string(to_string(variant)), profile->name, expected_rule(variant), "attack", ""});
            continue;
        }
        const char* lang = languages[rng.below(6)];
        const auto* profile = registry.by_name(lang);
        const std::string rel = std::string(dir) + "/" + file + profile->extensions.front();
        write_file(out_dir / rel, benign_file(lang, rng, role[i] == 'n'));
        entries.push_back({rel, "", profile->name, std::nullopt, "benign", ""});
    }
    write_manifest(out_dir, entries);
    return entries;
}

}  // namespace srcguard::forge
