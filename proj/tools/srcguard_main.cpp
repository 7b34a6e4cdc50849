#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "srcguard/bidi.hpp"
#include "srcguard/forge.hpp"
#include "srcguard/rendering.hpp"
#include "srcguard/session.hpp"
#include "srcguard/utf8.hpp"

namespace fs = std::filesystem;
using namespace srcguard;

namespace {

constexpr int exit_operational = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

lex::ProfileRegistry load_registry(const std::string& profiles_file) {
    if (profiles_file.empty()) return lex::ProfileRegistry::builtin();
    auto registry = lex::ProfileRegistry::builtin();
    for (auto& p : lex::ProfileRegistry::load(profiles_file).profiles()) registry.add(p);
    return registry;
}

std::optional<std::string> read_all(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

char32_t parse_codepoint(std::string s) {
    if (s.rfind("U+", 0) == 0 || s.rfind("u+", 0) == 0) s = s.substr(2);
    std::size_t used = 0;
    unsigned long v = 0;
    try {
        v = std::stoul(s, &used, 16);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty() || v > 0x10FFFF) throw UsageError("bad code point: " + s);
    return static_cast<char32_t>(v);
}

void print_diagnostics(const std::vector<Diagnostic>& diagnostics) {
    for (const auto& d : diagnostics) {
        std::cerr << "srcguard: " << to_string(d.severity) << ": ";
        if (!d.path.empty()) std::cerr << d.path << ": ";
        std::cerr << d.message << '\n';
    }
}

bool want_color(const std::string& when) {
    if (when == "always") return true;
    if (when == "never") return false;
    const char* no_color = std::getenv("NO_COLOR");
    if (no_color && *no_color) return false;
    return isatty(STDOUT_FILENO) != 0;
}

struct PolicyArgs {
    std::string mode = "default";
    std::vector<std::string> allow;
    std::vector<std::string> severities;
    bool mixed_script = false;
    bool no_mixed_script = false;
    bool fold_case = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--mode", mode, "strict, default or permissive")
            ->check(CLI::IsMember({"strict", "default", "permissive"}));
        cmd->add_option("--allow", allow, "Never flag this code point (U+XXXX); repeatable");
        cmd->add_option("--severity", severities, "Override a rule severity, RULE=info|warning|error");
        cmd->add_flag("--mixed-script", mixed_script, "Report mixed-script identifiers");
        cmd->add_flag("--no-mixed-script", no_mixed_script, "Never report mixed-script identifiers");
        cmd->add_flag("--fold-case", fold_case, "Case-fold identifiers before comparing skeletons");
    }

    Policy build() const {
        Policy p = Policy::for_mode(*parse_mode(mode));
        for (const auto& a : allow) p.allowed_codepoints.insert(parse_codepoint(a));
        for (const auto& s : severities) {
            const auto eq = s.find('=');
            const auto rule = parse_rule(s.substr(0, eq));
            const auto sev = eq == std::string::npos ? std::nullopt : parse_severity(s.substr(eq + 1));
            if (!rule || !sev) throw UsageError("bad --severity value: " + s);
            p.overrides[*rule] = *sev;
        }
        if (mixed_script) p.mixed_script_check = true;
        if (no_mixed_script) p.mixed_script_check = false;
        p.fold_case = fold_case;
        return p;
    }
};

int run_scan(const std::vector<std::string>& paths, const PolicyArgs& policy_args, const std::string& format,
             const std::string& baseline, const std::string& write_baseline, const std::string& lang,
             const std::vector<std::string>& include, const std::vector<std::string>& exclude, std::size_t jobs,
             bool no_prefilter, bool bidi_only, bool hidden, bool follow, const std::string& color,
             const std::string& profiles_file) {
    const auto& tables = *default_tables();
    const auto registry = load_registry(profiles_file);

    ScanConfig config;
    for (const auto& p : paths) config.paths.emplace_back(p);
    config.policy = policy_args.build();
    config.format = *parse_format(format);
    if (!baseline.empty()) config.baseline = baseline;
    if (!write_baseline.empty()) config.write_baseline = write_baseline;
    if (!lang.empty()) config.language = lang;
    config.include = include;
    config.exclude = exclude;
    config.jobs = jobs;
    config.use_prefilter = !no_prefilter;
    config.bidi_only = bidi_only;
    config.skip_hidden = !hidden;
    config.follow_symlinks = follow;

    const auto summary = walk_and_scan(config, tables, registry);
    print_diagnostics(summary.diagnostics);
    EmitOptions emit;
    emit.color = config.format == ReportFormat::Human && want_color(color);
    std::cout << emit_report(summary, config.format, emit) << std::flush;
    return summary.exit_code();
}

int run_sanitize(const std::vector<std::string>& paths, const std::string& out_dir, bool strip, bool in_place,
                 const PolicyArgs& policy_args, const std::string& lang, const std::string& profiles_file) {
    if (in_place == !out_dir.empty()) throw UsageError("sanitize needs exactly one of --out DIR or --in-place");
    const auto& tables = *default_tables();
    const auto registry = load_registry(profiles_file);
    const Policy policy = policy_args.build();
    if (!lang.empty() && !registry.by_name(lang)) throw UsageError("unknown language: " + lang);

    ScanConfig config;
    for (const auto& p : paths) config.paths.emplace_back(p);
    std::vector<Diagnostic> diagnostics;
    const auto files = walk(config, diagnostics);

    RenderStyle style;
    style.strip = strip;
    std::size_t changed = 0;
    for (const auto& f : files) {
        auto bytes = read_all(f.path);
        if (!bytes) {
            diagnostics.push_back({Severity::Error, f.display, "cannot read"});
            continue;
        }
        std::string result = *bytes;
        if (prefilter(*bytes)) {
            std::string text = *bytes;
            if (!utf8::is_valid(text)) {
                text = utf8::repair(text);
                diagnostics.push_back({Severity::Info, f.display, "invalid UTF-8 replaced with U+FFFD"});
            }
            const lex::LanguageProfile* profile = lang.empty() ? registry.for_path(f.path) : registry.by_name(lang);
            result = sanitize(text, profile ? *profile : lex::ProfileRegistry::plain_text(), tables, policy, style);
        }
        if (result != *bytes) ++changed;
        const fs::path target = in_place ? f.path : fs::path(out_dir) / f.relative;
        if (in_place && result == *bytes) continue;
        std::error_code ec;
        if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
        std::ofstream out(target, std::ios::binary | std::ios::trunc);
        if (!out || !out.write(result.data(), static_cast<std::streamsize>(result.size()))) {
            diagnostics.push_back({Severity::Error, target.generic_string(), "cannot write"});
        }
    }
    print_diagnostics(diagnostics);
    std::cerr << "srcguard: sanitized " << files.size() << " file(s), " << changed << " changed\n";
    for (const auto& d : diagnostics)
        if (d.severity == Severity::Error) return exit_operational;
    return 0;
}

int run_preview(const std::string& file) {
    const auto bytes = read_all(file);
    if (!bytes) {
        std::cerr << "srcguard: error: " << file << ": cannot read\n";
        return exit_operational;
    }
    const std::string text = utf8::is_valid(*bytes) ? *bytes : utf8::repair(*bytes);
    std::cout << render_preview(text, *default_tables()) << std::flush;
    return 0;
}

int run_forge(const std::string& out_dir, const std::string& variant, const std::string& lang, bool control,
              bool seeded, const forge::SeededCorpusOptions& seeded_options, const std::string& profiles_file) {
    const auto& tables = *default_tables();
    const auto registry = load_registry(profiles_file);
    if (out_dir.empty()) {
        // Single sample to stdout.
        if (variant.empty() || lang.empty()) throw UsageError("forge needs --out DIR, or --variant and --lang");
        const auto v = forge::parse_variant(variant);
        if (!v) throw UsageError("unknown variant: " + variant);
        forge::ForgeSpec spec;
        spec.variant = *v;
        spec.profile = lang;
        std::cout << (control ? forge::forge_control(spec, registry, tables) : forge::forge(spec, registry, tables));
        return 0;
    }
    std::vector<forge::ManifestEntry> manifest;
    if (seeded) {
        manifest = forge::generate_seeded_corpus(out_dir, registry, tables, seeded_options);
    } else {
        std::vector<const lex::LanguageProfile*> profiles;
        for (const auto& p : registry.profiles()) profiles.push_back(&p);
        manifest = forge::forge_corpus(out_dir, profiles, registry, tables);
    }
    std::size_t attacks = 0, skipped = 0;
    for (const auto& e : manifest) {
        if (e.kind == "attack") ++attacks;
        if (e.kind == "skipped") {
            ++skipped;
            std::cerr << "srcguard: skipped " << e.variant << " for " << e.profile << ": " << e.reason << '\n';
        }
    }
    std::cerr << "srcguard: wrote " << manifest.size() - skipped << " file(s), " << attacks << " attack(s), to "
              << out_dir << '\n';
    return 0;
}

int run_rules() {
    for (const auto& r : rule_reference()) {
        std::cout << r.name << "  [" << to_string(r.default_severity) << ']';
        if (!r.cve.empty()) std::cout << "  " << r.cve;
        std::cout << "\n  " << r.summary << "\n  " << r.guidance << "\n  see " << rule_doc_link(r.id) << "\n\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"srcguard: find bidi controls, invisibles and homoglyphs hiding in source code"};
    app.set_version_flag("--version", std::string(SRCGUARD_VERSION_STRING));
    app.require_subcommand(1);
    std::string profiles_file;
    app.add_option("--profiles", profiles_file, "Extra language profiles (JSON)")->check(CLI::ExistingFile);

    // scan
    auto* scan = app.add_subcommand("scan", "Scan files and directories");
    std::vector<std::string> scan_paths;
    PolicyArgs scan_policy;
    std::string format = "human", baseline, write_baseline, lang, color = "auto";
    std::vector<std::string> include, exclude;
    std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
    bool no_prefilter = false, bidi_only = false, hidden = false, follow = false;
    scan->add_option("paths", scan_paths, "Files or directories")->required();
    scan_policy.attach(scan);
    scan->add_option("--format", format, "human, lines or sarif")->check(CLI::IsMember({"human", "lines", "sarif"}));
    scan->add_option("--baseline", baseline, "Suppress findings listed in this file");
    scan->add_option("--write-baseline", write_baseline, "Write fingerprints of all findings here");
    scan->add_option("--lang", lang, "Treat every file as this language");
    scan->add_option("--include", include, "Only scan paths matching this glob; repeatable");
    scan->add_option("--exclude", exclude, "Skip paths matching this glob; repeatable");
    scan->add_option("--jobs,-j", jobs, "Parallel scans")->check(CLI::PositiveNumber);
    scan->add_flag("--no-prefilter", no_prefilter, "Fully scan pure ASCII files too");
    scan->add_flag("--bidi-only", bidi_only, "Only scan files holding a bidi control");
    scan->add_flag("--hidden", hidden, "Descend into hidden files and directories");
    scan->add_flag("--follow-symlinks", follow, "Follow symbolic links while walking");
    scan->add_option("--color", color, "auto, always or never")->check(CLI::IsMember({"auto", "always", "never"}));

    // sanitize
    auto* san = app.add_subcommand("sanitize", "Write copies with suspect code points escaped or removed");
    std::vector<std::string> san_paths;
    PolicyArgs san_policy;
    std::string san_out, san_lang;
    bool strip = false, in_place = false;
    san->add_option("paths", san_paths, "Files or directories")->required();
    san->add_option("--out", san_out, "Output directory");
    san->add_flag("--strip", strip, "Delete suspect code points instead of escaping them");
    san->add_flag("--in-place", in_place, "Overwrite the inputs");
    san->add_option("--lang", san_lang, "Treat every file as this language");
    san_policy.attach(san);

    // preview
    auto* prev = app.add_subcommand("preview", "Print a file the way a bidi-aware viewer displays it");
    std::string preview_file;
    prev->add_option("file", preview_file, "File to render")->required();

    // forge
    auto* frg = app.add_subcommand("forge", "Generate attack samples with clean controls");
    std::string forge_out, forge_variant, forge_lang;
    bool forge_control = false, forge_seeded = false;
    forge::SeededCorpusOptions seeded;
    frg->add_option("--out", forge_out, "Output directory");
    frg->add_option("--variant", forge_variant, "stretched-string, comment-spoof or homoglyph-function");
    frg->add_option("--lang", forge_lang, "Profile name for a single sample");
    frg->add_flag("--control", forge_control, "Print the clean control instead of the attack");
    frg->add_flag("--seeded", forge_seeded, "Generate a large seeded corpus instead");
    frg->add_option("--files", seeded.files, "Seeded corpus size");
    frg->add_option("--attacks", seeded.attacks, "Planted attacks in the seeded corpus");
    frg->add_option("--benign-non-ascii", seeded.benign_non_ascii, "Harmless non-ASCII files in the seeded corpus");
    frg->add_option("--seed", seeded.seed, "Random seed");

    auto* rules = app.add_subcommand("rules", "Print the rule reference");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_operational;
    }

    try {
        if (*scan)
            return run_scan(scan_paths, scan_policy, format, baseline, write_baseline, lang, include, exclude, jobs,
                            no_prefilter, bidi_only, hidden, follow, color, profiles_file);
        if (*san) return run_sanitize(san_paths, san_out, strip, in_place, san_policy, san_lang, profiles_file);
        if (*prev) return run_preview(preview_file);
        if (*frg)
            return run_forge(forge_out, forge_variant, forge_lang, forge_control, forge_seeded, seeded, profiles_file);
        if (*rules) return run_rules();
    } catch (const std::exception& e) {
        std::cerr << "srcguard: error: " << e.what() << '\n';
        return exit_operational;
    }
    return exit_operational;
}
