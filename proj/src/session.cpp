#include "srcguard/session.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <atomic>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include "srcguard/utf8.hpp"

namespace srcguard {

namespace fs = std::filesystem;

bool prefilter(std::string_view bytes) {
    const char* p = bytes.data();
    std::size_t n = bytes.size();
    constexpr std::uint64_t high = 0x8080808080808080ULL;
    while (n >= 32) {
        std::uint64_t w[4];
        std::memcpy(w, p, sizeof w);
        if ((w[0] | w[1] | w[2] | w[3]) & high) return true;
        p += 32;
        n -= 32;
    }
    while (n >= 8) {
        std::uint64_t w;
        std::memcpy(&w, p, sizeof w);
        if (w & high) return true;
        p += 8;
        n -= 8;
    }
    for (; n; --n, ++p)
        if (static_cast<unsigned char>(*p) & 0x80) return true;
    return false;
}

bool prefilter_bidi(std::string_view bytes) {
    std::size_t pos = 0;
    while ((pos = bytes.find('\xE2', pos)) != std::string_view::npos) {
        if (pos + 2 >= bytes.size()) return false;
        const auto b1 = static_cast<unsigned char>(bytes[pos + 1]);
        const auto b2 = static_cast<unsigned char>(bytes[pos + 2]);
        if (b1 == 0x80 && b2 >= 0xAA && b2 <= 0xAE) return true;
        if (b1 == 0x81 && b2 >= 0xA6 && b2 <= 0xA9) return true;
        ++pos;
    }
    return false;
}

std::optional<ReportFormat> parse_format(std::string_view name) {
    if (name == "human") return ReportFormat::Human;
    if (name == "lines") return ReportFormat::Lines;
    if (name == "sarif") return ReportFormat::Sarif;
    return std::nullopt;
}

void ScanConfig::validate() const {
    if (paths.empty()) throw ConfigError("no paths to scan");
    if (jobs == 0) throw ConfigError("jobs must be at least 1");
    std::error_code ec;
    if (baseline && write_baseline &&
        (*baseline == *write_baseline || fs::equivalent(*baseline, *write_baseline, ec)))
        throw ConfigError("--baseline and --write-baseline name the same file");
}

bool glob_match(std::string_view pattern, std::string_view path) {
    const std::string pat(pattern);
    const std::string full(path);
    if (fnmatch(pat.c_str(), full.c_str(), 0) == 0) return true;
    // Patterns without a slash also match any single path component.
    if (pattern.find('/') == std::string_view::npos) {
        std::size_t begin = 0;
        while (begin <= full.size()) {
            std::size_t end = full.find('/', begin);
            if (end == std::string::npos) end = full.size();
            const std::string part = full.substr(begin, end - begin);
            if (!part.empty() && fnmatch(pat.c_str(), part.c_str(), 0) == 0) return true;
            begin = end + 1;
        }
    }
    return false;
}

namespace {

bool hidden(const fs::path& p) {
    const auto name = p.filename().string();
    return name.size() > 1 && name[0] == '.' && name != "..";
}

bool any_match(const std::vector<std::string>& globs, std::string_view path) {
    return std::any_of(globs.begin(), globs.end(), [&](const std::string& g) { return glob_match(g, path); });
}

void walk_dir(const fs::path& root, const fs::path& dir, const ScanConfig& config, std::vector<WalkEntry>& out,
              std::vector<Diagnostic>& diagnostics) {
    std::error_code ec;
    fs::directory_iterator it(dir, ec);
    if (ec) {
        diagnostics.push_back({Severity::Error, dir.generic_string(), "cannot list directory: " + ec.message()});
        return;
    }
    std::vector<fs::directory_entry> entries;
    for (; it != fs::directory_iterator(); it.increment(ec)) {
        if (ec) {
            diagnostics.push_back({Severity::Error, dir.generic_string(), "cannot list directory: " + ec.message()});
            break;
        }
        entries.push_back(*it);
    }
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.path().filename() < b.path().filename(); });

    for (const auto& entry : entries) {
        const fs::path& p = entry.path();
        if (config.skip_hidden && hidden(p)) continue;
        const std::string rel = p.lexically_relative(root).generic_string();
        if (any_match(config.exclude, rel)) continue;
        std::error_code sec;
        if (entry.is_symlink(sec) && !config.follow_symlinks) continue;
        if (entry.is_directory(sec)) {
            walk_dir(root, p, config, out, diagnostics);
        } else if (entry.is_regular_file(sec)) {
            if (!config.include.empty() && !any_match(config.include, rel)) continue;
            out.push_back({p, p.generic_string(), rel});
        }
    }
}

}  // namespace

std::vector<WalkEntry> walk(const ScanConfig& config, std::vector<Diagnostic>& diagnostics) {
    std::vector<WalkEntry> out;
    for (const auto& arg : config.paths) {
        std::error_code ec;
        const auto status = fs::status(arg, ec);
        if (ec || !fs::exists(status)) {
            // Explicit arguments are never skipped silently; a dangling link
            // still goes to the reader so the failure is reported there.
            if (fs::is_symlink(fs::symlink_status(arg, ec))) {
                out.push_back({arg, arg.generic_string(), arg.filename().generic_string()});
                continue;
            }
            diagnostics.push_back({Severity::Error, arg.generic_string(), "no such file or directory"});
            continue;
        }
        if (fs::is_directory(status)) walk_dir(arg, arg, config, out, diagnostics);
        else out.push_back({arg, arg.generic_string(), arg.filename().generic_string()});
    }
    // The same file reached through two arguments is scanned once.
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.display < b.display; });
    out.erase(std::unique(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.display == b.display; }),
              out.end());
    return out;
}

std::array<std::size_t, rule_count> SessionSummary::counts() const {
    std::array<std::size_t, rule_count> c{};
    for (const auto& f : findings) ++c[static_cast<std::size_t>(f.rule)];
    return c;
}

double SessionSummary::selectivity() const {
    return files_seen ? static_cast<double>(files_scanned) / static_cast<double>(files_seen) : 0.0;
}

int SessionSummary::exit_code() const {
    if (operational_error) return 2;
    return findings.empty() ? 0 : 1;
}

namespace {

bool read_file(const fs::path& p, std::string& out, std::string& error) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
        error = std::string("cannot open: ") + std::strerror(errno);
        return false;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        error = "read error";
        return false;
    }
    out = std::move(ss).str();
    return true;
}

struct FileResult {
    bool read_ok = false;
    bool scanned = false;
    std::size_t bytes = 0;
    std::vector<Finding> findings;
    std::vector<Diagnostic> diagnostics;
    IdentifierCensus census;
};

template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
    jobs = std::max<std::size_t>(1, std::min(jobs, n));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    workers.reserve(jobs);
    for (std::size_t w = 0; w < jobs; ++w)
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        });
}

const lex::LanguageProfile& profile_for(const WalkEntry& e, const ScanConfig& config,
                                        const lex::ProfileRegistry& registry) {
    if (config.language) {
        if (const auto* p = registry.by_name(*config.language)) return *p;
    }
    if (const auto* p = registry.for_path(e.path)) return *p;
    return lex::ProfileRegistry::plain_text();
}

}  // namespace

SessionSummary walk_and_scan(const ScanConfig& config, const UnicodeTables& tables,
                             const lex::ProfileRegistry& registry) {
    config.validate();
    if (config.language && !registry.by_name(*config.language))
        throw ConfigError("unknown language: " + *config.language);

    SessionSummary summary;
    summary.tables_version = tables.version();
    summary.mode = config.policy.mode;

    Baseline baseline;
    if (config.baseline) baseline = load_baseline(*config.baseline);

    const auto files = walk(config, summary.diagnostics);
    summary.files_seen = files.size();

    std::vector<FileResult> results(files.size());
    ScanOptions options;
    options.unit_homoglyphs = false;
    options.collect_identifiers = true;

    parallel_for(files.size(), config.jobs, [&](std::size_t i) {
        FileResult& r = results[i];
        std::string bytes;
        std::string error;
        if (!read_file(files[i].path, bytes, error)) {
            r.diagnostics.push_back({Severity::Error, files[i].display, error});
            return;
        }
        r.read_ok = true;
        r.bytes = bytes.size();
        if (config.use_prefilter && !prefilter(bytes)) return;
        if (config.bidi_only && !prefilter_bidi(bytes)) return;
        r.scanned = true;
        auto unit = scan_unit_detailed(files[i].display, bytes, profile_for(files[i], config, registry), tables,
                                       config.policy, options);
        r.findings = std::move(unit.report.findings);
        r.diagnostics = std::move(unit.report.diagnostics);
        r.census = std::move(unit.census);
    });

    IdentifierCensus census;
    std::vector<Finding> all;
    for (auto& r : results) {
        if (!r.read_ok) summary.operational_error = true;
        summary.bytes_seen += r.bytes;
        if (r.scanned) {
            ++summary.files_scanned;
            summary.bytes_scanned += r.bytes;
        }
        for (auto& d : r.diagnostics) summary.diagnostics.push_back(std::move(d));
        all.insert(all.end(), std::make_move_iterator(r.findings.begin()), std::make_move_iterator(r.findings.end()));
        census.merge(std::move(r.census));
    }
    for (const auto& d : summary.diagnostics)
        if (d.severity == Severity::Error) summary.operational_error = true;

    // Homoglyphs are judged across the whole session. Files the prefilter
    // skipped still count as reference spellings, so they are lexed only
    // when some non-ASCII identifier exists to compare against.
    if (census.has_non_ascii() && !config.bidi_only) {
        std::vector<IdentifierCensus> ascii(files.size());
        parallel_for(files.size(), config.jobs, [&](std::size_t i) {
            if (!results[i].read_ok || results[i].scanned) return;
            std::string bytes;
            std::string error;
            if (!read_file(files[i].path, bytes, error)) return;
            const auto& profile = profile_for(files[i], config, registry);
            ascii[i].add_ascii_text(bytes, profile, tables);
        });
        for (auto& c : ascii) census.merge(std::move(c));
    }
    auto homoglyphs = census.findings(tables, config.policy);
    all.insert(all.end(), homoglyphs.begin(), homoglyphs.end());

    std::stable_sort(all.begin(), all.end(), session_order);
    assign_fingerprints(all);
    for (auto& f : all) {
        if (baseline.count(fingerprint_hex(f.fingerprint))) summary.suppressed.push_back(std::move(f));
        else summary.findings.push_back(std::move(f));
    }

    if (config.write_baseline) write_baseline(summary, *config.write_baseline);
    return summary;
}

Baseline load_baseline(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read baseline: " + file.string());
    Baseline b;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto last = line.find_last_not_of(" \t\r");
        b.insert(line.substr(first, last - first + 1));
    }
    return b;
}

void write_baseline(const SessionSummary& summary, const fs::path& file) {
    std::set<std::string> prints;
    for (const auto* list : {&summary.findings, &summary.suppressed})
        for (const auto& f : *list) prints.insert(fingerprint_hex(f.fingerprint));
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write baseline: " + file.string());
    for (const auto& p : prints) out << p << '\n';
}

}  // namespace srcguard
