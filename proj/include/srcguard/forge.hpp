#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "srcguard/finding.hpp"
#include "srcguard/lexing.hpp"
#include "srcguard/unicode_tables.hpp"

/// Known-bad samples for self-testing the scanner.
namespace srcguard::forge {

enum class Variant : std::uint8_t { StretchedString, CommentSpoof, HomoglyphFunction };
inline constexpr Variant all_variants[] = {Variant::StretchedString, Variant::CommentSpoof,
                                           Variant::HomoglyphFunction};

std::string_view to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view name);
RuleId expected_rule(Variant v);

struct ForgeSpec {
    Variant variant = Variant::StretchedString;
    std::string profile;
    std::string access_level = "user";
    std::string function_name = "print";
};

class ForgeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The attack sample. Throws ForgeError when the profile is unknown to
/// the templates or lacks what the variant needs.
std::string forge(const ForgeSpec& spec, const lex::ProfileRegistry& registry, const UnicodeTables& tables);

/// The same program with every trigger removed; pure ASCII.
std::string forge_control(const ForgeSpec& spec, const lex::ProfileRegistry& registry,
                          const UnicodeTables& tables);

/// Whether `forge` can express the combination, and if not, why.
std::optional<std::string> unsupported_reason(Variant v, const lex::LanguageProfile& profile);

struct ManifestEntry {
    std::string path;  // relative to the corpus directory
    std::string variant;
    std::string profile;
    std::optional<RuleId> expected_rule;
    std::string kind;    // attack, control, skipped, benign
    std::string reason;  // for skipped entries

    bool operator==(const ManifestEntry&) const = default;
};

/// Writes every expressible variant x profile sample with its control and
/// returns the manifest (also written to manifest.jsonl).
std::vector<ManifestEntry> forge_corpus(const std::filesystem::path& out_dir,
                                        const std::vector<const lex::LanguageProfile*>& profiles,
                                        const lex::ProfileRegistry& registry, const UnicodeTables& tables);

struct SeededCorpusOptions {
    std::size_t files = 1000;
    std::size_t attacks = 10;
    std::size_t benign_non_ascii = 50;
    std::uint64_t seed = 42;
};

/// A larger synthetic tree: mostly ASCII code, a few files with harmless
/// non-ASCII text, and `attacks` planted samples.
std::vector<ManifestEntry> generate_seeded_corpus(const std::filesystem::path& out_dir,
                                                  const lex::ProfileRegistry& registry, const UnicodeTables& tables,
                                                  const SeededCorpusOptions& options = {});

std::string manifest_line(const ManifestEntry& entry);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& file);

}  // namespace srcguard::forge
