#include <algorithm>
#include <random>
#include <set>
#include <tuple>

#include "doctest.h"
#include "json.hpp"
#include "srcguard/forge.hpp"
#include "srcguard/session.hpp"
#include "test_support.hpp"

using namespace srcguard;
namespace fs = std::filesystem;

namespace {

std::string random_bytes(std::mt19937& rng) {
    std::uniform_int_distribution<int> len(0, 64), byte(0, 255), coin(0, 3);
    static const std::string_view ascii_bits[] = {"/*", "*/", "//", "\"", "'", "#", "\n", "x", " ", "`"};
    std::uniform_int_distribution<std::size_t> piece(0, std::size(ascii_bits) - 1);
    std::string s;
    for (int n = len(rng); n > 0; --n) {
        if (coin(rng) == 0) s += static_cast<char>(byte(rng));
        else s += ascii_bits[piece(rng)];
    }
    return s;
}

std::string random_source(std::mt19937& rng) {
    static const std::string_view pieces[] = {
        "int ", "print", "\xD1\x80rint", "pr\xD1\x96nt", "x", " = ", ";\n", "/* ", " */", "// ", "\"", "'",
        "\xE2\x80\xAE", "\xE2\x81\xA6", "\xE2\x81\xA9", "\xE2\x80\x8B", "\xE2\x81\xA0", "pay\xD1\x83load",
        "\xCE\xB1", "caf\xC3\xA9", "(", ")", "{", "}", "\n"};
    std::uniform_int_distribution<std::size_t> pick(0, std::size(pieces) - 1);
    std::string s;
    for (int k = 0; k < 30; ++k) s += pieces[pick(rng)];
    return s;
}

using Key = std::tuple<RuleId, std::size_t, std::size_t>;

std::set<Key> keys(const ScanReport& r) {
    std::set<Key> out;
    for (const auto& f : r.findings) out.emplace(f.rule, f.line, f.column);
    return out;
}

bool subset(const std::set<Key>& a, const std::set<Key>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

TEST_CASE("property: prefilter never hides a finding") {
    std::mt19937 rng(211);
    std::size_t rejected = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto bytes = random_bytes(rng);
        if (prefilter(bytes)) continue;
        ++rejected;
        for (const auto& p : test::registry().profiles()) {
            const auto r = scan_unit("t", bytes, p, test::tables(), Policy::for_mode(Mode::Strict));
            CHECK(r.findings.empty());
            CHECK(r.diagnostics.empty());
        }
    }
    CHECK(rejected > 100);

    test::TempDir dir;
    std::vector<const lex::LanguageProfile*> profiles;
    for (const auto& p : test::registry().profiles()) profiles.push_back(&p);
    for (const auto& e : forge::forge_corpus(dir.path(), profiles, test::registry(), test::tables())) {
        if (e.kind == "skipped") continue;
        const auto bytes = test::read_file(dir / e.path);
        const auto r = scan_unit(e.path, bytes, test::profile(e.profile), test::tables(), Policy::for_mode(Mode::Strict));
        INFO(e.path);
        if (!r.findings.empty()) CHECK(prefilter(bytes));
        CHECK(prefilter(bytes) == (e.kind == "attack"));
    }
}

TEST_CASE("property: pure ASCII input never produces findings") {
    std::mt19937 rng(223);
    std::uniform_int_distribution<int> ch(0, 127), len(0, 200);
    for (int i = 0; i < 3000; ++i) {
        std::string s;
        for (int n = len(rng); n > 0; --n) s += static_cast<char>(ch(rng));
        for (const auto& p : test::registry().profiles())
            for (auto m : {Mode::Strict, Mode::Default, Mode::Permissive})
                CHECK(scan_unit("t", s, p, test::tables(), Policy::for_mode(m)).findings.empty());
    }
}

TEST_CASE("property: stricter modes report a superset") {
    std::mt19937 rng(227);
    for (int i = 0; i < 3000; ++i) {
        const auto text = random_source(rng);
        for (const auto* lang : {"C", "Python", "Rust", "JavaScript"}) {
            const auto strict = keys(test::scan(text, lang, Mode::Strict));
            const auto def = keys(test::scan(text, lang, Mode::Default));
            const auto perm = keys(test::scan(text, lang, Mode::Permissive));
            CHECK(subset(perm, def));
            CHECK(subset(def, strict));
        }
    }
}

TEST_CASE("property: scanning is deterministic and sorted") {
    std::mt19937 rng(229);
    for (int i = 0; i < 1000; ++i) {
        const auto text = random_source(rng);
        const auto a = test::scan(text, "C", Mode::Strict);
        const auto b = test::scan(text, "C", Mode::Strict);
        REQUIRE(a.findings.size() == b.findings.size());
        for (std::size_t k = 0; k < a.findings.size(); ++k) {
            CHECK(a.findings[k].fingerprint == b.findings[k].fingerprint);
            if (k > 0) CHECK_FALSE(unit_order(a.findings[k], a.findings[k - 1]));
        }
        std::set<std::uint64_t> prints;
        for (const auto& f : a.findings) prints.insert(f.fingerprint);
        CHECK(prints.size() == a.findings.size());
    }
}

TEST_CASE("property: fingerprints do not depend on report format or file order") {
    std::mt19937 rng(233);
    test::TempDir dir;
    std::vector<std::pair<std::string, std::string>> files;
    for (int i = 0; i < 20; ++i) files.emplace_back("f" + std::to_string(i) + ".c", random_source(rng));

    const auto scan_written = [&](bool reversed) {
        fs::remove_all(dir / "tree");
        auto order = files;
        if (reversed) std::reverse(order.begin(), order.end());
        for (const auto& [name, text] : order) test::write_file(dir / ("tree/" + name), text);
        ScanConfig c;
        c.paths = {dir / "tree"};
        c.policy = Policy::for_mode(Mode::Strict);
        c.jobs = reversed ? 4 : 1;
        return walk_and_scan(c, test::tables(), test::registry());
    };
    const auto a = scan_written(false);
    const auto b = scan_written(true);
    REQUIRE(!a.findings.empty());

    std::vector<std::string> pa, pb, sarif;
    for (const auto& f : a.findings) pa.push_back(fingerprint_hex(f.fingerprint));
    for (const auto& f : b.findings) pb.push_back(fingerprint_hex(f.fingerprint));
    CHECK(pa == pb);

    const auto j = nlohmann::json::parse(emit_report(a, ReportFormat::Sarif));
    for (const auto& r : j["runs"][0]["results"]) sarif.push_back(r["partialFingerprints"]["srcguard/v1"]);
    CHECK(sarif == pa);

    write_baseline(a, dir / "base.txt");
    Baseline expected(pa.begin(), pa.end());
    CHECK(load_baseline(dir / "base.txt") == expected);
}
