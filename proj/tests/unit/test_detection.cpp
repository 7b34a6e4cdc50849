#include "doctest.h"
#include "srcguard/bidi.hpp"
#include "test_support.hpp"

using namespace srcguard;

namespace {

constexpr std::string_view rlo = "\xE2\x80\xAE";
constexpr std::string_view lri = "\xE2\x81\xA6";
constexpr std::string_view pdi = "\xE2\x81\xA9";
constexpr std::string_view zwsp = "\xE2\x80\x8B";
constexpr std::string_view wj = "\xE2\x81\xA0";

std::string cat(std::initializer_list<std::string_view> parts) {
    std::string s;
    for (auto p : parts) s += p;
    return s;
}

std::vector<lex::IdentifierOccurrence> occurrences(std::initializer_list<std::pair<std::u32string, std::string>> ids) {
    std::vector<lex::IdentifierOccurrence> out;
    std::size_t line = 1;
    for (const auto& [text, path] : ids) out.push_back({text, path, line++, 1, 0});
    return out;
}

}  // namespace

TEST_CASE("detect_bidi: Fig. 1 yields BIDI_UNTERMINATED on the strcmp line") {
    const auto text = test::read_file(test::data_path("fig1.c"));
    const auto r = test::scan(text);
    REQUIRE(test::count_rule(r, RuleId::BidiUnterminated) == 1);
    const auto& f = r.findings.front();
    CHECK(f.rule == RuleId::BidiUnterminated);
    CHECK(f.severity == Severity::Error);
    CHECK(f.line == 6);
    CHECK(f.cve() == "CVE-2021-42574");
    CHECK(f.codepoints.front() == 0x202E);
    CHECK(test::count_rule(r, RuleId::ConfusableIdentifiers) == 0);
    CHECK(r.findings.size() == 1);
}

TEST_CASE("detect_bidi: balanced isolate in a comment is a warning by default, error in strict") {
    const auto text = cat({"int x; // ", lri, "abc", pdi, "\n"});
    const auto d = test::scan(text);
    REQUIRE(d.findings.size() == 1);
    CHECK(d.findings[0].rule == RuleId::BidiControlPresent);
    CHECK(d.findings[0].severity == Severity::Warning);
    const auto s = test::scan(text, "C", Mode::Strict);
    REQUIRE(s.findings.size() == 1);
    CHECK(s.findings[0].severity == Severity::Error);
    CHECK(test::scan(text, "C", Mode::Permissive).findings.empty());
}

TEST_CASE("detect_bidi: control in code is BIDI_IN_CODE") {
    const auto r = test::scan(cat({"int x = 1; ", rlo, " int y;"}));
    REQUIRE(r.findings.size() == 1);
    CHECK(r.findings[0].rule == RuleId::BidiInCode);
    CHECK(r.findings[0].severity == Severity::Error);
    CHECK(r.findings[0].column == 12);
    CHECK(r.findings[0].byte_offset == 11);
    CHECK(r.findings[0].length == 3);
}

TEST_CASE("detect_bidi: stack simulation") {
    // PDF closes the override, PDI closes the isolate: balanced.
    CHECK(test::scan(cat({"// ", rlo, "x\xE2\x80\xAC ", lri, "y", pdi})).findings[0].rule ==
          RuleId::BidiControlPresent);
    // PDI closes an isolate and every embedding opened inside it.
    CHECK(test::scan(cat({"// ", lri, rlo, "x", pdi})).findings[0].rule == RuleId::BidiControlPresent);
    // A PDF cannot close an isolate.
    CHECK(test::scan(cat({"// ", lri, "x\xE2\x80\xAC"})).findings[0].rule == RuleId::BidiUnterminated);
    // Unterminated in one string, then a separate clean string.
    const auto r = test::scan(cat({"a(\"", rlo, "\", \"ok\");"}));
    REQUIRE(r.findings.size() == 1);
    CHECK(r.findings[0].rule == RuleId::BidiUnterminated);
}

TEST_CASE("plain-text fallback treats everything as code") {
    const auto r = scan_unit("README", cat({"hello // ", lri, "x", pdi}), lex::ProfileRegistry::plain_text(),
                             test::tables(), Policy{});
    REQUIRE(r.findings.size() == 2);
    CHECK(r.findings[0].rule == RuleId::BidiInCode);
    CHECK(r.findings[1].rule == RuleId::BidiInCode);
}

TEST_CASE("detect_invisible examples") {
    const auto code = test::scan(cat({"int ab", zwsp, "c = 1;"}));
    REQUIRE(code.findings.size() == 1);
    CHECK(code.findings[0].rule == RuleId::InvisibleInCode);
    CHECK(code.findings[0].severity == Severity::Error);

    const auto lit = test::scan(cat({"s = \"a", zwsp, "b\";"}));
    REQUIRE(lit.findings.size() == 1);
    CHECK(lit.findings[0].rule == RuleId::InvisibleInLiteral);
    CHECK(lit.findings[0].severity == Severity::Warning);

    CHECK(test::scan("int main() { return 0; }\n").findings.empty());

    // A run of invisibles is one finding.
    const auto run = test::scan(cat({"x", zwsp, zwsp, wj, "y"}));
    REQUIRE(run.findings.size() == 1);
    CHECK(run.findings[0].codepoints.size() == 3);

    // Allowlisted code points are skipped.
    Policy p;
    p.allowed_codepoints.insert(0x200B);
    CHECK(scan_unit("t", cat({"x", zwsp, "y"}), test::profile("C"), test::tables(), p).findings.empty());

    // Leading BOM is not a finding; elsewhere it is.
    CHECK(test::scan("\xEF\xBB\xBFint x;").findings.empty());
    CHECK(test::scan("int \xEF\xBB\xBFx;").findings.size() == 1);
}

TEST_CASE("detect_terminator_spoof examples") {
    const auto r = test::scan(cat({"/* x *", zwsp, "/ y */"}));
    REQUIRE(r.findings.size() == 1);
    CHECK(r.findings[0].rule == RuleId::TerminatorSpoof);
    CHECK(r.findings[0].severity == Severity::Error);
    CHECK(r.findings[0].byte_offset == 5);
    CHECK(r.findings[0].length == 5);
    CHECK(r.findings[0].codepoints == std::vector<char32_t>{0x200B});

    CHECK(test::scan("/* x */").findings.empty());

    const auto joiner = test::scan(cat({"/* x *", wj, "/ y */"}));
    REQUIRE(joiner.findings.size() == 1);
    CHECK(joiner.findings[0].rule == RuleId::TerminatorSpoof);

    // Languages without block comments have nothing to spoof.
    const auto py = test::scan(cat({"# x *", zwsp, "/"}), "Python");
    REQUIRE(py.findings.size() == 1);
    CHECK(py.findings[0].rule == RuleId::InvisibleInLiteral);

    // An invisible elsewhere in the comment stays a literal finding.
    const auto other = test::scan(cat({"/* a", zwsp, "b */"}));
    REQUIRE(other.findings.size() == 1);
    CHECK(other.findings[0].rule == RuleId::InvisibleInLiteral);
}

TEST_CASE("detect_homoglyphs examples") {
    const auto& t = test::tables();
    const Policy p = Policy::for_mode(Mode::Default);

    const auto found = detect_homoglyphs(occurrences({{U"print", "a.py"}, {U"рrint", "b.py"}}), t, p);
    REQUIRE(found.size() == 1);
    CHECK(found[0].rule == RuleId::ConfusableIdentifiers);
    CHECK(found[0].path == "b.py");
    CHECK(found[0].cve() == "CVE-2021-42694");
    CHECK(found[0].message.find("print") != std::string::npos);
    CHECK(found[0].message.find("U+0440") != std::string::npos);

    CHECK(detect_homoglyphs(occurrences({{U"print", "a"}, {U"Print", "a"}, {U"x", "a"}}), t, p).empty());

    // Allowed pairs are silent.
    Policy allow = p;
    allow.allowed_identifier_pairs.insert({U"print", U"рrint"});
    CHECK(detect_homoglyphs(occurrences({{U"print", "a"}, {U"рrint", "b"}}), t, allow).empty());
}

TEST_CASE("detect_homoglyphs: majority spelling is not reported; ties report all") {
    const auto& t = test::tables();
    const Policy p;
    // Two non-ASCII spellings, the Latin-Cyrillic one twice.
    const auto majority =
        detect_homoglyphs(occurrences({{U"sсore", "a"}, {U"sсore", "a"}, {U"ѕcore", "a"}}), t, p);
    REQUIRE(majority.size() == 1);
    CHECK(majority[0].message.find("U+0455") != std::string::npos);

    const auto tie = detect_homoglyphs(occurrences({{U"sсore", "a"}, {U"ѕcore", "a"}}), t, p);
    CHECK(tie.size() == 2);

    // With an ASCII spelling present, every non-ASCII occurrence is reported
    // no matter how often it appears.
    const auto ascii = detect_homoglyphs(
        occurrences({{U"score", "a"}, {U"sсore", "b"}, {U"sсore", "b"}, {U"sсore", "b"}}), t, p);
    CHECK(ascii.size() == 3);
}

TEST_CASE("mixed-script identifiers") {
    const auto& t = test::tables();
    Policy p;
    p.mixed_script_check = true;
    const auto found = detect_homoglyphs(occurrences({{U"paуload", "a"}}), t, p);
    REQUIRE(found.size() == 1);
    CHECK(found[0].rule == RuleId::MixedScriptIdentifier);
    CHECK(found[0].severity == Severity::Warning);

    CHECK(detect_homoglyphs(occurrences({{U"paуload", "a"}}), t, Policy{}).empty());
    CHECK(detect_homoglyphs(occurrences({{U"日本語のテキスト", "a"}, {U"café", "a"}, {U"x1_", "a"}}), t, p).empty());
    CHECK(identifier_scripts(U"paуload", t) == std::set<std::string>{"Cyrillic", "Latin"});
    CHECK(identifier_scripts(U"漢字かな", t).size() == 1);
}

TEST_CASE("scan_unit examples") {
    CHECK(test::scan("").findings.empty());

    const auto homoglyph = test::scan("void print() {}\nvoid \xD1\x80rint() {}\nint main() { \xD1\x80rint(); }\n");
    CHECK(test::count_rule(homoglyph, RuleId::ConfusableIdentifiers) == 2);
    CHECK(homoglyph.findings.size() == 2);

    // Invalid UTF-8 is repaired, scanned and noted.
    const auto bad = test::scan(cat({"int x; \xFF // ", rlo}));
    REQUIRE(bad.diagnostics.size() == 1);
    CHECK(bad.diagnostics[0].severity == Severity::Info);
    CHECK(test::count_rule(bad, RuleId::BidiUnterminated) == 1);
}

TEST_CASE("reports are sorted, counted and reproducible") {
    const auto text = cat({"/* ", rlo, " */ x", zwsp, "y;\nint a", rlo, "b;\ns = \"", lri, pdi, "\";\n"});
    const auto a = test::scan(text);
    const auto b = test::scan(text);
    REQUIRE(a.findings.size() == 4);
    for (std::size_t i = 1; i < a.findings.size(); ++i) CHECK_FALSE(unit_order(a.findings[i], a.findings[i - 1]));
    std::array<std::size_t, rule_count> counts{};
    for (const auto& f : a.findings) ++counts[static_cast<std::size_t>(f.rule)];
    CHECK(counts == a.counts);
    REQUIRE(b.findings.size() == a.findings.size());
    for (std::size_t i = 0; i < a.findings.size(); ++i) {
        CHECK(a.findings[i].fingerprint == b.findings[i].fingerprint);
        CHECK(a.findings[i].preview == b.findings[i].preview);
        CHECK_FALSE(a.findings[i].codepoints.empty());
        CHECK(a.findings[i].line >= 1);
    }
}

TEST_CASE("fingerprints ignore position and whitespace but not content") {
    const auto one = test::scan(cat({"int a; // ", rlo, "\n"}));
    const auto moved = test::scan(cat({"\n\n  int   a; // ", rlo, "\n"}));
    const auto other = test::scan(cat({"int b; // ", rlo, "\n"}));
    CHECK(one.findings[0].fingerprint == moved.findings[0].fingerprint);
    CHECK(one.findings[0].fingerprint != other.findings[0].fingerprint);
    // Identical lines get distinct fingerprints.
    const auto twice = test::scan(cat({"// ", rlo, "\n// ", rlo, "\n"}));
    REQUIRE(twice.findings.size() == 2);
    CHECK(twice.findings[0].fingerprint != twice.findings[1].fingerprint);
}

TEST_CASE("rule reference is stable") {
    std::vector<std::string> ids;
    for (const auto& r : rule_reference()) ids.emplace_back(r.name);
    CHECK(ids == std::vector<std::string>{"BIDI_UNTERMINATED", "BIDI_CONTROL_PRESENT", "BIDI_IN_CODE",
                                          "INVISIBLE_IN_CODE", "INVISIBLE_IN_LITERAL", "TERMINATOR_SPOOF",
                                          "CONFUSABLE_IDENTIFIERS", "MIXED_SCRIPT_IDENTIFIER"});
    CHECK(rule_cve(RuleId::BidiInCode) == "CVE-2021-42574");
    CHECK(rule_cve(RuleId::MixedScriptIdentifier) == "CVE-2021-42694");
    CHECK(rule_cve(RuleId::TerminatorSpoof).empty());
    CHECK(rule_cve(RuleId::InvisibleInCode).empty());
    CHECK(parse_rule("TERMINATOR_SPOOF") == RuleId::TerminatorSpoof);
    CHECK_FALSE(parse_rule("NOPE").has_value());
}

TEST_CASE("severity overrides") {
    Policy p;
    p.overrides[RuleId::InvisibleInLiteral] = Severity::Info;
    const auto r = scan_unit("t", cat({"// a", zwsp}), test::profile("C"), test::tables(), p);
    REQUIRE(r.findings.size() == 1);
    CHECK(r.findings[0].severity == Severity::Info);
}

TEST_CASE("completeness anchor: a reordering token line is always reported") {
    const auto& t = test::tables();
    const std::string texts[] = {
        cat({"s = \"", rlo, "abc\";"}),
        cat({"// ", lri, "x", pdi}),
        cat({"/* ", "\xE2\x80\xAB", "abc */"}),
        cat({"s = '", "\xE2\x81\xA7", "a';"}),
    };
    for (const auto& text : texts) {
        const auto spans = lex::classify_spans(text, test::profile("C"));
        bool reorders = false;
        for (const auto& s : spans)
            if (s.kind != lex::SpanKind::Code)
                reorders = reorders || bidi::line_reorders(t, utf8::to_u32(text.substr(s.start, s.end - s.start)));
        REQUIRE(reorders);
        CHECK(test::scan(text).findings.size() >= 1);
    }
}
