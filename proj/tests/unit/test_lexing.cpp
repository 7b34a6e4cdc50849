#include <random>

#include "doctest.h"
#include "test_support.hpp"

using namespace srcguard;
using lex::Span;
using lex::SpanKind;

namespace {

std::vector<std::pair<SpanKind, std::string>> slices(std::string_view text, std::string_view lang) {
    std::vector<std::pair<SpanKind, std::string>> out;
    for (const auto& s : lex::classify_spans(text, test::profile(lang)))
        out.emplace_back(s.kind, std::string(text.substr(s.start, s.end - s.start)));
    return out;
}

std::vector<std::string> names(std::string_view text, std::string_view lang = "C") {
    std::vector<std::string> out;
    for (const auto& id : lex::extract_identifiers(text, test::profile(lang), test::tables()))
        out.push_back(test::u8(id.text));
    return out;
}

}  // namespace

TEST_CASE("profile_for_path") {
    const auto& r = test::registry();
    REQUIRE(r.for_path("main.c"));
    CHECK(r.for_path("main.c")->name == "C");
    CHECK(r.for_path("app.py")->name == "Python");
    CHECK(r.for_path("README") == nullptr);
    CHECK(r.for_path("dir.d/x.RS")->name == "Rust");
    CHECK(r.for_path("a/b/c.hpp")->name == "C++");
    CHECK(r.profiles().size() == 6);
}

TEST_CASE("classify_spans examples") {
    using V = std::vector<std::pair<SpanKind, std::string>>;
    CHECK(slices("x = 1; // note\n", "C") ==
          V{{SpanKind::Code, "x = 1; "}, {SpanKind::LineComment, "// note"}, {SpanKind::Code, "\n"}});
    CHECK(slices(R"("a\"b")", "C") == V{{SpanKind::StringLiteral, R"("a\"b")"}});
    CHECK(slices("a /* b */ c", "C") ==
          V{{SpanKind::Code, "a "}, {SpanKind::BlockComment, "/* b */"}, {SpanKind::Code, " c"}});
    CHECK(slices("", "C").empty());
}

TEST_CASE("classify_spans: the Fig. 1 literal is one string span holding the controls") {
    const auto text = test::read_file(test::data_path("fig1.c"));
    const auto spans = lex::classify_spans(text, test::profile("C"));
    const auto rlo = text.find("\xE2\x80\xAE");
    REQUIRE(rlo != std::string::npos);
    const auto it = std::find_if(spans.begin(), spans.end(), [&](const Span& s) { return s.start <= rlo && rlo < s.end; });
    REQUIRE(it != spans.end());
    CHECK(it->kind == SpanKind::StringLiteral);
    const auto slice = text.substr(it->start, it->end - it->start);
    CHECK(slice.rfind("\"user", 0) == 0);
    CHECK(slice.find("\xE2\x81\xA6") != std::string::npos);  // LRI
    CHECK(slice.find("\xE2\x81\xA9") != std::string::npos);  // PDI
    CHECK(it->line == 6);
}

TEST_CASE("unterminated tokens run to end of input") {
    CHECK(slices("a /* open", "C").back() == std::pair{SpanKind::BlockComment, std::string("/* open")});
    CHECK(slices("s = \"open", "C").back() == std::pair{SpanKind::StringLiteral, std::string("\"open")});
}

TEST_CASE("single-line strings stop at end of line, multiline ones do not") {
    const auto c = slices("\"ab\ncd\"", "C");
    CHECK(c.front() == std::pair{SpanKind::StringLiteral, std::string("\"ab")});
    const auto js = slices("`ab\ncd`", "JavaScript");
    CHECK(js.front() == std::pair{SpanKind::StringLiteral, std::string("`ab\ncd`")});
    const auto py = slices("'''a\n'b'\n'''x", "Python");
    CHECK(py.front() == std::pair{SpanKind::StringLiteral, std::string("'''a\n'b'\n'''")});
}

TEST_CASE("Rust block comments nest; C block comments do not") {
    CHECK(slices("/* a /* b */ c */x", "Rust").front() ==
          std::pair{SpanKind::BlockComment, std::string("/* a /* b */ c */")});
    CHECK(slices("/* a /* b */ c */x", "C").front() == std::pair{SpanKind::BlockComment, std::string("/* a /* b */")});
}

TEST_CASE("Go raw strings ignore backslashes") {
    CHECK(slices("`a\\`b", "Go").front() == std::pair{SpanKind::StringLiteral, std::string("`a\\`")});
}

TEST_CASE("comment markers inside strings and strings inside comments are inert") {
    using V = std::vector<std::pair<SpanKind, std::string>>;
    CHECK(slices("\"//x\" y", "C") == V{{SpanKind::StringLiteral, "\"//x\""}, {SpanKind::Code, " y"}});
    CHECK(slices("# \"x\ny", "Python") == V{{SpanKind::LineComment, "# \"x"}, {SpanKind::Code, "\ny"}});
}

TEST_CASE("span lines count every line terminator") {
    const std::string text = "a\r\nb\rc\xC2\x85" "d\xE2\x80\xA8/*x*/";
    const auto spans = lex::classify_spans(text, test::profile("C"));
    CHECK(spans.back().kind == SpanKind::BlockComment);
    CHECK(spans.back().line == 5);
}

TEST_CASE("extract_identifiers examples") {
    CHECK(names("print(x)") == std::vector<std::string>{"print", "x"});
    CHECK(names("").empty());
    CHECK(names("int x1 = 42 + 0x1F; // comment y") == std::vector<std::string>{"int", "x1"});
    CHECK(names("s = \"in string\"; t") == std::vector<std::string>{"s", "t"});
    CHECK(names("var $el = _a", "JavaScript") == std::vector<std::string>{"var", "$el", "_a"});
    CHECK(names("x$y", "C") == std::vector<std::string>{"x", "y"});
    CHECK(names("café naïve") == std::vector<std::string>{"café", "naïve"});
}

TEST_CASE("extract_identifiers keeps both spellings of a homoglyph pair") {
    const std::string text = "void print() {}\nvoid \xD1\x80rint() {}\n";
    const auto ids = lex::extract_identifiers(text, test::profile("C"), test::tables(), "x.c");
    REQUIRE(ids.size() == 4);
    CHECK(ids[1].text == U"print");
    CHECK(ids[3].text == U"рrint");
    CHECK(ids[3].line == 2);
    CHECK(ids[3].column == 6);
    CHECK(ids[3].byte_offset == 21);
    CHECK(ids[3].path == "x.c");
}

TEST_CASE("ASCII identifier charset") {
    lex::LanguageProfile p = test::profile("C");
    p.identifiers.charset = lex::IdentifierCharset::Ascii;
    const auto ids = lex::extract_identifiers("ab\xC3\xA9" "cd", p, test::tables());
    REQUIRE(ids.size() == 2);
    CHECK(ids[0].text == U"ab");
    CHECK(ids[1].text == U"cd");
}

TEST_CASE("profiles load from JSON and are validated") {
    const auto shipped = lex::ProfileRegistry::load(default_data_dir() / "profiles.json");
    REQUIRE(shipped.profiles().size() == test::registry().profiles().size());
    for (const auto& p : test::registry().profiles()) {
        const auto* q = shipped.by_name(p.name);
        REQUIRE(q);
        CHECK(q->extensions == p.extensions);
        CHECK(q->line_comments == p.line_comments);
        CHECK(q->block_comments.size() == p.block_comments.size());
        CHECK(q->strings.size() == p.strings.size());
    }

    const auto extra = lex::ProfileRegistry::from_json(R"({"profiles":[{"name":"Lua","extensions":[".lua"],
        "line_comments":["--"],"block_comments":[{"open":"--[[","close":"]]"}],
        "strings":[{"open":"\"","escape":"\\"}]}]})");
    const auto* lua = extra.for_path("x.lua");
    REQUIRE(lua);
    const std::string code = "x = 1 --[[ c ]] y";
    const auto spans = lex::classify_spans(code, *lua);
    REQUIRE(spans.size() == 3);
    CHECK(spans[1].kind == SpanKind::BlockComment);

    CHECK_THROWS_AS(lex::ProfileRegistry::from_json("{"), lex::ProfileError);
    CHECK_THROWS_AS(lex::ProfileRegistry::from_json(R"({"profiles":[{"name":"X","line_comments":[""]}]})"),
                    lex::ProfileError);
    CHECK_THROWS_AS(
        lex::ProfileRegistry::from_json(R"({"profiles":[{"name":"X","block_comments":[{"open":"#","close":"#"}]}]})"),
        lex::ProfileError);

    auto r = lex::ProfileRegistry::builtin();
    lex::LanguageProfile clash{"Clash", {".c"}, {}, {}, {}, {}};
    CHECK_THROWS_AS(r.add(clash), lex::ProfileError);
}

TEST_CASE("property: spans partition the input") {
    std::mt19937 rng(41);
    const std::string_view pieces[] = {"a", " ", "\n", "\r\n", "/*", "*/", "//", "#", "\"", "'", "`", "\\",
                                       "'''", "x1", "\xE2\x80\xAE", "\xE2\x80\x8B", "\xD1\x80", "\xE2\x80\xA8"};
    std::uniform_int_distribution<std::size_t> pick(0, std::size(pieces) - 1);
    for (int i = 0; i < 3000; ++i) {
        std::string text;
        for (int k = 0; k < 30; ++k) text += pieces[pick(rng)];
        for (const auto& p : test::registry().profiles()) {
            const auto spans = lex::classify_spans(text, p);
            std::string joined;
            std::size_t pos = 0;
            bool ok = true;
            for (const auto& s : spans) {
                ok = ok && s.start == pos && s.end > s.start;
                // Boundaries fall on code points.
                ok = ok && (s.start == text.size() || (static_cast<unsigned char>(text[s.start]) & 0xC0) != 0x80);
                joined += text.substr(s.start, s.end - s.start);
                pos = s.end;
            }
            CHECK(ok);
            CHECK(joined == text);
            CHECK(lex::classify_spans(text, p) == spans);
        }
    }
}

TEST_CASE("spoofed terminator lexes differently once invisibles are removed") {
    const std::string raw = "/* x *\xE2\x80\x8B/ y(); /* z */";
    std::string visible = raw;
    visible.erase(visible.find("\xE2\x80\x8B"), 3);
    const auto a = lex::classify_spans(raw, test::profile("C"));
    const auto b = lex::classify_spans(visible, test::profile("C"));
    CHECK(a.size() == 1);
    CHECK(b.size() == 3);
}
