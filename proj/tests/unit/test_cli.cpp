#include <sys/wait.h>

#include <cstdio>

#include "doctest.h"
#include "json.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int status = -1;
    std::string out;
};

std::string quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

// Runs the CLI with stderr discarded unless `merge` is set.
Result cli(const std::string& args, const std::string& env = "", bool merge = false) {
    const std::string cmd = env + " " + quote(SRCGUARD_CLI_PATH) + " " + args + (merge ? " 2>&1" : " 2>/dev/null");
    Result r;
    FILE* p = ::popen(cmd.c_str(), "r");
    REQUIRE(p);
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int raw = ::pclose(p);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

}  // namespace

TEST_CASE("cli scan exit codes") {
    test::TempDir dir;
    test::write_file(dir / "clean/a.c", "int a;\n");
    test::write_file(dir / "bad/fig1.c", test::read_file(test::data_path("fig1.c")));

    CHECK(cli("scan " + quote((dir / "clean").string())).status == 0);
    const auto bad = cli("scan --format lines " + quote((dir / "bad").string()));
    CHECK(bad.status == 1);
    CHECK(nlohmann::json::parse(bad.out)["rule"] == "BIDI_UNTERMINATED");
    CHECK(cli("scan " + quote((dir / "missing").string())).status == 2);
    CHECK(cli("scan --mode bogus " + quote((dir / "clean").string())).status == 2);
    CHECK(cli("scan --lang Klingon " + quote((dir / "clean").string())).status == 2);
    CHECK(cli("frobnicate").status == 2);
    CHECK(cli("").status == 2);
    CHECK(cli("--help").status == 0);
}

TEST_CASE("cli modes and severity overrides") {
    test::TempDir dir;
    test::write_file(dir / "a.c", "s = \"\xE2\x81\xA6x\xE2\x81\xA9\";\n");
    const auto p = quote(dir.path().string());
    CHECK(cli("scan " + p).status == 1);
    CHECK(cli("scan --mode permissive " + p).status == 0);
    CHECK(cli("scan --allow U+2066 --allow U+2069 " + p).status == 0);
    const auto info = cli("scan --format lines --severity BIDI_CONTROL_PRESENT=info " + p);
    CHECK(info.out.find("\"severity\":\"info\"") != std::string::npos);
}

TEST_CASE("cli color follows NO_COLOR and --color") {
    test::TempDir dir;
    test::write_file(dir / "fig1.c", test::read_file(test::data_path("fig1.c")));
    const auto p = quote(dir.path().string());
    CHECK(cli("scan --color always " + p).out.find("\x1b[") != std::string::npos);
    CHECK(cli("scan --color always " + p, "NO_COLOR=1").out.find("\x1b[") != std::string::npos);
    CHECK(cli("scan " + p, "NO_COLOR=1").out.find("\x1b[") == std::string::npos);
    // Output is a pipe here, so auto means no color.
    CHECK(cli("scan " + p).out.find("\x1b[") == std::string::npos);
}

TEST_CASE("cli baseline round trip") {
    test::TempDir dir;
    test::write_file(dir / "src/fig1.c", test::read_file(test::data_path("fig1.c")));
    const auto src = quote((dir / "src").string());
    const auto base = quote((dir / "base.txt").string());
    CHECK(cli("scan --write-baseline " + base + " " + src).status == 1);
    const auto again = cli("scan --baseline " + base + " " + src);
    CHECK(again.status == 0);
    CHECK(again.out.find("1 suppressed") != std::string::npos);
    CHECK(cli("scan --baseline " + base + " --write-baseline " + base + " " + src).status == 2);
    CHECK(cli("scan --baseline " + quote((dir / "none.txt").string()) + " " + src).status == 2);
}

TEST_CASE("cli sanitize") {
    test::TempDir dir;
    test::write_file(dir / "in/fig1.c", test::read_file(test::data_path("fig1.c")));
    test::write_file(dir / "in/sub/plain.c", "int a;\n");
    const auto in = quote((dir / "in").string());
    CHECK(cli("sanitize " + in + " --out " + quote((dir / "out").string())).status == 0);
    CHECK(test::read_file(dir / "out/sub/plain.c") == "int a;\n");
    const auto cleaned = test::read_file(dir / "out/fig1.c");
    CHECK(cleaned.find("\xE2\x80\xAE") == std::string::npos);
    CHECK(cli("scan " + quote((dir / "out").string())).status == 0);
    CHECK(cli("sanitize " + in).status == 2);

    CHECK(cli("sanitize --strip " + in + " --out " + quote((dir / "stripped").string())).status == 0);
    CHECK(srcguard::utf8::is_ascii(test::read_file(dir / "stripped/fig1.c")));
}

TEST_CASE("cli preview, forge and rules") {
    const auto preview = cli("preview " + quote(test::data_path("fig1.c").string()));
    CHECK(preview.status == 0);
    CHECK(preview.out.find("\"user\")) { // Check if admin") != std::string::npos);

    const auto sample = cli("forge --variant stretched-string --lang Rust");
    CHECK(sample.status == 0);
    CHECK(sample.out.find("\xE2\x80\xAE") != std::string::npos);
    CHECK(cli("forge --variant comment-spoof --lang Python").status == 2);

    test::TempDir dir;
    CHECK(cli("forge --out " + quote((dir / "corpus").string())).status == 0);
    CHECK(fs::exists(dir / "corpus/manifest.jsonl"));
    CHECK(cli("scan " + quote((dir / "corpus/controls").string())).status == 0);
    CHECK(cli("scan " + quote((dir / "corpus/attacks").string())).status == 1);

    const auto rules = cli("rules");
    CHECK(rules.status == 0);
    for (const auto& r : srcguard::rule_reference()) CHECK(rules.out.find(std::string(r.name)) != std::string::npos);
    CHECK(rules.out.find("CVE-2021-42694") != std::string::npos);
}
