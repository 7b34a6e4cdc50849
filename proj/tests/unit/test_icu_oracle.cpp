// Cross-checks the shipped tables against ICU built for the same Unicode
// version.
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/uscript.h>
#include <unicode/uspoof.h>

#include <random>

#include "doctest.h"
#include "test_support.hpp"

using namespace srcguard;

namespace {

std::string codepoints(std::u32string_view s) {
    std::string out;
    char buf[16];
    for (char32_t c : s) {
        std::snprintf(buf, sizeof buf, "%s%04X", out.empty() ? "" : " ", static_cast<unsigned>(c));
        out += buf;
    }
    return out;
}

std::string icu_unicode_version() {
    UVersionInfo v;
    u_getUnicodeVersion(v);
    char buf[U_MAX_VERSION_STRING_LENGTH];
    u_versionToString(v, buf);
    std::string s = buf;
    while (std::count(s.begin(), s.end(), '.') < 2) s += ".0";
    return s;
}

icu::UnicodeString to_icu(std::u32string_view s) {
    icu::UnicodeString out;
    for (char32_t cp : s) out.append(static_cast<UChar32>(cp));
    return out;
}

std::u32string from_icu(const icu::UnicodeString& s) {
    std::u32string out;
    for (int32_t i = 0; i < s.length();) {
        const UChar32 cp = s.char32At(i);
        out.push_back(static_cast<char32_t>(cp));
        i += U16_LENGTH(cp);
    }
    return out;
}

BidiClass from_icu_direction(int d) {
    switch (d) {
        case U_LEFT_TO_RIGHT: return BidiClass::L;
        case U_RIGHT_TO_LEFT: return BidiClass::R;
        case U_EUROPEAN_NUMBER: return BidiClass::EN;
        case U_EUROPEAN_NUMBER_SEPARATOR: return BidiClass::ES;
        case U_EUROPEAN_NUMBER_TERMINATOR: return BidiClass::ET;
        case U_ARABIC_NUMBER: return BidiClass::AN;
        case U_COMMON_NUMBER_SEPARATOR: return BidiClass::CS;
        case U_BLOCK_SEPARATOR: return BidiClass::B;
        case U_SEGMENT_SEPARATOR: return BidiClass::S;
        case U_WHITE_SPACE_NEUTRAL: return BidiClass::WS;
        case U_OTHER_NEUTRAL: return BidiClass::ON;
        case U_LEFT_TO_RIGHT_EMBEDDING: return BidiClass::LRE;
        case U_LEFT_TO_RIGHT_OVERRIDE: return BidiClass::LRO;
        case U_RIGHT_TO_LEFT_ARABIC: return BidiClass::AL;
        case U_RIGHT_TO_LEFT_EMBEDDING: return BidiClass::RLE;
        case U_RIGHT_TO_LEFT_OVERRIDE: return BidiClass::RLO;
        case U_POP_DIRECTIONAL_FORMAT: return BidiClass::PDF;
        case U_DIR_NON_SPACING_MARK: return BidiClass::NSM;
        case U_BOUNDARY_NEUTRAL: return BidiClass::BN;
        case U_FIRST_STRONG_ISOLATE: return BidiClass::FSI;
        case U_LEFT_TO_RIGHT_ISOLATE: return BidiClass::LRI;
        case U_RIGHT_TO_LEFT_ISOLATE: return BidiClass::RLI;
        case U_POP_DIRECTIONAL_ISOLATE: return BidiClass::PDI;
    }
    return BidiClass::ON;
}

bool is_scalar(char32_t cp) { return cp < 0xD800 || (cp > 0xDFFF && cp <= 0x10FFFF); }

}  // namespace

TEST_CASE("oracle: ICU is built for the pinned Unicode version") {
    REQUIRE(icu_unicode_version() == test::tables().version());
}

TEST_CASE("oracle: bidi classes match ICU for every code point") {
    const auto& t = test::tables();
    std::size_t mismatches = 0;
    for (char32_t cp = 0; cp <= 0x10FFFF; ++cp) {
        if (t.bidi_class(cp) != from_icu_direction(u_charDirection(static_cast<UChar32>(cp)))) {
            if (++mismatches <= 5) FAIL_CHECK(codepoints(std::u32string(1, cp)));
        }
    }
    CHECK(mismatches == 0);
}

TEST_CASE("oracle: scripts match ICU for every code point") {
    const auto& t = test::tables();
    std::size_t mismatches = 0;
    for (char32_t cp = 0; cp <= 0x10FFFF; ++cp) {
        UErrorCode status = U_ZERO_ERROR;
        const UScriptCode sc = uscript_getScript(static_cast<UChar32>(cp), &status);
        std::string name = uscript_getName(sc);
        if (t.script_of(cp) != name) {
            if (++mismatches <= 5)
                FAIL_CHECK(codepoints(std::u32string(1, cp)) << ' ' << t.script_of(cp) << " vs "
                                    << name);
        }
    }
    CHECK(mismatches == 0);
}

TEST_CASE("oracle: general categories match ICU for every code point") {
    const auto& t = test::tables();
    // ICU's UCharCategory order differs from ours; compare by short name.
    std::size_t mismatches = 0;
    for (char32_t cp = 0; cp <= 0x10FFFF; ++cp) {
        const auto icu_gc = static_cast<UProperty>(UCHAR_GENERAL_CATEGORY);
        const int value = u_getIntPropertyValue(static_cast<UChar32>(cp), icu_gc);
        const char* name = u_getPropertyValueName(icu_gc, value, U_SHORT_PROPERTY_NAME);
        if (to_string(t.general_category(cp)) != name) {
            if (++mismatches <= 5) FAIL_CHECK(codepoints(std::u32string(1, cp)));
        }
    }
    CHECK(mismatches == 0);
}

TEST_CASE("oracle: NFD of every code point matches ICU") {
    const auto& t = test::tables();
    UErrorCode status = U_ZERO_ERROR;
    const auto* nfd = icu::Normalizer2::getNFDInstance(status);
    REQUIRE(U_SUCCESS(status));
    std::size_t mismatches = 0;
    for (char32_t cp = 0; cp <= 0x10FFFF; ++cp) {
        if (!is_scalar(cp)) continue;
        const std::u32string s(1, cp);
        const auto expected = from_icu(nfd->normalize(to_icu(s), status));
        if (t.nfd(s) != expected && ++mismatches <= 5) FAIL_CHECK(codepoints(std::u32string(1, cp)));
    }
    CHECK(mismatches == 0);
}

TEST_CASE("oracle: NFD of random mark sequences matches ICU") {
    const auto& t = test::tables();
    UErrorCode status = U_ZERO_ERROR;
    const auto* nfd = icu::Normalizer2::getNFDInstance(status);
    std::mt19937 rng(3);
    const char32_t pool[] = {U'a', U'e', 0x00E9, 0x1E69, 0x0301, 0x0323, 0x0307, 0x0316, 0x05B0, 0x05B8,
                             0xAC00, 0x1100, 0x1161, 0x0F73, 0x0F75, 0x0344, 0x1D15E, 0x0958};
    std::uniform_int_distribution<std::size_t> pick(0, std::size(pool) - 1);
    for (int i = 0; i < 3000; ++i) {
        std::u32string s;
        for (int k = 0; k < 8; ++k) s.push_back(pool[pick(rng)]);
        CHECK(t.nfd(s) == from_icu(nfd->normalize(to_icu(s), status)));
    }
}

TEST_CASE("oracle: skeleton matches ICU uspoof_getSkeleton") {
    const auto& t = test::tables();
    UErrorCode status = U_ZERO_ERROR;
    USpoofChecker* sc = uspoof_open(&status);
    REQUIRE(U_SUCCESS(status));
    // ICU's single pass is not idempotent (U+01C6 gives d z U+030C, and
    // U+030C has its own prototype); the tables close it to a fixpoint.
    const auto icu_skeleton = [&](std::u32string_view s) {
        icu::UnicodeString current = to_icu(s);
        for (int round = 0; round < 8; ++round) {
            icu::UnicodeString next;
            uspoof_getSkeletonUnicodeString(sc, 0, current, next, &status);
            if (next == current) break;
            current = next;
        }
        return from_icu(current);
    };

    SUBCASE("every single code point") {
        std::size_t mismatches = 0;
        for (char32_t cp = 0; cp <= 0x10FFFF; ++cp) {
            if (!is_scalar(cp)) continue;
            const std::u32string s(1, cp);
            if (t.skeleton(s) != icu_skeleton(s) && ++mismatches <= 5)
                FAIL_CHECK(codepoints(s) << " -> " << codepoints(t.skeleton(s)) << " vs ICU " << codepoints(icu_skeleton(s)));
        }
        CHECK(mismatches == 0);
    }
    SUBCASE("random identifiers built from confusable sources") {
        std::vector<char32_t> sources;
        for (const auto& [cp, target] : t.confusable_map()) sources.push_back(cp);
        std::sort(sources.begin(), sources.end());
        std::mt19937 rng(5);
        std::uniform_int_distribution<std::size_t> pick(0, sources.size() - 1);
        std::uniform_int_distribution<int> ascii(0x61, 0x7A);
        for (int i = 0; i < 3000; ++i) {
            std::u32string s;
            for (int k = 0; k < 6; ++k) s.push_back(k % 2 ? sources[pick(rng)] : static_cast<char32_t>(ascii(rng)));
            const auto ours = t.skeleton(s), theirs = icu_skeleton(s);
            if (ours != theirs) FAIL_CHECK(codepoints(s) << " -> " << codepoints(ours) << " vs ICU " << codepoints(theirs));
        }
    }
    uspoof_close(sc);
}
