// Dumps the per-code-point confusable prototype mapping compiled into ICU.
//
// Output rows: SOURCE;TARGET TARGET ...  (uppercase hex, no prefix)
// A row is emitted for every code point that is its own canonical
// decomposition and whose skeleton differs from itself. Targets are closed
// under the skeleton transform, so every target is a fixed point.
//
// Build: g++ -std=c++20 -O2 dump_confusables.cpp -licui18n -licuuc -licudata
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/uspoof.h>
#include <unicode/uversion.h>

#include <cstdio>
#include <cstdlib>

int main() {
    UErrorCode status = U_ZERO_ERROR;
    USpoofChecker* checker = uspoof_open(&status);
    const icu::Normalizer2* nfd = icu::Normalizer2::getNFDInstance(status);
    if (U_FAILURE(status)) {
        std::fprintf(stderr, "icu init failed: %s\n", u_errorName(status));
        return 1;
    }
    char version[U_MAX_VERSION_STRING_LENGTH];
    UVersionInfo info;
    u_getUnicodeVersion(info);
    u_versionToString(info, version);
    std::printf("# Unicode-Version: %s\n", version);

    for (UChar32 cp = 0; cp <= 0x10FFFF; ++cp) {
        if (cp >= 0xD800 && cp <= 0xDFFF) continue;
        if (u_charType(cp) == U_UNASSIGNED) continue;
        icu::UnicodeString src(cp);
        icu::UnicodeString decomposed = nfd->normalize(src, status);
        if (decomposed != src) continue;
        icu::UnicodeString skel = src;
        for (int round = 0;; ++round) {
            icu::UnicodeString next;
            uspoof_getSkeletonUnicodeString(checker, 0, skel, next, &status);
            if (U_FAILURE(status) || round > 8) {
                std::fprintf(stderr, "skeleton failed at %04X\n", cp);
                return 1;
            }
            if (next == skel) break;
            skel = next;
        }
        if (skel == src) continue;
        std::printf("%04X;", cp);
        bool first = true;
        for (int32_t i = 0; i < skel.length(); i = skel.moveIndex32(i, 1)) {
            std::printf(first ? "%04X" : " %04X", skel.char32At(i));
            first = false;
        }
        std::printf("\n");
    }
    uspoof_close(checker);
    return 0;
}
