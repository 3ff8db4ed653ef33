#include "kws/text.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>

namespace kws::text {

std::u32string utf8_decode(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        char32_t cp = 0;
        int extra = 0;
        if (c < 0x80) {
            cp = c;
        } else if ((c & 0xE0) == 0xC0) {
            cp = c & 0x1F;
            extra = 1;
        } else if ((c & 0xF0) == 0xE0) {
            cp = c & 0x0F;
            extra = 2;
        } else if ((c & 0xF8) == 0xF0) {
            cp = c & 0x07;
            extra = 3;
        } else {
            throw Error("invalid UTF-8 byte at offset " + std::to_string(i));
        }
        if (i + extra >= s.size()) throw Error("truncated UTF-8 sequence");
        for (int k = 1; k <= extra; ++k) {
            unsigned char cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) throw Error("invalid UTF-8 continuation byte");
            cp = (cp << 6) | (cc & 0x3F);
        }
        i += extra + 1;
        out.push_back(cp);
    }
    return out;
}

std::string utf8_encode(const std::u32string& s) {
    std::string out;
    out.reserve(s.size());
    for (char32_t cp : s) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }
    return out;
}

namespace {

struct Composition {
    char32_t base;
    char32_t mark;
    char32_t composed;
};

// Canonical compositions for the Latin-1 Supplement / Latin Extended-A
// precomposed letters plus a few Greek/Cyrillic ones. Enough for the
// orthographies this toolkit ingests.
constexpr Composition kCompositions[] = {
    {U'A', 0x300, 0xC0}, {U'A', 0x301, 0xC1}, {U'A', 0x302, 0xC2}, {U'A', 0x303, 0xC3},
    {U'A', 0x308, 0xC4}, {U'A', 0x30A, 0xC5}, {U'C', 0x327, 0xC7}, {U'E', 0x300, 0xC8},
    {U'E', 0x301, 0xC9}, {U'E', 0x302, 0xCA}, {U'E', 0x308, 0xCB}, {U'I', 0x300, 0xCC},
    {U'I', 0x301, 0xCD}, {U'I', 0x302, 0xCE}, {U'I', 0x308, 0xCF}, {U'N', 0x303, 0xD1},
    {U'O', 0x300, 0xD2}, {U'O', 0x301, 0xD3}, {U'O', 0x302, 0xD4}, {U'O', 0x303, 0xD5},
    {U'O', 0x308, 0xD6}, {U'U', 0x300, 0xD9}, {U'U', 0x301, 0xDA}, {U'U', 0x302, 0xDB},
    {U'U', 0x308, 0xDC}, {U'Y', 0x301, 0xDD},
    {U'a', 0x300, 0xE0}, {U'a', 0x301, 0xE1}, {U'a', 0x302, 0xE2}, {U'a', 0x303, 0xE3},
    {U'a', 0x308, 0xE4}, {U'a', 0x30A, 0xE5}, {U'c', 0x327, 0xE7}, {U'e', 0x300, 0xE8},
    {U'e', 0x301, 0xE9}, {U'e', 0x302, 0xEA}, {U'e', 0x308, 0xEB}, {U'i', 0x300, 0xEC},
    {U'i', 0x301, 0xED}, {U'i', 0x302, 0xEE}, {U'i', 0x308, 0xEF}, {U'n', 0x303, 0xF1},
    {U'o', 0x300, 0xF2}, {U'o', 0x301, 0xF3}, {U'o', 0x302, 0xF4}, {U'o', 0x303, 0xF5},
    {U'o', 0x308, 0xF6}, {U'u', 0x300, 0xF9}, {U'u', 0x301, 0xFA}, {U'u', 0x302, 0xFB},
    {U'u', 0x308, 0xFC}, {U'y', 0x301, 0xFD}, {U'y', 0x308, 0xFF},
    {U'A', 0x304, 0x100}, {U'a', 0x304, 0x101}, {U'A', 0x306, 0x102}, {U'a', 0x306, 0x103},
    {U'A', 0x328, 0x104}, {U'a', 0x328, 0x105}, {U'C', 0x301, 0x106}, {U'c', 0x301, 0x107},
    {U'C', 0x30C, 0x10C}, {U'c', 0x30C, 0x10D}, {U'D', 0x30C, 0x10E}, {U'd', 0x30C, 0x10F},
    {U'E', 0x304, 0x112}, {U'e', 0x304, 0x113}, {U'E', 0x307, 0x116}, {U'e', 0x307, 0x117},
    {U'E', 0x328, 0x118}, {U'e', 0x328, 0x119}, {U'E', 0x30C, 0x11A}, {U'e', 0x30C, 0x11B},
    {U'G', 0x306, 0x11E}, {U'g', 0x306, 0x11F}, {U'G', 0x327, 0x122}, {U'g', 0x327, 0x123},
    {U'I', 0x304, 0x12A}, {U'i', 0x304, 0x12B}, {U'I', 0x328, 0x12E}, {U'i', 0x328, 0x12F},
    {U'I', 0x307, 0x130},
    {U'L', 0x301, 0x139}, {U'l', 0x301, 0x13A}, {U'N', 0x301, 0x143}, {U'n', 0x301, 0x144},
    {U'N', 0x30C, 0x147}, {U'n', 0x30C, 0x148}, {U'O', 0x304, 0x14C}, {U'o', 0x304, 0x14D},
    {U'O', 0x30B, 0x150}, {U'o', 0x30B, 0x151}, {U'R', 0x30C, 0x158}, {U'r', 0x30C, 0x159},
    {U'S', 0x301, 0x15A}, {U's', 0x301, 0x15B}, {U'S', 0x327, 0x15E}, {U's', 0x327, 0x15F},
    {U'S', 0x30C, 0x160}, {U's', 0x30C, 0x161}, {U'T', 0x327, 0x162}, {U't', 0x327, 0x163},
    {U'U', 0x304, 0x16A}, {U'u', 0x304, 0x16B}, {U'U', 0x30A, 0x16E}, {U'u', 0x30A, 0x16F},
    {U'U', 0x30B, 0x170}, {U'u', 0x30B, 0x171}, {U'U', 0x328, 0x172}, {U'u', 0x328, 0x173},
    {U'Z', 0x301, 0x179}, {U'z', 0x301, 0x17A}, {U'Z', 0x307, 0x17B}, {U'z', 0x307, 0x17C},
    {U'Z', 0x30C, 0x17D}, {U'z', 0x30C, 0x17E},
};

char32_t compose_pair(char32_t base, char32_t mark) {
    for (const auto& c : kCompositions)
        if (c.base == base && c.mark == mark) return c.composed;
    return 0;
}

bool is_combining(char32_t cp) { return cp >= 0x300 && cp <= 0x36F; }

char32_t lower_cp(char32_t cp) {
    if (cp >= U'A' && cp <= U'Z') return cp + 32;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;  // Latin-1
    if (cp == 0x130) return U'i';                                 // I-with-dot
    if (cp == 0x178) return 0xFF;                                 // Y-diaeresis
    if (cp >= 0x100 && cp <= 0x177) return (cp % 2 == 0) ? cp + 1 : cp;
    if (cp >= 0x179 && cp <= 0x17E) return (cp % 2 == 1) ? cp + 1 : cp;
    if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 32;  // Greek
    if (cp >= 0x410 && cp <= 0x42F) return cp + 32;                 // Cyrillic
    if (cp >= 0x400 && cp <= 0x40F) return cp + 80;
    return cp;
}

}  // namespace

std::string nfc(std::string_view s) {
    std::u32string cps = utf8_decode(s);
    std::u32string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) {
        if (!out.empty() && is_combining(cp)) {
            if (char32_t comp = compose_pair(out.back(), cp)) {
                out.back() = comp;
                continue;
            }
        }
        out.push_back(cp);
    }
    return utf8_encode(out);
}

std::string to_lower(std::string_view s) {
    std::u32string cps = utf8_decode(s);
    for (char32_t& cp : cps) cp = lower_cp(cp);
    return utf8_encode(cps);
}

std::string fold(std::string_view s) { return to_lower(nfc(s)); }

std::string trim(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(s.substr(start));
            break;
        }
        out.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        size_t b = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
        if (i > b) out.emplace_back(s.substr(b, i - b));
    }
    return out;
}

std::uint64_t fnv1a(std::string_view s, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace kws::text
