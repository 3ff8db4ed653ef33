#ifndef KWS_TEXT_HPP
#define KWS_TEXT_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kws {

// All loader and pipeline errors are reported through this type.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

namespace text {

std::u32string utf8_decode(std::string_view s);
std::string utf8_encode(const std::u32string& s);

// Canonical composition for the common Latin/Greek/Cyrillic precomposed
// range. Not a full Unicode NFC implementation; see notes in text.cpp.
std::string nfc(std::string_view s);

// Locale-independent simple lowercasing (ASCII, Latin-1, Latin Ext-A,
// Greek, Cyrillic).
std::string to_lower(std::string_view s);

// NFC + lowercase; the canonical form every surface string passes
// through at load time.
std::string fold(std::string_view s);

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
// Splits on runs of spaces/tabs, dropping empty fields.
std::vector<std::string> split_ws(std::string_view s);

// Stable 64-bit hash (FNV-1a); used to derive per-utterance RNG seeds.
std::uint64_t fnv1a(std::string_view s, std::uint64_t seed = 14695981039346656037ULL);

}  // namespace text
}  // namespace kws

#endif
