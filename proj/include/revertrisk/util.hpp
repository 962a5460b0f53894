#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rr {

// Seeded 64-bit string hash (FNV-1a core, splitmix64 finalizer). Stable across
// platforms and releases; page-to-split assignment and n-gram bucketing depend
// on it staying fixed.
std::uint64_t hash64(std::string_view data, std::uint64_t seed);

// Maps a hash to [0,1) with 53 usable bits.
double hash_to_unit(std::uint64_t h);

// SHA-256 of the exact input bytes, lowercase hex.
std::string sha256_hex(std::string_view data);

// UTF-8 decoding. Invalid sequences decode to U+FFFD one byte at a time.
// next_codepoint advances pos past the scalar it returns.
char32_t next_codepoint(std::string_view text, std::size_t& pos);
std::vector<char32_t> decode_utf8(std::string_view text);
void append_utf8(std::string& out, char32_t cp);

// Timestamps are milliseconds since the Unix epoch, UTC.
// Accepted input formats:
//   "YYYY-MM-DD HH:MM:SS[.fff]"
//   "YYYY-MM-DDTHH:MM:SS[.fff][Z|+hh:mm|-hh:mm]"
std::int64_t parse_timestamp_ms(std::string_view text);
std::optional<std::int64_t> try_parse_timestamp_ms(std::string_view text);

// Canonical form "YYYY-MM-DD HH:MM:SS.f" (one fractional digit).
std::string format_timestamp_ms(std::int64_t ms);

// RFC 3339 with trailing Z, second resolution, for report metadata.
std::string format_timestamp_iso(std::int64_t ms);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace rr
