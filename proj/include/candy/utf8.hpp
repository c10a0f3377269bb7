#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace candy::utf8 {

// Length of the UTF-8 sequence introduced by lead byte `b`, 0 if `b` cannot
// start a sequence.
constexpr std::size_t sequence_length(unsigned char b) noexcept {
  if (b < 0x80) return 1;
  if ((b & 0xE0) == 0xC0) return b >= 0xC2 ? 2 : 0;
  if ((b & 0xF0) == 0xE0) return 3;
  if ((b & 0xF8) == 0xF0) return b <= 0xF4 ? 4 : 0;
  return 0;
}

// Decodes the scalar value starting at byte `pos`. Returns nullopt on
// malformed, overlong or surrogate encodings.
inline std::optional<char32_t> decode_at(std::string_view s, std::size_t pos,
                                         std::size_t& len) noexcept {
  const auto lead = static_cast<unsigned char>(s[pos]);
  len = sequence_length(lead);
  if (len == 0 || pos + len > s.size()) return std::nullopt;
  if (len == 1) return char32_t{lead};
  char32_t cp = lead & (0x7F >> len);
  for (std::size_t i = 1; i < len; ++i) {
    const auto c = static_cast<unsigned char>(s[pos + i]);
    if ((c & 0xC0) != 0x80) return std::nullopt;
    cp = (cp << 6) | (c & 0x3F);
  }
  if ((len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
      (cp >= 0xD800 && cp <= 0xDFFF))
    return std::nullopt;
  return cp;
}

inline bool is_valid(std::string_view s) noexcept {
  for (std::size_t pos = 0, len = 0; pos < s.size(); pos += len)
    if (!decode_at(s, pos, len)) return false;
  return true;
}

// Number of Unicode scalar values. Assumes valid UTF-8.
inline std::size_t length(std::string_view s) noexcept {
  std::size_t n = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++n;
  return n;
}

// Byte offset of the scalar with index `scalar_index`; returns s.size() for
// an index equal to length(s).
inline std::size_t byte_offset(std::string_view s, std::size_t scalar_index) noexcept {
  std::size_t n = 0;
  for (std::size_t pos = 0; pos < s.size(); ++pos) {
    if ((static_cast<unsigned char>(s[pos]) & 0xC0) != 0x80) {
      if (n == scalar_index) return pos;
      ++n;
    }
  }
  return s.size();
}

// Substring by scalar offsets [start, end).
inline std::string_view slice(std::string_view s, std::size_t start, std::size_t end) noexcept {
  const auto b = byte_offset(s, start);
  const auto e = byte_offset(s, end);
  return s.substr(b, e - b);
}

inline void append(std::string& out, char32_t cp) {
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

}  // namespace candy::utf8
