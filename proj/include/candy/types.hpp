#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace candy {

// The ten candy-speech span types, in the task's canonical order.
enum class CandyType : std::uint8_t {
  positive_feedback,
  compliment,
  affection_declaration,
  encouragement,
  gratitude,
  agreement,
  ambiguous,
  implicit,
  group_membership,
  sympathy,
};

inline constexpr std::size_t candy_type_count = 10;

inline constexpr std::array<CandyType, candy_type_count> all_candy_types{
    CandyType::positive_feedback, CandyType::compliment,     CandyType::affection_declaration,
    CandyType::encouragement,     CandyType::gratitude,      CandyType::agreement,
    CandyType::ambiguous,         CandyType::implicit,       CandyType::group_membership,
    CandyType::sympathy,
};

inline constexpr std::array<std::string_view, candy_type_count> candy_type_identifiers{
    "positive_feedback", "compliment", "affection_declaration", "encouragement", "gratitude",
    "agreement",         "ambiguous",  "implicit",              "group_membership", "sympathy",
};

inline constexpr std::array<std::string_view, candy_type_count> candy_type_labels{
    "positive feedback", "compliment", "affection declaration", "encouragement", "gratitude",
    "agreement",         "ambiguous",  "implicit",              "group membership", "sympathy",
};

// Underscore form, used in BIO tag names.
constexpr std::string_view identifier(CandyType t) noexcept {
  return candy_type_identifiers[static_cast<std::size_t>(t)];
}

// Spaced form, used in the spans TSV.
constexpr std::string_view label(CandyType t) noexcept {
  return candy_type_labels[static_cast<std::size_t>(t)];
}

// Accepts either the spaced or the underscore spelling.
constexpr std::optional<CandyType> parse_candy_type(std::string_view s) noexcept {
  for (std::size_t i = 0; i < candy_type_count; ++i)
    if (s == candy_type_labels[i] || s == candy_type_identifiers[i]) return all_candy_types[i];
  return std::nullopt;
}

struct CommentKey {
  std::string document;
  std::uint64_t comment_id = 0;

  friend auto operator<=>(const CommentKey&, const CommentKey&) = default;
  friend bool operator==(const CommentKey&, const CommentKey&) = default;
};

inline std::string to_string(const CommentKey& k) {
  return k.document + "/" + std::to_string(k.comment_id);
}

struct Comment {
  CommentKey key;
  std::string text;  // UTF-8
};

// Half-open range [start, end) in Unicode scalar values.
struct SpanAnnotation {
  std::size_t start = 0;
  std::size_t end = 0;
  CandyType type = CandyType::positive_feedback;

  std::size_t length() const noexcept { return end > start ? end - start : 0; }

  friend auto operator<=>(const SpanAnnotation&, const SpanAnnotation&) = default;
  friend bool operator==(const SpanAnnotation&, const SpanAnnotation&) = default;
};

struct AnnotatedComment {
  Comment comment;
  bool is_candy = false;
  std::vector<SpanAnnotation> spans;  // sorted by (start, end, type)
  // 0 for originals; oversampling numbers the extra copies 1, 2, ...
  std::uint32_t replica = 0;

  const CommentKey& key() const noexcept { return comment.key; }
  const std::string& text() const noexcept { return comment.text; }
};

using Corpus = std::vector<AnnotatedComment>;

}  // namespace candy
