#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "candy/error.hpp"
#include "candy/types.hpp"
#include "candy/utf8.hpp"

namespace candy {

enum class TagKind : std::uint8_t { O, B, I };

struct BioTag {
  TagKind kind = TagKind::O;
  CandyType type = CandyType::positive_feedback;  // ignored when kind == O

  static constexpr BioTag outside() noexcept { return {}; }
  static constexpr BioTag begin(CandyType t) noexcept { return {TagKind::B, t}; }
  static constexpr BioTag inside(CandyType t) noexcept { return {TagKind::I, t}; }

  friend constexpr bool operator==(const BioTag& a, const BioTag& b) noexcept {
    return a.kind == b.kind && (a.kind == TagKind::O || a.type == b.type);
  }
};

inline constexpr std::size_t tag_count = 1 + 2 * candy_type_count;

// Dense id: O = 0, then B-/I- pairs in CandyType order.
constexpr std::size_t tag_id(BioTag t) noexcept {
  if (t.kind == TagKind::O) return 0;
  return 1 + 2 * static_cast<std::size_t>(t.type) + (t.kind == TagKind::I ? 1 : 0);
}

constexpr BioTag tag_from_id(std::size_t id) noexcept {
  if (id == 0 || id >= tag_count) return BioTag::outside();
  const auto type = all_candy_types[(id - 1) / 2];
  return (id - 1) % 2 == 0 ? BioTag::begin(type) : BioTag::inside(type);
}

// The 21 tag names indexed by tag_id: "O", "B-positive_feedback", ...
inline const std::array<std::string, tag_count>& label_registry() {
  static const auto registry = [] {
    std::array<std::string, tag_count> names;
    names[0] = "O";
    for (std::size_t i = 0; i < candy_type_count; ++i) {
      names[1 + 2 * i] = "B-" + std::string(candy_type_identifiers[i]);
      names[2 + 2 * i] = "I-" + std::string(candy_type_identifiers[i]);
    }
    return names;
  }();
  return registry;
}

inline const std::string& tag_name(BioTag t) { return label_registry()[tag_id(t)]; }

inline std::optional<BioTag> parse_tag(std::string_view name) {
  const auto& reg = label_registry();
  for (std::size_t i = 0; i < reg.size(); ++i)
    if (reg[i] == name) return tag_from_id(i);
  return std::nullopt;
}

// One token's character range [start, end) in scalar values. A token with
// is_word_continuation set continues the previous token's word ("##en").
struct TokenOffset {
  std::size_t start = 0;
  std::size_t end = 0;
  bool is_word_continuation = false;

  friend bool operator==(const TokenOffset&, const TokenOffset&) = default;
};

struct TaggedSequence {
  CommentKey key;
  std::vector<TokenOffset> tokens;
  std::vector<BioTag> tags;  // same length as tokens
};

// Throws DataError unless tokens are non-empty ranges in strictly increasing,
// non-overlapping order with a non-continuation first token, and (when
// given) lie inside a text of `text_length` scalars.
inline void check_tokens(std::span<const TokenOffset> tokens,
                         std::optional<std::size_t> text_length = std::nullopt) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    const auto where = "token " + std::to_string(i) + " [" + std::to_string(t.start) + ", " +
                       std::to_string(t.end) + ")";
    if (t.start >= t.end) throw DataError(where + " is empty or inverted");
    if (i == 0 && t.is_word_continuation)
      throw DataError(where + " is the first token but marked as a word continuation");
    if (i > 0 && t.start < tokens[i - 1].end)
      throw DataError(where + " overlaps or precedes the previous token");
    if (text_length && t.end > *text_length)
      throw DataError(where + " extends beyond text length " + std::to_string(*text_length));
  }
}

struct Encoding {
  std::vector<BioTag> tags;
  // Indices into the input span list of spans that received no token.
  std::vector<std::size_t> dropped;
};

// Tags every token with the span it intersects. When several spans intersect
// a token, the one covering more of the token's characters wins; ties go to
// the span that sorts first by (start, end, type). A span's first token gets
// B, the rest I. Spans left without tokens are reported in `dropped`.
inline Encoding encode_bio(std::string_view text, std::span<const SpanAnnotation> spans,
                           std::span<const TokenOffset> tokens) {
  check_tokens(tokens, utf8::length(text));

  std::vector<std::size_t> order(spans.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return spans[a] < spans[b]; });

  constexpr auto none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> owner(tokens.size(), none);
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    std::size_t best_overlap = 0;
    for (auto s : order) {
      const auto lo = std::max(tokens[t].start, spans[s].start);
      const auto hi = std::min(tokens[t].end, spans[s].end);
      if (lo < hi && hi - lo > best_overlap) {
        best_overlap = hi - lo;
        owner[t] = s;
      }
    }
  }

  Encoding enc;
  enc.tags.resize(tokens.size());
  std::vector<bool> used(spans.size(), false);
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const auto s = owner[t];
    if (s == none) continue;
    const bool continues = t > 0 && owner[t - 1] == s;
    enc.tags[t] = continues ? BioTag::inside(spans[s].type) : BioTag::begin(spans[s].type);
    used[s] = true;
  }
  for (std::size_t s = 0; s < spans.size(); ++s)
    if (!used[s]) enc.dropped.push_back(s);
  return enc;
}

inline TaggedSequence encode_bio(const AnnotatedComment& ac, std::vector<TokenOffset> tokens,
                                 std::vector<std::size_t>* dropped = nullptr) {
  auto enc = encode_bio(ac.text(), ac.spans, tokens);
  if (dropped) *dropped = std::move(enc.dropped);
  return TaggedSequence{ac.key(), std::move(tokens), std::move(enc.tags)};
}

namespace detail {

inline void check_lengths(std::span<const TokenOffset> tokens, std::span<const BioTag> tags) {
  if (tokens.size() != tags.size())
    throw DataError("tag count " + std::to_string(tags.size()) + " differs from token count " +
                    std::to_string(tokens.size()));
}

}  // namespace detail

// A span is a B token followed by any run of I tokens of the same type.
// I tokens that do not continue such a run are dropped, and a mismatched I
// ends the current run.
inline std::vector<SpanAnnotation> decode_basic(std::span<const TokenOffset> tokens,
                                                std::span<const BioTag> tags) {
  detail::check_lengths(tokens, tags);
  std::vector<SpanAnnotation> out;
  bool open = false;
  SpanAnnotation cur;
  auto close = [&] {
    if (open) out.push_back(cur);
    open = false;
  };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto tag = tags[i];
    switch (tag.kind) {
      case TagKind::O:
        close();
        break;
      case TagKind::B:
        close();
        cur = {tokens[i].start, tokens[i].end, tag.type};
        open = true;
        break;
      case TagKind::I:
        if (open && tag.type == cur.type)
          cur.end = tokens[i].end;
        else
          close();
        break;
    }
  }
  close();
  return out;
}

inline std::vector<SpanAnnotation> decode_basic(const TaggedSequence& seq) {
  return decode_basic(seq.tokens, seq.tags);
}

enum class RepairKind {
  absorbed_untagged,    // O continuation pulled into the span
  absorbed_same_type,   // B continuation of the span's type
  absorbed_other_type,  // B/I continuation of a different type
  start_moved,          // span opened mid-word, start moved to the word's first token
};

struct RepairEvent {
  RepairKind kind;
  std::size_t token;  // index of the continuation token involved
};

struct ExtendedDecoding {
  std::vector<SpanAnnotation> spans;
  std::vector<RepairEvent> repairs;
};

// decode_basic plus word-boundary repair in one left-to-right pass:
//  * while a span is open, every continuation token joins it whatever its tag;
//  * a B tag on a continuation token outside any span opens the span at the
//    first token of that word.
// No span therefore starts or ends inside a word. The type of a span stays
// that of its opening B tag.
inline ExtendedDecoding decode_extended_logged(std::span<const TokenOffset> tokens,
                                               std::span<const BioTag> tags) {
  detail::check_lengths(tokens, tags);
  ExtendedDecoding res;
  bool open = false;
  SpanAnnotation cur;
  std::size_t word_start = 0;
  auto close = [&] {
    if (open) res.spans.push_back(cur);
    open = false;
  };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const bool continuation = i > 0 && tokens[i].is_word_continuation;
    if (!continuation) word_start = i;
    const auto tag = tags[i];

    if (open && continuation) {
      cur.end = tokens[i].end;
      if (tag.kind == TagKind::O)
        res.repairs.push_back({RepairKind::absorbed_untagged, i});
      else if (tag.type != cur.type)
        res.repairs.push_back({RepairKind::absorbed_other_type, i});
      else if (tag.kind == TagKind::B)
        res.repairs.push_back({RepairKind::absorbed_same_type, i});
      continue;
    }

    switch (tag.kind) {
      case TagKind::O:
        close();
        break;
      case TagKind::B:
        close();
        cur = {tokens[word_start].start, tokens[i].end, tag.type};
        open = true;
        if (word_start != i) res.repairs.push_back({RepairKind::start_moved, i});
        break;
      case TagKind::I:
        if (open && tag.type == cur.type)
          cur.end = tokens[i].end;
        else
          close();
        break;
    }
  }
  close();
  return res;
}

inline std::vector<SpanAnnotation> decode_extended(std::span<const TokenOffset> tokens,
                                                   std::span<const BioTag> tags) {
  return decode_extended_logged(tokens, tags).spans;
}

inline std::vector<SpanAnnotation> decode_extended(const TaggedSequence& seq) {
  return decode_extended(seq.tokens, seq.tags);
}

enum class Postprocessing { basic, extended };

inline std::string_view to_string(Postprocessing p) noexcept {
  return p == Postprocessing::basic ? "basic" : "extended";
}

inline std::optional<Postprocessing> parse_postprocessing(std::string_view s) noexcept {
  if (s == "basic") return Postprocessing::basic;
  if (s == "extended") return Postprocessing::extended;
  return std::nullopt;
}

inline std::vector<SpanAnnotation> decode(const TaggedSequence& seq, Postprocessing mode) {
  return mode == Postprocessing::basic ? decode_basic(seq) : decode_extended(seq);
}

}  // namespace candy
