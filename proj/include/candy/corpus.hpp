#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "candy/error.hpp"
#include "candy/rational.hpp"
#include "candy/tsv.hpp"
#include "candy/types.hpp"
#include "candy/utf8.hpp"

namespace candy {

using SpanTable = std::map<CommentKey, std::vector<SpanAnnotation>>;
using LabelTable = std::map<CommentKey, bool>;

namespace detail {

inline CommentKey parse_key(tsv::Reader& r, std::string_view document, std::string_view id) {
  if (document.empty()) r.fail("empty document identifier");
  const auto cid = tsv::parse_uint<std::uint64_t>(id);
  if (!cid) r.fail("comment_id '" + std::string(id) + "' is not a non-negative integer");
  return CommentKey{std::string(document), *cid};
}

inline SpanAnnotation parse_span_fields(tsv::Reader& r, std::string_view type,
                                        std::string_view start, std::string_view end) {
  const auto t = parse_candy_type(type);
  if (!t) r.fail("unknown candy type '" + std::string(type) + "'");
  const auto s = tsv::parse_uint<std::size_t>(start);
  const auto e = tsv::parse_uint<std::size_t>(end);
  if (!s) r.fail("span start '" + std::string(start) + "' is not a non-negative integer");
  if (!e) r.fail("span end '" + std::string(end) + "' is not a non-negative integer");
  return SpanAnnotation{*s, *e, *t};
}

inline bool parse_flag(tsv::Reader& r, std::string_view v) {
  if (v == "yes") return true;
  if (v == "no") return false;
  r.fail("flausch value must be 'yes' or 'no', found '" + std::string(v) + "'");
}

inline void sort_spans(std::vector<SpanAnnotation>& spans) { std::sort(spans.begin(), spans.end()); }

}  // namespace detail

// Spans TSV without the owning texts; offsets are not bounds-checked.
inline SpanTable read_span_table(std::istream& in, const std::string& name) {
  tsv::Reader r(in, name);
  r.expect_header({"document", "comment_id", "type", "start", "end"});
  SpanTable table;
  while (auto row = r.row(5)) {
    auto& f = *row;
    auto key = detail::parse_key(r, f[0], f[1]);
    table[std::move(key)].push_back(detail::parse_span_fields(r, f[2], f[3], f[4]));
  }
  for (auto& [key, spans] : table) detail::sort_spans(spans);
  return table;
}

inline LabelTable read_label_table(std::istream& in, const std::string& name) {
  tsv::Reader r(in, name);
  r.expect_header({"document", "comment_id", "flausch"});
  LabelTable table;
  while (auto row = r.row(3)) {
    auto& f = *row;
    auto key = detail::parse_key(r, f[0], f[1]);
    const bool flag = detail::parse_flag(r, f[2]);
    if (!table.emplace(key, flag).second) r.fail("duplicate label for " + to_string(key));
  }
  return table;
}

inline void write_span_table(std::ostream& out, const SpanTable& table) {
  out << "document\tcomment_id\ttype\tstart\tend\n";
  for (const auto& [key, spans] : table)
    for (const auto& s : spans)
      out << tsv::escape(key.document) << '\t' << key.comment_id << '\t' << label(s.type) << '\t'
          << s.start << '\t' << s.end << '\n';
}

inline void write_label_table(std::ostream& out, const LabelTable& table) {
  out << "document\tcomment_id\tflausch\n";
  for (const auto& [key, flag] : table)
    out << tsv::escape(key.document) << '\t' << key.comment_id << '\t' << (flag ? "yes" : "no")
        << '\n';
}

struct CorpusSources {
  std::istream* comments = nullptr;
  std::string comments_name = "comments";
  std::istream* labels = nullptr;
  std::string labels_name = "labels";
  std::istream* spans = nullptr;
  std::string spans_name = "spans";
};

// Reads the comments TSV and joins the optional labels and spans tables onto
// it by (document, comment_id). The comments file may carry a fourth
// `replica` column; labels and spans then apply to every replica of a key.
// Without labels, is_candy is derived from the presence of spans.
inline Corpus parse_corpus(const CorpusSources& src) {
  if (!src.comments) throw UsageError("parse_corpus: comments stream is required");
  Corpus corpus;
  std::map<CommentKey, std::vector<std::size_t>> index;
  {
    tsv::Reader r(*src.comments, src.comments_name);
    const auto columns = r.expect_header({"document", "comment_id", "comment"},
                                         {"document", "comment_id", "comment", "replica"});
    std::set<std::pair<CommentKey, std::uint32_t>> seen;
    while (auto row = r.row(columns)) {
      auto& f = *row;
      AnnotatedComment ac;
      ac.comment.key = detail::parse_key(r, f[0], f[1]);
      ac.comment.text = tsv::unescape(f[2]);
      if (columns == 4) {
        const auto rep = tsv::parse_uint<std::uint32_t>(f[3]);
        if (!rep) r.fail("replica '" + std::string(f[3]) + "' is not a non-negative integer");
        ac.replica = *rep;
      }
      if (!utf8::is_valid(ac.comment.text)) r.fail("comment text is not valid UTF-8");
      if (ac.comment.text.empty()) r.fail("empty comment text for " + to_string(ac.key()));
      if (!seen.emplace(ac.key(), ac.replica).second)
        r.fail("duplicate comment " + to_string(ac.key()));
      index[ac.key()].push_back(corpus.size());
      corpus.push_back(std::move(ac));
    }
  }

  if (src.spans) {
    tsv::Reader r(*src.spans, src.spans_name);
    r.expect_header({"document", "comment_id", "type", "start", "end"});
    while (auto row = r.row(5)) {
      auto& f = *row;
      const auto key = detail::parse_key(r, f[0], f[1]);
      const auto span = detail::parse_span_fields(r, f[2], f[3], f[4]);
      const auto it = index.find(key);
      if (it == index.end()) r.fail("span refers to unknown comment " + to_string(key));
      const auto len = utf8::length(corpus[it->second.front()].text());
      if (span.start > len || span.end > len)
        r.fail("span [" + std::to_string(span.start) + ", " + std::to_string(span.end) +
               ") exceeds text length " + std::to_string(len) + " of " + to_string(key));
      for (auto i : it->second) corpus[i].spans.push_back(span);
    }
  }
  for (auto& ac : corpus) detail::sort_spans(ac.spans);

  if (src.labels) {
    tsv::Reader r(*src.labels, src.labels_name);
    r.expect_header({"document", "comment_id", "flausch"});
    std::set<CommentKey> labelled;
    while (auto row = r.row(3)) {
      auto& f = *row;
      const auto key = detail::parse_key(r, f[0], f[1]);
      const bool flag = detail::parse_flag(r, f[2]);
      const auto it = index.find(key);
      if (it == index.end()) r.fail("label refers to unknown comment " + to_string(key));
      if (!labelled.insert(key).second) r.fail("duplicate label for " + to_string(key));
      for (auto i : it->second) corpus[i].is_candy = flag;
    }
    for (const auto& ac : corpus)
      if (!labelled.contains(ac.key()))
        throw DataError(src.labels_name + ": no label for comment " + to_string(ac.key()));
  } else {
    for (auto& ac : corpus) ac.is_candy = !ac.spans.empty();
  }
  return corpus;
}

struct CorpusPaths {
  std::string comments;
  std::optional<std::string> labels;
  std::optional<std::string> spans;
};

inline Corpus parse_corpus(const CorpusPaths& paths) {
  auto comments = tsv::open_input(paths.comments);
  std::optional<std::ifstream> labels, spans;
  CorpusSources src{&comments, paths.comments};
  if (paths.labels) {
    labels.emplace(tsv::open_input(*paths.labels));
    src.labels = &*labels;
    src.labels_name = *paths.labels;
  }
  if (paths.spans) {
    spans.emplace(tsv::open_input(*paths.spans));
    src.spans = &*spans;
    src.spans_name = *paths.spans;
  }
  return parse_corpus(src);
}

inline bool has_replicas(const Corpus& corpus) {
  return std::any_of(corpus.begin(), corpus.end(),
                     [](const AnnotatedComment& ac) { return ac.replica != 0; });
}

inline void write_comments(std::ostream& out, const Corpus& corpus) {
  const bool replicas = has_replicas(corpus);
  out << "document\tcomment_id\tcomment" << (replicas ? "\treplica" : "") << '\n';
  for (const auto& ac : corpus) {
    out << tsv::escape(ac.key().document) << '\t' << ac.key().comment_id << '\t'
        << tsv::escape(ac.text());
    if (replicas) out << '\t' << ac.replica;
    out << '\n';
  }
}

// Labels and spans are written once per key, in corpus order.
inline void write_labels(std::ostream& out, const Corpus& corpus) {
  out << "document\tcomment_id\tflausch\n";
  std::set<CommentKey> done;
  for (const auto& ac : corpus)
    if (done.insert(ac.key()).second)
      out << tsv::escape(ac.key().document) << '\t' << ac.key().comment_id << '\t'
          << (ac.is_candy ? "yes" : "no") << '\n';
}

inline void write_spans(std::ostream& out, const Corpus& corpus) {
  out << "document\tcomment_id\ttype\tstart\tend\n";
  std::set<CommentKey> done;
  for (const auto& ac : corpus) {
    if (!done.insert(ac.key()).second) continue;
    for (const auto& s : ac.spans)
      out << tsv::escape(ac.key().document) << '\t' << ac.key().comment_id << '\t'
          << label(s.type) << '\t' << s.start << '\t' << s.end << '\n';
  }
}

inline SpanTable span_table(const Corpus& corpus) {
  SpanTable table;
  for (const auto& ac : corpus)
    if (!ac.spans.empty()) table[ac.key()] = ac.spans;
  return table;
}

inline LabelTable label_table(const Corpus& corpus) {
  LabelTable table;
  for (const auto& ac : corpus) table.emplace(ac.key(), ac.is_candy);
  return table;
}

// ---------------------------------------------------------------- validate

namespace violation_code {
inline constexpr std::string_view empty_text = "EMPTY_TEXT";
inline constexpr std::string_view invalid_utf8 = "INVALID_UTF8";
inline constexpr std::string_view duplicate_key = "DUPLICATE_KEY";
inline constexpr std::string_view empty_span = "EMPTY_SPAN";
inline constexpr std::string_view inverted_span = "INVERTED_SPAN";
inline constexpr std::string_view span_out_of_bounds = "SPAN_OUT_OF_BOUNDS";
inline constexpr std::string_view unsorted_spans = "UNSORTED_SPANS";
inline constexpr std::string_view label_span_mismatch = "LABEL_SPAN_MISMATCH";
}  // namespace violation_code

struct Violation {
  std::string code;
  CommentKey key;
  std::string message;
};

inline nlohmann::ordered_json to_json(const Violation& v) {
  return {{"code", v.code},
          {"document", v.key.document},
          {"comment_id", v.key.comment_id},
          {"message", v.message}};
}

// Every broken Comment / SpanAnnotation / AnnotatedComment invariant, in
// corpus order. An empty result means the corpus is valid.
inline std::vector<Violation> validate(const Corpus& corpus) {
  std::vector<Violation> out;
  auto report = [&](std::string_view code, const CommentKey& key, std::string msg) {
    out.push_back({std::string(code), key, std::move(msg)});
  };
  std::set<std::pair<CommentKey, std::uint32_t>> seen;
  for (const auto& ac : corpus) {
    const auto& key = ac.key();
    if (!seen.emplace(key, ac.replica).second)
      report(violation_code::duplicate_key, key, "duplicate (document, comment_id)");
    const bool valid_text = utf8::is_valid(ac.text());
    if (!valid_text) report(violation_code::invalid_utf8, key, "text is not valid UTF-8");
    if (ac.text().empty()) report(violation_code::empty_text, key, "text is empty");
    const auto len = valid_text ? utf8::length(ac.text()) : ac.text().size();
    for (std::size_t i = 0; i < ac.spans.size(); ++i) {
      const auto& s = ac.spans[i];
      const auto where = "span " + std::to_string(i) + " [" + std::to_string(s.start) + ", " +
                         std::to_string(s.end) + ")";
      if (s.start == s.end)
        report(violation_code::empty_span, key, where + " is empty");
      else if (s.start > s.end)
        report(violation_code::inverted_span, key, where + " has start > end");
      if (s.end > len || s.start > len)
        report(violation_code::span_out_of_bounds, key,
               where + " exceeds text length " + std::to_string(len));
    }
    if (!std::is_sorted(ac.spans.begin(), ac.spans.end()))
      report(violation_code::unsorted_spans, key, "spans are not sorted by (start, end)");
    if (ac.is_candy != !ac.spans.empty())
      report(violation_code::label_span_mismatch, key,
             ac.is_candy ? "labelled candy speech but has no spans"
                         : "labelled non-candy but has " + std::to_string(ac.spans.size()) +
                               " span(s)");
  }
  return out;
}

// ------------------------------------------------------------- deduplicate

struct ConflictGroup {
  std::string text;
  std::vector<CommentKey> keys;  // sorted
};

struct DedupReport {
  // Comments dropped as exact duplicates.
  std::size_t removed_count = 0;
  // Duplicate groups that lost at least one member.
  std::size_t removed_group_count = 0;
  // Same text, different labels; every member was kept.
  std::vector<ConflictGroup> retained_conflicts;

  std::size_t retained_conflict_comment_count() const noexcept {
    std::size_t n = 0;
    for (const auto& g : retained_conflicts) n += g.keys.size();
    return n;
  }
};

// Drops comments whose text, is_candy flag and span multiset match another
// comment's, keeping the smallest (document, comment_id). Texts that occur
// with more than one distinct labelling are retained in full and listed as
// conflicts. Output keeps the input order.
inline std::pair<Corpus, DedupReport> deduplicate(const Corpus& corpus) {
  std::unordered_map<std::string_view, std::vector<std::size_t>> by_text;
  for (std::size_t i = 0; i < corpus.size(); ++i) by_text[corpus[i].text()].push_back(i);

  std::vector<bool> keep(corpus.size(), true);
  DedupReport report;
  auto smaller = [&](std::size_t a, std::size_t b) {
    return std::tie(corpus[a].comment.key, corpus[a].replica) <
           std::tie(corpus[b].comment.key, corpus[b].replica);
  };
  for (auto& [text, members] : by_text) {
    if (members.size() < 2) continue;
    const auto& first = corpus[members.front()];
    const bool same_labels = std::all_of(members.begin(), members.end(), [&](std::size_t i) {
      return corpus[i].is_candy == first.is_candy && corpus[i].spans == first.spans;
    });
    if (same_labels) {
      const auto winner = *std::min_element(members.begin(), members.end(), smaller);
      for (auto i : members)
        if (i != winner) keep[i] = false;
      report.removed_count += members.size() - 1;
      ++report.removed_group_count;
    } else {
      ConflictGroup g{std::string(text), {}};
      for (auto i : members) g.keys.push_back(corpus[i].key());
      std::sort(g.keys.begin(), g.keys.end());
      report.retained_conflicts.push_back(std::move(g));
    }
  }
  std::sort(report.retained_conflicts.begin(), report.retained_conflicts.end(),
            [](const ConflictGroup& a, const ConflictGroup& b) { return a.keys < b.keys; });

  Corpus out;
  out.reserve(corpus.size() - report.removed_count);
  for (std::size_t i = 0; i < corpus.size(); ++i)
    if (keep[i]) out.push_back(corpus[i]);
  return {std::move(out), std::move(report)};
}

// ------------------------------------------------------------------- stats

struct CorpusStats {
  std::size_t comment_count = 0;
  std::size_t candy_comment_count = 0;
  std::size_t span_count = 0;
  Rational mean_spans_per_comment;        // over all comments
  Rational mean_spans_per_candy_comment;  // over comments with is_candy
  std::size_t overlapping_span_count = 0;
  Rational overlapping_span_fraction;
};

constexpr bool overlaps(const SpanAnnotation& a, const SpanAnnotation& b) noexcept {
  return std::max(a.start, b.start) < std::min(a.end, b.end);
}

// Number of spans in `spans` that share a character with at least one other.
inline std::size_t count_overlapping(const std::vector<SpanAnnotation>& spans) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < spans.size(); ++i)
    for (std::size_t j = 0; j < spans.size(); ++j)
      if (i != j && overlaps(spans[i], spans[j])) {
        ++n;
        break;
      }
  return n;
}

inline CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats st;
  std::size_t candy_spans = 0;
  for (const auto& ac : corpus) {
    ++st.comment_count;
    st.span_count += ac.spans.size();
    if (ac.is_candy) {
      ++st.candy_comment_count;
      candy_spans += ac.spans.size();
    }
    st.overlapping_span_count += count_overlapping(ac.spans);
  }
  auto ratio = [](std::size_t a, std::size_t b) {
    return Rational::ratio_or_zero(static_cast<std::int64_t>(a), static_cast<std::int64_t>(b));
  };
  st.mean_spans_per_comment = ratio(st.span_count, st.comment_count);
  st.mean_spans_per_candy_comment = ratio(candy_spans, st.candy_comment_count);
  st.overlapping_span_fraction = ratio(st.overlapping_span_count, st.span_count);
  return st;
}

inline nlohmann::ordered_json to_json(const CorpusStats& st) {
  return {{"comment_count", st.comment_count},
          {"candy_comment_count", st.candy_comment_count},
          {"span_count", st.span_count},
          {"mean_spans_per_comment", st.mean_spans_per_comment.to_fixed(4)},
          {"mean_spans_per_candy_comment", st.mean_spans_per_candy_comment.to_fixed(4)},
          {"overlapping_span_count", st.overlapping_span_count},
          {"overlapping_span_fraction", st.overlapping_span_fraction.to_fixed(4)}};
}

inline nlohmann::ordered_json to_json(const DedupReport& r) {
  nlohmann::ordered_json groups = nlohmann::ordered_json::array();
  for (const auto& g : r.retained_conflicts) {
    nlohmann::ordered_json keys = nlohmann::ordered_json::array();
    for (const auto& k : g.keys) keys.push_back({k.document, k.comment_id});
    groups.push_back({{"text", g.text}, {"comments", keys}});
  }
  return {{"removed_count", r.removed_count},
          {"removed_group_count", r.removed_group_count},
          {"retained_conflict_group_count", r.retained_conflicts.size()},
          {"retained_conflict_comment_count", r.retained_conflict_comment_count()},
          {"retained_conflicts", groups}};
}

}  // namespace candy
