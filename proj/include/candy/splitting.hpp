#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "candy/corpus.hpp"
#include "candy/error.hpp"
#include "candy/rng.hpp"
#include "candy/types.hpp"

namespace candy {

enum class StratifyMode { binary, first_span_type };

inline std::string_view to_string(StratifyMode m) noexcept {
  return m == StratifyMode::binary ? "binary" : "first_span_type";
}

inline std::optional<StratifyMode> parse_stratify_mode(std::string_view s) noexcept {
  if (s == "binary") return StratifyMode::binary;
  if (s == "first_span_type") return StratifyMode::first_span_type;
  return std::nullopt;
}

struct StratumKey {
  StratifyMode mode = StratifyMode::binary;
  std::string value;  // yes/no, or a candy type identifier / "none"

  friend auto operator<=>(const StratumKey&, const StratumKey&) = default;
  friend bool operator==(const StratumKey&, const StratumKey&) = default;
};

inline StratumKey stratum_key(const AnnotatedComment& ac, StratifyMode mode) {
  if (mode == StratifyMode::binary) return {mode, ac.is_candy ? "yes" : "no"};
  if (ac.spans.empty()) return {mode, "none"};
  const auto first = std::min_element(
      ac.spans.begin(), ac.spans.end(), [](const SpanAnnotation& a, const SpanAnnotation& b) {
        return std::pair(a.start, a.end) < std::pair(b.start, b.end);
      });
  return {mode, std::string(identifier(first->type))};
}

struct FoldAssignment {
  std::size_t fold_count = 0;
  std::map<CommentKey, std::size_t> assignment;

  std::size_t fold_of(const CommentKey& key) const { return assignment.at(key); }

  // Members of `fold` (test side) and the rest (train side), in corpus order.
  std::pair<Corpus, Corpus> split(const Corpus& corpus, std::size_t fold) const {
    std::pair<Corpus, Corpus> out;
    for (const auto& ac : corpus)
      (fold_of(ac.key()) == fold ? out.second : out.first).push_back(ac);
    return out;
  }
};

inline void write_folds(std::ostream& out, const FoldAssignment& folds) {
  out << "document\tcomment_id\tfold\n";
  for (const auto& [key, fold] : folds.assignment)
    out << tsv::escape(key.document) << '\t' << key.comment_id << '\t' << fold << '\n';
}

inline FoldAssignment read_folds(std::istream& in, const std::string& name) {
  tsv::Reader r(in, name);
  r.expect_header({"document", "comment_id", "fold"});
  FoldAssignment folds;
  while (auto row = r.row(3)) {
    auto& f = *row;
    auto key = detail::parse_key(r, f[0], f[1]);
    const auto fold = tsv::parse_uint<std::size_t>(f[2]);
    if (!fold) r.fail("fold '" + std::string(f[2]) + "' is not a non-negative integer");
    if (!folds.assignment.emplace(key, *fold).second) r.fail("duplicate row for " + to_string(key));
    folds.fold_count = std::max(folds.fold_count, *fold + 1);
  }
  return folds;
}

namespace detail {

// Corpus indices grouped by stratum value; each group is ordered by key and
// then shuffled with a stream derived from (seed, stratum value), so the
// result does not depend on input order.
inline std::map<std::string, std::vector<std::size_t>> shuffled_strata(const Corpus& corpus,
                                                                       StratifyMode mode,
                                                                       std::uint64_t seed) {
  std::map<std::string, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    strata[stratum_key(corpus[i], mode).value].push_back(i);
  for (auto& [value, members] : strata) {
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      return std::tie(corpus[a].comment.key, corpus[a].replica) <
             std::tie(corpus[b].comment.key, corpus[b].replica);
    });
    auto rng = derive_stream(seed, value);
    shuffle(std::span<std::size_t>(members), rng);
  }
  return strata;
}

inline void require_unique_keys(const Corpus& corpus, std::string_view op) {
  std::set<CommentKey> seen;
  for (const auto& ac : corpus)
    if (!seen.insert(ac.key()).second)
      throw UsageError(std::string(op) + ": duplicate key " + to_string(ac.key()) +
                       " (oversampled corpora cannot be split)");
}

}  // namespace detail

// Stratified k-fold assignment. Each stratum is shuffled, then dealt
// round-robin; the dealing position carries over from one stratum to the
// next so fold sizes stay within one of each other overall as well.
inline FoldAssignment make_folds(const Corpus& corpus, std::size_t k, StratifyMode mode,
                                 std::uint64_t seed) {
  if (k < 2) throw UsageError("make_folds: k must be at least 2");
  if (k > corpus.size())
    throw UsageError("make_folds: k = " + std::to_string(k) + " exceeds corpus size " +
                     std::to_string(corpus.size()));
  detail::require_unique_keys(corpus, "make_folds");

  FoldAssignment folds{k, {}};
  std::size_t next = 0;
  for (const auto& [value, members] : detail::shuffled_strata(corpus, mode, seed)) {
    for (auto i : members) {
      folds.assignment.emplace(corpus[i].key(), next);
      next = (next + 1) % k;
    }
  }
  return folds;
}

struct HoldoutSplit {
  Corpus train;
  Corpus holdout;
};

// Stratified holdout of round(fraction * n) comments. Per-stratum quotas use
// largest remainders; a stratum with two or more members always keeps at
// least one in train.
inline HoldoutSplit holdout_split(const Corpus& corpus, double fraction, StratifyMode mode,
                                  std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw UsageError("holdout_split: fraction must lie in (0, 1)");
  const auto n = corpus.size();
  const auto target = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (target < 1 || target + 1 > n)
    throw UsageError("holdout_split: fraction " + std::to_string(fraction) + " of " +
                     std::to_string(n) + " comments leaves an empty side");
  detail::require_unique_keys(corpus, "holdout_split");

  const auto strata = detail::shuffled_strata(corpus, mode, seed);
  struct Quota {
    const std::vector<std::size_t>* members;
    std::size_t take;
    std::size_t cap;
    double remainder;
    std::size_t order;
  };
  std::vector<Quota> quotas;
  std::size_t assigned = 0;
  for (const auto& [value, members] : strata) {
    const double exact = fraction * static_cast<double>(members.size());
    const auto cap = members.size() >= 2 ? members.size() - 1 : members.size();
    const auto floor = std::min(static_cast<std::size_t>(exact), cap);
    quotas.push_back({&members, floor, cap, exact - static_cast<double>(floor), quotas.size()});
    assigned += floor;
  }
  // Hand out the remaining slots by descending remainder, ties to the
  // stratum that sorts first; repeat while capacity remains.
  std::vector<Quota*> order;
  for (auto& q : quotas) order.push_back(&q);
  std::stable_sort(order.begin(), order.end(),
                   [](const Quota* a, const Quota* b) { return a->remainder > b->remainder; });
  while (assigned < target) {
    bool progressed = false;
    for (auto* q : order) {
      if (assigned == target) break;
      if (q->take < q->cap) {
        ++q->take;
        ++assigned;
        progressed = true;
      }
    }
    if (!progressed)
      throw UsageError("holdout_split: cannot hold out " + std::to_string(target) +
                       " comments while keeping every stratum in train");
  }

  std::vector<bool> held(n, false);
  for (const auto& q : quotas)
    for (std::size_t j = 0; j < q.take; ++j) held[(*q.members)[j]] = true;
  HoldoutSplit out;
  for (std::size_t i = 0; i < n; ++i) (held[i] ? out.holdout : out.train).push_back(corpus[i]);
  return out;
}

// Adds candy comments drawn uniformly with replacement until both classes
// have the same size. Replicas are appended after all originals and carry
// replica ordinals 1, 2, ... per source comment.
inline Corpus oversample_binary(const Corpus& corpus, std::uint64_t seed) {
  std::vector<std::size_t> candy;
  std::size_t non_candy = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus[i].is_candy)
      candy.push_back(i);
    else
      ++non_candy;
  }
  if (candy.empty() || non_candy == 0)
    throw UsageError("oversample_binary: both classes must be present");
  if (candy.size() >= non_candy) return corpus;

  std::sort(candy.begin(), candy.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(corpus[a].comment.key, corpus[a].replica) <
           std::tie(corpus[b].comment.key, corpus[b].replica);
  });
  std::map<CommentKey, std::uint32_t> max_replica;
  for (const auto& ac : corpus) {
    auto& m = max_replica[ac.key()];
    m = std::max(m, ac.replica);
  }

  Corpus out = corpus;
  auto rng = derive_stream(seed, "oversample");
  for (std::size_t draws = non_candy - candy.size(); draws > 0; --draws) {
    const auto& src = corpus[candy[rng.below(candy.size())]];
    AnnotatedComment copy = src;
    copy.replica = ++max_replica[src.key()];
    out.push_back(std::move(copy));
  }
  return out;
}

}  // namespace candy
