#pragma once

#include <iomanip>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "candy/corpus.hpp"
#include "candy/error.hpp"
#include "candy/rational.hpp"
#include "candy/types.hpp"

namespace candy {

struct Counts {
  std::int64_t true_positives = 0;
  std::int64_t false_positives = 0;
  std::int64_t false_negatives = 0;

  Counts& operator+=(const Counts& o) noexcept {
    true_positives += o.true_positives;
    false_positives += o.false_positives;
    false_negatives += o.false_negatives;
    return *this;
  }
  friend Counts operator+(Counts a, const Counts& b) noexcept { return a += b; }
  friend bool operator==(const Counts&, const Counts&) = default;

  Rational precision() const {
    return Rational::ratio_or_zero(true_positives, true_positives + false_positives);
  }
  Rational recall() const {
    return Rational::ratio_or_zero(true_positives, true_positives + false_negatives);
  }
  // 2PR/(P+R) reduces to 2TP/(2TP+FP+FN); zero when TP is zero.
  Rational f1() const {
    if (true_positives == 0) return Rational(0);
    return Rational(2 * true_positives, 2 * true_positives + false_positives + false_negatives);
  }
};

struct EvalReport {
  Counts overall;
  std::map<CandyType, Counts> per_type;  // empty for binary scoring

  Rational precision() const { return overall.precision(); }
  Rational recall() const { return overall.recall(); }
  Rational f1() const { return overall.f1(); }

  // Merging shard reports is exact, associative and commutative.
  EvalReport& operator+=(const EvalReport& o) {
    overall += o.overall;
    for (const auto& [t, c] : o.per_type) per_type[t] += c;
    return *this;
  }
};

struct SpanScore {
  EvalReport report;
  // Predicted keys not present among the known comments.
  std::vector<CommentKey> unknown_keys;
};

// Strict span scoring: a predicted (start, end, type) triplet is a true
// positive only if the same triplet is in gold for that comment. Identical
// triplets within one comment count once. Counts are summed over the whole
// corpus (micro average). `known` defaults to the gold keys; predictions
// outside it still count as false positives and are listed as unknown.
inline SpanScore strict_span_f1(const SpanTable& gold, const SpanTable& pred,
                                const std::set<CommentKey>* known = nullptr) {
  SpanScore res;
  auto& rep = res.report;
  for (auto t : all_candy_types) rep.per_type[t] = {};

  using Triplet = std::tuple<std::size_t, std::size_t, CandyType>;
  auto as_set = [](const std::vector<SpanAnnotation>& spans) {
    std::set<Triplet> s;
    for (const auto& sp : spans) s.emplace(sp.start, sp.end, sp.type);
    return s;
  };
  static const std::vector<SpanAnnotation> none;

  std::set<CommentKey> keys;
  for (const auto& [k, v] : gold) keys.insert(k);
  for (const auto& [k, v] : pred) {
    keys.insert(k);
    const bool is_known = known ? known->contains(k) : gold.contains(k);
    if (!is_known && !v.empty()) res.unknown_keys.push_back(k);
  }

  for (const auto& key : keys) {
    const auto g_it = gold.find(key);
    const auto p_it = pred.find(key);
    const auto g = as_set(g_it == gold.end() ? none : g_it->second);
    const auto p = as_set(p_it == pred.end() ? none : p_it->second);
    for (const auto& trip : p) {
      auto& c = rep.per_type[std::get<2>(trip)];
      if (g.contains(trip))
        ++c.true_positives;
      else
        ++c.false_positives;
    }
    for (const auto& trip : g)
      if (!p.contains(trip)) ++rep.per_type[std::get<2>(trip)].false_negatives;
  }
  for (const auto& [t, c] : rep.per_type) rep.overall += c;
  return res;
}

// Binary scoring with candy speech as the positive class. Both tables must
// cover the same keys.
inline EvalReport positive_f1(const LabelTable& gold, const LabelTable& pred) {
  for (const auto& [k, v] : gold)
    if (!pred.contains(k)) throw DataError("no prediction for " + to_string(k));
  for (const auto& [k, v] : pred)
    if (!gold.contains(k)) throw DataError("prediction for unknown comment " + to_string(k));
  EvalReport rep;
  for (const auto& [k, g] : gold) {
    const bool p = pred.at(k);
    if (p && g) ++rep.overall.true_positives;
    if (p && !g) ++rep.overall.false_positives;
    if (!p && g) ++rep.overall.false_negatives;
  }
  return rep;
}

// A comment is candy speech iff it has at least one predicted span.
inline LabelTable derive_binary(const SpanTable& pred, const std::vector<CommentKey>& all_keys) {
  LabelTable out;
  for (const auto& k : all_keys) {
    const auto it = pred.find(k);
    out[k] = it != pred.end() && !it->second.empty();
  }
  return out;
}

// -------------------------------------------------------------- rendering

inline nlohmann::ordered_json to_json(const Counts& c, std::string_view scope) {
  return {{"scope", scope},
          {"tp", c.true_positives},
          {"fp", c.false_positives},
          {"fn", c.false_negatives},
          {"precision", c.precision().to_fixed(4)},
          {"recall", c.recall().to_fixed(4)},
          {"f1", c.f1().to_fixed(4)}};
}

// One JSON record per line: "overall" first, then each type in order.
inline void write_report_records(std::ostream& out, const EvalReport& rep) {
  out << to_json(rep.overall, "overall").dump() << '\n';
  for (const auto& [t, c] : rep.per_type) out << to_json(c, identifier(t)).dump() << '\n';
}

inline void write_report_table(std::ostream& out, const EvalReport& rep) {
  auto line = [&](std::string_view scope, const auto& tp, const auto& fp, const auto& fn,
                  std::string_view p, std::string_view r, std::string_view f) {
    out << std::left << std::setw(22) << scope << std::right << std::setw(8) << tp
        << std::setw(8) << fp << std::setw(8) << fn << std::setw(11) << p << std::setw(11) << r
        << std::setw(11) << f << '\n';
  };
  auto row = [&](std::string_view scope, const Counts& c) {
    line(scope, c.true_positives, c.false_positives, c.false_negatives, c.precision().to_fixed(4),
         c.recall().to_fixed(4), c.f1().to_fixed(4));
  };
  line("type", "tp", "fp", "fn", "precision", "recall", "f1");
  for (const auto& [t, c] : rep.per_type) row(identifier(t), c);
  row("overall", rep.overall);
}

}  // namespace candy
