#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "candy/biocodec.hpp"
#include "candy/corpus.hpp"
#include "candy/error.hpp"
#include "candy/interchange.hpp"
#include "candy/metrics.hpp"
#include "candy/splitting.hpp"

namespace candy::cli {

enum ExitCode : int { ok = 0, data_error = 1, usage_error = 2 };

struct RunConfig {
  std::uint64_t seed = 42;
  std::size_t fold_count = 5;
  double holdout_fraction = 0.10;
  StratifyMode stratify_mode = StratifyMode::binary;
  Postprocessing postprocessing = Postprocessing::basic;
};

inline nlohmann::ordered_json to_json(const RunConfig& c, std::string_view command) {
  return {{"command", command},
          {"seed", c.seed},
          {"fold_count", c.fold_count},
          {"holdout_fraction", c.holdout_fraction},
          {"stratify_mode", to_string(c.stratify_mode)},
          {"postprocessing", to_string(c.postprocessing)}};
}

namespace detail {

struct Flags {
  std::string comments, labels, spans, pred, gold, tokens, mode, out;
  std::optional<double> fraction;
  RunConfig config;
};

// Writes to --out when given, otherwise to the caller's stream.
class Output {
public:
  Output(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) file_.emplace(tsv::open_output(path));
    stream_ = file_ ? &*file_ : &fallback;
  }
  std::ostream& operator*() { return *stream_; }
  bool is_file() const { return file_.has_value(); }
  void finish(const std::string& path) {
    stream_->flush();
    if (!*stream_) throw DataError("failed writing " + (path.empty() ? "output" : path));
  }

private:
  std::optional<std::ofstream> file_;
  std::ostream* stream_;
};

inline Corpus load_corpus(const Flags& f) {
  CorpusPaths paths{f.comments, {}, {}};
  if (!f.labels.empty()) paths.labels = f.labels;
  if (!f.spans.empty()) paths.spans = f.spans;
  return parse_corpus(paths);
}

inline SpanTable load_spans(const std::string& path) {
  auto in = tsv::open_input(path);
  return read_span_table(in, path);
}

inline LabelTable load_labels(const std::string& path) {
  auto in = tsv::open_input(path);
  return read_label_table(in, path);
}

inline std::vector<TaggedSequence> load_interchange(const std::string& path, bool require_tags) {
  auto in = tsv::open_input(path);
  return read_interchange(in, path, require_tags);
}

inline void write_corpus_dir(const std::filesystem::path& dir, const Corpus& corpus) {
  std::filesystem::create_directories(dir);
  auto c = tsv::open_output((dir / "comments.tsv").string());
  auto l = tsv::open_output((dir / "labels.tsv").string());
  auto s = tsv::open_output((dir / "spans.tsv").string());
  write_comments(c, corpus);
  write_labels(l, corpus);
  write_spans(s, corpus);
  if (!c || !l || !s) throw DataError("failed writing corpus to " + dir.string());
}

}  // namespace detail

// Runs one subcommand. `args` excludes the program name. Returns 0 on
// success, 1 on data errors and 2 on usage errors.
inline int run_command(const std::vector<std::string>& args, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
  detail::Flags f;
  CLI::App app{"Candy-speech span toolkit: corpus checks, splits, BIO coding and scoring",
               "candy"};
  app.require_subcommand(1);

  auto corpus_opts = [&](CLI::App* sub, bool require_spans = false) {
    sub->add_option("--comments", f.comments, "comments TSV")->required();
    sub->add_option("--labels", f.labels, "labels TSV (document, comment_id, flausch)");
    auto* spans = sub->add_option("--spans", f.spans, "spans TSV");
    if (require_spans) spans->required();
  };
  auto out_opt = [&](CLI::App* sub, const char* what) { sub->add_option("--out", f.out, what); };

  auto* validate = app.add_subcommand("validate", "Report invariant violations as JSON lines");
  corpus_opts(validate);
  out_opt(validate, "violations file (default: stdout)");

  auto* dedup = app.add_subcommand("dedup", "Remove duplicate comments with identical labels");
  corpus_opts(dedup);
  dedup->add_option("--out", f.out, "output directory for comments/labels/spans TSV")->required();

  auto* stats = app.add_subcommand("stats", "Corpus statistics as a JSON record");
  corpus_opts(stats);
  out_opt(stats, "output file (default: stdout)");

  auto* split = app.add_subcommand("split", "Stratified folds, or a holdout with --fraction");
  corpus_opts(split);
  split->add_option("--k", f.config.fold_count, "number of folds")->capture_default_str();
  split->add_option("--fraction", f.fraction, "hold out this fraction instead of making folds");
  split->add_option("--mode", f.mode, "stratify by: binary | first_span_type");
  split->add_option("--seed", f.config.seed, "random seed")->capture_default_str();
  out_opt(split, "assignment TSV (default: stdout)");

  auto* oversample = app.add_subcommand("oversample", "Oversample candy comments to 1:1");
  corpus_opts(oversample);
  oversample->add_option("--seed", f.config.seed, "random seed")->capture_default_str();
  oversample->add_option("--out", f.out, "output directory")->required();

  auto* encode = app.add_subcommand("encode", "Attach BIO tags to tokenized comments");
  corpus_opts(encode, true);
  encode->add_option("--tokens", f.tokens, "interchange file with token offsets")->required();
  out_opt(encode, "interchange output (default: stdout)");

  auto* decode = app.add_subcommand("decode", "Turn predicted BIO tags into spans TSV");
  decode->add_option("--tokens", f.tokens, "interchange file with predicted tags")->required();
  decode->add_option("--mode", f.mode, "postprocessing: basic | extended");
  out_opt(decode, "spans TSV (default: stdout)");

  auto* score_spans = app.add_subcommand("score-spans", "Strict span precision/recall/F1");
  score_spans->add_option("--gold", f.gold, "gold spans TSV")->required();
  score_spans->add_option("--pred", f.pred, "predicted spans TSV")->required();
  score_spans->add_option("--comments", f.comments, "comments TSV defining the known keys");
  out_opt(score_spans, "report records (default: stdout)");

  auto* score_binary = app.add_subcommand("score-binary", "Positive-class F1 on binary labels");
  score_binary->add_option("--gold", f.gold, "gold labels TSV")->required();
  score_binary->add_option("--pred", f.pred, "predicted labels TSV")->required();
  out_opt(score_binary, "report records (default: stdout)");

  auto* derive = app.add_subcommand("derive-binary", "Binary labels from predicted spans");
  derive->add_option("--pred", f.pred, "predicted spans TSV")->required();
  auto* keys_comments = derive->add_option("--comments", f.comments, "comments TSV with all keys");
  auto* keys_tokens = derive->add_option("--tokens", f.tokens, "interchange file with all keys");
  keys_comments->excludes(keys_tokens);
  out_opt(derive, "labels TSV (default: stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage_error;
  }

  auto* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();

  try {
    if (!f.mode.empty()) {
      if (sub == split) {
        const auto m = parse_stratify_mode(f.mode);
        if (!m) throw UsageError("--mode must be binary or first_span_type");
        f.config.stratify_mode = *m;
      } else if (sub == decode) {
        const auto m = parse_postprocessing(f.mode);
        if (!m) throw UsageError("--mode must be basic or extended");
        f.config.postprocessing = *m;
      }
    }
    if (f.fraction) f.config.holdout_fraction = *f.fraction;
    if (sub == derive && f.comments.empty() && f.tokens.empty())
      throw UsageError("derive-binary needs --comments or --tokens to enumerate comments");

    err << "config: " << to_json(f.config, command).dump() << '\n';

    if (sub == validate) {
      const auto corpus = detail::load_corpus(f);
      const auto violations = candy::validate(corpus);
      detail::Output o(f.out, out);
      for (const auto& v : violations) *o << candy::to_json(v).dump() << '\n';
      o.finish(f.out);
      err << corpus.size() << " comments, " << violations.size() << " violation(s)\n";
      return violations.empty() ? ok : data_error;
    }

    if (sub == dedup) {
      const auto [kept, report] = deduplicate(detail::load_corpus(f));
      detail::write_corpus_dir(f.out, kept);
      out << candy::to_json(report).dump() << '\n';
      return ok;
    }

    if (sub == stats) {
      const auto st = corpus_stats(detail::load_corpus(f));
      detail::Output o(f.out, out);
      *o << candy::to_json(st).dump() << '\n';
      o.finish(f.out);
      return ok;
    }

    if (sub == split) {
      const auto corpus = detail::load_corpus(f);
      detail::Output o(f.out, out);
      if (f.fraction) {
        const auto parts =
            holdout_split(corpus, *f.fraction, f.config.stratify_mode, f.config.seed);
        std::map<CommentKey, bool> held;
        for (const auto& ac : parts.train) held[ac.key()] = false;
        for (const auto& ac : parts.holdout) held[ac.key()] = true;
        *o << "document\tcomment_id\tpartition\n";
        for (const auto& [key, h] : held)
          *o << tsv::escape(key.document) << '\t' << key.comment_id << '\t'
             << (h ? "holdout" : "train") << '\n';
      } else {
        write_folds(*o, make_folds(corpus, f.config.fold_count, f.config.stratify_mode,
                                   f.config.seed));
      }
      o.finish(f.out);
      return ok;
    }

    if (sub == oversample) {
      const auto corpus = oversample_binary(detail::load_corpus(f), f.config.seed);
      detail::write_corpus_dir(f.out, corpus);
      return ok;
    }

    if (sub == encode) {
      const auto corpus = detail::load_corpus(f);
      std::map<CommentKey, const AnnotatedComment*> by_key;
      for (const auto& ac : corpus) by_key.emplace(ac.key(), &ac);
      auto records = detail::load_interchange(f.tokens, false);
      for (auto& rec : records) {
        const auto it = by_key.find(rec.key);
        if (it == by_key.end())
          throw DataError(f.tokens + ": no comment for " + to_string(rec.key));
        Encoding enc;
        try {
          enc = encode_bio(it->second->text(), it->second->spans, rec.tokens);
        } catch (const DataError& e) {
          throw DataError(f.tokens + ": " + to_string(rec.key) + ": " + e.what());
        }
        rec.tags = std::move(enc.tags);
        for (auto i : enc.dropped) {
          const auto& s = it->second->spans[i];
          err << candy::to_json(Violation{"DROPPED_SPAN", rec.key,
                                          "span " + std::to_string(i) + " [" +
                                              std::to_string(s.start) + ", " +
                                              std::to_string(s.end) + ", " +
                                              std::string(label(s.type)) +
                                              ") has no token of its own"})
                     .dump()
              << '\n';
        }
      }
      detail::Output o(f.out, out);
      write_interchange(*o, records);
      o.finish(f.out);
      return ok;
    }

    if (sub == decode) {
      const auto records = detail::load_interchange(f.tokens, true);
      SpanTable table;
      for (const auto& rec : records) {
        auto spans = candy::decode(rec, f.config.postprocessing);
        if (!spans.empty()) table[rec.key] = std::move(spans);
      }
      detail::Output o(f.out, out);
      write_span_table(*o, table);
      o.finish(f.out);
      return ok;
    }

    auto emit_report = [&](const EvalReport& rep) {
      detail::Output o(f.out, out);
      write_report_records(*o, rep);
      o.finish(f.out);
      write_report_table(o.is_file() ? out : err, rep);
    };

    if (sub == score_spans) {
      const auto gold = detail::load_spans(f.gold);
      const auto pred = detail::load_spans(f.pred);
      std::optional<std::set<CommentKey>> known;
      if (!f.comments.empty()) {
        known.emplace();
        for (const auto& ac : detail::load_corpus(f)) known->insert(ac.key());
      }
      const auto score = strict_span_f1(gold, pred, known ? &*known : nullptr);
      for (const auto& k : score.unknown_keys)
        err << "warning: prediction for unknown comment " << to_string(k)
            << " counted as false positive\n";
      emit_report(score.report);
      return ok;
    }

    if (sub == score_binary) {
      emit_report(positive_f1(detail::load_labels(f.gold), detail::load_labels(f.pred)));
      return ok;
    }

    if (sub == derive) {
      std::vector<CommentKey> keys;
      if (!f.comments.empty()) {
        for (const auto& ac : detail::load_corpus(f)) keys.push_back(ac.key());
      } else {
        for (const auto& rec : detail::load_interchange(f.tokens, false)) keys.push_back(rec.key);
      }
      detail::Output o(f.out, out);
      write_label_table(*o, derive_binary(detail::load_spans(f.pred), keys));
      o.finish(f.out);
      return ok;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return usage_error;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return data_error;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return data_error;
  }
  return usage_error;
}

}  // namespace candy::cli
