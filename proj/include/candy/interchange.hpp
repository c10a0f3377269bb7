#pragma once

#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "candy/biocodec.hpp"
#include "candy/error.hpp"

namespace candy {

// One JSON object per line:
//   {"document": "...", "comment_id": 7, "tokens": [[0, 5, false], ...],
//    "tags": ["B-gratitude", ...]}
// Tags are registry names; unknown names are rejected. A record may omit
// "tags" only when the reader is asked for tokens alone.
inline nlohmann::ordered_json to_json(const TaggedSequence& seq) {
  nlohmann::ordered_json tokens = nlohmann::ordered_json::array();
  for (const auto& t : seq.tokens) tokens.push_back({t.start, t.end, t.is_word_continuation});
  nlohmann::ordered_json tags = nlohmann::ordered_json::array();
  for (const auto& t : seq.tags) tags.push_back(tag_name(t));
  return {{"document", seq.key.document},
          {"comment_id", seq.key.comment_id},
          {"tokens", std::move(tokens)},
          {"tags", std::move(tags)}};
}

inline void write_interchange(std::ostream& out, const std::vector<TaggedSequence>& records) {
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

inline TaggedSequence parse_interchange_record(const nlohmann::json& j, bool require_tags) {
  if (!j.is_object()) throw DataError("record is not a JSON object");
  TaggedSequence seq;
  const auto& doc = j.at("document");
  const auto& id = j.at("comment_id");
  if (!doc.is_string()) throw DataError("document must be a string");
  if (!id.is_number_unsigned()) throw DataError("comment_id must be a non-negative integer");
  seq.key = {doc.get<std::string>(), id.get<std::uint64_t>()};

  const auto& tokens = j.at("tokens");
  if (!tokens.is_array()) throw DataError("tokens must be an array");
  for (const auto& t : tokens) {
    if (!t.is_array() || t.size() != 3 || !t[0].is_number_unsigned() ||
        !t[1].is_number_unsigned() || !t[2].is_boolean())
      throw DataError("token entries must be [start, end, is_word_continuation]");
    seq.tokens.push_back({t[0].get<std::size_t>(), t[1].get<std::size_t>(), t[2].get<bool>()});
  }
  check_tokens(seq.tokens);

  const auto tags = j.find("tags");
  if (tags == j.end()) {
    if (require_tags) throw DataError("missing tags");
    return seq;
  }
  if (!tags->is_array()) throw DataError("tags must be an array");
  for (const auto& t : *tags) {
    if (!t.is_string()) throw DataError("tag names must be strings");
    const auto tag = parse_tag(t.get<std::string>());
    if (!tag) throw DataError("unknown tag name '" + t.get<std::string>() + "'");
    seq.tags.push_back(*tag);
  }
  if (seq.tags.size() != seq.tokens.size())
    throw DataError("tag count " + std::to_string(seq.tags.size()) + " differs from token count " +
                    std::to_string(seq.tokens.size()));
  return seq;
}

inline std::vector<TaggedSequence> read_interchange(std::istream& in, const std::string& name,
                                                    bool require_tags = true) {
  std::vector<TaggedSequence> out;
  std::string line;
  std::size_t line_no = 0;
  std::set<CommentKey> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto seq = parse_interchange_record(nlohmann::json::parse(line), require_tags);
      if (!seen.insert(seq.key).second) throw DataError("duplicate record for " + to_string(seq.key));
      out.push_back(std::move(seq));
    } catch (const DataError& e) {
      throw DataError(name, line_no, e.what());
    } catch (const nlohmann::json::exception& e) {
      throw DataError(name, line_no, e.what());
    }
  }
  return out;
}

}  // namespace candy
