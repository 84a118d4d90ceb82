#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tagmt/date.hpp"

namespace tagmt {

enum class Gender { Male, Female, Unknown };

const char* gender_code(Gender g);                     // "M", "F", "?"
std::optional<Gender> gender_from_code(std::string_view code);

struct EmptyCorpus : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One MEP identity from the speaker metadata table.
struct SpeakerRecord {
  std::string mep_id;
  std::string name;      // as listed in the table
  std::string name_key;  // normalize_name(name)
  Gender gender = Gender::Unknown;
  std::optional<Date> date_of_birth;
  std::string country;
};

// One aligned sentence pair with its resolved speaker annotation.
struct SentencePair {
  std::size_t id = 0;  // stable identity within a corpus (ingest order)
  std::string src;
  std::string tgt;
  std::string lang_pair;  // e.g. "EN-FR"
  std::optional<Date> session_date;
  std::string speaker_name_raw;
  std::optional<SpeakerRecord> speaker;  // absent if unresolved
  std::optional<int> age_years;

  Gender gender() const { return speaker ? speaker->gender : Gender::Unknown; }
  bool resolved() const { return speaker.has_value(); }
};

struct AnnotatedCorpus {
  std::vector<SentencePair> pairs;
  std::string lang_pair;
  std::map<std::string, std::size_t> provenance;  // source filename -> pairs
  std::size_t unresolved_count = 0;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
  // Recomputes unresolved_count and checks the shared-lang_pair invariant.
  void refresh_counts();
};

// Builds a sub-corpus from a subset of pairs, preserving order and ids.
AnnotatedCorpus subcorpus(const AnnotatedCorpus& corpus,
                          const std::vector<std::size_t>& indices);

// JSONL: one object per pair with fields src, tgt, lang_pair, session_date,
// speaker_name_raw, mep_id, gender, age (the last three may be null).
// Serialization is byte-deterministic (keys sorted, stable number formats).
void write_corpus_jsonl(const AnnotatedCorpus& corpus, std::ostream& out);
std::string corpus_stats_str(const AnnotatedCorpus& corpus);

void save_corpus(const AnnotatedCorpus& corpus,
                 const std::filesystem::path& jsonl_path,
                 const std::filesystem::path& stats_path);

// Loads pairs back from JSONL. Speaker dob/country are not part of the wire
// format, so loaded records carry only mep_id and gender; ids are line
// numbers.
AnnotatedCorpus load_corpus_jsonl(const std::filesystem::path& jsonl_path);

}  // namespace tagmt
