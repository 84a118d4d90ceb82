#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "tagmt/corpus.hpp"

namespace tagmt {
namespace europarl {

// Session files are Europarl-release plain text: <CHAPTER ...>, <SPEAKER ...>
// and <P> markup lines interleaved with one sentence per text line. Any other
// markup line is treated as malformed and the whole file is rejected.

struct MalformedMarkup : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnparseableFilename : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AgeOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SpeakerTableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One speaker-scoped block. Paragraphs keep their sentences newline-separated
// in document order. Content preceding any SPEAKER marker (and content after
// a CHAPTER marker until the next SPEAKER) carries an empty speaker name.
struct SpeakerBlock {
  std::string speaker_name_raw;
  std::vector<std::string> paragraphs;
};

std::vector<SpeakerBlock> parse_session_file(std::string_view raw_text,
                                             const std::string& filename);

// Filenames follow ep-YY-MM-DD with an optional extension; two-digit years
// 96-99 mean 1996-1999 and 00-11 mean 2000-2011.
Date parse_session_date(const std::string& filename);
std::optional<Date> try_parse_session_date(const std::string& filename);

inline constexpr int kMinAge = 15;
inline constexpr int kMaxAge = 110;

// Whole completed years at the session date. Throws AgeOutOfRange when the
// result falls outside [kMinAge, kMaxAge] (treated as a metadata error).
int compute_age(const Date& dob, const Date& session_date);

struct ResolveOptions {
  bool enable_fuzzy = false;
  std::size_t max_distance = 2;
};

// Speaker metadata table indexed by unique name_key. Records whose name_key
// collides are dropped at build time (with a diagnostic): a wrong identity is
// worse than an unresolved one.
class SpeakerTable {
 public:
  static SpeakerTable build(std::vector<SpeakerRecord> records,
                            std::ostream* diag = nullptr);

  const SpeakerRecord* find_exact(const std::string& name_key) const;
  // The unique record within `max_distance` of name_key, nullptr when none
  // or more than one candidate exists.
  const SpeakerRecord* find_fuzzy(const std::string& name_key,
                                  std::size_t max_distance) const;

  std::size_t size() const { return records_.size(); }
  const std::vector<SpeakerRecord>& records() const { return records_; }

 private:
  std::vector<SpeakerRecord> records_;
  std::unordered_map<std::string, std::size_t> by_key_;
};

// TSV with header: mep_id\tname\tgender\tdate_of_birth\tcountry.
// gender is M, F or ?; date_of_birth is ISO-8601 or empty.
std::vector<SpeakerRecord> load_speaker_records(
    const std::filesystem::path& tsv_path, std::ostream* diag = nullptr);
SpeakerTable load_speaker_table(const std::filesystem::path& tsv_path,
                                std::ostream* diag = nullptr);

const SpeakerRecord* resolve_speaker(const std::string& speaker_name_raw,
                                     const SpeakerTable& table,
                                     const ResolveOptions& opts = {});

struct SessionFile {
  std::string filename;  // basename, used for dates and provenance
  std::string text;
};

struct IngestOptions {
  ResolveOptions resolve;
  std::ostream* diagnostics = nullptr;
};

// Aligns two parallel session-file sets block by block and sentence by
// sentence. Blocks whose sentence counts disagree are dropped with a
// diagnostic; files with malformed markup are skipped entirely. Pairs with
// unresolved speakers or unknown gender are kept and flagged.
AnnotatedCorpus annotate_corpus(std::span<const SessionFile> src_files,
                                std::span<const SessionFile> tgt_files,
                                const SpeakerTable& table,
                                const std::string& lang_pair,
                                const IngestOptions& opts = {});

// Convenience wrapper: reads every regular file in the two directories.
AnnotatedCorpus annotate_corpus_dirs(const std::filesystem::path& src_dir,
                                     const std::filesystem::path& tgt_dir,
                                     const SpeakerTable& table,
                                     const std::string& lang_pair,
                                     const IngestOptions& opts = {});

}  // namespace europarl
}  // namespace tagmt
