#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tagmt/corpus.hpp"  // EmptyCorpus

namespace tagmt {
namespace bpe {

// Merge-operation count used when segmenting the full released corpora;
// desk-scale runs use far fewer.
inline constexpr int kReleaseMergeOperations = 89500;

// The last character of each word carries an end-of-word suffix during
// learning and application, so merges distinguish word-final from word-inner
// positions.
inline constexpr const char* kEndOfWord = "</w>";

struct DanglingMarker : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BpeFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BpeModel {
  std::vector<std::pair<std::string, std::string>> merges;  // learned order
  std::string continuation_marker = "@@";
  std::set<std::string> protected_tokens;
  int version = 1;

  std::size_t num_merges() const { return merges.size(); }
};

// Learns `num_merges` merge rules. Words are whitespace tokens split into
// UTF-8 characters (the last one fused with kEndOfWord); each step merges the
// most frequent adjacent pair, ties broken by lexicographically smallest
// pair. Learning stops early once no pair occurs at least twice. Protected
// tokens are excluded from the word census.
BpeModel learn_bpe(std::span<const std::string> corpus_lines,
                   std::size_t num_merges,
                   std::set<std::string> protected_tokens = {});

// Re-applies the merges to each whitespace token of `line`; non-final
// subwords carry the continuation marker suffix. Protected tokens are copied
// verbatim. Output tokens are joined with single spaces.
std::string apply_bpe(const BpeModel& model, std::string_view line);

// Caches per-word segmentations; use for whole corpora.
class BpeApplier {
 public:
  explicit BpeApplier(const BpeModel& model);
  std::string apply(std::string_view line);

 private:
  struct PairHash {
    std::size_t operator()(const std::pair<std::string, std::string>& p) const;
  };
  std::vector<std::string> segment(const std::string& word);

  const BpeModel& model_;
  std::unordered_map<std::pair<std::string, std::string>, std::size_t, PairHash>
      rank_;
  std::unordered_map<std::string, std::vector<std::string>> cache_;
};

// Inverse of apply_bpe for its output conventions: joins marker-suffixed
// subwords with their successor. A line ending in a continuation marker is a
// DanglingMarker error.
std::string undo_bpe(std::string_view line, std::string_view marker = "@@");

// Merge file: "#version: 1" header then one "left right" pair per line;
// protected tokens and the marker go to <codes>.meta.json. Save/load is
// byte-exact.
void save_bpe(const BpeModel& model, const std::filesystem::path& codes_path);
BpeModel load_bpe(const std::filesystem::path& codes_path);

}  // namespace bpe
}  // namespace tagmt
