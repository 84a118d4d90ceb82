#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tagmt/corpus.hpp"

namespace tagmt {
namespace analysis {

// Descriptive statistics over an annotated corpus. Shares over the full
// corpus sum to 1; the *_known variants are normalized over gendered pairs
// only.
struct CorpusStats {
  std::size_t total_pairs = 0;
  std::size_t male_pairs = 0;
  std::size_t female_pairs = 0;
  std::size_t unknown_pairs = 0;

  double male_share = 0.0;
  double female_share = 0.0;
  double unknown_share = 0.0;
  double male_share_known = 0.0;
  double female_share_known = 0.0;

  // Decade buckets [lo, lo+10) labelled "50-60"; counts are (male, female)
  // over pairs with both gender and age present.
  std::map<std::string, std::pair<std::size_t, std::size_t>> age_hist;
  std::map<std::string, double> bucket_shares;  // fraction of total_pairs
};

std::string bucket_label(int age, int bucket_width = 10);

CorpusStats gender_distribution(const AnnotatedCorpus& corpus);

std::map<std::string, std::pair<std::size_t, std::size_t>> age_gender_histogram(
    const AnnotatedCorpus& corpus, int bucket_width = 10);

// gender_distribution + age_gender_histogram + bucket shares in one pass.
CorpusStats analyze_corpus(const AnnotatedCorpus& corpus, int bucket_width = 10);

enum class Side { Src, Tgt };

// Token frequency table for one gender: whitespace tokens of the stored
// sentence text, casefolded; ranks are 1-based, ties broken lexicographically.
struct RankTable {
  Gender gender = Gender::Unknown;
  Side side = Side::Tgt;
  std::vector<std::pair<std::string, std::size_t>> ranked;  // count descending

  // 1-based rank; 0 when the token is absent.
  std::size_t rank_of(const std::string& token) const;
  std::size_t total_tokens() const;

 private:
  friend RankTable frequency_rank(const AnnotatedCorpus&, Side, Gender);
  std::unordered_map<std::string, std::size_t> rank_;
};

RankTable frequency_rank(const AnnotatedCorpus& corpus, Side side,
                         Gender gender);

std::string stats_json(const CorpusStats& stats);
// CSV with header bucket,male_pct,female_pct (percentages of total pairs).
std::string histogram_csv(const CorpusStats& stats);

}  // namespace analysis
}  // namespace tagmt
