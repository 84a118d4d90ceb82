#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tagmt/corpus.hpp"

namespace tagmt {
namespace dataset {

struct UnknownGender : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CorpusTooSmall : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InsufficientGenderData : std::runtime_error {
  InsufficientGenderData(Gender g, std::size_t shortfall_, std::string msg)
      : std::runtime_error(std::move(msg)), gender(g), shortfall(shortfall_) {}
  Gender gender;
  std::size_t shortfall;
};

// Source-side prefix tags; tag token + single space + original sentence.
struct GenderTagConfig {
  std::string male_token = "MALE";
  std::string female_token = "FEMALE";

  bool valid() const;
  const std::string& token_for(Gender g) const;  // throws UnknownGender
};

struct SplitSpec {
  std::size_t test_size = 2000;
  std::uint64_t seed = 0;
  bool exclude_unknown = true;  // drop unknown-gender pairs before splitting
};

SentencePair apply_gender_tag(const SentencePair& pair,
                              const GenderTagConfig& cfg);

// Uniform sample without replacement of spec.test_size pairs as test; train
// is the complement. Both preserve corpus order; deterministic in the seed.
std::pair<AnnotatedCorpus, AnnotatedCorpus> split_corpus(
    const AnnotatedCorpus& corpus, const SplitSpec& spec);

// Draws a male-only and a female-only test set of `size` pairs each from the
// pool (which must already exclude training data).
std::pair<AnnotatedCorpus, AnnotatedCorpus> build_gender_testsets(
    const AnnotatedCorpus& pool, std::size_t size, std::uint64_t seed);

// Pairs whose source contains any of the pronoun tokens (exact, case
// sensitive, whitespace tokenization). Order preserved.
std::vector<SentencePair> filter_first_person(
    std::span<const SentencePair> pairs, const std::set<std::string>& pronouns);

// Line-aligned UTF-8 bitext, one sentence per line. The tagged variant
// prefixes every source line with the speaker's gender tag.
void emit_bitext(const AnnotatedCorpus& corpus, bool tagged,
                 const GenderTagConfig& cfg,
                 const std::filesystem::path& src_path,
                 const std::filesystem::path& tgt_path);

struct BuildSpec {
  SplitSpec split;                      // general test set
  std::size_t gender_test_size = 2000;  // M and F sets
  // 0 means "whatever the first-person filter yields inside M/F"; a positive
  // size is topped up from the held-out pool or fails with
  // InsufficientGenderData.
  std::size_t first_person_size = 0;
  std::set<std::string> pronouns = {"I"};
  GenderTagConfig tag;
};

// train, the general test set, and the M/F/M1/F1 test sets. All sets are
// pairwise disjoint on pair identity except that M1 may overlap M and F1 may
// overlap F.
struct DatasetBundle {
  AnnotatedCorpus train;
  AnnotatedCorpus general;
  AnnotatedCorpus m;
  AnnotatedCorpus f;
  AnnotatedCorpus m1;
  AnnotatedCorpus f1;
};

DatasetBundle build_datasets(const AnnotatedCorpus& corpus,
                             const BuildSpec& spec);

// Writes {train,test,test.M,test.F,test.M1,test.F1}.{src,tgt} plus
// manifest.json under out_dir.
void emit_datasets(const DatasetBundle& bundle, const BuildSpec& spec,
                   bool tagged, const std::filesystem::path& out_dir);

}  // namespace dataset
}  // namespace tagmt
