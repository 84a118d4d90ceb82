#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tagmt/corpus.hpp"

namespace tagmt {
namespace toylang {

// One adjective whose target form inflects with speaker gender.
struct AdjEntry {
  std::string src;
  std::string tgt_masc;
  std::string tgt_fem;
};

// First-person templates: source prefix and its fixed target translation; the
// inflected adjective is appended as the final token on both sides.
struct Template {
  std::string src_prefix;
  std::string tgt_prefix;
};

// 24 adjectives with distinct masculine/feminine target forms.
std::vector<AdjEntry> default_lexicon();
std::vector<Template> default_templates();

struct ToyLanguageSpec {
  std::vector<AdjEntry> lexicon = default_lexicon();
  std::vector<Template> templates = default_templates();
  double gender_balance = 0.5;  // probability of a male speaker
  std::size_t size = 5000;
  std::uint64_t seed = 0;

  bool valid() const;
};

// Synthetic speaker-annotated corpus: the source never carries gender
// information, the target's final token inflects with the sampled speaker
// gender.
AnnotatedCorpus gen_toy_language(const ToyLanguageSpec& spec);

}  // namespace toylang
}  // namespace tagmt
