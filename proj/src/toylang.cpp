#include "tagmt/toylang.hpp"

#include "tagmt/rng.hpp"

namespace tagmt {
namespace toylang {

std::vector<AdjEntry> default_lexicon() {
  return {
      {"happy", "heureux", "heureuse"},
      {"proud", "fier", "fiere"},
      {"tired", "fatigue", "fatiguee"},
      {"surprised", "surpris", "surprise"},
      {"delighted", "ravi", "ravie"},
      {"certain", "certain", "certaine"},
      {"disappointed", "decu", "decue"},
      {"worried", "inquiet", "inquiete"},
      {"ready", "pret", "prete"},
      {"alone", "seul", "seule"},
      {"grateful", "reconnaissant", "reconnaissante"},
      {"attentive", "attentif", "attentive"},
      {"serious", "serieux", "serieuse"},
      {"new", "nouveau", "nouvelle"},
      {"old", "vieux", "vieille"},
      {"frank", "franc", "franche"},
      {"jealous", "jaloux", "jalouse"},
      {"naive", "naif", "naive"},
      {"fresh", "frais", "fraiche"},
      {"kind", "gentil", "gentille"},
      {"cautious", "prudent", "prudente"},
      {"strong", "fort", "forte"},
      {"cold", "froid", "froide"},
      {"pleased", "content", "contente"},
  };
}

std::vector<Template> default_templates() {
  return {
      {"i am", "je suis"},
      {"i was", "je fus"},
      {"i seem", "je semble"},
      {"i remain", "je reste"},
  };
}

bool ToyLanguageSpec::valid() const {
  if (lexicon.empty() || templates.empty() || size == 0) return false;
  if (gender_balance < 0.0 || gender_balance > 1.0) return false;
  for (const auto& adj : lexicon) {
    if (adj.tgt_masc == adj.tgt_fem) return false;
  }
  return true;
}

AnnotatedCorpus gen_toy_language(const ToyLanguageSpec& spec) {
  if (!spec.valid()) {
    throw std::invalid_argument("invalid toy language spec");
  }
  static const SpeakerRecord kMale{"toy-m", "Toy Speaker (male)",
                                   "toy speaker male", Gender::Male,
                                   std::nullopt, ""};
  static const SpeakerRecord kFemale{"toy-f", "Toy Speaker (female)",
                                     "toy speaker female", Gender::Female,
                                     std::nullopt, ""};
  Rng rng(spec.seed);
  AnnotatedCorpus corpus;
  corpus.lang_pair = "EN-TOY";
  corpus.pairs.reserve(spec.size);
  for (std::size_t i = 0; i < spec.size; ++i) {
    const auto& tpl =
        spec.templates[static_cast<std::size_t>(rng.below(spec.templates.size()))];
    const auto& adj =
        spec.lexicon[static_cast<std::size_t>(rng.below(spec.lexicon.size()))];
    const bool male = rng.unit() < spec.gender_balance;
    SentencePair pair;
    pair.id = i;
    pair.src = tpl.src_prefix + " " + adj.src;
    pair.tgt = tpl.tgt_prefix + " " + (male ? adj.tgt_masc : adj.tgt_fem);
    pair.lang_pair = corpus.lang_pair;
    pair.speaker_name_raw = male ? kMale.name : kFemale.name;
    pair.speaker = male ? kMale : kFemale;
    corpus.pairs.push_back(std::move(pair));
  }
  corpus.provenance["toy"] = corpus.pairs.size();
  corpus.refresh_counts();
  return corpus;
}

}  // namespace toylang
}  // namespace tagmt
