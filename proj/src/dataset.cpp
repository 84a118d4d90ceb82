#include "tagmt/dataset.hpp"

#include <algorithm>
#include <unordered_set>

#include "json.hpp"
#include "tagmt/io.hpp"
#include "tagmt/rng.hpp"
#include "tagmt/text.hpp"

namespace tagmt {
namespace dataset {

namespace {

bool has_ws(const std::string& s) {
  return s.find_first_of(" \t\r\n") != std::string::npos;
}

AnnotatedCorpus from_pairs(std::vector<SentencePair> pairs,
                           const std::string& lang_pair) {
  AnnotatedCorpus c;
  c.lang_pair = lang_pair;
  c.pairs = std::move(pairs);
  c.refresh_counts();
  return c;
}

// Seeded sample of k pairs, returned in original order.
std::vector<SentencePair> sample_pairs(const std::vector<SentencePair>& pool,
                                       std::size_t k, std::uint64_t seed) {
  Rng rng(seed);
  auto idx = sample_indices(pool.size(), k, rng);
  std::vector<SentencePair> out;
  out.reserve(k);
  for (std::size_t i : idx) out.push_back(pool[i]);
  return out;
}

}  // namespace

bool GenderTagConfig::valid() const {
  return !male_token.empty() && !female_token.empty() &&
         male_token != female_token && !has_ws(male_token) &&
         !has_ws(female_token);
}

const std::string& GenderTagConfig::token_for(Gender g) const {
  switch (g) {
    case Gender::Male: return male_token;
    case Gender::Female: return female_token;
    default:
      throw UnknownGender("cannot tag a pair with unknown speaker gender");
  }
}

SentencePair apply_gender_tag(const SentencePair& pair,
                              const GenderTagConfig& cfg) {
  SentencePair tagged = pair;
  tagged.src = cfg.token_for(pair.gender()) + " " + pair.src;
  return tagged;
}

std::pair<AnnotatedCorpus, AnnotatedCorpus> split_corpus(
    const AnnotatedCorpus& corpus, const SplitSpec& spec) {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < corpus.pairs.size(); ++i) {
    if (spec.exclude_unknown && corpus.pairs[i].gender() == Gender::Unknown)
      continue;
    eligible.push_back(i);
  }
  if (spec.test_size >= eligible.size()) {
    throw CorpusTooSmall("test_size " + std::to_string(spec.test_size) +
                         " >= eligible corpus size " +
                         std::to_string(eligible.size()));
  }
  Rng rng(spec.seed);
  auto picked = sample_indices(eligible.size(), spec.test_size, rng);
  std::unordered_set<std::size_t> test_set(picked.begin(), picked.end());
  std::vector<std::size_t> train_idx, test_idx;
  for (std::size_t j = 0; j < eligible.size(); ++j) {
    (test_set.count(j) ? test_idx : train_idx).push_back(eligible[j]);
  }
  return {subcorpus(corpus, train_idx), subcorpus(corpus, test_idx)};
}

std::pair<AnnotatedCorpus, AnnotatedCorpus> build_gender_testsets(
    const AnnotatedCorpus& pool, std::size_t size, std::uint64_t seed) {
  std::vector<SentencePair> male, female;
  for (const auto& p : pool.pairs) {
    if (p.gender() == Gender::Male) male.push_back(p);
    if (p.gender() == Gender::Female) female.push_back(p);
  }
  if (male.size() < size) {
    throw InsufficientGenderData(
        Gender::Male, size - male.size(),
        "male pool short by " + std::to_string(size - male.size()) +
            " pairs (" + std::to_string(male.size()) + " available)");
  }
  if (female.size() < size) {
    throw InsufficientGenderData(
        Gender::Female, size - female.size(),
        "female pool short by " + std::to_string(size - female.size()) +
            " pairs (" + std::to_string(female.size()) + " available)");
  }
  auto m = sample_pairs(male, size, mix_seed(seed, stream_tag("testset.M")));
  auto f = sample_pairs(female, size, mix_seed(seed, stream_tag("testset.F")));
  return {from_pairs(std::move(m), pool.lang_pair),
          from_pairs(std::move(f), pool.lang_pair)};
}

std::vector<SentencePair> filter_first_person(
    std::span<const SentencePair> pairs,
    const std::set<std::string>& pronouns) {
  std::vector<SentencePair> out;
  for (const auto& p : pairs) {
    for (const auto& tok : split_ws(p.src)) {
      if (pronouns.count(tok)) {
        out.push_back(p);
        break;
      }
    }
  }
  return out;
}

void emit_bitext(const AnnotatedCorpus& corpus, bool tagged,
                 const GenderTagConfig& cfg,
                 const std::filesystem::path& src_path,
                 const std::filesystem::path& tgt_path) {
  if (corpus.empty()) throw EmptyCorpus("emit_bitext on empty corpus");
  std::vector<std::string> src_lines, tgt_lines;
  src_lines.reserve(corpus.size());
  tgt_lines.reserve(corpus.size());
  for (const auto& p : corpus.pairs) {
    if (tagged) {
      src_lines.push_back(cfg.token_for(p.gender()) + " " + p.src);
    } else {
      src_lines.push_back(p.src);
    }
    tgt_lines.push_back(p.tgt);
  }
  write_lines(src_path, src_lines);
  write_lines(tgt_path, tgt_lines);
}

DatasetBundle build_datasets(const AnnotatedCorpus& corpus,
                             const BuildSpec& spec) {
  DatasetBundle bundle;
  auto [rest, general] = split_corpus(corpus, spec.split);
  bundle.general = std::move(general);

  const std::uint64_t seed = spec.split.seed;
  auto [m, f] = build_gender_testsets(
      rest, spec.gender_test_size, mix_seed(seed, stream_tag("gender")));
  bundle.m = std::move(m);
  bundle.f = std::move(f);

  std::unordered_set<std::size_t> reserved;
  for (const auto& p : bundle.m.pairs) reserved.insert(p.id);
  for (const auto& p : bundle.f.pairs) reserved.insert(p.id);

  // Held-out pool left after removing M and F; training data comes from here,
  // minus any first-person top-ups.
  std::vector<SentencePair> leftover;
  for (const auto& p : rest.pairs) {
    if (!reserved.count(p.id)) leftover.push_back(p);
  }

  auto build_fp = [&](const AnnotatedCorpus& base, Gender g,
                      std::uint64_t fp_seed) {
    std::vector<SentencePair> fp = filter_first_person(base.pairs, spec.pronouns);
    if (spec.first_person_size == 0) {
      return from_pairs(std::move(fp), corpus.lang_pair);
    }
    if (fp.size() > spec.first_person_size) {
      return from_pairs(sample_pairs(fp, spec.first_person_size, fp_seed),
                        corpus.lang_pair);
    }
    if (fp.size() < spec.first_person_size) {
      std::vector<SentencePair> gendered_leftover;
      for (const auto& p : leftover) {
        if (p.gender() == g) gendered_leftover.push_back(p);
      }
      auto candidates = filter_first_person(gendered_leftover, spec.pronouns);
      std::size_t need = spec.first_person_size - fp.size();
      if (candidates.size() < need) {
        throw InsufficientGenderData(
            g, need - candidates.size(),
            std::string("first-person ") + gender_code(g) +
                " pool short by " + std::to_string(need - candidates.size()));
      }
      auto extra = sample_pairs(candidates, need, fp_seed);
      std::unordered_set<std::size_t> taken;
      for (const auto& p : extra) {
        taken.insert(p.id);
        fp.push_back(p);
      }
      std::erase_if(leftover,
                    [&](const SentencePair& p) { return taken.count(p.id); });
      std::sort(fp.begin(), fp.end(),
                [](const auto& a, const auto& b) { return a.id < b.id; });
    }
    return from_pairs(std::move(fp), corpus.lang_pair);
  };

  bundle.m1 = build_fp(bundle.m, Gender::Male, mix_seed(seed, stream_tag("M1")));
  bundle.f1 =
      build_fp(bundle.f, Gender::Female, mix_seed(seed, stream_tag("F1")));

  bundle.train = from_pairs(std::move(leftover), corpus.lang_pair);
  return bundle;
}

void emit_datasets(const DatasetBundle& bundle, const BuildSpec& spec,
                   bool tagged, const std::filesystem::path& out_dir) {
  struct Item {
    const char* name;
    const AnnotatedCorpus* corpus;
  };
  const Item items[] = {
      {"train", &bundle.train},     {"test", &bundle.general},
      {"test.M", &bundle.m},        {"test.F", &bundle.f},
      {"test.M1", &bundle.m1},      {"test.F1", &bundle.f1},
  };
  nlohmann::json manifest;
  manifest["tagged"] = tagged;
  manifest["seed"] = spec.split.seed;
  manifest["test_size"] = spec.split.test_size;
  manifest["gender_test_size"] = spec.gender_test_size;
  manifest["first_person_size"] = spec.first_person_size;
  manifest["pronouns"] = spec.pronouns;
  manifest["male_token"] = spec.tag.male_token;
  manifest["female_token"] = spec.tag.female_token;
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& item : items) {
    counts[item.name] = item.corpus->size();
    if (item.corpus->empty()) continue;  // M1/F1 may be empty
    emit_bitext(*item.corpus, tagged, spec.tag,
                out_dir / (std::string(item.name) + ".src"),
                out_dir / (std::string(item.name) + ".tgt"));
  }
  manifest["counts"] = counts;
  write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace dataset
}  // namespace tagmt
