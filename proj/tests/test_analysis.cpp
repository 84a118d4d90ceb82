#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tagmt/analysis.hpp"
#include "tagmt/rng.hpp"
#include "tagmt/text.hpp"

using namespace tagmt;
using namespace tagmt::analysis;

namespace {

SentencePair make_pair(std::size_t id, Gender g, const std::string& src,
                       const std::string& tgt, std::optional<int> age = {}) {
  SentencePair p;
  p.id = id;
  p.src = src;
  p.tgt = tgt;
  p.lang_pair = "EN-FR";
  if (g != Gender::Unknown) {
    p.speaker = SpeakerRecord{"m" + std::to_string(id), "Speaker",
                              "speaker", g, std::nullopt, ""};
  }
  p.age_years = age;
  return p;
}

AnnotatedCorpus make_corpus(std::vector<SentencePair> pairs) {
  AnnotatedCorpus c;
  c.lang_pair = "EN-FR";
  c.pairs = std::move(pairs);
  c.refresh_counts();
  return c;
}

}  // namespace

TEST_CASE("gender shares") {
  auto corpus = make_corpus({make_pair(0, Gender::Male, "a", "x"),
                             make_pair(1, Gender::Male, "b", "y"),
                             make_pair(2, Gender::Female, "c", "z")});
  auto stats = gender_distribution(corpus);
  CHECK(stats.total_pairs == 3);
  CHECK(stats.male_share == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(stats.female_share == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(stats.unknown_share == 0.0);
  CHECK(stats.male_share + stats.female_share + stats.unknown_share ==
        doctest::Approx(1.0).epsilon(1e-12));

  auto with_unknown = corpus;
  with_unknown.pairs.push_back(make_pair(3, Gender::Unknown, "d", "w"));
  with_unknown.refresh_counts();
  auto s2 = gender_distribution(with_unknown);
  CHECK(s2.male_share + s2.female_share + s2.unknown_share ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s2.male_share_known == doctest::Approx(2.0 / 3).epsilon(1e-12));

  CHECK_THROWS_AS((void)gender_distribution(AnnotatedCorpus{}), EmptyCorpus);
}

TEST_CASE("age histogram buckets are half-open decades") {
  auto corpus = make_corpus({make_pair(0, Gender::Female, "a", "x", 25),
                             make_pair(1, Gender::Male, "b", "y", 55),
                             make_pair(2, Gender::Female, "c", "z", 55)});
  auto hist = age_gender_histogram(corpus);
  REQUIRE(hist.size() == 2);
  CHECK(hist.at("20-30") == std::pair<std::size_t, std::size_t>(0, 1));
  CHECK(hist.at("50-60") == std::pair<std::size_t, std::size_t>(1, 1));

  CHECK(bucket_label(50) == "50-60");
  CHECK(bucket_label(59) == "50-60");
  CHECK(bucket_label(60) == "60-70");
  CHECK(bucket_label(20) == "20-30");
}

TEST_CASE("histogram partition covers each aged pair exactly once") {
  Rng rng(3);
  std::vector<SentencePair> pairs;
  std::size_t with_both = 0;
  for (std::size_t i = 0; i < 200; ++i) {
    Gender g = rng.coin() ? Gender::Male
                          : (rng.coin() ? Gender::Female : Gender::Unknown);
    std::optional<int> age;
    if (rng.coin()) age = 15 + static_cast<int>(rng.below(80));
    if (g != Gender::Unknown && age) ++with_both;
    pairs.push_back(make_pair(i, g, "s", "t", age));
  }
  auto corpus = make_corpus(std::move(pairs));
  auto stats = analyze_corpus(corpus);
  std::size_t total = 0;
  for (const auto& [bucket, counts] : stats.age_hist) {
    total += counts.first + counts.second;
  }
  CHECK(total == with_both);
  double share_sum = 0.0;
  for (const auto& [bucket, share] : stats.bucket_shares) share_sum += share;
  CHECK(share_sum == doctest::Approx(static_cast<double>(with_both) /
                                     stats.total_pairs));
}

TEST_CASE("statistics are invariant under corpus permutation") {
  Rng rng(9);
  std::vector<SentencePair> pairs;
  for (std::size_t i = 0; i < 120; ++i) {
    Gender g = rng.coin() ? Gender::Male : Gender::Female;
    pairs.push_back(make_pair(i, g, "tok" + std::to_string(rng.below(5)),
                              "mot" + std::to_string(rng.below(5)),
                              20 + static_cast<int>(rng.below(60))));
  }
  auto corpus = make_corpus(pairs);
  rng.shuffle(pairs);
  auto shuffled = make_corpus(pairs);

  CHECK(stats_json(analyze_corpus(corpus)) ==
        stats_json(analyze_corpus(shuffled)));
  auto r1 = frequency_rank(corpus, Side::Tgt, Gender::Male);
  auto r2 = frequency_rank(shuffled, Side::Tgt, Gender::Male);
  CHECK(r1.ranked == r2.ranked);
}

TEST_CASE("frequency ranks: counts descending, ties lexicographic") {
  auto corpus = make_corpus({make_pair(0, Gender::Male, "s", "a a b"),
                             make_pair(1, Gender::Male, "s", "c b A"),
                             make_pair(2, Gender::Female, "s", "zzz")});
  auto table = frequency_rank(corpus, Side::Tgt, Gender::Male);
  // casefolded counts: a=3, b=2, c=1
  REQUIRE(table.ranked.size() == 3);
  CHECK(table.ranked[0] == std::pair<std::string, std::size_t>("a", 3));
  CHECK(table.ranked[1] == std::pair<std::string, std::size_t>("b", 2));
  CHECK(table.ranked[2] == std::pair<std::string, std::size_t>("c", 1));
  CHECK(table.rank_of("a") == 1);
  CHECK(table.rank_of("b") == 2);
  CHECK(table.rank_of("zzz") == 0);  // female-only token
  CHECK(table.total_tokens() == 6);

  auto tie = make_corpus({make_pair(0, Gender::Male, "s", "b b a a c")});
  auto tie_table = frequency_rank(tie, Side::Tgt, Gender::Male);
  CHECK(tie_table.ranked[0].first == "a");
  CHECK(tie_table.ranked[1].first == "b");
  CHECK(tie_table.rank_of("c") == 3);
}

TEST_CASE("rank table totals match the gender-filtered token count") {
  Rng rng(31);
  std::vector<SentencePair> pairs;
  std::size_t male_tokens = 0;
  for (std::size_t i = 0; i < 60; ++i) {
    Gender g = rng.coin() ? Gender::Male : Gender::Female;
    std::size_t toks = 1 + rng.below(6);
    std::string tgt;
    for (std::size_t t = 0; t < toks; ++t) {
      if (t) tgt += " ";
      tgt += "w" + std::to_string(rng.below(9));
    }
    if (g == Gender::Male) male_tokens += toks;
    pairs.push_back(make_pair(i, g, "s", tgt));
  }
  auto corpus = make_corpus(std::move(pairs));
  CHECK(frequency_rank(corpus, Side::Tgt, Gender::Male).total_tokens() ==
        male_tokens);
}

TEST_CASE("histogram csv layout") {
  auto corpus = make_corpus({make_pair(0, Gender::Female, "a", "x", 25),
                             make_pair(1, Gender::Male, "b", "y", 55)});
  auto csv = histogram_csv(analyze_corpus(corpus));
  CHECK(csv.rfind("bucket,male_pct,female_pct\n", 0) == 0);
  CHECK(csv.find("20-30,0.0000,50.0000") != std::string::npos);
  CHECK(csv.find("50-60,50.0000,0.0000") != std::string::npos);
}
