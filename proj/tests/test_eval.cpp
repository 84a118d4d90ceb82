#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "tagmt/eval.hpp"
#include "tagmt/rng.hpp"
#include "tagmt/text.hpp"

using namespace tagmt;
using namespace tagmt::eval;

namespace {

// Straight-line reference computation: counts every n-gram with nested loops
// and direct vector comparisons, no shared code with corpus_bleu.
double reference_bleu(const std::vector<std::string>& hyp_lines,
                      const std::vector<std::string>& ref_lines) {
  double log_p_sum = 0.0;
  std::size_t hyp_len = 0, ref_len = 0;
  for (int n = 1; n <= 4; ++n) {
    long matches = 0, total = 0;
    for (std::size_t s = 0; s < hyp_lines.size(); ++s) {
      auto hyp = split_ws(hyp_lines[s]);
      auto ref = split_ws(ref_lines[s]);
      if (n == 1) {
        hyp_len += hyp.size();
        ref_len += ref.size();
      }
      if (hyp.size() < static_cast<std::size_t>(n)) continue;
      std::vector<bool> ref_used(ref.size(), false);
      for (std::size_t i = 0; i + n <= hyp.size(); ++i) {
        total += 1;
        for (std::size_t j = 0; j + n <= ref.size(); ++j) {
          if (ref_used[j]) continue;
          bool equal = true;
          for (int k = 0; k < n; ++k) {
            if (hyp[i + k] != ref[j + k]) {
              equal = false;
              break;
            }
          }
          if (equal) {
            ref_used[j] = true;  // clipping: each ref position matched once
            matches += 1;
            break;
          }
        }
      }
    }
    if (matches == 0) return 0.0;
    log_p_sum += std::log(static_cast<double>(matches) /
                          static_cast<double>(total));
  }
  double bp = hyp_len > ref_len
                  ? 1.0
                  : std::exp(1.0 - static_cast<double>(ref_len) /
                                       static_cast<double>(hyp_len));
  return 100.0 * bp * std::exp(log_p_sum / 4.0);
}

std::vector<std::string> random_lines(Rng& rng, std::size_t n,
                                      std::size_t vocab, std::size_t max_len) {
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t len = 4 + rng.below(max_len);
    std::string line;
    for (std::size_t t = 0; t < len; ++t) {
      if (t) line += " ";
      line += "w" + std::to_string(rng.below(vocab));
    }
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

TEST_CASE("identity corpus scores 100 with unit brevity penalty") {
  std::vector<std::string> lines = {"the cat sat on the mat",
                                    "a b c d e", "hello world ."};
  auto rep = corpus_bleu_lines(lines, lines);
  CHECK(rep.score == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(rep.brevity_penalty == 1.0);
  for (double p : rep.precisions) CHECK(p == 1.0);
}

TEST_CASE("disjoint corpora score zero") {
  std::vector<std::string> hyp = {"a b c d"};
  std::vector<std::string> ref = {"e f g h"};
  auto rep = corpus_bleu_lines(hyp, ref);
  CHECK(rep.score == 0.0);
  CHECK(rep.precisions[0] == 0.0);
}

TEST_CASE("clipping caps repeated hypothesis tokens") {
  std::vector<std::string> hyp = {"the the the cat"};
  std::vector<std::string> ref = {"the cat sat"};
  auto rep = corpus_bleu_lines(hyp, ref);
  CHECK(rep.match_counts[0] == 2);  // "the" clipped to 1, "cat" 1
  CHECK(rep.total_counts[0] == 4);
  CHECK(rep.precisions[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("length mismatch and empty corpora are rejected") {
  std::vector<std::string> one = {"a"};
  std::vector<std::string> two = {"a", "b"};
  CHECK_THROWS_AS((void)corpus_bleu_lines(one, two), LengthMismatch);
  std::vector<std::string> none;
  CHECK_THROWS_AS((void)corpus_bleu_lines(none, none), LengthMismatch);
}

TEST_CASE("empty hypothesis lines count toward lengths only") {
  std::vector<std::string> hyp = {"", "a b"};
  std::vector<std::string> ref = {"x y", "a b"};
  auto rep = corpus_bleu_lines(hyp, ref);
  CHECK(rep.hyp_len == 2);
  CHECK(rep.ref_len == 4);
  CHECK(rep.brevity_penalty == doctest::Approx(std::exp(1.0 - 2.0)));
}

TEST_CASE("brevity penalty decreases as the hypothesis shrinks") {
  std::vector<std::string> ref = {"a b c d e f"};
  double prev = 1.0;
  for (std::string hyp : {"a b c d e f", "a b c d e", "a b c d", "a b c"}) {
    auto rep = corpus_bleu_lines(std::vector<std::string>{hyp}, ref);
    CHECK(rep.brevity_penalty <= prev);
    if (rep.hyp_len < rep.ref_len) CHECK(rep.brevity_penalty < prev);
    prev = rep.brevity_penalty;
  }
}

TEST_CASE("corpus BLEU is invariant under line permutation") {
  Rng rng(17);
  auto refs = random_lines(rng, 40, 12, 8);
  auto hyps = random_lines(rng, 40, 12, 8);
  for (std::size_t i = 0; i < hyps.size(); i += 3) hyps[i] = refs[i];

  std::vector<std::size_t> order(refs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<std::string> hyps2, refs2;
  for (auto i : order) {
    hyps2.push_back(hyps[i]);
    refs2.push_back(refs[i]);
  }
  CHECK(corpus_bleu_lines(hyps, refs).score ==
        doctest::Approx(corpus_bleu_lines(hyps2, refs2).score).epsilon(1e-12));
}

TEST_CASE("matches the straight-line recomputation") {
  std::vector<std::string> hyp = {
      "the cat sat on the mat",
      "there is a tree in the garden",
      "he read the book quickly",
      "it is raining again today",
      "the the the cat",
  };
  std::vector<std::string> ref = {
      "the cat sat on the mat",
      "a tree stands in the garden",
      "he read the book very quickly",
      "it rains again today",
      "the cat sat",
  };
  auto rep = corpus_bleu_lines(hyp, ref);
  CHECK(rep.score == doctest::Approx(reference_bleu(hyp, ref)).epsilon(1e-9));

  Rng rng(23);
  for (int iter = 0; iter < 20; ++iter) {
    auto refs = random_lines(rng, 15, 6, 6);
    auto hyps = random_lines(rng, 15, 6, 6);
    for (std::size_t i = 0; i < hyps.size(); i += 2) hyps[i] = refs[i];
    CHECK(corpus_bleu_lines(hyps, refs).score ==
          doctest::Approx(reference_bleu(hyps, refs)).epsilon(1e-9));
  }
}

TEST_CASE("lowercase flag folds case before scoring") {
  std::vector<std::string> hyp = {"The CAT"};
  std::vector<std::string> ref = {"the cat"};
  CHECK(corpus_bleu_lines(hyp, ref).score == 0.0);
  CHECK(corpus_bleu_lines(hyp, ref, true).precisions[0] == 1.0);
}

TEST_CASE("identical systems give p = 1") {
  Rng rng(3);
  auto refs = random_lines(rng, 30, 8, 6);
  auto hyp = random_lines(rng, 30, 8, 6);
  auto rep = approx_randomization(hyp, hyp, refs, 500, 11);
  CHECK(rep.delta == 0.0);
  CHECK(rep.p_value == 1.0);
}

TEST_CASE("obvious differences are significant") {
  Rng rng(4);
  auto refs = random_lines(rng, 200, 10, 8);
  auto good = refs;  // perfect system
  std::vector<std::string> garbage(refs.size(), "zzz qqq xxx vvv");
  auto rep = approx_randomization(good, garbage, refs, 2000, 5);
  CHECK(rep.p_value < 0.01);
  CHECK(rep.p_value >= 1.0 / 2001);
}

TEST_CASE("p-values are symmetric in argument order") {
  Rng rng(6);
  auto refs = random_lines(rng, 50, 9, 7);
  auto a = random_lines(rng, 50, 9, 7);
  auto b = random_lines(rng, 50, 9, 7);
  for (std::size_t i = 0; i < a.size(); i += 4) a[i] = refs[i];
  for (std::size_t i = 1; i < b.size(); i += 5) b[i] = refs[i];
  auto ab = approx_randomization(a, b, refs, 400, 99);
  auto ba = approx_randomization(b, a, refs, 400, 99);
  CHECK(ab.p_value == ba.p_value);
  CHECK(ab.delta == ba.delta);
}

TEST_CASE("null p-values are approximately uniform") {
  Rng rng(8);
  const std::size_t n = 100;
  auto refs = random_lines(rng, n, 10, 8);
  auto o1 = random_lines(rng, n, 10, 8);
  auto o2 = random_lines(rng, n, 10, 8);
  // Make both outputs partially overlap the references so scores are nonzero.
  for (std::size_t i = 0; i < n; i += 2) o1[i] = refs[i];
  for (std::size_t i = 1; i < n; i += 2) o2[i] = refs[i];

  const std::size_t relabelings = 300;
  std::vector<double> pvalues;
  for (std::size_t s = 0; s < relabelings; ++s) {
    Rng flip(mix_seed(1000, s));
    std::vector<std::string> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (flip.coin()) {
        a[i] = o1[i];
        b[i] = o2[i];
      } else {
        a[i] = o2[i];
        b[i] = o1[i];
      }
    }
    pvalues.push_back(approx_randomization(a, b, refs, 199, s).p_value);
  }
  std::sort(pvalues.begin(), pvalues.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < pvalues.size(); ++i) {
    double ecdf_lo = static_cast<double>(i) / pvalues.size();
    double ecdf_hi = static_cast<double>(i + 1) / pvalues.size();
    ks = std::max({ks, std::abs(pvalues[i] - ecdf_lo),
                   std::abs(pvalues[i] - ecdf_hi)});
  }
  CHECK(ks < 0.15);
}

TEST_CASE("paired bootstrap agrees on the obvious cases") {
  Rng rng(12);
  auto refs = random_lines(rng, 100, 10, 8);
  std::vector<std::string> garbage(refs.size(), "zzz qqq xxx");
  auto rep = paired_bootstrap(refs, garbage, refs, 500, 3);
  CHECK(rep.p_value <= 0.01);
  auto same = paired_bootstrap(garbage, garbage, refs, 200, 3);
  CHECK(same.p_value == 1.0);
}

TEST_CASE("evaluate_suite stars exactly the significant rows") {
  Rng rng(21);
  auto refs = random_lines(rng, 120, 10, 8);
  std::vector<std::string> weak(refs.size());
  for (std::size_t i = 0; i < refs.size(); ++i) {
    weak[i] = i % 3 == 0 ? refs[i] : "zz qq ww ee";
  }

  std::vector<SuiteInput> inputs;
  inputs.push_back({"general", weak, refs, refs});      // tag wins big
  inputs.push_back({"identical", weak, weak, refs});    // no difference
  SuiteOptions opts;
  opts.trials = 500;
  opts.seed = 77;
  auto report = evaluate_suite(inputs, opts);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].significant == (report.rows[0].sig.p_value < 0.05));
  CHECK(report.rows[0].significant);
  CHECK(!report.rows[1].significant);

  auto table = report.format_table();
  CHECK(table.find("general") != std::string::npos);
  CHECK(table.find("*") != std::string::npos);
  auto json = report.to_json();
  CHECK(json.find("\"general\"") != std::string::npos);
}
