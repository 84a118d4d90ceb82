#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tagmt {
namespace eval {

struct LengthMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unsmoothed corpus BLEU, single reference, n-grams up to 4.
struct BleuReport {
  std::array<double, 4> precisions{};            // p1..p4
  std::array<std::size_t, 4> match_counts{};     // clipped matches
  std::array<std::size_t, 4> total_counts{};     // hypothesis n-grams
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
  double brevity_penalty = 0.0;
  double score = 0.0;  // 0..100

  std::string to_json() const;
};

using TokenLines = std::vector<std::vector<std::string>>;

TokenLines tokenize_lines(std::span<const std::string> lines,
                          bool lowercase = false);

BleuReport corpus_bleu(const TokenLines& hyps, const TokenLines& refs);
BleuReport corpus_bleu_lines(std::span<const std::string> hyp_lines,
                             std::span<const std::string> ref_lines,
                             bool lowercase = false);

struct SignificanceReport {
  double metric_a = 0.0;
  double metric_b = 0.0;
  double delta = 0.0;       // |metric_a - metric_b|
  double p_value = 1.0;     // in [1/(trials+1), 1]
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::string method;       // "approximate_randomization" or "paired_bootstrap"

  std::string to_json() const;
};

// Paired approximate randomization on corpus BLEU: each trial swaps the two
// systems' outputs per sentence with probability 1/2 (counter-based
// substreams, so trial t is reproducible regardless of execution order) and
// p = (#trials with |delta| >= observed + 1) / (trials + 1).
SignificanceReport approx_randomization(std::span<const std::string> hyp_a,
                                        std::span<const std::string> hyp_b,
                                        std::span<const std::string> refs,
                                        std::size_t trials = 10000,
                                        std::uint64_t seed = 0,
                                        bool lowercase = false);

// Paired bootstrap resampling; p is the add-one fraction of resamples where
// the observed winner fails to stay strictly ahead.
SignificanceReport paired_bootstrap(std::span<const std::string> hyp_a,
                                    std::span<const std::string> hyp_b,
                                    std::span<const std::string> refs,
                                    std::size_t trials = 1000,
                                    std::uint64_t seed = 0,
                                    bool lowercase = false);

struct SuiteInput {
  std::string test_set;
  std::vector<std::string> hyp_base;
  std::vector<std::string> hyp_tag;
  std::vector<std::string> refs;
};

struct SuiteOptions {
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
  bool lowercase = false;
  double alpha = 0.05;
};

struct SuiteRow {
  std::string test_set;
  BleuReport base;
  BleuReport tag;
  SignificanceReport sig;
  bool significant = false;
};

struct SuiteReport {
  std::vector<SuiteRow> rows;
  double alpha = 0.05;

  std::string format_table() const;  // aligned text, stars at p < alpha
  std::string to_json() const;
};

SuiteReport evaluate_suite(std::span<const SuiteInput> inputs,
                           const SuiteOptions& opts = {});

}  // namespace eval
}  // namespace tagmt
