#include "tagmt/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "json.hpp"
#include "tagmt/rng.hpp"
#include "tagmt/text.hpp"

namespace tagmt {
namespace eval {

namespace {

constexpr int kMaxOrder = 4;

// Per-sentence sufficient statistics; corpus BLEU is a function of their sums.
struct SentenceStats {
  std::array<std::size_t, kMaxOrder> match{};
  std::array<std::size_t, kMaxOrder> total{};
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
};

struct StatSums {
  std::array<std::size_t, kMaxOrder> match{};
  std::array<std::size_t, kMaxOrder> total{};
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;

  void add(const SentenceStats& s) {
    for (int n = 0; n < kMaxOrder; ++n) {
      match[n] += s.match[n];
      total[n] += s.total[n];
    }
    hyp_len += s.hyp_len;
    ref_len += s.ref_len;
  }
};

using Ngram = std::vector<std::string>;

SentenceStats sentence_stats(const std::vector<std::string>& hyp,
                             const std::vector<std::string>& ref) {
  SentenceStats s;
  s.hyp_len = hyp.size();
  s.ref_len = ref.size();
  for (int n = 1; n <= kMaxOrder; ++n) {
    if (hyp.size() < static_cast<std::size_t>(n)) break;
    std::map<Ngram, std::size_t> hyp_counts;
    for (std::size_t i = 0; i + n <= hyp.size(); ++i) {
      ++hyp_counts[Ngram(hyp.begin() + i, hyp.begin() + i + n)];
    }
    std::map<Ngram, std::size_t> ref_counts;
    for (std::size_t i = 0; i + n <= ref.size(); ++i) {
      ++ref_counts[Ngram(ref.begin() + i, ref.begin() + i + n)];
    }
    std::size_t matches = 0;
    for (const auto& [ngram, count] : hyp_counts) {
      auto it = ref_counts.find(ngram);
      if (it != ref_counts.end()) matches += std::min(count, it->second);
    }
    s.match[n - 1] = matches;
    s.total[n - 1] = hyp.size() - n + 1;
  }
  return s;
}

double bp_from_lengths(std::size_t hyp_len, std::size_t ref_len) {
  if (hyp_len == 0) return 0.0;
  if (hyp_len > ref_len) return 1.0;
  return std::exp(1.0 - static_cast<double>(ref_len) /
                            static_cast<double>(hyp_len));
}

double score_from_sums(const StatSums& sums) {
  double log_precision = 0.0;
  for (int n = 0; n < kMaxOrder; ++n) {
    if (sums.match[n] == 0 || sums.total[n] == 0) return 0.0;
    log_precision += std::log(static_cast<double>(sums.match[n]) /
                              static_cast<double>(sums.total[n]));
  }
  return 100.0 * bp_from_lengths(sums.hyp_len, sums.ref_len) *
         std::exp(log_precision / kMaxOrder);
}

BleuReport report_from_sums(const StatSums& sums) {
  BleuReport r;
  for (int n = 0; n < kMaxOrder; ++n) {
    r.match_counts[n] = sums.match[n];
    r.total_counts[n] = sums.total[n];
    r.precisions[n] = sums.total[n] == 0
                          ? 0.0
                          : static_cast<double>(sums.match[n]) /
                                static_cast<double>(sums.total[n]);
  }
  r.hyp_len = sums.hyp_len;
  r.ref_len = sums.ref_len;
  r.brevity_penalty = bp_from_lengths(sums.hyp_len, sums.ref_len);
  r.score = score_from_sums(sums);
  return r;
}

std::vector<SentenceStats> stats_for(const TokenLines& hyps,
                                     const TokenLines& refs) {
  std::vector<SentenceStats> stats(hyps.size());
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    stats[i] = sentence_stats(hyps[i], refs[i]);
  }
  return stats;
}

void require_aligned(std::size_t a, std::size_t b, const char* what) {
  if (a != b || a == 0) {
    throw LengthMismatch(std::string(what) + ": expected equal non-zero line" +
                         " counts, got " + std::to_string(a) + " and " +
                         std::to_string(b));
  }
}

}  // namespace

TokenLines tokenize_lines(std::span<const std::string> lines, bool lowercase) {
  TokenLines out;
  out.reserve(lines.size());
  for (const auto& line : lines) {
    out.push_back(split_ws(lowercase ? utf8_lower(line) : line));
  }
  return out;
}

BleuReport corpus_bleu(const TokenLines& hyps, const TokenLines& refs) {
  require_aligned(hyps.size(), refs.size(), "corpus_bleu");
  StatSums sums;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    sums.add(sentence_stats(hyps[i], refs[i]));
  }
  return report_from_sums(sums);
}

BleuReport corpus_bleu_lines(std::span<const std::string> hyp_lines,
                             std::span<const std::string> ref_lines,
                             bool lowercase) {
  return corpus_bleu(tokenize_lines(hyp_lines, lowercase),
                     tokenize_lines(ref_lines, lowercase));
}

std::string BleuReport::to_json() const {
  nlohmann::json j;
  j["score"] = score;
  j["brevity_penalty"] = brevity_penalty;
  j["hyp_len"] = hyp_len;
  j["ref_len"] = ref_len;
  j["precisions"] = precisions;
  j["match_counts"] = match_counts;
  j["total_counts"] = total_counts;
  return j.dump(2) + "\n";
}

std::string SignificanceReport::to_json() const {
  nlohmann::json j;
  j["metric_a"] = metric_a;
  j["metric_b"] = metric_b;
  j["delta"] = delta;
  j["p_value"] = p_value;
  j["trials"] = trials;
  j["seed"] = seed;
  j["method"] = method;
  return j.dump(2) + "\n";
}

SignificanceReport approx_randomization(std::span<const std::string> hyp_a,
                                        std::span<const std::string> hyp_b,
                                        std::span<const std::string> refs,
                                        std::size_t trials, std::uint64_t seed,
                                        bool lowercase) {
  require_aligned(hyp_a.size(), refs.size(), "approx_randomization(a)");
  require_aligned(hyp_b.size(), refs.size(), "approx_randomization(b)");
  if (trials == 0) throw LengthMismatch("approx_randomization: trials == 0");

  const TokenLines ref_toks = tokenize_lines(refs, lowercase);
  const auto stats_a = stats_for(tokenize_lines(hyp_a, lowercase), ref_toks);
  const auto stats_b = stats_for(tokenize_lines(hyp_b, lowercase), ref_toks);
  const std::size_t n = stats_a.size();

  StatSums sums_a, sums_b;
  for (std::size_t i = 0; i < n; ++i) {
    sums_a.add(stats_a[i]);
    sums_b.add(stats_b[i]);
  }
  SignificanceReport rep;
  rep.method = "approximate_randomization";
  rep.metric_a = score_from_sums(sums_a);
  rep.metric_b = score_from_sums(sums_b);
  rep.delta = std::abs(rep.metric_a - rep.metric_b);
  rep.trials = trials;
  rep.seed = seed;

  std::size_t at_least = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(mix_seed(seed, t));
    StatSums trial_a, trial_b;
    for (std::size_t i = 0; i < n; ++i) {
      if (rng.coin()) {
        trial_a.add(stats_b[i]);
        trial_b.add(stats_a[i]);
      } else {
        trial_a.add(stats_a[i]);
        trial_b.add(stats_b[i]);
      }
    }
    if (std::abs(score_from_sums(trial_a) - score_from_sums(trial_b)) >=
        rep.delta) {
      ++at_least;
    }
  }
  rep.p_value = static_cast<double>(at_least + 1) /
                static_cast<double>(trials + 1);
  return rep;
}

SignificanceReport paired_bootstrap(std::span<const std::string> hyp_a,
                                    std::span<const std::string> hyp_b,
                                    std::span<const std::string> refs,
                                    std::size_t trials, std::uint64_t seed,
                                    bool lowercase) {
  require_aligned(hyp_a.size(), refs.size(), "paired_bootstrap(a)");
  require_aligned(hyp_b.size(), refs.size(), "paired_bootstrap(b)");
  if (trials == 0) throw LengthMismatch("paired_bootstrap: trials == 0");

  const TokenLines ref_toks = tokenize_lines(refs, lowercase);
  const auto stats_a = stats_for(tokenize_lines(hyp_a, lowercase), ref_toks);
  const auto stats_b = stats_for(tokenize_lines(hyp_b, lowercase), ref_toks);
  const std::size_t n = stats_a.size();

  StatSums sums_a, sums_b;
  for (std::size_t i = 0; i < n; ++i) {
    sums_a.add(stats_a[i]);
    sums_b.add(stats_b[i]);
  }
  SignificanceReport rep;
  rep.method = "paired_bootstrap";
  rep.metric_a = score_from_sums(sums_a);
  rep.metric_b = score_from_sums(sums_b);
  rep.delta = std::abs(rep.metric_a - rep.metric_b);
  rep.trials = trials;
  rep.seed = seed;

  const bool a_leads = rep.metric_a >= rep.metric_b;
  std::size_t failures = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(mix_seed(seed, t));
    StatSums trial_a, trial_b;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = static_cast<std::size_t>(rng.below(n));
      trial_a.add(stats_a[j]);
      trial_b.add(stats_b[j]);
    }
    const double da = score_from_sums(trial_a) - score_from_sums(trial_b);
    if ((a_leads && da <= 0.0) || (!a_leads && da >= 0.0)) ++failures;
  }
  rep.p_value = static_cast<double>(failures + 1) /
                static_cast<double>(trials + 1);
  return rep;
}

SuiteReport evaluate_suite(std::span<const SuiteInput> inputs,
                           const SuiteOptions& opts) {
  SuiteReport report;
  report.alpha = opts.alpha;
  for (const auto& in : inputs) {
    SuiteRow row;
    row.test_set = in.test_set;
    row.base = corpus_bleu_lines(in.hyp_base, in.refs, opts.lowercase);
    row.tag = corpus_bleu_lines(in.hyp_tag, in.refs, opts.lowercase);
    row.sig = approx_randomization(in.hyp_base, in.hyp_tag, in.refs,
                                   opts.trials, opts.seed, opts.lowercase);
    row.significant = row.sig.p_value < opts.alpha;
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string SuiteReport::format_table() const {
  std::size_t name_width = 8;
  for (const auto& row : rows) {
    name_width = std::max(name_width, row.test_set.size());
  }
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-*s  %8s  %8s\n",
                static_cast<int>(name_width), "Test set", "BASE", "TAG");
  out << buf;
  for (const auto& row : rows) {
    std::string base = [&] {
      std::snprintf(buf, sizeof(buf), "%.2f", row.base.score);
      return std::string(buf);
    }();
    std::string tag = [&] {
      std::snprintf(buf, sizeof(buf), "%.2f", row.tag.score);
      return std::string(buf);
    }();
    if (row.significant) {
      (row.tag.score >= row.base.score ? tag : base) += "*";
    }
    std::snprintf(buf, sizeof(buf), "%-*s  %8s  %8s\n",
                  static_cast<int>(name_width), row.test_set.c_str(),
                  base.c_str(), tag.c_str());
    out << buf;
  }
  out << "* p < " << alpha << " (approximate randomization, "
      << (rows.empty() ? 0 : rows.front().sig.trials) << " trials)\n";
  return out.str();
}

std::string SuiteReport::to_json() const {
  nlohmann::json j;
  j["alpha"] = alpha;
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json r;
    r["test_set"] = row.test_set;
    r["base_bleu"] = row.base.score;
    r["tag_bleu"] = row.tag.score;
    r["p_value"] = row.sig.p_value;
    r["trials"] = row.sig.trials;
    r["significant"] = row.significant;
    rows_json.push_back(std::move(r));
  }
  j["rows"] = rows_json;
  return j.dump(2) + "\n";
}

}  // namespace eval
}  // namespace tagmt
