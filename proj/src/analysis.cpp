#include "tagmt/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "tagmt/text.hpp"

namespace tagmt {
namespace analysis {

using nlohmann::json;

std::string bucket_label(int age, int bucket_width) {
  int lo = (age / bucket_width) * bucket_width;
  return std::to_string(lo) + "-" + std::to_string(lo + bucket_width);
}

CorpusStats gender_distribution(const AnnotatedCorpus& corpus) {
  if (corpus.empty()) throw EmptyCorpus("gender_distribution on empty corpus");
  CorpusStats s;
  s.total_pairs = corpus.size();
  for (const auto& p : corpus.pairs) {
    switch (p.gender()) {
      case Gender::Male: ++s.male_pairs; break;
      case Gender::Female: ++s.female_pairs; break;
      default: ++s.unknown_pairs; break;
    }
  }
  const double total = static_cast<double>(s.total_pairs);
  s.male_share = s.male_pairs / total;
  s.female_share = s.female_pairs / total;
  s.unknown_share = s.unknown_pairs / total;
  const std::size_t known = s.male_pairs + s.female_pairs;
  if (known > 0) {
    s.male_share_known = static_cast<double>(s.male_pairs) / known;
    s.female_share_known = static_cast<double>(s.female_pairs) / known;
  }
  return s;
}

std::map<std::string, std::pair<std::size_t, std::size_t>> age_gender_histogram(
    const AnnotatedCorpus& corpus, int bucket_width) {
  std::map<std::string, std::pair<std::size_t, std::size_t>> hist;
  for (const auto& p : corpus.pairs) {
    if (!p.age_years) continue;
    Gender g = p.gender();
    if (g == Gender::Unknown) continue;
    auto& cell = hist[bucket_label(*p.age_years, bucket_width)];
    if (g == Gender::Male) {
      ++cell.first;
    } else {
      ++cell.second;
    }
  }
  return hist;
}

CorpusStats analyze_corpus(const AnnotatedCorpus& corpus, int bucket_width) {
  CorpusStats s = gender_distribution(corpus);
  s.age_hist = age_gender_histogram(corpus, bucket_width);
  for (const auto& [bucket, counts] : s.age_hist) {
    s.bucket_shares[bucket] =
        static_cast<double>(counts.first + counts.second) / s.total_pairs;
  }
  return s;
}

std::size_t RankTable::rank_of(const std::string& token) const {
  auto it = rank_.find(token);
  return it == rank_.end() ? 0 : it->second;
}

std::size_t RankTable::total_tokens() const {
  std::size_t total = 0;
  for (const auto& [tok, count] : ranked) total += count;
  return total;
}

RankTable frequency_rank(const AnnotatedCorpus& corpus, Side side,
                         Gender gender) {
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& p : corpus.pairs) {
    if (p.gender() != gender) continue;
    const std::string& text = side == Side::Src ? p.src : p.tgt;
    for (const auto& tok : split_ws(text)) {
      ++counts[utf8_lower(tok)];
    }
  }
  RankTable table;
  table.gender = gender;
  table.side = side;
  table.ranked.assign(counts.begin(), counts.end());
  std::sort(table.ranked.begin(), table.ranked.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second > b.second;
              return a.first < b.first;
            });
  table.rank_.reserve(table.ranked.size());
  for (std::size_t i = 0; i < table.ranked.size(); ++i) {
    table.rank_[table.ranked[i].first] = i + 1;
  }
  return table;
}

std::string stats_json(const CorpusStats& s) {
  json j;
  j["total_pairs"] = s.total_pairs;
  j["male_pairs"] = s.male_pairs;
  j["female_pairs"] = s.female_pairs;
  j["unknown_pairs"] = s.unknown_pairs;
  j["male_share"] = s.male_share;
  j["female_share"] = s.female_share;
  j["unknown_share"] = s.unknown_share;
  j["male_share_known"] = s.male_share_known;
  j["female_share_known"] = s.female_share_known;
  json hist = json::object();
  for (const auto& [bucket, counts] : s.age_hist) {
    hist[bucket] = {{"male", counts.first}, {"female", counts.second}};
  }
  j["age_hist"] = hist;
  json shares = json::object();
  for (const auto& [bucket, share] : s.bucket_shares) shares[bucket] = share;
  j["bucket_shares"] = shares;
  return j.dump(2) + "\n";
}

std::string histogram_csv(const CorpusStats& s) {
  std::ostringstream out;
  out << "bucket,male_pct,female_pct\n";
  char buf[64];
  for (const auto& [bucket, counts] : s.age_hist) {
    double male_pct = 100.0 * counts.first / s.total_pairs;
    double female_pct = 100.0 * counts.second / s.total_pairs;
    std::snprintf(buf, sizeof(buf), "%s,%.4f,%.4f\n", bucket.c_str(), male_pct,
                  female_pct);
    out << buf;
  }
  return out.str();
}

}  // namespace analysis
}  // namespace tagmt
