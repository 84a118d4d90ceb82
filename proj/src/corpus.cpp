#include "tagmt/corpus.hpp"

#include <sstream>

#include "json.hpp"
#include "tagmt/io.hpp"
#include "tagmt/text.hpp"

namespace tagmt {

using nlohmann::json;

const char* gender_code(Gender g) {
  switch (g) {
    case Gender::Male: return "M";
    case Gender::Female: return "F";
    default: return "?";
  }
}

std::optional<Gender> gender_from_code(std::string_view code) {
  if (code == "M" || code == "m") return Gender::Male;
  if (code == "F" || code == "f") return Gender::Female;
  if (code == "?") return Gender::Unknown;
  return std::nullopt;
}

void AnnotatedCorpus::refresh_counts() {
  unresolved_count = 0;
  for (const auto& p : pairs) {
    if (!p.resolved()) ++unresolved_count;
    if (!lang_pair.empty() && p.lang_pair != lang_pair) {
      throw std::logic_error("corpus mixes language pairs: " + p.lang_pair +
                             " vs " + lang_pair);
    }
  }
}

AnnotatedCorpus subcorpus(const AnnotatedCorpus& corpus,
                          const std::vector<std::size_t>& indices) {
  AnnotatedCorpus out;
  out.lang_pair = corpus.lang_pair;
  out.pairs.reserve(indices.size());
  for (std::size_t i : indices) out.pairs.push_back(corpus.pairs.at(i));
  out.refresh_counts();
  return out;
}

namespace {

json pair_to_json(const SentencePair& p) {
  json j;
  j["src"] = p.src;
  j["tgt"] = p.tgt;
  j["lang_pair"] = p.lang_pair;
  j["session_date"] =
      p.session_date ? json(p.session_date->to_string()) : json(nullptr);
  j["speaker_name_raw"] = p.speaker_name_raw;
  j["mep_id"] = p.speaker ? json(p.speaker->mep_id) : json(nullptr);
  if (p.speaker && p.speaker->gender != Gender::Unknown) {
    j["gender"] = gender_code(p.speaker->gender);
  } else {
    j["gender"] = nullptr;
  }
  j["age"] = p.age_years ? json(*p.age_years) : json(nullptr);
  return j;
}

}  // namespace

void write_corpus_jsonl(const AnnotatedCorpus& corpus, std::ostream& out) {
  for (const auto& p : corpus.pairs) {
    out << pair_to_json(p).dump() << '\n';
  }
}

std::string corpus_stats_str(const AnnotatedCorpus& corpus) {
  std::size_t male = 0, female = 0, unknown = 0;
  for (const auto& p : corpus.pairs) {
    switch (p.gender()) {
      case Gender::Male: ++male; break;
      case Gender::Female: ++female; break;
      default: ++unknown; break;
    }
  }
  json j;
  j["lang_pair"] = corpus.lang_pair;
  j["total_pairs"] = corpus.pairs.size();
  j["unresolved_count"] = corpus.unresolved_count;
  j["gender_counts"] = {{"male", male}, {"female", female}, {"unknown", unknown}};
  json prov = json::object();
  for (const auto& [file, count] : corpus.provenance) prov[file] = count;
  j["provenance"] = prov;
  return j.dump(2) + "\n";
}

void save_corpus(const AnnotatedCorpus& corpus,
                 const std::filesystem::path& jsonl_path,
                 const std::filesystem::path& stats_path) {
  std::ostringstream ss;
  write_corpus_jsonl(corpus, ss);
  write_file(jsonl_path, ss.str());
  write_file(stats_path, corpus_stats_str(corpus));
}

AnnotatedCorpus load_corpus_jsonl(const std::filesystem::path& jsonl_path) {
  AnnotatedCorpus corpus;
  std::size_t id = 0;
  for (const auto& line : read_lines(jsonl_path)) {
    if (trim(line).empty()) continue;
    json j = json::parse(line);
    SentencePair p;
    p.id = id++;
    p.src = j.at("src").get<std::string>();
    p.tgt = j.at("tgt").get<std::string>();
    p.lang_pair = j.at("lang_pair").get<std::string>();
    if (!j.at("session_date").is_null()) {
      p.session_date = Date::parse_iso(j["session_date"].get<std::string>());
    }
    p.speaker_name_raw = j.value("speaker_name_raw", std::string());
    if (!j.at("mep_id").is_null()) {
      SpeakerRecord rec;
      rec.mep_id = j["mep_id"].get<std::string>();
      rec.name = p.speaker_name_raw;
      rec.name_key = normalize_name(rec.name);
      if (!j.at("gender").is_null()) {
        auto g = gender_from_code(j["gender"].get<std::string>());
        rec.gender = g.value_or(Gender::Unknown);
      }
      p.speaker = std::move(rec);
    }
    if (!j.at("age").is_null()) p.age_years = j["age"].get<int>();
    if (corpus.lang_pair.empty()) corpus.lang_pair = p.lang_pair;
    corpus.pairs.push_back(std::move(p));
  }
  corpus.refresh_counts();
  return corpus;
}

}  // namespace tagmt
