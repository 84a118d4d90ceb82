#include "tagmt/europarl.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "tagmt/io.hpp"
#include "tagmt/text.hpp"

namespace tagmt {
namespace europarl {

namespace {

struct MarkupTag {
  std::string name;                           // uppercased
  std::map<std::string, std::string> attrs;   // keys uppercased
};

// Parses a "<NAME KEY=value KEY="value" ...>" line.
MarkupTag parse_markup_line(const std::string& line, const std::string& where) {
  if (line.size() < 2 || line.front() != '<' || line.back() != '>') {
    throw MalformedMarkup(where + ": unterminated markup line: " + line);
  }
  std::string_view body(line);
  body = body.substr(1, body.size() - 2);
  MarkupTag tag;
  std::size_t i = 0;
  while (i < body.size() && !std::isspace(static_cast<unsigned char>(body[i]))) {
    tag.name.push_back(static_cast<char>(
        std::toupper(static_cast<unsigned char>(body[i]))));
    ++i;
  }
  if (tag.name.empty()) {
    throw MalformedMarkup(where + ": empty markup tag");
  }
  while (i < body.size()) {
    while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i])))
      ++i;
    if (i >= body.size()) break;
    std::string key;
    while (i < body.size() && body[i] != '=' &&
           !std::isspace(static_cast<unsigned char>(body[i]))) {
      key.push_back(static_cast<char>(
          std::toupper(static_cast<unsigned char>(body[i]))));
      ++i;
    }
    if (key.empty() || i >= body.size() || body[i] != '=') {
      throw MalformedMarkup(where + ": unparseable attribute list: " + line);
    }
    ++i;  // '='
    std::string value;
    if (i < body.size() && body[i] == '"') {
      ++i;
      std::size_t close = body.find('"', i);
      if (close == std::string_view::npos) {
        throw MalformedMarkup(where + ": unclosed attribute quote: " + line);
      }
      value = std::string(body.substr(i, close - i));
      i = close + 1;
    } else {
      std::size_t start = i;
      while (i < body.size() &&
             !std::isspace(static_cast<unsigned char>(body[i])))
        ++i;
      value = std::string(body.substr(start, i - start));
    }
    tag.attrs[key] = value;
  }
  return tag;
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      if (start < text.size()) lines.emplace_back(text.substr(start));
      break;
    }
    lines.emplace_back(text.substr(start, end - start));
    start = end + 1;
  }
  for (auto& l : lines) {
    if (!l.empty() && l.back() == '\r') l.pop_back();
  }
  return lines;
}

std::string basename_of(const std::string& filename) {
  return std::filesystem::path(filename).filename().string();
}

void diag(std::ostream* out, const std::string& msg) {
  if (out) *out << msg << '\n';
}

std::vector<std::string> block_sentences(const SpeakerBlock& block) {
  std::vector<std::string> sents;
  for (const auto& para : block.paragraphs) {
    for (const auto& line : split_lines(para)) {
      if (!line.empty()) sents.push_back(line);
    }
  }
  return sents;
}

}  // namespace

std::vector<SpeakerBlock> parse_session_file(std::string_view raw_text,
                                             const std::string& filename) {
  std::vector<SpeakerBlock> blocks;
  SpeakerBlock current;  // name "" until the first SPEAKER marker
  std::vector<std::string> paragraph;

  auto flush_paragraph = [&]() {
    if (!paragraph.empty()) {
      current.paragraphs.push_back(join(paragraph, '\n'));
      paragraph.clear();
    }
  };
  auto flush_block = [&]() {
    flush_paragraph();
    if (!current.paragraphs.empty()) blocks.push_back(std::move(current));
    current = SpeakerBlock{};
  };

  std::size_t lineno = 0;
  for (const auto& raw_line : split_lines(raw_text)) {
    ++lineno;
    std::string line = trim(raw_line);
    if (line.empty()) continue;
    if (line.front() == '<') {
      const std::string where = filename + ":" + std::to_string(lineno);
      MarkupTag tag = parse_markup_line(line, where);
      if (tag.name == "SPEAKER") {
        flush_block();
        auto it = tag.attrs.find("NAME");
        current.speaker_name_raw = it != tag.attrs.end() ? it->second : "";
      } else if (tag.name == "CHAPTER") {
        flush_block();  // chapter headings are unattributed
      } else if (tag.name == "P") {
        flush_paragraph();
      } else {
        throw MalformedMarkup(where + ": unsupported markup <" + tag.name + ">");
      }
    } else {
      paragraph.push_back(line);
    }
  }
  flush_block();
  return blocks;
}

Date parse_session_date(const std::string& filename) {
  auto date = try_parse_session_date(filename);
  if (!date) {
    throw UnparseableFilename("not an ep-YY-MM-DD session filename: " +
                              filename);
  }
  return *date;
}

std::optional<Date> try_parse_session_date(const std::string& filename) {
  const std::string base = basename_of(filename);
  // ep-YY-MM-DD with anything (extension, part suffix) after the day.
  if (base.size() < 11 || base.compare(0, 3, "ep-") != 0) return std::nullopt;
  auto two_digits = [&](std::size_t pos, int& out) {
    if (!std::isdigit(static_cast<unsigned char>(base[pos])) ||
        !std::isdigit(static_cast<unsigned char>(base[pos + 1]))) {
      return false;
    }
    out = (base[pos] - '0') * 10 + (base[pos + 1] - '0');
    return true;
  };
  int yy = 0, mm = 0, dd = 0;
  if (!two_digits(3, yy) || base[5] != '-' || !two_digits(6, mm) ||
      base[8] != '-' || !two_digits(9, dd)) {
    return std::nullopt;
  }
  if (base.size() > 11 && base[11] != '.' && base[11] != '-') {
    return std::nullopt;
  }
  Date d;
  if (yy >= 96) {
    d.year = 1900 + yy;
  } else if (yy <= 11) {
    d.year = 2000 + yy;
  } else {
    return std::nullopt;  // outside the release span
  }
  d.month = mm;
  d.day = dd;
  if (!d.valid()) return std::nullopt;
  return d;
}

int compute_age(const Date& dob, const Date& session_date) {
  if (!(dob < session_date)) {
    throw AgeOutOfRange("date of birth " + dob.to_string() +
                        " not before session " + session_date.to_string());
  }
  int age = years_between(dob, session_date);
  if (age < kMinAge || age > kMaxAge) {
    throw AgeOutOfRange("age " + std::to_string(age) + " outside [" +
                        std::to_string(kMinAge) + ", " +
                        std::to_string(kMaxAge) + "]");
  }
  return age;
}

SpeakerTable SpeakerTable::build(std::vector<SpeakerRecord> records,
                                 std::ostream* diagnostics) {
  std::map<std::string, std::size_t> key_counts;
  for (const auto& r : records) ++key_counts[r.name_key];

  SpeakerTable table;
  for (auto& r : records) {
    if (key_counts[r.name_key] > 1) continue;
    table.by_key_[r.name_key] = table.records_.size();
    table.records_.push_back(std::move(r));
  }
  for (const auto& [key, count] : key_counts) {
    if (count > 1) {
      diag(diagnostics, "speaker table: dropped " + std::to_string(count) +
                            " records sharing name key '" + key + "'");
    }
  }
  return table;
}

const SpeakerRecord* SpeakerTable::find_exact(
    const std::string& name_key) const {
  auto it = by_key_.find(name_key);
  return it == by_key_.end() ? nullptr : &records_[it->second];
}

const SpeakerRecord* SpeakerTable::find_fuzzy(const std::string& name_key,
                                              std::size_t max_distance) const {
  const SpeakerRecord* found = nullptr;
  for (const auto& r : records_) {
    if (levenshtein_capped(name_key, r.name_key, max_distance) <=
        max_distance) {
      if (found) return nullptr;  // ambiguous
      found = &r;
    }
  }
  return found;
}

std::vector<SpeakerRecord> load_speaker_records(
    const std::filesystem::path& tsv_path, std::ostream* diagnostics) {
  auto lines = read_lines(tsv_path);
  if (lines.empty()) {
    throw SpeakerTableError("empty speaker table: " + tsv_path.string());
  }
  static const std::string kHeader = "mep_id\tname\tgender\tdate_of_birth\tcountry";
  if (lines[0] != kHeader) {
    throw SpeakerTableError("bad speaker table header in " + tsv_path.string() +
                            ": " + lines[0]);
  }
  std::vector<SpeakerRecord> records;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    const std::string where =
        tsv_path.string() + ":" + std::to_string(i + 1);
    if (fields.size() != 5) {
      diag(diagnostics, where + ": expected 5 fields, got " +
                            std::to_string(fields.size()) + "; row skipped");
      continue;
    }
    SpeakerRecord rec;
    rec.mep_id = trim(fields[0]);
    rec.name = trim(fields[1]);
    rec.name_key = normalize_name(rec.name);
    auto g = gender_from_code(trim(fields[2]));
    if (!g) {
      diag(diagnostics, where + ": bad gender '" + fields[2] + "'; row skipped");
      continue;
    }
    rec.gender = *g;
    std::string dob = trim(fields[3]);
    if (!dob.empty()) {
      rec.date_of_birth = Date::parse_iso(dob);
      if (!rec.date_of_birth) {
        diag(diagnostics, where + ": bad date_of_birth '" + dob +
                              "'; kept without dob");
      }
    }
    rec.country = trim(fields[4]);
    if (rec.name_key.empty()) {
      diag(diagnostics, where + ": empty name; row skipped");
      continue;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

SpeakerTable load_speaker_table(const std::filesystem::path& tsv_path,
                                std::ostream* diagnostics) {
  return SpeakerTable::build(load_speaker_records(tsv_path, diagnostics),
                             diagnostics);
}

const SpeakerRecord* resolve_speaker(const std::string& speaker_name_raw,
                                     const SpeakerTable& table,
                                     const ResolveOptions& opts) {
  const std::string key = normalize_name(speaker_name_raw);
  if (key.empty()) return nullptr;
  if (const SpeakerRecord* rec = table.find_exact(key)) return rec;
  if (opts.enable_fuzzy) return table.find_fuzzy(key, opts.max_distance);
  return nullptr;
}

AnnotatedCorpus annotate_corpus(std::span<const SessionFile> src_files,
                                std::span<const SessionFile> tgt_files,
                                const SpeakerTable& table,
                                const std::string& lang_pair,
                                const IngestOptions& opts) {
  std::ostream* log = opts.diagnostics;

  std::map<std::string, const SessionFile*> src_by_name, tgt_by_name;
  for (const auto& f : src_files) src_by_name[basename_of(f.filename)] = &f;
  for (const auto& f : tgt_files) tgt_by_name[basename_of(f.filename)] = &f;
  for (const auto& [name, f] : tgt_by_name) {
    if (!src_by_name.count(name)) {
      diag(log, name + ": no source-side counterpart; skipped");
    }
  }

  AnnotatedCorpus corpus;
  corpus.lang_pair = lang_pair;

  std::unordered_map<std::string, const SpeakerRecord*> memo;
  auto resolve_memo = [&](const std::string& raw) {
    auto it = memo.find(raw);
    if (it != memo.end()) return it->second;
    const SpeakerRecord* rec = resolve_speaker(raw, table, opts.resolve);
    memo.emplace(raw, rec);
    return rec;
  };

  std::size_t next_id = 0;
  for (const auto& [name, src_file] : src_by_name) {
    auto tgt_it = tgt_by_name.find(name);
    if (tgt_it == tgt_by_name.end()) {
      diag(log, name + ": no target-side counterpart; skipped");
      continue;
    }
    std::vector<SpeakerBlock> src_blocks, tgt_blocks;
    try {
      src_blocks = parse_session_file(src_file->text, name);
      tgt_blocks = parse_session_file(tgt_it->second->text, name);
    } catch (const MalformedMarkup& e) {
      diag(log, std::string("malformed markup, file skipped: ") + e.what());
      continue;
    }
    auto session_date = try_parse_session_date(name);
    if (!session_date) {
      diag(log, name + ": unparseable session date; ages not derived");
    }
    if (src_blocks.size() != tgt_blocks.size()) {
      diag(log, name + ": block counts differ (" +
                    std::to_string(src_blocks.size()) + " vs " +
                    std::to_string(tgt_blocks.size()) +
                    "); trailing blocks dropped");
    }
    const std::size_t n_blocks = std::min(src_blocks.size(), tgt_blocks.size());
    std::size_t emitted = 0;
    for (std::size_t bi = 0; bi < n_blocks; ++bi) {
      const SpeakerBlock& sb = src_blocks[bi];
      if (sb.speaker_name_raw.empty()) continue;  // unattributed content
      auto src_sents = block_sentences(sb);
      auto tgt_sents = block_sentences(tgt_blocks[bi]);
      if (src_sents.size() != tgt_sents.size()) {
        diag(log, name + ": alignment mismatch in block " +
                      std::to_string(bi) + " (" +
                      std::to_string(src_sents.size()) + " vs " +
                      std::to_string(tgt_sents.size()) + "); block dropped");
        continue;
      }
      const SpeakerRecord* rec = resolve_memo(sb.speaker_name_raw);
      for (std::size_t si = 0; si < src_sents.size(); ++si) {
        SentencePair pair;
        pair.id = next_id++;
        pair.src = src_sents[si];
        pair.tgt = tgt_sents[si];
        pair.lang_pair = lang_pair;
        pair.session_date = session_date;
        pair.speaker_name_raw = sb.speaker_name_raw;
        if (rec) {
          pair.speaker = *rec;
          if (rec->date_of_birth && session_date) {
            try {
              pair.age_years = compute_age(*rec->date_of_birth, *session_date);
            } catch (const AgeOutOfRange& e) {
              diag(log, name + ": " + sb.speaker_name_raw + ": " + e.what() +
                            "; age dropped");
            }
          }
        }
        corpus.pairs.push_back(std::move(pair));
        ++emitted;
      }
    }
    if (emitted) corpus.provenance[name] += emitted;
  }
  corpus.refresh_counts();
  return corpus;
}

AnnotatedCorpus annotate_corpus_dirs(const std::filesystem::path& src_dir,
                                     const std::filesystem::path& tgt_dir,
                                     const SpeakerTable& table,
                                     const std::string& lang_pair,
                                     const IngestOptions& opts) {
  auto load_dir = [](const std::filesystem::path& dir) {
    std::vector<SessionFile> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      files.push_back(
          {entry.path().filename().string(), read_file(entry.path())});
    }
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.filename < b.filename; });
    return files;
  };
  auto src_files = load_dir(src_dir);
  auto tgt_files = load_dir(tgt_dir);
  return annotate_corpus(src_files, tgt_files, table, lang_pair, opts);
}

}  // namespace europarl
}  // namespace tagmt
