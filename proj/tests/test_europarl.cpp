#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "tagmt/europarl.hpp"
#include "tagmt/io.hpp"
#include "tagmt/rng.hpp"
#include "tagmt/text.hpp"
#include "test_util.hpp"

using namespace tagmt;
using namespace tagmt::europarl;

namespace {

const char* kTableTsv =
    "mep_id\tname\tgender\tdate_of_birth\tcountry\n"
    "1902\tEvans, Robert J.E.\tM\t1949-10-23\tUnited Kingdom\n"
    "1309\tB\xc3\xa9r\xc3\xa8s, Pervenche\tF\t1957-03-10\tFrance\n"
    "2222\tDoe, Alexis\t?\t\tNowhere\n";

SpeakerTable fixture_table() {
  test_util::TempDir dir("table");
  auto p = dir.file("meps.tsv", kTableTsv);
  return load_speaker_table(p);
}

SpeakerRecord make_record(const std::string& id, const std::string& name,
                          Gender g) {
  return {id, name, normalize_name(name), g, std::nullopt, ""};
}

}  // namespace

TEST_CASE("parse_session_file: one speaker, two paragraphs") {
  const std::string text =
      "<SPEAKER ID=1 LANGUAGE=\"EN\" NAME=\"Evans, Robert J.E.\">\n"
      "First sentence .\n"
      "Second sentence .\n"
      "<P>\n"
      "Third sentence .\n";
  auto blocks = parse_session_file(text, "ep-00-01-17.txt");
  REQUIRE(blocks.size() == 1);
  CHECK(blocks[0].speaker_name_raw == "Evans, Robert J.E.");
  REQUIRE(blocks[0].paragraphs.size() == 2);
  CHECK(blocks[0].paragraphs[0] == "First sentence .\nSecond sentence .");
  CHECK(blocks[0].paragraphs[1] == "Third sentence .");
}

TEST_CASE("parse_session_file: empty file") {
  CHECK(parse_session_file("", "x.txt").empty());
}

TEST_CASE("parse_session_file: two speakers partition the paragraphs") {
  const std::string text =
      "<SPEAKER ID=1 NAME=\"A\">\n"
      "a one .\n"
      "<P>\n"
      "a two .\n"
      "<SPEAKER ID=2 NAME=\"B\">\n"
      "b one .\n";
  auto blocks = parse_session_file(text, "f");
  REQUIRE(blocks.size() == 2);
  CHECK(blocks[0].speaker_name_raw == "A");
  CHECK(blocks[0].paragraphs ==
        std::vector<std::string>{"a one .", "a two ."});
  CHECK(blocks[1].speaker_name_raw == "B");
  CHECK(blocks[1].paragraphs == std::vector<std::string>{"b one ."});
}

TEST_CASE("parse_session_file: pre-speaker and chapter content is unattributed") {
  const std::string text =
      "<CHAPTER ID=1>\n"
      "Resumption of the session\n"
      "<SPEAKER ID=1 NAME=\"A\">\n"
      "hello .\n"
      "<CHAPTER ID=2>\n"
      "Agenda\n";
  auto blocks = parse_session_file(text, "f");
  REQUIRE(blocks.size() == 3);
  CHECK(blocks[0].speaker_name_raw == "");
  CHECK(blocks[1].speaker_name_raw == "A");
  CHECK(blocks[2].speaker_name_raw == "");
}

TEST_CASE("parse_session_file: malformed markup throws") {
  CHECK_THROWS_AS(
      (void)parse_session_file("<SPEAKER ID=1 NAME=\"x\n", "f"),
      MalformedMarkup);
  CHECK_THROWS_AS(
      (void)parse_session_file("<SPEAKER ID=1 NAME=\"unclosed>\n", "f"),
      MalformedMarkup);
  CHECK_THROWS_AS((void)parse_session_file("<BRK>\n", "f"), MalformedMarkup);
  CHECK_THROWS_AS((void)parse_session_file("<SPEAKER =1>\n", "f"),
                  MalformedMarkup);
}

TEST_CASE("document order is preserved across blocks") {
  Rng rng(5);
  for (int iter = 0; iter < 30; ++iter) {
    std::vector<std::string> expected_paragraphs;
    std::string text;
    int paragraph_no = 0;
    std::size_t blocks = 1 + rng.below(5);
    for (std::size_t b = 0; b < blocks; ++b) {
      text += "<SPEAKER ID=" + std::to_string(b) + " NAME=\"S" +
              std::to_string(b) + "\">\n";
      std::size_t paras = 1 + rng.below(3);
      for (std::size_t p = 0; p < paras; ++p) {
        if (p) text += "<P>\n";
        std::string para = "sentence " + std::to_string(paragraph_no++);
        expected_paragraphs.push_back(para);
        text += para + "\n";
      }
    }
    auto parsed = parse_session_file(text, "f");
    std::vector<std::string> actual;
    for (const auto& block : parsed) {
      for (const auto& para : block.paragraphs) actual.push_back(para);
    }
    CHECK(actual == expected_paragraphs);
  }
}

TEST_CASE("session dates follow the two-digit year pivot") {
  CHECK(parse_session_date("ep-00-01-17.txt") == Date{2000, 1, 17});
  CHECK(parse_session_date("ep-96-04-15.txt") == Date{1996, 4, 15});
  CHECK(parse_session_date("ep-11-12-31") == Date{2011, 12, 31});
  CHECK(parse_session_date("some/dir/ep-07-05-09.txt") == Date{2007, 5, 9});
  CHECK_THROWS_AS((void)parse_session_date("notes.txt"), UnparseableFilename);
  CHECK_THROWS_AS((void)parse_session_date("ep-12-01-01.txt"),
                  UnparseableFilename);  // outside the release span
  CHECK_THROWS_AS((void)parse_session_date("ep-00-02-30.txt"),
                  UnparseableFilename);
  CHECK_THROWS_AS((void)parse_session_date("ep-00-01-171.txt"),
                  UnparseableFilename);
}

TEST_CASE("compute_age counts completed years and rejects outliers") {
  CHECK(compute_age(Date{1950, 6, 1}, Date{2000, 5, 31}) == 49);
  CHECK(compute_age(Date{1950, 6, 1}, Date{2000, 6, 1}) == 50);
  CHECK_THROWS_AS((void)compute_age(Date{1990, 1, 1}, Date{1996, 1, 1}),
                  AgeOutOfRange);
  CHECK_THROWS_AS((void)compute_age(Date{1850, 1, 1}, Date{2000, 1, 1}),
                  AgeOutOfRange);
  CHECK_THROWS_AS((void)compute_age(Date{2000, 1, 1}, Date{1996, 1, 1}),
                  AgeOutOfRange);
}

TEST_CASE("speaker table load and lookup") {
  auto table = fixture_table();
  REQUIRE(table.size() == 3);
  const auto* rec = table.find_exact(normalize_name("Evans, Robert J.E."));
  REQUIRE(rec != nullptr);
  CHECK(rec->mep_id == "1902");
  CHECK(rec->gender == Gender::Male);
  REQUIRE(rec->date_of_birth.has_value());
  CHECK(rec->date_of_birth->year == 1949);

  const auto* unknown = table.find_exact(normalize_name("Doe, Alexis"));
  REQUIRE(unknown != nullptr);
  CHECK(unknown->gender == Gender::Unknown);
  CHECK(!unknown->date_of_birth.has_value());
}

TEST_CASE("speaker table rejects bad headers and drops duplicate keys") {
  test_util::TempDir dir("table2");
  CHECK_THROWS_AS(
      (void)load_speaker_table(dir.file("bad.tsv", "id\tname\n1\tx\n")),
      SpeakerTableError);

  std::ostringstream diag;
  auto p = dir.file("dup.tsv",
                    "mep_id\tname\tgender\tdate_of_birth\tcountry\n"
                    "1\tSmith, John\tM\t\tUK\n"
                    "2\tSMITH, John\tF\t\tUK\n"
                    "3\tOther, Ann\tF\t\tIE\n");
  auto table = load_speaker_table(p, &diag);
  CHECK(table.size() == 1);  // the colliding pair is dropped
  CHECK(table.find_exact("other ann") != nullptr);
  CHECK(diag.str().find("smith john") != std::string::npos);
}

TEST_CASE("resolve_speaker: normalization, fuzzy and ambiguity") {
  auto table = fixture_table();
  // Case/spacing differences collapse to the same key.
  const auto* rec = resolve_speaker("EVANS, Robert J. E.", table);
  REQUIRE(rec != nullptr);
  CHECK(rec->mep_id == "1902");

  CHECK(resolve_speaker("Nobody, Known", table) == nullptr);

  // One edit away: only found when fuzzy matching is enabled.
  CHECK(resolve_speaker("Evans, Robert J.F.", table) == nullptr);
  ResolveOptions fuzzy{true, 2};
  const auto* fz = resolve_speaker("Evans, Robert J.F.", table, fuzzy);
  REQUIRE(fz != nullptr);
  CHECK(fz->mep_id == "1902");

  // Two candidates at distance 1 stay unresolved.
  auto ambiguous = SpeakerTable::build(
      {make_record("1", "aaa", Gender::Male),
       make_record("2", "aab", Gender::Female)});
  CHECK(resolve_speaker("aac", ambiguous, fuzzy) == nullptr);
}

TEST_CASE("resolution is monotone in the table (fuzzy off)") {
  std::vector<std::string> names = {"Alpha, A", "Beta, B",  "Gamma, C",
                                    "Delta, D", "Omega, E", "Sigma, F"};
  std::vector<std::string> queries = {"ALPHA, A", "Beta, B", "Missing, X",
                                      "omega, e", "Sigma, F", "Tau, T"};
  Rng rng(11);
  for (int iter = 0; iter < 50; ++iter) {
    std::vector<SpeakerRecord> subset, superset;
    for (std::size_t i = 0; i < names.size(); ++i) {
      auto rec = make_record(std::to_string(i), names[i], Gender::Male);
      bool in_subset = rng.coin();
      if (in_subset) subset.push_back(rec);
      if (in_subset || rng.coin()) superset.push_back(rec);
    }
    auto small = SpeakerTable::build(subset);
    auto big = SpeakerTable::build(superset);
    std::size_t small_hits = 0, big_hits = 0;
    for (const auto& q : queries) {
      if (resolve_speaker(q, small)) ++small_hits;
      if (resolve_speaker(q, big)) ++big_hits;
    }
    CHECK(big_hits >= small_hits);
  }
}

namespace {

const char* kSrcSession =
    "<CHAPTER ID=1>\n"
    "Resumption of the session\n"
    "<SPEAKER ID=1 LANGUAGE=\"EN\" NAME=\"Evans, Robert J.E.\">\n"
    "Madam President , I rise on a point .\n"
    "The second sentence follows .\n"
    "<P>\n"
    "A third one closes .\n"
    "<SPEAKER ID=2 NAME=\"B\xc3\xa9r\xc3\xa8s, Pervenche\">\n"
    "I agree entirely .\n"
    "We must act now .\n"
    "So be it .\n";

const char* kTgtSession =
    "<CHAPTER ID=1>\n"
    "Reprise de la session\n"
    "<SPEAKER ID=1 LANGUAGE=\"EN\" NAME=\"Evans, Robert J.E.\">\n"
    "Madame la Pr\xc3\xa9sidente , je me l\xc3\xa8ve .\n"
    "La deuxi\xc3\xa8me phrase suit .\n"
    "<P>\n"
    "Une troisi\xc3\xa8me conclut .\n"
    "<SPEAKER ID=2 NAME=\"B\xc3\xa9r\xc3\xa8s, Pervenche\">\n"
    "Je suis d'accord .\n"
    "Nous devons agir .\n"
    "Ainsi soit-il .\n";

AnnotatedCorpus fixture_corpus(std::ostream* diag = nullptr) {
  test_util::TempDir dir("annot");
  auto table = load_speaker_table(dir.file("meps.tsv", kTableTsv));
  std::vector<SessionFile> src = {{"ep-00-01-17.txt", kSrcSession}};
  std::vector<SessionFile> tgt = {{"ep-00-01-17.txt", kTgtSession}};
  IngestOptions opts;
  opts.diagnostics = diag;
  return annotate_corpus(src, tgt, table, "EN-FR", opts);
}

}  // namespace

TEST_CASE("annotate_corpus aligns blocks and resolves speakers") {
  auto corpus = fixture_corpus();
  REQUIRE(corpus.size() == 6);
  CHECK(corpus.lang_pair == "EN-FR");
  CHECK(corpus.unresolved_count == 0);
  CHECK(corpus.provenance.at("ep-00-01-17.txt") == 6);

  const auto& first = corpus.pairs[0];
  CHECK(first.src == "Madam President , I rise on a point .");
  CHECK(first.tgt == "Madame la Pr\xc3\xa9sidente , je me l\xc3\xa8ve .");
  CHECK(first.speaker_name_raw == "Evans, Robert J.E.");
  REQUIRE(first.speaker.has_value());
  CHECK(first.speaker->gender == Gender::Male);
  REQUIRE(first.session_date.has_value());
  CHECK(*first.session_date == Date{2000, 1, 17});
  REQUIRE(first.age_years.has_value());
  CHECK(*first.age_years == 50);  // born 1949-10-23, session 2000-01-17

  const auto& fourth = corpus.pairs[3];
  CHECK(fourth.speaker_name_raw == "B\xc3\xa9r\xc3\xa8s, Pervenche");
  REQUIRE(fourth.speaker.has_value());
  CHECK(fourth.speaker->gender == Gender::Female);
  CHECK(*fourth.age_years == 42);

  // Age consistency: stored ages must recompute from dob and session date.
  for (const auto& p : corpus.pairs) {
    if (p.age_years) {
      REQUIRE(p.speaker.has_value());
      CHECK(compute_age(*p.speaker->date_of_birth, *p.session_date) ==
            *p.age_years);
    }
  }
}

TEST_CASE("annotate_corpus: unresolved speakers are kept and counted") {
  test_util::TempDir dir("annot2");
  auto table = load_speaker_table(dir.file("meps.tsv", kTableTsv));
  const std::string session =
      "<SPEAKER ID=1 NAME=\"Unknown, Person\">\nhello .\n";
  std::vector<SessionFile> src = {{"ep-01-02-03.txt", session}};
  std::vector<SessionFile> tgt = {{"ep-01-02-03.txt", session}};
  auto corpus = annotate_corpus(src, tgt, table, "EN-FR");
  REQUIRE(corpus.size() == 1);
  CHECK(corpus.unresolved_count == 1);
  CHECK(!corpus.pairs[0].speaker.has_value());
  CHECK(corpus.pairs[0].gender() == Gender::Unknown);
}

TEST_CASE("annotate_corpus: mismatched blocks are dropped with a diagnostic") {
  test_util::TempDir dir("annot3");
  auto table = load_speaker_table(dir.file("meps.tsv", kTableTsv));
  const std::string src_text =
      "<SPEAKER ID=1 NAME=\"A\">\none .\ntwo .\n"
      "<SPEAKER ID=2 NAME=\"B\">\nthree .\n";
  const std::string tgt_text =
      "<SPEAKER ID=1 NAME=\"A\">\nun .\n"  // one sentence short
      "<SPEAKER ID=2 NAME=\"B\">\ntrois .\n";
  std::ostringstream diag;
  IngestOptions opts;
  opts.diagnostics = &diag;
  std::vector<SessionFile> src = {{"ep-00-01-17.txt", src_text}};
  std::vector<SessionFile> tgt = {{"ep-00-01-17.txt", tgt_text}};
  auto corpus = annotate_corpus(src, tgt, table, "EN-FR", opts);
  REQUIRE(corpus.size() == 1);  // block A dropped, block B kept
  CHECK(corpus.pairs[0].src == "three .");
  CHECK(diag.str().find("alignment mismatch") != std::string::npos);
}

TEST_CASE("annotate_corpus: malformed files are skipped, not fatal") {
  test_util::TempDir dir("annot4");
  auto table = load_speaker_table(dir.file("meps.tsv", kTableTsv));
  std::vector<SessionFile> src = {{"ep-00-01-17.txt", "<BOGUS>\nx\n"},
                                  {"ep-00-01-18.txt", kSrcSession}};
  std::vector<SessionFile> tgt = {{"ep-00-01-17.txt", "<BOGUS>\nx\n"},
                                  {"ep-00-01-18.txt", kTgtSession}};
  std::ostringstream diag;
  IngestOptions opts;
  opts.diagnostics = &diag;
  auto corpus = annotate_corpus(src, tgt, table, "EN-FR", opts);
  CHECK(corpus.size() == 6);
  CHECK(diag.str().find("malformed markup") != std::string::npos);
}

TEST_CASE("serialized corpora are byte-identical across runs") {
  auto corpus1 = fixture_corpus();
  auto corpus2 = fixture_corpus();
  std::ostringstream out1, out2;
  write_corpus_jsonl(corpus1, out1);
  write_corpus_jsonl(corpus2, out2);
  CHECK(out1.str() == out2.str());
  CHECK(corpus_stats_str(corpus1) == corpus_stats_str(corpus2));

  // Golden first line, pinned: field order is alphabetical and stable.
  auto first_newline = out1.str().find('\n');
  CHECK(out1.str().substr(0, first_newline) ==
        R"({"age":50,"gender":"M","lang_pair":"EN-FR","mep_id":"1902",)"
        R"("session_date":"2000-01-17","speaker_name_raw":"Evans, Robert J.E.",)"
        R"("src":"Madam President , I rise on a point .",)"
        R"("tgt":"Madame la Présidente , je me lève ."})");
}

TEST_CASE("jsonl round-trip preserves pair annotations") {
  test_util::TempDir dir("annot5");
  auto corpus = fixture_corpus();
  save_corpus(corpus, dir.path / "c.jsonl", dir.path / "c.stats.json");
  auto loaded = load_corpus_jsonl(dir.path / "c.jsonl");
  REQUIRE(loaded.size() == corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    CHECK(loaded.pairs[i].src == corpus.pairs[i].src);
    CHECK(loaded.pairs[i].tgt == corpus.pairs[i].tgt);
    CHECK(loaded.pairs[i].gender() == corpus.pairs[i].gender());
    CHECK(loaded.pairs[i].age_years == corpus.pairs[i].age_years);
    CHECK(loaded.pairs[i].session_date == corpus.pairs[i].session_date);
  }
  CHECK(loaded.unresolved_count == corpus.unresolved_count);
}
