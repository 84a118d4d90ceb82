// tagmt: pipeline toolkit for speaker-tagged parallel corpora, gender-tagged
// NMT data preparation and desk-scale evaluation.

#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tagmt/analysis.hpp"
#include "tagmt/bpe.hpp"
#include "tagmt/corpus.hpp"
#include "tagmt/dataset.hpp"
#include "tagmt/europarl.hpp"
#include "tagmt/eval.hpp"
#include "tagmt/io.hpp"
#include "tagmt/pipeline.hpp"
#include "tagmt/seq2seq.hpp"
#include "tagmt/text.hpp"
#include "tagmt/version.hpp"

namespace {

using namespace tagmt;

std::set<std::string> csv_set(const std::string& csv) {
  std::set<std::string> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t comma = csv.find(',', start);
    std::string tok = trim(csv.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!tok.empty()) out.insert(tok);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

int run_pipeline(const std::string& config_path, const std::string& stages_csv) {
  std::vector<pipeline::Stage> stages;
  if (stages_csv.empty()) {
    stages = pipeline::all_stages();
  } else {
    for (const auto& name : csv_set(stages_csv)) {
      auto stage = pipeline::stage_from_name(name);
      if (!stage) {
        std::cerr << "unknown stage: " << name << '\n';
        return 2;
      }
      stages.push_back(*stage);
    }
  }
  try {
    auto cfg = pipeline::PipelineConfig::load(config_path);
    pipeline::Pipeline pipe(std::move(cfg), std::cerr);
    pipe.run(stages);
    return 0;
  } catch (const pipeline::ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const pipeline::StageFailed& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"speaker-tagged corpus and gender-tag NMT pipeline"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand(
      "ingest", "parse session files and emit an annotated corpus");
  std::string in_src_dir, in_tgt_dir, in_table, in_lang = "EN-XX";
  std::string in_corpus = "corpus.jsonl", in_stats = "corpus.stats.json";
  bool in_fuzzy = false;
  ingest->add_option("--src-dir", in_src_dir, "source session file directory")
      ->required();
  ingest->add_option("--tgt-dir", in_tgt_dir, "target session file directory")
      ->required();
  ingest->add_option("--table", in_table, "speaker metadata TSV")->required();
  ingest->add_option("--lang-pair", in_lang, "language pair tag");
  ingest->add_option("--out-corpus", in_corpus, "output JSONL path");
  ingest->add_option("--out-stats", in_stats, "output stats JSON path");
  ingest->add_flag("--fuzzy", in_fuzzy, "enable fuzzy speaker matching");

  // analyze
  auto* analyze = app.add_subcommand(
      "analyze", "gender shares, age histogram and rank tables");
  std::string an_corpus, an_json_out, an_csv_out;
  bool an_json = false;
  analyze->add_option("--corpus", an_corpus, "annotated corpus JSONL")
      ->required();
  analyze->add_option("--json-out", an_json_out, "write the JSON report here");
  analyze->add_option("--csv-out", an_csv_out, "write the histogram CSV here");
  analyze->add_flag("--json", an_json, "print the JSON report to stdout");

  // build
  auto* build = app.add_subcommand(
      "build", "training corpus and general/M/F/M1/F1 test sets");
  std::string b_corpus, b_outdir = "datasets", b_pronouns = "I";
  std::size_t b_test_size = 2000, b_gender_size = 2000, b_fp_size = 0;
  std::uint64_t b_seed = 0;
  bool b_tagged = false, b_keep_unknown = false;
  build->add_option("--corpus", b_corpus, "annotated corpus JSONL")->required();
  build->add_option("--out-dir", b_outdir, "output directory");
  build->add_flag("--tagged", b_tagged, "prefix sources with gender tags");
  build->add_option("--test-size", b_test_size, "general test set size");
  build->add_option("--gender-test-size", b_gender_size, "M/F test set size");
  build->add_option("--fp-test-size", b_fp_size,
                    "M1/F1 size (0 = as available)");
  build->add_option("--seed", b_seed, "sampling seed");
  build->add_option("--pronouns", b_pronouns,
                    "comma-separated first-person tokens");
  build->add_flag("--keep-unknown", b_keep_unknown,
                  "keep unknown-gender pairs");

  // bpe-learn
  auto* bpe_learn = app.add_subcommand("bpe-learn", "learn BPE merges");
  std::vector<std::string> bl_inputs;
  std::string bl_codes = "bpe.codes", bl_protected;
  std::size_t bl_merges = bpe::kReleaseMergeOperations;
  bpe_learn->add_option("--input", bl_inputs, "training text file(s)")
      ->required();
  bpe_learn->add_option("--merges", bl_merges, "merge operations");
  bpe_learn->add_option("--codes", bl_codes, "output codes path");
  bpe_learn->add_option("--protected", bl_protected,
                        "comma-separated protected tokens");

  // bpe-apply
  auto* bpe_apply = app.add_subcommand("bpe-apply", "apply or undo BPE");
  std::string ba_codes, ba_in, ba_out;
  bool ba_undo = false;
  bpe_apply->add_option("--codes", ba_codes, "codes path (omit with --undo)");
  bpe_apply->add_option("--in", ba_in, "input text file")->required();
  bpe_apply->add_option("--out", ba_out, "output text file")->required();
  bpe_apply->add_flag("--undo", ba_undo, "reverse segmentation instead");

  // train-toy
  auto* train_toy =
      app.add_subcommand("train-toy", "train the toy encoder-decoder");
  std::string tt_train, tt_out = "model.bin";
  nmt::Hyperparams tt_hp;
  train_toy->add_option("--train", tt_train, "SRC,TGT training files")
      ->required();
  train_toy->add_option("--epochs", tt_hp.epochs, "training epochs");
  train_toy->add_option("--seed", tt_hp.seed, "initialization seed");
  train_toy->add_option("--embed-dim", tt_hp.embed_dim, "embedding size");
  train_toy->add_option("--hidden-dim", tt_hp.hidden_dim, "hidden size");
  train_toy->add_option("--lr", tt_hp.learning_rate, "SGD learning rate");
  train_toy->add_option("--batch-size", tt_hp.batch_size, "batch size");
  train_toy->add_option("--max-decode-len", tt_hp.max_decode_len,
                        "decode length cap");
  train_toy->add_option("--out", tt_out, "checkpoint path");

  // translate-toy
  auto* translate_toy =
      app.add_subcommand("translate-toy", "greedy decoding with a checkpoint");
  std::string tr_model, tr_in, tr_out;
  bool tr_undo_bpe = false;
  translate_toy->add_option("--model", tr_model, "checkpoint path")->required();
  translate_toy->add_option("--in", tr_in, "source text file")->required();
  translate_toy->add_option("--out", tr_out, "hypothesis output")->required();
  translate_toy->add_flag("--undo-bpe", tr_undo_bpe,
                          "undo BPE segmentation in the output");

  // bleu
  auto* bleu = app.add_subcommand("bleu", "corpus BLEU");
  std::string bleu_hyp, bleu_ref;
  bool bleu_lower = false, bleu_json = false;
  bleu->add_option("--hyp", bleu_hyp, "hypothesis file")->required();
  bleu->add_option("--ref", bleu_ref, "reference file")->required();
  bleu->add_flag("--lowercase", bleu_lower, "casefold before scoring");
  bleu->add_flag("--json", bleu_json, "print the full JSON report");

  // sigtest
  auto* sigtest =
      app.add_subcommand("sigtest", "paired significance test on BLEU");
  std::string sg_a, sg_b, sg_ref;
  std::size_t sg_trials = 10000;
  std::uint64_t sg_seed = 0;
  bool sg_lower = false, sg_json = false, sg_bootstrap = false;
  sigtest->add_option("--a", sg_a, "system A hypotheses")->required();
  sigtest->add_option("--b", sg_b, "system B hypotheses")->required();
  sigtest->add_option("--ref", sg_ref, "reference file")->required();
  sigtest->add_option("--trials", sg_trials, "randomization trials");
  sigtest->add_option("--seed", sg_seed, "master seed");
  sigtest->add_flag("--lowercase", sg_lower, "casefold before scoring");
  sigtest->add_flag("--bootstrap", sg_bootstrap,
                    "paired bootstrap instead of randomization");
  sigtest->add_flag("--json", sg_json, "print the full JSON report");

  // report
  auto* report = app.add_subcommand("report", "render an evaluation report");
  std::string rp_in;
  bool rp_json = false;
  report->add_option("--in", rp_in, "report.json from the evaluate stage")
      ->required();
  report->add_flag("--json", rp_json, "print JSON instead of the table");

  // run
  auto* run = app.add_subcommand("run", "run pipeline stages from one config");
  std::string run_config, run_stages;
  run->add_option("--config", run_config, "pipeline config file")->required();
  run->add_option("--stages", run_stages,
                  "comma-separated subset of "
                  "ingest,analyze,build,bpe,train,evaluate");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      europarl::IngestOptions opts;
      opts.resolve.enable_fuzzy = in_fuzzy;
      opts.diagnostics = &std::cerr;
      auto table = europarl::load_speaker_table(in_table, &std::cerr);
      auto corpus = europarl::annotate_corpus_dirs(in_src_dir, in_tgt_dir,
                                                   table, in_lang, opts);
      save_corpus(corpus, in_corpus, in_stats);
      std::cerr << corpus.size() << " pairs (" << corpus.unresolved_count
                << " unresolved) -> " << in_corpus << '\n';
    } else if (*analyze) {
      auto corpus = load_corpus_jsonl(an_corpus);
      auto stats = analysis::analyze_corpus(corpus);
      if (!an_json_out.empty()) {
        write_file(an_json_out, analysis::stats_json(stats));
      }
      if (!an_csv_out.empty()) {
        write_file(an_csv_out, analysis::histogram_csv(stats));
      }
      if (an_json || an_json_out.empty()) {
        std::cout << analysis::stats_json(stats);
      }
    } else if (*build) {
      auto corpus = load_corpus_jsonl(b_corpus);
      dataset::BuildSpec spec;
      spec.split.test_size = b_test_size;
      spec.split.seed = b_seed;
      spec.split.exclude_unknown = !b_keep_unknown;
      spec.gender_test_size = b_gender_size;
      spec.first_person_size = b_fp_size;
      spec.pronouns = csv_set(b_pronouns);
      auto bundle = dataset::build_datasets(corpus, spec);
      dataset::emit_datasets(bundle, spec, b_tagged, b_outdir);
      std::cerr << "datasets written to " << b_outdir << '\n';
    } else if (*bpe_learn) {
      std::vector<std::string> lines;
      for (const auto& f : bl_inputs) {
        auto file_lines = read_lines(f);
        lines.insert(lines.end(), file_lines.begin(), file_lines.end());
      }
      auto model = bpe::learn_bpe(lines, bl_merges, csv_set(bl_protected));
      bpe::save_bpe(model, bl_codes);
      std::cerr << model.num_merges() << " merges -> " << bl_codes << '\n';
    } else if (*bpe_apply) {
      auto lines = read_lines(ba_in);
      if (ba_undo) {
        for (auto& line : lines) line = bpe::undo_bpe(line);
      } else {
        if (ba_codes.empty()) {
          std::cerr << "--codes is required unless --undo is given\n";
          return 2;
        }
        auto model = bpe::load_bpe(ba_codes);
        bpe::BpeApplier applier(model);
        for (auto& line : lines) line = applier.apply(line);
      }
      write_lines(ba_out, lines);
    } else if (*train_toy) {
      std::size_t comma = tt_train.find(',');
      if (comma == std::string::npos) {
        std::cerr << "--train expects SRC,TGT\n";
        return 2;
      }
      auto bitext = nmt::load_bitext(tt_train.substr(0, comma),
                                     tt_train.substr(comma + 1));
      nmt::TrainLog tlog;
      auto model = nmt::train(bitext, tt_hp, &tlog, &std::cerr);
      nmt::save_model(model, tt_out);
      std::cerr << "best epoch " << tlog.best_epoch << " -> " << tt_out << '\n';
    } else if (*translate_toy) {
      auto model = nmt::load_model(tr_model);
      std::vector<std::string> hyp;
      for (const auto& line : read_lines(tr_in)) {
        std::string joined = join(nmt::translate(model, split_ws(line)));
        hyp.push_back(tr_undo_bpe ? bpe::undo_bpe(joined) : joined);
      }
      write_lines(tr_out, hyp);
    } else if (*bleu) {
      auto rep = eval::corpus_bleu_lines(read_lines(bleu_hyp),
                                         read_lines(bleu_ref), bleu_lower);
      if (bleu_json) {
        std::cout << rep.to_json();
      } else {
        std::cout << "BLEU = " << rep.score << '\n';
      }
    } else if (*sigtest) {
      auto a = read_lines(sg_a);
      auto b = read_lines(sg_b);
      auto refs = read_lines(sg_ref);
      auto rep = sg_bootstrap
                     ? eval::paired_bootstrap(a, b, refs, sg_trials, sg_seed,
                                              sg_lower)
                     : eval::approx_randomization(a, b, refs, sg_trials,
                                                  sg_seed, sg_lower);
      if (sg_json) {
        std::cout << rep.to_json();
      } else {
        std::cout << "p = " << rep.p_value << " (delta " << rep.delta << ")\n";
      }
    } else if (*report) {
      nlohmann::json j = nlohmann::json::parse(read_file(rp_in));
      if (rp_json) {
        std::cout << j.dump(2) << '\n';
      } else {
        eval::SuiteReport suite;
        suite.alpha = j.value("alpha", 0.05);
        for (const auto& row : j.at("rows")) {
          eval::SuiteRow r;
          r.test_set = row.at("test_set").get<std::string>();
          r.base.score = row.at("base_bleu").get<double>();
          r.tag.score = row.at("tag_bleu").get<double>();
          r.sig.p_value = row.at("p_value").get<double>();
          r.sig.trials = row.value("trials", std::size_t{0});
          r.significant = row.at("significant").get<bool>();
          suite.rows.push_back(std::move(r));
        }
        std::cout << suite.format_table();
      }
    } else if (*run) {
      return run_pipeline(run_config, run_stages);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
