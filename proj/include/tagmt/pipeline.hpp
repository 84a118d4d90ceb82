#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "tagmt/dataset.hpp"
#include "tagmt/seq2seq.hpp"
#include "tagmt/toylang.hpp"

namespace tagmt {
namespace pipeline {

struct ConfigInvalid : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StageFailed : std::runtime_error {
  StageFailed(std::string stage_, const std::string& msg)
      : std::runtime_error("stage " + stage_ + ": " + msg),
        stage(std::move(stage_)) {}
  std::string stage;
};

enum class Stage { Ingest, Analyze, Build, Bpe, Train, Evaluate };

const char* stage_name(Stage s);
std::optional<Stage> stage_from_name(std::string_view name);
std::vector<Stage> all_stages();

// Key-value config file: "key = value" lines with [section] headers flattened
// to "section.key"; '#' starts a comment. Environment variables named
// TAGMT_<SECTION>_<KEY> override file values.
struct PipelineConfig {
  std::filesystem::path config_path;
  std::map<std::string, std::string> raw;  // flattened, post-override

  int version = 1;
  std::filesystem::path work_dir;
  std::string lang_pair = "EN-XX";

  // ingest
  std::string ingest_mode = "europarl";  // or "toy"
  std::filesystem::path src_dir, tgt_dir, speaker_table;
  bool fuzzy = false;
  toylang::ToyLanguageSpec toy;

  dataset::BuildSpec build;

  bool bpe_enabled = true;
  std::size_t bpe_merges = 400;
  bool bpe_joint = false;

  nmt::Hyperparams train;

  std::size_t eval_trials = 10000;
  std::uint64_t eval_seed = 0;
  bool eval_lowercase = false;

  static PipelineConfig load(const std::filesystem::path& path);
  void validate() const;  // throws ConfigInvalid
};

class Pipeline {
 public:
  Pipeline(PipelineConfig config, std::ostream& log);

  // Runs the requested stages in canonical order, skipping any whose
  // manifest still matches its inputs and outputs. Throws StageFailed.
  void run(const std::vector<Stage>& stages);

  bool stage_fresh(Stage stage) const;
  std::filesystem::path manifest_path(Stage stage) const;

 private:
  struct StagePlan {
    std::map<std::string, std::string> config;  // stage-relevant key/values
    std::vector<std::filesystem::path> inputs;
    std::vector<std::filesystem::path> outputs;
  };

  StagePlan plan(Stage stage) const;
  void run_stage(Stage stage);
  void write_manifest(Stage stage, const StagePlan& p) const;
  // Ensures a required artifact exists, else names the stage that makes it.
  void require_artifact(const std::filesystem::path& p, Stage producer) const;

  void do_ingest();
  void do_analyze();
  void do_build();
  void do_bpe();
  void do_train();
  void do_evaluate();

  std::filesystem::path wp(const std::string& rel) const;  // work_dir / rel
  std::vector<std::string> active_testsets() const;

  PipelineConfig cfg_;
  std::ostream& log_;
};

}  // namespace pipeline
}  // namespace tagmt
