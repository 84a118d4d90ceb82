#include "tagmt/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>

#include "json.hpp"
#include "tagmt/analysis.hpp"
#include "tagmt/bpe.hpp"
#include "tagmt/europarl.hpp"
#include "tagmt/eval.hpp"
#include "tagmt/io.hpp"
#include "tagmt/rng.hpp"
#include "tagmt/text.hpp"
#include "tagmt/version.hpp"

namespace tagmt {
namespace pipeline {

using nlohmann::json;

namespace {

const char* kStageNames[] = {"ingest", "analyze", "build",
                             "bpe",    "train",   "evaluate"};

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "version", "work_dir", "lang_pair",
      "ingest.mode", "ingest.src_dir", "ingest.tgt_dir",
      "ingest.speaker_table", "ingest.fuzzy",
      "toy.size", "toy.balance", "toy.seed",
      "tag.male_token", "tag.female_token",
      "split.test_size", "split.seed", "split.exclude_unknown",
      "split.gender_test_size", "split.first_person_size", "split.pronouns",
      "bpe.enabled", "bpe.merges", "bpe.joint",
      "train.embed_dim", "train.hidden_dim", "train.epochs",
      "train.learning_rate", "train.batch_size", "train.seed",
      "train.max_decode_len",
      "evaluate.trials", "evaluate.seed", "evaluate.lowercase",
  };
  return keys;
}

std::string env_name_for(const std::string& key) {
  std::string name = "TAGMT_";
  for (char c : key) {
    name.push_back(c == '.' ? '_'
                            : static_cast<char>(std::toupper(
                                  static_cast<unsigned char>(c))));
  }
  return name;
}

std::map<std::string, std::string> parse_config_text(const std::string& text,
                                                     const std::string& where) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw ConfigInvalid(where + ":" + std::to_string(lineno) +
                            ": unterminated section header");
      }
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty()) {
        throw ConfigInvalid(where + ":" + std::to_string(lineno) +
                            ": empty section name");
      }
      continue;
    }
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigInvalid(where + ":" + std::to_string(lineno) +
                          ": expected key = value");
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty()) {
      throw ConfigInvalid(where + ":" + std::to_string(lineno) + ": empty key");
    }
    out[section.empty() ? key : section + "." + key] = value;
  }
  return out;
}

class ConfigReader {
 public:
  explicit ConfigReader(const std::map<std::string, std::string>& raw)
      : raw_(raw) {}

  std::string str(const std::string& key, const std::string& dflt) const {
    auto it = raw_.find(key);
    return it == raw_.end() ? dflt : it->second;
  }

  bool boolean(const std::string& key, bool dflt) const {
    auto it = raw_.find(key);
    if (it == raw_.end()) return dflt;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigInvalid("config key " + key + ": expected true/false, got '" +
                        it->second + "'");
  }

  template <class T>
  T number(const std::string& key, T dflt) const {
    auto it = raw_.find(key);
    if (it == raw_.end()) return dflt;
    std::istringstream ss(it->second);
    T value{};
    ss >> value;
    if (ss.fail() || !ss.eof()) {
      throw ConfigInvalid("config key " + key + ": bad numeric value '" +
                          it->second + "'");
    }
    return value;
  }

 private:
  const std::map<std::string, std::string>& raw_;
};

std::set<std::string> parse_pronouns(const std::string& csv) {
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

const std::vector<std::string>& testset_names() {
  static const std::vector<std::string> names = {"test", "test.M", "test.F",
                                                 "test.M1", "test.F1"};
  return names;
}

}  // namespace

const char* stage_name(Stage s) { return kStageNames[static_cast<int>(s)]; }

std::optional<Stage> stage_from_name(std::string_view name) {
  for (int i = 0; i < 6; ++i) {
    if (name == kStageNames[i]) return static_cast<Stage>(i);
  }
  return std::nullopt;
}

std::vector<Stage> all_stages() {
  return {Stage::Ingest, Stage::Analyze, Stage::Build,
          Stage::Bpe,    Stage::Train,   Stage::Evaluate};
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  PipelineConfig cfg;
  cfg.config_path = path;
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError& e) {
    throw ConfigInvalid(e.what());
  }
  cfg.raw = parse_config_text(text, path.string());
  for (const auto& [key, value] : cfg.raw) {
    if (!known_keys().count(key)) {
      throw ConfigInvalid("unknown config key: " + key);
    }
  }
  for (const auto& key : known_keys()) {
    if (const char* env = std::getenv(env_name_for(key).c_str())) {
      cfg.raw[key] = env;
    }
  }

  ConfigReader r(cfg.raw);
  cfg.version = r.number<int>("version", 1);
  cfg.work_dir = r.str("work_dir", "");
  cfg.lang_pair = r.str("lang_pair", "EN-XX");

  cfg.ingest_mode = r.str("ingest.mode", "europarl");
  cfg.src_dir = r.str("ingest.src_dir", "");
  cfg.tgt_dir = r.str("ingest.tgt_dir", "");
  cfg.speaker_table = r.str("ingest.speaker_table", "");
  cfg.fuzzy = r.boolean("ingest.fuzzy", false);

  cfg.toy.size = r.number<std::size_t>("toy.size", 5500);
  cfg.toy.gender_balance = r.number<double>("toy.balance", 0.5);
  cfg.toy.seed = r.number<std::uint64_t>("toy.seed", 42);

  cfg.build.tag.male_token = r.str("tag.male_token", "MALE");
  cfg.build.tag.female_token = r.str("tag.female_token", "FEMALE");
  cfg.build.split.test_size = r.number<std::size_t>("split.test_size", 2000);
  cfg.build.split.seed = r.number<std::uint64_t>("split.seed", 17);
  cfg.build.split.exclude_unknown = r.boolean("split.exclude_unknown", true);
  cfg.build.gender_test_size =
      r.number<std::size_t>("split.gender_test_size", 2000);
  cfg.build.first_person_size =
      r.number<std::size_t>("split.first_person_size", 0);
  cfg.build.pronouns = parse_pronouns(r.str("split.pronouns", "I"));

  cfg.bpe_enabled = r.boolean("bpe.enabled", true);
  cfg.bpe_merges = r.number<std::size_t>("bpe.merges", 400);
  cfg.bpe_joint = r.boolean("bpe.joint", false);

  cfg.train.embed_dim = r.number<int>("train.embed_dim", 32);
  cfg.train.hidden_dim = r.number<int>("train.hidden_dim", 64);
  cfg.train.epochs = r.number<int>("train.epochs", 13);
  cfg.train.learning_rate = r.number<double>("train.learning_rate", 0.05);
  cfg.train.batch_size = r.number<int>("train.batch_size", 16);
  cfg.train.seed = r.number<std::uint64_t>("train.seed", 7);
  cfg.train.max_decode_len = r.number<int>("train.max_decode_len", 30);

  cfg.eval_trials = r.number<std::size_t>("evaluate.trials", 10000);
  cfg.eval_seed = r.number<std::uint64_t>("evaluate.seed", 0);
  cfg.eval_lowercase = r.boolean("evaluate.lowercase", false);

  cfg.validate();
  return cfg;
}

void PipelineConfig::validate() const {
  if (version != 1) {
    throw ConfigInvalid("unsupported config version " +
                        std::to_string(version));
  }
  if (work_dir.empty()) throw ConfigInvalid("work_dir is required");
  if (ingest_mode != "toy" && ingest_mode != "europarl") {
    throw ConfigInvalid("ingest.mode must be 'toy' or 'europarl', got '" +
                        ingest_mode + "'");
  }
  if (ingest_mode == "europarl") {
    for (const auto& [label, p] :
         {std::pair<const char*, const std::filesystem::path*>{"ingest.src_dir",
                                                               &src_dir},
          {"ingest.tgt_dir", &tgt_dir},
          {"ingest.speaker_table", &speaker_table}}) {
      if (p->empty() || !std::filesystem::exists(*p)) {
        throw ConfigInvalid(std::string(label) + " missing or nonexistent: " +
                            p->string());
      }
    }
  } else if (!toy.valid()) {
    throw ConfigInvalid("invalid [toy] settings");
  }
  if (!build.tag.valid()) {
    throw ConfigInvalid("tag tokens must be distinct, non-empty and without "
                        "whitespace");
  }
  if (build.split.test_size == 0) {
    throw ConfigInvalid("split.test_size must be positive");
  }
  if (build.pronouns.empty()) {
    throw ConfigInvalid("split.pronouns must not be empty");
  }
  if (!train.valid()) throw ConfigInvalid("invalid [train] settings");
  if (eval_trials == 0) throw ConfigInvalid("evaluate.trials must be positive");
}

Pipeline::Pipeline(PipelineConfig config, std::ostream& log)
    : cfg_(std::move(config)), log_(log) {
  std::filesystem::create_directories(cfg_.work_dir);
}

std::filesystem::path Pipeline::wp(const std::string& rel) const {
  return cfg_.work_dir / rel;
}

std::filesystem::path Pipeline::manifest_path(Stage stage) const {
  return wp("manifests") / (std::string(stage_name(stage)) + ".json");
}

std::vector<std::string> Pipeline::active_testsets() const {
  std::vector<std::string> active;
  const auto manifest = wp("data/base/manifest.json");
  if (!std::filesystem::exists(manifest)) return active;
  json j = json::parse(read_file(manifest));
  for (const auto& name : testset_names()) {
    if (j.contains("counts") && j["counts"].value(name, std::size_t{0}) > 0) {
      active.push_back(name);
    }
  }
  return active;
}

Pipeline::StagePlan Pipeline::plan(Stage stage) const {
  StagePlan p;
  auto add_cfg_prefix = [&](std::string_view prefix) {
    for (const auto& [key, value] : cfg_.raw) {
      if (key.rfind(prefix, 0) == 0) p.config[key] = value;
    }
  };
  auto data_files = [&](const std::string& variant, const std::string& set,
                        bool with_tgt) {
    std::vector<std::filesystem::path> files;
    files.push_back(wp("data/" + variant + "/" + set + ".src"));
    if (with_tgt) files.push_back(wp("data/" + variant + "/" + set + ".tgt"));
    return files;
  };
  const auto active = active_testsets();

  switch (stage) {
    case Stage::Ingest:
      add_cfg_prefix("version");
      add_cfg_prefix("work_dir");
      add_cfg_prefix("lang_pair");
      add_cfg_prefix("ingest.");
      add_cfg_prefix("toy.");
      if (cfg_.ingest_mode == "europarl") {
        for (const auto& dir : {cfg_.src_dir, cfg_.tgt_dir}) {
          std::vector<std::filesystem::path> files;
          for (const auto& e : std::filesystem::directory_iterator(dir)) {
            if (e.is_regular_file()) files.push_back(e.path());
          }
          std::sort(files.begin(), files.end());
          p.inputs.insert(p.inputs.end(), files.begin(), files.end());
        }
        p.inputs.push_back(cfg_.speaker_table);
      }
      p.outputs = {wp("corpus.jsonl"), wp("corpus.stats.json")};
      break;
    case Stage::Analyze:
      p.inputs = {wp("corpus.jsonl")};
      p.outputs = {wp("analysis.json"), wp("age_hist.csv")};
      break;
    case Stage::Build:
      add_cfg_prefix("split.");
      add_cfg_prefix("tag.");
      add_cfg_prefix("lang_pair");
      p.inputs = {wp("corpus.jsonl")};
      for (const std::string variant : {"base", "tag"}) {
        p.outputs.push_back(wp("data/" + variant + "/manifest.json"));
        for (const auto& f : data_files(variant, "train", true)) {
          p.outputs.push_back(f);
        }
        for (const auto& set : active) {
          for (const auto& f : data_files(variant, set, true)) {
            p.outputs.push_back(f);
          }
        }
      }
      break;
    case Stage::Bpe:
      add_cfg_prefix("bpe.");
      add_cfg_prefix("tag.");
      for (const std::string variant : {"base", "tag"}) {
        for (const auto& f : data_files(variant, "train", true)) {
          p.inputs.push_back(f);
        }
        for (const auto& set : active) {
          p.inputs.push_back(wp("data/" + variant + "/" + set + ".src"));
        }
        p.outputs.push_back(wp("data/" + variant + ".bpe/train.src"));
        p.outputs.push_back(wp("data/" + variant + ".bpe/train.tgt"));
        for (const auto& set : active) {
          p.outputs.push_back(wp("data/" + variant + ".bpe/" + set + ".src"));
        }
      }
      p.outputs.push_back(wp("bpe/src.codes"));
      p.outputs.push_back(wp("bpe/src.codes.meta.json"));
      p.outputs.push_back(wp("bpe/tgt.codes"));
      p.outputs.push_back(wp("bpe/tgt.codes.meta.json"));
      break;
    case Stage::Train: {
      add_cfg_prefix("train.");
      add_cfg_prefix("bpe.enabled");
      const std::string suffix = cfg_.bpe_enabled ? ".bpe" : "";
      for (const std::string variant : {"base", "tag"}) {
        p.inputs.push_back(wp("data/" + variant + suffix + "/train.src"));
        p.inputs.push_back(wp("data/" + variant + suffix + "/train.tgt"));
        p.outputs.push_back(wp("models/" + variant + ".bin"));
      }
      break;
    }
    case Stage::Evaluate: {
      add_cfg_prefix("evaluate.");
      add_cfg_prefix("bpe.enabled");
      const std::string suffix = cfg_.bpe_enabled ? ".bpe" : "";
      p.inputs.push_back(wp("models/base.bin"));
      p.inputs.push_back(wp("models/tag.bin"));
      for (const auto& set : active) {
        p.inputs.push_back(wp("data/base" + suffix + "/" + set + ".src"));
        p.inputs.push_back(wp("data/tag" + suffix + "/" + set + ".src"));
        p.inputs.push_back(wp("data/base/" + set + ".tgt"));
        p.outputs.push_back(wp("evaluate/hyp.base." + set + ".txt"));
        p.outputs.push_back(wp("evaluate/hyp.tag." + set + ".txt"));
      }
      p.outputs.push_back(wp("evaluate/report.json"));
      p.outputs.push_back(wp("evaluate/report.txt"));
      break;
    }
  }
  return p;
}

bool Pipeline::stage_fresh(Stage stage) const {
  const auto mpath = manifest_path(stage);
  if (!std::filesystem::exists(mpath)) return false;
  json m;
  try {
    m = json::parse(read_file(mpath));
  } catch (...) {
    return false;
  }
  const StagePlan p = plan(stage);
  json cfg_json(p.config);
  if (m.value("config", json::object()) != cfg_json) return false;
  if (m.value("tool_version", "") != kToolVersion) return false;
  auto files_match = [&](const char* section,
                         const std::vector<std::filesystem::path>& files) {
    if (!m.contains(section)) return false;
    const json& entries = m[section];
    if (entries.size() != files.size()) return false;
    for (const auto& f : files) {
      const std::string key = f.string();
      if (!entries.contains(key)) return false;
      if (!std::filesystem::exists(f)) return false;
      if (entries[key].get<std::string>() != hash_file_hex(f)) return false;
    }
    return true;
  };
  return files_match("inputs", p.inputs) && files_match("outputs", p.outputs);
}

void Pipeline::write_manifest(Stage stage, const StagePlan& p) const {
  json m;
  m["stage"] = stage_name(stage);
  m["tool_version"] = kToolVersion;
  m["config"] = json(p.config);
  json inputs = json::object(), outputs = json::object();
  for (const auto& f : p.inputs) inputs[f.string()] = hash_file_hex(f);
  for (const auto& f : p.outputs) outputs[f.string()] = hash_file_hex(f);
  m["inputs"] = inputs;
  m["outputs"] = outputs;
  write_file(manifest_path(stage), m.dump(2) + "\n");
}

void Pipeline::require_artifact(const std::filesystem::path& p,
                                Stage producer) const {
  if (!std::filesystem::exists(p)) {
    throw StageFailed(stage_name(producer),
                      "missing artifact " + p.string() +
                          " (run the '" + stage_name(producer) + "' stage)");
  }
}

void Pipeline::run(const std::vector<Stage>& stages) {
  for (Stage stage : all_stages()) {
    if (std::find(stages.begin(), stages.end(), stage) == stages.end()) {
      continue;
    }
    if (stage == Stage::Bpe && !cfg_.bpe_enabled) {
      log_ << "[" << stage_name(stage) << "] disabled\n";
      continue;
    }
    if (stage_fresh(stage)) {
      log_ << "[" << stage_name(stage) << "] up to date, skipped\n";
      continue;
    }
    log_ << "[" << stage_name(stage) << "] running\n";
    run_stage(stage);
    write_manifest(stage, plan(stage));
    log_ << "[" << stage_name(stage) << "] done\n";
  }
}

void Pipeline::run_stage(Stage stage) {
  try {
    switch (stage) {
      case Stage::Ingest: do_ingest(); break;
      case Stage::Analyze: do_analyze(); break;
      case Stage::Build: do_build(); break;
      case Stage::Bpe: do_bpe(); break;
      case Stage::Train: do_train(); break;
      case Stage::Evaluate: do_evaluate(); break;
    }
  } catch (const StageFailed&) {
    throw;
  } catch (const std::exception& e) {
    throw StageFailed(stage_name(stage), e.what());
  }
}

void Pipeline::do_ingest() {
  AnnotatedCorpus corpus;
  if (cfg_.ingest_mode == "toy") {
    corpus = toylang::gen_toy_language(cfg_.toy);
  } else {
    europarl::IngestOptions opts;
    opts.resolve.enable_fuzzy = cfg_.fuzzy;
    opts.diagnostics = &log_;
    auto table = europarl::load_speaker_table(cfg_.speaker_table, &log_);
    corpus = europarl::annotate_corpus_dirs(cfg_.src_dir, cfg_.tgt_dir, table,
                                            cfg_.lang_pair, opts);
  }
  save_corpus(corpus, wp("corpus.jsonl"), wp("corpus.stats.json"));
  log_ << "  " << corpus.size() << " pairs, " << corpus.unresolved_count
       << " unresolved\n";
}

void Pipeline::do_analyze() {
  require_artifact(wp("corpus.jsonl"), Stage::Ingest);
  auto corpus = load_corpus_jsonl(wp("corpus.jsonl"));
  auto stats = analysis::analyze_corpus(corpus);
  write_file(wp("analysis.json"), analysis::stats_json(stats));
  write_file(wp("age_hist.csv"), analysis::histogram_csv(stats));
}

void Pipeline::do_build() {
  require_artifact(wp("corpus.jsonl"), Stage::Ingest);
  auto corpus = load_corpus_jsonl(wp("corpus.jsonl"));
  auto bundle = dataset::build_datasets(corpus, cfg_.build);
  dataset::emit_datasets(bundle, cfg_.build, false, wp("data/base"));
  dataset::emit_datasets(bundle, cfg_.build, true, wp("data/tag"));
  log_ << "  train " << bundle.train.size() << ", test "
       << bundle.general.size() << ", M " << bundle.m.size() << ", F "
       << bundle.f.size() << ", M1 " << bundle.m1.size() << ", F1 "
       << bundle.f1.size() << '\n';
}

void Pipeline::do_bpe() {
  require_artifact(wp("data/base/train.src"), Stage::Build);
  require_artifact(wp("data/base/train.tgt"), Stage::Build);

  const std::set<std::string> protected_tokens = {
      cfg_.build.tag.male_token, cfg_.build.tag.female_token};
  const auto train_src = read_lines(wp("data/base/train.src"));
  const auto train_tgt = read_lines(wp("data/base/train.tgt"));

  bpe::BpeModel src_model, tgt_model;
  if (cfg_.bpe_joint) {
    std::vector<std::string> both = train_src;
    both.insert(both.end(), train_tgt.begin(), train_tgt.end());
    src_model = bpe::learn_bpe(both, cfg_.bpe_merges, protected_tokens);
    tgt_model = src_model;
  } else {
    src_model = bpe::learn_bpe(train_src, cfg_.bpe_merges, protected_tokens);
    tgt_model = bpe::learn_bpe(train_tgt, cfg_.bpe_merges, protected_tokens);
  }
  bpe::save_bpe(src_model, wp("bpe/src.codes"));
  bpe::save_bpe(tgt_model, wp("bpe/tgt.codes"));

  bpe::BpeApplier src_apply(src_model), tgt_apply(tgt_model);
  auto apply_file = [&](bpe::BpeApplier& applier,
                        const std::filesystem::path& in,
                        const std::filesystem::path& out) {
    std::vector<std::string> lines = read_lines(in);
    for (auto& line : lines) line = applier.apply(line);
    write_lines(out, lines);
  };
  const auto active = active_testsets();
  for (const std::string variant : {"base", "tag"}) {
    apply_file(src_apply, wp("data/" + variant + "/train.src"),
               wp("data/" + variant + ".bpe/train.src"));
    apply_file(tgt_apply, wp("data/" + variant + "/train.tgt"),
               wp("data/" + variant + ".bpe/train.tgt"));
    for (const auto& set : active) {
      apply_file(src_apply, wp("data/" + variant + "/" + set + ".src"),
                 wp("data/" + variant + ".bpe/" + set + ".src"));
    }
  }
}

void Pipeline::do_train() {
  const std::string suffix = cfg_.bpe_enabled ? ".bpe" : "";
  for (const std::string variant : {"base", "tag"}) {
    const auto src = wp("data/" + variant + suffix + "/train.src");
    const auto tgt = wp("data/" + variant + suffix + "/train.tgt");
    require_artifact(src, cfg_.bpe_enabled ? Stage::Bpe : Stage::Build);
    require_artifact(tgt, cfg_.bpe_enabled ? Stage::Bpe : Stage::Build);
    nmt::Hyperparams hp = cfg_.train;
    hp.seed = mix_seed(cfg_.train.seed, stream_tag(variant));
    nmt::TrainLog tlog;
    log_ << "  training " << variant << " system\n";
    auto model = nmt::train(nmt::load_bitext(src, tgt), hp, &tlog, &log_);
    nmt::save_model(model, wp("models/" + variant + ".bin"));
    log_ << "  " << variant << ": best epoch " << tlog.best_epoch << '\n';
  }
}

void Pipeline::do_evaluate() {
  require_artifact(wp("models/base.bin"), Stage::Train);
  require_artifact(wp("models/tag.bin"), Stage::Train);
  const auto active = active_testsets();
  if (active.empty()) {
    throw StageFailed(stage_name(Stage::Build), "no test sets on disk");
  }
  const std::string suffix = cfg_.bpe_enabled ? ".bpe" : "";
  auto base_model = nmt::load_model(wp("models/base.bin"));
  auto tag_model = nmt::load_model(wp("models/tag.bin"));

  auto translate_file = [&](const nmt::Seq2SeqModel& model,
                            const std::filesystem::path& in,
                            const std::filesystem::path& out) {
    std::vector<std::string> hyp;
    for (const auto& line : read_lines(in)) {
      auto toks = nmt::translate(model, split_ws(line));
      std::string joined = join(toks);
      hyp.push_back(cfg_.bpe_enabled ? bpe::undo_bpe(joined) : joined);
    }
    write_lines(out, hyp);
    return hyp;
  };

  std::vector<eval::SuiteInput> inputs;
  for (const auto& set : active) {
    const auto base_src = wp("data/base" + suffix + "/" + set + ".src");
    const auto tag_src = wp("data/tag" + suffix + "/" + set + ".src");
    const auto ref_path = wp("data/base/" + set + ".tgt");
    require_artifact(base_src, cfg_.bpe_enabled ? Stage::Bpe : Stage::Build);
    require_artifact(tag_src, cfg_.bpe_enabled ? Stage::Bpe : Stage::Build);
    require_artifact(ref_path, Stage::Build);
    eval::SuiteInput in;
    in.test_set = set;
    in.hyp_base = translate_file(base_model, base_src,
                                 wp("evaluate/hyp.base." + set + ".txt"));
    in.hyp_tag = translate_file(tag_model, tag_src,
                                wp("evaluate/hyp.tag." + set + ".txt"));
    in.refs = read_lines(ref_path);
    inputs.push_back(std::move(in));
  }
  eval::SuiteOptions opts;
  opts.trials = cfg_.eval_trials;
  opts.seed = cfg_.eval_seed;
  opts.lowercase = cfg_.eval_lowercase;
  auto report = eval::evaluate_suite(inputs, opts);
  write_file(wp("evaluate/report.json"), report.to_json());
  write_file(wp("evaluate/report.txt"), report.format_table());
  log_ << report.format_table();
}

}  // namespace pipeline
}  // namespace tagmt
