#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tagmt {
namespace nmt {

struct Hyperparams {
  int embed_dim = 32;
  int hidden_dim = 64;
  int src_vocab = 0;  // filled from training data
  int tgt_vocab = 0;
  int epochs = 13;
  double learning_rate = 0.05;  // plain SGD
  int batch_size = 16;
  std::uint64_t seed = 0;
  int max_decode_len = 30;

  bool valid() const {
    return embed_dim > 0 && hidden_dim > 0 && epochs >= 1 && batch_size > 0 &&
           learning_rate > 0 && max_decode_len > 0;
  }
};

// Reserved ids, fixed across every vocabulary.
inline constexpr int kBosId = 0;
inline constexpr int kEosId = 1;
inline constexpr int kUnkId = 2;
inline constexpr int kPadId = 3;
inline constexpr int kNumReserved = 4;

class Vocab {
 public:
  Vocab();  // reserved tokens only

  // Tokens in first-occurrence order after the reserved block.
  static Vocab build(std::span<const std::string> lines);
  static Vocab from_tokens(std::vector<std::string> tokens);

  int id(const std::string& token) const;  // kUnkId when unseen
  const std::string& token(int id) const;
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::vector<int> encode(std::span<const std::string> tokens) const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

// Parameter tensors in storage (and initialization, and checkpoint) order.
enum TensorId : int {
  kSrcEmbed, kTgtEmbed,
  kEncWz, kEncUz, kEncBz, kEncWr, kEncUr, kEncBr, kEncWh, kEncUh, kEncBh,
  kDecWz, kDecUz, kDecBz, kDecWr, kDecUr, kDecBr, kDecWh, kDecUh, kDecBh,
  kAttW, kOutW, kOutB,
  kTensorCount
};

struct MatView {
  double* data = nullptr;
  int rows = 0;
  int cols = 0;
  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const {
    return data[static_cast<std::size_t>(r) * cols + c];
  }
  double* row(int r) { return data + static_cast<std::size_t>(r) * cols; }
  const double* row(int r) const {
    return data + static_cast<std::size_t>(r) * cols;
  }
};

// All model parameters in one contiguous double buffer (row-major tensors in
// TensorId order), so initialization, SGD updates, finite-difference probes
// and checkpoints all walk the same flat layout.
class ParamPack {
 public:
  explicit ParamPack(const Hyperparams& hp);

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::size_t size() const { return data_.size(); }

  MatView view(TensorId id);
  MatView view(TensorId id) const;  // const-view; do not write through it

  void zero();
  void add_scaled(const ParamPack& other, double scale);
  bool all_finite() const;

 private:
  std::array<std::size_t, kTensorCount + 1> offsets_{};
  std::array<std::pair<int, int>, kTensorCount> shapes_{};
  std::vector<double> data_;
};

struct Seq2SeqModel {
  Hyperparams hp;
  Vocab src_vocab;
  Vocab tgt_vocab;
  ParamPack params;

  // uniform(-0.1, 0.1) draws from a generator seeded with hp.seed, filling
  // tensors in TensorId order.
  static Seq2SeqModel init(Hyperparams hp, Vocab src, Vocab tgt);
};

struct DivergedTraining : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BitextMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Bitext {
  std::vector<std::string> src;
  std::vector<std::string> tgt;
  std::size_t size() const { return src.size(); }
};

Bitext load_bitext(const std::filesystem::path& src_path,
                   const std::filesystem::path& tgt_path);

// Mean cross-entropy over target positions (gold target plus end-of-sequence,
// teacher-forced from begin-of-sequence). The encoder consumes src_ids plus a
// trailing end-of-sequence marker. Ids are raw (no markers appended by the
// caller). `attention` receives one normalized weight row per decoded
// position when non-null.
double forward_loss(const Seq2SeqModel& model, std::span<const int> src_ids,
                    std::span<const int> tgt_ids,
                    std::vector<std::vector<double>>* attention = nullptr);

// forward_loss plus reverse-mode gradients accumulated into `grad`.
double forward_backward(const Seq2SeqModel& model, std::span<const int> src_ids,
                        std::span<const int> tgt_ids, ParamPack& grad);

struct TrainLog {
  std::vector<double> train_loss;    // per epoch
  std::vector<double> heldout_loss;  // per epoch
  int best_epoch = 0;                // 1-based
};

// Mini-batch SGD with teacher forcing. Every tenth pair is carved off as a
// deterministic held-out split; the parameters of the epoch with the lowest
// held-out loss are returned.
Seq2SeqModel train(const Bitext& bitext, Hyperparams hp,
                   TrainLog* train_log = nullptr, std::ostream* log = nullptr);

// Greedy argmax decoding from begin-of-sequence until end-of-sequence or
// hp.max_decode_len tokens.
std::vector<int> translate_ids(const Seq2SeqModel& model,
                               std::span<const int> src_ids);
std::vector<std::string> translate(const Seq2SeqModel& model,
                                   std::span<const std::string> src_tokens);

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t params_checked = 0;
};

// Central finite differences against the analytic gradient over every
// parameter, or a seeded 1% sample above 10k parameters. Relative error is
// |g - g_fd| / max(|g|, |g_fd|, 1e-8).
GradCheckResult gradient_check(const Seq2SeqModel& model,
                               std::span<const int> src_ids,
                               std::span<const int> tgt_ids,
                               double epsilon = 1e-5,
                               std::uint64_t sample_seed = 0);

// Checkpoint: one-line JSON header (hyperparameters, both vocabularies,
// parameter count) followed by the parameter buffer as little-endian 64-bit
// floats in TensorId order. Save/load round-trips byte-exactly.
void save_model(const Seq2SeqModel& model, const std::filesystem::path& path);
Seq2SeqModel load_model(const std::filesystem::path& path);

}  // namespace nmt
}  // namespace tagmt
