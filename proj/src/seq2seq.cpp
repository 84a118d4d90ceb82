#include "tagmt/seq2seq.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

#include "json.hpp"
#include "tagmt/io.hpp"
#include "tagmt/rng.hpp"
#include "tagmt/text.hpp"

namespace tagmt {
namespace nmt {

namespace {

using Vec = std::vector<double>;

// y = A x
void matvec(const MatView& a, const double* x, double* y) {
  for (int r = 0; r < a.rows; ++r) {
    const double* row = a.row(r);
    double acc = 0.0;
    for (int c = 0; c < a.cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

// y += A x
void matvec_acc(const MatView& a, const double* x, double* y) {
  for (int r = 0; r < a.rows; ++r) {
    const double* row = a.row(r);
    double acc = 0.0;
    for (int c = 0; c < a.cols; ++c) acc += row[c] * x[c];
    y[r] += acc;
  }
}

// y += A^T x  (x has a.rows entries, y has a.cols)
void mat_t_vec_acc(const MatView& a, const double* x, double* y) {
  for (int r = 0; r < a.rows; ++r) {
    const double* row = a.row(r);
    const double xr = x[r];
    for (int c = 0; c < a.cols; ++c) y[c] += row[c] * xr;
  }
}

// A += u v^T
void outer_acc(MatView a, const double* u, const double* v) {
  for (int r = 0; r < a.rows; ++r) {
    double* row = a.row(r);
    const double ur = u[r];
    for (int c = 0; c < a.cols; ++c) row[c] += ur * v[c];
  }
}

void axpy(double alpha, const Vec& x, Vec& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

double dot(const Vec& a, const Vec& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct GruParams {
  MatView wz, uz, bz, wr, ur, br, wh, uh, bh;
};

GruParams gru_params(const ParamPack& p, bool encoder) {
  if (encoder) {
    return {p.view(kEncWz), p.view(kEncUz), p.view(kEncBz),
            p.view(kEncWr), p.view(kEncUr), p.view(kEncBr),
            p.view(kEncWh), p.view(kEncUh), p.view(kEncBh)};
  }
  return {p.view(kDecWz), p.view(kDecUz), p.view(kDecBz),
          p.view(kDecWr), p.view(kDecUr), p.view(kDecBr),
          p.view(kDecWh), p.view(kDecUh), p.view(kDecBh)};
}

struct GruCache {
  Vec x, h_prev, z, r, rh, hbar, h;
};

// h = (1-z) * h_prev + z * tanh(Wh x + Uh (r*h_prev) + bh)
void gru_forward(const GruParams& p, Vec x, Vec h_prev, GruCache& c) {
  const int h_dim = p.uz.rows;
  c.x = std::move(x);
  c.h_prev = std::move(h_prev);
  c.z.assign(h_dim, 0.0);
  c.r.assign(h_dim, 0.0);
  c.hbar.assign(h_dim, 0.0);

  Vec az(h_dim), ar(h_dim), ah(h_dim);
  matvec(p.wz, c.x.data(), az.data());
  matvec_acc(p.uz, c.h_prev.data(), az.data());
  matvec(p.wr, c.x.data(), ar.data());
  matvec_acc(p.ur, c.h_prev.data(), ar.data());
  for (int i = 0; i < h_dim; ++i) {
    c.z[i] = sigmoid(az[i] + p.bz.data[i]);
    c.r[i] = sigmoid(ar[i] + p.br.data[i]);
  }
  c.rh.resize(h_dim);
  for (int i = 0; i < h_dim; ++i) c.rh[i] = c.r[i] * c.h_prev[i];
  matvec(p.wh, c.x.data(), ah.data());
  matvec_acc(p.uh, c.rh.data(), ah.data());
  c.h.resize(h_dim);
  for (int i = 0; i < h_dim; ++i) {
    c.hbar[i] = std::tanh(ah[i] + p.bh.data[i]);
    c.h[i] = (1.0 - c.z[i]) * c.h_prev[i] + c.z[i] * c.hbar[i];
  }
}

struct GruGrads {
  MatView wz, uz, bz, wr, ur, br, wh, uh, bh;
};

// Adds gradients for one step into the parameter grads, dx and dh_prev.
void gru_backward(const GruParams& p, GruGrads g, const GruCache& c,
                  const Vec& dh, Vec& dx, Vec& dh_prev) {
  const int h_dim = static_cast<int>(c.h.size());
  Vec dz(h_dim), dhbar(h_dim), da_h(h_dim);
  for (int i = 0; i < h_dim; ++i) {
    dz[i] = dh[i] * (c.hbar[i] - c.h_prev[i]);
    dhbar[i] = dh[i] * c.z[i];
    dh_prev[i] += dh[i] * (1.0 - c.z[i]);
    da_h[i] = dhbar[i] * (1.0 - c.hbar[i] * c.hbar[i]);
  }
  outer_acc(g.wh, da_h.data(), c.x.data());
  outer_acc(g.uh, da_h.data(), c.rh.data());
  for (int i = 0; i < h_dim; ++i) g.bh.data[i] += da_h[i];
  mat_t_vec_acc(p.wh, da_h.data(), dx.data());
  Vec drh(h_dim, 0.0);
  mat_t_vec_acc(p.uh, da_h.data(), drh.data());
  Vec dr(h_dim), da_z(h_dim), da_r(h_dim);
  for (int i = 0; i < h_dim; ++i) {
    dr[i] = drh[i] * c.h_prev[i];
    dh_prev[i] += drh[i] * c.r[i];
    da_z[i] = dz[i] * c.z[i] * (1.0 - c.z[i]);
    da_r[i] = dr[i] * c.r[i] * (1.0 - c.r[i]);
  }
  outer_acc(g.wz, da_z.data(), c.x.data());
  outer_acc(g.uz, da_z.data(), c.h_prev.data());
  outer_acc(g.wr, da_r.data(), c.x.data());
  outer_acc(g.ur, da_r.data(), c.h_prev.data());
  for (int i = 0; i < h_dim; ++i) {
    g.bz.data[i] += da_z[i];
    g.br.data[i] += da_r[i];
  }
  mat_t_vec_acc(p.wz, da_z.data(), dx.data());
  mat_t_vec_acc(p.uz, da_z.data(), dh_prev.data());
  mat_t_vec_acc(p.wr, da_r.data(), dx.data());
  mat_t_vec_acc(p.ur, da_r.data(), dh_prev.data());
}

struct Tape {
  std::vector<int> enc_in, dec_in, gold;
  std::vector<GruCache> enc, dec;
  std::vector<Vec> wh;     // AttW * enc_h[i], shared across decode steps
  std::vector<Vec> alpha;  // attention weights per decode step
  std::vector<Vec> ctx, comb, probs;
};

Vec embed_row(const ParamPack& pack, TensorId table, int id) {
  MatView t = pack.view(table);
  const double* row = t.row(id);
  return Vec(row, row + t.cols);
}

double run_forward(const Seq2SeqModel& model, std::span<const int> src_ids,
                   std::span<const int> tgt_ids, Tape& tape) {
  const Hyperparams& hp = model.hp;
  const int h_dim = hp.hidden_dim;
  const ParamPack& params = model.params;
  const GruParams enc_p = gru_params(params, true);
  const GruParams dec_p = gru_params(params, false);
  const MatView att_w = params.view(kAttW);
  const MatView out_w = params.view(kOutW);
  const MatView out_b = params.view(kOutB);

  tape.enc_in.assign(src_ids.begin(), src_ids.end());
  tape.enc_in.push_back(kEosId);
  const std::size_t n = tape.enc_in.size();
  tape.enc.resize(n);
  Vec h(h_dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    gru_forward(enc_p, embed_row(params, kSrcEmbed, tape.enc_in[i]),
                std::move(h), tape.enc[i]);
    h = tape.enc[i].h;
  }
  tape.wh.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    tape.wh[i].assign(h_dim, 0.0);
    matvec(att_w, tape.enc[i].h.data(), tape.wh[i].data());
  }

  tape.dec_in.assign(1, kBosId);
  tape.dec_in.insert(tape.dec_in.end(), tgt_ids.begin(), tgt_ids.end());
  tape.gold.assign(tgt_ids.begin(), tgt_ids.end());
  tape.gold.push_back(kEosId);
  const std::size_t steps = tape.gold.size();
  tape.dec.resize(steps);
  tape.alpha.resize(steps);
  tape.ctx.resize(steps);
  tape.comb.resize(steps);
  tape.probs.resize(steps);

  Vec d = tape.enc.back().h;
  double loss = 0.0;
  for (std::size_t t = 0; t < steps; ++t) {
    gru_forward(dec_p, embed_row(params, kTgtEmbed, tape.dec_in[t]),
                std::move(d), tape.dec[t]);
    d = tape.dec[t].h;

    Vec scores(n);
    for (std::size_t i = 0; i < n; ++i) scores[i] = dot(d, tape.wh[i]);
    const double smax = *std::max_element(scores.begin(), scores.end());
    double ssum = 0.0;
    Vec& alpha = tape.alpha[t];
    alpha.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      alpha[i] = std::exp(scores[i] - smax);
      ssum += alpha[i];
    }
    for (std::size_t i = 0; i < n; ++i) alpha[i] /= ssum;

    Vec& ctx = tape.ctx[t];
    ctx.assign(h_dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) axpy(alpha[i], tape.enc[i].h, ctx);

    Vec& comb = tape.comb[t];
    comb.resize(h_dim);
    for (int k = 0; k < h_dim; ++k) comb[k] = std::tanh(d[k] + ctx[k]);

    Vec logits(hp.tgt_vocab);
    matvec(out_w, comb.data(), logits.data());
    for (int v = 0; v < hp.tgt_vocab; ++v) logits[v] += out_b.data[v];
    const double lmax = *std::max_element(logits.begin(), logits.end());
    double lsum = 0.0;
    for (double v : logits) lsum += std::exp(v - lmax);
    const double lse = lmax + std::log(lsum);
    loss += lse - logits[static_cast<std::size_t>(tape.gold[t])];
    Vec& probs = tape.probs[t];
    probs.resize(hp.tgt_vocab);
    for (int v = 0; v < hp.tgt_vocab; ++v) probs[v] = std::exp(logits[v] - lse);
  }
  return loss / static_cast<double>(steps);
}

void run_backward(const Seq2SeqModel& model, const Tape& tape,
                  ParamPack& grad) {
  const Hyperparams& hp = model.hp;
  const int h_dim = hp.hidden_dim;
  const ParamPack& params = model.params;
  const GruParams enc_p = gru_params(params, true);
  const GruParams dec_p = gru_params(params, false);
  const MatView att_w = params.view(kAttW);
  const MatView out_w = params.view(kOutW);

  GruGrads enc_g{grad.view(kEncWz), grad.view(kEncUz), grad.view(kEncBz),
                 grad.view(kEncWr), grad.view(kEncUr), grad.view(kEncBr),
                 grad.view(kEncWh), grad.view(kEncUh), grad.view(kEncBh)};
  GruGrads dec_g{grad.view(kDecWz), grad.view(kDecUz), grad.view(kDecBz),
                 grad.view(kDecWr), grad.view(kDecUr), grad.view(kDecBr),
                 grad.view(kDecWh), grad.view(kDecUh), grad.view(kDecBh)};
  MatView att_g = grad.view(kAttW);
  MatView out_w_g = grad.view(kOutW);
  MatView out_b_g = grad.view(kOutB);
  MatView src_embed_g = grad.view(kSrcEmbed);
  MatView tgt_embed_g = grad.view(kTgtEmbed);

  const std::size_t n = tape.enc.size();
  const std::size_t steps = tape.gold.size();
  const double scale = 1.0 / static_cast<double>(steps);

  std::vector<Vec> dh_enc(n, Vec(h_dim, 0.0));
  std::vector<Vec> g_att(n, Vec(h_dim, 0.0));  // sum_t de_{t,i} * d_t
  Vec dd_next(h_dim, 0.0);

  for (std::size_t t = steps; t-- > 0;) {
    Vec dlogits = tape.probs[t];
    dlogits[static_cast<std::size_t>(tape.gold[t])] -= 1.0;
    for (double& v : dlogits) v *= scale;

    outer_acc(out_w_g, dlogits.data(), tape.comb[t].data());
    for (int v = 0; v < hp.tgt_vocab; ++v) out_b_g.data[v] += dlogits[v];
    Vec dcomb(h_dim, 0.0);
    mat_t_vec_acc(out_w, dlogits.data(), dcomb.data());

    Vec dd(h_dim);
    for (int k = 0; k < h_dim; ++k) {
      const double c = tape.comb[t][k];
      dd[k] = dcomb[k] * (1.0 - c * c);  // d(tanh)
    }
    const Vec& dctx = dd;  // same upstream gradient feeds d and ctx

    const Vec& alpha = tape.alpha[t];
    Vec dalpha(n);
    for (std::size_t i = 0; i < n; ++i) {
      dalpha[i] = dot(dctx, tape.enc[i].h);
      axpy(alpha[i], dctx, dh_enc[i]);
    }
    double asum = 0.0;
    for (std::size_t i = 0; i < n; ++i) asum += alpha[i] * dalpha[i];
    const Vec& d_t = tape.dec[t].h;
    Vec dd_total = dd;
    for (std::size_t i = 0; i < n; ++i) {
      const double de = alpha[i] * (dalpha[i] - asum);
      axpy(de, tape.wh[i], dd_total);
      axpy(de, d_t, g_att[i]);
    }
    for (int k = 0; k < h_dim; ++k) dd_total[k] += dd_next[k];

    Vec dx(hp.embed_dim, 0.0);
    Vec dh_prev(h_dim, 0.0);
    gru_backward(dec_p, dec_g, tape.dec[t], dd_total, dx, dh_prev);
    double* erow = tgt_embed_g.row(tape.dec_in[t]);
    for (int k = 0; k < hp.embed_dim; ++k) erow[k] += dx[k];
    dd_next = std::move(dh_prev);
  }
  // Decoder's initial state is the final encoder state.
  for (int k = 0; k < h_dim; ++k) dh_enc[n - 1][k] += dd_next[k];

  // wh_i = AttW h_i
  for (std::size_t i = 0; i < n; ++i) {
    outer_acc(att_g, g_att[i].data(), tape.enc[i].h.data());
    mat_t_vec_acc(att_w, g_att[i].data(), dh_enc[i].data());
  }

  Vec dh_next(h_dim, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    Vec dh = dh_enc[i];
    for (int k = 0; k < h_dim; ++k) dh[k] += dh_next[k];
    Vec dx(hp.embed_dim, 0.0);
    Vec dh_prev(h_dim, 0.0);
    gru_backward(enc_p, enc_g, tape.enc[i], dh, dx, dh_prev);
    double* erow = src_embed_g.row(tape.enc_in[i]);
    for (int k = 0; k < hp.embed_dim; ++k) erow[k] += dx[k];
    dh_next = std::move(dh_prev);
  }
}

}  // namespace

Vocab::Vocab() : tokens_{"<s>", "</s>", "<unk>", "<pad>"} {
  for (int i = 0; i < kNumReserved; ++i) ids_[tokens_[i]] = i;
}

Vocab Vocab::build(std::span<const std::string> lines) {
  Vocab v;
  for (const auto& line : lines) {
    for (auto& tok : split_ws(line)) {
      if (v.ids_.emplace(tok, static_cast<int>(v.tokens_.size())).second) {
        v.tokens_.push_back(tok);
      }
    }
  }
  return v;
}

Vocab Vocab::from_tokens(std::vector<std::string> tokens) {
  Vocab v;
  if (tokens.size() < kNumReserved ||
      !std::equal(v.tokens_.begin(), v.tokens_.end(), tokens.begin())) {
    throw BitextMismatch("vocabulary lacks the reserved token block");
  }
  v.tokens_ = std::move(tokens);
  v.ids_.clear();
  for (std::size_t i = 0; i < v.tokens_.size(); ++i) {
    if (!v.ids_.emplace(v.tokens_[i], static_cast<int>(i)).second) {
      throw BitextMismatch("duplicate token in vocabulary: " + v.tokens_[i]);
    }
  }
  return v;
}

int Vocab::id(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnkId : it->second;
}

const std::string& Vocab::token(int id) const {
  return tokens_.at(static_cast<std::size_t>(id));
}

std::vector<int> Vocab::encode(std::span<const std::string> tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

ParamPack::ParamPack(const Hyperparams& hp) {
  const int e = hp.embed_dim, h = hp.hidden_dim;
  const int vs = hp.src_vocab, vt = hp.tgt_vocab;
  auto shape = [&](TensorId id) -> std::pair<int, int> {
    switch (id) {
      case kSrcEmbed: return {vs, e};
      case kTgtEmbed: return {vt, e};
      case kEncWz: case kEncWr: case kEncWh:
      case kDecWz: case kDecWr: case kDecWh: return {h, e};
      case kEncUz: case kEncUr: case kEncUh:
      case kDecUz: case kDecUr: case kDecUh:
      case kAttW: return {h, h};
      case kEncBz: case kEncBr: case kEncBh:
      case kDecBz: case kDecBr: case kDecBh: return {h, 1};
      case kOutW: return {vt, h};
      case kOutB: return {vt, 1};
      default: return {0, 0};
    }
  };
  std::size_t offset = 0;
  for (int i = 0; i < kTensorCount; ++i) {
    shapes_[i] = shape(static_cast<TensorId>(i));
    offsets_[i] = offset;
    offset += static_cast<std::size_t>(shapes_[i].first) *
              static_cast<std::size_t>(shapes_[i].second);
  }
  offsets_[kTensorCount] = offset;
  data_.assign(offset, 0.0);
}

MatView ParamPack::view(TensorId id) {
  return {data_.data() + offsets_[id], shapes_[id].first, shapes_[id].second};
}

MatView ParamPack::view(TensorId id) const {
  return {const_cast<double*>(data_.data()) + offsets_[id], shapes_[id].first,
          shapes_[id].second};
}

void ParamPack::zero() { std::fill(data_.begin(), data_.end(), 0.0); }

void ParamPack::add_scaled(const ParamPack& other, double scale) {
  for (std::size_t i = 0; i < data_.size(); ++i) {
    data_[i] += scale * other.data_[i];
  }
}

bool ParamPack::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

Seq2SeqModel Seq2SeqModel::init(Hyperparams hp, Vocab src, Vocab tgt) {
  hp.src_vocab = src.size();
  hp.tgt_vocab = tgt.size();
  Seq2SeqModel model{hp, std::move(src), std::move(tgt), ParamPack(hp)};
  Rng rng(hp.seed);
  double* data = model.params.data();
  for (std::size_t i = 0; i < model.params.size(); ++i) {
    data[i] = rng.uniform(-0.1, 0.1);
  }
  return model;
}

Bitext load_bitext(const std::filesystem::path& src_path,
                   const std::filesystem::path& tgt_path) {
  Bitext b{read_lines(src_path), read_lines(tgt_path)};
  if (b.src.size() != b.tgt.size()) {
    throw BitextMismatch(src_path.string() + " and " + tgt_path.string() +
                         " differ in line count (" +
                         std::to_string(b.src.size()) + " vs " +
                         std::to_string(b.tgt.size()) + ")");
  }
  return b;
}

double forward_loss(const Seq2SeqModel& model, std::span<const int> src_ids,
                    std::span<const int> tgt_ids,
                    std::vector<std::vector<double>>* attention) {
  Tape tape;
  double loss = run_forward(model, src_ids, tgt_ids, tape);
  if (attention) *attention = tape.alpha;
  return loss;
}

double forward_backward(const Seq2SeqModel& model, std::span<const int> src_ids,
                        std::span<const int> tgt_ids, ParamPack& grad) {
  Tape tape;
  double loss = run_forward(model, src_ids, tgt_ids, tape);
  run_backward(model, tape, grad);
  return loss;
}

Seq2SeqModel train(const Bitext& bitext, Hyperparams hp, TrainLog* train_log,
                   std::ostream* log) {
  if (bitext.size() == 0) throw BitextMismatch("empty training bitext");
  if (!hp.valid()) throw BitextMismatch("invalid hyperparameters");

  Vocab src_vocab = Vocab::build(bitext.src);
  Vocab tgt_vocab = Vocab::build(bitext.tgt);

  std::vector<std::vector<int>> src_ids(bitext.size()), tgt_ids(bitext.size());
  for (std::size_t i = 0; i < bitext.size(); ++i) {
    src_ids[i] = src_vocab.encode(split_ws(bitext.src[i]));
    tgt_ids[i] = tgt_vocab.encode(split_ws(bitext.tgt[i]));
  }

  // Every tenth pair is held out for epoch selection.
  std::vector<std::size_t> train_idx, heldout_idx;
  for (std::size_t i = 0; i < bitext.size(); ++i) {
    if (bitext.size() >= 2 && i % 10 == 0) {
      heldout_idx.push_back(i);
    } else {
      train_idx.push_back(i);
    }
  }

  Seq2SeqModel model =
      Seq2SeqModel::init(hp, std::move(src_vocab), std::move(tgt_vocab));
  ParamPack grad(model.hp);
  Rng shuffle_rng(mix_seed(hp.seed, stream_tag("epoch-shuffle")));

  std::vector<double> best_params;
  double best_loss = std::numeric_limits<double>::infinity();
  int best_epoch = 0;

  for (int epoch = 1; epoch <= hp.epochs; ++epoch) {
    shuffle_rng.shuffle(train_idx);
    double epoch_loss = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < train_idx.size();
         start += static_cast<std::size_t>(hp.batch_size)) {
      const std::size_t end = std::min(
          train_idx.size(), start + static_cast<std::size_t>(hp.batch_size));
      grad.zero();
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t i = train_idx[k];
        double loss = forward_backward(model, src_ids[i], tgt_ids[i], grad);
        if (!std::isfinite(loss)) {
          throw DivergedTraining("non-finite loss at epoch " +
                                 std::to_string(epoch) + ", pair " +
                                 std::to_string(i));
        }
        epoch_loss += loss;
        ++seen;
      }
      model.params.add_scaled(grad, -hp.learning_rate /
                                        static_cast<double>(end - start));
    }
    if (!model.params.all_finite()) {
      throw DivergedTraining("non-finite parameters after epoch " +
                             std::to_string(epoch));
    }
    epoch_loss /= std::max<std::size_t>(seen, 1);

    const auto& eval_idx = heldout_idx.empty() ? train_idx : heldout_idx;
    double heldout_loss = 0.0;
    for (std::size_t i : eval_idx) {
      heldout_loss += forward_loss(model, src_ids[i], tgt_ids[i]);
    }
    heldout_loss /= static_cast<double>(eval_idx.size());

    if (log) {
      *log << "epoch " << epoch << " train_loss " << epoch_loss
           << " heldout_loss " << heldout_loss << '\n';
    }
    if (train_log) {
      train_log->train_loss.push_back(epoch_loss);
      train_log->heldout_loss.push_back(heldout_loss);
    }
    if (heldout_loss < best_loss) {
      best_loss = heldout_loss;
      best_epoch = epoch;
      best_params.assign(model.params.data(),
                         model.params.data() + model.params.size());
    }
  }

  std::copy(best_params.begin(), best_params.end(), model.params.data());
  if (train_log) train_log->best_epoch = best_epoch;
  if (log) *log << "selected epoch " << best_epoch << '\n';
  return model;
}

std::vector<int> translate_ids(const Seq2SeqModel& model,
                               std::span<const int> src_ids) {
  const Hyperparams& hp = model.hp;
  const int h_dim = hp.hidden_dim;
  const ParamPack& params = model.params;
  const GruParams enc_p = gru_params(params, true);
  const GruParams dec_p = gru_params(params, false);
  const MatView att_w = params.view(kAttW);
  const MatView out_w = params.view(kOutW);
  const MatView out_b = params.view(kOutB);

  std::vector<int> enc_in(src_ids.begin(), src_ids.end());
  enc_in.push_back(kEosId);
  std::vector<Vec> enc_h(enc_in.size());
  std::vector<Vec> wh(enc_in.size());
  Vec h(h_dim, 0.0);
  GruCache cache;
  for (std::size_t i = 0; i < enc_in.size(); ++i) {
    gru_forward(enc_p, embed_row(params, kSrcEmbed, enc_in[i]), std::move(h),
                cache);
    enc_h[i] = cache.h;
    h = cache.h;
    wh[i].assign(h_dim, 0.0);
    matvec(att_w, enc_h[i].data(), wh[i].data());
  }

  std::vector<int> out;
  Vec d = enc_h.back();
  int prev = kBosId;
  for (int t = 0; t < hp.max_decode_len; ++t) {
    gru_forward(dec_p, embed_row(params, kTgtEmbed, prev), std::move(d), cache);
    d = cache.h;
    Vec scores(enc_h.size());
    for (std::size_t i = 0; i < enc_h.size(); ++i) scores[i] = dot(d, wh[i]);
    const double smax = *std::max_element(scores.begin(), scores.end());
    double ssum = 0.0;
    for (double& s : scores) {
      s = std::exp(s - smax);
      ssum += s;
    }
    Vec ctx(h_dim, 0.0);
    for (std::size_t i = 0; i < enc_h.size(); ++i) {
      axpy(scores[i] / ssum, enc_h[i], ctx);
    }
    Vec comb(h_dim);
    for (int k = 0; k < h_dim; ++k) comb[k] = std::tanh(d[k] + ctx[k]);
    Vec logits(hp.tgt_vocab);
    matvec(out_w, comb.data(), logits.data());
    for (int v = 0; v < hp.tgt_vocab; ++v) logits[v] += out_b.data[v];
    int arg = 0;
    for (int v = 1; v < hp.tgt_vocab; ++v) {
      if (logits[v] > logits[arg]) arg = v;  // ties keep the lowest id
    }
    if (arg == kEosId) break;
    out.push_back(arg);
    prev = arg;
  }
  return out;
}

std::vector<std::string> translate(const Seq2SeqModel& model,
                                   std::span<const std::string> src_tokens) {
  auto ids = translate_ids(model, model.src_vocab.encode(src_tokens));
  std::vector<std::string> toks;
  toks.reserve(ids.size());
  for (int id : ids) toks.push_back(model.tgt_vocab.token(id));
  return toks;
}

GradCheckResult gradient_check(const Seq2SeqModel& model,
                               std::span<const int> src_ids,
                               std::span<const int> tgt_ids, double epsilon,
                               std::uint64_t sample_seed) {
  ParamPack grad(model.hp);
  forward_backward(model, src_ids, tgt_ids, grad);

  Seq2SeqModel probe = model;
  const std::size_t total = probe.params.size();
  std::vector<std::size_t> indices;
  if (total <= 10000) {
    indices.resize(total);
    std::iota(indices.begin(), indices.end(), std::size_t{0});
  } else {
    Rng rng(mix_seed(sample_seed, stream_tag("grad-check")));
    indices = sample_indices(total, total / 100, rng);
  }

  GradCheckResult result;
  result.params_checked = indices.size();
  double* data = probe.params.data();
  for (std::size_t idx : indices) {
    const double original = data[idx];
    data[idx] = original + epsilon;
    const double loss_plus = forward_loss(probe, src_ids, tgt_ids);
    data[idx] = original - epsilon;
    const double loss_minus = forward_loss(probe, src_ids, tgt_ids);
    data[idx] = original;
    const double fd = (loss_plus - loss_minus) / (2.0 * epsilon);
    const double g = grad.data()[idx];
    const double rel = std::abs(g - fd) /
                       std::max({std::abs(g), std::abs(fd), 1e-8});
    result.max_rel_error = std::max(result.max_rel_error, rel);
  }
  return result;
}

namespace {

void append_le_doubles(std::string& out, const double* data, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    auto bits = std::bit_cast<std::uint64_t>(data[i]);
    for (int b = 0; b < 8; ++b) {
      out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
    }
  }
}

}  // namespace

void save_model(const Seq2SeqModel& model, const std::filesystem::path& path) {
  nlohmann::json header;
  header["format"] = "tagmt-seq2seq";
  header["format_version"] = 1;
  header["hyperparams"] = {{"embed_dim", model.hp.embed_dim},
                           {"hidden_dim", model.hp.hidden_dim},
                           {"src_vocab", model.hp.src_vocab},
                           {"tgt_vocab", model.hp.tgt_vocab},
                           {"epochs", model.hp.epochs},
                           {"learning_rate", model.hp.learning_rate},
                           {"batch_size", model.hp.batch_size},
                           {"seed", model.hp.seed},
                           {"max_decode_len", model.hp.max_decode_len}};
  header["src_vocab_tokens"] = model.src_vocab.tokens();
  header["tgt_vocab_tokens"] = model.tgt_vocab.tokens();
  header["param_count"] = model.params.size();

  std::string out = header.dump();
  out.push_back('\n');
  append_le_doubles(out, model.params.data(), model.params.size());
  write_file(path, out);
}

Seq2SeqModel load_model(const std::filesystem::path& path) {
  const std::string blob = read_file(path);
  const std::size_t newline = blob.find('\n');
  if (newline == std::string::npos) {
    throw IoError("truncated checkpoint: " + path.string());
  }
  nlohmann::json header = nlohmann::json::parse(blob.substr(0, newline));
  if (header.value("format", "") != std::string("tagmt-seq2seq")) {
    throw IoError("not a tagmt-seq2seq checkpoint: " + path.string());
  }
  Hyperparams hp;
  const auto& h = header.at("hyperparams");
  hp.embed_dim = h.at("embed_dim").get<int>();
  hp.hidden_dim = h.at("hidden_dim").get<int>();
  hp.src_vocab = h.at("src_vocab").get<int>();
  hp.tgt_vocab = h.at("tgt_vocab").get<int>();
  hp.epochs = h.at("epochs").get<int>();
  hp.learning_rate = h.at("learning_rate").get<double>();
  hp.batch_size = h.at("batch_size").get<int>();
  hp.seed = h.at("seed").get<std::uint64_t>();
  hp.max_decode_len = h.at("max_decode_len").get<int>();

  Vocab src = Vocab::from_tokens(
      header.at("src_vocab_tokens").get<std::vector<std::string>>());
  Vocab tgt = Vocab::from_tokens(
      header.at("tgt_vocab_tokens").get<std::vector<std::string>>());

  Seq2SeqModel model{hp, std::move(src), std::move(tgt), ParamPack(hp)};
  const std::size_t expected = header.at("param_count").get<std::size_t>();
  if (expected != model.params.size() ||
      blob.size() != newline + 1 + 8 * expected) {
    throw IoError("checkpoint size mismatch: " + path.string());
  }
  const char* bytes = blob.data() + newline + 1;
  double* data = model.params.data();
  for (std::size_t i = 0; i < expected; ++i) {
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b) {
      bits = (bits << 8) |
             static_cast<unsigned char>(bytes[i * 8 + static_cast<std::size_t>(b)]);
    }
    data[i] = std::bit_cast<double>(bits);
  }
  return model;
}

}  // namespace nmt
}  // namespace tagmt
