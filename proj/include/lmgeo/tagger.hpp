#pragma once

// Bi-LSTM encoder / Bi-LSTM decoder sequence tagger with a per-tag weighted
// cross-entropy whose weights adapt to validation F1 between epochs.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lmgeo/metrics.hpp"
#include "lmgeo/tags.hpp"

namespace lmgeo::tagger {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// One gate: act(W h_prev + U x + b).
struct GateWeights {
  Matrix W;  // hidden x hidden
  Matrix U;  // hidden x input
  Vector b;  // hidden
};

struct LstmWeights {
  GateWeights input;
  GateWeights forget;
  GateWeights cell;
  GateWeights output;

  static LstmWeights zeros(int input_dim, int hidden_dim);
  int hidden_dim() const { return static_cast<int>(input.b.size()); }
  int input_dim() const { return static_cast<int>(input.U.cols()); }
};

struct CellState {
  Vector h;
  Vector c;

  static CellState zeros(int hidden_dim) {
    return {Vector::Zero(hidden_dim), Vector::Zero(hidden_dim)};
  }
};

// i = s(W_i h + U_i x + b_i), f = s(...), c~ = tanh(...), c = f*c_prev + i*c~,
// o = s(...), h = o * tanh(c). Throws ConfigError on dimension mismatch.
CellState lstm_cell_step(const LstmWeights& w, const Vector& x,
                         const CellState& prev);

struct TaggerDims {
  int embed = 50;
  int encoder_hidden = 256;
  int decoder_hidden = 512;
};

// All trainable tensors. Gradients use the same struct.
struct Weights {
  Matrix embeddings;  // vocab x embed, one row per token key
  LstmWeights enc_fw;
  LstmWeights enc_bw;
  LstmWeights dec_fw;
  LstmWeights dec_bw;
  Matrix W_y;  // tags x 2*decoder_hidden
  Vector b_y;  // tags

  static Weights zeros_like(const Weights& other);

  // Calls fn(name, tensor) for every tensor in a fixed order.
  template <typename Fn>
  void for_each(Fn&& fn);
  template <typename Fn>
  void for_each(Fn&& fn) const;
};

// Token normalization for vocabulary lookup: lower case, digits -> '0'.
std::string token_key(std::string_view token);

// Deterministic pseudo-random embedding derived from the key and seed.
Vector hashed_embedding(std::string_view key, int dim, std::uint64_t seed);

class TaggerParams {
 public:
  TaggerParams() = default;

  // Seeded initialization. Embedding rows start at hashed_embedding(key).
  static TaggerParams initialize(const TaggerDims& dims,
                                 std::vector<std::string> vocab_keys,
                                 std::uint64_t seed);

  const TaggerDims& dims() const { return dims_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::string>& vocab() const { return vocab_; }
  // Row index for a token, or -1 when the token is out of vocabulary.
  int row_of(std::string_view token) const;
  // Trained row for known tokens; hashed vector otherwise.
  Vector embed(std::string_view token) const;

  Weights& weights() { return weights_; }
  const Weights& weights() const { return weights_; }

  // Throws ConfigError on non-finite entries or inconsistent shapes.
  void validate() const;

  // Versioned text checkpoint of named tensors.
  void save(std::ostream& out) const;
  static TaggerParams load(std::istream& in);

 private:
  TaggerDims dims_;
  std::uint64_t seed_ = 0;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, int> index_;
  Weights weights_;
};

// Returns the concatenated [forward; backward] encoder state per token.
std::vector<Vector> bilstm_encode(const TaggerParams& params,
                                  const TokenizedPage& page);

// Rows are tokens, columns are tags; each row sums to 1.
struct TagDistribution {
  Matrix probs;
};

// Runs the decoder Bi-LSTM, the output layer and a row-wise softmax.
TagDistribution decode_scores(const TaggerParams& params,
                              std::span<const Vector> encoded);

struct AdaptiveWeights {
  std::vector<double> w;
  double alpha_distinguish = 64.0;

  static AdaptiveWeights uniform(std::size_t n, double alpha = 64.0) {
    return {std::vector<double>(n, 1.0), alpha};
  }
};

// w_i = exp(alpha * (mean(F1) - F1_i)).
AdaptiveWeights update_weights(std::span<const double> per_tag_f1, double alpha);

// -sum_t w[gold_t] * log(max(p[t][gold_t], 1e-12)).
double adaptive_loss(const TagDistribution& dist, std::span<const Tag> gold,
                     const AdaptiveWeights& weights);

// Adaptive loss of one page plus its gradient, accumulated into `grad`
// (which must be shaped like params.weights()). Tokens outside the
// vocabulary contribute no embedding gradient.
double loss_and_gradient(const TaggerParams& params, const TokenizedPage& page,
                         std::span<const Tag> gold,
                         const AdaptiveWeights& weights, Weights& grad);

// Argmax tag per token.
std::vector<Tag> predict(const TaggerParams& params, const TokenizedPage& page);

std::vector<LocationEntity> extract_entities(const TaggerParams& params,
                                             const TokenizedPage& page);

struct LabeledPage {
  TokenizedPage page;
  std::vector<Tag> tags;
};

// Labeled corpus file: "<id>\t<space-joined tokens>\t<space-joined tags>".
std::vector<LabeledPage> read_corpus(std::istream& in);
void write_corpus(std::ostream& out, std::span<const LabeledPage> pages);

struct TrainConfig {
  int epochs = 30;
  int batch_size = 64;
  double learning_rate = 0.05;
  double alpha_distinguish = 64.0;
  // Global gradient-norm clip applied per mini-batch; <= 0 disables.
  double clip_norm = 50.0;
  std::uint64_t seed = 1;
};

struct EpochReport {
  int epoch = 0;
  double train_loss = 0.0;
  AdaptiveWeights weights;  // weights used during this epoch
  std::vector<double> validation_tag_f1;
  ExtractionMetrics validation;
};

struct TrainResult {
  TaggerParams params;  // checkpoint with the best validation all-type F1
  int best_epoch = 0;
  std::vector<EpochReport> epochs;
};

// Mini-batch gradient descent on the adaptive loss; weights are recomputed
// from the previous epoch's validation tag F1. Throws InputError on an empty
// training set and TrainingError when the loss stops being finite.
TrainResult train(std::span<const LabeledPage> training,
                  std::span<const LabeledPage> validation,
                  const TaggerDims& dims, const TrainConfig& config,
                  const std::function<void(const EpochReport&)>& on_epoch = {});

ExtractionMetrics evaluate(const TaggerParams& params,
                           std::span<const LabeledPage> pages);

// ---- template definitions ----

template <typename Fn>
void visit_lstm(const std::string& prefix, LstmWeights& w, Fn& fn) {
  GateWeights* gates[] = {&w.input, &w.forget, &w.cell, &w.output};
  const char* names[] = {"i", "f", "c", "o"};
  for (int g = 0; g < 4; ++g) {
    fn(prefix + ".W_" + names[g], gates[g]->W);
    fn(prefix + ".U_" + names[g], gates[g]->U);
    fn(prefix + ".b_" + names[g], gates[g]->b);
  }
}

template <typename Fn>
void Weights::for_each(Fn&& fn) {
  fn(std::string("embeddings"), embeddings);
  visit_lstm("enc_fw", enc_fw, fn);
  visit_lstm("enc_bw", enc_bw, fn);
  visit_lstm("dec_fw", dec_fw, fn);
  visit_lstm("dec_bw", dec_bw, fn);
  fn(std::string("W_y"), W_y);
  fn(std::string("b_y"), b_y);
}

template <typename Fn>
void Weights::for_each(Fn&& fn) const {
  const_cast<Weights*>(this)->for_each(
      [&](const std::string& name, auto& t) { fn(name, std::as_const(t)); });
}

}  // namespace lmgeo::tagger
