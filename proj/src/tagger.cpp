#include "lmgeo/tagger.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include "lmgeo/error.hpp"
#include "lmgeo/numfmt.hpp"
#include "lmgeo/random.hpp"
#include "lmgeo/text.hpp"

namespace lmgeo::tagger {

namespace {

constexpr double kLogClamp = 1e-12;
constexpr std::string_view kCheckpointMagic = "lmgeo-tagger";
constexpr int kCheckpointVersion = 1;

Vector sigmoid(const Vector& z) {
  return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

Vector tanh_vec(const Vector& z) {
  return z.unaryExpr([](double v) { return std::tanh(v); });
}

void check_gate(const GateWeights& g, int input_dim, int hidden_dim) {
  if (g.W.rows() != hidden_dim || g.W.cols() != hidden_dim ||
      g.U.rows() != hidden_dim || g.U.cols() != input_dim ||
      g.b.size() != hidden_dim) {
    throw ConfigError("LSTM gate dimensions are inconsistent");
  }
}

void check_lstm(const LstmWeights& w, int input_dim, int hidden_dim) {
  check_gate(w.input, input_dim, hidden_dim);
  check_gate(w.forget, input_dim, hidden_dim);
  check_gate(w.cell, input_dim, hidden_dim);
  check_gate(w.output, input_dim, hidden_dim);
}

Vector pre_activation(const GateWeights& g, const Vector& h, const Vector& x) {
  return g.W * h + g.U * x + g.b;
}

// Forward activations of one LSTM direction, stored in processing order.
struct LstmTrace {
  std::vector<std::size_t> order;  // step -> original position
  std::vector<Vector> x, i, f, g, o, c, tc, h;
};

LstmTrace run_lstm(const LstmWeights& w, std::span<const Vector> xs,
                   bool reverse) {
  const std::size_t n = xs.size();
  LstmTrace tr;
  tr.order.resize(n);
  for (std::size_t s = 0; s < n; ++s) tr.order[s] = reverse ? n - 1 - s : s;
  const int hd = w.hidden_dim();
  Vector h = Vector::Zero(hd);
  Vector c = Vector::Zero(hd);
  for (std::size_t s = 0; s < n; ++s) {
    const Vector& x = xs[tr.order[s]];
    Vector i = sigmoid(pre_activation(w.input, h, x));
    Vector f = sigmoid(pre_activation(w.forget, h, x));
    Vector g = tanh_vec(pre_activation(w.cell, h, x));
    Vector o = sigmoid(pre_activation(w.output, h, x));
    c = f.cwiseProduct(c) + i.cwiseProduct(g);
    Vector tc = tanh_vec(c);
    h = o.cwiseProduct(tc);
    tr.x.push_back(x);
    tr.i.push_back(std::move(i));
    tr.f.push_back(std::move(f));
    tr.g.push_back(std::move(g));
    tr.o.push_back(std::move(o));
    tr.c.push_back(c);
    tr.tc.push_back(std::move(tc));
    tr.h.push_back(h);
  }
  return tr;
}

// Outputs of a trace re-indexed by original position.
std::vector<Vector> outputs(const LstmTrace& tr) {
  std::vector<Vector> out(tr.h.size());
  for (std::size_t s = 0; s < tr.h.size(); ++s) out[tr.order[s]] = tr.h[s];
  return out;
}

void accumulate_gate(GateWeights& gg, const Vector& dz, const Vector& h_prev,
                     const Vector& x) {
  gg.W.noalias() += dz * h_prev.transpose();
  gg.U.noalias() += dz * x.transpose();
  gg.b += dz;
}

// Backpropagation through time. dh is indexed by original position; input
// gradients are added into dx (also by original position).
void backprop_lstm(const LstmWeights& w, const LstmTrace& tr,
                   std::span<const Vector> dh, LstmWeights& gw,
                   std::vector<Vector>& dx) {
  const int hd = w.hidden_dim();
  Vector dh_next = Vector::Zero(hd);
  Vector dc_next = Vector::Zero(hd);
  const Vector zero = Vector::Zero(hd);
  for (std::size_t s = tr.h.size(); s-- > 0;) {
    const std::size_t pos = tr.order[s];
    const Vector& c_prev = s > 0 ? tr.c[s - 1] : zero;
    const Vector& h_prev = s > 0 ? tr.h[s - 1] : zero;
    const Vector dht = dh[pos] + dh_next;
    const Vector d_o = dht.cwiseProduct(tr.tc[s]);
    const Vector dc =
        dc_next + dht.cwiseProduct(tr.o[s]).cwiseProduct(
                      (1.0 - tr.tc[s].array().square()).matrix());
    const Vector d_i = dc.cwiseProduct(tr.g[s]);
    const Vector d_g = dc.cwiseProduct(tr.i[s]);
    const Vector d_f = dc.cwiseProduct(c_prev);
    dc_next = dc.cwiseProduct(tr.f[s]);

    const Vector dz_i =
        d_i.array() * tr.i[s].array() * (1.0 - tr.i[s].array());
    const Vector dz_f =
        d_f.array() * tr.f[s].array() * (1.0 - tr.f[s].array());
    const Vector dz_o =
        d_o.array() * tr.o[s].array() * (1.0 - tr.o[s].array());
    const Vector dz_c = d_g.array() * (1.0 - tr.g[s].array().square());

    accumulate_gate(gw.input, dz_i, h_prev, tr.x[s]);
    accumulate_gate(gw.forget, dz_f, h_prev, tr.x[s]);
    accumulate_gate(gw.cell, dz_c, h_prev, tr.x[s]);
    accumulate_gate(gw.output, dz_o, h_prev, tr.x[s]);

    dh_next = w.input.W.transpose() * dz_i + w.forget.W.transpose() * dz_f +
              w.cell.W.transpose() * dz_c + w.output.W.transpose() * dz_o;
    dx[pos] += w.input.U.transpose() * dz_i + w.forget.U.transpose() * dz_f +
               w.cell.U.transpose() * dz_c + w.output.U.transpose() * dz_o;
  }
}

std::vector<Vector> concat(const std::vector<Vector>& a,
                           const std::vector<Vector>& b) {
  std::vector<Vector> out(a.size());
  for (std::size_t t = 0; t < a.size(); ++t) {
    out[t].resize(a[t].size() + b[t].size());
    out[t] << a[t], b[t];
  }
  return out;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix p(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double m = logits.row(r).maxCoeff();
    Eigen::RowVectorXd e = (logits.row(r).array() - m).exp().matrix();
    p.row(r) = e / e.sum();
  }
  return p;
}

struct ForwardPass {
  std::vector<Vector> x;
  LstmTrace enc_fw, enc_bw, dec_fw, dec_bw;
  std::vector<Vector> dec;
  Matrix probs;
};

ForwardPass forward(const TaggerParams& params, const TokenizedPage& page) {
  const Weights& w = params.weights();
  ForwardPass fp;
  fp.x.reserve(page.size());
  for (const auto& tok : page.tokens()) fp.x.push_back(params.embed(tok));
  fp.enc_fw = run_lstm(w.enc_fw, fp.x, false);
  fp.enc_bw = run_lstm(w.enc_bw, fp.x, true);
  const auto enc = concat(outputs(fp.enc_fw), outputs(fp.enc_bw));
  fp.dec_fw = run_lstm(w.dec_fw, enc, false);
  fp.dec_bw = run_lstm(w.dec_bw, enc, true);
  fp.dec = concat(outputs(fp.dec_fw), outputs(fp.dec_bw));
  Matrix logits(static_cast<Eigen::Index>(page.size()), w.W_y.rows());
  for (std::size_t t = 0; t < page.size(); ++t) {
    logits.row(static_cast<Eigen::Index>(t)) = (w.W_y * fp.dec[t] + w.b_y).transpose();
  }
  fp.probs = softmax_rows(logits);
  return fp;
}

void fill_uniform(Matrix& m, Rng& rng, double scale) {
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-scale, scale);
}

LstmWeights random_lstm(int input_dim, int hidden_dim, Rng& rng) {
  LstmWeights w = LstmWeights::zeros(input_dim, hidden_dim);
  const double scale = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  for (GateWeights* g : {&w.input, &w.forget, &w.cell, &w.output}) {
    fill_uniform(g->W, rng, scale);
    fill_uniform(g->U, rng, scale);
  }
  w.forget.b.setOnes();
  return w;
}

void expect_token(std::istream& in, std::string_view expected) {
  std::string tok;
  if (!(in >> tok) || tok != expected) {
    throw FormatError("checkpoint: expected '" + std::string(expected) +
                      "', got '" + tok + "'");
  }
}

template <typename T>
T read_value(std::istream& in, const char* what) {
  T v{};
  if (!(in >> v)) throw FormatError(std::string("checkpoint: cannot read ") + what);
  return v;
}

double squared_norm(const Weights& w) {
  double total = 0.0;
  w.for_each([&](const std::string&, const auto& t) { total += t.squaredNorm(); });
  return total;
}

}  // namespace

LstmWeights LstmWeights::zeros(int input_dim, int hidden_dim) {
  GateWeights g{Matrix::Zero(hidden_dim, hidden_dim),
                Matrix::Zero(hidden_dim, input_dim), Vector::Zero(hidden_dim)};
  return {g, g, g, g};
}

CellState lstm_cell_step(const LstmWeights& w, const Vector& x,
                         const CellState& prev) {
  const int hd = w.hidden_dim();
  check_lstm(w, w.input_dim(), hd);
  if (x.size() != w.input_dim() || prev.h.size() != hd || prev.c.size() != hd) {
    throw ConfigError("LSTM input or state dimension mismatch");
  }
  const Vector i = sigmoid(pre_activation(w.input, prev.h, x));
  const Vector f = sigmoid(pre_activation(w.forget, prev.h, x));
  const Vector g = tanh_vec(pre_activation(w.cell, prev.h, x));
  const Vector o = sigmoid(pre_activation(w.output, prev.h, x));
  CellState next;
  next.c = f.cwiseProduct(prev.c) + i.cwiseProduct(g);
  next.h = o.cwiseProduct(tanh_vec(next.c));
  return next;
}

Weights Weights::zeros_like(const Weights& other) {
  Weights z = other;
  z.for_each([](const std::string&, auto& t) { t.setZero(); });
  return z;
}

std::string token_key(std::string_view token) {
  std::string k = to_lower(token);
  for (char& c : k) {
    if (std::isdigit(static_cast<unsigned char>(c))) c = '0';
  }
  return k;
}

Vector hashed_embedding(std::string_view key, int dim, std::uint64_t seed) {
  Rng rng(mix_seed(seed, fnv1a64(key)));
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = rng.uniform(-0.5, 0.5);
  return v;
}

TaggerParams TaggerParams::initialize(const TaggerDims& dims,
                                      std::vector<std::string> vocab_keys,
                                      std::uint64_t seed) {
  if (dims.embed <= 0 || dims.encoder_hidden <= 0 || dims.decoder_hidden <= 0) {
    throw ConfigError("tagger dimensions must be positive");
  }
  TaggerParams p;
  p.dims_ = dims;
  p.seed_ = seed;
  for (auto& k : vocab_keys) {
    if (p.index_.emplace(k, static_cast<int>(p.vocab_.size())).second) {
      p.vocab_.push_back(std::move(k));
    }
  }
  Weights& w = p.weights_;
  w.embeddings.resize(static_cast<Eigen::Index>(p.vocab_.size()), dims.embed);
  for (std::size_t r = 0; r < p.vocab_.size(); ++r) {
    w.embeddings.row(static_cast<Eigen::Index>(r)) =
        hashed_embedding(p.vocab_[r], dims.embed, seed).transpose();
  }
  Rng rng(mix_seed(seed, 0x7a6b));
  w.enc_fw = random_lstm(dims.embed, dims.encoder_hidden, rng);
  w.enc_bw = random_lstm(dims.embed, dims.encoder_hidden, rng);
  w.dec_fw = random_lstm(2 * dims.encoder_hidden, dims.decoder_hidden, rng);
  w.dec_bw = random_lstm(2 * dims.encoder_hidden, dims.decoder_hidden, rng);
  w.W_y.resize(kNumTags, 2 * dims.decoder_hidden);
  fill_uniform(w.W_y, rng, 1.0 / std::sqrt(2.0 * dims.decoder_hidden));
  w.b_y = Vector::Zero(kNumTags);
  return p;
}

int TaggerParams::row_of(std::string_view token) const {
  const auto it = index_.find(token_key(token));
  return it == index_.end() ? -1 : it->second;
}

Vector TaggerParams::embed(std::string_view token) const {
  const int r = row_of(token);
  if (r >= 0) return weights_.embeddings.row(r).transpose();
  return hashed_embedding(token_key(token), dims_.embed, seed_);
}

void TaggerParams::validate() const {
  const auto& w = weights_;
  if (w.embeddings.rows() != static_cast<Eigen::Index>(vocab_.size()) ||
      w.embeddings.cols() != dims_.embed) {
    throw ConfigError("embedding table shape does not match vocabulary/dims");
  }
  check_lstm(w.enc_fw, dims_.embed, dims_.encoder_hidden);
  check_lstm(w.enc_bw, dims_.embed, dims_.encoder_hidden);
  check_lstm(w.dec_fw, 2 * dims_.encoder_hidden, dims_.decoder_hidden);
  check_lstm(w.dec_bw, 2 * dims_.encoder_hidden, dims_.decoder_hidden);
  if (w.W_y.rows() != static_cast<Eigen::Index>(kNumTags) ||
      w.W_y.cols() != 2 * dims_.decoder_hidden ||
      w.b_y.size() != static_cast<Eigen::Index>(kNumTags)) {
    throw ConfigError("output layer shape is inconsistent");
  }
  w.for_each([](const std::string& name, const auto& t) {
    if (!t.allFinite()) throw ConfigError("tensor " + name + " is not finite");
  });
}

void TaggerParams::save(std::ostream& out) const {
  out << kCheckpointMagic << ' ' << kCheckpointVersion << '\n';
  out << "dims " << dims_.embed << ' ' << dims_.encoder_hidden << ' '
      << dims_.decoder_hidden << '\n';
  out << "seed " << seed_ << '\n';
  out << "vocab " << vocab_.size() << '\n';
  for (const auto& k : vocab_) out << k << '\n';
  weights_.for_each([&](const std::string& name, const auto& t) {
    out << "tensor " << name << ' ' << t.rows() << ' ' << t.cols() << '\n';
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.cols(); ++c) {
        if (c) out << ' ';
        out << format_double(t(r, c));
      }
      out << '\n';
    }
  });
  out << "end\n";
}

TaggerParams TaggerParams::load(std::istream& in) {
  expect_token(in, kCheckpointMagic);
  const int version = read_value<int>(in, "version");
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  }
  TaggerDims dims;
  expect_token(in, "dims");
  dims.embed = read_value<int>(in, "embed dim");
  dims.encoder_hidden = read_value<int>(in, "encoder dim");
  dims.decoder_hidden = read_value<int>(in, "decoder dim");
  expect_token(in, "seed");
  const auto seed = read_value<std::uint64_t>(in, "seed");
  expect_token(in, "vocab");
  const auto n = read_value<std::size_t>(in, "vocab size");
  std::vector<std::string> vocab(n);
  for (auto& k : vocab) k = read_value<std::string>(in, "vocab entry");
  if (std::set<std::string>(vocab.begin(), vocab.end()).size() != n) {
    throw FormatError("checkpoint: duplicate vocabulary entries");
  }

  TaggerParams p = initialize(dims, std::move(vocab), seed);
  p.weights_.for_each([&](const std::string& name, auto& t) {
    expect_token(in, "tensor");
    expect_token(in, name);
    const auto rows = read_value<Eigen::Index>(in, "rows");
    const auto cols = read_value<Eigen::Index>(in, "cols");
    if (rows != t.rows() || cols != t.cols()) {
      throw FormatError("checkpoint: tensor " + name + " has wrong shape");
    }
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        t(r, c) = parse_double(read_value<std::string>(in, "tensor value"));
      }
    }
  });
  expect_token(in, "end");
  p.validate();
  return p;
}

std::vector<Vector> bilstm_encode(const TaggerParams& params,
                                  const TokenizedPage& page) {
  if (page.size() == 0) throw InputError("cannot encode an empty page");
  const Weights& w = params.weights();
  std::vector<Vector> x;
  x.reserve(page.size());
  for (const auto& tok : page.tokens()) x.push_back(params.embed(tok));
  return concat(outputs(run_lstm(w.enc_fw, x, false)),
                outputs(run_lstm(w.enc_bw, x, true)));
}

TagDistribution decode_scores(const TaggerParams& params,
                              std::span<const Vector> encoded) {
  if (encoded.empty()) throw InputError("cannot decode an empty sequence");
  const Weights& w = params.weights();
  for (const auto& e : encoded) {
    if (e.size() != w.dec_fw.input_dim()) {
      throw ConfigError("encoded state dimension mismatch");
    }
  }
  const auto dec = concat(outputs(run_lstm(w.dec_fw, encoded, false)),
                          outputs(run_lstm(w.dec_bw, encoded, true)));
  Matrix logits(static_cast<Eigen::Index>(dec.size()), w.W_y.rows());
  for (std::size_t t = 0; t < dec.size(); ++t) {
    logits.row(static_cast<Eigen::Index>(t)) = (w.W_y * dec[t] + w.b_y).transpose();
  }
  return {softmax_rows(logits)};
}

AdaptiveWeights update_weights(std::span<const double> per_tag_f1, double alpha) {
  AdaptiveWeights out;
  out.alpha_distinguish = alpha;
  if (per_tag_f1.empty()) return out;
  // Mean as an offset from the first value so equal F1s give exactly 1.
  const double base = per_tag_f1.front();
  double shift = 0.0;
  for (double f : per_tag_f1) shift += f - base;
  const double mean = base + shift / static_cast<double>(per_tag_f1.size());
  out.w.reserve(per_tag_f1.size());
  for (double f : per_tag_f1) out.w.push_back(std::exp(alpha * (mean - f)));
  return out;
}

double adaptive_loss(const TagDistribution& dist, std::span<const Tag> gold,
                     const AdaptiveWeights& weights) {
  if (static_cast<std::size_t>(dist.probs.rows()) != gold.size()) {
    throw InputError("gold length does not match distribution rows");
  }
  if (static_cast<Eigen::Index>(weights.w.size()) != dist.probs.cols()) {
    throw InputError("weight vector size does not match tag count");
  }
  double loss = 0.0;
  for (std::size_t t = 0; t < gold.size(); ++t) {
    const double p = dist.probs(static_cast<Eigen::Index>(t), gold[t]);
    loss -= weights.w[gold[t]] * std::log(std::max(p, kLogClamp));
  }
  return loss;
}

double loss_and_gradient(const TaggerParams& params, const TokenizedPage& page,
                         std::span<const Tag> gold,
                         const AdaptiveWeights& weights, Weights& grad) {
  if (gold.size() != page.size()) {
    throw InputError("gold tags do not match page length");
  }
  const Weights& w = params.weights();
  const ForwardPass fp = forward(params, page);
  const double loss = adaptive_loss({fp.probs}, gold, weights);

  const std::size_t n = page.size();
  const int hd = params.dims().decoder_hidden;
  const int he = params.dims().encoder_hidden;
  std::vector<Vector> d_dec_fw(n), d_dec_bw(n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto row = static_cast<Eigen::Index>(t);
    Vector dy = fp.probs.row(row).transpose();
    const double p_gold = fp.probs(row, gold[t]);
    if (p_gold < kLogClamp) {
      dy.setZero();
    } else {
      dy[gold[t]] -= 1.0;
      dy *= weights.w[gold[t]];
    }
    grad.W_y.noalias() += dy * fp.dec[t].transpose();
    grad.b_y += dy;
    const Vector dd = w.W_y.transpose() * dy;
    d_dec_fw[t] = dd.head(hd);
    d_dec_bw[t] = dd.tail(hd);
  }

  std::vector<Vector> d_enc(n, Vector::Zero(2 * he));
  backprop_lstm(w.dec_fw, fp.dec_fw, d_dec_fw, grad.dec_fw, d_enc);
  backprop_lstm(w.dec_bw, fp.dec_bw, d_dec_bw, grad.dec_bw, d_enc);

  std::vector<Vector> d_enc_fw(n), d_enc_bw(n);
  for (std::size_t t = 0; t < n; ++t) {
    d_enc_fw[t] = d_enc[t].head(he);
    d_enc_bw[t] = d_enc[t].tail(he);
  }
  std::vector<Vector> dx(n, Vector::Zero(params.dims().embed));
  backprop_lstm(w.enc_fw, fp.enc_fw, d_enc_fw, grad.enc_fw, dx);
  backprop_lstm(w.enc_bw, fp.enc_bw, d_enc_bw, grad.enc_bw, dx);
  for (std::size_t t = 0; t < n; ++t) {
    const int r = params.row_of(page.tokens()[t]);
    if (r >= 0) grad.embeddings.row(r) += dx[t].transpose();
  }
  return loss;
}

std::vector<Tag> predict(const TaggerParams& params, const TokenizedPage& page) {
  const auto dist = decode_scores(params, bilstm_encode(params, page));
  std::vector<Tag> tags(page.size());
  for (std::size_t t = 0; t < page.size(); ++t) {
    Eigen::Index best = 0;
    dist.probs.row(static_cast<Eigen::Index>(t)).maxCoeff(&best);
    tags[t] = static_cast<Tag>(best);
  }
  return tags;
}

std::vector<LocationEntity> extract_entities(const TaggerParams& params,
                                             const TokenizedPage& page) {
  const auto tags = predict(params, page);
  return decode_bieso(page.tokens(), tags);
}

std::vector<LabeledPage> read_corpus(std::istream& in) {
  std::vector<LabeledPage> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split(line, '\t');
    const auto where = "corpus line " + std::to_string(lineno);
    if (fields.size() != 3) throw FormatError(where + ": expected 3 tab-separated fields");
    std::vector<std::string> tokens;
    std::istringstream ts(fields[1]);
    for (std::string t; ts >> t;) tokens.push_back(t);
    std::vector<Tag> tags;
    std::istringstream gs(fields[2]);
    for (std::string t; gs >> t;) {
      const auto tag = parse_tag(t);
      if (!tag) throw FormatError(where + ": unknown tag '" + t + "'");
      tags.push_back(*tag);
    }
    if (tags.size() != tokens.size()) {
      throw FormatError(where + ": token and tag counts differ");
    }
    try {
      out.push_back({TokenizedPage(fields[0], std::move(tokens)), std::move(tags)});
    } catch (const InputError& e) {
      throw FormatError(where + ": " + e.what());
    }
  }
  return out;
}

void write_corpus(std::ostream& out, std::span<const LabeledPage> pages) {
  for (const auto& p : pages) {
    out << p.page.source_id() << '\t' << join(p.page.tokens()) << '\t';
    for (std::size_t i = 0; i < p.tags.size(); ++i) {
      if (i) out << ' ';
      out << tag_name(p.tags[i]);
    }
    out << '\n';
  }
}

ExtractionMetrics evaluate(const TaggerParams& params,
                           std::span<const LabeledPage> pages) {
  std::vector<PageEntities> pred, gold;
  pred.reserve(pages.size());
  gold.reserve(pages.size());
  for (const auto& p : pages) {
    pred.push_back({p.page.source_id(), extract_entities(params, p.page)});
    gold.push_back({p.page.source_id(), decode_bieso(p.page.tokens(), p.tags)});
  }
  return compute_metrics(pred, gold);
}

TrainResult train(std::span<const LabeledPage> training,
                  std::span<const LabeledPage> validation,
                  const TaggerDims& dims, const TrainConfig& config,
                  const std::function<void(const EpochReport&)>& on_epoch) {
  if (training.empty()) throw InputError("training corpus is empty");
  if (config.epochs <= 0 || config.batch_size <= 0 || !(config.learning_rate > 0.0)) {
    throw ConfigError("epochs, batch_size and learning_rate must be positive");
  }
  std::set<std::string> keys;
  for (const auto& p : training) {
    if (p.tags.size() != p.page.size()) {
      throw InputError("page " + p.page.source_id() + " has mismatched tags");
    }
    for (const auto& t : p.page.tokens()) keys.insert(token_key(t));
  }
  TrainResult result;
  result.params = TaggerParams::initialize(
      dims, std::vector<std::string>(keys.begin(), keys.end()), config.seed);
  TaggerParams& params = result.params;
  TaggerParams best = params;
  double best_f1 = -1.0;

  AdaptiveWeights weights = AdaptiveWeights::uniform(kNumTags, config.alpha_distinguish);
  std::vector<std::size_t> order(training.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Weights grad = Weights::zeros_like(params.weights());

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    Rng rng(mix_seed(config.seed, 0xE90C, epoch));
    shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      grad.for_each([](const std::string&, auto& t) { t.setZero(); });
      for (std::size_t k = start; k < stop; ++k) {
        const auto& ex = training[order[k]];
        epoch_loss += loss_and_gradient(params, ex.page, ex.tags, weights, grad);
      }
      if (!std::isfinite(epoch_loss)) {
        throw TrainingError("loss diverged in epoch " + std::to_string(epoch));
      }
      double scale = config.learning_rate;
      if (config.clip_norm > 0.0) {
        const double norm = std::sqrt(squared_norm(grad));
        if (norm > config.clip_norm) scale *= config.clip_norm / norm;
      }
      auto& pw = params.weights();
      pw.embeddings -= scale * grad.embeddings;
      auto step_lstm = [&](LstmWeights& p, const LstmWeights& g) {
        GateWeights* ps[] = {&p.input, &p.forget, &p.cell, &p.output};
        const GateWeights* gs[] = {&g.input, &g.forget, &g.cell, &g.output};
        for (int i = 0; i < 4; ++i) {
          ps[i]->W -= scale * gs[i]->W;
          ps[i]->U -= scale * gs[i]->U;
          ps[i]->b -= scale * gs[i]->b;
        }
      };
      step_lstm(pw.enc_fw, grad.enc_fw);
      step_lstm(pw.enc_bw, grad.enc_bw);
      step_lstm(pw.dec_fw, grad.dec_fw);
      step_lstm(pw.dec_bw, grad.dec_bw);
      pw.W_y -= scale * grad.W_y;
      pw.b_y -= scale * grad.b_y;
    }

    EpochReport report;
    report.epoch = epoch;
    report.train_loss = epoch_loss;
    report.weights = weights;
    const auto& eval_set = validation.empty() ? training : validation;
    std::vector<std::vector<Tag>> pred_tags, gold_tags;
    std::vector<PageEntities> pred_ents, gold_ents;
    for (const auto& p : eval_set) {
      auto tags = predict(params, p.page);
      pred_ents.push_back({p.page.source_id(), decode_bieso(p.page.tokens(), tags)});
      gold_ents.push_back({p.page.source_id(), decode_bieso(p.page.tokens(), p.tags)});
      pred_tags.push_back(std::move(tags));
      gold_tags.push_back(p.tags);
    }
    report.validation_tag_f1 = per_tag_f1(pred_tags, gold_tags);
    report.validation = compute_metrics(pred_ents, gold_ents);
    if (report.validation.all_types.f1 > best_f1) {
      best_f1 = report.validation.all_types.f1;
      best = params;
      result.best_epoch = epoch;
    }
    weights = update_weights(report.validation_tag_f1, config.alpha_distinguish);
    if (on_epoch) on_epoch(report);
    result.epochs.push_back(std::move(report));
  }
  result.params = std::move(best);
  return result;
}

}  // namespace lmgeo::tagger
