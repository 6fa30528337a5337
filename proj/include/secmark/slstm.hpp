// Copyright 2026 Secmark Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "secmark/corpus.hpp"
#include "secmark/embedding.hpp"
#include "secmark/errors.hpp"
#include "secmark/eval.hpp"
#include "secmark/optim.hpp"
#include "secmark/rng.hpp"
#include "secmark/tensor.hpp"

namespace secmark {

struct SlstmConfig {
  int window = 3;
  int hidden = 200;
  int heading_filters = 200;
  int kernel = 3;
  int sent_len = 100;
  int head_len = 5;
  double dropout = 0.2;
  double lr = 0.001;
  int batch = 128;
  bool heading_branch = true;
  bool mean_pool = false;
  bool freeze_embeddings = false;
  int max_epochs = 50;
  int patience = 5;
  double valid_fraction = 0.1;
  uint64_t seed = 42;

  void validate() const {
    if (window < 0) throw ConfigError("window must be >= 0");
    if (hidden < 1) throw ConfigError("hidden size must be positive");
    if (kernel > head_len)
      throw ConfigError("kernel " + std::to_string(kernel) +
                        " exceeds heading length " + std::to_string(head_len));
    if (kernel < 1) throw ConfigError("kernel must be positive");
    if (dropout < 0 || dropout >= 1)
      throw ConfigError("dropout must be in [0,1)");
    if (sent_len < 1 || head_len < 1)
      throw ConfigError("input lengths must be positive");
    if (batch < 1) throw ConfigError("batch size must be positive");
  }
};

// One direction's cell parameters. Gate rows in order input, forget,
// candidate, output.
struct LstmParams {
  Tensor wx;  // [4H, E]
  Tensor wh;  // [4H, H]
  Tensor b;   // [4H]
};

inline std::pair<Tensor, Tensor> lstm_cell_step(const Tensor& x,
                                                const Tensor& h,
                                                const Tensor& c,
                                                const LstmParams& p,
                                                int hidden) {
  Tensor gates = add(add(matvec(p.wx, x), matvec(p.wh, h)), p.b);
  Tensor i = sigmoid(slice(gates, 0, hidden));
  Tensor f = sigmoid(slice(gates, hidden, hidden));
  Tensor g = tanh_op(slice(gates, 2 * hidden, hidden));
  Tensor o = sigmoid(slice(gates, 3 * hidden, hidden));
  Tensor cn = add(mul(f, c), mul(i, g));
  Tensor hn = mul(o, tanh_op(cn));
  return {hn, cn};
}

// Runs both directions over the non-padding prefix (ids truncated to
// sent_len, trailing zeros stripped) and concatenates the two final hidden
// states, or the per-step means when mean_pool is set. All-padding input
// encodes to the zero vector.
inline Tensor blstm_encode(const std::vector<int>& ids_in, const Tensor& emb,
                           const LstmParams& fwd, const LstmParams& bwd,
                           int hidden, int sent_len, bool mean_pool = false) {
  std::vector<int> ids(
      ids_in.begin(),
      ids_in.begin() +
          std::min<size_t>(ids_in.size(), static_cast<size_t>(sent_len)));
  while (!ids.empty() && ids.back() == 0) ids.pop_back();
  if (ids.empty()) return Tensor::zeros({2 * hidden});
  const int T = static_cast<int>(ids.size());
  Tensor x = rows(emb, ids);

  std::vector<Tensor> h_f(T), h_b(T);
  Tensor h = Tensor::zeros({hidden});
  Tensor c = Tensor::zeros({hidden});
  for (int t = 0; t < T; ++t) {
    std::tie(h, c) = lstm_cell_step(row(x, t), h, c, fwd, hidden);
    h_f[t] = h;
  }
  h = Tensor::zeros({hidden});
  c = Tensor::zeros({hidden});
  for (int t = T - 1; t >= 0; --t) {
    std::tie(h, c) = lstm_cell_step(row(x, t), h, c, bwd, hidden);
    h_b[t] = h;
  }
  if (mean_pool) {
    std::vector<Tensor> steps(T);
    for (int t = 0; t < T; ++t) steps[t] = concat({h_f[t], h_b[t]});
    return mean_over_time(stack_rows(steps));
  }
  return concat({h_f[T - 1], h_b[0]});
}

// Valid 1-D convolution with ReLU over the heading positions, then max over
// time. head_ids must already have exactly head_len entries.
inline Tensor conv_maxpool_encode(const std::vector<int>& head_ids,
                                  const Tensor& emb, const Tensor& conv_w,
                                  const Tensor& conv_b, int kernel) {
  const int head_len = static_cast<int>(head_ids.size());
  if (kernel > head_len)
    throw ConfigError("kernel " + std::to_string(kernel) +
                      " exceeds heading length " + std::to_string(head_len));
  Tensor x = rows(emb, head_ids);
  const int positions = head_len - kernel + 1;
  std::vector<Tensor> feats(positions);
  for (int p = 0; p < positions; ++p) {
    std::vector<Tensor> win(kernel);
    for (int j = 0; j < kernel; ++j) win[j] = row(x, p + j);
    feats[p] = relu(add(matvec(conv_w, concat(win)), conv_b));
  }
  return max_over_time(stack_rows(feats));
}

// Token-index view of a document for the neural models.
struct NeuralSentence {
  std::vector<int> word_ids;  // truncated to sent_len
  std::vector<int> head_ids;  // exactly head_len, zero-padded
  int gold = -1;              // -1 when unlabeled
};

struct NeuralDoc {
  std::vector<NeuralSentence> sentences;
};

class SlstmModel {
 public:
  SlstmModel() = default;

  // Dimensions of the concatenated sentence representation.
  int concat_dim() const {
    return 2 * config_.hidden * (2 * config_.window + 1) +
           (config_.heading_branch ? config_.heading_filters : 0);
  }

  // Builds the parameter set, copying the pretrained word vectors. The
  // heading table is randomly initialized over the same id space.
  void build(const EmbeddingTable& pretrained, const SlstmConfig& config) {
    config.validate();
    config_ = config;
    embed_dim_ = pretrained.dim();
    words_ = pretrained.words();
    index_.clear();
    for (size_t i = 0; i < words_.size(); ++i)
      index_.emplace(words_[i], static_cast<int>(i) + 1);
    const int rows = static_cast<int>(words_.size()) + 1;
    const int e = embed_dim_;
    const int h = config_.hidden;
    const int f = config_.heading_filters;

    word_emb_ = Tensor::from(pretrained.data(), {rows, e},
                             !config_.freeze_embeddings);
    head_emb_ = Tensor::zeros({rows, e}, true);

    Rng rng(derive_seed(config_.seed, 7));
    for (int r = 1; r < rows; ++r)
      for (int j = 0; j < e; ++j)
        head_emb_.data()[static_cast<size_t>(r) * e + j] =
            (rng.uniform() - 0.5) / e;

    auto glorot = [&rng](std::vector<int> shape, int fan_in, int fan_out) {
      Tensor t = Tensor::zeros(std::move(shape), true);
      const double limit = std::sqrt(6.0 / (fan_in + fan_out));
      for (double& v : t.data()) v = rng.uniform(-limit, limit);
      return t;
    };
    auto make_cell = [&]() {
      LstmParams p;
      p.wx = glorot({4 * h, e}, e, h);
      p.wh = glorot({4 * h, h}, h, h);
      p.b = Tensor::zeros({4 * h}, true);
      // Forget-gate bias starts at 1 so early training keeps memory open.
      for (int j = h; j < 2 * h; ++j) p.b.data()[j] = 1.0;
      return p;
    };
    fwd_ = make_cell();
    bwd_ = make_cell();
    conv_w_ = glorot({f, config_.kernel * e}, config_.kernel * e, f);
    conv_b_ = Tensor::zeros({f}, true);
    dense_w_ = glorot({kLabelCount, concat_dim()}, concat_dim(), kLabelCount);
    dense_b_ = Tensor::zeros({kLabelCount}, true);
  }

  // All trainable tensors, embeddings first.
  std::vector<Tensor> parameters() const {
    std::vector<Tensor> out;
    if (!config_.freeze_embeddings) out.push_back(word_emb_);
    out.push_back(head_emb_);
    out.insert(out.end(), {fwd_.wx, fwd_.wh, fwd_.b, bwd_.wx, bwd_.wh,
                           bwd_.b});
    if (config_.heading_branch) out.insert(out.end(), {conv_w_, conv_b_});
    out.insert(out.end(), {dense_w_, dense_b_});
    return out;
  }

  // Every parameter tensor including frozen embeddings, for serialization.
  std::vector<std::pair<std::string, Tensor>> named_tensors() const {
    return {{"word_emb", word_emb_}, {"head_emb", head_emb_},
            {"fwd_wx", fwd_.wx},     {"fwd_wh", fwd_.wh},
            {"fwd_b", fwd_.b},       {"bwd_wx", bwd_.wx},
            {"bwd_wh", bwd_.wh},     {"bwd_b", bwd_.b},
            {"conv_w", conv_w_},     {"conv_b", conv_b_},
            {"dense_w", dense_w_},   {"dense_b", dense_b_}};
  }

  int word_id(const std::string& word) const {
    auto it = index_.find(word);
    return it == index_.end() ? 0 : it->second;
  }

  NeuralSentence encode_sentence_ids(const Sentence& s,
                                     const std::vector<Token>* heading) const {
    NeuralSentence out;
    for (const auto& t : s.tokens) {
      if (static_cast<int>(out.word_ids.size()) >= config_.sent_len) break;
      out.word_ids.push_back(word_id(t.text));
    }
    out.head_ids.assign(config_.head_len, 0);
    if (heading != nullptr)
      for (int j = 0;
           j < config_.head_len && j < static_cast<int>(heading->size()); ++j)
        out.head_ids[j] = word_id((*heading)[j].text);
    if (s.gold_label) out.gold = static_cast<int>(*s.gold_label);
    return out;
  }

  NeuralDoc encode_document(const Document& doc) const {
    NeuralDoc out;
    const std::vector<Token>* heading = nullptr;
    for (const auto& s : doc.sentences) {
      if (s.is_heading) heading = &s.tokens;
      out.sentences.push_back(encode_sentence_ids(s, heading));
    }
    return out;
  }

  std::vector<NeuralDoc> encode_corpus(const Corpus& corpus) const {
    std::vector<NeuralDoc> out;
    out.reserve(corpus.documents.size());
    for (const auto& doc : corpus.documents)
      out.push_back(encode_document(doc));
    return out;
  }

  Tensor encode_sentence(const NeuralSentence& s) const {
    return blstm_encode(s.word_ids, word_emb_, fwd_, bwd_, config_.hidden,
                        config_.sent_len, config_.mean_pool);
  }

  Tensor heading_features(const NeuralSentence& s) const {
    return conv_maxpool_encode(s.head_ids, head_emb_, conv_w_, conv_b_,
                               config_.kernel);
  }

  // Logits for sentence t given cached per-sentence encodings.
  Tensor logits_from_cache(const NeuralDoc& doc, int t,
                           const std::vector<Tensor>& encodings,
                           const std::vector<Tensor>& head_feats,
                           const std::vector<double>* dropout_mask) const {
    const int n = static_cast<int>(doc.sentences.size());
    if (t < 0 || t >= n)
      throw DataError("sentence index " + std::to_string(t) +
                      " out of range for document of " + std::to_string(n) +
                      " sentences");
    std::vector<Tensor> parts;
    for (int o = -config_.window; o <= config_.window; ++o) {
      const int src = t + o;
      if (src < 0 || src >= n)
        parts.push_back(Tensor::zeros({2 * config_.hidden}));
      else
        parts.push_back(encodings[src]);
    }
    if (config_.heading_branch) parts.push_back(head_feats[t]);
    Tensor rep = concat(parts);
    if (dropout_mask != nullptr && config_.dropout > 0)
      rep = dropout_apply(rep, *dropout_mask, config_.dropout);
    return add(matvec(dense_w_, rep), dense_b_);
  }

  // Label probabilities for one sentence; dropout off.
  std::vector<double> forward(const NeuralDoc& doc, int t) const {
    const auto [encodings, head_feats] = encode_all(doc);
    Tensor p = softmax(logits_from_cache(doc, t, encodings, head_feats,
                                         nullptr));
    return p.data();
  }

  std::vector<std::pair<SectionLabel, std::vector<double>>> predict(
      const NeuralDoc& doc) const {
    const auto [encodings, head_feats] = encode_all(doc);
    std::vector<std::pair<SectionLabel, std::vector<double>>> out;
    for (int t = 0; t < static_cast<int>(doc.sentences.size()); ++t) {
      Tensor p = softmax(logits_from_cache(doc, t, encodings, head_feats,
                                           nullptr));
      const std::vector<double>& probs = p.data();
      int best = 0;
      for (int y = 1; y < kLabelCount; ++y)
        if (probs[y] > probs[best]) best = y;
      out.emplace_back(static_cast<SectionLabel>(best), probs);
    }
    return out;
  }

  const SlstmConfig& config() const { return config_; }
  int embed_dim() const { return embed_dim_; }
  const std::vector<std::string>& words() const { return words_; }

  Tensor word_emb() const { return word_emb_; }
  Tensor head_emb() const { return head_emb_; }
  const LstmParams& fwd() const { return fwd_; }
  const LstmParams& bwd() const { return bwd_; }
  Tensor conv_w() const { return conv_w_; }
  Tensor conv_b() const { return conv_b_; }
  Tensor dense_w() const { return dense_w_; }
  Tensor dense_b() const { return dense_b_; }

  // Deserialization hooks.
  void restore(SlstmConfig config, int embed_dim,
               std::vector<std::string> words,
               std::map<std::string, Tensor> tensors) {
    config.validate();
    config_ = config;
    embed_dim_ = embed_dim;
    words_ = std::move(words);
    index_.clear();
    for (size_t i = 0; i < words_.size(); ++i)
      index_.emplace(words_[i], static_cast<int>(i) + 1);
    word_emb_ = tensors.at("word_emb");
    head_emb_ = tensors.at("head_emb");
    fwd_ = {tensors.at("fwd_wx"), tensors.at("fwd_wh"), tensors.at("fwd_b")};
    bwd_ = {tensors.at("bwd_wx"), tensors.at("bwd_wh"), tensors.at("bwd_b")};
    conv_w_ = tensors.at("conv_w");
    conv_b_ = tensors.at("conv_b");
    dense_w_ = tensors.at("dense_w");
    dense_b_ = tensors.at("dense_b");
  }

 private:
  std::pair<std::vector<Tensor>, std::vector<Tensor>> encode_all(
      const NeuralDoc& doc) const {
    std::vector<Tensor> encodings, head_feats;
    for (const auto& s : doc.sentences) {
      encodings.push_back(encode_sentence(s));
      if (config_.heading_branch) head_feats.push_back(heading_features(s));
    }
    if (!config_.heading_branch) head_feats.resize(doc.sentences.size());
    return {std::move(encodings), std::move(head_feats)};
  }

  SlstmConfig config_;
  int embed_dim_ = 0;
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
  Tensor word_emb_, head_emb_;
  LstmParams fwd_, bwd_;
  Tensor conv_w_, conv_b_;
  Tensor dense_w_, dense_b_;
};

struct SlstmExample {
  int doc = 0;
  int t = 0;
};

// Mean cross-entropy over a batch, encoding each distinct sentence once.
// Masks, when given, must hold one dropout mask of concat_dim() entries per
// example; null masks disable dropout (evaluation mode).
inline Tensor slstm_batch_loss(
    const SlstmModel& model, const std::vector<NeuralDoc>& docs,
    const std::vector<SlstmExample>& batch,
    const std::vector<std::vector<double>>* masks = nullptr,
    std::vector<int>* argmax_out = nullptr) {
  if (batch.empty()) throw DataError("empty batch");
  std::map<int, std::vector<Tensor>> enc_cache, head_cache;
  auto doc_tensors = [&](int di) {
    auto it = enc_cache.find(di);
    if (it == enc_cache.end()) {
      std::vector<Tensor> encs, heads;
      for (const auto& s : docs[di].sentences) {
        encs.push_back(model.encode_sentence(s));
        if (model.config().heading_branch)
          heads.push_back(model.heading_features(s));
      }
      if (!model.config().heading_branch)
        heads.resize(docs[di].sentences.size());
      enc_cache.emplace(di, std::move(encs));
      head_cache.emplace(di, std::move(heads));
    }
  };
  std::vector<Tensor> losses;
  losses.reserve(batch.size());
  for (size_t i = 0; i < batch.size(); ++i) {
    const SlstmExample& ex = batch[i];
    doc_tensors(ex.doc);
    const NeuralSentence& s = docs[ex.doc].sentences[ex.t];
    if (s.gold < 0)
      throw DataError("unlabeled sentence in training batch");
    const std::vector<double>* mask =
        masks != nullptr ? &(*masks)[i] : nullptr;
    Tensor logits = model.logits_from_cache(
        docs[ex.doc], ex.t, enc_cache[ex.doc], head_cache[ex.doc], mask);
    if (argmax_out != nullptr) {
      int best = 0;
      for (int y = 1; y < kLabelCount; ++y)
        if (logits.data()[y] > logits.data()[best]) best = y;
      argmax_out->push_back(best);
    }
    losses.push_back(softmax_cross_entropy(logits, s.gold));
  }
  return mean_scalars(losses);
}

struct TrainLogRow {
  int epoch = 0;
  std::string split;
  double loss = 0.0;
  double macro_f1 = 0.0;
};

namespace detail {

inline double slstm_eval_macro_f1(const SlstmModel& model,
                                  const std::vector<NeuralDoc>& docs,
                                  const std::vector<int>& doc_ids,
                                  double* mean_loss = nullptr) {
  ConfusionCounts counts;
  double loss_sum = 0.0;
  long long n = 0;
  for (int di : doc_ids) {
    const auto preds = model.predict(docs[di]);
    for (size_t t = 0; t < preds.size(); ++t) {
      const int gold = docs[di].sentences[t].gold;
      counts.observe(preds[t].first, static_cast<SectionLabel>(gold));
      loss_sum += -std::log(std::max(preds[t].second[gold], 1e-300));
      ++n;
    }
  }
  if (mean_loss != nullptr) *mean_loss = n > 0 ? loss_sum / n : 0.0;
  return report_from_counts(counts).macro_f1_targets();
}

}  // namespace detail

// Mini-batch Adam with a held-out validation split, early stopping on
// validation macro-F1 (patience in epochs), and a best-snapshot restore.
// Batches are whole documents accumulated to at least the configured batch
// size so every sentence is encoded once per batch.
inline SlstmModel train_slstm(const Corpus& corpus,
                              const EmbeddingTable& pretrained,
                              const SlstmConfig& config,
                              std::vector<TrainLogRow>* log = nullptr) {
  SlstmModel model;
  model.build(pretrained, config);
  const std::vector<NeuralDoc> docs = model.encode_corpus(corpus);
  if (docs.empty()) throw DataError("empty corpus");
  for (const auto& d : docs)
    for (const auto& s : d.sentences)
      if (s.gold < 0) throw DataError("corpus is not fully labeled");

  const int n_docs = static_cast<int>(docs.size());
  std::vector<int> order(n_docs);
  std::iota(order.begin(), order.end(), 0);
  Rng split_rng(derive_seed(config.seed, 101));
  split_rng.shuffle(&order);
  int n_valid = n_docs >= 2
                    ? std::max(1, static_cast<int>(std::lround(
                                      config.valid_fraction * n_docs)))
                    : 0;
  std::vector<int> valid_ids(order.begin(), order.begin() + n_valid);
  std::vector<int> train_ids(order.begin() + n_valid, order.end());
  if (valid_ids.empty()) valid_ids = train_ids;

  Adam adam(model.parameters(), config.lr);
  const int mask_dim = model.concat_dim();

  std::vector<std::vector<double>> best;
  double best_f1 = -1.0;
  int since_best = 0;
  auto snapshot = [&]() {
    best.clear();
    for (const auto& [name, t] : model.named_tensors())
      best.push_back(t.data());
  };
  auto restore = [&]() {
    size_t i = 0;
    for (auto& [name, t] : model.named_tensors()) t.data() = best[i++];
  };

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    Rng epoch_rng(derive_seed(config.seed, 1000 + epoch));
    epoch_rng.shuffle(&train_ids);
    double epoch_loss = 0.0;
    long long epoch_examples = 0;
    ConfusionCounts train_counts;

    size_t at = 0;
    while (at < train_ids.size()) {
      std::vector<SlstmExample> batch;
      while (at < train_ids.size() &&
             static_cast<int>(batch.size()) < config.batch) {
        const int di = train_ids[at++];
        for (int t = 0; t < static_cast<int>(docs[di].sentences.size()); ++t)
          batch.push_back({di, t});
      }
      if (batch.empty()) break;
      std::vector<std::vector<double>> masks;
      if (config.dropout > 0) {
        masks.resize(batch.size());
        for (auto& m : masks) {
          m.resize(mask_dim);
          for (double& v : m)
            v = epoch_rng.uniform() < config.dropout ? 0.0 : 1.0;
        }
      }
      adam.zero_grad();
      std::vector<int> argmax;
      Tensor loss = slstm_batch_loss(
          model, docs, batch, config.dropout > 0 ? &masks : nullptr, &argmax);
      loss.backward();
      adam.step();
      epoch_loss += loss.item() * batch.size();
      epoch_examples += batch.size();
      for (size_t i = 0; i < batch.size(); ++i)
        train_counts.observe(
            static_cast<SectionLabel>(argmax[i]),
            static_cast<SectionLabel>(
                docs[batch[i].doc].sentences[batch[i].t].gold));
    }

    double valid_loss = 0.0;
    const double valid_f1 =
        detail::slstm_eval_macro_f1(model, docs, valid_ids, &valid_loss);
    if (log != nullptr) {
      log->push_back({epoch, "train",
                      epoch_examples > 0 ? epoch_loss / epoch_examples : 0.0,
                      report_from_counts(train_counts).macro_f1_targets()});
      log->push_back({epoch, "valid", valid_loss, valid_f1});
    }
    if (valid_f1 > best_f1) {
      best_f1 = valid_f1;
      since_best = 0;
      snapshot();
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  if (!best.empty()) restore();
  return model;
}

inline void write_training_log(const std::vector<TrainLogRow>& log,
                               std::ostream& os) {
  os << "epoch,split,loss,macro_f1\n";
  os.precision(17);
  for (const auto& row : log)
    os << row.epoch << ',' << row.split << ',' << row.loss << ','
       << row.macro_f1 << '\n';
}

}  // namespace secmark
