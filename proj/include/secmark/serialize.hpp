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

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "secmark/crf.hpp"
#include "secmark/doc2vec.hpp"
#include "secmark/errors.hpp"
#include "secmark/features.hpp"
#include "secmark/lda.hpp"
#include "secmark/linear.hpp"
#include "secmark/selection.hpp"
#include "secmark/slstm.hpp"
#include "secmark/vocab.hpp"

namespace secmark {

// Little-endian primitive encoder for model payloads.
class ByteWriter {
 public:
  void u32(uint32_t v) { raw(&v, sizeof v); }
  void u64(uint64_t v) { raw(&v, sizeof v); }
  void i32(int32_t v) { raw(&v, sizeof v); }
  void i64(int64_t v) { raw(&v, sizeof v); }
  void f64(double v) { raw(&v, sizeof v); }
  void b8(bool v) { buf_.push_back(v ? 1 : 0); }

  void str(const std::string& s) {
    u64(s.size());
    buf_.append(s);
  }

  void doubles(const std::vector<double>& v) {
    u64(v.size());
    raw(v.data(), v.size() * sizeof(double));
  }

  void ints(const std::vector<int>& v) {
    u64(v.size());
    for (int x : v) i32(x);
  }

  void longs(const std::vector<long long>& v) {
    u64(v.size());
    for (long long x : v) i64(static_cast<int64_t>(x));
  }

  void strings(const std::vector<std::string>& v) {
    u64(v.size());
    for (const auto& s : v) str(s);
  }

  const std::string& bytes() const { return buf_; }
  std::string take() { return std::move(buf_); }

 private:
  void raw(const void* p, size_t n) {
    buf_.append(static_cast<const char*>(p), n);
  }

  std::string buf_;
};

class ByteReader {
 public:
  explicit ByteReader(const std::string& buf) : buf_(buf) {}

  uint32_t u32() { return get<uint32_t>(); }
  uint64_t u64() { return get<uint64_t>(); }
  int32_t i32() { return get<int32_t>(); }
  int64_t i64() { return get<int64_t>(); }
  double f64() { return get<double>(); }
  bool b8() {
    need(1);
    return buf_[pos_++] != 0;
  }

  std::string str() {
    const size_t n = checked_count(u64(), 1);
    std::string out = buf_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::vector<double> doubles() {
    const size_t n = checked_count(u64(), sizeof(double));
    std::vector<double> out(n);
    std::memcpy(out.data(), buf_.data() + pos_, n * sizeof(double));
    pos_ += n * sizeof(double);
    return out;
  }

  std::vector<int> ints() {
    const size_t n = checked_count(u64(), sizeof(int32_t));
    std::vector<int> out(n);
    for (auto& x : out) x = i32();
    return out;
  }

  std::vector<long long> longs() {
    const size_t n = checked_count(u64(), sizeof(int64_t));
    std::vector<long long> out(n);
    for (auto& x : out) x = i64();
    return out;
  }

  std::vector<std::string> strings() {
    const uint64_t n = u64();
    std::vector<std::string> out;
    out.reserve(n);
    for (uint64_t i = 0; i < n; ++i) out.push_back(str());
    return out;
  }

  bool done() const { return pos_ == buf_.size(); }

 private:
  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  void need(size_t n) const {
    if (pos_ + n > buf_.size()) throw DataError("truncated model payload");
  }

  size_t checked_count(uint64_t n, size_t elem) const {
    if (n > (buf_.size() - pos_) / elem)
      throw DataError("truncated model payload");
    return static_cast<size_t>(n);
  }

  const std::string& buf_;
  size_t pos_ = 0;
};

// Container layout: 4-byte magic, u32 format version, then sections of
// (u32 name length, name, u64 payload length, payload) until EOF.
inline constexpr char kModelMagic[4] = {'S', 'M', 'R', 'K'};
inline constexpr uint32_t kModelFormatVersion = 1;

class ModelWriter {
 public:
  void add(const std::string& name, std::string payload) {
    sections_.emplace_back(name, std::move(payload));
  }

  void save(std::ostream& os) const {
    os.write(kModelMagic, 4);
    write_pod(os, kModelFormatVersion);
    for (const auto& [name, payload] : sections_) {
      write_pod(os, static_cast<uint32_t>(name.size()));
      os.write(name.data(), static_cast<std::streamsize>(name.size()));
      write_pod(os, static_cast<uint64_t>(payload.size()));
      os.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    }
    if (!os) throw DataError("model write failed");
  }

  void save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write model file '" + path + "'");
    save(os);
  }

 private:
  template <typename T>
  static void write_pod(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
  }

  std::vector<std::pair<std::string, std::string>> sections_;
};

class ModelReader {
 public:
  static ModelReader load(std::istream& is) {
    ModelReader r;
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kModelMagic, 4) != 0)
      throw DataError("not a model file (bad magic)");
    const uint32_t version = read_pod<uint32_t>(is);
    if (version != kModelFormatVersion)
      throw DataError("unsupported model format version " +
                      std::to_string(version));
    while (true) {
      uint32_t name_len;
      is.read(reinterpret_cast<char*>(&name_len), sizeof name_len);
      if (is.eof()) break;
      if (!is) throw DataError("truncated model file");
      std::string name(name_len, '\0');
      is.read(name.data(), name_len);
      const uint64_t payload_len = read_pod<uint64_t>(is);
      std::string payload(static_cast<size_t>(payload_len), '\0');
      is.read(payload.data(), static_cast<std::streamsize>(payload_len));
      if (!is) throw DataError("truncated model file");
      r.sections_.emplace(std::move(name), std::move(payload));
    }
    return r;
  }

  static ModelReader load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open model file '" + path + "'");
    return load(is);
  }

  bool has(const std::string& name) const { return sections_.count(name) > 0; }

  const std::string& section(const std::string& name) const {
    auto it = sections_.find(name);
    if (it == sections_.end())
      throw DataError("model file has no '" + name + "' section");
    return it->second;
  }

 private:
  template <typename T>
  static T read_pod(std::istream& is) {
    T v;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is) throw DataError("truncated model file");
    return v;
  }

  std::map<std::string, std::string> sections_;
};

// ---- Per-type payload codecs ----

inline void write_vocab(const Vocabulary& v, ByteWriter* w) {
  w->strings(v.words());
  w->longs(v.counts());
}

inline Vocabulary read_vocab(ByteReader* r) {
  auto words = r->strings();
  auto counts = r->longs();
  if (counts.size() != words.size())
    throw DataError("vocabulary count table size mismatch");
  return Vocabulary(std::move(words), std::move(counts));
}

inline void write_lda(const LdaModel& m, ByteWriter* w) {
  const LdaConfig& c = m.config();
  w->i32(c.topics);
  w->f64(c.alpha);
  w->f64(c.beta);
  w->i32(c.train_iters);
  w->i32(c.infer_iters);
  w->u64(c.seed);
  w->strings(m.vocabulary());
  w->longs(m.topic_word_counts());
  w->longs(m.topic_totals());
}

inline LdaModel read_lda(ByteReader* r) {
  LdaConfig c;
  c.topics = r->i32();
  c.alpha = r->f64();
  c.beta = r->f64();
  c.train_iters = r->i32();
  c.infer_iters = r->i32();
  c.seed = r->u64();
  auto words = r->strings();
  auto topic_word = r->longs();
  auto topic_total = r->longs();
  return LdaModel::from_state(c, std::move(words), std::move(topic_word),
                              std::move(topic_total));
}

inline void write_d2v(const Doc2VecModel& m, ByteWriter* w) {
  const Doc2VecConfig& c = m.config();
  w->i32(c.dim);
  w->i32(c.negatives);
  w->i32(c.epochs);
  w->f64(c.lr);
  w->f64(c.min_lr);
  w->i32(c.min_count);
  w->u64(c.seed);
  write_vocab(m.vocabulary(), w);
  w->doubles(m.word_out());
}

inline Doc2VecModel read_d2v(ByteReader* r) {
  Doc2VecConfig c;
  c.dim = r->i32();
  c.negatives = r->i32();
  c.epochs = r->i32();
  c.lr = r->f64();
  c.min_lr = r->f64();
  c.min_count = r->i32();
  c.seed = r->u64();
  Vocabulary vocab = read_vocab(r);
  auto word_out = r->doubles();
  return Doc2VecModel::from_state(c, std::move(vocab), std::move(word_out));
}

inline void write_extractor(const FeatureExtractor& fx, ByteWriter* w) {
  const FeatureConfig& c = fx.config();
  w->b8(c.families.bow);
  w->b8(c.families.pos);
  w->b8(c.families.lda);
  w->b8(c.families.d2v);
  w->b8(c.families.head);
  w->b8(c.families.loc);
  w->b8(c.families.len);
  w->i32(c.min_count);
  w->u64(c.seed);
  write_vocab(fx.bow_vocab(), w);
  write_vocab(fx.pos_vocab(), w);
  write_vocab(fx.head_vocab(), w);
  if (c.families.lda) write_lda(fx.lda(), w);
  w->i32(c.d2v.dim);
  if (c.families.d2v) write_d2v(fx.d2v(), w);
}

inline FeatureExtractor read_extractor(ByteReader* r) {
  FeatureExtractor fx;
  FeatureConfig& c = *fx.mutable_config();
  c.families.bow = r->b8();
  c.families.pos = r->b8();
  c.families.lda = r->b8();
  c.families.d2v = r->b8();
  c.families.head = r->b8();
  c.families.loc = r->b8();
  c.families.len = r->b8();
  c.min_count = r->i32();
  c.seed = r->u64();
  *fx.mutable_bow_vocab() = read_vocab(r);
  *fx.mutable_pos_vocab() = read_vocab(r);
  *fx.mutable_head_vocab() = read_vocab(r);
  if (c.families.lda) {
    *fx.mutable_lda() = read_lda(r);
    c.lda = fx.lda().config();
  }
  c.d2v.dim = r->i32();
  if (c.families.d2v) {
    *fx.mutable_d2v() = read_d2v(r);
    c.d2v = fx.d2v().config();
  }
  fx.rebuild_space();
  return fx;
}

inline void write_selection(const Selection& sel, ByteWriter* w) {
  w->ints(sel.kept);
  w->strings(sel.space.names());
}

inline Selection read_selection(ByteReader* r) {
  Selection sel;
  sel.kept = r->ints();
  auto names = r->strings();
  if (names.size() != sel.kept.size())
    throw DataError("selection name table size mismatch");
  for (size_t i = 0; i < names.size(); ++i) {
    sel.space.intern(names[i]);
    sel.projection.emplace(sel.kept[i], static_cast<int>(i));
  }
  return sel;
}

inline void write_linear(const LinearModel& m, ByteWriter* w) {
  w->u32(m.kind() == LinearKind::Svm ? 1u : 0u);
  w->i32(m.dims());
  w->doubles(m.weights());
}

inline LinearModel read_linear(ByteReader* r) {
  const LinearKind kind =
      r->u32() == 1u ? LinearKind::Svm : LinearKind::LogisticRegression;
  const int dims = r->i32();
  LinearModel m(kind, dims);
  auto weights = r->doubles();
  if (weights.size() != m.weights().size())
    throw DataError("linear weight table size mismatch");
  *m.mutable_weights() = std::move(weights);
  return m;
}

inline void write_crf(const CrfModel& m, ByteWriter* w) {
  w->ints(m.tmpl().offsets);
  w->i32(m.dims());
  w->doubles(m.weights());
}

inline CrfModel read_crf(ByteReader* r) {
  CrfTemplate tmpl;
  tmpl.offsets = r->ints();
  const int dims = r->i32();
  CrfModel m(dims, tmpl);
  auto weights = r->doubles();
  if (weights.size() != m.weights().size())
    throw DataError("crf weight table size mismatch");
  *m.mutable_weights() = std::move(weights);
  return m;
}

inline void write_slstm_config(const SlstmConfig& c, ByteWriter* w) {
  w->i32(c.window);
  w->i32(c.hidden);
  w->i32(c.heading_filters);
  w->i32(c.kernel);
  w->i32(c.sent_len);
  w->i32(c.head_len);
  w->f64(c.dropout);
  w->f64(c.lr);
  w->i32(c.batch);
  w->b8(c.heading_branch);
  w->b8(c.mean_pool);
  w->b8(c.freeze_embeddings);
  w->i32(c.max_epochs);
  w->i32(c.patience);
  w->f64(c.valid_fraction);
  w->u64(c.seed);
}

inline SlstmConfig read_slstm_config(ByteReader* r) {
  SlstmConfig c;
  c.window = r->i32();
  c.hidden = r->i32();
  c.heading_filters = r->i32();
  c.kernel = r->i32();
  c.sent_len = r->i32();
  c.head_len = r->i32();
  c.dropout = r->f64();
  c.lr = r->f64();
  c.batch = r->i32();
  c.heading_branch = r->b8();
  c.mean_pool = r->b8();
  c.freeze_embeddings = r->b8();
  c.max_epochs = r->i32();
  c.patience = r->i32();
  c.valid_fraction = r->f64();
  c.seed = r->u64();
  return c;
}

inline void write_tensor(const Tensor& t, ByteWriter* w) {
  w->ints(t.shape());
  w->doubles(t.data());
}

inline Tensor read_tensor(ByteReader* r, bool requires_grad) {
  auto shape = r->ints();
  auto data = r->doubles();
  return Tensor::from(std::move(data), std::move(shape), requires_grad);
}

inline void write_slstm(const SlstmModel& m, ByteWriter* w) {
  write_slstm_config(m.config(), w);
  w->i32(m.embed_dim());
  w->strings(m.words());
  const auto named = m.named_tensors();
  w->u64(named.size());
  for (const auto& [name, t] : named) {
    w->str(name);
    write_tensor(t, w);
  }
}

inline SlstmModel read_slstm(ByteReader* r) {
  SlstmConfig config = read_slstm_config(r);
  const int embed_dim = r->i32();
  auto words = r->strings();
  const uint64_t n = r->u64();
  std::map<std::string, Tensor> tensors;
  for (uint64_t i = 0; i < n; ++i) {
    std::string name = r->str();
    const bool grad = !(name == "word_emb" && config.freeze_embeddings);
    tensors.emplace(std::move(name), read_tensor(r, grad));
  }
  SlstmModel m;
  m.restore(config, embed_dim, std::move(words), std::move(tensors));
  return m;
}

// ---- Bundle files written by the trainers ----

// lr / svm / crf bundles carry the featurizer and selection so prediction
// is self-contained.
struct ClassicBundle {
  std::string model_kind;  // "lr", "svm", or "crf"
  FeatureExtractor featurizer;
  Selection selection;
  LinearModel linear;  // when model_kind != "crf"
  CrfModel crf;        // when model_kind == "crf"
};

inline void save_classic_bundle(const ClassicBundle& b,
                                const std::string& path) {
  ModelWriter out;
  {
    ByteWriter w;
    w.str(b.model_kind);
    out.add("meta", w.take());
  }
  {
    ByteWriter w;
    write_extractor(b.featurizer, &w);
    out.add("featurizer", w.take());
  }
  {
    ByteWriter w;
    write_selection(b.selection, &w);
    out.add("selection", w.take());
  }
  ByteWriter w;
  if (b.model_kind == "crf") {
    write_crf(b.crf, &w);
    out.add("crf", w.take());
  } else {
    write_linear(b.linear, &w);
    out.add("linear", w.take());
  }
  out.save(path);
}

inline ClassicBundle load_classic_bundle(const ModelReader& in) {
  ClassicBundle b;
  {
    ByteReader r(in.section("meta"));
    b.model_kind = r.str();
  }
  {
    ByteReader r(in.section("featurizer"));
    b.featurizer = read_extractor(&r);
  }
  {
    ByteReader r(in.section("selection"));
    b.selection = read_selection(&r);
  }
  if (b.model_kind == "crf") {
    ByteReader r(in.section("crf"));
    b.crf = read_crf(&r);
  } else {
    ByteReader r(in.section("linear"));
    b.linear = read_linear(&r);
  }
  return b;
}

inline void save_slstm_bundle(const SlstmModel& m, const std::string& path) {
  ModelWriter out;
  {
    ByteWriter w;
    w.str("slstm");
    out.add("meta", w.take());
  }
  ByteWriter w;
  write_slstm(m, &w);
  out.add("slstm", w.take());
  out.save(path);
}

inline SlstmModel load_slstm_bundle(const ModelReader& in) {
  ByteReader r(in.section("slstm"));
  return read_slstm(&r);
}

// Peeks at the stored model kind so `predict` can dispatch.
inline std::string bundle_kind(const ModelReader& in) {
  ByteReader r(in.section("meta"));
  return r.str();
}

// One feature name per line, for diffing.
inline void export_feature_space(const FeatureSpace& space, std::ostream& os) {
  for (const auto& name : space.names()) os << name << '\n';
}

}  // namespace secmark
