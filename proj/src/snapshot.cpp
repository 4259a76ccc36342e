// Copyright 2026 The adsem Authors
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

#include "adsem/snapshot.hpp"

#include <openssl/sha.h>

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "adsem/error.hpp"

namespace adsem {

namespace {

static_assert(std::endian::native == std::endian::little, "snapshot codec assumes a little-endian host");

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void u64(std::uint64_t v) { raw(&v, sizeof v); }
  void i32(std::int32_t v) { raw(&v, sizeof v); }
  void f64(double v) { raw(&v, sizeof v); }
  void str(std::string_view s) {
    u64(s.size());
    buf_.append(s);
  }
  void strings(const StringSet& set) {
    u64(set.size());
    for (const auto& s : set) str(s);
  }
  void raw(const void* p, std::size_t n) { buf_.append(static_cast<const char*>(p), n); }
  std::string& buffer() { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::uint32_t u32() { return pod<std::uint32_t>(); }
  std::uint64_t u64() { return pod<std::uint64_t>(); }
  std::int32_t i32() { return pod<std::int32_t>(); }
  double f64() { return pod<double>(); }
  std::string str() {
    const std::uint64_t n = count(1);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  StringSet strings() {
    StringSet out;
    for (std::uint64_t i = 0, n = count(8); i < n; ++i) out.insert(str());
    return out;
  }
  // Reads an element count and checks that that many elements of at least
  // `min_size` bytes can still follow.
  std::uint64_t count(std::size_t min_size) {
    const std::uint64_t n = u64();
    if (n > (data_.size() - pos_) / std::max<std::size_t>(min_size, 1)) {
      throw Error(ErrorCode::kTruncated, "snapshot payload ends inside a section");
    }
    return n;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  template <typename T>
  T pod() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw Error(ErrorCode::kTruncated, "snapshot payload ends early");
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

void write_config(Writer& w, const EngineConfig& c) {
  w.i32(c.k_default);
  w.i32(c.stage1_budget);
  w.i32(c.depth);
  w.f64(c.similarity.theta);
  w.f64(c.similarity.attr_weights.brand);
  w.f64(c.similarity.attr_weights.product);
  w.f64(c.similarity.attr_weights.contextual);
  w.f64(c.blend_alpha);
  w.f64(c.graph.edge_threshold);
  w.i32(c.graph.max_degree);
}

EngineConfig read_config(Reader& r) {
  EngineConfig c;
  c.k_default = r.i32();
  c.stage1_budget = r.i32();
  c.depth = r.i32();
  c.similarity.theta = r.f64();
  c.similarity.attr_weights.brand = r.f64();
  c.similarity.attr_weights.product = r.f64();
  c.similarity.attr_weights.contextual = r.f64();
  c.blend_alpha = r.f64();
  c.graph.edge_threshold = r.f64();
  c.graph.max_degree = r.i32();
  return c;
}

void write_metadata(Writer& w, const SemanticMetadata& m) {
  w.str(m.ad_id);
  w.u64(m.categories.size());
  for (const auto& [label, score] : m.categories) {
    w.str(label);
    w.f64(score);
  }
  w.strings(m.brand_attrs);
  w.strings(m.product_attrs);
  w.strings(m.contextual_attrs);
  w.strings(m.phrases);
  w.strings(m.tokens);
  w.str(m.caption);
  w.u8(m.low_coverage ? 1 : 0);
}

SemanticMetadata read_metadata(Reader& r) {
  SemanticMetadata m;
  m.ad_id = r.str();
  for (std::uint64_t i = 0, n = r.count(16); i < n; ++i) {
    std::string label = r.str();
    m.categories.emplace(std::move(label), r.f64());
  }
  m.brand_attrs = r.strings();
  m.product_attrs = r.strings();
  m.contextual_attrs = r.strings();
  m.phrases = r.strings();
  m.tokens = r.strings();
  m.caption = r.str();
  m.low_coverage = r.u8() != 0;
  return m;
}

std::string sha256_raw(std::string_view data) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest);
  return std::string(reinterpret_cast<const char*>(digest), sizeof digest);
}

std::string to_hex(std::string_view bytes) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned char c : bytes) {
    out.push_back(kHex[c >> 4]);
    out.push_back(kHex[c & 15]);
  }
  return out;
}

}  // namespace

std::string sha256_hex(std::string_view data) { return to_hex(sha256_raw(data)); }

std::string encode_snapshot(const EngineState& state) {
  Writer p;
  write_config(p, state.config);

  p.u64(state.metadata.size());
  for (const auto& m : state.metadata) write_metadata(p, m);

  const auto& index = state.index;
  p.u64(index.ad_ids.size());
  for (const auto& id : index.ad_ids) p.str(id);
  p.u64(index.labels.size());
  for (const auto& label : index.labels.words()) p.str(label);
  for (const auto& list : index.postings) {
    p.u64(list.size());
    for (const Posting& posting : list) {
      p.u32(posting.node);
      p.f64(posting.score);
    }
  }
  p.u64(index.doc_count);

  const auto& graph = state.graph;
  p.f64(graph.params.edge_threshold);
  p.i32(graph.params.max_degree);
  p.u64(graph.offsets.size());
  for (auto o : graph.offsets) p.u64(o);
  p.u64(graph.edges.size());
  for (const Edge& e : graph.edges) {
    p.u32(e.to);
    p.f64(e.weight);
  }

  p.u64(state.baseline.ad_ids.size());
  for (std::size_t i = 0; i < state.baseline.ad_ids.size(); ++i) {
    p.str(state.baseline.ad_ids[i]);
    p.str(state.baseline.titles[i]);
  }

  Writer out;
  out.raw(kSnapshotMagic.data(), kSnapshotMagic.size());
  out.u32(kSnapshotVersion);
  out.u32(0);
  out.u64(p.buffer().size());
  const std::string digest = sha256_raw(p.buffer());
  out.raw(digest.data(), digest.size());
  out.buffer().append(p.buffer());
  return std::move(out.buffer());
}

namespace {

std::string_view checked_payload(std::string_view bytes) {
  if (bytes.size() < kSnapshotHeaderSize) {
    if (bytes.size() >= kSnapshotMagic.size() && bytes.substr(0, kSnapshotMagic.size()) != kSnapshotMagic) {
      throw Error(ErrorCode::kParse, "not a snapshot file (bad magic)");
    }
    throw Error(ErrorCode::kTruncated, "snapshot header truncated");
  }
  if (bytes.substr(0, kSnapshotMagic.size()) != kSnapshotMagic) {
    throw Error(ErrorCode::kParse, "not a snapshot file (bad magic)");
  }
  Reader header(bytes.substr(kSnapshotMagic.size(), kSnapshotHeaderSize - kSnapshotMagic.size()));
  const std::uint32_t version = header.u32();
  if (version != kSnapshotVersion) {
    throw Error(ErrorCode::kVersionMismatch, "snapshot format version " + std::to_string(version) +
                                                 " is not supported (expected " +
                                                 std::to_string(kSnapshotVersion) + ")");
  }
  header.u32();
  const std::uint64_t size = header.u64();
  const std::string_view payload = bytes.substr(kSnapshotHeaderSize);
  if (payload.size() < size) throw Error(ErrorCode::kTruncated, "snapshot payload truncated");
  if (payload.size() > size) throw Error(ErrorCode::kParse, "trailing bytes after snapshot payload");
  const std::string_view recorded = bytes.substr(24, 32);
  if (sha256_raw(payload) != recorded) {
    throw Error(ErrorCode::kHashMismatch, "snapshot content hash mismatch");
  }
  return payload;
}

}  // namespace

std::string snapshot_content_hash(std::string_view bytes) {
  if (bytes.size() < kSnapshotHeaderSize) throw Error(ErrorCode::kTruncated, "snapshot header truncated");
  return to_hex(bytes.substr(24, 32));
}

EngineState decode_snapshot(std::string_view bytes) {
  Reader r(checked_payload(bytes));
  EngineState state;
  state.config = read_config(r);

  for (std::uint64_t i = 0, n = r.count(8); i < n; ++i) state.metadata.push_back(read_metadata(r));

  auto& index = state.index;
  for (std::uint64_t i = 0, n = r.count(8); i < n; ++i) index.ad_ids.push_back(r.str());
  std::vector<std::string> labels;
  const std::uint64_t label_count = r.count(8);
  for (std::uint64_t i = 0; i < label_count; ++i) labels.push_back(r.str());
  index.labels = Vocabulary(labels);
  if (index.labels.size() != label_count) throw Error(ErrorCode::kParse, "snapshot labels not unique");
  index.postings.resize(label_count);
  for (auto& list : index.postings) {
    for (std::uint64_t i = 0, n = r.count(12); i < n; ++i) {
      const NodeId node = r.u32();
      if (node >= index.ad_ids.size()) throw Error(ErrorCode::kParse, "posting names unknown node");
      list.push_back({node, r.f64()});
    }
  }
  index.doc_count = r.u64();

  auto& graph = state.graph;
  graph.params.edge_threshold = r.f64();
  graph.params.max_degree = r.i32();
  for (std::uint64_t i = 0, n = r.count(8); i < n; ++i) graph.offsets.push_back(r.u64());
  for (std::uint64_t i = 0, n = r.count(12); i < n; ++i) {
    const NodeId to = r.u32();
    graph.edges.push_back({to, r.f64()});
  }
  if (graph.offsets.empty() || graph.offsets.front() != 0 || graph.offsets.back() != graph.edges.size() ||
      !std::is_sorted(graph.offsets.begin(), graph.offsets.end())) {
    throw Error(ErrorCode::kParse, "snapshot graph offsets are inconsistent");
  }
  for (const Edge& e : graph.edges) {
    if (e.to >= index.ad_ids.size()) throw Error(ErrorCode::kParse, "edge names unknown node");
  }

  for (std::uint64_t i = 0, n = r.count(16); i < n; ++i) {
    state.baseline.ad_ids.push_back(r.str());
    state.baseline.titles.push_back(r.str());
  }
  if (!r.done()) throw Error(ErrorCode::kParse, "unexpected bytes at end of snapshot payload");
  return state;
}

void snapshot_save(const EngineState& state, const std::string& path) {
  const std::string bytes = encode_snapshot(state);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write snapshot: " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIo, "snapshot write failed: " + path);
  }
  std::filesystem::rename(tmp, path);
}

EngineState snapshot_load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open snapshot: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return decode_snapshot(buf.str());
}

}  // namespace adsem
