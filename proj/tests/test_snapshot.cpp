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

#include "catch_amalgamated.hpp"

#include <cstring>

#include "adsem/catalog.hpp"
#include "adsem/error.hpp"
#include "adsem/snapshot.hpp"
#include "adsem/taxonomy.hpp"
#include "support.hpp"

using namespace adsem;
using adsem::testing::TempDir;

namespace {

EngineState small_state(std::uint64_t seed = 5) {
  const AdCatalog catalog = generate_synthetic_catalog({.ads = 120, .topics = 10}, seed);
  return build_engine_state(extract_rule_based(catalog, Taxonomy::with_topics(10)), {}, &catalog);
}

ErrorCode code_of(const std::string& bytes) {
  try {
    decode_snapshot(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("decode accepted damaged bytes");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("snapshot round trip preserves state and retrieval", "[snapshot]") {
  TempDir dir;
  const EngineState state = small_state();
  snapshot_save(state, dir.file("s.bin"));
  const EngineState loaded = snapshot_load(dir.file("s.bin"));
  CHECK(loaded == state);
  const Engine a(state), b(loaded);
  for (const auto& id : state.index.ad_ids) {
    CHECK(to_json(a.retrieve(id, 30)) == to_json(b.retrieve(id, 30)));
    CHECK(to_json(a.baseline_retrieve(id, 30)) == to_json(b.baseline_retrieve(id, 30)));
  }
}

TEST_CASE("snapshot encoding is deterministic", "[snapshot]") {
  const std::string x = encode_snapshot(small_state());
  CHECK(x == encode_snapshot(small_state()));
  CHECK(x.substr(0, 8) == "ADSEMSNP");
  CHECK(snapshot_content_hash(x) == sha256_hex(x.substr(kSnapshotHeaderSize)));
  CHECK(snapshot_content_hash(x) != snapshot_content_hash(encode_snapshot(small_state(6))));
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("damaged snapshots are rejected with a specific code", "[snapshot]") {
  const std::string good = encode_snapshot(small_state());

  std::string corrupt = good;
  corrupt[kSnapshotHeaderSize + corrupt.size() / 3] ^= 0x01;
  CHECK(code_of(corrupt) == ErrorCode::kHashMismatch);

  std::string version = good;
  const std::uint32_t v2 = kSnapshotVersion + 1;
  std::memcpy(version.data() + 8, &v2, sizeof v2);
  CHECK(code_of(version) == ErrorCode::kVersionMismatch);

  CHECK(code_of(good.substr(0, good.size() - 1)) == ErrorCode::kTruncated);
  CHECK(code_of(good.substr(0, 20)) == ErrorCode::kTruncated);

  std::string magic = good;
  magic[0] = 'X';
  CHECK(code_of(magic) == ErrorCode::kParse);
  CHECK(code_of(good + "x") == ErrorCode::kParse);

  CHECK_THROWS_MATCHES(snapshot_load("/nonexistent/x.snap"), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == ErrorCode::kIo; }));
}

TEST_CASE("snapshot without a baseline table", "[snapshot]") {
  const AdCatalog catalog = generate_synthetic_catalog({.ads = 40}, 1);
  const EngineState state = build_engine_state(extract_rule_based(catalog, Taxonomy::with_topics(20)), {});
  const EngineState loaded = decode_snapshot(encode_snapshot(state));
  CHECK(loaded == state);
  CHECK(loaded.baseline.empty());
}
