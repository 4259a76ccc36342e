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

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "adsem/engine.hpp"

namespace adsem {

// Snapshot container layout (all integers little-endian):
//
//   offset  size  field
//   0       8     magic "ADSEMSNP"
//   8       4     format version
//   12      4     reserved, zero
//   16      8     payload size in bytes
//   24      32    SHA-256 of the payload
//   56      n     payload: config, metadata, index, graph, baseline titles
inline constexpr std::uint32_t kSnapshotVersion = 1;
inline constexpr std::string_view kSnapshotMagic = "ADSEMSNP";
inline constexpr std::size_t kSnapshotHeaderSize = 56;

std::string encode_snapshot(const EngineState& state);
// Throws kVersionMismatch, kHashMismatch, kTruncated or kParse.
EngineState decode_snapshot(std::string_view bytes);

void snapshot_save(const EngineState& state, const std::string& path);
EngineState snapshot_load(const std::string& path);

// Lowercase hex SHA-256 of a snapshot's payload, as recorded in its header.
std::string snapshot_content_hash(std::string_view bytes);
std::string sha256_hex(std::string_view data);

}  // namespace adsem
