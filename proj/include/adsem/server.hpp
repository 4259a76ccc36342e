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

#include <chrono>
#include <memory>
#include <string>

#include "adsem/engine.hpp"

namespace adsem {

// Engine plus the identity of the snapshot it came from.
struct LoadedSnapshot {
  explicit LoadedSnapshot(EngineState state) : engine(std::move(state)) {}

  Engine engine;
  std::string path;
  std::string content_hash;
};

// Reads, verifies and compiles a snapshot file.
std::shared_ptr<const LoadedSnapshot> load_snapshot_file(const std::string& path);

struct ServerOptions {
  std::string snapshot_path;
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 binds an ephemeral port
  int max_k = 10000;
};

// HTTP front end over a frozen snapshot.
//
//   GET  /health                       200 once loaded, 503 before or after a failed load
//   GET  /retrieve?seed=ID&k=N&retriever=semantic|baseline
//   GET  /stats                        snapshot hash, ad count, config echo
//   POST /reload[?path=P]              load and swap; in-flight requests keep the old snapshot
//
// Errors are JSON objects {"error": code, "message": text}.
class Server {
 public:
  explicit Server(ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds the port and starts loading the snapshot in the background.
  // Returns the bound port. Throws kIo when the port cannot be bound.
  int bind();
  // Serves until stop(). Call after bind().
  void listen();
  void stop();

  // Blocks until the initial load finished. Returns false on timeout; throws
  // the load error if loading failed.
  bool wait_until_loaded(std::chrono::milliseconds timeout);

  // Loads `path` (or the current path when empty) and swaps it in.
  void reload(const std::string& path = {});
  std::shared_ptr<const LoadedSnapshot> current() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace adsem
