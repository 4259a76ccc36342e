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

#include "adsem/server.hpp"

#include <charconv>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "adsem/error.hpp"
#include "adsem/snapshot.hpp"
#include "httplib.h"
#include "json.hpp"

namespace adsem {

using json = nlohmann::json;

std::shared_ptr<const LoadedSnapshot> load_snapshot_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open snapshot: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  auto loaded = std::make_shared<LoadedSnapshot>(decode_snapshot(bytes));
  loaded->path = path;
  loaded->content_hash = snapshot_content_hash(bytes);
  return loaded;
}

struct Server::Impl {
  ServerOptions options;
  httplib::Server http;

  mutable std::mutex mu;
  std::condition_variable loaded_cv;
  std::shared_ptr<const LoadedSnapshot> snapshot;
  bool load_done = false;
  std::exception_ptr load_error;
  std::mutex reload_mu;
  std::jthread loader;

  std::shared_ptr<const LoadedSnapshot> get() const {
    std::lock_guard lock(mu);
    return snapshot;
  }

  static void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
    res.status = status;
    res.set_content(json{{"error", code}, {"message", message}}.dump(), "application/json");
  }

  void routes() {
    http.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
      std::lock_guard lock(mu);
      if (snapshot) {
        res.set_content(R"({"status":"ok"})", "application/json");
      } else {
        res.status = 503;
        res.set_content(json{{"status", load_error ? "load_failed" : "loading"}}.dump(), "application/json");
      }
    });

    http.Get("/retrieve", [this](const httplib::Request& req, httplib::Response& res) {
      const auto snap = get();
      if (!snap) return send_error(res, 503, "not_loaded", "snapshot not loaded");
      if (!req.has_param("seed")) return send_error(res, 400, "missing_seed", "seed parameter is required");
      const std::string seed = req.get_param_value("seed");

      int k = snap->engine.config().k_default;
      if (req.has_param("k")) {
        const std::string raw = req.get_param_value("k");
        const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), k);
        if (ec != std::errc() || ptr != raw.data() + raw.size() || k < 1 || k > options.max_k) {
          return send_error(res, 400, "bad_k", "k must be an integer in [1, " + std::to_string(options.max_k) + "]");
        }
      }
      RetrieverTag tag = RetrieverTag::kSemantic;
      if (req.has_param("retriever")) {
        try {
          tag = parse_retriever_tag(req.get_param_value("retriever"));
        } catch (const Error& e) {
          return send_error(res, 400, "bad_retriever", e.what());
        }
      }
      try {
        res.set_content(to_json(snap->engine.retrieve_with(tag, seed, k)), "application/json");
      } catch (const Error& e) {
        switch (e.code()) {
          case ErrorCode::kUnknownSeed:
            return send_error(res, 404, "unknown_seed", e.what());
          case ErrorCode::kUnavailable:
            return send_error(res, 503, "unavailable", e.what());
          case ErrorCode::kInvalidArgument:
            return send_error(res, 400, "invalid_argument", e.what());
          default:
            return send_error(res, 500, to_string(e.code()), e.what());
        }
      }
    });

    http.Get("/stats", [this](const httplib::Request&, httplib::Response& res) {
      const auto snap = get();
      if (!snap) return send_error(res, 503, "not_loaded", "snapshot not loaded");
      const EngineConfig& c = snap->engine.config();
      json doc = {{"snapshot_hash", snap->content_hash},
                  {"snapshot_path", snap->path},
                  {"ad_count", snap->engine.ad_count()},
                  {"baseline_available", !snap->engine.state().baseline.empty()},
                  {"config",
                   {{"k_default", c.k_default},
                    {"stage1_budget", c.stage1_budget},
                    {"depth", c.depth},
                    {"blend_alpha", c.blend_alpha},
                    {"theta", c.similarity.theta},
                    {"attr_weights",
                     {c.similarity.attr_weights.brand, c.similarity.attr_weights.product,
                      c.similarity.attr_weights.contextual}},
                    {"edge_threshold", c.graph.edge_threshold},
                    {"max_degree", c.graph.max_degree}}}};
      res.set_content(doc.dump(), "application/json");
    });

    http.Post("/reload", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        reload(req.has_param("path") ? req.get_param_value("path") : std::string());
        const auto snap = get();
        res.set_content(json{{"status", "ok"}, {"snapshot_hash", snap->content_hash}}.dump(), "application/json");
      } catch (const Error& e) {
        send_error(res, 500, to_string(e.code()), e.what());
      }
    });
  }

  void reload(const std::string& path) {
    std::lock_guard serial(reload_mu);
    std::string target = path;
    if (target.empty()) {
      const auto snap = get();
      target = snap ? snap->path : options.snapshot_path;
    }
    auto fresh = load_snapshot_file(target);
    std::lock_guard lock(mu);
    snapshot = std::move(fresh);
  }
};

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
  // httplib defaults to SO_REUSEPORT, which lets a second server share the port.
  impl_->http.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  impl_->http.set_tcp_nodelay(true);
  impl_->routes();
}

Server::~Server() {
  stop();
  if (impl_->loader.joinable()) impl_->loader.join();
}

int Server::bind() {
  int port = impl_->options.port;
  if (port == 0) {
    port = impl_->http.bind_to_any_port(impl_->options.host);
    if (port < 0) throw Error(ErrorCode::kIo, "cannot bind an ephemeral port on " + impl_->options.host);
  } else if (!impl_->http.bind_to_port(impl_->options.host, port)) {
    throw Error(ErrorCode::kIo, "cannot bind " + impl_->options.host + ":" + std::to_string(port));
  }
  impl_->loader = std::jthread([impl = impl_.get()] {
    std::shared_ptr<const LoadedSnapshot> snap;
    std::exception_ptr err;
    try {
      snap = load_snapshot_file(impl->options.snapshot_path);
    } catch (...) {
      err = std::current_exception();
    }
    {
      std::lock_guard lock(impl->mu);
      if (!impl->snapshot) impl->snapshot = std::move(snap);
      impl->load_error = err;
      impl->load_done = true;
    }
    impl->loaded_cv.notify_all();
  });
  return port;
}

void Server::listen() { impl_->http.listen_after_bind(); }

void Server::stop() {
  if (impl_->http.is_running()) impl_->http.stop();
}

bool Server::wait_until_loaded(std::chrono::milliseconds timeout) {
  std::unique_lock lock(impl_->mu);
  if (!impl_->loaded_cv.wait_for(lock, timeout, [this] { return impl_->load_done; })) return false;
  if (impl_->load_error && !impl_->snapshot) std::rethrow_exception(impl_->load_error);
  return true;
}

void Server::reload(const std::string& path) { impl_->reload(path); }

std::shared_ptr<const LoadedSnapshot> Server::current() const { return impl_->get(); }

}  // namespace adsem
