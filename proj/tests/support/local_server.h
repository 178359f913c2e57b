// Copyright 2026 The factalign Authors.
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


// In-process HTTP server on an ephemeral loopback port.

#ifndef FACTALIGN_TESTS_SUPPORT_LOCAL_SERVER_H_
#define FACTALIGN_TESTS_SUPPORT_LOCAL_SERVER_H_

#include <functional>
#include <string>
#include <thread>

#include "httplib.h"

namespace factalign {
namespace testing {

class LocalServer {
 public:
  // `install` registers the routes before the server starts listening.
  explicit LocalServer(const std::function<void(httplib::Server &)> &install) {
    install(server_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalServer() {
    server_.stop();
    thread_.join();
  }
  LocalServer(const LocalServer &) = delete;
  LocalServer &operator=(const LocalServer &) = delete;

  int port() const { return port_; }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  httplib::Client client() const { return httplib::Client("127.0.0.1", port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace testing
}  // namespace factalign

#endif  // FACTALIGN_TESTS_SUPPORT_LOCAL_SERVER_H_
