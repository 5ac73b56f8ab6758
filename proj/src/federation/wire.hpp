// Copyright 2026 The ddoslab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "federation/simulation.hpp"

namespace ddoslab::federation {

inline constexpr std::uint32_t kProtocolVersion = 1;
inline constexpr std::uint32_t kMaxFrameBytes = 256u * 1024u * 1024u;

enum class MessageType : std::uint8_t {
  join = 0x01,
  accept = 0x02,
  global_weights = 0x03,
  client_update = 0x04,
  done = 0x05,
  error = 0x06,
};

enum class WireError : std::uint16_t {
  version = 1,
  architecture = 2,
  unknown_client = 3,
  duplicate_client = 4,
  malformed = 5,
  timeout = 6,
  internal = 7,
};

struct Frame {
  MessageType type = MessageType::error;
  std::vector<std::uint8_t> payload;
};

// [u32 BE payload length][u8 type][payload]
std::vector<std::uint8_t> encode_frame(const Frame& frame);

struct JoinMsg {
  std::uint32_t version = kProtocolVersion;
  std::string client_id;
  std::string arch_hash;  // hex SHA-256, sent as 32 raw bytes
};
struct AcceptMsg {
  std::uint32_t rounds = 0;
  std::uint32_t local_epochs = 0;
  std::uint64_t seed = 0;
};
struct WeightsMsg {
  std::uint32_t round = 0;
  netcore::ModelWeights weights;
};
struct UpdateMsg {
  std::uint32_t round = 0;
  std::uint64_t sample_count = 0;
  netcore::ModelWeights weights;
};
struct ErrorMsg {
  WireError code = WireError::internal;
  std::string message;
};

Frame make_frame(const JoinMsg& m);
Frame make_frame(const AcceptMsg& m);
Frame make_frame(const WeightsMsg& m);
Frame make_frame(const UpdateMsg& m);
Frame make_frame(const ErrorMsg& m);
Frame make_done_frame();

JoinMsg parse_join(const Frame& f);
AcceptMsg parse_accept(const Frame& f);
WeightsMsg parse_weights(const Frame& f);
UpdateMsg parse_update(const Frame& f);
ErrorMsg parse_error(const Frame& f);

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;
};
// "host:port"; port 0 asks the OS for an ephemeral port when binding.
Endpoint parse_endpoint(const std::string& text);

using Deadline = std::chrono::steady_clock::time_point;
Deadline deadline_after(double seconds);

// Owning TCP socket. Reads and writes fail with ErrorKind::io on
// disconnect or deadline expiry, ErrorKind::protocol on bad frames.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& other) noexcept : fd_(other.release()) {}
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() { close(); }

  static Socket connect(const Endpoint& ep, Deadline deadline);

  bool valid() const { return fd_ >= 0; }
  int fd() const { return fd_; }
  int release() {
    int fd = fd_;
    fd_ = -1;
    return fd;
  }
  void close();

  void send_frame(const Frame& frame);
  Frame recv_frame(Deadline deadline);

 private:
  void read_exact(std::uint8_t* dst, std::size_t n, Deadline deadline);

  int fd_ = -1;
};

// Coordinator side of wire mode. Expected participants are cfg.clients (ids
// only; data paths are ignored).
class WireServer {
 public:
  explicit WireServer(FLConfig config);
  ~WireServer();

  // Binds and listens; returns the bound port.
  std::uint16_t bind(const Endpoint& ep);
  FederationResult run();

 private:
  struct Peer {
    std::string id;
    Socket socket;
  };
  void accept_joins();
  void drop(std::size_t index, const std::string& reason, std::optional<WireError> code);

  FLConfig config_;
  std::string arch_hash_;
  Socket listener_;
  std::vector<Peer> peers_;
  std::vector<std::string> join_events_;
};

struct WireClientOptions {
  double connect_timeout_s = 30.0;
  double idle_timeout_s = 3600.0;  // longest wait for the next server frame
};

struct WireClientResult {
  ganomaly::GanomalyModel model;  // final global model
  std::vector<ganomaly::LossSummary> round_losses;
};

// Participant side: JOIN, then train on each GLOBAL_WEIGHTS frame until the
// final round arrives and the server sends DONE.
WireClientResult run_wire_client(const Endpoint& server, LocalClient& client, const ganomaly::GanomalyConfig& config,
                                 const std::vector<std::string>& columns, const WireClientOptions& options = {});

}  // namespace ddoslab::federation
