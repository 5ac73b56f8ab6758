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
#include "federation/wire.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <set>

#include "common/bytes.hpp"
#include "common/error.hpp"
#include "common/sha256.hpp"

namespace ddoslab::federation {
namespace {

std::vector<std::uint8_t> hex_to_bytes(const std::string& hex) {
  require(hex.size() % 2 == 0, ErrorKind::protocol, "odd-length hex string");
  std::vector<std::uint8_t> out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(std::stoul(hex.substr(2 * i, 2), nullptr, 16));
  }
  return out;
}

void expect_type(const Frame& f, MessageType t, const char* what) {
  if (f.type != t) {
    fail(ErrorKind::protocol, std::string("expected ") + what + " frame, got type " +
                                  std::to_string(static_cast<int>(f.type)));
  }
}

void expect_consumed(const ByteReader& r, const char* what) {
  if (r.remaining() != 0) fail(ErrorKind::protocol, std::string(what) + ": trailing bytes in payload");
}

int remaining_ms(Deadline deadline) {
  auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
  return static_cast<int>(std::clamp<long long>(left.count(), 0, 1 << 30));
}

// Blocks until fd is ready for events or the deadline passes.
void wait_ready(int fd, short events, Deadline deadline, const char* what) {
  for (;;) {
    pollfd p{fd, events, 0};
    int rc = ::poll(&p, 1, remaining_ms(deadline));
    if (rc > 0) return;
    if (rc == 0) fail(ErrorKind::io, std::string("timed out waiting to ") + what);
    if (errno != EINTR) fail(ErrorKind::io, std::string("poll: ") + std::strerror(errno));
  }
}

bool is_known_type(std::uint8_t t) { return t >= 0x01 && t <= 0x06; }

}  // namespace

std::vector<std::uint8_t> encode_frame(const Frame& frame) {
  require(frame.payload.size() <= kMaxFrameBytes, ErrorKind::protocol, "frame payload exceeds 256 MiB");
  ByteWriter w;
  w.put_be(frame.payload.size(), 4);
  w.put_u8(static_cast<std::uint8_t>(frame.type));
  w.put_bytes(frame.payload);
  return std::move(w).take();
}

Frame make_frame(const JoinMsg& m) {
  ByteWriter w;
  w.put_be(m.version, 4);
  require(m.client_id.size() <= 0xffff, ErrorKind::protocol, "client id too long");
  w.put_be(m.client_id.size(), 2);
  w.put_text(m.client_id);
  auto hash = hex_to_bytes(m.arch_hash);
  require(hash.size() == 32, ErrorKind::protocol, "architecture hash must be 32 bytes");
  w.put_bytes(hash);
  return {MessageType::join, std::move(w).take()};
}

Frame make_frame(const AcceptMsg& m) {
  ByteWriter w;
  w.put_be(m.rounds, 4);
  w.put_be(m.local_epochs, 4);
  w.put_be(m.seed, 8);
  return {MessageType::accept, std::move(w).take()};
}

Frame make_frame(const WeightsMsg& m) {
  ByteWriter w;
  w.put_be(m.round, 4);
  w.put_bytes(netcore::encode_weights(m.weights));
  return {MessageType::global_weights, std::move(w).take()};
}

Frame make_frame(const UpdateMsg& m) {
  ByteWriter w;
  w.put_be(m.round, 4);
  w.put_be(m.sample_count, 8);
  w.put_bytes(netcore::encode_weights(m.weights));
  return {MessageType::client_update, std::move(w).take()};
}

Frame make_frame(const ErrorMsg& m) {
  ByteWriter w;
  w.put_be(static_cast<std::uint16_t>(m.code), 2);
  w.put_text(m.message);
  return {MessageType::error, std::move(w).take()};
}

Frame make_done_frame() { return {MessageType::done, {}}; }

JoinMsg parse_join(const Frame& f) {
  expect_type(f, MessageType::join, "JOIN");
  ByteReader r(f.payload);
  JoinMsg m;
  m.version = static_cast<std::uint32_t>(r.get_be(4));
  auto len = r.get_be(2);
  auto id = r.get_bytes(len);
  m.client_id.assign(id.begin(), id.end());
  Digest hash{};
  auto raw = r.get_bytes(hash.size());
  std::copy(raw.begin(), raw.end(), hash.begin());
  m.arch_hash = to_hex(hash);
  expect_consumed(r, "JOIN");
  return m;
}

AcceptMsg parse_accept(const Frame& f) {
  expect_type(f, MessageType::accept, "ACCEPT");
  ByteReader r(f.payload);
  AcceptMsg m;
  m.rounds = static_cast<std::uint32_t>(r.get_be(4));
  m.local_epochs = static_cast<std::uint32_t>(r.get_be(4));
  m.seed = r.get_be(8);
  expect_consumed(r, "ACCEPT");
  return m;
}

WeightsMsg parse_weights(const Frame& f) {
  expect_type(f, MessageType::global_weights, "GLOBAL_WEIGHTS");
  ByteReader r(f.payload);
  WeightsMsg m;
  m.round = static_cast<std::uint32_t>(r.get_be(4));
  m.weights = netcore::decode_weights(r.rest());
  return m;
}

UpdateMsg parse_update(const Frame& f) {
  expect_type(f, MessageType::client_update, "CLIENT_UPDATE");
  ByteReader r(f.payload);
  UpdateMsg m;
  m.round = static_cast<std::uint32_t>(r.get_be(4));
  m.sample_count = r.get_be(8);
  m.weights = netcore::decode_weights(r.rest());
  return m;
}

ErrorMsg parse_error(const Frame& f) {
  expect_type(f, MessageType::error, "ERROR");
  ByteReader r(f.payload);
  ErrorMsg m;
  m.code = static_cast<WireError>(r.get_be(2));
  auto rest = r.rest();
  m.message.assign(rest.begin(), rest.end());
  return m;
}

Endpoint parse_endpoint(const std::string& text) {
  auto colon = text.rfind(':');
  require(colon != std::string::npos && colon + 1 < text.size(), ErrorKind::config,
          "endpoint '" + text + "' must look like host:port");
  Endpoint ep;
  ep.host = text.substr(0, colon);
  if (ep.host.size() >= 2 && ep.host.front() == '[' && ep.host.back() == ']') ep.host = ep.host.substr(1, ep.host.size() - 2);
  if (ep.host.empty()) ep.host = "0.0.0.0";
  unsigned long port = 0;
  try {
    std::size_t used = 0;
    port = std::stoul(text.substr(colon + 1), &used);
    require(used == text.size() - colon - 1, ErrorKind::config, "bad port");
  } catch (const std::logic_error&) {
    fail(ErrorKind::config, "endpoint '" + text + "' has an invalid port");
  }
  require(port <= 65535, ErrorKind::config, "endpoint '" + text + "' port out of range");
  ep.port = static_cast<std::uint16_t>(port);
  return ep;
}

Deadline deadline_after(double seconds) {
  return std::chrono::steady_clock::now() +
         std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(seconds));
}

Socket& Socket::operator=(Socket&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = other.release();
  }
  return *this;
}

void Socket::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

Socket Socket::connect(const Endpoint& ep, Deadline deadline) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const auto port = std::to_string(ep.port);
  if (int rc = ::getaddrinfo(ep.host.c_str(), port.c_str(), &hints, &res); rc != 0) {
    fail(ErrorKind::io, "cannot resolve " + ep.host + ": " + ::gai_strerror(rc));
  }
  std::string last = "no addresses";
  // Retry until the deadline so clients may start slightly before the server.
  for (;;) {
    for (addrinfo* a = res; a != nullptr; a = a->ai_next) {
      Socket s(::socket(a->ai_family, a->ai_socktype, a->ai_protocol));
      if (!s.valid()) continue;
      if (::connect(s.fd(), a->ai_addr, a->ai_addrlen) == 0) {
        int one = 1;
        ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        ::freeaddrinfo(res);
        return s;
      }
      last = std::strerror(errno);
    }
    if (std::chrono::steady_clock::now() >= deadline) break;
    ::usleep(100000);
  }
  ::freeaddrinfo(res);
  fail(ErrorKind::io, "cannot connect to " + ep.host + ":" + port + ": " + last);
}

void Socket::send_frame(const Frame& frame) {
  require(valid(), ErrorKind::io, "send on closed socket");
  auto bytes = encode_frame(frame);
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    auto n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(ErrorKind::io, std::string("send: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
}

void Socket::read_exact(std::uint8_t* dst, std::size_t n, Deadline deadline) {
  std::size_t got = 0;
  while (got < n) {
    wait_ready(fd_, POLLIN, deadline, "receive");
    auto r = ::recv(fd_, dst + got, n - got, 0);
    if (r == 0) fail(ErrorKind::io, "peer closed the connection");
    if (r < 0) {
      if (errno == EINTR) continue;
      fail(ErrorKind::io, std::string("recv: ") + std::strerror(errno));
    }
    got += static_cast<std::size_t>(r);
  }
}

Frame Socket::recv_frame(Deadline deadline) {
  require(valid(), ErrorKind::io, "receive on closed socket");
  std::uint8_t header[5];
  read_exact(header, 5, deadline);
  ByteReader r(header);
  const auto len = r.get_be(4);
  const auto type = r.get_u8();
  if (len > kMaxFrameBytes) fail(ErrorKind::protocol, "frame of " + std::to_string(len) + " bytes exceeds 256 MiB");
  if (!is_known_type(type)) fail(ErrorKind::protocol, "unknown frame type " + std::to_string(type));
  Frame f{static_cast<MessageType>(type), std::vector<std::uint8_t>(len)};
  if (len > 0) read_exact(f.payload.data(), len, deadline);
  return f;
}

WireServer::WireServer(FLConfig config) : config_(std::move(config)) {
  config_.validate();
  arch_hash_ = ganomaly::architecture_hash(config_.model, config_.columns);
}

WireServer::~WireServer() = default;

std::uint16_t WireServer::bind(const Endpoint& ep) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const auto port = std::to_string(ep.port);
  if (int rc = ::getaddrinfo(ep.host.c_str(), port.c_str(), &hints, &res); rc != 0) {
    fail(ErrorKind::io, "cannot resolve " + ep.host + ": " + ::gai_strerror(rc));
  }
  std::string last = "no addresses";
  for (addrinfo* a = res; a != nullptr; a = a->ai_next) {
    Socket s(::socket(a->ai_family, a->ai_socktype, a->ai_protocol));
    if (!s.valid()) continue;
    int one = 1;
    ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(s.fd(), a->ai_addr, a->ai_addrlen) == 0 && ::listen(s.fd(), 64) == 0) {
      listener_ = std::move(s);
      break;
    }
    last = std::strerror(errno);
  }
  ::freeaddrinfo(res);
  if (!listener_.valid()) fail(ErrorKind::io, "cannot bind " + ep.host + ":" + port + ": " + last);

  sockaddr_storage addr{};
  socklen_t len = sizeof addr;
  ::getsockname(listener_.fd(), reinterpret_cast<sockaddr*>(&addr), &len);
  std::uint16_t bound = addr.ss_family == AF_INET6 ? ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port)
                                                   : ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
  spdlog::info("federation server listening on {}:{}", ep.host, bound);
  return bound;
}

void WireServer::accept_joins() {
  std::set<std::string> expected;
  for (const auto& c : config_.clients) expected.insert(c.id);
  const auto deadline = deadline_after(config_.join_timeout_s);

  while (peers_.size() < expected.size()) {
    try {
      wait_ready(listener_.fd(), POLLIN, deadline, "accept participants");
    } catch (const Error&) {
      break;
    }
    Socket s(::accept(listener_.fd(), nullptr, nullptr));
    if (!s.valid()) continue;
    auto reject = [&](WireError code, const std::string& why) {
      spdlog::warn("rejected join: {}", why);
      join_events_.push_back("rejected: " + why);
      try {
        s.send_frame(make_frame(ErrorMsg{code, why}));
      } catch (const Error&) {
      }
    };
    try {
      auto join = parse_join(s.recv_frame(std::min(deadline, deadline_after(30.0))));
      if (join.version != kProtocolVersion) {
        reject(WireError::version, "protocol version " + std::to_string(join.version) + " (server speaks " +
                                       std::to_string(kProtocolVersion) + ")");
      } else if (join.arch_hash != arch_hash_) {
        reject(WireError::architecture, "client '" + join.client_id + "' architecture hash mismatch");
      } else if (!expected.count(join.client_id)) {
        reject(WireError::unknown_client, "unknown client '" + join.client_id + "'");
      } else if (std::any_of(peers_.begin(), peers_.end(), [&](const Peer& p) { return p.id == join.client_id; })) {
        reject(WireError::duplicate_client, "client '" + join.client_id + "' already joined");
      } else {
        s.send_frame(make_frame(AcceptMsg{static_cast<std::uint32_t>(config_.rounds),
                                          static_cast<std::uint32_t>(config_.local_epochs), config_.seed}));
        spdlog::info("client '{}' joined", join.client_id);
        peers_.push_back({join.client_id, std::move(s)});
      }
    } catch (const Error& e) {
      reject(e.kind() == ErrorKind::protocol ? WireError::malformed : WireError::timeout, e.what());
    }
  }
  std::sort(peers_.begin(), peers_.end(), [](const Peer& a, const Peer& b) { return a.id < b.id; });
}

void WireServer::drop(std::size_t index, const std::string& reason, std::optional<WireError> code) {
  auto& peer = peers_[index];
  spdlog::warn("dropping client '{}': {}", peer.id, reason);
  if (code && peer.socket.valid()) {
    try {
      peer.socket.send_frame(make_frame(ErrorMsg{*code, reason}));
    } catch (const Error&) {
    }
  }
  peer.socket.close();
}

FederationResult WireServer::run() {
  require(listener_.valid(), ErrorKind::state, "federation server: bind() before run()");
  accept_joins();
  const auto active = [&] {
    return static_cast<std::size_t>(
        std::count_if(peers_.begin(), peers_.end(), [](const Peer& p) { return p.socket.valid(); }));
  };
  if (active() < config_.min_quorum) {
    fail(ErrorKind::state, "federation server: only " + std::to_string(active()) +
                               " participant(s) joined before the timeout (quorum " +
                               std::to_string(config_.min_quorum) + ")");
  }

  FederationResult result{initial_global(config_.model, config_.seed), {}};
  auto global = result.model.weights();
  for (std::size_t round = 0; round < config_.rounds; ++round) {
    RoundLog log;
    log.round = round;
    const auto frame = make_frame(WeightsMsg{static_cast<std::uint32_t>(round), global});
    for (std::size_t i = 0; i < peers_.size(); ++i) {
      if (!peers_[i].socket.valid()) continue;
      try {
        peers_[i].socket.send_frame(frame);
      } catch (const Error& e) {
        log.excluded[peers_[i].id] = e.what();
        drop(i, e.what(), std::nullopt);
      }
    }
    const auto deadline = deadline_after(config_.round_timeout_s);
    std::vector<ClientUpdate> updates;
    for (std::size_t i = 0; i < peers_.size(); ++i) {
      auto& peer = peers_[i];
      if (!peer.socket.valid()) continue;
      try {
        auto f = peer.socket.recv_frame(deadline);
        if (f.type == MessageType::error) fail(ErrorKind::protocol, "client reported: " + parse_error(f).message);
        auto msg = parse_update(f);
        require(msg.round == round, ErrorKind::protocol,
                "update for round " + std::to_string(msg.round) + ", expected " + std::to_string(round));
        require(msg.sample_count > 0, ErrorKind::protocol, "update reports zero samples");
        require(msg.weights.shapes() == global.shapes(), ErrorKind::protocol, "update tensor shapes do not match");
        updates.push_back(ClientUpdate{peer.id, round, std::move(msg.weights), msg.sample_count, {}});
        log.sample_counts[peer.id] = updates.back().sample_count;
      } catch (const Error& e) {
        log.excluded[peer.id] = e.what();
        std::optional<WireError> code;
        if (e.kind() == ErrorKind::protocol) code = WireError::malformed;
        if (std::string(e.what()).find("timed out") != std::string::npos) code = WireError::timeout;
        drop(i, e.what(), code);
      }
    }
    if (updates.size() < config_.min_quorum) {
      for (std::size_t i = 0; i < peers_.size(); ++i) {
        if (peers_[i].socket.valid()) drop(i, "quorum lost", WireError::internal);
      }
      fail(ErrorKind::state, "round " + std::to_string(round) + ": only " + std::to_string(updates.size()) +
                                 " update(s) received (quorum " + std::to_string(config_.min_quorum) + ")");
    }
    const auto t0 = std::chrono::steady_clock::now();
    global = fedavg(updates, config_.weighting);
    log.aggregation_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    log.fingerprint = netcore::weights_fingerprint(global);
    spdlog::info("round {}: aggregated {} update(s), fingerprint {}", round, updates.size(),
                 log.fingerprint.substr(0, 12));
    result.logs.push_back(std::move(log));
  }

  const auto final_frame = make_frame(WeightsMsg{static_cast<std::uint32_t>(config_.rounds), global});
  for (std::size_t i = 0; i < peers_.size(); ++i) {
    if (!peers_[i].socket.valid()) continue;
    try {
      peers_[i].socket.send_frame(final_frame);
      peers_[i].socket.send_frame(make_done_frame());
    } catch (const Error& e) {
      spdlog::warn("client '{}' missed the final model: {}", peers_[i].id, e.what());
    }
    peers_[i].socket.close();
  }
  result.model.set_weights(global);
  result.model.trained_epochs = config_.rounds * config_.local_epochs;
  return result;
}

WireClientResult run_wire_client(const Endpoint& server, LocalClient& client, const ganomaly::GanomalyConfig& config,
                                 const std::vector<std::string>& columns, const WireClientOptions& options) {
  auto socket = Socket::connect(server, deadline_after(options.connect_timeout_s));
  socket.send_frame(make_frame(JoinMsg{kProtocolVersion, client.id(), ganomaly::architecture_hash(config, columns)}));

  auto first = socket.recv_frame(deadline_after(options.idle_timeout_s));
  if (first.type == MessageType::error) {
    auto err = parse_error(first);
    fail(ErrorKind::protocol, "server rejected join (code " + std::to_string(static_cast<int>(err.code)) +
                                  "): " + err.message);
  }
  const auto plan = parse_accept(first);
  client.set_seed(plan.seed);
  spdlog::info("joined federation: {} rounds x {} local epochs", plan.rounds, plan.local_epochs);

  WireClientResult result{ganomaly::GanomalyModel::create(config, 0), {}};
  bool have_final = false;
  for (;;) {
    auto f = socket.recv_frame(deadline_after(options.idle_timeout_s));
    if (f.type == MessageType::done) break;
    if (f.type == MessageType::error) {
      auto err = parse_error(f);
      fail(ErrorKind::protocol, "server error (code " + std::to_string(static_cast<int>(err.code)) + "): " + err.message);
    }
    auto msg = parse_weights(f);
    if (msg.round >= plan.rounds) {
      result.model.set_weights(msg.weights);
      result.model.trained_epochs = static_cast<std::size_t>(plan.rounds) * plan.local_epochs;
      have_final = true;
      continue;
    }
    auto update = client.train_round(msg.weights, msg.round, plan.local_epochs);
    result.round_losses.push_back(update.loss);
    socket.send_frame(make_frame(UpdateMsg{msg.round, update.sample_count, update.weights}));
  }
  require(have_final, ErrorKind::protocol, "server finished without sending the final model");
  return result;
}

}  // namespace ddoslab::federation
