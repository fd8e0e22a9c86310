// Copyright 2026 The HDP-VFL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hdpvfl/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "hdpvfl/errors.hpp"

namespace hdpvfl {

namespace {

struct QueuePair {
  std::mutex mu;
  std::condition_variable cv;
  std::queue<Message> to_first, to_second;
  bool first_closed = false, second_closed = false;
};

class InProcEndpoint : public Channel {
 public:
  InProcEndpoint(std::shared_ptr<QueuePair> shared, bool is_first)
      : shared_(std::move(shared)), is_first_(is_first) {}

  ~InProcEndpoint() override { close(); }

  void send(const Message& m) override {
    std::lock_guard<std::mutex> lock(shared_->mu);
    if (mine_closed() || peer_closed()) {
      throw ChannelClosedError("send on closed channel");
    }
    inbox_of_peer().push(m);
    shared_->cv.notify_all();
  }

  Message recv() override {
    std::unique_lock<std::mutex> lock(shared_->mu);
    shared_->cv.wait(lock, [&] { return !my_inbox().empty() || peer_closed(); });
    if (my_inbox().empty()) {
      throw ChannelClosedError("end of session: peer closed the channel");
    }
    Message m = std::move(my_inbox().front());
    my_inbox().pop();
    return m;
  }

  void close() override {
    std::lock_guard<std::mutex> lock(shared_->mu);
    (is_first_ ? shared_->first_closed : shared_->second_closed) = true;
    shared_->cv.notify_all();
  }

 private:
  bool mine_closed() const {
    return is_first_ ? shared_->first_closed : shared_->second_closed;
  }
  bool peer_closed() const {
    return is_first_ ? shared_->second_closed : shared_->first_closed;
  }
  std::queue<Message>& my_inbox() {
    return is_first_ ? shared_->to_first : shared_->to_second;
  }
  std::queue<Message>& inbox_of_peer() {
    return is_first_ ? shared_->to_second : shared_->to_first;
  }

  std::shared_ptr<QueuePair> shared_;
  bool is_first_;
};

void write_all(int fd, const std::uint8_t* data, std::size_t len) {
  while (len > 0) {
    const ssize_t n = ::write(fd, data, len);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(std::string("socket write failed: ") +
                           std::strerror(errno));
    }
    data += n;
    len -= static_cast<std::size_t>(n);
  }
}

// Returns bytes read; short count means the peer closed.
std::size_t read_all(int fd, std::uint8_t* data, std::size_t len) {
  std::size_t got = 0;
  while (got < len) {
    const ssize_t n = ::read(fd, data + got, len - got);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(std::string("socket read failed: ") +
                           std::strerror(errno));
    }
    if (n == 0) break;
    got += static_cast<std::size_t>(n);
  }
  return got;
}

class TcpChannel : public Channel {
 public:
  explicit TcpChannel(int fd) : fd_(fd) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  }

  ~TcpChannel() override { close(); }

  void send(const Message& m) override {
    if (fd_ < 0) throw ChannelClosedError("send on closed channel");
    const std::vector<std::uint8_t> frame = encode_frame(m);
    write_all(fd_, frame.data(), frame.size());
  }

  Message recv() override {
    if (fd_ < 0) throw ChannelClosedError("recv on closed channel");
    std::uint8_t len_bytes[4];
    const std::size_t got = read_all(fd_, len_bytes, 4);
    if (got == 0) {
      throw ChannelClosedError("end of session: peer closed the connection");
    }
    if (got < 4) {
      throw TransportError("truncated frame: peer closed inside length prefix");
    }
    const std::uint32_t len = static_cast<std::uint32_t>(len_bytes[0]) |
                              static_cast<std::uint32_t>(len_bytes[1]) << 8 |
                              static_cast<std::uint32_t>(len_bytes[2]) << 16 |
                              static_cast<std::uint32_t>(len_bytes[3]) << 24;
    if (len > kMaxFrameBytes) {
      throw TransportError("oversize frame: " + std::to_string(len) + " bytes");
    }
    std::string payload(len, '\0');
    if (read_all(fd_, reinterpret_cast<std::uint8_t*>(payload.data()), len) < len) {
      throw TransportError("truncated frame: peer closed inside payload");
    }
    return decode_message(payload);
  }

  void close() override {
    if (fd_ >= 0) {
      ::close(fd_);
      fd_ = -1;
    }
  }

 private:
  int fd_;
};

}  // namespace

std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_channel_pair() {
  auto shared = std::make_shared<QueuePair>();
  return {std::make_unique<InProcEndpoint>(shared, true),
          std::make_unique<InProcEndpoint>(shared, false)};
}

std::vector<std::uint8_t> encode_frame(const Message& m) {
  const std::string payload = encode_message(m);
  if (payload.size() > kMaxFrameBytes) {
    throw TransportError("oversize frame: " + std::to_string(payload.size()) +
                         " bytes");
  }
  const std::uint32_t len = static_cast<std::uint32_t>(payload.size());
  std::vector<std::uint8_t> frame;
  frame.reserve(4 + payload.size());
  frame.push_back(static_cast<std::uint8_t>(len & 0xff));
  frame.push_back(static_cast<std::uint8_t>((len >> 8) & 0xff));
  frame.push_back(static_cast<std::uint8_t>((len >> 16) & 0xff));
  frame.push_back(static_cast<std::uint8_t>((len >> 24) & 0xff));
  frame.insert(frame.end(), payload.begin(), payload.end());
  return frame;
}

TcpListener::TcpListener(std::uint16_t port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw TransportError("cannot create socket");
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_ANY);
  addr.sin_port = htons(port);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
    throw TransportError(std::string("bind failed: ") + std::strerror(errno));
  }
  if (::listen(fd_, 1) < 0) {
    throw TransportError(std::string("listen failed: ") + std::strerror(errno));
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<Channel> TcpListener::accept_one() {
  const int conn = ::accept(fd_, nullptr, nullptr);
  if (conn < 0) {
    throw TransportError(std::string("accept failed: ") + std::strerror(errno));
  }
  return std::make_unique<TcpChannel>(conn);
}

std::unique_ptr<Channel> tcp_connect(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(),
                               &hints, &res);
  if (rc != 0) {
    throw TransportError("cannot resolve " + host + ": " + gai_strerror(rc));
  }
  int fd = -1;
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) {
    throw TransportError("cannot connect to " + host + ":" +
                         std::to_string(port));
  }
  return std::make_unique<TcpChannel>(fd);
}

}  // namespace hdpvfl
