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

#ifndef HDPVFL_TRANSPORT_HPP_
#define HDPVFL_TRANSPORT_HPP_

#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "hdpvfl/message.hpp"

namespace hdpvfl {

// Frames larger than this are rejected on both ends.
inline constexpr std::uint32_t kMaxFrameBytes = 64u * 1024 * 1024;

// Reliable, ordered, blocking channel endpoint owned by one party.
// send and recv on the same endpoint are never called concurrently.
class Channel {
 public:
  virtual ~Channel() = default;
  virtual void send(const Message& m) = 0;
  virtual Message recv() = 0;
  virtual void close() = 0;
};

// Paired in-process channel backed by two FIFO queues.
std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_channel_pair();

// Length-prefixed framing: 32-bit unsigned little-endian payload byte count,
// then the serialized Message text.
std::vector<std::uint8_t> encode_frame(const Message& m);

// TCP transport. One training session per connection; the active party
// connects, the passive party listens.
class TcpListener {
 public:
  // Binds and listens on the port; port 0 picks an ephemeral port.
  explicit TcpListener(std::uint16_t port);
  ~TcpListener();
  std::uint16_t port() const { return port_; }
  std::unique_ptr<Channel> accept_one();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

std::unique_ptr<Channel> tcp_connect(const std::string& host, std::uint16_t port);

// Transcript entry recorded by RecordingChannel.
struct TranscriptEntry {
  bool outgoing = false;
  Message message;
};

// Wraps a channel and records every message both ways; used by tests and
// the harness's transcript checks.
class RecordingChannel : public Channel {
 public:
  explicit RecordingChannel(std::unique_ptr<Channel> inner)
      : inner_(std::move(inner)) {}
  void send(const Message& m) override {
    transcript_.push_back({true, m});
    inner_->send(m);
  }
  Message recv() override {
    Message m = inner_->recv();
    transcript_.push_back({false, m});
    return m;
  }
  void close() override { inner_->close(); }
  const std::vector<TranscriptEntry>& transcript() const { return transcript_; }

 private:
  std::unique_ptr<Channel> inner_;
  std::vector<TranscriptEntry> transcript_;
};

}  // namespace hdpvfl

#endif  // HDPVFL_TRANSPORT_HPP_
