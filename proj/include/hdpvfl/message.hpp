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

#ifndef HDPVFL_MESSAGE_HPP_
#define HDPVFL_MESSAGE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "hdpvfl/privacy.hpp"

namespace hdpvfl {

enum class MessageKind { kSetup, kIrB, kIrA, kDone };

// Training configuration shipped in Setup: the numeric hyperparameters plus
// the loss/penalty identifiers both parties must agree on.
struct SetupPayload {
  Hyperparams h;
  std::string loss;
  std::string penalty;
  double mu = 0.0;
  std::uint32_t n = 0;
  std::uint32_t d_a = 0;
  std::uint32_t d_b = 0;
};

struct DonePayload {
  std::vector<double> epoch_loss;  // active party's per-epoch training loss
};

// The protocol's wire unit. Exactly one variant is populated, per `kind`.
struct Message {
  MessageKind kind = MessageKind::kSetup;
  SetupPayload setup;
  std::uint32_t t = 0;           // IrB/IrA
  std::vector<double> values;    // IrB/IrA, length b
  DonePayload done;

  static Message make_setup(SetupPayload p);
  static Message make_ir_b(std::uint32_t t, std::vector<double> values);
  static Message make_ir_a(std::uint32_t t, std::vector<double> values);
  static Message make_done(DonePayload p);
};

// JSON text with doubles at 17 significant digits, so decode(encode(x)) == x
// for every finite double. Non-finite values are rejected with InputError.
std::string encode_message(const Message& m);

// Throws TransportError naming the byte offset on malformed payloads.
Message decode_message(const std::string& payload);

}  // namespace hdpvfl

#endif  // HDPVFL_MESSAGE_HPP_
