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

#include "hdpvfl/message.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "hdpvfl/errors.hpp"

namespace hdpvfl {

Message Message::make_setup(SetupPayload p) {
  Message m;
  m.kind = MessageKind::kSetup;
  m.setup = std::move(p);
  return m;
}

Message Message::make_ir_b(std::uint32_t t, std::vector<double> values) {
  Message m;
  m.kind = MessageKind::kIrB;
  m.t = t;
  m.values = std::move(values);
  return m;
}

Message Message::make_ir_a(std::uint32_t t, std::vector<double> values) {
  Message m;
  m.kind = MessageKind::kIrA;
  m.t = t;
  m.values = std::move(values);
  return m;
}

Message Message::make_done(DonePayload p) {
  Message m;
  m.kind = MessageKind::kDone;
  m.done = std::move(p);
  return m;
}

namespace {

// The encoder writes JSON by hand to pin the exact byte layout: fixed field
// order and %.17g doubles. The golden-file tests depend on this.
void append_double(std::string& out, double v) {
  if (!std::isfinite(v)) {
    throw InputError("message encoder: non-finite value");
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void append_vector(std::string& out, const std::vector<double>& v) {
  out += '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    append_double(out, v[i]);
  }
  out += ']';
}

void append_epsilon(std::string& out, double eps) {
  if (std::isinf(eps)) {
    out += "\"inf\"";
  } else {
    append_double(out, eps);
  }
}

double read_epsilon(const nlohmann::json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") {
      return std::numeric_limits<double>::infinity();
    }
    throw TransportError("decode error: bad epsilon string");
  }
  return j.get<double>();
}

}  // namespace

std::string encode_message(const Message& m) {
  std::string out;
  switch (m.kind) {
    case MessageKind::kSetup: {
      const SetupPayload& s = m.setup;
      out += "{\"type\":\"setup\",\"h\":{\"epsilon\":";
      append_epsilon(out, s.h.epsilon);
      out += ",\"delta\":";
      append_double(out, s.h.delta);
      out += ",\"eta\":";
      append_double(out, s.h.eta);
      out += ",\"b\":" + std::to_string(s.h.b);
      out += ",\"e\":" + std::to_string(s.h.e);
      out += ",\"r\":" + std::to_string(s.h.r);
      out += ",\"T\":" + std::to_string(s.h.T);
      out += ",\"k\":";
      append_double(out, s.h.k);
      out += ",\"lambda\":";
      append_double(out, s.h.lambda);
      out += ",\"seed\":" + std::to_string(s.h.seed);
      out += "},\"loss\":\"" + s.loss + "\",\"penalty\":\"" + s.penalty + "\"";
      out += ",\"mu\":";
      append_double(out, s.mu);
      out += ",\"n\":" + std::to_string(s.n);
      out += ",\"d_a\":" + std::to_string(s.d_a);
      out += ",\"d_b\":" + std::to_string(s.d_b);
      out += "}";
      break;
    }
    case MessageKind::kIrB:
    case MessageKind::kIrA:
      out += "{\"type\":\"";
      out += (m.kind == MessageKind::kIrB) ? "ir_b" : "ir_a";
      out += "\",\"t\":" + std::to_string(m.t) + ",\"values\":";
      append_vector(out, m.values);
      out += "}";
      break;
    case MessageKind::kDone:
      out += "{\"type\":\"done\",\"epoch_loss\":";
      append_vector(out, m.done.epoch_loss);
      out += "}";
      break;
  }
  return out;
}

Message decode_message(const std::string& payload) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(payload);
  } catch (const nlohmann::json::parse_error& e) {
    throw TransportError("decode error at byte " + std::to_string(e.byte) +
                         ": " + e.what());
  }
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "setup") {
      SetupPayload s;
      const nlohmann::json& h = j.at("h");
      s.h.epsilon = read_epsilon(h.at("epsilon"));
      s.h.delta = h.at("delta").get<double>();
      s.h.eta = h.at("eta").get<double>();
      s.h.b = h.at("b").get<std::uint32_t>();
      s.h.e = h.at("e").get<std::uint32_t>();
      s.h.r = h.at("r").get<std::uint32_t>();
      s.h.T = h.at("T").get<std::uint32_t>();
      s.h.k = h.at("k").get<double>();
      s.h.lambda = h.at("lambda").get<double>();
      s.h.seed = h.at("seed").get<std::uint64_t>();
      s.loss = j.at("loss").get<std::string>();
      s.penalty = j.at("penalty").get<std::string>();
      s.mu = j.at("mu").get<double>();
      s.n = j.at("n").get<std::uint32_t>();
      s.d_a = j.at("d_a").get<std::uint32_t>();
      s.d_b = j.at("d_b").get<std::uint32_t>();
      return Message::make_setup(std::move(s));
    }
    if (type == "ir_b" || type == "ir_a") {
      auto t = j.at("t").get<std::uint32_t>();
      auto values = j.at("values").get<std::vector<double>>();
      return type == "ir_b" ? Message::make_ir_b(t, std::move(values))
                            : Message::make_ir_a(t, std::move(values));
    }
    if (type == "done") {
      DonePayload d;
      d.epoch_loss = j.at("epoch_loss").get<std::vector<double>>();
      return Message::make_done(std::move(d));
    }
    throw TransportError("decode error: unknown message type \"" + type + "\"");
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("decode error: ") + e.what());
  }
}

}  // namespace hdpvfl
