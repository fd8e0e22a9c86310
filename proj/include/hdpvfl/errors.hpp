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

#ifndef HDPVFL_ERRORS_HPP_
#define HDPVFL_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace hdpvfl {

// Bad user input: malformed CSV, out-of-domain targets, invalid hyperparameters.
// Maps to exit code 1 in the CLI.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Training produced NaN/Inf weights. Exit code 2.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Channel/framing failures. Exit code 3.
class TransportError : public std::runtime_error {
 public:
  explicit TransportError(const std::string& what) : std::runtime_error(what) {}
};

// Orderly end of session: peer closed with no pending message.
class ChannelClosedError : public TransportError {
 public:
  explicit ChannelClosedError(const std::string& what) : TransportError(what) {}
};

}  // namespace hdpvfl

#endif  // HDPVFL_ERRORS_HPP_
