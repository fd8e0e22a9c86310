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

#ifndef HDPVFL_DATA_HPP_
#define HDPVFL_DATA_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hdpvfl/matrix.hpp"

namespace hdpvfl {

// One party's view of the data: entity ids, feature matrix, and (for the
// active party) the targets.
struct PartyTable {
  std::vector<std::string> ids;
  Matrix X;
  std::optional<std::vector<double>> y;  // present iff active-party table
  std::vector<std::string> column_names;
  // Positive scale applied by normalize_features (1.0 if not normalized).
  double feature_scale = 1.0;
};

struct AlignedPair {
  PartyTable active;
  PartyTable passive;
  std::size_t n = 0;
};

// CSV: UTF-8, comma-delimited, header row, first column "id", optional
// "label" column; {0,1} labels are mapped to {-1,+1}.
PartyTable load_csv(const std::string& path, bool has_label);

void write_csv(const PartyTable& table, const std::string& path);

// Keeps the id intersection, reorders both tables to sorted-id order.
AlignedPair entity_resolve(const PartyTable& a, const PartyTable& p);

// Each party divides its features by (max row norm * sqrt(2)), so every
// per-party row norm is <= 1/sqrt(2) and every joint row norm is <= 1.
AlignedPair normalize_features(const AlignedPair& pair);

// Same per-party scaling for a single table (wire mode normalizes each
// side locally).
PartyTable normalize_party(const PartyTable& table);

// (y - mean) / population std; constant y maps to the zero vector.
std::vector<double> normalize_targets(const std::vector<double>& y);

// Row subset of both tables, preserving alignment.
AlignedPair subset_rows(const AlignedPair& pair,
                        const std::vector<std::size_t>& rows);

// Deterministically assigns d_active feature columns (seed-shuffled order)
// plus the label to the active table, the rest to the passive table.
std::pair<PartyTable, PartyTable> vertical_split(const PartyTable& full,
                                                 std::size_t d_active,
                                                 std::uint64_t seed);

}  // namespace hdpvfl

#endif  // HDPVFL_DATA_HPP_
