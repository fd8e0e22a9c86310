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

#include "hdpvfl/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "hdpvfl/errors.hpp"
#include "hdpvfl/rng.hpp"

namespace hdpvfl {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col,
                  const std::string& name) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != cell.size() || cell.empty()) {
    throw InputError("non-numeric cell at row " + std::to_string(row) +
                     ", column \"" + name + "\": \"" + cell + "\"");
  }
  return v;
}

PartyTable reindex(const PartyTable& t, const std::vector<std::size_t>& rows) {
  PartyTable out;
  out.column_names = t.column_names;
  out.feature_scale = t.feature_scale;
  out.X = Matrix(rows.size(), t.X.cols);
  if (t.y) out.y = std::vector<double>();
  out.ids.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t src = rows[r];
    out.ids.push_back(t.ids[src]);
    std::copy(t.X.row(src).begin(), t.X.row(src).end(), out.X.row(r).begin());
    if (t.y) out.y->push_back((*t.y)[src]);
  }
  return out;
}

}  // namespace

PartyTable load_csv(const std::string& path, bool has_label) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw InputError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_line(line);
  if (header.empty() || header[0] != "id") {
    throw InputError(path + ": first column must be \"id\"");
  }
  std::ptrdiff_t label_col = -1;
  std::vector<std::size_t> feature_cols;
  PartyTable table;
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (header[c] == "label") {
      if (label_col >= 0) throw InputError(path + ": duplicate label column");
      label_col = static_cast<std::ptrdiff_t>(c);
    } else {
      feature_cols.push_back(c);
      table.column_names.push_back(header[c]);
    }
  }
  if (has_label && label_col < 0) {
    throw InputError(path + ": missing label column");
  }
  if (has_label) table.y = std::vector<double>();

  std::vector<std::vector<double>> rows;
  std::unordered_set<std::string> seen;
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) {
      throw InputError(path + ": row " + std::to_string(row_no) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(header.size()));
    }
    if (!seen.insert(cells[0]).second) {
      throw InputError(path + ": duplicate id \"" + cells[0] + "\"");
    }
    table.ids.push_back(cells[0]);
    if (has_label) {
      table.y->push_back(parse_cell(cells[label_col], row_no, label_col, "label"));
    }
    std::vector<double> feats;
    feats.reserve(feature_cols.size());
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
      feats.push_back(parse_cell(cells[feature_cols[k]], row_no,
                                 feature_cols[k], header[feature_cols[k]]));
    }
    rows.push_back(std::move(feats));
  }
  table.X = Matrix(rows.size(), feature_cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(rows[i].begin(), rows[i].end(), table.X.row(i).begin());
  }
  if (table.y) {
    // A {0,1} label column follows the {-1,+1} convention; real-valued
    // targets (regression tasks) pass through unchanged.
    const bool binary01 = std::all_of(table.y->begin(), table.y->end(),
                                      [](double v) { return v == 0.0 || v == 1.0; });
    if (binary01) {
      for (double& v : *table.y) v = (v == 0.0) ? -1.0 : 1.0;
    }
  }
  return table;
}

void write_csv(const PartyTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "id";
  if (table.y) out << ",label";
  for (const auto& c : table.column_names) out << ',' << c;
  out << '\n';
  char buf[64];
  for (std::size_t i = 0; i < table.ids.size(); ++i) {
    out << table.ids[i];
    if (table.y) {
      std::snprintf(buf, sizeof buf, "%.17g", (*table.y)[i]);
      out << ',' << buf;
    }
    for (std::size_t j = 0; j < table.X.cols; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", table.X.at(i, j));
      out << ',' << buf;
    }
    out << '\n';
  }
}

AlignedPair entity_resolve(const PartyTable& a, const PartyTable& p) {
  if (!a.y) throw InputError("entity_resolve: first table must carry labels");
  std::unordered_map<std::string, std::size_t> p_index;
  for (std::size_t i = 0; i < p.ids.size(); ++i) p_index.emplace(p.ids[i], i);

  // Sorted-id canonical order over the intersection.
  std::map<std::string, std::pair<std::size_t, std::size_t>> common;
  for (std::size_t i = 0; i < a.ids.size(); ++i) {
    auto it = p_index.find(a.ids[i]);
    if (it != p_index.end()) common.emplace(a.ids[i], std::make_pair(i, it->second));
  }
  if (common.empty()) throw InputError("entity_resolve: no common entities");

  std::vector<std::size_t> a_rows, p_rows;
  a_rows.reserve(common.size());
  p_rows.reserve(common.size());
  for (const auto& [id, idx] : common) {
    a_rows.push_back(idx.first);
    p_rows.push_back(idx.second);
  }
  AlignedPair pair;
  pair.active = reindex(a, a_rows);
  pair.passive = reindex(p, p_rows);
  pair.n = common.size();
  return pair;
}

AlignedPair subset_rows(const AlignedPair& pair,
                        const std::vector<std::size_t>& rows) {
  AlignedPair out;
  out.active = reindex(pair.active, rows);
  out.passive = reindex(pair.passive, rows);
  out.n = rows.size();
  return out;
}

namespace {

double max_row_norm(const Matrix& X) {
  double m = 0.0;
  for (std::size_t i = 0; i < X.rows; ++i) m = std::max(m, norm2(X.row(i)));
  return m;
}

void scale_party(PartyTable& t) {
  const double m = max_row_norm(t.X);
  if (m == 0.0) {
    std::cerr << "note: all-zero feature matrix, skipping normalization\n";
    t.feature_scale = 1.0;
    return;
  }
  const double scale = m * std::sqrt(2.0);
  for (double& x : t.X.data) x /= scale;
  t.feature_scale = scale;
}

}  // namespace

AlignedPair normalize_features(const AlignedPair& pair) {
  AlignedPair out = pair;
  scale_party(out.active);
  scale_party(out.passive);
  return out;
}

PartyTable normalize_party(const PartyTable& table) {
  PartyTable out = table;
  scale_party(out);
  return out;
}

std::vector<double> normalize_targets(const std::vector<double>& y) {
  if (y.empty()) throw InputError("normalize_targets: empty target vector");
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  const double std_dev = std::sqrt(var / y.size());
  std::vector<double> out(y.size(), 0.0);
  if (std_dev == 0.0) {
    std::cerr << "note: constant targets, normalized to zero\n";
    return out;
  }
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = (y[i] - mean) / std_dev;
  return out;
}

std::pair<PartyTable, PartyTable> vertical_split(const PartyTable& full,
                                                 std::size_t d_active,
                                                 std::uint64_t seed) {
  if (!full.y) throw InputError("vertical_split: table must carry labels");
  const std::size_t d_total = full.X.cols;
  if (d_active < 1 || d_active >= d_total) {
    throw InputError("vertical_split: d_active must be in [1, " +
                     std::to_string(d_total - 1) + "]");
  }
  std::vector<std::size_t> order(d_total);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, kStreamSplit));
  for (std::size_t i = d_total - 1; i > 0; --i) {
    std::swap(order[i], order[rng.uniform_below(i + 1)]);
  }

  auto take = [&](std::size_t begin, std::size_t end, bool with_label) {
    std::vector<std::size_t> cols(order.begin() + begin, order.begin() + end);
    std::sort(cols.begin(), cols.end());  // keep original column order
    PartyTable t;
    t.ids = full.ids;
    if (with_label) t.y = full.y;
    t.X = Matrix(full.X.rows, cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) {
      t.column_names.push_back(full.column_names[cols[k]]);
      for (std::size_t i = 0; i < full.X.rows; ++i) {
        t.X.at(i, k) = full.X.at(i, cols[k]);
      }
    }
    return t;
  };
  return {take(0, d_active, true), take(d_active, d_total, false)};
}

}  // namespace hdpvfl
