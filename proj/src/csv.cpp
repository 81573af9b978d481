/*
 Copyright 2026 The spdectl Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/


#include "spdectl/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "spdectl/error.hpp"

namespace spdectl {

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header, const RowMatrix& rows) {
  if (!header.empty() && static_cast<Eigen::Index>(header.size()) != rows.cols()) {
    throw Error(ErrorCode::ShapeMismatch,
                fmt::format("header has {} columns, data has {}", header.size(), rows.cols()));
  }
  std::string text;
  text.reserve(static_cast<std::size_t>(rows.size()) * 24 + 64);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) text += ',';
    text += header[i];
  }
  text += '\n';
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < rows.cols(); ++c) {
      if (c) text += ',';
      fmt::format_to(std::back_inserter(text), "{:.17g}", rows(r, c));
    }
    text += '\n';
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, fmt::format("cannot write {}", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::IoFailure, fmt::format("short write to {}", path.string()));
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, fmt::format("cannot read {}", path.string()));
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::IoFailure, fmt::format("{} is empty", path.string()));
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  std::vector<double> data;
  Eigen::Index rows = 0;
  const std::size_t width = table.header.size();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t cols = 0;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p <= end) {
      const char* comma = std::find(p, end, ',');
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(p, comma, v);
      if (ec != std::errc() || ptr != comma) {
        throw Error(ErrorCode::IoFailure, fmt::format("{}: bad number on data row {}", path.string(), rows + 1));
      }
      data.push_back(v);
      ++cols;
      p = comma + 1;
    }
    if (cols != width) {
      throw Error(ErrorCode::IoFailure,
                  fmt::format("{}: row {} has {} columns, expected {}", path.string(), rows + 1, cols, width));
    }
    ++rows;
  }
  table.rows = Eigen::Map<RowMatrix>(data.data(), rows, static_cast<Eigen::Index>(width));
  return table;
}

std::vector<std::string> indexed_header(const std::string& first, const std::string& prefix, int count) {
  std::vector<std::string> h;
  if (!first.empty()) h.push_back(first);
  for (int i = 0; i < count; ++i) h.push_back(fmt::format("{}{}", prefix, i));
  return h;
}

RowMatrix with_time_column(const RowMatrix& values, double dt) {
  RowMatrix out(values.rows(), values.cols() + 1);
  for (Eigen::Index i = 0; i < values.rows(); ++i) out(i, 0) = static_cast<double>(i) * dt;
  out.rightCols(values.cols()) = values;
  return out;
}

}  // namespace spdectl
