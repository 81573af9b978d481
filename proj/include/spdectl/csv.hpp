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

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spdectl/noise_model.hpp"

namespace spdectl {

struct CsvTable {
  std::vector<std::string> header;
  RowMatrix rows;
};

/// Numbers are written with 17 significant digits so reading them back is exact.
std::string format_number(double v);

/// Throws io-failure when the file cannot be written.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header, const RowMatrix& rows);
CsvTable read_csv(const std::filesystem::path& path);

/// "t", prefix0 .. prefix{count-1}.
std::vector<std::string> indexed_header(const std::string& first, const std::string& prefix, int count);

/// Prepends column t_i = i dt to a matrix whose rows are time levels.
RowMatrix with_time_column(const RowMatrix& values, double dt);

}  // namespace spdectl
