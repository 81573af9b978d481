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


#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <sstream>

#include <fmt/format.h>

#include "spdectl/commands.hpp"

using namespace spdectl;
namespace fs = std::filesystem;

TEST_CASE("default heat verify passes on at least 95% of 20 seeds") {
  const fs::path dir = fs::temp_directory_path() / fmt::format("spdectl_calib_{}", ::getpid());
  int passed = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    ExperimentConfig c = load_config_json({{"preset", "heat_tracking"}});
    override_seed(c, seed);
    c.output_dir = (dir / std::to_string(seed)).string();
    std::ostringstream log;
    const int code = cmd_verify(c, log);
    CHECK((code == kExitOk || code == kExitStatistical));
    if (code == kExitOk) ++passed;
    else MESSAGE("seed " << seed << "\n" << log.str());
  }
  CHECK(passed >= 19);
  fs::remove_all(dir);
}
