// Copyright 2026 The Bluffsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BLUFFSIM_IO_H_
#define BLUFFSIM_IO_H_

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bluffsim/detection.h"
#include "bluffsim/domain.h"

namespace bluffsim {

// Shortest string that parses back to the same double. "nan", "inf" and
// "-inf" for non-finite values.
std::string format_double(double v);

// Writes to `path` via a sibling temp file and rename. Throws
// std::runtime_error with the path on failure.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

std::string events_jsonl(std::span<const Event> events);
// Inverse of events_jsonl. Throws InputError with the line number.
std::vector<Event> parse_events_jsonl(std::string_view text);

std::string truth_csv(const std::map<AgentId, AgentKind>& truth);
std::string verdicts_csv(const std::map<AgentId, SuspicionReport>& reports);
std::string metric_csv(
    std::span<const std::pair<std::string, std::string>> rows);

}  // namespace bluffsim

#endif  // BLUFFSIM_IO_H_
