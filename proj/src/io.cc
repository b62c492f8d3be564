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

#include "bluffsim/io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace bluffsim {

namespace {

template <typename T>
void append_number(std::string& out, T v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, end);
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(tmp.string() + ": cannot open for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw std::runtime_error(tmp.string() + ": write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error(path.string() + ": " + ec.message());
  }
}

std::string events_jsonl(std::span<const Event> events) {
  std::string out;
  out.reserve(events.size() * 128);
  for (const Event& e : events) {
    out += "{\"t\":";
    append_number(out, e.t.ms);
    out += e.etype == EventType::kImpression ? ",\"etype\":\"impression\""
                                             : ",\"etype\":\"click\"";
    out += ",\"agent_id\":";
    append_number(out, e.agent_id);
    out += ",\"ip\":\"";
    out += format_ip(e.ip);
    out += "\",\"page_id\":";
    append_number(out, e.page_id);
    out += ",\"ad_id\":";
    append_number(out, e.ad_id);
    out += ",\"ad_kind\":\"";
    out += to_string(e.ad_kind);
    out += "\",\"slot\":";
    append_number(out, e.slot_index);
    out += "}\n";
  }
  return out;
}

std::vector<Event> parse_events_jsonl(std::string_view text) {
  std::vector<Event> events;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Event e;
      e.t = Timestamp{j.at("t").get<int64_t>()};
      const auto etype = j.at("etype").get<std::string>();
      if (etype == "impression") {
        e.etype = EventType::kImpression;
      } else if (etype == "click") {
        e.etype = EventType::kClick;
      } else {
        throw InputError("bad etype '" + etype + "'");
      }
      e.agent_id = j.at("agent_id").get<AgentId>();
      const auto ip = parse_ip(j.at("ip").get<std::string>());
      if (!ip) throw InputError("bad ip");
      e.ip = *ip;
      e.page_id = j.at("page_id").get<PageId>();
      e.ad_id = j.at("ad_id").get<AdId>();
      const auto kind = parse_ad_kind(j.at("ad_kind").get<std::string>());
      if (!kind) throw InputError("bad ad_kind");
      e.ad_kind = *kind;
      e.slot_index = j.at("slot").get<int>();
      if (j.size() != 8) throw InputError("unexpected keys");
      events.push_back(e);
    } catch (const std::exception& ex) {
      throw InputError("events line " + std::to_string(line_no) + ": " +
                       ex.what());
    }
  }
  return events;
}

std::string truth_csv(const std::map<AgentId, AgentKind>& truth) {
  std::string out = "agent_id,kind\n";
  for (const auto& [id, kind] : truth) {
    append_number(out, id);
    out += ',';
    out += to_string(kind);
    out += '\n';
  }
  return out;
}

std::string verdicts_csv(const std::map<AgentId, SuspicionReport>& reports) {
  std::string out =
      "agent_id,s_bluff,s_thresh,s_profile,fused,flagged,p_value,"
      "max_window_clicks,divergence\n";
  for (const auto& [id, r] : reports) {
    append_number(out, id);
    for (double v : {r.s_bluff, r.s_thresh, r.s_profile, r.fused}) {
      out += ',';
      out += format_double(v);
    }
    out += r.flagged ? ",1," : ",0,";
    out += format_double(r.p_value);
    out += ',';
    append_number(out, r.max_window_clicks);
    out += ',';
    out += format_double(r.divergence);
    out += '\n';
  }
  return out;
}

std::string metric_csv(
    std::span<const std::pair<std::string, std::string>> rows) {
  std::string out = "metric,value\n";
  for (const auto& [k, v] : rows) out += k + "," + v + "\n";
  return out;
}

}  // namespace bluffsim
