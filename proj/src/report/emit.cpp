/*
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

#include "melt/report/emit.hpp"

#include <cmath>
#include <fstream>

#include "melt/core/error.hpp"
#include "melt/core/format.hpp"

namespace melt::report {

using nlohmann::json;

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  throw Error(Errc::InvalidArgument, "unknown format " + std::string(name));
}

namespace {

std::string csv_field(const std::string& v) {
  if (v.find_first_of(",\"\n") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json sig6_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(core::format_sig6(v));
}

std::string opt_cell(const std::optional<double>& v) { return v ? core::format_sig6(*v) : std::string{}; }

}  // namespace

std::string render(const AggregateTable& table, Format format) {
  if (format == Format::Csv) {
    std::string out;
    for (const auto& k : table.key_names) out += k + ",";
    out += "level,metric,mean,std,n,attrition\n";
    for (const auto& r : table.rows) {
      for (const auto& k : table.key_names) out += csv_field(r.keys.at(k)) + ",";
      out += std::string(to_string(r.level)) + "," + csv_field(r.metric) + "," + core::format_sig6(r.mean) + "," +
             core::format_sig6(r.std) + "," + std::to_string(r.n) + "," + std::to_string(r.attrition) + "\n";
    }
    return out;
  }
  json rows = json::array();
  for (const auto& r : table.rows)
    rows.push_back(json{{"keys", r.keys},
                        {"level", to_string(r.level)},
                        {"metric", r.metric},
                        {"mean", sig6_number(r.mean)},
                        {"std", sig6_number(r.std)},
                        {"n", r.n},
                        {"attrition", r.attrition}});
  return json{{"group_by", table.key_names}, {"rows", std::move(rows)}, {"warnings", table.warnings}}.dump(2) + "\n";
}

std::string prompt_metrics_csv(std::span<const analysis::PromptMetrics> prompts) {
  std::string out =
      "prompt_index,conversation_index,prompt_tokens,generated_tokens,prefill_s,decode_s,prefill_tps,generation_tps,"
      "prefill_energy_mwh,decode_energy_mwh,energy_mwh_per_token,energy_mwh_per_token_gross,"
      "discharge_mah_per_token,discharge_mah_per_token_gross,load_time_s,max_temp_c\n";
  using core::format_sig6;
  for (const auto& p : prompts) {
    out += std::to_string(p.prompt_index) + "," + std::to_string(p.conversation_index) + "," +
           std::to_string(p.prompt_tokens) + "," + std::to_string(p.generated_tokens) + "," + format_sig6(p.prefill_s) +
           "," + format_sig6(p.decode_s) + "," + format_sig6(p.prefill_tps) + "," + format_sig6(p.generation_tps) + "," +
           format_sig6(p.prefill_energy.energy_mwh_net) + "," + format_sig6(p.decode_energy.energy_mwh_net) + "," +
           format_sig6(p.energy_mwh_per_token) + "," + format_sig6(p.energy_mwh_per_token_gross) + "," +
           opt_cell(p.discharge_mah_per_token) + "," + opt_cell(p.discharge_mah_per_token_gross) + "," +
           opt_cell(p.load_time_s) + "," + opt_cell(p.max_temp_c) + "\n";
  }
  return out;
}

std::string render(const RunReport& report, Format format) {
  if (format == Format::Csv) return prompt_metrics_csv(report.prompts);
  return json(report).dump(2) + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

void emit(const AggregateTable& table, Format format, const std::filesystem::path& path) {
  write_text(path, render(table, format));
}

void emit(const RunReport& report, Format format, const std::filesystem::path& path) {
  write_text(path, render(report, format));
}

}  // namespace melt::report
