#include "polyprog/report.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "polyprog/common.hpp"

namespace polyprog {

void RunConfig::set(const std::string& key, const std::string& value) {
  params[key] = value;
}
void RunConfig::set_int(const std::string& key, std::int64_t value) {
  params[key] = std::to_string(value);
}
void RunConfig::set_real(const std::string& key, double value) {
  params[key] = format_sig(value);
}

std::string RunConfig::to_text() const {
  std::ostringstream out;
  out << "command=" << command << '\n';
  out << "seed=" << seed << '\n';
  out << "mode=" << mode << '\n';
  if (!out_dir.empty()) out << "out=" << out_dir << '\n';
  for (const auto& [k, v] : params) out << k << '=' << v << '\n';
  return out.str();
}

Report::Report(RunConfig config) : config_(std::move(config)) {}

void Report::add_row(ReportRow row) {
  if (row.command.empty()) row.command = config_.command;
  rows_.push_back(std::move(row));
}
void Report::add_text(const std::string& quantity, const std::string& value,
                      const std::string& note) {
  add_row({"", quantity, value, "", "", note});
}
void Report::add_value(const std::string& quantity, double value,
                       const std::string& note) {
  add_row({"", quantity, format_sig(value), "", "", note});
}
void Report::add_int(const std::string& quantity, std::int64_t value,
                     const std::string& note) {
  add_row({"", quantity, std::to_string(value), "", "", note});
}
void Report::add_checked(const std::string& quantity, double value,
                         double prediction, double tolerance,
                         const std::string& note) {
  add_row({"", quantity, format_sig(value), format_sig(prediction),
           format_sig(tolerance), note});
}

std::string csv_escape(const std::string& field) {
  bool needs = field.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::string Report::csv() const {
  std::ostringstream out;
  out << kReportCsvHeader << '\n';
  for (const auto& r : rows_) {
    out << csv_escape(r.command) << ',' << csv_escape(r.quantity) << ','
        << csv_escape(r.value) << ',' << csv_escape(r.prediction) << ','
        << csv_escape(r.tolerance) << ',' << csv_escape(r.note) << '\n';
  }
  return out.str();
}

std::string Report::json() const {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["command"] = config_.command;
  doc["seed"] = config_.seed;
  doc["mode"] = config_.mode;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config_.params) cfg[k] = v;
  doc["config"] = cfg;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows_) {
    nlohmann::ordered_json row;
    row["command"] = r.command;
    row["quantity"] = r.quantity;
    row["value"] = r.value;
    row["prediction"] = r.prediction;
    row["tolerance"] = r.tolerance;
    row["note"] = r.note;
    doc["rows"].push_back(row);
  }
  return doc.dump(2) + "\n";
}

std::string Report::meta_json() const {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["command"] = config_.command;
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  doc["generated_utc"] = buf;
  doc["seed"] = config_.seed;
  doc["threads"] = thread_count();
  doc["mode"] = config_.mode;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config_.params) cfg[k] = v;
  doc["config"] = cfg;
  return doc.dump(2) + "\n";
}

std::vector<std::string> Report::write_files(const std::string& stem) const {
  std::filesystem::path p(stem);
  if (p.has_parent_path())
    std::filesystem::create_directories(p.parent_path());
  std::vector<std::string> written;
  auto emit = [&](const std::string& suffix, const std::string& content) {
    std::string path = stem + suffix;
    std::ofstream out(path, std::ios::binary);
    if (!out)
      throw PreconditionError("report: cannot write " + path);
    out << content;
    written.push_back(path);
  };
  emit(".csv", csv());
  emit(".json", json());
  emit(".meta.json", meta_json());
  return written;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("config: cannot read " + path);
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto notspace = line.find_first_not_of(" \t\r");
    if (notspace == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw PreconditionError("config: expected key=value, got '" + line +
                              "'");
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      return s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw PreconditionError("config: empty key in '" + line + "'");
    out[key] = value;
  }
  return out;
}

}  // namespace polyprog
