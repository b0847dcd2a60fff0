#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace polyprog {

// Resolved run configuration embedded into every report.
struct RunConfig {
  std::string command;
  std::map<std::string, std::string> params;  // flat key=value
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string mode = "exact";  // exact | sampled

  void set(const std::string& key, const std::string& value);
  void set_int(const std::string& key, std::int64_t value);
  void set_real(const std::string& key, double value);
  std::string to_text() const;  // canonical key=value lines
};

// One row of the report schema: command,quantity,value,prediction,
// tolerance,note.  Values are pre-formatted strings (numerics use 12
// significant digits) so CSV and JSON mirrors are byte-stable.
struct ReportRow {
  std::string command;
  std::string quantity;
  std::string value;
  std::string prediction;
  std::string tolerance;
  std::string note;
};

class Report {
 public:
  Report() = default;
  explicit Report(RunConfig config);

  void add_row(ReportRow row);
  void add_text(const std::string& quantity, const std::string& value,
                const std::string& note = "");
  void add_value(const std::string& quantity, double value,
                 const std::string& note = "");
  void add_int(const std::string& quantity, std::int64_t value,
               const std::string& note = "");
  // Value with a prediction and tolerance attached.
  void add_checked(const std::string& quantity, double value,
                   double prediction, double tolerance,
                   const std::string& note = "");

  const std::vector<ReportRow>& rows() const { return rows_; }
  const RunConfig& config() const { return config_; }

  // Deterministic serializations (no timestamps).
  std::string csv() const;
  std::string json() const;
  // Metadata sidecar: schema version, timestamp, seed, threads, config.
  std::string meta_json() const;

  // Writes <stem>.csv, <stem>.json and <stem>.meta.json, creating parent
  // directories as needed.  Returns the paths written.
  std::vector<std::string> write_files(const std::string& stem) const;

 private:
  RunConfig config_;
  std::vector<ReportRow> rows_;
};

// RFC-4180 style field quoting (quotes fields containing delimiters).
std::string csv_escape(const std::string& field);

// Reads a flat key=value config file ('#' starts a comment).
std::map<std::string, std::string> read_config_file(const std::string& path);

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kReportCsvHeader =
    "command,quantity,value,prediction,tolerance,note";

}  // namespace polyprog
