#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polyprog/report.hpp"

namespace polyprog {

// One verification criterion of the battery: a named pass/fail verdict, a
// wall-clock measurement (never serialized into report rows, which must be
// byte-stable across reruns), a deterministic one-line detail string, and
// the report rows the criterion contributes.
struct CriterionResult {
  int index = 0;
  std::string name;
  bool pass = false;
  double seconds = 0;
  std::string detail;
  std::vector<ReportRow> rows;
};

// Runs the full battery. data_dir points at the shipped data files (the
// linearizer corpus and golden traces).  The final criterion re-runs the
// whole battery with the same seed and checks that the serialized rows are
// byte-identical.
std::vector<CriterionResult> run_acceptance(std::uint64_t seed,
                                            const std::string& data_dir);

// Serializes criterion rows in the report CSV schema (used both for the
// reproducibility comparison and by the command-line verify report).
std::string acceptance_rows_csv(const std::vector<CriterionResult>& results);

// Formatted one-line verdict, e.g. "criterion 03 zero-density-bound: PASS
// (0.41 s)".
std::string criterion_line(const CriterionResult& r);

}  // namespace polyprog
