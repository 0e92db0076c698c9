#pragma once

// Bundled verification suites. Reports are one record per line:
//   check=<name> measured=<x> tolerance=<t> status=PASS|FAIL
// followed by a summary record. No timings, so equal configs give
// byte-identical reports.

#include <string>
#include <vector>

#include "spincharge/config.hpp"

namespace spincharge {

struct CheckRecord {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// measured < tolerance, or measured == 0 for tolerance 0 (exact checks).
CheckRecord make_check(std::string name, double measured, double tolerance);

std::string format_record(const CheckRecord& r);

struct SuiteReport {
  std::string suite;
  std::vector<CheckRecord> records;

  bool all_pass() const;
  std::string text() const;
};

// name ∈ {identity, topology, flux, faddeev}; throws ConfigError otherwise.
SuiteReport run_suite(const std::string& name, const RunConfig& config);

}  // namespace spincharge
