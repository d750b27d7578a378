#pragma once

#include <map>
#include <string>
#include <vector>

namespace lagsym {

/// One verification record.  `source` states where the expected value comes
/// from: "reference" (a value quoted from the construction's literature),
/// "definition" (immediate from a definition or exact identity), or
/// "computed" (derived by an independent numerical route).
struct CheckRecord {
  std::string name;
  std::string claim;
  std::string status;  // "pass" | "fail" | "finding"
  double residual = 0.0;
  double tolerance = 0.0;
  std::string observed;
  std::string expected;
  std::string source;  // "reference" | "definition" | "computed"
};

struct VerificationReport {
  std::string tool_version;
  std::map<std::string, std::string> config_echo;
  std::vector<CheckRecord> records;
  std::map<std::string, double> timings_sec;

  void add(CheckRecord rec);
  bool all_passed() const;  // no "fail" records ("finding" does not fail)
  int fail_count() const;

  /// Canonical JSON of the deterministic section: config echo plus records
  /// sorted by name; timings excluded.
  std::string deterministic_json() const;
  /// Full JSON document (deterministic section + timings).
  std::string full_json() const;
  static VerificationReport from_json_text(const std::string& text);

  /// Human-readable fixed-width table.
  std::string table() const;
};

}  // namespace lagsym
