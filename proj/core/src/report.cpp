#include "lagsym/report.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "lagsym/errors.hpp"

namespace lagsym {

using nlohmann::json;

namespace {

json record_to_json(const CheckRecord& r) {
  return json{{"name", r.name},         {"claim", r.claim},
              {"status", r.status},     {"residual", r.residual},
              {"tolerance", r.tolerance}, {"observed", r.observed},
              {"expected", r.expected}, {"source", r.source}};
}

CheckRecord record_from_json(const json& j) {
  CheckRecord r;
  r.name = j.at("name").get<std::string>();
  r.claim = j.at("claim").get<std::string>();
  r.status = j.at("status").get<std::string>();
  r.residual = j.at("residual").get<double>();
  r.tolerance = j.at("tolerance").get<double>();
  r.observed = j.at("observed").get<std::string>();
  r.expected = j.at("expected").get<std::string>();
  r.source = j.at("source").get<std::string>();
  return r;
}

json deterministic_section(const VerificationReport& rep) {
  std::vector<CheckRecord> sorted = rep.records;
  std::sort(sorted.begin(), sorted.end(),
            [](const CheckRecord& a, const CheckRecord& b) { return a.name < b.name; });
  json recs = json::array();
  for (const auto& r : sorted) recs.push_back(record_to_json(r));
  json cfg = json::object();
  for (const auto& [k, v] : rep.config_echo) cfg[k] = v;
  return json{{"tool_version", rep.tool_version}, {"config", cfg}, {"records", recs}};
}

}  // namespace

void VerificationReport::add(CheckRecord rec) { records.push_back(std::move(rec)); }

bool VerificationReport::all_passed() const { return fail_count() == 0; }

int VerificationReport::fail_count() const {
  int n = 0;
  for (const auto& r : records) n += r.status == "fail" ? 1 : 0;
  return n;
}

std::string VerificationReport::deterministic_json() const {
  return deterministic_section(*this).dump(2);
}

std::string VerificationReport::full_json() const {
  json doc;
  doc["deterministic"] = deterministic_section(*this);
  json t = json::object();
  for (const auto& [k, v] : timings_sec) t[k] = v;
  doc["timings_sec"] = t;
  return doc.dump(2);
}

VerificationReport VerificationReport::from_json_text(const std::string& text) {
  json doc = json::parse(text);
  const json& det = doc.contains("deterministic") ? doc.at("deterministic") : doc;
  VerificationReport rep;
  rep.tool_version = det.at("tool_version").get<std::string>();
  for (auto it = det.at("config").begin(); it != det.at("config").end(); ++it) {
    rep.config_echo[it.key()] = it.value().get<std::string>();
  }
  for (const auto& j : det.at("records")) rep.records.push_back(record_from_json(j));
  if (doc.contains("timings_sec")) {
    for (auto it = doc["timings_sec"].begin(); it != doc["timings_sec"].end(); ++it) {
      rep.timings_sec[it.key()] = it.value().get<double>();
    }
  }
  return rep;
}

std::string VerificationReport::table() const {
  std::vector<CheckRecord> sorted = records;
  std::sort(sorted.begin(), sorted.end(),
            [](const CheckRecord& a, const CheckRecord& b) { return a.name < b.name; });
  std::ostringstream os;
  os << std::left << std::setw(46) << "check" << std::setw(9) << "status" << std::setw(13)
     << "residual" << std::setw(13) << "tolerance"
     << "observed / expected\n";
  os << std::string(110, '-') << "\n";
  for (const auto& r : sorted) {
    os << std::left << std::setw(46) << r.name << std::setw(9) << r.status;
    os << std::setw(13) << std::setprecision(3) << std::scientific << r.residual;
    os << std::setw(13) << std::setprecision(3) << std::scientific << r.tolerance;
    os << r.observed;
    if (!r.expected.empty()) os << "  /  " << r.expected;
    os << "\n";
  }
  return os.str();
}

}  // namespace lagsym
