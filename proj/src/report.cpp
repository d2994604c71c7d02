#include "hetsol/report.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include <gmp.h>

namespace hetsol {

Mode mode_with_env_override(Mode configured) {
  const char* env = std::getenv("HETSOL_MODE");
  if (env == nullptr || *env == '\0') return configured;
  try {
    return parse_mode(std::string_view(env));
  } catch (const Error&) {
    throw Error(ErrorKind::MalformedConfig, std::string("HETSOL_MODE: expected 'exact' or 'float', got '") + env + "'");
  }
}

void SuiteConfig::check() const {
  if (trials < 1) throw Error(ErrorKind::MalformedConfig, "trials: must be at least 1");
  if (!(tolerance > 0)) throw Error(ErrorKind::MalformedConfig, "tolerance: must be positive");
}

void SuiteConfig::merge_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object()) throw Error(ErrorKind::MalformedConfig, path + ": expected an object");
  try {
    if (j.contains("seed")) seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("trials")) trials = j.at("trials").get<int>();
    if (j.contains("mode")) mode = parse_mode(j.at("mode").get<std::string>());
    if (j.contains("tolerance")) tolerance = j.at("tolerance").get<double>();
    if (j.contains("chart")) chart_path = j.at("chart").get<std::string>();
    if (j.contains("catalogue")) catalogue_path = j.at("catalogue").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedConfig, path + ": " + e.what());
  }
  for (const auto& [key, value] : j.items())
    if (key != "seed" && key != "trials" && key != "mode" && key != "tolerance" && key != "chart" &&
        key != "catalogue")
      throw Error(ErrorKind::MalformedConfig, path + "." + key + ": unknown field");
  check();
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ stream) ^ trial);
}

nlohmann::json rational_json(const Rational& q) {
  if (q.get_den() == 1 && q.get_num().fits_slong_p()) return q.get_num().get_si();
  return to_string(q);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

Report::Report(std::string command, const SuiteConfig& cfg) : command_(std::move(command)), cfg_(cfg) {}

void Report::check(const std::string& name, const std::string& anchor, double defect, double tolerance,
                   const std::string& detail) {
  auto [it, fresh] = records_.try_emplace(name);
  CheckRecord& r = it->second;
  if (fresh) {
    r.name = name;
    r.anchor = anchor;
    r.tolerance = tolerance;
  }
  bool ok = !std::isnan(defect) && defect <= tolerance;
  if (std::isnan(defect) || defect > r.defect) r.defect = defect;
  if (!ok && r.pass) {
    r.pass = false;
    r.detail = detail.empty() ? "defect " + format_double(defect) : detail;
  }
  ++r.samples;
}

void Report::verdict(const std::string& name, const std::string& anchor, bool pass, const std::string& detail) {
  auto [it, fresh] = records_.try_emplace(name);
  CheckRecord& r = it->second;
  if (fresh) {
    r.name = name;
    r.anchor = anchor;
  }
  if (!pass && r.pass) {
    r.pass = false;
    r.defect = 1;
    r.detail = detail;
  }
  ++r.samples;
}

bool Report::passed() const {
  for (const auto& [name, r] : records_)
    if (!r.pass) return false;
  return true;
}

std::optional<CheckRecord> Report::first_failure() const {
  for (const auto& [name, r] : records_)
    if (!r.pass) return r;
  return std::nullopt;
}

nlohmann::json environment_stamp() {
  nlohmann::json e;
#if defined(__clang__)
  e["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  e["compiler"] = std::string("gcc ") + __VERSION__;
#else
  e["compiler"] = "unknown";
#endif
  e["cplusplus"] = static_cast<long>(__cplusplus);
  e["gmp"] = gmp_version;
#ifdef NDEBUG
  e["build"] = "release";
#else
  e["build"] = "debug";
#endif
  return e;
}

nlohmann::json Report::to_json(bool with_timings) const {
  nlohmann::json j;
  j["schema"] = kReportSchema;
  j["command"] = command_;
  j["seed"] = cfg_.seed;
  j["trials"] = cfg_.trials;
  j["mode"] = to_string(cfg_.mode);
  j["environment"] = environment_stamp();
  j["passed"] = passed();
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& [name, r] : records_) {
    nlohmann::json x;
    x["name"] = r.name;
    x["anchor"] = r.anchor;
    x["defect"] = r.defect;
    x["tolerance"] = r.tolerance;
    x["samples"] = r.samples;
    x["pass"] = r.pass;
    if (!r.detail.empty()) x["detail"] = r.detail;
    recs.push_back(x);
  }
  j["records"] = recs;
  j["results"] = nlohmann::json::object();
  for (const auto& [k, v] : results_) j["results"][k] = v;
  j["tables"] = nlohmann::json::array();
  for (const auto& t : tables_) j["tables"].push_back({{"name", t.name}, {"columns", t.columns}, {"rows", t.rows}});
  if (auto f = first_failure()) j["first_failure"] = {{"name", f->name}, {"detail", f->detail}};
  if (with_timings) {
    j["timings"] = nlohmann::json::object();
    for (const auto& [k, v] : timings_) j["timings"][k] = v;
  }
  return j;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string Report::records_csv() const {
  std::ostringstream os;
  os << "name,anchor,defect,tolerance,samples,pass\n";
  for (const auto& [name, r] : records_)
    os << csv_field(r.name) << ',' << csv_field(r.anchor) << ',' << format_double(r.defect) << ','
       << format_double(r.tolerance) << ',' << r.samples << ',' << (r.pass ? "true" : "false") << '\n';
  return os.str();
}

std::string Report::table_csv(const Table& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_field(t.columns[i]);
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
    os << '\n';
  }
  return os.str();
}

}  // namespace hetsol
