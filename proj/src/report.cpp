#include "wolff/report.hpp"

#include <cstdio>
#include <fstream>

#include "wolff/errors.hpp"
#include "wolff/version.hpp"

namespace wolff {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string point_str(const Point& x) {
  std::string out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i > 0) out += ";";
    out += format_double(x[i]);
  }
  return out;
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size())
    throw std::logic_error("csv: row width does not match header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (i > 0) out += ",";
    out += header_[i];
  }
  out += "\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ",";
      out += row[i];
    }
    out += "\n";
  }
  return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string digest_hex(const std::string& bytes) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

RunManifest::RunManifest(std::string subcommand, Json resolved_config)
    : subcommand_(std::move(subcommand)), config_(std::move(resolved_config)) {}

void RunManifest::emit(const std::filesystem::path& dir, const std::string& name,
                       const std::string& content) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path path = dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NumericalError("cannot write " + path.string());
  out << content;
  out.close();
  outputs_.emplace_back(name, digest_hex(content));
}

void RunManifest::finalize(const std::filesystem::path& dir, double wall_clock_sec) {
  Json j;
  j["subcommand"] = subcommand_;
  j["version"] = kVersion;
  j["config"] = config_;
  j["seed"] = seed_;
  j["tolerances"] = tolerances_.is_null() ? Json::object() : tolerances_;
  j["wall_clock_sec"] = wall_clock_sec;
  Json outs = Json::array();
  for (const auto& [name, digest] : outputs_) {
    outs.push_back(Json{{"file", name}, {"digest", digest}});
  }
  j["outputs"] = outs;
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  out << j.dump(2) << "\n";
}

}  // namespace wolff
