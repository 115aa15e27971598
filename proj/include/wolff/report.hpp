#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "wolff/density.hpp"

namespace wolff {

using Json = nlohmann::json;

// Deterministic float formatting so identical runs give identical bytes.
std::string format_double(double v);
std::string point_str(const Point& x);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(std::vector<std::string> cells);
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::uint64_t fnv1a64(const std::string& bytes);
std::string digest_hex(const std::string& bytes);

// Every run writes its outputs plus a manifest that reproduces it: resolved
// config, version, seeds, tolerances, wall clock, output digests.
class RunManifest {
 public:
  RunManifest(std::string subcommand, Json resolved_config);

  void set_tolerances(Json tolerances) { tolerances_ = std::move(tolerances); }
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  // Writes content under dir/name and records its digest.
  void emit(const std::filesystem::path& dir, const std::string& name,
            const std::string& content);

  void finalize(const std::filesystem::path& dir, double wall_clock_sec);

 private:
  std::string subcommand_;
  Json config_;
  Json tolerances_;
  std::uint64_t seed_ = 0;
  std::vector<std::pair<std::string, std::string>> outputs_;
};

}  // namespace wolff
