#pragma once

#include <string>
#include <vector>

#include "optoprep/propagation.hpp"

namespace optoprep {

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// Writes "# schema: <name> v<version>" followed by a header row and data rows
// with round-trip-exact doubles.
void write_csv(const std::string& path, const CsvTable& table, const std::string& schema_name,
               int schema_version);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// FNV-1a hash of a canonical config string, for output provenance.
std::string config_hash(const std::string& text);

// Trajectory table (time_T, pop_0 ... pop_{d-1}) from recorded snapshots.
CsvTable trajectory_table(const SimulationResult& result);

}  // namespace optoprep
