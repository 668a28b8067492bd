#include "optoprep/io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace optoprep {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_csv(const std::string& path, const CsvTable& table, const std::string& schema_name,
               int schema_version) {
  std::ofstream out(path);
  if (!out) throw NumericsError("cannot open " + path + " for writing");
  out << "# schema: " << schema_name << " v" << schema_version << "\n";
  for (size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out << ',';
    out << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      throw InvalidParameter("csv row width does not match the header");
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_double(row[i]);
    }
    out << '\n';
  }
  if (!out) throw NumericsError("short write to " + path);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw NumericsError("cannot open " + path + " for writing");
  out << content;
  if (!out) throw NumericsError("short write to " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NumericsError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string config_hash(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

CsvTable trajectory_table(const SimulationResult& result) {
  CsvTable t;
  t.columns.push_back("time_T");
  const size_t d =
      result.snapshots.empty() ? 0 : result.snapshots.front().cavity_populations.size();
  for (size_t n = 0; n < d; ++n) t.columns.push_back("pop_" + std::to_string(n));
  for (const auto& s : result.snapshots) {
    std::vector<double> row;
    row.reserve(d + 1);
    row.push_back(s.time);
    if (s.cavity_populations.size() != d)
      throw NumericsError("snapshot population width changed mid run");
    row.insert(row.end(), s.cavity_populations.begin(), s.cavity_populations.end());
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace optoprep
