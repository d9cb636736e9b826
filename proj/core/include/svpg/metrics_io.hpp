#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "svpg/trainer.hpp"

namespace svpg {

/// Column order of metrics.csv. Kernel columns are empty outside svpg runs.
const std::vector<std::string>& metrics_columns();
/// Column order of particles.csv (one row per particle per iteration).
const std::vector<std::string>& particle_columns();

void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const IterationRecord& record);
void write_particles_header(std::ostream& out);
void write_particle_rows(std::ostream& out, const IterationRecord& record);

/// A CSV table read back as strings, keyed by header name.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace svpg
