#include "svpg/metrics_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "svpg/errors.hpp"
#include "svpg/format.hpp"

namespace svpg {

namespace {

std::string opt_number(double v) { return std::isnan(v) ? std::string() : format_double(v); }

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

const std::vector<std::string>& metrics_columns() {
  static const std::vector<std::string> cols = {
      "iteration",        "transitions",       "episodes",          "cumulative_transitions",
      "cumulative_episodes", "alpha",          "bandwidth",         "mean_offdiag_gram",
      "repulsion_ratio",  "mean_grad_norm",    "mean_train_return", "best_train_return",
      "mean_eval_return", "best_eval_return",  "best_particle"};
  return cols;
}

const std::vector<std::string>& particle_columns() {
  static const std::vector<std::string> cols = {"iteration",    "particle",    "transitions", "episodes",
                                                "train_return", "eval_return", "grad_norm"};
  return cols;
}

void write_metrics_header(std::ostream& out) {
  const auto& cols = metrics_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

void write_metrics_row(std::ostream& out, const IterationRecord& r) {
  out << r.iteration << ',' << r.transitions << ',' << r.episodes << ',' << r.cumulative_transitions << ','
      << r.cumulative_episodes << ',' << opt_number(r.alpha) << ',' << opt_number(r.bandwidth) << ','
      << opt_number(r.mean_offdiag_gram) << ',' << opt_number(r.repulsion_ratio) << ','
      << format_double(r.mean_grad_norm) << ',' << format_double(r.mean_train_return) << ','
      << format_double(r.best_train_return) << ',' << format_double(r.mean_eval_return) << ','
      << format_double(r.best_eval_return) << ',' << r.best_particle << '\n';
}

void write_particles_header(std::ostream& out) {
  const auto& cols = particle_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

void write_particle_rows(std::ostream& out, const IterationRecord& r) {
  for (std::size_t p = 0; p < r.particles.size(); ++p) {
    const auto& pr = r.particles[p];
    out << r.iteration << ',' << p << ',' << pr.transitions << ',' << pr.episodes << ','
        << format_double(pr.train_return) << ',' << format_double(pr.eval_return) << ','
        << format_double(pr.grad_norm) << '\n';
  }
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw Error("CSV has no column '" + name + "'");
}

double CsvTable::number(std::size_t row, const std::string& name) const {
  const auto& cell = rows.at(row).at(column(name));
  if (cell.empty() || cell == "nan") return std::nan("");
  double v = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
    throw Error("CSV cell '" + cell + "' in column '" + name + "' is not a number");
  }
  return v;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw Error(path.string() + " is empty");
  t.header = split_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = split_line(line);
    if (row.size() != t.header.size()) throw Error(path.string() + ": ragged CSV row");
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace svpg
