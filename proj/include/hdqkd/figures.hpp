#pragma once

#include <string>
#include <vector>

#include "hdqkd/finite.hpp"

namespace hdqkd {

struct SweepRange {
  double start = 0;
  double stop = 0;
  int points = 2;
  bool log_scale = false;

  void validate() const;
  std::vector<double> values() const;
};

/// One curve: sweep `variable` ("Q", "N", "d" or "m") over `range` with the
/// remaining parameters fixed. Q/d/m sweeps evaluate the asymptotic rate
/// (clamped at zero for reporting); N sweeps run the finite-key optimizer.
struct SweepSpec {
  std::string variable = "Q";
  SweepRange range;
  int dim = 5;
  int num_bases = 2;
  double q_tol = 0.05;
  double log2_eps_budget = 0;
  BoundType bound = BoundType::aep;
  AttackModel attack = AttackModel::collective;
  EpsMode eps_mode = EpsMode::derive;
  double incompatibility = -1.0;
  double ec_efficiency = 1.0;
  bool allow_nonprime = false;
  std::string label;

  void validate() const;
  std::string params_echo() const;
};

struct CsvTable {
  std::string params;  // key=value echo, one line
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Tool banner, parameter echo, header row, then full-double-precision data.
std::string render_csv(const CsvTable& table);

/// Evaluates the sweep, parallelized over grid points; row order follows
/// grid order regardless of scheduling.
CsvTable run_sweep(const SweepSpec& spec);

struct FigureFile {
  std::string filename;
  std::string content;
};

std::vector<std::string> figure_names();

/// Renders all CSV curves of a named figure (fig1..fig5) in memory.
std::vector<FigureFile> make_figure(const std::string& name);

/// Writes the curves of `name` under `out_dir`; returns the paths written.
std::vector<std::string> write_figure(const std::string& name,
                                      const std::string& out_dir);

}  // namespace hdqkd
