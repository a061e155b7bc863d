#pragma once

#include <string>

#include "fricobs/scenario.hpp"

namespace fricobs {

/// Writes the run series as CSV: comma separated, '.' decimal point,
/// header row with the exact column names, 17 significant digits so the
/// decimal form round-trips doubles bit-exactly.
void write_csv(const RunSeries& s, const std::string& path);
std::string csv_to_string(const RunSeries& s);

RunSeries read_csv(const std::string& path);
RunSeries csv_from_string(const std::string& text);

/// Compact regression fixture: run identity, metrics, and a decimated
/// sample of the estimation-error traces.
struct Fixture {
  std::string name;
  double rho = 0.0;
  std::uint64_t seed = 0;
  RunMetrics metrics;
  std::size_t decimation = 1000;
  std::vector<double> t_samples, eps2_samples, eps3_samples;
};

Fixture make_fixture(const std::string& name, double rho, std::uint64_t seed,
                     const RunResult& result, std::size_t decimation = 1000);
void write_fixture(const Fixture& f, const std::string& path);
Fixture read_fixture(const std::string& path);

}  // namespace fricobs
