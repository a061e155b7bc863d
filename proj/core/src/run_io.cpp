#include "fricobs/run_io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace fricobs {

namespace {

constexpr const char* kHeader = "t,u,x_true,x_meas,v_true,v_est,f_true,f_est,eps2,eps3";

void append_number(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

std::string csv_to_string(const RunSeries& s) {
  std::string out(kHeader);
  out += '\n';
  const std::size_t n = s.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double row[10] = {s.t[k],     s.u[k],     s.x_true[k], s.x_meas[k], s.v_true[k],
                            s.v_est[k], s.f_true[k], s.f_est[k],  s.eps2[k],   s.eps3[k]};
    for (int c = 0; c < 10; ++c) {
      if (c) out += ',';
      append_number(out, row[c]);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const RunSeries& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  out << csv_to_string(s);
  if (!out) throw std::runtime_error("write_csv: write failed for " + path);
}

RunSeries csv_from_string(const std::string& text) {
  RunSeries s;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_csv: empty input");
  if (line != kHeader) throw std::runtime_error("read_csv: unexpected header: " + line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double row[10];
    const char* p = line.c_str();
    for (int c = 0; c < 10; ++c) {
      char* end = nullptr;
      row[c] = std::strtod(p, &end);
      if (end == p) throw std::runtime_error("read_csv: malformed row: " + line);
      p = end;
      if (c < 9) {
        if (*p != ',') throw std::runtime_error("read_csv: malformed row: " + line);
        ++p;
      }
    }
    s.push_row(row[0], row[1], row[2], row[3], row[4], row[5], row[6], row[7], row[8], row[9]);
  }
  return s;
}

RunSeries read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return csv_from_string(buf.str());
}

Fixture make_fixture(const std::string& name, double rho, std::uint64_t seed,
                     const RunResult& result, std::size_t decimation) {
  Fixture f;
  f.name = name;
  f.rho = rho;
  f.seed = seed;
  f.metrics = result.metrics;
  f.decimation = decimation;
  for (std::size_t k = 0; k < result.series.size(); k += decimation) {
    f.t_samples.push_back(result.series.t[k]);
    f.eps2_samples.push_back(result.series.eps2[k]);
    f.eps3_samples.push_back(result.series.eps3[k]);
  }
  return f;
}

void write_fixture(const Fixture& f, const std::string& path) {
  nlohmann::json j;
  j["name"] = f.name;
  j["rho"] = f.rho;
  j["seed"] = f.seed;
  j["decimation"] = f.decimation;
  j["metrics"] = {{"rms_error", f.metrics.rms_error},
                  {"max_abs_error", f.metrics.max_abs_error},
                  {"hold_errors", f.metrics.hold_errors},
                  {"diverged", f.metrics.diverged},
                  {"divergence_onset", f.metrics.divergence_onset},
                  {"convergence_time", f.metrics.convergence_time},
                  {"rms_eps2", f.metrics.rms_eps2},
                  {"rms_eps3", f.metrics.rms_eps3}};
  j["t_samples"] = f.t_samples;
  j["eps2_samples"] = f.eps2_samples;
  j["eps3_samples"] = f.eps3_samples;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_fixture: cannot open " + path);
  out << j.dump(2) << '\n';
}

Fixture read_fixture(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_fixture: cannot open " + path);
  nlohmann::json j;
  in >> j;
  Fixture f;
  f.name = j.at("name").get<std::string>();
  f.rho = j.at("rho").get<double>();
  f.seed = j.at("seed").get<std::uint64_t>();
  f.decimation = j.at("decimation").get<std::size_t>();
  const auto& m = j.at("metrics");
  f.metrics.rms_error = m.at("rms_error").get<double>();
  f.metrics.max_abs_error = m.at("max_abs_error").get<double>();
  f.metrics.hold_errors = m.at("hold_errors").get<std::vector<double>>();
  f.metrics.diverged = m.at("diverged").get<bool>();
  f.metrics.divergence_onset = m.at("divergence_onset").get<double>();
  f.metrics.convergence_time = m.at("convergence_time").get<double>();
  f.metrics.rms_eps2 = m.at("rms_eps2").get<double>();
  f.metrics.rms_eps3 = m.at("rms_eps3").get<double>();
  f.t_samples = j.at("t_samples").get<std::vector<double>>();
  f.eps2_samples = j.at("eps2_samples").get<std::vector<double>>();
  f.eps3_samples = j.at("eps3_samples").get<std::vector<double>>();
  return f;
}

}  // namespace fricobs
