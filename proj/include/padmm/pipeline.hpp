#pragma once

#include <filesystem>
#include <string>

#include "padmm/experiment.hpp"

// File-level steps behind the command line tool. Every step writes its outputs
// atomically into an output directory.
namespace padmm::pipeline {

namespace fs = std::filesystem;
using harness::ExperimentConfig;

inline constexpr const char* dataset_file = "dataset.padmm";
inline constexpr const char* record_file = "record.padmm";
inline constexpr const char* baseline_file = "baseline.padmm";
inline constexpr const char* metrics_file = "metrics.json";

inline ExperimentConfig load_config(const fs::path& path) {
  harness::json j;
  try {
    j = harness::json::parse(io::read_file(path));
  } catch (const harness::json::exception& e) {
    throw harness::ConfigError("config " + path.string() + ": " + e.what());
  }
  return harness::config_from_json(j);
}

inline harness::Dataset load_dataset(const fs::path& path) {
  return harness::dataset_from_container(io::read_container(path));
}

inline double display_peak(const harness::Dataset& d) { return d.phantom ? max_abs(*d.phantom) : 0.0; }

inline fs::path simulate(const ExperimentConfig& cfg, const fs::path& out) {
  const auto d = harness::simulate(cfg);
  const auto path = out / dataset_file;
  io::write_container(path, harness::to_container(d));
  if (d.phantom) io::write_pgm(out / "phantom.pgm", *d.phantom);
  io::write_pgm(out / "mask.pgm", d.mask, 1.0);
  return path;
}

/// Returns the reconstruction; the record is written even when the solver
/// aborted, holding the last finite iterate.
inline harness::Reconstruction reconstruct(const ExperimentConfig& cfg, const fs::path& dataset,
                                           const fs::path& out) {
  const auto d = load_dataset(dataset);
  auto r = harness::reconstruct(d, cfg);
  io::write_container(out / record_file, harness::to_container(r, cfg));
  const double peak = display_peak(d);
  io::write_pgm(out / "recon.pgm", r.u.field(0), peak);
  for (std::size_t j = 1; j < r.u.size(); ++j) {
    io::write_pgm(out / ("coil" + std::to_string(j) + ".pgm"), r.u.field(j));
  }
  return r;
}

inline fs::path baseline(const fs::path& dataset, const fs::path& out) {
  const auto d = load_dataset(dataset);
  const auto zf = harness::zero_fill_baseline(d);
  io::Container c;
  c.meta = {{"kind", "baseline"}, {"method", "zero_fill_mean"}, {"version", harness::version}};
  c.add("zero_fill", zf);
  const auto path = out / baseline_file;
  io::write_container(path, c);
  io::write_pgm(out / "zerofill.pgm", zf, display_peak(d));
  return path;
}

inline harness::Metrics evaluate(const fs::path& dataset, const fs::path& record, const fs::path& out) {
  const auto d = load_dataset(dataset);
  const auto rec = io::read_container(record);
  const auto m = harness::evaluate(d, rec);
  io::write_file_atomic(out / metrics_file, harness::metrics_json(m));
  const double peak = display_peak(d);
  io::write_pgm(out / "recon.pgm", rec.get("u0"), peak);
  io::write_pgm(out / "zerofill.pgm", harness::zero_fill_baseline(d), peak);
  return m;
}

/// ADMM against the dual-first scheme on the configured dataset.
inline EquivalenceResult equivalence(const ExperimentConfig& cfg, int iterations, const fs::path& out) {
  const auto d = harness::simulate(cfg);
  const auto problem = harness::make_problem(d, cfg);
  const auto f = mri::assemble_constraint(problem);
  const auto init = make_initial_state(mri::initial_u(f), f.v_layout(), f.v_layout());
  const auto r = equivalence_check(f, mri::assemble_prox_h(problem), mri::assemble_prox_j(problem), init,
                                   cfg.solver_config(), iterations);
  harness::ordered_json j;
  j["iterations"] = r.iterations;
  j["max_u_deviation"] = r.max_u_deviation;
  j["max_mu_deviation"] = r.max_mu_deviation;
  io::write_file_atomic(out / "equivalence.json", j.dump(2) + "\n");
  return r;
}

}  // namespace padmm::pipeline
