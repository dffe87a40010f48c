#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "padmm/admm.hpp"
#include "padmm/io.hpp"
#include "padmm/mri.hpp"
#include "padmm/pdhgm.hpp"
#include "padmm/phantom.hpp"

namespace padmm::harness {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline constexpr const char* version = "padmm 0.1.0";

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct PhantomConfig {
  std::size_t size = 190;
  std::size_t coils = 8;
  std::uint64_t coil_seed = 7;
  double coil_width = 1.0;
  double ring_radius = 0.45;
  double phase_slope = 0.5;
};

struct SolverSection {
  std::string algorithm = "admm";  // admm | pdhgm
  double delta = 1.0;
  double theta = 0.99;
  int iterations = 1500;
  double power_iter_tol = 1e-6;
  int power_iter_max = 500;
  std::uint64_t seed = 0;
};

// lambda_scale multiplies every lambda_j before use. It converts data-term
// weights quoted for an unnormalized k-space convention to the unitary DFT
// used here; alpha weights are used as given.
struct WeightsSection {
  std::vector<double> lambda{0.0621};  // one value for all coils, or one per coil
  double alpha0 = 0.062;
  std::vector<double> alpha{0.9317};
  double lambda_scale = 1.0;
  mri::TvMode tv = mri::TvMode::isotropic;

  std::vector<double> lambda_for(std::size_t n) const { return expand(lambda, n, "lambda", lambda_scale); }
  std::vector<double> alpha_for(std::size_t n) const { return expand(alpha, n, "alpha", 1.0); }

 private:
  static std::vector<double> expand(const std::vector<double>& w, std::size_t n, const char* name,
                                    double scale) {
    if (w.size() != 1 && w.size() != n) {
      throw ConfigError(std::string("weights.") + name + ": need 1 or " + std::to_string(n) + " values");
    }
    std::vector<double> out(n, w.front());
    if (w.size() == n) out = w;
    for (auto& x : out) x *= scale;
    return out;
  }
};

struct ExperimentConfig {
  PhantomConfig phantom;
  phantom::SamplingSpec sampling;
  SolverSection solver;
  WeightsSection weights;
  std::string output = "out";

  void validate() const {
    if (phantom.size < 2) throw ConfigError("phantom.size must be >= 2");
    if (phantom.coils == 0) throw ConfigError("phantom.coils must be >= 1");
    if (!(phantom.coil_width > 0.0)) throw ConfigError("phantom.coil_width must be > 0");
    if (!(sampling.fraction > 0.0 && sampling.fraction <= 1.0)) {
      throw ConfigError("sampling.fraction must lie in (0, 1]");
    }
    if (!(sampling.sigma >= 0.0)) throw ConfigError("sampling.sigma must be >= 0");
    if (!(sampling.turns > 0.0)) throw ConfigError("sampling.turns must be > 0");
    if (solver.algorithm != "admm" && solver.algorithm != "pdhgm") {
      throw ConfigError("solver.algorithm must be 'admm' or 'pdhgm'");
    }
    try {
      solver_config().validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("solver: ") + e.what());
    }
    for (double l : weights.lambda_for(phantom.coils)) {
      if (!(l >= 0.0)) throw ConfigError("weights.lambda must be >= 0");
    }
    for (double a : weights.alpha_for(phantom.coils)) {
      if (!(a >= 0.0)) throw ConfigError("weights.alpha must be >= 0");
    }
    if (!(weights.alpha0 >= 0.0)) throw ConfigError("weights.alpha0 must be >= 0");
    if (!(weights.lambda_scale > 0.0)) throw ConfigError("weights.lambda_scale must be > 0");
  }

  SolverConfig solver_config() const {
    SolverConfig c;
    c.delta = solver.delta;
    c.theta = solver.theta;
    c.max_iterations = solver.iterations;
    c.power_iter_tol = solver.power_iter_tol;
    c.power_iter_max = solver.power_iter_max;
    c.seed = solver.seed;
    // d_v F = -I for the coil model, so tau2 = 1/delta.
    c.tau2 = 1.0 / solver.delta;
    return c;
  }
};

namespace detail {

inline void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

inline void read_weights(const json& j, const char* key, std::vector<double>& out) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (v.is_number()) {
    out = {v.get<double>()};
  } else if (v.is_array() && !v.empty() && std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); })) {
    out = v.get<std::vector<double>>();
  } else {
    throw ConfigError(std::string("weights.") + key + ": expected a number or a non-empty array");
  }
}

inline json weights_json(const std::vector<double>& w) {
  return w.size() == 1 ? json(w.front()) : json(w);
}

}  // namespace detail

inline ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  detail::reject_unknown(j, {"phantom", "sampling", "solver", "weights", "output"}, "config");
  if (j.contains("phantom")) {
    const auto& p = j["phantom"];
    detail::reject_unknown(p, {"size", "coils", "coil_seed", "coil_width", "ring_radius", "phase_slope"},
                           "phantom");
    detail::read(p, "size", c.phantom.size, "phantom");
    detail::read(p, "coils", c.phantom.coils, "phantom");
    detail::read(p, "coil_seed", c.phantom.coil_seed, "phantom");
    detail::read(p, "coil_width", c.phantom.coil_width, "phantom");
    detail::read(p, "ring_radius", c.phantom.ring_radius, "phantom");
    detail::read(p, "phase_slope", c.phantom.phase_slope, "phantom");
  }
  if (j.contains("sampling")) {
    const auto& s = j["sampling"];
    detail::reject_unknown(s, {"fraction", "turns", "tolerance", "sigma", "seed"}, "sampling");
    detail::read(s, "fraction", c.sampling.fraction, "sampling");
    detail::read(s, "turns", c.sampling.turns, "sampling");
    detail::read(s, "tolerance", c.sampling.tolerance, "sampling");
    detail::read(s, "sigma", c.sampling.sigma, "sampling");
    detail::read(s, "seed", c.sampling.seed, "sampling");
  }
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    detail::reject_unknown(s, {"algorithm", "delta", "theta", "iterations", "power_iter_tol",
                               "power_iter_max", "seed"},
                           "solver");
    detail::read(s, "algorithm", c.solver.algorithm, "solver");
    detail::read(s, "delta", c.solver.delta, "solver");
    detail::read(s, "theta", c.solver.theta, "solver");
    detail::read(s, "iterations", c.solver.iterations, "solver");
    detail::read(s, "power_iter_tol", c.solver.power_iter_tol, "solver");
    detail::read(s, "power_iter_max", c.solver.power_iter_max, "solver");
    detail::read(s, "seed", c.solver.seed, "solver");
  }
  if (j.contains("weights")) {
    const auto& w = j["weights"];
    detail::reject_unknown(w, {"lambda", "alpha0", "alpha", "lambda_scale", "tv"}, "weights");
    detail::read_weights(w, "lambda", c.weights.lambda);
    detail::read_weights(w, "alpha", c.weights.alpha);
    detail::read(w, "alpha0", c.weights.alpha0, "weights");
    detail::read(w, "lambda_scale", c.weights.lambda_scale, "weights");
    std::string tv = "isotropic";
    detail::read(w, "tv", tv, "weights");
    if (tv == "isotropic") {
      c.weights.tv = mri::TvMode::isotropic;
    } else if (tv == "global") {
      c.weights.tv = mri::TvMode::global;
    } else {
      throw ConfigError("weights.tv must be 'isotropic' or 'global'");
    }
  }
  detail::read(j, "output", c.output, "config");
  c.validate();
  return c;
}

inline json config_to_json(const ExperimentConfig& c) {
  return {
      {"phantom",
       {{"size", c.phantom.size},
        {"coils", c.phantom.coils},
        {"coil_seed", c.phantom.coil_seed},
        {"coil_width", c.phantom.coil_width},
        {"ring_radius", c.phantom.ring_radius},
        {"phase_slope", c.phantom.phase_slope}}},
      {"sampling",
       {{"fraction", c.sampling.fraction},
        {"turns", c.sampling.turns},
        {"tolerance", c.sampling.tolerance},
        {"sigma", c.sampling.sigma},
        {"seed", c.sampling.seed}}},
      {"solver",
       {{"algorithm", c.solver.algorithm},
        {"delta", c.solver.delta},
        {"theta", c.solver.theta},
        {"iterations", c.solver.iterations},
        {"power_iter_tol", c.solver.power_iter_tol},
        {"power_iter_max", c.solver.power_iter_max},
        {"seed", c.solver.seed}}},
      {"weights",
       {{"lambda", detail::weights_json(c.weights.lambda)},
        {"alpha0", c.weights.alpha0},
        {"alpha", detail::weights_json(c.weights.alpha)},
        {"lambda_scale", c.weights.lambda_scale},
        {"tv", c.weights.tv == mri::TvMode::isotropic ? "isotropic" : "global"}}},
      {"output", c.output},
  };
}

struct Dataset {
  ComplexField mask;
  std::vector<ComplexField> data;  // S^T f_j
  std::optional<ComplexField> phantom;
  std::vector<ComplexField> coils;  // ground truth, empty if unknown
  json meta = json::object();

  std::size_t coil_count() const noexcept { return data.size(); }
  std::size_t width() const noexcept { return mask.width(); }
  std::size_t height() const noexcept { return mask.height(); }

  void validate() const {
    if (data.empty()) throw ConfigError("dataset: no coil data");
    check_binary_mask(mask);
    for (const auto& f : data) mask.check_shape(f);
    if (phantom) mask.check_shape(*phantom);
    if (!coils.empty() && coils.size() != data.size()) {
      throw ConfigError("dataset: coil map count does not match coil data");
    }
    for (const auto& c : coils) mask.check_shape(c);
  }
};

inline Dataset simulate(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.phantom.size;
  Dataset d;
  d.phantom = phantom::build_phantom(phantom::brain_phantom(n));
  phantom::CoilSpec cs;
  cs.count = cfg.phantom.coils;
  cs.seed = cfg.phantom.coil_seed;
  cs.width = cfg.phantom.coil_width;
  cs.ring_radius = cfg.phantom.ring_radius;
  cs.phase_slope = cfg.phantom.phase_slope;
  d.coils = phantom::make_coil_maps(cs, n, n);
  auto sm = phantom::spiral_mask(cfg.sampling, n, n);
  d.mask = sm.mask;
  d.data = phantom::simulate_kspace(*d.phantom, d.coils, d.mask, cfg.sampling.sigma, cfg.sampling.seed);
  d.meta = {
      {"kind", "dataset"},
      {"coils", cs.count},
      {"width", n},
      {"height", n},
      {"sigma", cfg.sampling.sigma},
      {"noise_seed", cfg.sampling.seed},
      {"coil_seed", cs.seed},
      {"target_fraction", cfg.sampling.fraction},
      {"sampled_fraction", sm.fraction},
      {"spiral_turns", cfg.sampling.turns},
      {"spiral_thickness", sm.thickness},
      {"version", version},
  };
  return d;
}

inline io::Container to_container(const Dataset& d) {
  io::Container c;
  c.meta = d.meta;
  c.add("mask", d.mask);
  for (std::size_t j = 0; j < d.data.size(); ++j) c.add("f" + std::to_string(j + 1), d.data[j]);
  if (d.phantom) c.add("phantom", *d.phantom);
  for (std::size_t j = 0; j < d.coils.size(); ++j) c.add("coil" + std::to_string(j + 1), d.coils[j]);
  return c;
}

inline Dataset dataset_from_container(const io::Container& c) {
  if (c.meta.value("kind", "") != "dataset") throw ConfigError("container is not a dataset");
  Dataset d;
  d.meta = c.meta;
  d.mask = c.get("mask");
  for (std::size_t j = 1; c.has("f" + std::to_string(j)); ++j) d.data.push_back(c.get("f" + std::to_string(j)));
  if (c.has("phantom")) d.phantom = c.get("phantom");
  for (std::size_t j = 1; c.has("coil" + std::to_string(j)); ++j) {
    d.coils.push_back(c.get("coil" + std::to_string(j)));
  }
  d.validate();
  return d;
}

/// Mean of the zero-filled inverse transforms, (1/n) sum_j idft2(S^T f_j).
inline ComplexField zero_fill_baseline(const Dataset& d) {
  d.validate();
  ComplexField out(d.width(), d.height());
  for (const auto& f : d.data) out.axpy(1.0 / static_cast<double>(d.coil_count()), idft2(f));
  return out;
}

/// PSNR of modulus images with the peak taken from the truth:
/// 10 log10(max|truth|^2 / mean(|recon| - |truth|)^2). Identical moduli give
/// +infinity. Swapping the arguments keeps the MSE but not the peak.
inline double psnr(const ComplexField& recon, const ComplexField& truth) {
  truth.check_shape(recon);
  if (truth.size() == 0) throw ShapeError("psnr: empty images");
  double mse = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double d = std::abs(recon[i]) - std::abs(truth[i]);
    mse += d * d;
  }
  mse /= static_cast<double>(truth.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  const double peak = max_abs(truth);
  return 10.0 * std::log10(peak * peak / mse);
}

inline mri::MriProblem make_problem(const Dataset& d, const ExperimentConfig& cfg) {
  const std::size_t n = d.coil_count();
  mri::MriProblem p{d.mask, d.data, cfg.weights.lambda_for(n), cfg.weights.alpha0,
                    cfg.weights.alpha_for(n), cfg.weights.tv};
  p.validate();
  return p;
}

struct Reconstruction {
  BlockVector u;  // (u_0, c_1..c_n)
  ConvergenceReport report;
  std::string algorithm;
};

/// Runs the selected solver from u_j = 1, v = mu = 0. The pdhgm path takes one
/// ADMM step and continues with the dual-first iteration; both count primal
/// updates, so equal iteration counts give the same final u up to rounding.
inline Reconstruction reconstruct(const Dataset& d, const ExperimentConfig& cfg,
                                  const IterationCallback& callback = {}) {
  cfg.validate();
  d.validate();
  const auto problem = make_problem(d, cfg);
  const auto f = mri::assemble_constraint(problem);
  const auto prox_j = mri::assemble_prox_j(problem);
  const auto prox_h = mri::assemble_prox_h(problem);
  const SolverConfig sc = cfg.solver_config();
  SolverState init = make_initial_state(mri::initial_u(f), f.v_layout(), f.v_layout());

  Reconstruction out;
  out.algorithm = cfg.solver.algorithm;
  if (cfg.solver.algorithm == "admm" || sc.max_iterations == 0) {
    auto r = run_admm(std::move(init), f, prox_h, prox_j, sc, callback);
    out.u = std::move(r.state.u);
    out.report = std::move(r.report);
    return out;
  }

  const auto start = std::chrono::steady_clock::now();
  ConvergenceReport report;
  SolverState first = init;
  PdhgmState state;
  try {
    admm_advance(first, f, prox_h, prox_j, sc);
    if (callback) callback(first);
  } catch (const SolverAbort& e) {
    report.status = ConvergenceReport::Status::aborted;
    report.message = e.what();
  }
  state = pdhgm_after_first_admm_step(init, first);
  const auto sep = make_separable(f, f.v_layout());
  for (int it = 1; it < sc.max_iterations && report.status != ConvergenceReport::Status::aborted; ++it) {
    try {
      pdhgm_advance(state, sep, prox_h, prox_j, sc);
    } catch (const SolverAbort& e) {
      report.status = ConvergenceReport::Status::aborted;
      report.message = e.what();
    }
  }
  report.iterations = state.k;
  report.history = state.history;
  report.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  out.u = std::move(state.u);
  out.report = std::move(report);
  return out;
}

inline json residual_curve(const ConvergenceReport& r) {
  json a = json::array();
  for (const auto& rec : r.history) a.push_back(rec.residual);
  return a;
}

inline io::Container to_container(const Reconstruction& r, const ExperimentConfig& cfg) {
  io::Container c;
  c.meta = {
      {"kind", "record"},
      {"algorithm", r.algorithm},
      {"status", to_string(r.report.status)},
      {"message", r.report.message},
      {"iterations", r.report.iterations},
      {"final_residual", r.report.final_residual()},
      {"wall_ms", r.report.wall_ms},
      {"residuals", residual_curve(r.report)},
      {"config", config_to_json(cfg)},
      {"version", version},
  };
  c.add("u0", r.u.field(0));
  for (std::size_t j = 1; j < r.u.size(); ++j) c.add("c" + std::to_string(j), r.u.field(j));
  return c;
}

struct Metrics {
  double psnr_recon_db = 0.0;
  double psnr_zerofill_db = 0.0;
  double final_residual = 0.0;
  int iterations = 0;
  double wall_ms = 0.0;
  std::string status;
  std::vector<double> residuals;
};

inline Metrics evaluate(const Dataset& d, const io::Container& record) {
  if (record.meta.value("kind", "") != "record") throw ConfigError("container is not a reconstruction record");
  if (!d.phantom) throw ConfigError("dataset has no ground truth; cannot compute PSNR");
  const auto& u0 = record.get("u0");
  Metrics m;
  m.psnr_recon_db = psnr(u0, *d.phantom);
  m.psnr_zerofill_db = psnr(zero_fill_baseline(d), *d.phantom);
  m.final_residual = record.meta.at("final_residual").get<double>();
  m.iterations = record.meta.at("iterations").get<int>();
  m.wall_ms = record.meta.at("wall_ms").get<double>();
  m.status = record.meta.at("status").get<std::string>();
  m.residuals = record.meta.at("residuals").get<std::vector<double>>();
  return m;
}

namespace detail {
inline ordered_json db_value(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}
}  // namespace detail

/// Machine-readable report with a fixed field order. Infinite PSNR is written
/// as the string "inf".
inline std::string metrics_json(const Metrics& m) {
  ordered_json j;
  j["psnr_recon_db"] = detail::db_value(m.psnr_recon_db);
  j["psnr_zerofill_db"] = detail::db_value(m.psnr_zerofill_db);
  j["final_residual"] = m.final_residual;
  j["iterations"] = m.iterations;
  j["wall_ms"] = m.wall_ms;
  j["status"] = m.status;
  j["residuals"] = m.residuals;
  return j.dump(2) + "\n";
}

}  // namespace padmm::harness
