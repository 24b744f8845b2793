#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "hopfdbc/bvp.hpp"
#include "hopfdbc/continuation.hpp"
#include "hopfdbc/fieldsim.hpp"
#include "hopfdbc/spectral.hpp"

namespace hopfdbc {

/// Invalid or unreadable run configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  // kinetics and bulk
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 0.0;
  double sigma = 0.0;
  std::size_t n = default_grid_size;

  // Newton
  double residual_tol = 1e-10;
  int max_iter = 25;

  // continuation
  double r0 = 0.01;
  double r1 = 0.02;
  double ds0 = 5e-3;
  double ds_min = 1e-7;
  double ds_max = 0.1;
  std::size_t max_points = 2000;
  double omega_min = 1e-3;
  double mu_min = -1e300;
  double mu_max = 1e300;
  double r_max = 1e300;

  // stability
  std::string stability_method = "closed_form";  // closed_form | numeric
  int truncation = 64;
  double floquet_r_max = 0.1;

  // simulation
  double sim_mu = 0.05;
  double sim_L = 60.0;
  double sim_dx = 0.05;
  double sim_dt = 0.01;
  double sim_T = 200.0;
  std::string sim_far_bc = "dirichlet_zero";  // dirichlet_zero | neumann_zero
  double sim_u0 = 0.01;
  double sim_perturbation = 0.0;  // amplitude of random bulk perturbation
  int sim_record_every = 1;

  // reconstruction
  long point_index = -1;  // -1: the equilibrium at reconstruct_mu
  double reconstruct_mu = 0.0;
  double x_max = 20.0;
  std::size_t x_points = 201;

  // sweep over gamma
  double gamma_min = -0.1;
  double gamma_max = 0.05;
  std::size_t gamma_points = 16;
  std::size_t sweep_n = 64;
  double fit_r_min = 0.02;
  double fit_r_max = 0.1;
  int threads = 0;  // 0: hardware concurrency

  // files
  std::string input;     // branch CSV read by stability / reconstruct
  std::string profiles;  // profile sidecar (read or written)
  std::string output;    // main output, stdout when empty
  std::string svg;

  std::uint64_t seed = 1;

  void validate() const {
    auto fail = [](const std::string& m) { throw ConfigError("config: " + m); };
    if (!(alpha > 0.0)) fail("kinetics.alpha must be positive");
    if (!(sigma >= 0.0)) fail("sigma must be nonnegative");
    if (!is_power_of_two(n) || n < 8) fail("grid.n must be a power of two >= 8");
    if (!is_power_of_two(sweep_n) || sweep_n < 8) fail("sweep.n must be a power of two >= 8");
    if (!(residual_tol > 0.0) || max_iter < 1) fail("newton settings out of range");
    if (!(r0 > 0.0 && r1 > r0)) fail("continuation needs 0 < r0 < r1");
    if (!(ds_min > 0.0 && ds_min <= ds0 && ds0 <= ds_max)) fail("continuation needs 0 < ds_min <= ds0 <= ds_max");
    if (max_points < 2) fail("continuation.max_points must be at least 2");
    if (!(mu_min < mu_max)) fail("continuation.mu_min must be below mu_max");
    if (stability_method != "closed_form" && stability_method != "numeric") {
      fail("stability.method must be closed_form or numeric");
    }
    if (truncation < 1) fail("stability.truncation must be positive");
    if (!(sim_L > 0.0 && sim_dx > 0.0 && sim_dt > 0.0 && sim_T >= 0.0)) fail("simulation L, dx, dt must be positive");
    if (sim_far_bc != "dirichlet_zero" && sim_far_bc != "neumann_zero") {
      fail("simulation.far_bc must be dirichlet_zero or neumann_zero");
    }
    if (sim_record_every < 1) fail("simulation.record_every must be at least 1");
    if (!(x_max > 0.0) || x_points < 4) fail("reconstruct needs x_max > 0 and at least 4 depths");
    if (gamma_points < 1 || !(gamma_min <= gamma_max)) fail("sweep range is empty");
    if (!(0.0 < fit_r_min && fit_r_min < fit_r_max)) fail("sweep needs 0 < fit_r_min < fit_r_max");
    if (threads < 0) fail("sweep.threads must be nonnegative");
  }

  CubicKinetics kinetics() const { return CubicKinetics(alpha, beta, gamma); }

  NewtonSettings newton() const {
    NewtonSettings s;
    s.residual_tol = residual_tol;
    s.max_iter = max_iter;
    return s;
  }

  ContinuationSettings continuation() const {
    ContinuationSettings s;
    s.ds0 = ds0;
    s.ds_min = ds_min;
    s.ds_max = ds_max;
    s.max_points = max_points;
    s.omega_min = omega_min;
    s.residual_tol = residual_tol;
    if (mu_min > -1e300 || mu_max < 1e300) s.mu_window = std::pair{mu_min, mu_max};
    if (r_max < 1e300) s.r_window = std::pair{0.0, r_max};
    return s;
  }

  SimSettings simulation() const {
    SimSettings s;
    s.L = sim_L;
    s.dx = sim_dx;
    s.dt = sim_dt;
    s.T = sim_T;
    s.far_bc = sim_far_bc == "neumann_zero" ? FarBoundary::neumann_zero : FarBoundary::dirichlet_zero;
    s.record_every = sim_record_every;
    return s;
  }
};

inline void to_json(nlohmann::json& j, const RunConfig& c) {
  j = nlohmann::json{
      {"kinetics", {{"alpha", c.alpha}, {"beta", c.beta}, {"gamma", c.gamma}}},
      {"sigma", c.sigma},
      {"grid", {{"n", c.n}}},
      {"newton", {{"residual_tol", c.residual_tol}, {"max_iter", c.max_iter}}},
      {"continuation",
       {{"r0", c.r0}, {"r1", c.r1}, {"ds0", c.ds0}, {"ds_min", c.ds_min}, {"ds_max", c.ds_max},
        {"max_points", c.max_points}, {"omega_min", c.omega_min}, {"mu_min", c.mu_min}, {"mu_max", c.mu_max},
        {"r_max", c.r_max}}},
      {"stability", {{"method", c.stability_method}, {"truncation", c.truncation}, {"r_max", c.floquet_r_max}}},
      {"simulation",
       {{"mu", c.sim_mu}, {"L", c.sim_L}, {"dx", c.sim_dx}, {"dt", c.sim_dt}, {"T", c.sim_T},
        {"far_bc", c.sim_far_bc}, {"u0", c.sim_u0}, {"perturbation", c.sim_perturbation},
        {"record_every", c.sim_record_every}}},
      {"reconstruct",
       {{"index", c.point_index}, {"mu", c.reconstruct_mu}, {"x_max", c.x_max}, {"x_points", c.x_points}}},
      {"sweep",
       {{"gamma_min", c.gamma_min}, {"gamma_max", c.gamma_max}, {"points", c.gamma_points}, {"n", c.sweep_n},
        {"fit_r_min", c.fit_r_min}, {"fit_r_max", c.fit_r_max}, {"threads", c.threads}}},
      {"files", {{"input", c.input}, {"profiles", c.profiles}, {"output", c.output}, {"svg", c.svg}}},
      {"seed", c.seed},
  };
}

namespace detail {

template <class T>
void read_field(const nlohmann::json& obj, const char* key, T& field, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    field = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: bad value for " + where + key + ": " + e.what());
  }
}

inline void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> keys, const std::string& where) {
  if (!obj.is_object()) throw ConfigError("config: " + (where.empty() ? std::string("document") : where) + " must be an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : keys) known = known || item.key() == k;
    if (!known) throw ConfigError("config: unknown key " + where + item.key());
  }
}

}  // namespace detail

inline void from_json(const nlohmann::json& j, RunConfig& c) {
  using detail::read_field;
  using detail::reject_unknown;
  reject_unknown(j, {"kinetics", "sigma", "grid", "newton", "continuation", "stability", "simulation", "reconstruct",
                     "sweep", "files", "seed"},
                 "");
  read_field(j, "sigma", c.sigma, "");
  read_field(j, "seed", c.seed, "");
  if (j.contains("kinetics")) {
    const auto& k = j["kinetics"];
    reject_unknown(k, {"alpha", "beta", "gamma"}, "kinetics.");
    read_field(k, "alpha", c.alpha, "kinetics.");
    read_field(k, "beta", c.beta, "kinetics.");
    read_field(k, "gamma", c.gamma, "kinetics.");
  }
  if (j.contains("grid")) {
    reject_unknown(j["grid"], {"n"}, "grid.");
    read_field(j["grid"], "n", c.n, "grid.");
  }
  if (j.contains("newton")) {
    const auto& s = j["newton"];
    reject_unknown(s, {"residual_tol", "max_iter"}, "newton.");
    read_field(s, "residual_tol", c.residual_tol, "newton.");
    read_field(s, "max_iter", c.max_iter, "newton.");
  }
  if (j.contains("continuation")) {
    const auto& s = j["continuation"];
    const std::string w = "continuation.";
    reject_unknown(s, {"r0", "r1", "ds0", "ds_min", "ds_max", "max_points", "omega_min", "mu_min", "mu_max", "r_max"}, w);
    read_field(s, "r0", c.r0, w);
    read_field(s, "r1", c.r1, w);
    read_field(s, "ds0", c.ds0, w);
    read_field(s, "ds_min", c.ds_min, w);
    read_field(s, "ds_max", c.ds_max, w);
    read_field(s, "max_points", c.max_points, w);
    read_field(s, "omega_min", c.omega_min, w);
    read_field(s, "mu_min", c.mu_min, w);
    read_field(s, "mu_max", c.mu_max, w);
    read_field(s, "r_max", c.r_max, w);
  }
  if (j.contains("stability")) {
    const auto& s = j["stability"];
    reject_unknown(s, {"method", "truncation", "r_max"}, "stability.");
    read_field(s, "method", c.stability_method, "stability.");
    read_field(s, "truncation", c.truncation, "stability.");
    read_field(s, "r_max", c.floquet_r_max, "stability.");
  }
  if (j.contains("simulation")) {
    const auto& s = j["simulation"];
    const std::string w = "simulation.";
    reject_unknown(s, {"mu", "L", "dx", "dt", "T", "far_bc", "u0", "perturbation", "record_every"}, w);
    read_field(s, "mu", c.sim_mu, w);
    read_field(s, "L", c.sim_L, w);
    read_field(s, "dx", c.sim_dx, w);
    read_field(s, "dt", c.sim_dt, w);
    read_field(s, "T", c.sim_T, w);
    read_field(s, "far_bc", c.sim_far_bc, w);
    read_field(s, "u0", c.sim_u0, w);
    read_field(s, "perturbation", c.sim_perturbation, w);
    read_field(s, "record_every", c.sim_record_every, w);
  }
  if (j.contains("reconstruct")) {
    const auto& s = j["reconstruct"];
    reject_unknown(s, {"index", "mu", "x_max", "x_points"}, "reconstruct.");
    read_field(s, "index", c.point_index, "reconstruct.");
    read_field(s, "mu", c.reconstruct_mu, "reconstruct.");
    read_field(s, "x_max", c.x_max, "reconstruct.");
    read_field(s, "x_points", c.x_points, "reconstruct.");
  }
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    const std::string w = "sweep.";
    reject_unknown(s, {"gamma_min", "gamma_max", "points", "n", "fit_r_min", "fit_r_max", "threads"}, w);
    read_field(s, "gamma_min", c.gamma_min, w);
    read_field(s, "gamma_max", c.gamma_max, w);
    read_field(s, "points", c.gamma_points, w);
    read_field(s, "n", c.sweep_n, w);
    read_field(s, "fit_r_min", c.fit_r_min, w);
    read_field(s, "fit_r_max", c.fit_r_max, w);
    read_field(s, "threads", c.threads, w);
  }
  if (j.contains("files")) {
    const auto& s = j["files"];
    reject_unknown(s, {"input", "profiles", "output", "svg"}, "files.");
    read_field(s, "input", c.input, "files.");
    read_field(s, "profiles", c.profiles, "files.");
    read_field(s, "output", c.output, "files.");
    read_field(s, "svg", c.svg, "files.");
  }
}

inline RunConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  RunConfig c = j.get<RunConfig>();
  c.validate();
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

/// 64-bit FNV-1a of the canonical JSON dump (keys sorted), as 16 hex digits.
inline std::string config_hash(const RunConfig& c) {
  const std::string text = nlohmann::json(c).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

}  // namespace hopfdbc
