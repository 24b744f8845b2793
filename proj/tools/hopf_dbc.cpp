// hopf-dbc: command-line driver for Hopf analysis, branch continuation,
// stability, simulation and field reconstruction of the cubic boundary kinetics.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "hopfdbc/hopfdbc.hpp"

using namespace hopfdbc;
using nlohmann::json;

namespace {

enum ExitCode { ok = 0, config_error = 2, numerical_failure = 3, assumption_failure = 4 };

/// Flag values given on the command line; each overrides the config file.
struct Overrides {
  std::string config_path;
  std::optional<double> alpha, beta, gamma, sigma;
  std::optional<std::size_t> n;
  std::optional<double> residual_tol;
  std::optional<int> max_iter;
  std::optional<double> r0, r1, ds0, ds_min, ds_max, omega_min, mu_min, mu_max, r_max;
  std::optional<std::size_t> max_points;
  std::optional<std::string> method;
  std::optional<int> truncation;
  std::optional<double> floquet_r_max;
  std::optional<double> mu, L, dx, dt, T, u0, perturbation;
  std::optional<std::string> far_bc;
  std::optional<int> record_every;
  std::optional<long> index;
  std::optional<double> x_max;
  std::optional<std::size_t> x_points;
  std::optional<double> gamma_min, gamma_max, fit_r_min, fit_r_max;
  std::optional<std::size_t> gamma_points, sweep_n;
  std::optional<int> threads;
  std::optional<std::string> input, profiles, output, svg;
  std::optional<std::uint64_t> seed;
  bool dump_config = false;
};

template <class T, class U>
void apply(const std::optional<T>& o, U& field) {
  if (o) field = *o;
}

RunConfig effective_config(const Overrides& o, const std::string& command) {
  RunConfig c;
  if (!o.config_path.empty()) c = load_config(o.config_path);
  apply(o.alpha, c.alpha);
  apply(o.beta, c.beta);
  apply(o.gamma, c.gamma);
  apply(o.sigma, c.sigma);
  apply(o.n, c.n);
  apply(o.residual_tol, c.residual_tol);
  apply(o.max_iter, c.max_iter);
  apply(o.r0, c.r0);
  apply(o.r1, c.r1);
  apply(o.ds0, c.ds0);
  apply(o.ds_min, c.ds_min);
  apply(o.ds_max, c.ds_max);
  apply(o.max_points, c.max_points);
  apply(o.omega_min, c.omega_min);
  apply(o.mu_min, c.mu_min);
  apply(o.mu_max, c.mu_max);
  apply(o.r_max, c.r_max);
  apply(o.method, c.stability_method);
  apply(o.truncation, c.truncation);
  apply(o.floquet_r_max, c.floquet_r_max);
  if (o.mu) (command == "reconstruct" ? c.reconstruct_mu : c.sim_mu) = *o.mu;
  apply(o.L, c.sim_L);
  apply(o.dx, c.sim_dx);
  apply(o.dt, c.sim_dt);
  apply(o.T, c.sim_T);
  apply(o.far_bc, c.sim_far_bc);
  apply(o.u0, c.sim_u0);
  apply(o.perturbation, c.sim_perturbation);
  apply(o.record_every, c.sim_record_every);
  apply(o.index, c.point_index);
  apply(o.x_max, c.x_max);
  apply(o.x_points, c.x_points);
  apply(o.gamma_min, c.gamma_min);
  apply(o.gamma_max, c.gamma_max);
  apply(o.gamma_points, c.gamma_points);
  apply(o.sweep_n, c.sweep_n);
  apply(o.fit_r_min, c.fit_r_min);
  apply(o.fit_r_max, c.fit_r_max);
  apply(o.threads, c.threads);
  apply(o.input, c.input);
  apply(o.profiles, c.profiles);
  apply(o.output, c.output);
  apply(o.svg, c.svg);
  apply(o.seed, c.seed);
  c.validate();
  return c;
}

/// Output stream for a path, standard output when the path is empty.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ConfigError("cannot open output file " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::ifstream open_input(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string("missing ") + what + " file (--" + what + ")");
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return in;
}

json document(const RunConfig& c, const std::string& command) {
  return json{{"schema", 1}, {"command", command}, {"config_hash", config_hash(c)}};
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

void print_json(const json& j, std::ostream& out) { out << j.dump(2) << '\n'; }

int cmd_hopf(const RunConfig& c) {
  const CubicKinetics k = c.kinetics();
  const HopfPoint h = cubic_hopf(k, c.sigma);
  const AssumptionReport rep = check_assumptions(h, k);
  json j = document(c, "hopf");
  j["omega_star"] = h.omega_star;
  j["mu_star"] = h.mu_star;
  j["sigma"] = h.sigma_star;
  j["crossing"] = h.crossing;
  j["assumptions"] = {{"root_ok", rep.root_ok},
                      {"uniqueness_ok", rep.uniqueness_ok},
                      {"simple_ok", rep.simple_ok},
                      {"crossing_ok", rep.crossing_ok},
                      {"root_residual", rep.root_residual},
                      {"min_off_root", finite_or_null(rep.min_off_root)}};
  Sink sink(c.output);
  print_json(j, sink.stream());
  return rep.all() ? ok : assumption_failure;
}

int cmd_expand(const RunConfig& c) {
  const ExpansionCoefficients e = expansion(c.kinetics(), c.sigma);
  json j = document(c, "expand");
  j["alpha"] = e.alpha;
  j["beta"] = e.beta;
  j["gamma"] = e.gamma;
  j["sigma"] = e.sigma;
  j["omega_star"] = e.omega_star;
  j["mu2"] = e.mu2;
  j["omega2"] = e.omega2;
  j["uinf2"] = e.uinf2;
  j["gamma_crit"] = e.gamma_crit;
  j["v20"] = e.v20;
  j["v22_re"] = e.v22.real();
  j["v22_im"] = e.v22.imag();
  j["M_re"] = e.bigM.real();
  j["M_im"] = e.bigM.imag();
  j["lambda0"] = {e.lambda0.real(), e.lambda0.imag()};
  j["lambda2"] = {e.lambda2.real(), e.lambda2.imag()};
  j["lambda1_mu"] = {e.lambda1_mu.real(), e.lambda1_mu.imag()};
  j["lambda1_omega"] = {e.lambda1_omega.real(), e.lambda1_omega.imag()};
  j["criticality"] = std::abs(e.mu2) <= 1e-10 ? "degenerate" : (e.mu2 > 0.0 ? "super" : "sub");
  if (e.sigma == 0.0) {
    const auto cf = mu2_omega2_sigma0(e.alpha, e.beta, e.gamma);
    j["closed_form"] = {{"mu2", cf.mu2}, {"omega2", cf.omega2}, {"uinf2", cf.uinf2}};
    j["lambda1_coefficient"] = leading_eigenvalue(reduced_coeffs(e.alpha, e.beta, e.gamma));
  }
  Sink sink(c.output);
  print_json(j, sink.stream());
  return ok;
}

int cmd_continue(const RunConfig& c) {
  const CubicKinetics k = c.kinetics();
  const ExpansionCoefficients e = expansion(k, c.sigma);
  const auto seeds = seed_branch(k, e, c.r0, c.r1, c.n, c.residual_tol);
  const Branch b = continue_branch(k, seeds, c.continuation());
  const std::string hash = config_hash(c);
  {
    Sink sink(c.output);
    write_branch_csv(sink.stream(), b, hash);
  }
  if (!c.profiles.empty()) {
    Sink sink(c.profiles);
    write_profiles_csv(sink.stream(), b, hash);
  }
  if (!c.svg.empty()) {
    Sink sink(c.svg);
    char title[160];
    std::snprintf(title, sizeof title, "alpha=%g beta=%g gamma=%g sigma=%g  config %s", c.alpha, c.beta, c.gamma,
                  c.sigma, hash.c_str());
    write_branch_svg(sink.stream(), b, e.mu_star, e.mu2, title);
  }
  std::cerr << "hopf-dbc continue: " << b.points.size() << " points, termination " << to_string(b.termination) << '\n';
  return ok;
}

int cmd_stability(const RunConfig& c) {
  const CubicKinetics k = c.kinetics();
  auto in = open_input(c.input, "input");
  Branch b = read_branch_csv(in);
  const ExpansionCoefficients e = expansion(k, c.sigma);
  if (c.stability_method == "numeric") {
    if (c.sigma != 0.0) throw ConfigError("numeric Floquet stability is only available for sigma = 0");
    auto pin = open_input(c.profiles, "profiles");
    attach_profiles(b, read_profiles_csv(pin), k, c.sigma);
    FloquetSettings fs;
    fs.truncation = c.truncation;
    for (auto& p : b.points) {
      p.stability = Stability::unknown;
      p.lambda1.reset();
      if (p.r > c.floquet_r_max || p.r < 1e-6) continue;
      try {
        const FloquetResult f = floquet_numeric(p, k, closed_form_window(e, p.r), fs);
        p.stability = classify(f);
        if (const auto l = leading_nonzero(f)) p.lambda1 = l->real();
      } catch (const NumericalError& err) {
        std::cerr << "hopf-dbc stability: point at mu=" << p.mu << ": " << err.what() << '\n';
      }
    }
  } else {
    for (auto& p : b.points) {
      double l1 = std::numeric_limits<double>::quiet_NaN();
      p.stability = classify(p, e, 1e-6, &l1);
      if (std::isfinite(l1)) {
        p.lambda1 = l1;
      } else {
        p.lambda1.reset();
      }
    }
  }
  Sink sink(c.output);
  write_branch_csv(sink.stream(), b, config_hash(c));
  return ok;
}

int cmd_simulate(const RunConfig& c) {
  const CubicKinetics k = c.kinetics();
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double coeff[4];
  for (double& a : coeff) a = unit(rng);
  SimInit init;
  init.u_minus = c.sim_u0;
  init.bulk = [&](double x) {
    double wiggle = 0.0;
    for (int m = 0; m < 4; ++m) wiggle += coeff[m] * std::sin((m + 1) * x);
    return std::exp(-x) * (c.sim_u0 + c.sim_perturbation * wiggle);
  };
  const Trajectory tr = simulate(k, c.sim_mu, c.sigma, c.simulation(), init);
  const std::string hash = config_hash(c);
  {
    Sink sink(c.output);
    auto& out = sink.stream();
    out << "# config-hash: " << hash << "\nt,u_minus,flux\n";
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
      out << detail::fmt_double(tr.t[i]) << ',' << detail::fmt_double(tr.u_minus[i]) << ','
          << detail::fmt_double(tr.flux[i]) << '\n';
    }
  }
  json j = document(c, "simulate");
  j["mu"] = c.sim_mu;
  j["final_u_minus"] = tr.u_minus.back();
  try {
    const PeriodEstimate pe = extract_period(tr);
    j["steady_state"] = false;
    j["omega"] = pe.omega;
    j["r"] = pe.r;
  } catch (const SteadyState&) {
    j["steady_state"] = true;
  }
  print_json(j, c.output.empty() ? std::cerr : std::cout);
  return ok;
}

int cmd_reconstruct(const RunConfig& c) {
  const CubicKinetics k = c.kinetics();
  PeriodicProfile trace;
  double omega = 0.0;
  if (c.input.empty()) {
    const double u_star = equilibrium(k, c.reconstruct_mu, c.sigma);
    trace = PeriodicProfile(std::vector<double>(c.n, u_star));
    omega = cubic_hopf_frequency(c.alpha, c.sigma);
  } else {
    auto in = open_input(c.input, "input");
    Branch b = read_branch_csv(in);
    auto pin = open_input(c.profiles, "profiles");
    attach_profiles(b, read_profiles_csv(pin), k, c.sigma);
    const long idx = c.point_index < 0 ? static_cast<long>(b.points.size()) - 1 : c.point_index;
    if (idx >= static_cast<long>(b.points.size())) throw ConfigError("reconstruct: point index out of range");
    const BranchPoint& p = b.points[static_cast<std::size_t>(idx)];
    std::vector<double> v = p.profile.values();
    for (double& x : v) x += p.u_star;
    trace = PeriodicProfile(std::move(v));
    omega = p.omega;
  }
  std::vector<double> xs(c.x_points);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = c.x_max * i / (xs.size() - 1.0);
  FieldSlice slice = reconstruct(trace, omega, c.sigma, xs);
  const FarField ff = fit_far_field(slice);
  slice.eta = ff.eta;
  {
    Sink sink(c.output);
    auto& out = sink.stream();
    out << "# config-hash: " << config_hash(c) << "\ns";
    for (double x : xs) out << ',' << detail::fmt_double(x);
    out << '\n';
    for (std::size_t j = 0; j < slice.s_grid.size(); ++j) {
      out << detail::fmt_double(slice.s_grid[j]);
      for (std::size_t i = 0; i < xs.size(); ++i) out << ',' << detail::fmt_double(slice.values[i][j]);
      out << '\n';
    }
  }
  json j = document(c, "reconstruct");
  j["omega"] = omega;
  j["u_inf"] = ff.u_inf;
  j["eta"] = finite_or_null(ff.eta);
  j["C"] = ff.C;
  j["slowest_mode_rate"] = dtn_symbol(omega, c.sigma, 1).real() - c.sigma;
  print_json(j, c.output.empty() ? std::cerr : std::cout);
  return ok;
}

std::string csv_safe(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n') ch = ';';
  }
  return s;
}

int cmd_sweep(const RunConfig& c) {
  BranchFitSettings fit;
  fit.n = c.sweep_n;
  fit.r_lo = c.fit_r_min;
  fit.r_hi = c.fit_r_max;
  const auto rows = sweep_gamma(c.alpha, c.beta, c.sigma, gamma_grid(c.gamma_min, c.gamma_max, c.gamma_points), fit,
                                c.threads);
  const auto flip = locate_flip(c.alpha, c.beta, c.sigma, rows, fit);
  Sink sink(c.output);
  auto& out = sink.stream();
  out << "# config-hash: " << config_hash(c) << "\ngamma,mu2_closed,mu2_fit,agree,status\n";
  for (const auto& r : rows) {
    out << detail::fmt_double(r.gamma) << ',' << detail::fmt_double(r.mu2_closed) << ','
        << detail::fmt_double(r.mu2_fit) << ',' << (r.agree ? "true" : "false") << ',' << csv_safe(r.status) << '\n';
  }
  if (flip) {
    out << "# flip-bracket: " << detail::fmt_double(flip->lo) << ',' << detail::fmt_double(flip->hi) << '\n';
    out << "# flip-estimate: " << detail::fmt_double(flip->estimate) << '\n';
  }
  if (c.sigma == 0.0) out << "# gamma-crit: " << detail::fmt_double(gamma_crit(c.alpha, c.beta)) << '\n';
  return ok;
}

void add_model_flags(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  sub->add_option("--alpha", o.alpha, "linear decay rate alpha > 0 [1]");
  sub->add_option("--beta", o.beta, "quadratic coefficient [1]");
  sub->add_option("--gamma", o.gamma, "cubic coefficient [0]");
  sub->add_option("--sigma", o.sigma, "bulk degradation sigma >= 0 [0]");
  sub->add_option("-o,--output", o.output, "output file [stdout]");
  sub->add_flag("--dump-config", o.dump_config, "print the effective configuration and exit");
}

void add_newton_flags(CLI::App* sub, Overrides& o) {
  sub->add_option("--n", o.n, "grid points per period, power of two [2048]");
  sub->add_option("--residual-tol", o.residual_tol, "Newton sup-norm tolerance [1e-10]");
  sub->add_option("--max-iter", o.max_iter, "Newton iteration cap [25]");
}

void add_continuation_flags(CLI::App* sub, Overrides& o) {
  sub->add_option("--r0", o.r0, "first seed amplitude [0.01]");
  sub->add_option("--r1", o.r1, "second seed amplitude [0.02]");
  sub->add_option("--ds0", o.ds0, "initial arclength step [5e-3]");
  sub->add_option("--ds-min", o.ds_min, "smallest arclength step [1e-7]");
  sub->add_option("--ds-max", o.ds_max, "largest arclength step [0.1]");
  sub->add_option("--max-points", o.max_points, "branch point cap [2000]");
  sub->add_option("--omega-min", o.omega_min, "frequency below which a homoclinic limit is reported [1e-3]");
  sub->add_option("--mu-min", o.mu_min, "stop when mu falls below [unbounded]");
  sub->add_option("--mu-max", o.mu_max, "stop when mu exceeds [unbounded]");
  sub->add_option("--r-max", o.r_max, "stop when the amplitude exceeds [unbounded]");
  sub->add_option("--profiles", o.profiles, "profile sidecar CSV to write");
  sub->add_option("--svg", o.svg, "bifurcation diagram SVG to write");
}

void add_simulation_flags(CLI::App* sub, Overrides& o) {
  sub->add_option("--mu", o.mu, "bifurcation parameter [0.05]");
  sub->add_option("--L", o.L, "truncated depth [60]");
  sub->add_option("--dx", o.dx, "spatial step [0.05]");
  sub->add_option("--dt", o.dt, "time step [0.01]");
  sub->add_option("--T", o.T, "time horizon [200]");
  sub->add_option("--far-bc", o.far_bc, "dirichlet_zero | neumann_zero [dirichlet_zero]");
  sub->add_option("--u0", o.u0, "initial boundary value [0.01]");
  sub->add_option("--perturbation", o.perturbation, "random bulk perturbation amplitude [0]");
  sub->add_option("--record-every", o.record_every, "steps between trajectory rows [1]");
  sub->add_option("--seed", o.seed, "random seed for the perturbation [1]");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic orbits of diffusion with a dynamic boundary condition: Hopf analysis, continuation, "
               "stability, simulation."};
  app.require_subcommand(1, 1);
  Overrides o;

  auto* hopf = app.add_subcommand("hopf", "locate the Hopf point and check its assumptions (JSON)");
  add_model_flags(hopf, o);

  auto* expand = app.add_subcommand("expand", "expansion coefficients of the bifurcating branch (JSON)");
  add_model_flags(expand, o);

  auto* cont = app.add_subcommand("continue", "continue the branch of periodic orbits (CSV)");
  add_model_flags(cont, o);
  add_newton_flags(cont, o);
  add_continuation_flags(cont, o);

  auto* stab = app.add_subcommand("stability", "annotate a branch CSV with stability (CSV)");
  add_model_flags(stab, o);
  stab->add_option("--input", o.input, "branch CSV");
  stab->add_option("--profiles", o.profiles, "profile sidecar CSV (numeric method)");
  stab->add_option("--method", o.method, "closed_form | numeric [closed_form]");
  stab->add_option("--truncation", o.truncation, "Floquet modes |l| <= N [64]");
  stab->add_option("--floquet-r-max", o.floquet_r_max, "largest amplitude for numeric Floquet [0.1]");

  auto* sim = app.add_subcommand("simulate", "time-domain simulation (trajectory CSV)");
  add_model_flags(sim, o);
  add_simulation_flags(sim, o);

  auto* rec = app.add_subcommand("reconstruct", "bulk field of a branch point (field CSV)");
  add_model_flags(rec, o);
  rec->add_option("--n", o.n, "grid points for the equilibrium trace [2048]");
  rec->add_option("--input", o.input, "branch CSV (omit for the equilibrium)");
  rec->add_option("--profiles", o.profiles, "profile sidecar CSV");
  rec->add_option("--index", o.index, "branch point index [last]");
  rec->add_option("--mu", o.mu, "parameter of the equilibrium when no branch is given [0]");
  rec->add_option("--x-max", o.x_max, "largest depth [20]");
  rec->add_option("--x-points", o.x_points, "number of depths [201]");

  auto* sweep = app.add_subcommand("sweep", "closed-form and fitted mu2 over a gamma range (CSV)");
  add_model_flags(sweep, o);
  sweep->add_option("--gamma-min", o.gamma_min, "[-0.1]");
  sweep->add_option("--gamma-max", o.gamma_max, "[0.05]");
  sweep->add_option("--gamma-points", o.gamma_points, "[16]");
  sweep->add_option("--sweep-n", o.sweep_n, "grid points for the fitted branches [64]");
  sweep->add_option("--fit-r-min", o.fit_r_min, "[0.02]");
  sweep->add_option("--fit-r-max", o.fit_r_max, "[0.1]");
  sweep->add_option("--threads", o.threads, "worker threads, 0 for all cores [0]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return config_error;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  auto fail = [&](int code, const char* type, const std::string& msg) {
    std::cerr << json{{"schema", 1}, {"command", command}, {"error", {{"type", type}, {"message", msg}}}}.dump() << '\n';
    return code;
  };
  try {
    const RunConfig c = effective_config(o, command);
    if (o.dump_config) {
      std::cout << json(c).dump(2) << '\n';
      return ok;
    }
    if (command == "hopf") return cmd_hopf(c);
    if (command == "expand") return cmd_expand(c);
    if (command == "continue") return cmd_continue(c);
    if (command == "stability") return cmd_stability(c);
    if (command == "simulate") return cmd_simulate(c);
    if (command == "reconstruct") return cmd_reconstruct(c);
    return cmd_sweep(c);
  } catch (const ConfigError& e) {
    return fail(config_error, "config", e.what());
  } catch (const SchemaError& e) {
    return fail(config_error, "schema", e.what());
  } catch (const HopfAbsent& e) {
    return fail(assumption_failure, "hopf_absent", e.what());
  } catch (const NumericalError& e) {
    return fail(numerical_failure, "numerical", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(config_error, "invalid_argument", e.what());
  } catch (const std::exception& e) {
    return fail(numerical_failure, "internal", e.what());
  }
}
