#include "pilotq/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "pilotq/bell.hpp"
#include "pilotq/errors.hpp"
#include "pilotq/rng.hpp"
#include "pilotq/well_run.hpp"

#ifndef PILOTQ_VERSION
#define PILOTQ_VERSION "0.0.0"
#endif

namespace pilotq::cli {

namespace fs = std::filesystem;

namespace {

// Everything a command can be configured with. Field names double as
// config-file keys (dashes in the flag names).
struct Options {
  std::string model = "well";
  std::string oracle = "f0";
  std::string gate = "hadamard";
  std::string initial;
  std::string sampler_path;
  std::string out_dir = "pilotq-out";
  std::string circuit_path;
  std::string output_path;
  std::string phase_policy = "ledger";
  std::string config_path;
  int n = 100;
  std::uint64_t seed = 1;
  double dt = 1e-3;
  double dt_min = 1e-8;
  double node_epsilon = 1e-12;
  int stride = 10;
  int threads = 1;
  double mass = 1.0;
  bool include_free = false;
  double g = 1.0;
  double sigma = 0.05;
  double interaction_time = 1.0;
  double a = 0.1;
  double meter_time = 1.0;
  double sigma_z = 0.05;
  double oracle_time = kPi / 2.0;
  double t_had = 1.0;
  double duration = 0.0;
  int bins = 50;
  int panels = 64;
  int order = 4;
  double tolerance = 1e-12;
  std::vector<double> constants;
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("'" + path + "' is not valid JSON: " + e.what());
  }
}

SamplerSpec load_sampler(const Options& o) {
  if (o.sampler_path.empty()) return SamplerSpec::equilibrium();
  return SamplerSpec::from_json(read_json_file(o.sampler_path));
}

IntegratorConfig integrator(const Options& o) {
  IntegratorConfig c;
  c.dt = o.dt;
  c.dt_min = o.dt_min;
  c.node_epsilon = o.node_epsilon;
  c.sample_stride = o.stride;
  c.threads = o.threads;
  return c;
}

well::WellBasis basis(const Options& o) { return well::WellBasis{o.mass}; }

well::WellCompileOptions compile_options(const Options& o) {
  well::WellCompileOptions c;
  c.include_free_evolution = o.include_free;
  c.phase = well::parse_phase_policy(o.phase_policy);
  c.oracle_time = o.oracle_time;
  return c;
}

nlohmann::json config_echo(const std::string& command, const Options& o) {
  nlohmann::json j{{"command", command}, {"seed", o.seed}, {"n", o.n}, {"dt", o.dt},
                   {"stride", o.stride}, {"model", o.model}};
  if (command == "deutsch" || command == "gate" || command == "sample" || command == "compile") {
    if (o.model == "bell") {
      j["g"] = o.g;
      j["sigma"] = o.sigma;
      j["interaction-time"] = o.interaction_time;
      j["t-had"] = o.t_had;
    } else {
      j["mass"] = o.mass;
      j["a"] = o.a;
      j["meter-time"] = o.meter_time;
      j["sigma-z"] = o.sigma_z;
      j["include-free-evolution"] = o.include_free;
      j["phase-policy"] = o.phase_policy;
    }
    j["oracle-time"] = o.oracle_time;
  }
  if (command == "deutsch") j["oracle"] = o.oracle;
  if (command == "gate") {
    j["gate"] = o.gate;
    j["duration"] = o.duration;
  }
  if (!o.initial.empty()) j["initial"] = o.initial;
  if (!o.sampler_path.empty()) j["sampler"] = o.sampler_path;
  return j;
}

nlohmann::json provenance(const nlohmann::json& config, const Options& o, const std::string& hash) {
  return {{"version", PILOTQ_VERSION}, {"rng", CounterRng::kName}, {"seed", o.seed},
          {"config", config}, {"schedule_hash", hash}};
}

std::vector<std::string> csv_comments(const std::string& command, const nlohmann::json& config,
                                      const Options& o) {
  return {"pilotq " + std::string(PILOTQ_VERSION) + " " + command, "seed: " + std::to_string(o.seed),
          "config: " + config.dump()};
}

fs::path prepare_dir(const Options& o) {
  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  return dir;
}

void write_summary(const fs::path& dir, const nlohmann::json& summary) {
  validate_summary(summary);
  std::ofstream(dir / "summary.json") << summary.dump(2) << '\n';
}

void write_trajectories(const fs::path& dir, const Ensemble& e,
                        const std::vector<std::string>& comments) {
  std::ofstream f(dir / "trajectories.csv");
  write_ensemble_csv(f, e, comments);
}

void write_density(const fs::path& dir, std::span<const double> values,
                   const std::function<double(double)>& cdf, double lo, double hi, int bins,
                   const std::vector<std::string>& comments) {
  std::ofstream f(dir / "density.csv");
  write_histogram_csv(f, density_histogram(values, cdf, lo, hi, bins), comments);
}

double json_number(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN(); }

int cmd_deutsch(const Options& o, std::ostream& out) {
  const OracleFunction f = OracleFunction::parse(o.oracle);
  const auto config = config_echo("deutsch", o);
  const auto comments = csv_comments("deutsch", config, o);
  const SamplerSpec sampler = load_sampler(o);
  nlohmann::json summary{{"command", "deutsch"}, {"model", o.model}, {"oracle", f.name()}};

  if (o.model == "bell") {
    bell::BellRunParams p;
    p.g = o.g;
    p.sigma = o.sigma;
    p.interaction_time = o.interaction_time;
    p.n = o.n;
    p.seed = o.seed;
    p.integrator = integrator(o);
    p.timings.hadamard = o.t_had;
    p.timings.oracle = o.oracle_time;
    p.sampler = sampler;
    const auto r = bell::run_deutsch_bell(f, p);
    const fs::path dir = prepare_dir(o);
    write_trajectories(dir, r.ensemble, comments);
    const bell::BellState end = bell::apply_measurement(
        bell::BellState(r.final_register, {0.0, o.sigma, 0.0}), {o.g, o.interaction_time},
        o.interaction_time);
    const auto amps = r.final_register.amplitudes();
    auto cdf = [&](double y) {
      double c = 0.0;
      for (int mn = 0; mn < 4; ++mn) c += std::norm(amps(mn)) * end.packets()[mn].cdf(y);
      return c;
    };
    const auto y = r.ensemble.column(r.ensemble.times().size() - 1, 0);
    write_density(dir, y, cdf, r.displacement - 6.0 * o.sigma, r.displacement + 6.0 * o.sigma,
                  o.bins, comments);
    summary["outcome"] = r.outcome;
    summary["displacement"] = r.displacement;
    summary["expected_displacement"] = (r.outcome == "constant" ? 1.0 : -1.0) * o.g * o.interaction_time;
    summary["confidence"] = r.confidence;
    summary["g"] = o.g;
    summary["sigma"] = o.sigma;
    summary["dt"] = o.dt;
    summary["n"] = o.n;
    summary["t_meas"] = r.t_meas;
    summary["checks"] = {{"unanimous", r.unanimous},
                         {"premeasurement_drift", r.premeasurement_drift},
                         {"separation_drift", r.separation_drift},
                         {"displacement_spread", r.displacement_spread}};
    summary["manifest"] =
        ensemble_manifest(r.ensemble, o.seed, o.dt, sampler, "bell", schedule_hash(r.schedule));
    summary["provenance"] = provenance(config, o, schedule_hash(r.schedule));
    write_summary(dir, summary);
  } else {
    well::WellRunParams p;
    p.basis = basis(o);
    p.meter = {o.a, o.meter_time, o.sigma_z};
    p.compile = compile_options(o);
    p.n = o.n;
    p.seed = o.seed;
    p.integrator = integrator(o);
    p.sampler = sampler;
    const auto r = well::run_deutsch_well(f, p);
    const fs::path dir = prepare_dir(o);
    write_trajectories(dir, r.ensemble, comments);
    const well::WellFlow flow(p.basis, CircuitIR{}.initial_state().amplitudes(), r.schedule);
    const auto at_meas = flow.state_at(r.t_meas);
    const std::size_t k = static_cast<std::size_t>(
        std::find_if(r.ensemble.times().begin(), r.ensemble.times().end(),
                     [&](double t) { return std::abs(t - r.t_meas) < 1e-9; }) -
        r.ensemble.times().begin());
    const auto x = r.ensemble.column(std::min(k, r.ensemble.times().size() - 1), 0);
    write_density(dir, x, [&](double s) { return at_meas.marginal_cdf_x(s); }, 0.0, 1.0, o.bins,
                  comments);
    const std::string hash = schedule_hash(r.schedule.to_hamiltonian(p.basis));
    summary["outcome"] = r.outcome;
    summary["displacement"] = r.displacement;
    summary["pointer_displacement"] = r.displacement;
    summary["expected_displacement"] = r.expected_displacement;
    summary["confidence"] = r.confidence;
    summary["m"] = o.mass;
    summary["a"] = o.a;
    summary["dt"] = o.dt;
    summary["n"] = o.n;
    summary["seed"] = o.seed;
    summary["t_meas"] = r.t_meas;
    summary["final_mode"] = r.final_mode;
    summary["checks"] = {{"unanimous", r.unanimous},
                         {"displacement_error", r.displacement_error},
                         {"schedule_residual", r.schedule_residual},
                         {"norm_error", r.norm_error},
                         {"oracle_max_abs_dy", r.window.max_abs_dy},
                         {"oracle_max_abs_vy", r.window.max_abs_vy},
                         {"oracle_x_l1_start", json_number(r.window.x_l1_start)},
                         {"oracle_x_l1_end", json_number(r.window.x_l1_end)},
                         {"oracle_y_l1_start", json_number(r.window.y_l1_start)},
                         {"oracle_y_l1_end", json_number(r.window.y_l1_end)},
                         {"final_x_l1", json_number(r.final_x_l1)},
                         {"final_y_l1", json_number(r.final_y_l1)}};
    summary["phase_correction"] = r.schedule.phase_correction();
    summary["manifest"] = ensemble_manifest(r.ensemble, o.seed, o.dt, sampler, "well", hash);
    summary["provenance"] = provenance(config, o, hash);
    write_summary(dir, summary);
  }
  out << summary["outcome"].get<std::string>() << '\n';
  return kOk;
}

int cmd_gate(const Options& o, std::ostream& out) {
  if (o.model != "well")
    throw UsageError("gate scenarios move particles only in the well model");
  const auto b = basis(o);
  const auto scenario = well::gate_scenario(o.gate, o.initial, b, compile_options(o), o.duration);
  const SamplerSpec sampler = load_sampler(o);
  const auto config = config_echo("gate", o);
  const auto comments = csv_comments("gate", config, o);
  auto run = well::run_well_ensemble(b, scenario.coefficients, scenario.schedule, std::nullopt,
                                     sampler, o.n, o.seed, integrator(o));
  const Ensemble& e = run.ensemble;
  const fs::path dir = prepare_dir(o);
  write_trajectories(dir, e, comments);
  const auto fin = run.flow.state_at(run.flow.end());
  const std::size_t last = e.times().size() - 1;
  const auto x = e.column(last, 0);
  write_density(dir, x, [&](double s) { return fin.marginal_cdf_x(s); }, 0.0, 1.0, o.bins, comments);

  double max_dx = 0.0;
  double max_dy = 0.0;
  for (const auto& tr : e.trajectories)
    for (const auto& q : tr.points) {
      max_dx = std::max(max_dx, std::abs(q[0] - tr.points[0][0]));
      max_dy = std::max(max_dy, std::abs(q[1] - tr.points[0][1]));
    }
  const auto order = verify_ordering(e, 0);
  const std::string hash = schedule_hash(scenario.schedule.to_hamiltonian(b));
  nlohmann::json checks{{"ordering_preserved", order.preserved},
                        {"max_abs_dx", max_dx},
                        {"max_abs_dy", max_dy},
                        {"beat_period", b.beat_period()}};
  if (scenario.target)
    checks["schedule_residual"] = well::schedule_residual(scenario.schedule, *scenario.target, b);
  if (e.size() >= 100)
    checks["final_x_l1"] =
        equivariance_distance(x, [&](double s) { return fin.marginal_cdf_x(s); }, 0.0, 1.0, o.bins);
  nlohmann::json summary{{"command", "gate"},
                         {"model", "well"},
                         {"gate", scenario.gate},
                         {"initial", scenario.initial},
                         {"n", o.n},
                         {"m", o.mass},
                         {"duration", run.flow.end()},
                         {"checks", checks},
                         {"segments", scenario.schedule.to_json(b)},
                         {"manifest", ensemble_manifest(e, o.seed, o.dt, sampler, "well", hash)},
                         {"provenance", provenance(config, o, hash)}};
  write_summary(dir, summary);
  out << "wrote " << e.size() << " trajectories to " << dir.string() << '\n';
  return kOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const QuadratureRule rule(o.panels, o.order, o.tolerance);
  well::CouplingConstants k;
  if (!o.constants.empty()) {
    if (o.constants.size() != 3) throw UsageError("--constants takes A B C");
    k = {o.constants[0], o.constants[1], o.constants[2]};
  }
  const auto report = well::verify_matrix_elements(rule, k);
  nlohmann::json j{{"rule", {{"panels", o.panels}, {"order", o.order}, {"tolerance", o.tolerance}}},
                   {"delta_v_residual", report.delta_v_residual},
                   {"coupling_residual", report.coupling_residual},
                   {"normalisation_residual", report.normalisation_residual},
                   {"constants", {k.a, k.b, k.c}},
                   {"recomputed_constants", {report.recomputed.a, report.recomputed.b, report.recomputed.c}}};
  std::vector<std::string> failures;
  try {
    (void)well::delta_v_matrix(rule);
    (void)well::oracle_coupling_matrix(rule, k);
  } catch (const QuadratureError& e) {
    failures.push_back(e.what());
    j["quadrature_residual"] = e.residual();
  } catch (const well::CouplingMismatch& e) {
    failures.push_back(e.what());
  }
  if (report.delta_v_residual >= 1e-10) failures.push_back("delta V elements miss X");
  if (report.coupling_residual >= 1e-8) failures.push_back("coupling elements miss (X - 1) (+) 0");
  j["ok"] = failures.empty();
  j["failures"] = failures;
  out << j.dump(2) << '\n';
  return failures.empty() ? kOk : kPhysicsFailure;
}

CircuitIR load_circuit(const Options& o, bool oracle_given) {
  if (!o.circuit_path.empty()) {
    try {
      return circuit_from_json(read_json_file(o.circuit_path));
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
  }
  if (!oracle_given) throw UsageError("compile needs --circuit or --oracle");
  return deutsch_circuit(OracleFunction::parse(o.oracle));
}

int cmd_compile(const Options& o, bool oracle_given, std::ostream& out) {
  const CircuitIR ir = load_circuit(o, oracle_given);
  try {
    validate(ir);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  nlohmann::json j{{"model", o.model}, {"circuit", circuit_to_json(ir)}};
  if (o.model == "bell") {
    GateTimings t;
    t.hadamard = o.t_had;
    t.oracle = o.oracle_time;
    const auto s = compile_circuit(ir, t);
    j["segments"] = schedule_to_json(s);
    j["total_duration"] = s.total_duration();
    j["residual"] = s.empty() ? 0.0 : max_abs(s.unitary() - circuit_unitary(ir));
    j["schedule_hash"] = schedule_hash(s);
    if (ir.measure)
      j["measurement"] = {{"label", "measure(" + ir.measure->qubit + ")"},
                          {"operator", "Z (x) 1"},
                          {"g", o.g},
                          {"duration", o.interaction_time}};
  } else {
    const auto b = basis(o);
    const auto s = well::compile_well_circuit(ir, b, compile_options(o));
    j["segments"] = s.to_json(b);
    j["total_duration"] = s.total_duration();
    j["phase_correction"] = s.phase_correction();
    j["residual"] = well::schedule_residual(s, well::well_target(ir), b);
    j["schedule_hash"] = schedule_hash(s.to_hamiltonian(b));
    if (ir.measure)
      j["measurement"] = {{"label", "meter(" + ir.measure->qubit + ")"},
                          {"a", o.a},
                          {"duration", o.meter_time},
                          {"sigma_z", o.sigma_z}};
  }
  if (o.output_path.empty()) {
    out << j.dump(2) << '\n';
  } else {
    std::ofstream(o.output_path) << j.dump(2) << '\n';
  }
  return kOk;
}

int cmd_sample(const Options& o, std::ostream& out) {
  const SamplerSpec sampler = load_sampler(o);
  const auto config = config_echo("sample", o);
  const auto comments = csv_comments("sample", config, o);
  std::vector<Point> points;
  Ensemble e;
  std::function<double(double)> cdf;
  double lo = 0.0;
  double hi = 1.0;
  if (o.model == "bell") {
    const bell::BellState s(RegisterState::basis("01"), {0.0, o.sigma, 0.0});
    points = sample_initial(sampler, bell::PointerDensity(s), o.n, o.seed, o.node_epsilon);
    e.coordinates = {"y"};
    const bell::PointerPacket p{0.0, o.sigma, 0.0};
    cdf = [p](double y) { return p.cdf(y); };
    lo = -6.0 * o.sigma;
    hi = 6.0 * o.sigma;
  } else {
    const well::WellWavefunction psi(basis(o), well::register_from_label(o.initial.empty() ? "01" : o.initial));
    points = sample_initial(sampler, well::WellDensity(psi), o.n, o.seed, o.node_epsilon);
    e.coordinates = {"x", "y"};
    cdf = [psi](double x) { return psi.marginal_cdf_x(x); };
  }
  for (std::size_t i = 0; i < points.size(); ++i)
    e.trajectories.push_back({static_cast<int>(i), {0.0}, {points[i]}});
  const fs::path dir = prepare_dir(o);
  {
    std::ofstream f(dir / "samples.csv");
    write_ensemble_csv(f, e, comments);
  }
  const auto first = e.column(0, 0);
  write_density(dir, first, cdf, lo, hi, o.bins, comments);
  nlohmann::json checks = nlohmann::json::object();
  if (e.size() >= 100) checks["l1_first_coordinate"] = equivariance_distance(first, cdf, lo, hi, o.bins);
  nlohmann::json summary{{"command", "sample"},
                         {"model", o.model},
                         {"n", o.n},
                         {"sampler", sampler.to_json()},
                         {"checks", checks},
                         {"provenance", provenance(config, o, "")}};
  write_summary(dir, summary);
  out << "wrote " << e.size() << " samples to " << dir.string() << '\n';
  return kOk;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config_path, "JSON file with option values; flags win");
  sub->add_option("--out", o.out_dir, "Output directory")->envname("PILOTQ_OUT_DIR");
  sub->add_option("--seed", o.seed, "RNG seed");
  sub->add_option("-n,--n", o.n, "Ensemble size")->check(CLI::PositiveNumber);
  sub->add_option("--sampler", o.sampler_path, "Sampler spec JSON (default: equilibrium)");
  sub->add_option("--bins", o.bins, "Histogram bins")->check(CLI::Range(1, 100000));
}

void add_integrator(CLI::App* sub, Options& o) {
  sub->add_option("--dt", o.dt, "RK4 step")->check(CLI::PositiveNumber);
  sub->add_option("--dt-min", o.dt_min, "Smallest step after node refinement")
      ->check(CLI::PositiveNumber);
  sub->add_option("--node-epsilon", o.node_epsilon, "Density below which a point is a node")
      ->check(CLI::PositiveNumber);
  sub->add_option("--stride", o.stride, "Record every k-th step")->check(CLI::PositiveNumber);
  sub->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
}

CLI::Option* add_physics(CLI::App* sub, Options& o) {
  const std::vector<std::string> models{"bell", "well"};
  sub->add_option("--model", o.model, "bell or well")->check(CLI::IsMember(models));
  auto* mass = sub->add_option("--mass", o.mass, "Particle mass (default 1, or 1e4 with free evolution)")
                   ->check(CLI::PositiveNumber);
  sub->add_flag("--include-free-evolution", o.include_free, "Keep H_free on during drive pulses");
  sub->add_option("--phase-policy", o.phase_policy, "ledger or physical")
      ->check(CLI::IsMember({"ledger", "physical"}));
  sub->add_option("--g", o.g, "Bell pointer coupling");
  sub->add_option("--sigma", o.sigma, "Bell pointer width")->check(CLI::PositiveNumber);
  sub->add_option("--interaction-time", o.interaction_time, "Bell coupling duration")
      ->check(CLI::PositiveNumber);
  sub->add_option("--a", o.a, "Energy-meter coupling");
  sub->add_option("--meter-time", o.meter_time, "Energy-meter duration")->check(CLI::PositiveNumber);
  sub->add_option("--sigma-z", o.sigma_z, "Energy-meter pointer width")->check(CLI::PositiveNumber);
  sub->add_option("--oracle-time", o.oracle_time, "Oracle duration")->check(CLI::PositiveNumber);
  sub->add_option("--t-had", o.t_had, "Hadamard duration (bell)")->check(CLI::PositiveNumber);
  return mass;
}

// Pulls --config out of the argument list and splices its contents in
// right after the subcommand, so explicit flags (later) take precedence.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  if (path.empty() || args.empty()) return args;
  const nlohmann::json cfg = read_json_file(path);
  if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
  out.push_back(args[0]);
  for (auto& a : config_arguments(cfg)) out.push_back(std::move(a));
  out.insert(out.end(), args.begin() + 1, args.end());
  return out;
}

}  // namespace

std::vector<std::string> config_arguments(const nlohmann::json& config) {
  std::vector<std::string> out;
  for (const auto& [key, value] : config.items()) {
    if (key == "config") throw UsageError("config files cannot nest --config");
    if (value.is_boolean()) {
      out.push_back("--" + key + "=" + (value.get<bool>() ? "true" : "false"));
    } else if (value.is_string()) {
      out.push_back("--" + key + "=" + value.get<std::string>());
    } else if (value.is_number()) {
      out.push_back("--" + key + "=" + value.dump());
    } else if (value.is_array()) {
      out.push_back("--" + key);
      for (const auto& v : value) out.push_back(v.dump());
    } else {
      throw UsageError("config value for '" + key + "' must be a scalar or array");
    }
  }
  return out;
}

void validate_summary(const nlohmann::json& s) {
  auto need = [&](const nlohmann::json& obj, const char* key, auto pred, const char* what) {
    if (!obj.contains(key) || !pred(obj.at(key)))
      throw std::invalid_argument(std::string("summary field '") + key + "' must be " + what);
  };
  const auto is_string = [](const nlohmann::json& v) { return v.is_string(); };
  const auto is_object = [](const nlohmann::json& v) { return v.is_object(); };
  const auto is_number = [](const nlohmann::json& v) { return v.is_number(); };
  if (!s.is_object()) throw std::invalid_argument("summary must be an object");
  need(s, "command", is_string, "a string");
  need(s, "model", is_string, "a string");
  need(s, "checks", is_object, "an object");
  need(s, "provenance", is_object, "an object");
  const auto& p = s.at("provenance");
  need(p, "version", is_string, "a string");
  need(p, "rng", is_string, "a string");
  need(p, "seed", is_number, "a number");
  need(p, "config", is_object, "an object");
  need(p, "schedule_hash", is_string, "a string");
  const auto command = s.at("command").get<std::string>();
  if (command == "deutsch") {
    need(s, "oracle", is_string, "a string");
    need(s, "outcome",
         [](const nlohmann::json& v) {
           return v.is_string() && (v.get<std::string>() == "constant" || v.get<std::string>() == "balanced");
         },
         "\"constant\" or \"balanced\"");
    need(s, "displacement", is_number, "a number");
    need(s, "confidence", is_number, "a number");
    need(s, "n", is_number, "a number");
  } else if (command == "gate") {
    need(s, "gate", is_string, "a string");
    need(s, "initial", is_string, "a string");
  } else if (command != "sample") {
    throw std::invalid_argument("unknown summary command '" + command + "'");
  }
}

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Pilot-wave trajectories through small quantum circuits", "pilotq"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", PILOTQ_VERSION);

  auto* deutsch = app.add_subcommand("deutsch", "Run the Deutsch algorithm with a pointer readout");
  add_common(deutsch, o);
  add_integrator(deutsch, o);
  auto* deutsch_mass = add_physics(deutsch, o);
  deutsch->add_option("--oracle", o.oracle, "f0, f1, f2 or f3")
      ->check(CLI::IsMember({"f0", "f1", "f2", "f3"}));

  auto* gate = app.add_subcommand("gate", "Trajectories through a single gate in the well");
  add_common(gate, o);
  add_integrator(gate, o);
  auto* gate_mass = add_physics(gate, o);
  gate->add_option("--gate", o.gate, "hadamard, t, cnot, free or f0..f3")
      ->check(CLI::IsMember(well::gate_scenario_names()));
  gate->add_option("--initial", o.initial, "Initial state label, e.g. 1, +, +-");
  gate->add_option("--duration", o.duration, "Free-evolution time (default two beat periods)");
  auto* gate_n = gate->get_option("--n");

  auto* verify = app.add_subcommand("verify", "Check drive matrix elements by quadrature");
  verify->add_option("--config", o.config_path, "JSON file with option values; flags win");
  verify->add_option("--panels", o.panels, "Gauss-Legendre panels")->check(CLI::PositiveNumber);
  verify->add_option("--order", o.order, "Points per panel")->check(CLI::Range(1, 64));
  verify->add_option("--tolerance", o.tolerance, "Refinement tolerance")->check(CLI::PositiveNumber);
  verify->add_option("--constants", o.constants, "Coupling constants A B C")->expected(3);

  auto* compile = app.add_subcommand("compile", "Dump the compiled schedule of a circuit");
  compile->add_option("--config", o.config_path, "JSON file with option values; flags win");
  auto* compile_mass = add_physics(compile, o);
  compile->add_option("--circuit", o.circuit_path, "Circuit JSON");
  auto* compile_oracle = compile->add_option("--oracle", o.oracle, "Deutsch circuit for this oracle")
                             ->check(CLI::IsMember({"f0", "f1", "f2", "f3"}));
  compile->add_option("--output", o.output_path, "Write the dump here instead of stdout");

  auto* sample = app.add_subcommand("sample", "Draw an initial ensemble");
  add_common(sample, o);
  sample->add_option("--model", o.model, "bell or well")->check(CLI::IsMember({"bell", "well"}));
  auto* sample_mass = sample->add_option("--mass", o.mass, "Particle mass")->check(CLI::PositiveNumber);
  sample->add_option("--sigma", o.sigma, "Bell pointer width")->check(CLI::PositiveNumber);
  sample->add_option("--initial", o.initial, "Well state label (default 01)");
  (void)sample_mass;

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsageError;
  } catch (const UsageError& e) {
    err << "pilotq: " << e.what() << '\n';
    return kUsageError;
  }

  // Mass default depends on whether free evolution is kept during pulses.
  for (auto* m : {deutsch_mass, gate_mass, compile_mass})
    if (m->count() == 0 && o.include_free) o.mass = 1e4;
  if (gate->parsed() && gate_n->count() == 0) o.n = 20;

  try {
    if (deutsch->parsed()) return cmd_deutsch(o, out);
    if (gate->parsed()) return cmd_gate(o, out);
    if (verify->parsed()) return cmd_verify(o, out);
    if (compile->parsed()) return cmd_compile(o, compile_oracle->count() > 0, out);
    if (sample->parsed()) return cmd_sample(o, out);
  } catch (const UsageError& e) {
    err << "pilotq: " << e.what() << '\n';
    return kUsageError;
  } catch (const InvalidArgument& e) {
    err << "pilotq: invalid input: " << e.what() << '\n';
    return kUsageError;
  } catch (const IntegrationError& e) {
    err << "pilotq: integration failed: " << e.what() << '\n';
    return kIntegrationFailure;
  } catch (const AmbiguousReadout& e) {
    err << "pilotq: ambiguous readout: " << e.what() << " (displacement " << e.displacement()
        << ")\n";
    return kPhysicsFailure;
  } catch (const UnschedulablePhase& e) {
    err << "pilotq: " << e.what() << " (residual phase " << e.residual_phase() << ")\n";
    return kPhysicsFailure;
  } catch (const Error& e) {
    err << "pilotq: " << e.what() << '\n';
    return kPhysicsFailure;
  } catch (const std::invalid_argument& e) {
    err << "pilotq: summary rejected: " << e.what() << '\n';
    return kPhysicsFailure;
  }
  return kUsageError;
}

}  // namespace pilotq::cli
