#include "pilotq/well_run.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pilotq/errors.hpp"
#include "pilotq/gates.hpp"
#include "pilotq/zxz.hpp"

namespace pilotq::well {

namespace {

constexpr double kExactTolerance = 1e-9;
constexpr double kAngleTolerance = 1e-12;

double wrap(double phi) { return std::remainder(phi, 2.0 * kPi); }

// Fixes the global phase of `raw` so that it reproduces `target`.
void reconcile(DriveSchedule& raw, const CMatrix& target, const std::string& idle_qubits,
               const WellBasis& basis, const WellCompileOptions& options) {
  const CMatrix p = raw.unitary(basis);
  const double phi = std::arg((p.adjoint() * target).trace());
  if (options.phase == PhasePolicy::Ledger) {
    raw.add_phase_correction(phi);
  } else {
    // An idle wait of 2 pi k / |omega| is the identity up to a phase.
    const DrivePotential idle = DrivePotential::free_well(idle_qubits);
    const double period = 2.0 * kPi / std::abs(basis.omega());
    const double rate = idle.phase_rate(basis);
    double best = std::numeric_limits<double>::infinity();
    int found = -1;
    for (int k = 0; k <= options.max_idle_periods && found < 0; ++k) {
      const double r = std::abs(wrap(phi + rate * k * period));
      best = std::min(best, r);
      if (r < kExactTolerance) found = k;
    }
    if (found < 0)
      throw UnschedulablePhase("no idle wait reaches the gate's global phase", best);
    if (found > 0) raw.append({"idle", idle, found * period});
    raw.add_phase_correction(phi + rate * found * period);
  }
  if (!options.include_free_evolution) {
    const double r = schedule_residual(raw, target, basis);
    if (r > kExactTolerance)
      throw Error("compiled drive schedule misses its gate by " + std::to_string(r));
  }
}

DriveSchedule x_pulse(const std::string& target, double duration, const WellCompileOptions& o) {
  DriveSchedule s;
  if (duration > kAngleTolerance)
    s.append({"xdrive(" + target + ")", DrivePotential::x_drive(target, o.include_free_evolution),
              duration});
  return s;
}

DriveSchedule oracle_raw(const OracleFunction& f, const WellCompileOptions& o) {
  DriveSchedule s;
  const auto coupling = [&] {
    DriveSchedule c;
    c.append({"coupling",
              DrivePotential::oracle_coupling(kPi / (2.0 * o.oracle_time), o.include_free_evolution),
              o.oracle_time});
    return c;
  };
  switch (f.id()) {
    case OracleFunction::Id::f0: break;
    case OracleFunction::Id::f1:
      // f1 = X_d f2 X_d
      s.append(x_pulse("d", kPi / 2.0, o));
      s.append(coupling());
      s.append(x_pulse("d", kPi / 2.0, o));
      break;
    case OracleFunction::Id::f2: s.append(coupling()); break;
    case OracleFunction::Id::f3: s.append(x_pulse("a", kPi / 2.0, o)); break;
  }
  return s;
}

CMatrix single_matrix(const GateApplication& gate) {
  GateApplication on_d = gate;
  on_d.target = "d";
  return gate_unitary(on_d, 1);
}

}  // namespace

PhasePolicy parse_phase_policy(const std::string& name) {
  if (name == "ledger") return PhasePolicy::Ledger;
  if (name == "physical") return PhasePolicy::Physical;
  throw InvalidArgument("phase policy must be 'ledger' or 'physical'");
}

std::string phase_policy_name(PhasePolicy policy) {
  return policy == PhasePolicy::Ledger ? "ledger" : "physical";
}

void WellCompileOptions::validate() const {
  if (!(oracle_time > 0.0)) throw InvalidArgument("oracle duration must be positive");
  if (max_idle_periods < 0) throw InvalidArgument("idle period bound must be non-negative");
}

double rz_wait(double theta, const WellBasis& basis) {
  basis.validate();
  // 2 omega t = theta - 2 pi k, smallest t > 0.
  const double period = kPi / std::abs(basis.omega());
  double t = std::fmod(theta / (2.0 * basis.omega()), period);
  if (t < 0.0) t += period;
  if (t < kAngleTolerance * period || period - t < kAngleTolerance * period) return 0.0;
  return t;
}

DriveSchedule schedule_for_gate(const CMatrix& u, const std::string& target, const WellBasis& basis,
                                const WellCompileOptions& options) {
  options.validate();
  if (target != "d" && target != "a") throw InvalidArgument("gate target must be d or a");
  const ZXZDecomposition z = zxz_decompose(u);
  DriveSchedule s;
  const auto wait = [&](double theta, const char* name) {
    const double t = rz_wait(theta, basis);
    if (t > 0.0) s.append({std::string("wait ") + name + "(" + target + ")",
                           DrivePotential::free_well(target), t});
  };
  wait(z.delta, "rz-delta");
  s.append(x_pulse(target, z.gamma / 2.0, options));
  wait(z.beta, "rz-beta");
  reconcile(s, embed_single(u, target, 2), target, basis, options);
  return s;
}

DriveSchedule schedule_for_gate(const GateApplication& gate, const WellBasis& basis,
                                const WellCompileOptions& options) {
  options.validate();
  switch (gate.kind) {
    case GateKind::Oracle: {
      if (!gate.oracle) throw InvalidArgument("oracle gate without a function id");
      DriveSchedule s = oracle_raw(*gate.oracle, options);
      reconcile(s, oracle_unitary(*gate.oracle).matrix, "da", basis, options);
      return s;
    }
    case GateKind::CNOT: {
      const GateApplication f1{GateKind::Oracle, "", "", 0.0, OracleFunction(OracleFunction::Id::f1)};
      if (gate.control == "d" && gate.target == "a") return schedule_for_gate(f1, basis, options);
      if (gate.control == "a" && gate.target == "d") {
        // Swapping control and target: conjugate by H on both wells.
        DriveSchedule s;
        const CMatrix h = gates::hadamard();
        s.append(schedule_for_gate(h, "d", basis, options));
        s.append(schedule_for_gate(h, "a", basis, options));
        s.append(schedule_for_gate(f1, basis, options));
        s.append(schedule_for_gate(h, "d", basis, options));
        s.append(schedule_for_gate(h, "a", basis, options));
        return s;
      }
      throw InvalidArgument("CNOT needs control and target among d, a");
    }
    default: return schedule_for_gate(single_matrix(gate), gate.target, basis, options);
  }
}

DriveSchedule compile_well_circuit(const CircuitIR& ir, const WellBasis& basis,
                                   const WellCompileOptions& options) {
  validate(ir);
  DriveSchedule s;
  for (const auto& g : ir.gates) s.append(schedule_for_gate(g, basis, options));
  return s;
}

CMatrix well_target(const CircuitIR& ir) {
  const CMatrix u = circuit_unitary(ir);
  return ir.qubits() == 1 ? kron(u, gates::identity(2)) : u;
}

double schedule_residual(const DriveSchedule& schedule, const CMatrix& target,
                         const WellBasis& basis) {
  return max_abs(schedule.unitary(basis) - target);
}

CVector register_from_label(const std::string& label) {
  if (label.empty() || label.size() > 2) throw InvalidArgument("state label needs 1 or 2 symbols");
  const double r = 1.0 / std::sqrt(2.0);
  auto one = [&](char ch) {
    CVector v(2);
    switch (ch) {
      case '0': v << 1.0, 0.0; break;
      case '1': v << 0.0, 1.0; break;
      case '+': v << r, r; break;
      case '-': v << r, -r; break;
      default: throw InvalidArgument(std::string("unknown state symbol '") + ch + "'");
    }
    return v;
  };
  return kron(one(label[0]), label.size() == 2 ? one(label[1]) : one('0'));
}

WellEnsembleRun run_well_ensemble(const WellBasis& basis, const CVector& initial,
                                  DriveSchedule schedule, std::optional<EnergyMeter> meter,
                                  const SamplerSpec& sampler, int n, std::uint64_t seed,
                                  const IntegratorConfig& integrator) {
  integrator.validate();
  WellFlow flow(basis, initial, std::move(schedule), meter, integrator.node_epsilon);
  const WellWavefunction psi0 = flow.state_at(0.0);
  auto start = sample_initial(sampler, WellDensity(psi0), n, seed, integrator.node_epsilon);
  Ensemble e = integrate_ensemble(start, flow.field(), 0.0, flow.end(), integrator,
                                  flow.coordinates(), flow.breakpoints());
  return {std::move(flow), std::move(start), std::move(e)};
}

void WellRunParams::validate() const {
  basis.validate();
  meter.validate();
  compile.validate();
  integrator.validate();
  if (n < 1) throw InvalidArgument("ensemble size must be at least 1");
}

namespace {

std::size_t time_index(const Ensemble& e, double t) {
  const auto& times = e.times();
  std::size_t best = 0;
  for (std::size_t k = 1; k < times.size(); ++k)
    if (std::abs(times[k] - t) < std::abs(times[best] - t)) best = k;
  return best;
}

double l1_or_nan(const Ensemble& e, std::size_t k, std::size_t coord,
                 const std::function<double(double)>& cdf) {
  if (e.size() < 100) return std::numeric_limits<double>::quiet_NaN();
  const auto col = e.column(k, coord);
  return equivariance_distance(col, cdf, 0.0, 1.0, 50);
}

}  // namespace

WellRunReport run_deutsch_well(const OracleFunction& f, const WellRunParams& params) {
  params.validate();
  WellRunReport report;
  report.oracle = f;
  const CircuitIR ir = deutsch_circuit(f);

  // Per-gate compilation keeps the oracle window boundaries.
  DriveSchedule schedule;
  for (std::size_t g = 0; g < ir.gates.size(); ++g) {
    if (ir.gates[g].kind == GateKind::Oracle) report.window.start = schedule.total_duration();
    schedule.append(schedule_for_gate(ir.gates[g], params.basis, params.compile));
    if (ir.gates[g].kind == GateKind::Oracle) report.window.end = schedule.total_duration();
  }
  report.schedule = schedule;
  report.schedule_residual = schedule_residual(schedule, well_target(ir), params.basis);

  auto run = run_well_ensemble(params.basis, ir.initial_state().amplitudes(), schedule, params.meter,
                               params.sampler, params.n, params.seed, params.integrator);
  report.t_meas = run.flow.schedule_end();
  report.ensemble = std::move(run.ensemble);
  const Ensemble& e = report.ensemble;

  const WellWavefunction at_meas = run.flow.state_at(report.t_meas, report.t_meas);
  report.norm_error = std::abs(at_meas.coefficients().norm() - 1.0);
  const CVector& c = at_meas.coefficients();
  const double w1 = std::norm(c(0)) + std::norm(c(1));
  if (w1 > 1.0 - 1e-10) report.final_mode = 1;
  if (w1 < 1e-10) report.final_mode = 2;

  const double unit = params.meter.a * params.meter.duration * kPi * kPi;
  const double mid = 2.5 * unit;
  const std::size_t last = e.times().size() - 1;
  const auto z0 = e.column(0, 2);
  const auto z1 = e.column(last, 2);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  std::size_t n_const = 0;
  for (std::size_t i = 0; i < z0.size(); ++i) {
    const double d = z1[i] - z0[i];
    lo = std::min(lo, d);
    hi = std::max(hi, d);
    sum += d;
    if (std::abs(d - unit) < std::abs(d - 4.0 * unit)) ++n_const;
  }
  report.displacement = sum / static_cast<double>(z0.size());
  report.displacement_spread = hi - lo;
  report.unanimous = n_const == 0 || n_const == z0.size();
  if (report.final_mode != 0) {
    report.expected_displacement = report.final_mode == 1 ? unit : 4.0 * unit;
    report.displacement_error = std::max(std::abs(lo - report.expected_displacement),
                                         std::abs(hi - report.expected_displacement));
  }

  // Oracle window and readout-time equivariance.
  const std::size_t ks = time_index(e, report.window.start);
  const std::size_t ke = time_index(e, report.window.end);
  const auto ys = e.column(ks, 1);
  const auto ye = e.column(ke, 1);
  for (std::size_t i = 0; i < ys.size(); ++i)
    report.window.max_abs_dy = std::max(report.window.max_abs_dy, std::abs(ye[i] - ys[i]));
  // v_y straight from the field at every recorded point inside the pulse.
  for (std::size_t k = ks; k <= ke && ke > ks; ++k) {
    const double t = e.times()[k];
    const double piece = k == ke ? t - 1e-9 * (report.window.end - report.window.start) : t;
    for (const auto& tr : e.trajectories)
      report.window.max_abs_vy =
          std::max(report.window.max_abs_vy, std::abs(run.flow.velocity(t, tr.points[k], piece)[1]));
  }
  const auto state_s = run.flow.state_at(report.window.start);
  const auto state_e = run.flow.state_at(report.window.end, report.window.end - 1e-12);
  report.window.x_l1_start = l1_or_nan(e, ks, 0, [&](double x) { return state_s.marginal_cdf_x(x); });
  report.window.x_l1_end = l1_or_nan(e, ke, 0, [&](double x) { return state_e.marginal_cdf_x(x); });
  report.window.y_l1_start = l1_or_nan(e, ks, 1, [&](double y) { return state_s.marginal_cdf_y(y); });
  report.window.y_l1_end = l1_or_nan(e, ke, 1, [&](double y) { return state_e.marginal_cdf_y(y); });
  const std::size_t km = time_index(e, report.t_meas);
  report.final_x_l1 = l1_or_nan(e, km, 0, [&](double x) { return at_meas.marginal_cdf_x(x); });
  report.final_y_l1 = l1_or_nan(e, km, 1, [&](double y) { return at_meas.marginal_cdf_y(y); });

  report.confidence = std::abs(report.displacement - mid) - 0.1 * mid;
  if (report.confidence < 0.0 || !report.unanimous)
    throw AmbiguousReadout("pointer displacement too close to the decision midpoint",
                           report.displacement);
  report.outcome = std::abs(report.displacement - unit) < std::abs(report.displacement - 4.0 * unit)
                       ? "constant"
                       : "balanced";
  return report;
}

std::vector<std::string> gate_scenario_names() {
  return {"hadamard", "t", "cnot", "free", "f0", "f1", "f2", "f3"};
}

GateScenario gate_scenario(const std::string& gate, const std::string& initial,
                           const WellBasis& basis, const WellCompileOptions& options,
                           double free_duration) {
  GateScenario s;
  s.gate = gate;
  auto pick = [&](const char* fallback) { s.initial = initial.empty() ? fallback : initial; };
  if (gate == "hadamard") {
    pick("1");
    s.schedule = schedule_for_gate(gates::hadamard(), "d", basis, options);
    s.target = kron(gates::hadamard(), gates::identity(2));
  } else if (gate == "t") {
    pick("0");
    s.schedule = schedule_for_gate(gates::t_gate(), "d", basis, options);
    s.target = kron(gates::t_gate(), gates::identity(2));
  } else if (gate == "cnot") {
    pick("+0");
    s.schedule = schedule_for_gate(GateApplication{GateKind::CNOT, "a", "d", 0.0, std::nullopt},
                                   basis, options);
    s.target = gates::cnot();
  } else if (gate == "free") {
    pick("+");
    const double t = free_duration > 0.0 ? free_duration : 2.0 * basis.beat_period();
    s.schedule.append({"free(d)", DrivePotential::free_well("d"), t});
  } else if (gate.size() == 2 && gate[0] == 'f') {
    pick("+-");
    const OracleFunction f = OracleFunction::parse(gate);
    s.schedule = schedule_for_gate(GateApplication{GateKind::Oracle, "", "", 0.0, f}, basis, options);
    s.target = oracle_unitary(f).matrix;
  } else {
    throw InvalidArgument("unknown gate scenario '" + gate + "'");
  }
  s.coefficients = register_from_label(s.initial);
  return s;
}

}  // namespace pilotq::well
