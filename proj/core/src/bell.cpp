#include "pilotq/bell.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/erf.hpp>

#include "pilotq/circuit.hpp"
#include "pilotq/errors.hpp"

namespace pilotq::bell {

void PointerPacket::validate() const {
  if (!(width > 0.0) || !std::isfinite(width)) throw InvalidArgument("packet width must be positive");
  if (!std::isfinite(center) || !std::isfinite(shift_rate))
    throw InvalidArgument("packet parameters must be finite");
}

double PointerPacket::amplitude(double y) const {
  const double u = (y - center) / width;
  return std::pow(2.0 * kPi * width * width, -0.25) * std::exp(-0.25 * u * u);
}

double PointerPacket::density(double y) const {
  const double a = amplitude(y);
  return a * a;
}

double PointerPacket::cdf(double y) const {
  return 0.5 * std::erfc(-(y - center) / (width * std::sqrt(2.0)));
}

double PointerPacket::quantile(double u) const {
  return center + width * std::sqrt(2.0) * boost::math::erf_inv(2.0 * u - 1.0);
}

void MeasurementCoupling::validate() const {
  if (g == 0.0 || !std::isfinite(g)) throw InvalidArgument("coupling g must be nonzero");
  if (!(duration > 0.0)) throw InvalidArgument("interaction time must be positive");
}

BellState::BellState(RegisterState reg, PointerPacket packet) : reg_(std::move(reg)) {
  if (reg_.qubits() != 2) throw InvalidArgument("Bell state needs a two-qubit register");
  packet.validate();
  packets_.fill(packet);
}

bool BellState::factorized() const {
  return std::all_of(packets_.begin(), packets_.end(), [&](const PointerPacket& p) {
    return p.center == packets_[0].center && p.width == packets_[0].width;
  });
}

Complex BellState::component(int mn, double y) const {
  return reg_.amplitudes()(mn) * packets_[static_cast<std::size_t>(mn)].amplitude(y);
}

double BellState::density(double y) const {
  // Spin indices are internal: the components never interfere.
  double rho = 0.0;
  for (int mn = 0; mn < 4; ++mn) rho += std::norm(component(mn, y));
  return rho;
}

double BellState::total_norm() const {
  double s = 0.0;
  for (int mn = 0; mn < 4; ++mn) s += std::norm(reg_.amplitudes()(mn));
  return s;
}

BellState apply_measurement(const BellState& state, const MeasurementCoupling& coupling, double t) {
  coupling.validate();
  if (t < 0.0 || t > coupling.duration * (1.0 + 1e-12))
    throw InvalidArgument("measurement time outside the interaction window");
  BellState out = state;
  for (int mn = 0; mn < 4; ++mn) {
    const double z = MeasurementCoupling::eigenvalue(mn / 2);
    auto& p = out.packets_[static_cast<std::size_t>(mn)];
    p.center += z * coupling.g * t;
    p.shift_rate = z * coupling.g;
  }
  out.coupling_ = coupling.g;
  return out;
}

double pointer_velocity(const BellState& state, double y, double node_epsilon) {
  const double rho = state.density(y);
  if (rho < node_epsilon) throw NodeError("pointer density below node tolerance", rho);
  if (state.active_coupling() == 0.0) return 0.0;
  double j = 0.0;
  for (int mn = 0; mn < 4; ++mn)
    j += state.packets()[static_cast<std::size_t>(mn)].shift_rate * std::norm(state.component(mn, y));
  return j / rho;
}

std::pair<double, double> PointerDensity::domain(std::size_t) const {
  return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
}

double PointerDensity::density(const Point& q) const { return state_.density(q.at(0)); }

Point PointerDensity::from_uniforms(const Point& u) const {
  if (state_.factorized()) return {state_.packets()[0].quantile(u.at(0))};
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& p : state_.packets()) {
    lo = std::min(lo, p.center - 40.0 * p.width);
    hi = std::max(hi, p.center + 40.0 * p.width);
  }
  const auto& amps = state_.register_state().amplitudes();
  auto cdf = [&](double y) {
    double c = 0.0;
    for (int mn = 0; mn < 4; ++mn)
      c += std::norm(amps(mn)) * state_.packets()[static_cast<std::size_t>(mn)].cdf(y);
    return c;
  };
  return {invert_cdf(cdf, lo, hi, u.at(0))};
}

void BellRunParams::validate() const {
  MeasurementCoupling{g, interaction_time}.validate();
  PointerPacket{0.0, sigma, 0.0}.validate();
  if (n < 1) throw InvalidArgument("ensemble size must be at least 1");
  integrator.validate();
}

BellRunReport run_deutsch_bell(const OracleFunction& f, const BellRunParams& params) {
  params.validate();
  BellRunReport report;
  report.oracle = f;
  const CircuitIR ir = deutsch_circuit(f);
  report.schedule = compile_circuit(ir, params.timings);
  report.t_meas = report.schedule.total_duration();
  report.final_register = evolve_register(ir.initial_state(), report.schedule, report.t_meas);

  const PointerPacket packet{0.0, params.sigma, 0.0};
  const MeasurementCoupling coupling{params.g, params.interaction_time};
  // The pointer carries no free Hamiltonian, so before t_meas its packet is
  // the same for every register state and the velocity is zero.
  const BellState initial(ir.initial_state(), packet);
  const BellState at_meas(report.final_register, packet);

  const auto start = sample_initial(params.sampler, PointerDensity(initial), params.n, params.seed,
                                    params.integrator.node_epsilon);
  const double t_meas = report.t_meas;
  const double eps = params.integrator.node_epsilon;
  PiecewiseVelocityField field = [&](double t, const Point& q, double piece) -> Point {
    if (piece < t_meas) return {pointer_velocity(initial, q[0], eps)};
    const double s = std::clamp(t - t_meas, 0.0, coupling.duration);
    return {pointer_velocity(apply_measurement(at_meas, coupling, s), q[0], eps)};
  };
  report.ensemble = integrate_ensemble(start, field, 0.0, t_meas + coupling.duration,
                                       params.integrator, {"y"}, {t_meas});

  const auto& times = report.ensemble.times();
  const std::size_t last = times.size() - 1;
  const auto y0 = report.ensemble.column(0, 0);
  const auto y1 = report.ensemble.column(last, 0);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  for (std::size_t i = 0; i < y0.size(); ++i) {
    const double d = y1[i] - y0[i];
    lo = std::min(lo, d);
    hi = std::max(hi, d);
    sum += d;
  }
  report.displacement = sum / static_cast<double>(y0.size());
  report.displacement_spread = hi - lo;
  report.unanimous = (lo > 0.0) == (hi > 0.0);

  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto yk = report.ensemble.column(k, 0);
    for (std::size_t i = 0; i < yk.size(); ++i) {
      if (times[k] < t_meas)
        report.premeasurement_drift = std::max(report.premeasurement_drift, std::abs(yk[i] - y0[i]));
      // Drift of every separation relative to trajectory 0.
      report.separation_drift = std::max(report.separation_drift,
                                         std::abs((yk[i] - yk[0]) - (y0[i] - y0[0])));
    }
  }

  const double threshold = 3.0 * params.sigma;
  report.confidence = std::abs(report.displacement) - threshold;
  if (std::abs(report.displacement) < threshold || !report.unanimous)
    throw AmbiguousReadout("pointer packets overlap at readout", report.displacement);
  // z = +1 (data in |0>) moves the pointer forward: f constant.
  report.outcome = (report.displacement > 0.0) == (params.g > 0.0) ? "constant" : "balanced";
  return report;
}

}  // namespace pilotq::bell
