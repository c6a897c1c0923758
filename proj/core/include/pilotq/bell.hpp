#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "pilotq/gates.hpp"
#include "pilotq/schedule.hpp"
#include "pilotq/trajectories.hpp"

namespace pilotq::bell {

/// Gaussian packet (2 pi s^2)^{-1/4} exp(-(y - c)^2 / (4 s^2)).
struct PointerPacket {
  double center = 0.0;
  double width = 0.05;
  /// Velocity at which the packet is being translated (0 when idle).
  double shift_rate = 0.0;

  void validate() const;
  double amplitude(double y) const;
  double density(double y) const;
  double cdf(double y) const;
  double quantile(double u) const;
};

/// H = -i g (Z (x) 1) d/dy switched on for `duration`.
struct MeasurementCoupling {
  double g = 1.0;
  double duration = 1.0;

  void validate() const;
  /// Eigenvalue of Z on data mode m: +1 for m = 0, -1 for m = 1.
  static double eigenvalue(int m) { return m == 0 ? 1.0 : -1.0; }
};

/// Register amplitudes r_mn with one pointer packet per component:
/// psi_mn(y) = r_mn * packet_mn(y).
class BellState {
 public:
  /// Factorized state: every component carries `packet`.
  BellState(RegisterState reg, PointerPacket packet);

  const RegisterState& register_state() const noexcept { return reg_; }
  const std::array<PointerPacket, 4>& packets() const noexcept { return packets_; }
  /// Coupling strength currently switched on (0 outside measurement).
  double active_coupling() const noexcept { return coupling_; }
  bool factorized() const;

  Complex component(int mn, double y) const;
  double density(double y) const;
  /// Integral of the density over y, Gaussian components in closed form.
  double total_norm() const;

 private:
  friend BellState apply_measurement(const BellState&, const MeasurementCoupling&, double);
  RegisterState reg_;
  std::array<PointerPacket, 4> packets_;
  double coupling_ = 0.0;
};

/// Rigidly translates packet mn by z_m g t; amplitudes are untouched.
BellState apply_measurement(const BellState& state, const MeasurementCoupling& coupling, double t);

/// j / rho = g sum z_m |psi_mn|^2 / sum |psi_mn|^2, zero while no coupling is
/// active. Throws NodeError where rho < node_epsilon.
double pointer_velocity(const BellState& state, double y, double node_epsilon = 1e-12);

/// |psi(y)|^2 of a Bell state as a sampler input.
class PointerDensity : public ConfigurationDensity {
 public:
  explicit PointerDensity(BellState state) : state_(std::move(state)) {}
  std::vector<std::string> coordinates() const override { return {"y"}; }
  std::pair<double, double> domain(std::size_t) const override;
  double density(const Point& q) const override;
  Point from_uniforms(const Point& u) const override;

 private:
  BellState state_;
};

struct BellRunParams {
  double g = 1.0;
  double sigma = 0.05;
  double interaction_time = 1.0;
  int n = 100;
  std::uint64_t seed = 1;
  IntegratorConfig integrator;
  GateTimings timings;
  SamplerSpec sampler;

  void validate() const;
};

struct BellRunReport {
  OracleFunction oracle{OracleFunction::Id::f0};
  std::string outcome;
  /// Mean displacement y(end) - y(0).
  double displacement = 0.0;
  /// max - min of the per-trajectory displacements.
  double displacement_spread = 0.0;
  /// Largest |y(t) - y(0)| before the coupling is switched on.
  double premeasurement_drift = 0.0;
  /// Largest change of a pairwise separation over the run.
  double separation_drift = 0.0;
  /// |displacement| - 3 sigma: distance from the ambiguity threshold.
  double confidence = 0.0;
  bool unanimous = true;
  double t_meas = 0.0;
  RegisterState final_register = RegisterState::basis("00");
  HamiltonianSchedule schedule;
  Ensemble ensemble;
};

/// Compiles Deutsch(f), evolves the register with the pointer at rest,
/// couples the pointer for the interaction time and integrates n pointer
/// trajectories. Throws AmbiguousReadout when |displacement| < 3 sigma.
BellRunReport run_deutsch_bell(const OracleFunction& f, const BellRunParams& params);

}  // namespace pilotq::bell
