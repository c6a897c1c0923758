#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pilotq/bell.hpp"
#include "pilotq/schedule.hpp"
#include "pilotq/trajectories.hpp"
#include "pilotq/well_basis.hpp"

namespace pilotq::well {

enum class DriveKind { FreeWell, XDrive, OracleCoupling };

std::string drive_kind_name(DriveKind kind);

/// A drive on the two-well register, kept in its truncated matrix-element
/// form and split by the coordinates it acts on: data-local (x), aux-local
/// (y) and a data-diagonal coupling. Free evolution is switched on per
/// coordinate through the kinetic flags.
struct DrivePotential {
  DriveKind kind = DriveKind::FreeWell;
  /// "d" or "a" for XDrive, "d", "a" or "da" for FreeWell, "da" otherwise.
  std::string target = "d";
  /// The potential is strength * (delta V or U).
  double strength = 1.0;
  bool kinetic_x = false;
  bool kinetic_y = false;

  static DrivePotential free_well(const std::string& qubits);
  static DrivePotential x_drive(const std::string& target, bool with_free = false);
  static DrivePotential oracle_coupling(double strength, bool with_free = false);

  void validate() const;
  /// 2x2 matrix acting on the data mode (P in P (x) 1).
  CMatrix x_local() const;
  /// 2x2 matrix acting on the aux mode.
  CMatrix y_local() const;
  /// 4x4 data-diagonal coupling.
  CMatrix coupling() const;
  /// Full 4x4 generator, including omega Z on the kinetic coordinates.
  CMatrix generator(const WellBasis& basis) const;
  double phase_rate(const WellBasis& basis) const;
  /// The potential in position space; zero for pure free evolution.
  double position_form(double x, double y) const;
  std::string label() const;
};

struct DriveSegment {
  std::string label;
  DrivePotential drive;
  double duration = 0.0;
};

/// Drive segments in time order plus the global phase reconciled at the end.
class DriveSchedule {
 public:
  void append(DriveSegment segment);
  void append(const DriveSchedule& other);
  const std::vector<DriveSegment>& segments() const noexcept { return segments_; }
  bool empty() const noexcept { return segments_.empty(); }
  double total_duration() const;
  double phase_correction() const noexcept { return phase_correction_; }
  void add_phase_correction(double phi) { phase_correction_ += phi; }

  HamiltonianSchedule to_hamiltonian(const WellBasis& basis) const;
  CMatrix unitary(const WellBasis& basis) const;
  /// Segment dump with kind/target annotations.
  nlohmann::json to_json(const WellBasis& basis) const;

 private:
  std::vector<DriveSegment> segments_;
  double phase_correction_ = 0.0;
};

/// Pointer over z attached to the data well, one packet per data mode.
struct EnergyMeter {
  double a = 0.1;
  double duration = 1.0;
  double sigma = 0.05;

  void validate() const;
  /// a (n pi)^2 for data mode n = 1, 2.
  double shift_rate(int n) const;
};

/// Spectral wavefunction sum c_mn phi_{m+1}(x) phi_{n+1}(y), optionally times
/// a per-data-mode pointer packet over z.
class WellWavefunction {
 public:
  WellWavefunction(WellBasis basis, CVector coefficients, double global_phase = 0.0);
  /// One-qubit registers get the aux well parked in its ground mode.
  static WellWavefunction from_register(const RegisterState& reg, WellBasis basis);

  const WellBasis& basis() const noexcept { return basis_; }
  const CVector& coefficients() const noexcept { return c_; }
  double global_phase() const noexcept { return phase_; }
  const std::optional<std::array<bell::PointerPacket, 2>>& pointer() const noexcept {
    return pointer_;
  }
  void attach_pointer(const bell::PointerPacket& packet);
  void set_pointer(const std::array<bell::PointerPacket, 2>& packets) { pointer_ = packets; }

  /// Spatial part of data mode m (0 or 1): sum_n c_mn phi_{m+1}(x) phi_{n+1}(y).
  Complex branch(int m, double x, double y) const;
  Complex value(double x, double y) const;
  Complex value(double x, double y, double z) const;
  std::array<Complex, 2> gradient(double x, double y) const;
  std::array<Complex, 2> second_derivatives(double x, double y) const;
  double density(double x, double y) const;
  double density(double x, double y, double z) const;

  double marginal_density_x(double x) const;
  double marginal_density_y(double y) const;
  double marginal_cdf_x(double x) const;
  double marginal_cdf_y(double y) const;
  /// CDF of y given x (x fixed inside the well, density nonzero there).
  double conditional_cdf_y(double x, double y) const;
  /// CDF of the pointer marginal.
  double marginal_cdf_z(double z) const;

 private:
  WellBasis basis_;
  CVector c_;
  double phase_ = 0.0;
  std::optional<std::array<bell::PointerPacket, 2>> pointer_;
};

/// Same as WellWavefunction::value, named after the operation.
Complex wavefunction_at(const WellWavefunction& state, double x, double y);

/// (1/m) Im(grad psi / psi). Throws NodeError where |psi|^2 < node_epsilon.
std::array<double, 2> velocity_field(const WellWavefunction& state, double x, double y,
                                     double node_epsilon = 1e-12);

/// Continuity current of the truncated drive (kinetic flags ignored) over
/// |psi|^2.
std::array<double, 2> drive_velocity(const WellWavefunction& state, const DrivePotential& drive,
                                     double x, double y, double node_epsilon = 1e-12);

/// Drive current plus guidance velocity on the kinetic coordinates.
std::array<double, 2> segment_velocity(const WellWavefunction& state, const DrivePotential& drive,
                                       double x, double y, double node_epsilon = 1e-12);

/// -(1/2m) lap|psi| / |psi|; diagnostic only.
double quantum_potential(const WellWavefunction& state, double x, double y,
                         double node_epsilon = 1e-12);

/// Phase S of a e^{-i w t} phi_1 + b e^{i w t} phi_2 (a, b real), written as
/// arctan{tan(wt) (-a sin pi x + b sin 2 pi x) / (a sin pi x + b sin 2 pi x)},
/// and its x-derivative.
double beat_phase(double a, double b, double omega, double t, double x);
double beat_phase_gradient(double a, double b, double omega, double t, double x);

/// Translates data-mode n's pointer packet by a t (n pi)^2; coefficients stay.
WellWavefunction apply_energy_meter(const WellWavefunction& state, const EnergyMeter& meter,
                                    double t);

/// dz/dt while the meter is on; x and y are frozen.
double pointer_velocity(const WellWavefunction& state, const EnergyMeter& meter, double x,
                        double y, double z, double node_epsilon = 1e-12);

/// Pilot wave through a drive schedule followed by an optional meter window.
class WellFlow {
 public:
  WellFlow(WellBasis basis, CVector initial, DriveSchedule schedule,
           std::optional<EnergyMeter> meter = std::nullopt, double node_epsilon = 1e-12);

  const WellBasis& basis() const noexcept { return basis_; }
  const DriveSchedule& schedule() const noexcept { return schedule_; }
  const std::optional<EnergyMeter>& meter() const noexcept { return meter_; }
  double schedule_end() const noexcept { return schedule_end_; }
  double end() const;
  std::vector<double> breakpoints() const;
  std::vector<std::string> coordinates() const;

  /// Wavefunction at t. `piece` picks the segment at a boundary (any time
  /// strictly inside the wanted segment); defaults to t itself.
  WellWavefunction state_at(double t) const;
  WellWavefunction state_at(double t, double piece) const;
  Point velocity(double t, const Point& q, double piece) const;
  PiecewiseVelocityField field() const;
  /// Index of the segment containing `piece`, or none after the schedule.
  std::optional<std::size_t> segment_at(double piece) const;

 private:
  struct Cached {
    double start = 0.0;
    HermitianSpectrum spectrum;
    double phase_rate = 0.0;
    CVector c0;
    double phase0 = 0.0;
  };
  WellBasis basis_;
  DriveSchedule schedule_;
  std::optional<EnergyMeter> meter_;
  double node_epsilon_;
  std::vector<Cached> cache_;
  CVector c_end_;
  double phase_end_ = 0.0;
  double schedule_end_ = 0.0;
};

/// |psi|^2 over (x, y[, z]) with closed-form conditional CDFs.
class WellDensity : public ConfigurationDensity {
 public:
  explicit WellDensity(WellWavefunction state) : state_(std::move(state)) {}
  std::vector<std::string> coordinates() const override;
  std::pair<double, double> domain(std::size_t coord) const override;
  double density(const Point& q) const override;
  Point from_uniforms(const Point& u) const override;

 private:
  WellWavefunction state_;
};

}  // namespace pilotq::well
