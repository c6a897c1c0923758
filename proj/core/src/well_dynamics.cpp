#include "pilotq/well_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pilotq/errors.hpp"
#include "pilotq/gates.hpp"

namespace pilotq::well {

namespace {

bool inside(double v) { return v >= 0.0 && v <= 1.0; }

void require_inside(double x, double y) {
  if (!inside(x) || !inside(y)) throw InvalidArgument("point outside the unit well");
}

void require_node_free(double x, double y) {
  if (!inside(x) || !inside(y)) throw NodeError("point left the well", 0.0);
}

struct Modes {
  std::array<double, 2> f;
  std::array<double, 2> d1;
  std::array<double, 2> d2;
};

Modes modes_at(double x) {
  Modes m;
  for (int n = 0; n < 2; ++n) {
    m.f[n] = mode(n + 1, x);
    m.d1[n] = mode_d1(n + 1, x);
    m.d2[n] = -((n + 1) * kPi) * ((n + 1) * kPi) * m.f[n];
  }
  return m;
}

// psi, d/dx psi, d/dy psi without the global phase.
struct Local {
  Complex psi{0.0, 0.0};
  Complex dx{0.0, 0.0};
  Complex dy{0.0, 0.0};
  Complex dxx{0.0, 0.0};
  Complex dyy{0.0, 0.0};
};

Local local_values(const CVector& c, double x, double y) {
  const Modes mx = modes_at(x);
  const Modes my = modes_at(y);
  Local l;
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 2; ++n) {
      const Complex cmn = c(2 * m + n);
      l.psi += cmn * mx.f[m] * my.f[n];
      l.dx += cmn * mx.d1[m] * my.f[n];
      l.dy += cmn * mx.f[m] * my.d1[n];
      l.dxx += cmn * mx.d2[m] * my.f[n];
      l.dyy += cmn * mx.f[m] * my.d2[n];
    }
  return l;
}

enum class Route { X, Y, Split };

// Adds the current of generator piece K to (jx, jy); see drive_velocity.
void add_current(const CMatrix& k, Route route, const CVector& c, double x, double y,
                 const Modes& mx, const Modes& my, double& jx, double& jy) {
  if (k.isZero(0.0)) return;
  const CVector kc = k * c;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const double mab = std::imag(std::conj(c(a)) * kc(b)) + std::imag(std::conj(c(b)) * kc(a));
      if (mab == 0.0) continue;
      const int ma = a / 2, na = a % 2, mb = b / 2, nb = b % 2;
      const bool along_x = route == Route::X || (route == Route::Split && ma != mb);
      if (along_x)
        jx -= mab * mode_flux_integral(ma + 1, mb + 1, x) * my.f[na] * my.f[nb];
      else
        jy -= mab * mx.f[ma] * mx.f[mb] * mode_flux_integral(na + 1, nb + 1, y);
    }
}

}  // namespace

std::string drive_kind_name(DriveKind kind) {
  switch (kind) {
    case DriveKind::FreeWell: return "free";
    case DriveKind::XDrive: return "xdrive";
    case DriveKind::OracleCoupling: return "coupling";
  }
  return "?";
}

DrivePotential DrivePotential::free_well(const std::string& qubits) {
  DrivePotential d;
  d.kind = DriveKind::FreeWell;
  d.target = qubits;
  d.strength = 0.0;
  d.kinetic_x = qubits.find('d') != std::string::npos;
  d.kinetic_y = qubits.find('a') != std::string::npos;
  d.validate();
  return d;
}

DrivePotential DrivePotential::x_drive(const std::string& target, bool with_free) {
  DrivePotential d;
  d.kind = DriveKind::XDrive;
  d.target = target;
  d.kinetic_x = with_free && target == "d";
  d.kinetic_y = with_free && target == "a";
  d.validate();
  return d;
}

DrivePotential DrivePotential::oracle_coupling(double strength, bool with_free) {
  DrivePotential d;
  d.kind = DriveKind::OracleCoupling;
  d.target = "da";
  d.strength = strength;
  d.kinetic_x = with_free;
  d.kinetic_y = with_free;
  d.validate();
  return d;
}

void DrivePotential::validate() const {
  if (!std::isfinite(strength)) throw InvalidArgument("drive strength must be finite");
  switch (kind) {
    case DriveKind::FreeWell:
      if (target != "d" && target != "a" && target != "da")
        throw InvalidArgument("free evolution target must be d, a or da");
      break;
    case DriveKind::XDrive:
      if (target != "d" && target != "a") throw InvalidArgument("drive target must be d or a");
      break;
    case DriveKind::OracleCoupling:
      if (target != "da") throw InvalidArgument("coupling acts on both wells");
      break;
  }
}

CMatrix DrivePotential::x_local() const {
  if (kind == DriveKind::XDrive && target == "d") return strength * gates::pauli_x();
  return CMatrix::Zero(2, 2);
}

CMatrix DrivePotential::y_local() const {
  if (kind == DriveKind::XDrive && target == "a") return strength * gates::pauli_x();
  return CMatrix::Zero(2, 2);
}

CMatrix DrivePotential::coupling() const {
  if (kind == DriveKind::OracleCoupling) return strength * oracle_coupling_target();
  return CMatrix::Zero(4, 4);
}

CMatrix DrivePotential::generator(const WellBasis& basis) const {
  const CMatrix one = gates::identity(2);
  CMatrix h = kron(x_local(), one) + kron(one, y_local()) + coupling();
  const CMatrix wz = basis.omega() * gates::pauli_z();
  if (kinetic_x) h += kron(wz, one);
  if (kinetic_y) h += kron(one, wz);
  return h;
}

double DrivePotential::phase_rate(const WellBasis& basis) const {
  return (static_cast<int>(kinetic_x) + static_cast<int>(kinetic_y)) * basis.phase_rate();
}

double DrivePotential::position_form(double x, double y) const {
  switch (kind) {
    case DriveKind::FreeWell: return 0.0;
    case DriveKind::XDrive: return strength * delta_v(target == "d" ? x : y);
    case DriveKind::OracleCoupling: return strength * coupling_potential({}, x, y);
  }
  return 0.0;
}

std::string DrivePotential::label() const {
  std::string s = drive_kind_name(kind) + "(" + target + ")";
  if (kind != DriveKind::FreeWell && (kinetic_x || kinetic_y)) s += "+free";
  return s;
}

void DriveSchedule::append(DriveSegment segment) {
  segment.drive.validate();
  if (!(segment.duration >= 0.0)) throw InvalidArgument("negative segment duration");
  segments_.push_back(std::move(segment));
}

void DriveSchedule::append(const DriveSchedule& other) {
  for (const auto& s : other.segments_) append(s);
  phase_correction_ += other.phase_correction_;
}

double DriveSchedule::total_duration() const {
  double t = 0.0;
  for (const auto& s : segments_) t += s.duration;
  return t;
}

HamiltonianSchedule DriveSchedule::to_hamiltonian(const WellBasis& basis) const {
  HamiltonianSchedule h(4);
  for (const auto& s : segments_)
    h.append(ScheduleSegment{s.label, HermitianGenerator{s.drive.generator(basis), s.duration},
                             s.drive.phase_rate(basis)});
  h.add_phase_correction(phase_correction_);
  return h;
}

CMatrix DriveSchedule::unitary(const WellBasis& basis) const {
  return to_hamiltonian(basis).unitary();
}

nlohmann::json DriveSchedule::to_json(const WellBasis& basis) const {
  nlohmann::json out = schedule_to_json(to_hamiltonian(basis));
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    out[k]["kind"] = drive_kind_name(segments_[k].drive.kind);
    out[k]["target"] = segments_[k].drive.target;
    out[k]["strength"] = segments_[k].drive.strength;
  }
  return out;
}

void EnergyMeter::validate() const {
  if (a == 0.0 || !std::isfinite(a)) throw InvalidArgument("meter coupling a must be nonzero");
  if (!(duration > 0.0)) throw InvalidArgument("meter duration must be positive");
  if (!(sigma > 0.0)) throw InvalidArgument("pointer width must be positive");
}

double EnergyMeter::shift_rate(int n) const {
  if (n != 1 && n != 2) throw InvalidArgument("well mode index must be 1 or 2");
  return a * (n * kPi) * (n * kPi);
}

WellWavefunction::WellWavefunction(WellBasis basis, CVector coefficients, double global_phase)
    : basis_(basis), c_(std::move(coefficients)), phase_(global_phase) {
  basis_.validate();
  if (c_.size() != 4) throw InvalidArgument("well wavefunction needs 4 coefficients");
  if (std::abs(c_.norm() - 1.0) > 1e-12) throw InvalidArgument("coefficients are not normalized");
}

WellWavefunction WellWavefunction::from_register(const RegisterState& reg, WellBasis basis) {
  if (reg.qubits() == 2) return WellWavefunction(basis, reg.amplitudes());
  CVector ground(2);
  ground << 1.0, 0.0;
  return WellWavefunction(basis, kron(reg.amplitudes(), ground));
}

void WellWavefunction::attach_pointer(const bell::PointerPacket& packet) {
  packet.validate();
  pointer_ = std::array<bell::PointerPacket, 2>{packet, packet};
}

Complex WellWavefunction::branch(int m, double x, double y) const {
  require_inside(x, y);
  Complex s{0.0, 0.0};
  for (int n = 0; n < 2; ++n) s += c_(2 * m + n) * mode(n + 1, y);
  return s * mode(m + 1, x) * std::polar(1.0, phase_);
}

Complex WellWavefunction::value(double x, double y) const {
  require_inside(x, y);
  return local_values(c_, x, y).psi * std::polar(1.0, phase_);
}

Complex WellWavefunction::value(double x, double y, double z) const {
  if (!pointer_) throw InvalidArgument("no pointer attached");
  return branch(0, x, y) * (*pointer_)[0].amplitude(z) + branch(1, x, y) * (*pointer_)[1].amplitude(z);
}

std::array<Complex, 2> WellWavefunction::gradient(double x, double y) const {
  require_inside(x, y);
  const Local l = local_values(c_, x, y);
  const Complex p = std::polar(1.0, phase_);
  return {l.dx * p, l.dy * p};
}

std::array<Complex, 2> WellWavefunction::second_derivatives(double x, double y) const {
  require_inside(x, y);
  const Local l = local_values(c_, x, y);
  const Complex p = std::polar(1.0, phase_);
  return {l.dxx * p, l.dyy * p};
}

double WellWavefunction::density(double x, double y) const {
  if (!inside(x) || !inside(y)) return 0.0;
  return std::norm(local_values(c_, x, y).psi);
}

double WellWavefunction::density(double x, double y, double z) const {
  if (!inside(x) || !inside(y)) return 0.0;
  return std::norm(value(x, y, z));
}

namespace {

// sum over (m, m') of Re(R_mm') F_mm'(s), where F is either the mode product
// or its integral.
template <class F>
double reduced_sum(const Eigen::Matrix2cd& r, F&& f) {
  double s = 0.0;
  for (int m = 0; m < 2; ++m)
    for (int k = 0; k < 2; ++k) s += std::real(r(m, k)) * f(m + 1, k + 1);
  return s;
}

Eigen::Matrix2cd reduced_x(const CVector& c) {
  Eigen::Matrix2cd r;
  for (int m = 0; m < 2; ++m)
    for (int k = 0; k < 2; ++k)
      r(m, k) = c(2 * m) * std::conj(c(2 * k)) + c(2 * m + 1) * std::conj(c(2 * k + 1));
  return r;
}

Eigen::Matrix2cd reduced_y(const CVector& c) {
  Eigen::Matrix2cd r;
  for (int n = 0; n < 2; ++n)
    for (int k = 0; k < 2; ++k) r(n, k) = c(n) * std::conj(c(k)) + c(2 + n) * std::conj(c(2 + k));
  return r;
}

}  // namespace

double WellWavefunction::marginal_density_x(double x) const {
  if (!inside(x)) return 0.0;
  return reduced_sum(reduced_x(c_), [&](int m, int k) { return mode(m, x) * mode(k, x); });
}

double WellWavefunction::marginal_density_y(double y) const {
  if (!inside(y)) return 0.0;
  return reduced_sum(reduced_y(c_), [&](int m, int k) { return mode(m, y) * mode(k, y); });
}

double WellWavefunction::marginal_cdf_x(double x) const {
  const double s = std::clamp(x, 0.0, 1.0);
  return reduced_sum(reduced_x(c_), [&](int m, int k) { return mode_overlap_cdf(m, k, s); });
}

double WellWavefunction::marginal_cdf_y(double y) const {
  const double s = std::clamp(y, 0.0, 1.0);
  return reduced_sum(reduced_y(c_), [&](int m, int k) { return mode_overlap_cdf(m, k, s); });
}

double WellWavefunction::conditional_cdf_y(double x, double y) const {
  std::array<Complex, 2> b{};
  for (int n = 0; n < 2; ++n)
    for (int m = 0; m < 2; ++m) b[n] += c_(2 * m + n) * mode(m + 1, x);
  const double w = std::norm(b[0]) + std::norm(b[1]);
  if (w <= 0.0) throw NodeError("conditional density undefined on a node line", 0.0);
  const double s = std::clamp(y, 0.0, 1.0);
  double cdf = 0.0;
  for (int n = 0; n < 2; ++n)
    for (int k = 0; k < 2; ++k)
      cdf += std::real(b[n] * std::conj(b[k])) * mode_overlap_cdf(n + 1, k + 1, s);
  return cdf / w;
}

double WellWavefunction::marginal_cdf_z(double z) const {
  if (!pointer_) throw InvalidArgument("no pointer attached");
  // Different data modes are orthogonal in x, so the branches add in weight.
  double cdf = 0.0;
  for (int m = 0; m < 2; ++m)
    cdf += (std::norm(c_(2 * m)) + std::norm(c_(2 * m + 1))) * (*pointer_)[m].cdf(z);
  return cdf;
}

Complex wavefunction_at(const WellWavefunction& state, double x, double y) {
  return state.value(x, y);
}

std::array<double, 2> velocity_field(const WellWavefunction& state, double x, double y,
                                     double node_epsilon) {
  require_node_free(x, y);
  const Local l = local_values(state.coefficients(), x, y);
  const double rho = std::norm(l.psi);
  if (rho < node_epsilon) throw NodeError("guidance evaluated at a node", rho);
  const double inv = 1.0 / (state.basis().mass * rho);
  return {std::imag(std::conj(l.psi) * l.dx) * inv, std::imag(std::conj(l.psi) * l.dy) * inv};
}

std::array<double, 2> drive_velocity(const WellWavefunction& state, const DrivePotential& drive,
                                     double x, double y, double node_epsilon) {
  require_node_free(x, y);
  const CVector& c = state.coefficients();
  const Modes mx = modes_at(x);
  const Modes my = modes_at(y);
  Complex psi{0.0, 0.0};
  for (int a = 0; a < 4; ++a) psi += c(a) * mx.f[a / 2] * my.f[a % 2];
  const double rho = std::norm(psi);
  if (rho < node_epsilon) throw NodeError("drive current evaluated at a node", rho);

  // d rho/dt = sum_ab M_ab Phi_a Phi_b; each piece's flux is the integral of
  // that along the coordinate it acts on, so it vanishes at both walls.
  double jx = 0.0;
  double jy = 0.0;
  const CMatrix one = gates::identity(2);
  add_current(kron(drive.x_local(), one), Route::X, c, x, y, mx, my, jx, jy);
  add_current(kron(one, drive.y_local()), Route::Y, c, x, y, mx, my, jx, jy);
  add_current(drive.coupling(), Route::Split, c, x, y, mx, my, jx, jy);
  return {jx / rho, jy / rho};
}

std::array<double, 2> segment_velocity(const WellWavefunction& state, const DrivePotential& drive,
                                       double x, double y, double node_epsilon) {
  std::array<double, 2> v{0.0, 0.0};
  if (drive.kind != DriveKind::FreeWell) v = drive_velocity(state, drive, x, y, node_epsilon);
  if (drive.kinetic_x || drive.kinetic_y) {
    const auto g = velocity_field(state, x, y, node_epsilon);
    if (drive.kinetic_x) v[0] += g[0];
    if (drive.kinetic_y) v[1] += g[1];
  } else if (drive.kind == DriveKind::FreeWell) {
    // Nothing evolves, but still refuse to sit on a node.
    if (state.density(x, y) < node_epsilon) throw NodeError("parked at a node", state.density(x, y));
  }
  return v;
}

double quantum_potential(const WellWavefunction& state, double x, double y, double node_epsilon) {
  require_node_free(x, y);
  const Local l = local_values(state.coefficients(), x, y);
  const double rho = std::norm(l.psi);
  if (rho < node_epsilon) throw NodeError("quantum potential evaluated at a node", rho);
  // lap R / R = Re(lap psi / psi) + |grad S|^2
  const Complex lap = (l.dxx + l.dyy) / l.psi;
  const double sx = std::imag(l.dx / l.psi);
  const double sy = std::imag(l.dy / l.psi);
  return -(std::real(lap) + sx * sx + sy * sy) / (2.0 * state.basis().mass);
}

double beat_phase(double a, double b, double omega, double t, double x) {
  const double s1 = std::sin(kPi * x);
  const double s2 = std::sin(2.0 * kPi * x);
  return std::atan(std::tan(omega * t) * (-a * s1 + b * s2) / (a * s1 + b * s2));
}

double beat_phase_gradient(double a, double b, double omega, double t, double x) {
  const double s1 = std::sin(kPi * x);
  const double s2 = std::sin(2.0 * kPi * x);
  const double c1 = kPi * std::cos(kPi * x);
  const double c2 = 2.0 * kPi * std::cos(2.0 * kPi * x);
  const double tw = std::tan(omega * t);
  const double num = -a * s1 + b * s2;
  const double den = a * s1 + b * s2;
  const double u = tw * num / den;
  const double du = tw * ((-a * c1 + b * c2) * den - num * (a * c1 + b * c2)) / (den * den);
  return du / (1.0 + u * u);
}

WellWavefunction apply_energy_meter(const WellWavefunction& state, const EnergyMeter& meter,
                                    double t) {
  meter.validate();
  if (!state.pointer()) throw InvalidArgument("energy meter needs a pointer attached");
  if (t < 0.0 || t > meter.duration * (1.0 + 1e-12))
    throw InvalidArgument("meter time outside the interaction window");
  auto packets = *state.pointer();
  for (int m = 0; m < 2; ++m) {
    packets[m].center += meter.shift_rate(m + 1) * t;
    packets[m].shift_rate = meter.shift_rate(m + 1);
  }
  WellWavefunction out = state;
  out.set_pointer(packets);
  return out;
}

double pointer_velocity(const WellWavefunction& state, const EnergyMeter& meter, double x, double y,
                        double z, double node_epsilon) {
  require_node_free(x, y);
  if (!state.pointer()) throw InvalidArgument("energy meter needs a pointer attached");
  std::array<Complex, 2> psi;
  std::array<double, 2> r;
  for (int m = 0; m < 2; ++m) {
    psi[m] = state.branch(m, x, y) * (*state.pointer())[m].amplitude(z);
    r[m] = meter.shift_rate(m + 1);
  }
  const double rho = std::norm(psi[0] + psi[1]);
  if (rho < node_epsilon) throw NodeError("pointer current evaluated at a node", rho);
  double j = 0.0;
  for (int k = 0; k < 2; ++k)
    for (int m = 0; m < 2; ++m) j += 0.5 * (r[k] + r[m]) * std::real(std::conj(psi[k]) * psi[m]);
  return j / rho;
}

WellFlow::WellFlow(WellBasis basis, CVector initial, DriveSchedule schedule,
                   std::optional<EnergyMeter> meter, double node_epsilon)
    : basis_(basis), schedule_(std::move(schedule)), meter_(meter), node_epsilon_(node_epsilon) {
  basis_.validate();
  if (meter_) meter_->validate();
  if (!(node_epsilon_ > 0.0)) throw InvalidArgument("node tolerance must be positive");
  CVector c = std::move(initial);
  WellWavefunction check(basis_, c);  // validates size and norm
  double t = 0.0;
  double phase = 0.0;
  for (const auto& seg : schedule_.segments()) {
    Cached k;
    k.start = t;
    k.spectrum = hermitian_spectrum(seg.drive.generator(basis_));
    k.phase_rate = seg.drive.phase_rate(basis_);
    k.c0 = k.spectrum.eigenvectors.adjoint() * c;
    k.phase0 = phase;
    c = matrix_exponential(k.spectrum, seg.duration) * c;
    phase -= k.phase_rate * seg.duration;
    t += seg.duration;
    cache_.push_back(std::move(k));
  }
  c_end_ = c;
  phase_end_ = phase + schedule_.phase_correction();
  schedule_end_ = t;
}

double WellFlow::end() const { return schedule_end_ + (meter_ ? meter_->duration : 0.0); }

std::vector<double> WellFlow::breakpoints() const {
  std::vector<double> b;
  for (const auto& k : cache_) b.push_back(k.start);
  b.push_back(schedule_end_);
  return b;
}

std::vector<std::string> WellFlow::coordinates() const {
  if (meter_) return {"x", "y", "z"};
  return {"x", "y"};
}

std::optional<std::size_t> WellFlow::segment_at(double piece) const {
  if (cache_.empty() || piece >= schedule_end_) return std::nullopt;
  for (std::size_t k = cache_.size(); k-- > 0;)
    if (piece >= cache_[k].start) return k;
  return 0;
}

WellWavefunction WellFlow::state_at(double t) const { return state_at(t, t); }

WellWavefunction WellFlow::state_at(double t, double piece) const {
  const auto seg = segment_at(piece);
  std::optional<WellWavefunction> out;
  if (seg) {
    const Cached& k = cache_[*seg];
    const double local = t - k.start;
    CVector w = k.c0;
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) *= std::polar(1.0, -k.spectrum.eigenvalues(i) * local);
    CVector c = k.spectrum.eigenvectors * w;
    out.emplace(basis_, std::move(c), k.phase0 - k.phase_rate * local);
  } else {
    out.emplace(basis_, c_end_, phase_end_);
  }
  if (meter_) {
    out->attach_pointer(bell::PointerPacket{0.0, meter_->sigma, 0.0});
    if (!seg && t > schedule_end_)
      return apply_energy_meter(*out, *meter_, std::min(t - schedule_end_, meter_->duration));
  }
  return *out;
}

Point WellFlow::velocity(double t, const Point& q, double piece) const {
  const auto seg = segment_at(piece);
  const WellWavefunction state = state_at(t, piece);
  Point v(meter_ ? 3 : 2, 0.0);
  if (seg) {
    const auto xy = segment_velocity(state, schedule_.segments()[*seg].drive, q[0], q[1], node_epsilon_);
    v[0] = xy[0];
    v[1] = xy[1];
  } else if (meter_ && piece >= schedule_end_) {
    v[2] = pointer_velocity(state, *meter_, q[0], q[1], q[2], node_epsilon_);
  }
  return v;
}

PiecewiseVelocityField WellFlow::field() const {
  return [this](double t, const Point& q, double piece) { return velocity(t, q, piece); };
}

std::vector<std::string> WellDensity::coordinates() const {
  if (state_.pointer()) return {"x", "y", "z"};
  return {"x", "y"};
}

std::pair<double, double> WellDensity::domain(std::size_t coord) const {
  if (coord < 2) return {0.0, 1.0};
  return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
}

double WellDensity::density(const Point& q) const {
  if (q.size() == 3) return state_.density(q[0], q[1], q[2]);
  return state_.density(q.at(0), q.at(1));
}

Point WellDensity::from_uniforms(const Point& u) const {
  Point q(coordinates().size());
  q[0] = invert_cdf([&](double x) { return state_.marginal_cdf_x(x); }, 0.0, 1.0, u.at(0));
  q[1] = invert_cdf([&](double y) { return state_.conditional_cdf_y(q[0], y); }, 0.0, 1.0, u.at(1));
  if (q.size() == 3) {
    const auto& p = *state_.pointer();
    if (p[0].center != p[1].center || p[0].width != p[1].width)
      throw InvalidArgument("equilibrium sampling needs a common pointer packet");
    q[2] = p[0].quantile(u.at(2));
  }
  return q;
}

}  // namespace pilotq::well
