#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pilotq/circuit.hpp"
#include "pilotq/trajectories.hpp"
#include "pilotq/well_dynamics.hpp"

namespace pilotq::well {

/// How the leftover global phase of a compiled gate is handled. Ledger
/// records it as a correction; Physical looks for an idle wait that
/// produces it and fails if none does.
enum class PhasePolicy { Ledger, Physical };

PhasePolicy parse_phase_policy(const std::string& name);
std::string phase_policy_name(PhasePolicy policy);

struct WellCompileOptions {
  /// Add H_free to every drive pulse (the compiled gates then become
  /// approximate).
  bool include_free_evolution = false;
  PhasePolicy phase = PhasePolicy::Ledger;
  /// Oracle coupling duration; the coupling is rescaled to keep U_f exact.
  double oracle_time = kPi / 2.0;
  int max_idle_periods = 64;

  void validate() const;
};

/// Duration t > 0 with 2 omega t = theta (mod 2 pi); 0 when theta = 0 (mod 2 pi).
double rz_wait(double theta, const WellBasis& basis);

/// R_z waits and an R_x pulse realising a single-qubit unitary on `target`.
DriveSchedule schedule_for_gate(const CMatrix& u, const std::string& target,
                                const WellBasis& basis, const WellCompileOptions& options = {});

/// Named gates; CNOT and the oracles use the coupling pulse.
DriveSchedule schedule_for_gate(const GateApplication& gate, const WellBasis& basis,
                                const WellCompileOptions& options = {});

DriveSchedule compile_well_circuit(const CircuitIR& ir, const WellBasis& basis,
                                   const WellCompileOptions& options = {});

/// Circuit unitary on the two-well register (one-qubit circuits act on d).
CMatrix well_target(const CircuitIR& ir);

/// max |schedule unitary - target|, global phase included.
double schedule_residual(const DriveSchedule& schedule, const CMatrix& target,
                         const WellBasis& basis);

/// Basis or +/- labels per qubit, e.g. "1", "+-", "01". One label parks the
/// aux well in its ground mode.
CVector register_from_label(const std::string& label);

struct WellEnsembleRun {
  WellFlow flow;
  std::vector<Point> initial;
  Ensemble ensemble;
};

/// Samples n configurations from the initial wavefunction (pointer attached
/// when a meter is given) and integrates them through the flow.
WellEnsembleRun run_well_ensemble(const WellBasis& basis, const CVector& initial,
                                  DriveSchedule schedule, std::optional<EnergyMeter> meter,
                                  const SamplerSpec& sampler, int n, std::uint64_t seed,
                                  const IntegratorConfig& integrator);

struct WellRunParams {
  WellBasis basis;
  EnergyMeter meter;
  WellCompileOptions compile;
  int n = 100;
  std::uint64_t seed = 1;
  IntegratorConfig integrator;
  SamplerSpec sampler;

  void validate() const;
};

/// Ensemble statistics across the oracle pulse. L1 distances are NaN for
/// ensembles smaller than 100.
struct OracleWindow {
  double start = 0.0;
  double end = 0.0;
  double max_abs_dy = 0.0;
  double max_abs_vy = 0.0;
  double x_l1_start = 0.0;
  double x_l1_end = 0.0;
  double y_l1_start = 0.0;
  double y_l1_end = 0.0;
};

struct WellRunReport {
  OracleFunction oracle{OracleFunction::Id::f0};
  std::string outcome;
  double displacement = 0.0;
  double displacement_spread = 0.0;
  double expected_displacement = 0.0;
  /// Largest per-trajectory deviation from a delta t (n pi)^2.
  double displacement_error = 0.0;
  /// |displacement - midpoint| - 0.1 midpoint.
  double confidence = 0.0;
  bool unanimous = true;
  /// Data mode (1 or 2) at readout; 0 if the data well is not definite.
  int final_mode = 0;
  double t_meas = 0.0;
  double final_x_l1 = 0.0;
  double final_y_l1 = 0.0;
  double norm_error = 0.0;
  OracleWindow window;
  DriveSchedule schedule;
  double schedule_residual = 0.0;
  Ensemble ensemble;
};

/// Deutsch(f) in the well: drive schedule, energy meter on the data well,
/// classification by the nearest of a dt pi^2 and 4 a dt pi^2. Throws
/// AmbiguousReadout within 10% of the midpoint.
WellRunReport run_deutsch_well(const OracleFunction& f, const WellRunParams& params);

struct GateScenario {
  std::string gate;
  std::string initial;
  CVector coefficients;
  DriveSchedule schedule;
  /// Gate the schedule should realise; none for free evolution.
  std::optional<CMatrix> target;
};

/// hadamard (from "1"), t ("0"), cnot ("+0"), free ("+", two beat periods)
/// and the oracles f0..f3 ("+-"). Empty `initial` picks the default;
/// free_duration <= 0 picks the default.
GateScenario gate_scenario(const std::string& gate, const std::string& initial,
                           const WellBasis& basis, const WellCompileOptions& options = {},
                           double free_duration = 0.0);

std::vector<std::string> gate_scenario_names();

}  // namespace pilotq::well
