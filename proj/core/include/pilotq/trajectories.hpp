#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace pilotq {

/// A configuration-space point; which coordinates it holds is fixed by the
/// owning ensemble (e.g. {"y"} or {"x", "y", "z"}).
using Point = std::vector<double>;

struct Trajectory {
  int id = 0;
  std::vector<double> times;
  std::vector<Point> points;
};

struct Ensemble {
  std::vector<std::string> coordinates;
  std::vector<Trajectory> trajectories;

  const std::vector<double>& times() const;
  std::size_t size() const noexcept { return trajectories.size(); }
  /// Coordinate `coord` of every trajectory at sample `time_index`.
  std::vector<double> column(std::size_t time_index, std::size_t coord) const;
  std::size_t coordinate_index(const std::string& name) const;
  /// Throws InvalidArgument unless sample times are strictly monotone and
  /// shared by all trajectories.
  void validate() const;
};

struct IntegratorConfig {
  double dt = 1e-3;
  double dt_min = 1e-8;
  double node_epsilon = 1e-12;
  int sample_stride = 1;
  int threads = 1;

  void validate() const;
};

/// Velocity at (t, q). May throw NodeError where the density vanishes.
using VelocityField = std::function<Point(double t, const Point& q)>;

/// Same, plus the midpoint of the breakpoint interval being integrated, so a
/// field that jumps at a breakpoint can be evaluated with the left limit at
/// the interval's end.
using PiecewiseVelocityField = std::function<Point(double t, const Point& q, double piece)>;

/// Fixed-step RK4 from t0 to t1 (t1 < t0 integrates backwards). Steps never
/// straddle a breakpoint, so piecewise fields are integrated segment by
/// segment; every breakpoint is also a sample time. Steps that hit a node
/// are halved down to dt_min, after which IntegrationError is thrown.
Ensemble integrate_ensemble(const std::vector<Point>& initial, const VelocityField& field,
                            double t0, double t1, const IntegratorConfig& config,
                            std::vector<std::string> coordinates,
                            std::vector<double> breakpoints = {});
Ensemble integrate_ensemble(const std::vector<Point>& initial,
                            const PiecewiseVelocityField& field, double t0, double t1,
                            const IntegratorConfig& config, std::vector<std::string> coordinates,
                            std::vector<double> breakpoints = {});

/// Equilibrium density of a model's initial wavefunction.
class ConfigurationDensity {
 public:
  virtual ~ConfigurationDensity() = default;
  virtual std::vector<std::string> coordinates() const = 0;
  /// Region outside of which the wavefunction vanishes identically.
  virtual std::pair<double, double> domain(std::size_t coord) const = 0;
  /// |psi_0(q)|^2
  virtual double density(const Point& q) const = 0;
  /// Maps one uniform per coordinate to a configuration distributed as
  /// |psi_0|^2 (sequential conditional inverse CDFs).
  virtual Point from_uniforms(const Point& u) const = 0;
};

/// Piecewise-constant density on [lo, hi] with equal-width bins.
struct HistogramDensity {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> probabilities;

  void validate() const;
  /// Inverse of the piecewise-linear CDF.
  double quantile(double u) const;
};

struct SamplerSpec {
  enum class Kind { Equilibrium, Custom };

  Kind kind = Kind::Equilibrium;
  /// Latin-hypercube strata per coordinate (coarse-grained equilibrium)
  /// instead of independent uniforms.
  bool stratified = true;
  /// One histogram per coordinate for Kind::Custom.
  std::vector<HistogramDensity> histograms;

  static SamplerSpec equilibrium(bool stratified = true);
  static SamplerSpec custom(std::vector<HistogramDensity> histograms);
  static SamplerSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  std::string describe() const;
};

/// Draws n configurations reproducibly from `seed`. Custom densities with
/// mass outside the wavefunction's support are rejected.
std::vector<Point> sample_initial(const SamplerSpec& spec, const ConfigurationDensity& psi0,
                                  int n, std::uint64_t seed, double node_epsilon = 1e-12);

/// Smallest x in [lo, hi] with cdf(x) >= u, by bisection.
double invert_cdf(const std::function<double(double)>& cdf, double lo, double hi, double u);

struct HistogramRow {
  double left = 0.0;
  double right = 0.0;
  std::size_t count = 0;
  double mass = 0.0;
};

/// Counts of `values` in equal bins of [lo, hi] next to the bin masses of
/// the reference distribution given by its CDF.
std::vector<HistogramRow> density_histogram(std::span<const double> values,
                                            const std::function<double(double)>& cdf, double lo,
                                            double hi, int bins);

/// L1 distance between the empirical bin fractions and the reference bin
/// masses. Needs at least 100 values and 10 bins.
double equivariance_distance(std::span<const double> values,
                             const std::function<double(double)>& cdf, double lo, double hi,
                             int bins = 50);

struct OrderingReport {
  bool preserved = true;
  std::size_t time_index = 0;
  /// Trajectory ids that swapped order at `time_index`.
  int first = -1;
  int second = -1;
};

/// True iff sorting by `coord` gives the same permutation at every sample.
OrderingReport verify_ordering(const Ensemble& ensemble, std::size_t coord);

/// Rows "t,trajectory_id,<coords...>" preceded by `#` comment lines.
void write_ensemble_csv(std::ostream& out, const Ensemble& ensemble,
                        const std::vector<std::string>& comments = {});
void write_histogram_csv(std::ostream& out, const std::vector<HistogramRow>& rows,
                         const std::vector<std::string>& comments = {});

/// {seed, n, dt, sampler, model, schedule_hash, rng}
nlohmann::json ensemble_manifest(const Ensemble& ensemble, std::uint64_t seed, double dt,
                                 const SamplerSpec& sampler, const std::string& model,
                                 const std::string& schedule_hash);

}  // namespace pilotq
