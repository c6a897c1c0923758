#include "pilotq/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "pilotq/errors.hpp"
#include "pilotq/rng.hpp"

namespace pilotq {

const std::vector<double>& Ensemble::times() const {
  static const std::vector<double> empty;
  return trajectories.empty() ? empty : trajectories.front().times;
}

std::vector<double> Ensemble::column(std::size_t time_index, std::size_t coord) const {
  std::vector<double> out;
  out.reserve(trajectories.size());
  for (const auto& tr : trajectories) out.push_back(tr.points.at(time_index).at(coord));
  return out;
}

std::size_t Ensemble::coordinate_index(const std::string& name) const {
  const auto it = std::find(coordinates.begin(), coordinates.end(), name);
  if (it == coordinates.end()) throw InvalidArgument("ensemble has no coordinate '" + name + "'");
  return static_cast<std::size_t>(it - coordinates.begin());
}

void Ensemble::validate() const {
  const auto& ref = times();
  for (const auto& tr : trajectories) {
    if (tr.times != ref) throw InvalidArgument("trajectories do not share sample times");
    if (tr.points.size() != tr.times.size())
      throw InvalidArgument("trajectory point count differs from time count");
    for (const auto& p : tr.points)
      if (p.size() != coordinates.size()) throw InvalidArgument("point has wrong dimension");
  }
  if (ref.size() > 1) {
    const bool forward = ref[1] > ref[0];
    for (std::size_t k = 1; k < ref.size(); ++k)
      if ((ref[k] > ref[k - 1]) != forward || ref[k] == ref[k - 1])
        throw InvalidArgument("sample times are not strictly monotone");
  }
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0)) throw InvalidArgument("integrator dt must be positive");
  if (!(dt_min > 0.0) || !(dt_min < dt)) throw InvalidArgument("need 0 < dt_min < dt");
  if (!(node_epsilon > 0.0)) throw InvalidArgument("node tolerance must be positive");
  if (sample_stride < 1) throw InvalidArgument("sample stride must be >= 1");
  if (threads < 1) throw InvalidArgument("thread count must be >= 1");
}

namespace {

struct Step {
  double t;
  double h;
  bool record;
  // Midpoint of the breakpoint interval containing the step.
  double piece;
};

std::vector<Step> build_steps(double t0, double t1, const IntegratorConfig& config,
                              std::vector<double> breakpoints) {
  const double sign = t1 >= t0 ? 1.0 : -1.0;
  std::vector<double> knots{t0};
  std::sort(breakpoints.begin(), breakpoints.end());
  if (sign < 0) std::reverse(breakpoints.begin(), breakpoints.end());
  const double eps = 1e-12 * std::max(1.0, std::abs(t1 - t0));
  for (double b : breakpoints)
    if (sign * (b - knots.back()) > eps && sign * (t1 - b) > eps) knots.push_back(b);
  if (t1 != t0) knots.push_back(t1);

  std::vector<Step> steps;
  int counter = 0;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double len = knots[k + 1] - knots[k];
    const auto n = std::max<long>(1, static_cast<long>(std::ceil(std::abs(len) / config.dt - 1e-9)));
    const double h = len / static_cast<double>(n);
    const double mid = 0.5 * (knots[k] + knots[k + 1]);
    for (long s = 0; s < n; ++s) {
      ++counter;
      const bool last = s + 1 == n;
      steps.push_back({knots[k] + static_cast<double>(s) * h, h,
                       last || counter % config.sample_stride == 0, mid});
      // Land exactly on the knot to avoid drift in the recorded times.
      if (last) steps.back().h = knots[k + 1] - steps.back().t;
    }
  }
  return steps;
}

Point axpy(const Point& q, double a, const Point& v) {
  Point out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) out[i] = q[i] + a * v[i];
  return out;
}

Point rk4(const PiecewiseVelocityField& field, double t, const Point& q, double h, double piece) {
  const Point k1 = field(t, q, piece);
  const Point k2 = field(t + 0.5 * h, axpy(q, 0.5 * h, k1), piece);
  const Point k3 = field(t + 0.5 * h, axpy(q, 0.5 * h, k2), piece);
  const Point k4 = field(t + h, axpy(q, h, k3), piece);
  Point out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    out[i] = q[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

void advance(const PiecewiseVelocityField& field, double t, Point& q, double h, double piece,
             const IntegratorConfig& config, int id) {
  try {
    q = rk4(field, t, q, h, piece);
  } catch (const NodeError&) {
    if (std::abs(h) / 2.0 < config.dt_min)
      throw IntegrationError("trajectory " + std::to_string(id) + " stuck at a node near t = " +
                                 std::to_string(t),
                             id, t);
    advance(field, t, q, h / 2.0, piece, config, id);
    advance(field, t + h / 2.0, q, h / 2.0, piece, config, id);
  }
}

}  // namespace

Ensemble integrate_ensemble(const std::vector<Point>& initial, const VelocityField& field,
                            double t0, double t1, const IntegratorConfig& config,
                            std::vector<std::string> coordinates,
                            std::vector<double> breakpoints) {
  return integrate_ensemble(
      initial, PiecewiseVelocityField([&field](double t, const Point& q, double) { return field(t, q); }),
      t0, t1, config, std::move(coordinates), std::move(breakpoints));
}

Ensemble integrate_ensemble(const std::vector<Point>& initial,
                            const PiecewiseVelocityField& field, double t0, double t1,
                            const IntegratorConfig& config, std::vector<std::string> coordinates,
                            std::vector<double> breakpoints) {
  config.validate();
  const auto steps = build_steps(t0, t1, config, std::move(breakpoints));

  std::vector<double> times{t0};
  for (const auto& s : steps)
    if (s.record) times.push_back(s.t + s.h);

  Ensemble ensemble;
  ensemble.coordinates = std::move(coordinates);
  ensemble.trajectories.resize(initial.size());

  auto run_one = [&](std::size_t i) {
    if (initial[i].size() != ensemble.coordinates.size())
      throw InvalidArgument("initial point has wrong dimension");
    Trajectory& tr = ensemble.trajectories[i];
    tr.id = static_cast<int>(i);
    tr.times = times;
    tr.points.reserve(times.size());
    Point q = initial[i];
    tr.points.push_back(q);
    for (const auto& s : steps) {
      advance(field, s.t, q, s.h, s.piece, config, tr.id);
      if (s.record) tr.points.push_back(q);
    }
  };

  const auto n = initial.size();
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config.threads), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) run_one(i);
    return ensemble;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) run_one(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return ensemble;
}

void HistogramDensity::validate() const {
  if (!(hi > lo)) throw InvalidArgument("histogram range is empty");
  if (probabilities.empty()) throw InvalidArgument("histogram has no bins");
  double total = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0)) throw InvalidArgument("histogram probabilities must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("histogram probabilities must sum to 1");
}

double HistogramDensity::quantile(double u) const {
  const double width = (hi - lo) / static_cast<double>(probabilities.size());
  double acc = 0.0;
  std::size_t last_nonzero = 0;
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    const double p = probabilities[k];
    if (p <= 0.0) continue;
    last_nonzero = k;
    if (u <= acc + p) return lo + width * (static_cast<double>(k) + (u - acc) / p);
    acc += p;
  }
  return lo + width * static_cast<double>(last_nonzero + 1);
}

SamplerSpec SamplerSpec::equilibrium(bool stratified) {
  SamplerSpec s;
  s.kind = Kind::Equilibrium;
  s.stratified = stratified;
  return s;
}

SamplerSpec SamplerSpec::custom(std::vector<HistogramDensity> histograms) {
  SamplerSpec s;
  s.kind = Kind::Custom;
  s.histograms = std::move(histograms);
  for (const auto& h : s.histograms) h.validate();
  return s;
}

SamplerSpec SamplerSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) throw InvalidArgument("sampler spec needs a 'kind'");
  const auto kind = j["kind"].get<std::string>();
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "kind" && key != "stratified" && key != "histograms")
      throw InvalidArgument("unknown sampler key '" + key + "'");
  }
  if (kind == "equilibrium") return equilibrium(j.value("stratified", true));
  if (kind != "custom") throw InvalidArgument("sampler kind must be 'equilibrium' or 'custom'");
  if (!j.contains("histograms") || !j["histograms"].is_array())
    throw InvalidArgument("custom sampler needs 'histograms'");
  std::vector<HistogramDensity> hs;
  for (const auto& h : j["histograms"]) {
    HistogramDensity d;
    d.lo = h.at("lo").get<double>();
    d.hi = h.at("hi").get<double>();
    d.probabilities = h.at("probabilities").get<std::vector<double>>();
    hs.push_back(std::move(d));
  }
  auto s = custom(std::move(hs));
  s.stratified = j.value("stratified", true);
  return s;
}

nlohmann::json SamplerSpec::to_json() const {
  nlohmann::json j{{"kind", kind == Kind::Equilibrium ? "equilibrium" : "custom"},
                   {"stratified", stratified}};
  if (kind == Kind::Custom) {
    j["histograms"] = nlohmann::json::array();
    for (const auto& h : histograms)
      j["histograms"].push_back({{"lo", h.lo}, {"hi", h.hi}, {"probabilities", h.probabilities}});
  }
  return j;
}

std::string SamplerSpec::describe() const {
  if (kind == Kind::Equilibrium) return stratified ? "equilibrium-stratified" : "equilibrium-iid";
  return "custom-histogram";
}

namespace {

/// n uniforms per coordinate; with `stratified`, coordinate k uses
/// (perm_k(i) + U) / n for an independent random permutation perm_k.
std::vector<Point> draw_uniforms(std::size_t dims, int n, bool stratified, CounterRng& rng) {
  std::vector<Point> u(static_cast<std::size_t>(n), Point(dims));
  for (std::size_t k = 0; k < dims; ++k) {
    std::vector<std::size_t> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    if (stratified) {
      for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    }
    for (int i = 0; i < n; ++i) {
      const double v = rng.uniform();
      u[static_cast<std::size_t>(i)][k] =
          stratified ? (static_cast<double>(perm[static_cast<std::size_t>(i)]) + v) / n : v;
    }
  }
  return u;
}

}  // namespace

std::vector<Point> sample_initial(const SamplerSpec& spec, const ConfigurationDensity& psi0, int n,
                                  std::uint64_t seed, double node_epsilon) {
  if (n < 1) throw InvalidArgument("ensemble size must be >= 1");
  const auto dims = psi0.coordinates().size();
  CounterRng rng(seed);
  const auto u = draw_uniforms(dims, n, spec.stratified, rng);

  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(n));
  if (spec.kind == SamplerSpec::Kind::Equilibrium) {
    for (const auto& ui : u) out.push_back(psi0.from_uniforms(ui));
    return out;
  }

  if (spec.histograms.size() != dims)
    throw InvalidArgument("custom sampler needs one histogram per coordinate");
  for (std::size_t k = 0; k < dims; ++k) {
    const auto& h = spec.histograms[k];
    h.validate();
    const auto [lo, hi] = psi0.domain(k);
    const double width = (h.hi - h.lo) / static_cast<double>(h.probabilities.size());
    for (std::size_t b = 0; b < h.probabilities.size(); ++b) {
      const double left = h.lo + width * static_cast<double>(b);
      if (h.probabilities[b] > 0.0 && (left < lo - 1e-12 || left + width > hi + 1e-12))
        throw InvalidArgument("custom density has mass where the wavefunction vanishes (coordinate " +
                              psi0.coordinates()[k] + " outside its support)");
    }
  }
  for (const auto& ui : u) {
    Point q(dims);
    for (std::size_t k = 0; k < dims; ++k) q[k] = spec.histograms[k].quantile(ui[k]);
    if (!(psi0.density(q) > node_epsilon))
      throw InvalidArgument("custom density has mass where the wavefunction vanishes");
    out.push_back(std::move(q));
  }
  return out;
}

double invert_cdf(const std::function<double(double)>& cdf, double lo, double hi, double u) {
  double a = lo;
  double b = hi;
  for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
    const double mid = 0.5 * (a + b);
    if (cdf(mid) < u) a = mid;
    else b = mid;
  }
  return 0.5 * (a + b);
}

std::vector<HistogramRow> density_histogram(std::span<const double> values,
                                            const std::function<double(double)>& cdf, double lo,
                                            double hi, int bins) {
  if (bins < 1) throw InvalidArgument("histogram needs at least one bin");
  if (!(hi > lo)) throw InvalidArgument("histogram range is empty");
  std::vector<HistogramRow> rows(static_cast<std::size_t>(bins));
  const double width = (hi - lo) / bins;
  for (int b = 0; b < bins; ++b) {
    auto& r = rows[static_cast<std::size_t>(b)];
    r.left = lo + width * b;
    r.right = b + 1 == bins ? hi : lo + width * (b + 1);
    r.mass = cdf(r.right) - cdf(r.left);
  }
  for (double v : values) {
    if (v < lo || v > hi) continue;
    auto b = static_cast<int>((v - lo) / width);
    b = std::clamp(b, 0, bins - 1);
    ++rows[static_cast<std::size_t>(b)].count;
  }
  return rows;
}

double equivariance_distance(std::span<const double> values,
                             const std::function<double(double)>& cdf, double lo, double hi,
                             int bins) {
  if (bins < 10) throw InvalidArgument("equivariance check needs at least 10 bins");
  if (values.size() < 100) throw InvalidArgument("equivariance check needs at least 100 samples");
  const auto rows = density_histogram(values, cdf, lo, hi, bins);
  const double n = static_cast<double>(values.size());
  double l1 = 0.0;
  std::size_t inside = 0;
  for (const auto& r : rows) {
    l1 += std::abs(static_cast<double>(r.count) / n - r.mass);
    inside += r.count;
  }
  // Samples outside [lo, hi] count fully against the reference.
  l1 += static_cast<double>(values.size() - inside) / n;
  return l1;
}

OrderingReport verify_ordering(const Ensemble& ensemble, std::size_t coord) {
  OrderingReport report;
  if (ensemble.trajectories.empty()) return report;
  std::vector<std::size_t> order(ensemble.size());
  std::iota(order.begin(), order.end(), 0);
  const auto first = ensemble.column(0, coord);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return first[a] < first[b]; });
  const auto n_times = ensemble.times().size();
  for (std::size_t t = 1; t < n_times; ++t) {
    const auto col = ensemble.column(t, coord);
    for (std::size_t k = 1; k < order.size(); ++k) {
      const auto a = order[k - 1];
      const auto b = order[k];
      if (col[a] > col[b] && first[a] < first[b]) {
        report.preserved = false;
        report.time_index = t;
        report.first = ensemble.trajectories[a].id;
        report.second = ensemble.trajectories[b].id;
        return report;
      }
    }
  }
  return report;
}

void write_ensemble_csv(std::ostream& out, const Ensemble& ensemble,
                        const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "t,trajectory_id";
  for (const auto& c : ensemble.coordinates) out << ',' << c;
  out << '\n';
  char buf[64];
  const auto& times = ensemble.times();
  for (std::size_t k = 0; k < times.size(); ++k) {
    for (const auto& tr : ensemble.trajectories) {
      std::snprintf(buf, sizeof buf, "%.17g", times[k]);
      out << buf << ',' << tr.id;
      for (double v : tr.points[k]) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << ',' << buf;
      }
      out << '\n';
    }
  }
}

void write_histogram_csv(std::ostream& out, const std::vector<HistogramRow>& rows,
                         const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "bin_left,bin_right,count,psi2_mass\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%zu,%.17g\n", r.left, r.right, r.count, r.mass);
    out << buf;
  }
}

nlohmann::json ensemble_manifest(const Ensemble& ensemble, std::uint64_t seed, double dt,
                                 const SamplerSpec& sampler, const std::string& model,
                                 const std::string& schedule_hash) {
  return {{"seed", seed},
          {"n", ensemble.size()},
          {"dt", dt},
          {"sampler", sampler.to_json()},
          {"model", model},
          {"schedule_hash", schedule_hash},
          {"rng", CounterRng::kName}};
}

}  // namespace pilotq
