#pragma once

#include <functional>
#include <vector>

namespace pilotq {

/// Composite Gauss-Legendre rule: `panels` equal sub-intervals with `order`
/// nodes each. `tolerance` is what callers demand of results computed with
/// it (checked against the rule with doubled panels).
class QuadratureRule {
 public:
  explicit QuadratureRule(int panels = 64, int order = 4, double tolerance = 1e-12);

  int panels() const noexcept { return panels_; }
  int order() const noexcept { return order_; }
  double tolerance() const noexcept { return tolerance_; }

  double integrate(const std::function<double(double)>& f, double a, double b) const;

  /// Same rule with twice as many panels.
  QuadratureRule refined() const { return QuadratureRule(2 * panels_, order_, tolerance_); }

  /// Reference nodes/weights on [-1, 1].
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

 private:
  int panels_;
  int order_;
  double tolerance_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Integrates with `rule` and with `rule.refined()`; throws QuadratureError
/// when the two differ by more than the rule tolerance.
double integrate_checked(const QuadratureRule& rule, const std::function<double(double)>& f,
                         double a, double b);

}  // namespace pilotq
