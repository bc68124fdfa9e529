#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace lacldp {

// Samples of a real function on a strictly increasing grid. Derivatives
// are optional; when absent they are estimated from the samples by central
// differences with one Richardson step (second-order one-sided at the ends).
class ScalarCurve {
 public:
  ScalarCurve(std::vector<double> grid, std::vector<double> values,
              std::vector<double> derivatives = {});

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& derivatives() const { return derivatives_; }
  std::size_t size() const { return grid_.size(); }

  // True iff every discrete second difference is >= -1e-9.
  bool is_convex() const { return is_convex_; }
  // Index i of the worst triple (i-1, i, i+1) when not convex.
  std::size_t worst_convexity_index() const { return worst_index_; }
  double worst_second_difference() const { return worst_second_difference_; }

  // Derivative estimates at the two grid ends.
  std::pair<double, double> derivative_range() const {
    return {derivatives_.front(), derivatives_.back()};
  }

  // Cubic Hermite interpolation from values and derivatives.
  double value_at(double x) const;
  double derivative_at(double x) const;

 private:
  std::size_t segment(double x) const;

  std::vector<double> grid_;
  std::vector<double> values_;
  std::vector<double> derivatives_;
  bool is_convex_ = true;
  std::size_t worst_index_ = 0;
  double worst_second_difference_ = 0.0;
};

// A convex differentiable function on a closed working interval.
struct ConvexFunction {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  double lower = -50.0;
  double upper = 50.0;
};

// Wraps a sampled curve; throws NonConvexError if the samples are not convex.
ConvexFunction convex_from_curve(const ScalarCurve& curve);

enum class RateKind { finite, boundary, infinite };

// Legendre transform value. For `infinite`, `value` holds the finite
// boundary value theta x - Lambda(theta) at the nearer end of the working
// interval; for `boundary` the supremum may be underestimated.
struct RateValue {
  double value = 0.0;
  RateKind kind = RateKind::finite;
  double theta_star = 0.0;

  bool is_infinite() const { return kind == RateKind::infinite; }
};

struct LegendreOptions {
  double derivative_tolerance = 1e-10;
  int max_iterations = 200;
};

// sup_theta [theta x - Lambda(theta)] over Lambda's working interval,
// solving Lambda'(theta) = x by bisection.
RateValue legendre_transform(const ConvexFunction& lambda, double x,
                             const LegendreOptions& options = {});

// The transform x -> Lambda*(x) as a convex function on the open derivative
// range, with derivative theta*(x). Applying legendre_transform to it gives
// the biconjugate.
ConvexFunction conjugate_function(const ConvexFunction& lambda, const LegendreOptions& options = {});

struct RateFunctionCurve {
  std::vector<double> x_grid;
  std::vector<RateValue> values;
  double zero_location = 0.0;
};

// Pointwise Legendre transform of a sampled CGF on an x grid. The curve must
// be convex and pass through (0, 0).
RateFunctionCurve gartner_ellis_rate(const ScalarCurve& lambda_curve, std::span<const double> x_grid,
                                     const LegendreOptions& options = {});
RateFunctionCurve gartner_ellis_rate(const ConvexFunction& lambda, std::span<const double> x_grid,
                                     const LegendreOptions& options = {});

}  // namespace lacldp
