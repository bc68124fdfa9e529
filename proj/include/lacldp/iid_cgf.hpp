#pragma once

#include <span>
#include <vector>

#include "lacldp/fnmodel.hpp"

namespace lacldp {

class ScalarCurve;

// One evaluation of the i.i.d. cumulant generating function
// log int_0^1 exp(theta f) and its first two derivatives.
struct CgfSample {
  double theta = 0.0;
  double value = 0.0;
  double derivative = 0.0;         // tilted mean of f
  double second_derivative = 0.0;  // tilted variance of f
};

struct IidCgfOptions {
  double tolerance = 1e-13;  // relative to the tilted partition integral
  int initial_panels = 8;
  int max_panels = 1 << 20;
};

CgfSample cgf_iid(const PeriodicFunctionSpec& spec, double theta, const IidCgfOptions& options = {});

// Samples of cgf_iid on a strictly increasing grid; values and analytic
// derivatives are both stored on the curve.
ScalarCurve cgf_curve(const PeriodicFunctionSpec& spec, std::span<const double> theta_grid,
                      const IidCgfOptions& options = {});

}  // namespace lacldp
