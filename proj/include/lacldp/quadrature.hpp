#pragma once

#include <vector>

namespace lacldp {

// A quadrature rule mapped to [0, 1]; weights sum to 1.
struct UnitRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// 8-point Gauss-Legendre rule on [0, 1].
const UnitRule& gauss_legendre8();

// 15-point Kronrod extension of the 7-point Gauss rule on [0, 1].
// `gauss_weights` is zero at the Kronrod-only nodes.
struct KronrodRule {
  std::vector<double> nodes;
  std::vector<double> kronrod_weights;
  std::vector<double> gauss_weights;
};
const KronrodRule& gauss_kronrod15();

}  // namespace lacldp
