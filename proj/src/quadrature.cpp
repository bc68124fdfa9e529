#include "lacldp/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace lacldp {
namespace {

// Boost stores the non-negative half of symmetric rules on [-1, 1].
template <class Abscissa, class Weights>
UnitRule unfold(const Abscissa& x, const Weights& w) {
  UnitRule rule;
  for (std::size_t i = x.size(); i-- > 0;) {
    if (x[i] == 0.0) continue;
    rule.nodes.push_back(0.5 - 0.5 * x[i]);
    rule.weights.push_back(0.5 * w[i]);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    rule.nodes.push_back(0.5 + 0.5 * x[i]);
    rule.weights.push_back(0.5 * w[i]);
  }
  return rule;
}

}  // namespace

const UnitRule& gauss_legendre8() {
  using G = boost::math::quadrature::gauss<double, 8>;
  static const UnitRule rule = unfold(G::abscissa(), G::weights());
  return rule;
}

const KronrodRule& gauss_kronrod15() {
  static const KronrodRule rule = [] {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    using G = boost::math::quadrature::gauss<double, 7>;
    const auto& x = GK::abscissa();
    const auto& wk = GK::weights();
    const auto& wg = G::weights();
    // Gauss nodes sit at even indices of the Kronrod abscissa list.
    std::vector<double> gauss_half(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); i += 2) gauss_half[i] = wg[i / 2];
    const UnitRule k = unfold(x, wk);
    const UnitRule g = unfold(x, gauss_half);
    return KronrodRule{k.nodes, k.weights, g.weights};
  }();
  return rule;
}

}  // namespace lacldp
