#include "lacldp/iid_cgf.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "lacldp/errors.hpp"
#include "lacldp/legendre.hpp"
#include "lacldp/parallel.hpp"
#include "lacldp/quadrature.hpp"

namespace lacldp {

namespace {

struct Panel {
  double a = 0.0;
  double b = 0.0;
  double z = 0.0;   // int exp(theta f - shift)
  double z1 = 0.0;  // int f exp(theta f - shift)
  double err = 0.0;
};

class TiltedIntegrand {
 public:
  TiltedIntegrand(const PeriodicFunctionSpec& spec, double theta) : spec_(spec), theta_(theta) {
    shift_ = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 64; ++i) shift_ = std::max(shift_, theta * spec(i / 64.0));
  }

  double shift() const { return shift_; }

  Panel integrate(double a, double b) const {
    const KronrodRule& rule = gauss_kronrod15();
    const double h = b - a;
    double zk = 0, z1k = 0, zg = 0, z1g = 0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double f = spec_(a + h * rule.nodes[i]);
      const double e = std::exp(theta_ * f - shift_);
      zk += rule.kronrod_weights[i] * e;
      z1k += rule.kronrod_weights[i] * e * f;
      zg += rule.gauss_weights[i] * e;
      z1g += rule.gauss_weights[i] * e * f;
    }
    Panel p{a, b, h * zk, h * z1k, 0.0};
    p.err = h * std::max(std::abs(zk - zg), std::abs(z1k - z1g));
    return p;
  }

  // int (f - mean)^2 exp(theta f - shift) over the panel.
  double centered_second_moment(const Panel& p, double mean) const {
    const KronrodRule& rule = gauss_kronrod15();
    const double h = p.b - p.a;
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double f = spec_(p.a + h * rule.nodes[i]);
      const double e = std::exp(theta_ * f - shift_);
      s += rule.kronrod_weights[i] * e * (f - mean) * (f - mean);
    }
    return h * s;
  }

 private:
  const PeriodicFunctionSpec& spec_;
  double theta_;
  double shift_;
};

}  // namespace

CgfSample cgf_iid(const PeriodicFunctionSpec& spec, double theta, const IidCgfOptions& options) {
  if (!std::isfinite(theta)) throw ArgumentError("cgf_iid: theta must be finite");
  const TiltedIntegrand integrand(spec, theta);

  std::vector<Panel> panels;
  const int initial = std::max(1, options.initial_panels);
  for (int i = 0; i < initial; ++i) {
    panels.push_back(integrand.integrate(static_cast<double>(i) / initial,
                                         static_cast<double>(i + 1) / initial));
  }
  auto by_error = [&](std::size_t l, std::size_t r) { return panels[l].err < panels[r].err; };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(by_error)> worst(by_error);
  double z_total = 0.0, err_total = 0.0;
  for (std::size_t i = 0; i < panels.size(); ++i) {
    worst.push(i);
    z_total += panels[i].z;
    err_total += panels[i].err;
  }
  while (err_total > options.tolerance * z_total &&
         panels.size() < static_cast<std::size_t>(options.max_panels)) {
    const std::size_t idx = worst.top();
    worst.pop();
    const Panel old = panels[idx];
    const double mid = 0.5 * (old.a + old.b);
    panels[idx] = integrand.integrate(old.a, mid);
    panels.push_back(integrand.integrate(mid, old.b));
    z_total += panels[idx].z + panels.back().z - old.z;
    err_total += panels[idx].err + panels.back().err - old.err;
    worst.push(idx);
    worst.push(panels.size() - 1);
  }

  std::sort(panels.begin(), panels.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
  std::vector<double> buf(panels.size());
  std::transform(panels.begin(), panels.end(), buf.begin(), [](const Panel& p) { return p.z; });
  const double z = pairwise_sum(buf);
  std::transform(panels.begin(), panels.end(), buf.begin(), [](const Panel& p) { return p.z1; });
  const double mean = pairwise_sum(buf) / z;
  std::transform(panels.begin(), panels.end(), buf.begin(),
                 [&](const Panel& p) { return integrand.centered_second_moment(p, mean); });
  const double variance = pairwise_sum(buf) / z;

  CgfSample out;
  out.theta = theta;
  // The log of a normalized integral is exactly zero at theta = 0.
  out.value = theta == 0.0 ? 0.0 : integrand.shift() + std::log(z);
  out.derivative = mean;
  out.second_derivative = variance;
  return out;
}

ScalarCurve cgf_curve(const PeriodicFunctionSpec& spec, std::span<const double> theta_grid,
                      const IidCgfOptions& options) {
  if (theta_grid.empty()) throw ArgumentError("cgf_curve: empty theta grid");
  std::vector<CgfSample> samples(theta_grid.size());
  parallel_for(theta_grid.size(),
               [&](std::size_t i) { samples[i] = cgf_iid(spec, theta_grid[i], options); });
  std::vector<double> values, derivatives;
  for (const auto& s : samples) {
    values.push_back(s.value);
    derivatives.push_back(s.derivative);
  }
  return ScalarCurve({theta_grid.begin(), theta_grid.end()}, std::move(values),
                     std::move(derivatives));
}

}  // namespace lacldp
