#include "srd/shock_curve.hpp"

#include <algorithm>
#include <stdexcept>

namespace srd {

ShockCurve::ShockCurve(std::vector<double> eta, std::vector<double> xi, double slope_top)
    : eta_(std::move(eta)), xi_(std::move(xi)), slope_top_(slope_top) {
  const std::size_t n = eta_.size();
  if (n < 2 || xi_.size() != n) throw std::invalid_argument("ShockCurve: need >= 2 matching knots");
  for (std::size_t k = 1; k < n; ++k)
    if (!(eta_[k] > eta_[k - 1])) throw std::invalid_argument("ShockCurve: eta knots must increase");
  // clamped spline: tridiagonal system for the knot second derivatives
  std::vector<double> a(n), b(n), c(n), d(n);
  const double s0 = 0.0, s1 = slope_top_;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 0) {
      const double h = eta_[1] - eta_[0];
      b[k] = h / 3, c[k] = h / 6, d[k] = (xi_[1] - xi_[0]) / h - s0;
    } else if (k == n - 1) {
      const double h = eta_[k] - eta_[k - 1];
      a[k] = h / 6, b[k] = h / 3, d[k] = s1 - (xi_[k] - xi_[k - 1]) / h;
    } else {
      const double hl = eta_[k] - eta_[k - 1], hr = eta_[k + 1] - eta_[k];
      a[k] = hl / 6, b[k] = (hl + hr) / 3, c[k] = hr / 6;
      d[k] = (xi_[k + 1] - xi_[k]) / hr - (xi_[k] - xi_[k - 1]) / hl;
    }
  }
  for (std::size_t k = 1; k < n; ++k) {
    const double w = a[k] / b[k - 1];
    b[k] -= w * c[k - 1];
    d[k] -= w * d[k - 1];
  }
  m_.assign(n, 0.0);
  m_[n - 1] = d[n - 1] / b[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) m_[k] = (d[k] - c[k] * m_[k + 1]) / b[k];
}

std::size_t ShockCurve::interval(double eta) const {
  const auto it = std::upper_bound(eta_.begin(), eta_.end(), eta);
  const std::size_t k = it == eta_.begin() ? 0 : std::size_t(it - eta_.begin()) - 1;
  return std::min(k, eta_.size() - 2);
}

double ShockCurve::xi(double eta) const {
  const std::size_t k = interval(eta);
  const double h = eta_[k + 1] - eta_[k], A = (eta_[k + 1] - eta) / h, B = 1 - A;
  return A * xi_[k] + B * xi_[k + 1] + ((A * A * A - A) * m_[k] + (B * B * B - B) * m_[k + 1]) * h * h / 6;
}

double ShockCurve::dxi(double eta) const {
  const std::size_t k = interval(eta);
  const double h = eta_[k + 1] - eta_[k], A = (eta_[k + 1] - eta) / h, B = 1 - A;
  return (xi_[k + 1] - xi_[k]) / h + ((1 - 3 * A * A) * m_[k] + (3 * B * B - 1) * m_[k + 1]) * h / 6;
}

}  // namespace srd
