#include "perturbkit/divided_differences.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace perturbkit {

bool eigenvalues_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

DividedDifferenceFirst first_divided_difference(const ScalarFunctionSpec& f,
                                                const Eigen::VectorXd& lam,
                                                double degeneracy_tol) {
  f.require_smooth_at(lam);
  const int n = static_cast<int>(lam.size());
  DividedDifferenceFirst out;
  out.eigenvalues = lam;
  out.variant = DividedDifferenceFirst::Variant::standard;
  out.values.resize(n, n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l <= k; ++l) {
      double v;
      if (eigenvalues_close(lam[k], lam[l], degeneracy_tol)) {
        v = f.deriv1(0.5 * (lam[k] + lam[l]));
      } else {
        v = (f.value(lam[k]) - f.value(lam[l])) / (lam[k] - lam[l]);
      }
      out.values(k, l) = v;
      out.values(l, k) = v;
    }
  }
  return out;
}

DividedDifferenceFirst first_divided_difference_extended(
    double s, const Eigen::VectorXd& lam, const std::vector<bool>& is_zero,
    double degeneracy_tol) {
  if (!(s > 0.0 && s <= 1.0)) {
    throw DomainError(
        "first_divided_difference_extended: s must lie in (0, 1], got " +
        std::to_string(s));
  }
  const int n = static_cast<int>(lam.size());
  if (static_cast<int>(is_zero.size()) != n) {
    throw DimensionMismatchError(
        "first_divided_difference_extended: flag vector length mismatch");
  }
  for (int i = 0; i < n; ++i) {
    if (!is_zero[i] && lam[i] <= 0.0) {
      std::ostringstream msg;
      msg << "first_divided_difference_extended: eigenvalue " << lam[i]
          << " is negative or an unclassified zero";
      throw DomainError(msg.str());
    }
  }

  auto lam_of = [&](int i) { return is_zero[i] ? 0.0 : lam[i]; };

  DividedDifferenceFirst out;
  out.eigenvalues = lam;
  out.variant = DividedDifferenceFirst::Variant::kernel_extended;
  out.values.resize(n, n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l <= k; ++l) {
      const double a = lam_of(k);
      const double b = lam_of(l);
      double v;
      if (is_zero[k] && is_zero[l]) {
        v = 1.0;  // the kernel extension: zero/zero pairs carry weight 1
      } else if (is_zero[k] || is_zero[l]) {
        const double p = is_zero[k] ? b : a;  // (p^s - 0) / (p - 0)
        v = std::pow(p, s - 1.0);
      } else if (eigenvalues_close(a, b, degeneracy_tol)) {
        const double mid = 0.5 * (a + b);
        v = s * std::pow(mid, s - 1.0);
      } else {
        v = (std::pow(a, s) - std::pow(b, s)) / (a - b);
      }
      out.values(k, l) = v;
      out.values(l, k) = v;
    }
  }
  return out;
}

double second_divided_difference_entry(const ScalarFunctionSpec& f,
                                       const Eigen::VectorXd& lam,
                                       const Eigen::MatrixXd& dd1, int k,
                                       int l, int m, double degeneracy_tol) {
  if (!eigenvalues_close(lam[k], lam[m], degeneracy_tol)) {
    return (dd1(k, l) - dd1(m, l)) / (lam[k] - lam[m]);
  }
  if (!eigenvalues_close(lam[k], lam[l], degeneracy_tol)) {
    return (f.deriv1(lam[k]) - dd1(k, l)) / (lam[k] - lam[l]);
  }
  return 0.5 * f.deriv2(lam[k]);
}

DividedDifferenceSecond second_divided_difference(const ScalarFunctionSpec& f,
                                                  const Eigen::VectorXd& lam,
                                                  double degeneracy_tol) {
  f.require_smooth_at(lam);
  const int n = static_cast<int>(lam.size());
  const DividedDifferenceFirst dd1 =
      first_divided_difference(f, lam, degeneracy_tol);

  DividedDifferenceSecond out;
  out.dim = n;
  out.eigenvalues = lam;
  out.values.resize(static_cast<size_t>(n) * n * n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      for (int m = 0; m < n; ++m) {
        out.values[static_cast<size_t>((k * n + l) * n + m)] =
            second_divided_difference_entry(f, lam, dd1.values, k, l, m,
                                            degeneracy_tol);
      }
    }
  }
  return out;
}

}  // namespace perturbkit
