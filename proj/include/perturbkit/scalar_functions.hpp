#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "perturbkit/errors.hpp"

namespace perturbkit {

// Real interval with individually open or closed ends.
struct Interval {
  double lo;
  double hi;
  bool lo_open = true;
  bool hi_open = true;

  bool contains(double x) const {
    if (x < lo || (lo_open && x == lo)) return false;
    if (x > hi || (hi_open && x == hi)) return false;
    return true;
  }
  std::string describe() const;

  static Interval all();
  static Interval positive();          // (0, inf)
  static Interval nonnegative();       // [0, inf)
};

// A scalar function f together with f' and f'', its value domain, the open
// region where it is C^smoothness, and an optional convention value at
// kernel-classified zeros (0*log 0 := 0, 0^s := 0).
//
// The stated smoothness is recorded for documentation; the calculus in this
// library only ever consumes f, f' and f''.
class ScalarFunctionSpec {
public:
  using Fn = std::function<double(double)>;

  ScalarFunctionSpec(std::string name, Fn f, Fn d1, Fn d2, Interval domain,
                     Interval smooth_domain, int smoothness,
                     std::optional<double> kernel_value = std::nullopt,
                     std::vector<double> params = {});

  const std::string& name() const { return name_; }
  const Interval& domain() const { return domain_; }
  const Interval& smooth_domain() const { return smooth_domain_; }
  int smoothness() const { return smoothness_; }
  const std::vector<double>& params() const { return params_; }
  std::optional<double> kernel_value() const { return kernel_value_; }

  // Domain-checked evaluations; violations raise DomainError naming x.
  double value(double x) const;
  double deriv1(double x) const;
  double deriv2(double x) const;

  // Evaluation at an eigenvalue, honoring the zero convention when the
  // eigenvalue was classified as kernel.
  double value_at_eigenvalue(double lambda, bool classified_zero) const;

  bool in_domain(double x) const { return domain_.contains(x); }
  bool in_smooth_domain(double x) const { return smooth_domain_.contains(x); }

  // Precondition helper: every eigenvalue lies in the C^k region.
  void require_smooth_at(const Eigen::VectorXd& eigenvalues) const;
  void require_smooth_at(double lambda) const;

private:
  std::string name_;
  Fn f_, d1_, d2_;
  Interval domain_;
  Interval smooth_domain_;
  int smoothness_;
  std::optional<double> kernel_value_;
  std::vector<double> params_;
};

// Marker for functions smooth to all orders on their stated domain.
inline constexpr int kCInfinity = 99;

// Registry. Names follow the CLI contract: "log", "xlogx", "sqrt",
// "invsqrt", "pow:<s>", "square".
ScalarFunctionSpec fn_log();
ScalarFunctionSpec fn_xlogx();
ScalarFunctionSpec fn_sqrt();
ScalarFunctionSpec fn_invsqrt();
ScalarFunctionSpec fn_power(double s);
ScalarFunctionSpec fn_square();
ScalarFunctionSpec fn_identity();

// Parse a CLI function name; unknown names raise Error.
ScalarFunctionSpec parse_function(const std::string& name);

// a*f, with L_{a f}(A,E) = a L_f(A,E) following from linearity.
ScalarFunctionSpec scaled(double a, const ScalarFunctionSpec& f);

// g = f'. g'' is unavailable (f''' is not stored) and raises if consumed.
ScalarFunctionSpec derivative_of(const ScalarFunctionSpec& f);

// g = 1/f', with g' = -f''/f'^2. g'' unavailable.
ScalarFunctionSpec derivative_reciprocal(const ScalarFunctionSpec& f);

}  // namespace perturbkit
