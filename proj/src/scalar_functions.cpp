#include "perturbkit/scalar_functions.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace perturbkit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

ScalarFunctionSpec::Fn unavailable_derivative(const std::string& name) {
  return [name](double) -> double {
    throw Error("ScalarFunctionSpec '" + name +
                "': this derivative order is not available");
  };
}

int decrement_smoothness(int k) {
  return k == kCInfinity ? kCInfinity : std::max(0, k - 1);
}
}  // namespace

std::string Interval::describe() const {
  std::ostringstream s;
  s << (lo_open ? '(' : '[') << lo << ", " << hi << (hi_open ? ')' : ']');
  return s.str();
}

Interval Interval::all() { return {-kInf, kInf, true, true}; }
Interval Interval::positive() { return {0.0, kInf, true, true}; }
Interval Interval::nonnegative() { return {0.0, kInf, false, true}; }

ScalarFunctionSpec::ScalarFunctionSpec(std::string name, Fn f, Fn d1, Fn d2,
                                       Interval domain, Interval smooth_domain,
                                       int smoothness,
                                       std::optional<double> kernel_value,
                                       std::vector<double> params)
    : name_(std::move(name)),
      f_(std::move(f)),
      d1_(std::move(d1)),
      d2_(std::move(d2)),
      domain_(domain),
      smooth_domain_(smooth_domain),
      smoothness_(smoothness),
      kernel_value_(kernel_value),
      params_(std::move(params)) {}

double ScalarFunctionSpec::value(double x) const {
  if (!domain_.contains(x)) {
    std::ostringstream msg;
    msg << "function '" << name_ << "': eigenvalue " << x
        << " outside domain " << domain_.describe();
    throw DomainError(msg.str());
  }
  return f_(x);
}

double ScalarFunctionSpec::deriv1(double x) const {
  if (!smooth_domain_.contains(x)) {
    std::ostringstream msg;
    msg << "function '" << name_ << "': derivative requested at " << x
        << " outside smooth region " << smooth_domain_.describe();
    throw DomainError(msg.str());
  }
  return d1_(x);
}

double ScalarFunctionSpec::deriv2(double x) const {
  if (!smooth_domain_.contains(x)) {
    std::ostringstream msg;
    msg << "function '" << name_ << "': second derivative requested at " << x
        << " outside smooth region " << smooth_domain_.describe();
    throw DomainError(msg.str());
  }
  return d2_(x);
}

double ScalarFunctionSpec::value_at_eigenvalue(double lambda,
                                               bool classified_zero) const {
  if (classified_zero) {
    if (kernel_value_.has_value()) return *kernel_value_;
    if (domain_.contains(0.0)) return f_(0.0);
    std::ostringstream msg;
    msg << "function '" << name_ << "': kernel eigenvalue " << lambda
        << " has no zero convention and 0 is outside domain "
        << domain_.describe();
    throw DomainError(msg.str());
  }
  return value(lambda);
}

void ScalarFunctionSpec::require_smooth_at(double lambda) const {
  if (!smooth_domain_.contains(lambda)) {
    std::ostringstream msg;
    msg << "function '" << name_ << "': eigenvalue " << lambda
        << " outside smooth region " << smooth_domain_.describe();
    throw DomainError(msg.str());
  }
}

void ScalarFunctionSpec::require_smooth_at(
    const Eigen::VectorXd& eigenvalues) const {
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    require_smooth_at(eigenvalues[i]);
  }
}

ScalarFunctionSpec fn_log() {
  return ScalarFunctionSpec(
      "log", [](double x) { return std::log(x); },
      [](double x) { return 1.0 / x; },
      [](double x) { return -1.0 / (x * x); }, Interval::positive(),
      Interval::positive(), kCInfinity);
}

ScalarFunctionSpec fn_xlogx() {
  // 0*log 0 := 0 on classified kernels; f' diverges at 0, so the smooth
  // region stays open.
  return ScalarFunctionSpec(
      "xlogx", [](double x) { return x * std::log(x); },
      [](double x) { return 1.0 + std::log(x); },
      [](double x) { return 1.0 / x; }, Interval::positive(),
      Interval::positive(), kCInfinity, 0.0);
}

ScalarFunctionSpec fn_sqrt() {
  return ScalarFunctionSpec(
      "sqrt", [](double x) { return std::sqrt(x); },
      [](double x) { return 0.5 / std::sqrt(x); },
      [](double x) { return -0.25 / (x * std::sqrt(x)); },
      Interval::nonnegative(), Interval::positive(), kCInfinity, 0.0);
}

ScalarFunctionSpec fn_invsqrt() {
  return ScalarFunctionSpec(
      "invsqrt", [](double x) { return 1.0 / std::sqrt(x); },
      [](double x) { return -0.5 / (x * std::sqrt(x)); },
      [](double x) { return 0.75 / (x * x * std::sqrt(x)); },
      Interval::positive(), Interval::positive(), kCInfinity);
}

ScalarFunctionSpec fn_power(double s) {
  std::ostringstream name;
  name << "pow:" << s;
  const Interval domain =
      s > 0.0 ? Interval::nonnegative() : Interval::positive();
  const std::optional<double> kernel_value =
      s > 0.0 ? std::optional<double>(0.0) : std::nullopt;  // 0^s := 0
  return ScalarFunctionSpec(
      name.str(), [s](double x) { return std::pow(x, s); },
      [s](double x) { return s * std::pow(x, s - 1.0); },
      [s](double x) { return s * (s - 1.0) * std::pow(x, s - 2.0); }, domain,
      Interval::positive(), kCInfinity, kernel_value, {s});
}

ScalarFunctionSpec fn_square() {
  return ScalarFunctionSpec(
      "square", [](double x) { return x * x; },
      [](double x) { return 2.0 * x; }, [](double) { return 2.0; },
      Interval::all(), Interval::all(), kCInfinity);
}

ScalarFunctionSpec fn_identity() {
  return ScalarFunctionSpec(
      "x", [](double x) { return x; }, [](double) { return 1.0; },
      [](double) { return 0.0; }, Interval::all(), Interval::all(),
      kCInfinity);
}

ScalarFunctionSpec parse_function(const std::string& name) {
  if (name == "log") return fn_log();
  if (name == "xlogx") return fn_xlogx();
  if (name == "sqrt") return fn_sqrt();
  if (name == "invsqrt") return fn_invsqrt();
  if (name == "square") return fn_square();
  if (name.rfind("pow:", 0) == 0) {
    const std::string arg = name.substr(4);
    std::size_t consumed = 0;
    double s = 0.0;
    try {
      s = std::stod(arg, &consumed);
    } catch (const std::exception&) {
      throw Error("parse_function: bad exponent in '" + name + "'");
    }
    if (consumed != arg.size()) {
      throw Error("parse_function: bad exponent in '" + name + "'");
    }
    return fn_power(s);
  }
  throw Error(
      "parse_function: unknown function '" + name +
      "' (expected log, xlogx, sqrt, invsqrt, pow:<s>, square)");
}

ScalarFunctionSpec scaled(double a, const ScalarFunctionSpec& f) {
  std::ostringstream name;
  name << a << "*" << f.name();
  return ScalarFunctionSpec(
      name.str(), [a, f](double x) { return a * f.value(x); },
      [a, f](double x) { return a * f.deriv1(x); },
      [a, f](double x) { return a * f.deriv2(x); }, f.domain(),
      f.smooth_domain(), f.smoothness(),
      f.kernel_value().has_value()
          ? std::optional<double>(a * *f.kernel_value())
          : std::nullopt,
      f.params());
}

ScalarFunctionSpec derivative_of(const ScalarFunctionSpec& f) {
  const std::string name = "d/dx " + f.name();
  return ScalarFunctionSpec(
      name, [f](double x) { return f.deriv1(x); },
      [f](double x) { return f.deriv2(x); }, unavailable_derivative(name),
      f.smooth_domain(), f.smooth_domain(),
      decrement_smoothness(f.smoothness()));
}

ScalarFunctionSpec derivative_reciprocal(const ScalarFunctionSpec& f) {
  const std::string name = "1/(" + f.name() + ")'";
  return ScalarFunctionSpec(
      name, [f](double x) { return 1.0 / f.deriv1(x); },
      [f](double x) {
        const double d1 = f.deriv1(x);
        return -f.deriv2(x) / (d1 * d1);
      },
      unavailable_derivative(name), f.smooth_domain(), f.smooth_domain(),
      decrement_smoothness(f.smoothness()));
}

}  // namespace perturbkit
