#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

namespace brwlab {

// Nonnegative, locally integrable rate/tilt functions used throughout:
// the built-in families of Theorem 6.1 plus constants and reciprocals.
class RateFunctionSpec {
 public:
  enum class Kind { kConstant, kPowerSingular, kCaseB, kCaseC, kReciprocal };

  static RateFunctionSpec constant(double r);
  // r(s) = (T - s)^-c on [0, T)
  static RateFunctionSpec power_singular(double T, double c);
  // r(s) = c/(lambda*(1-p)) * s^(b-1) / log(s+2)^b with b = 1/(1-p)
  static RateFunctionSpec case_b(double c, double lambda, double p);
  // r(s) = exp(alpha*sqrt(s))
  static RateFunctionSpec case_c(double alpha);
  static RateFunctionSpec reciprocal(const RateFunctionSpec& inner);

  Kind kind() const { return kind_; }
  double domain_end() const;  // T for kPowerSingular, +inf otherwise
  double rate(double t) const;

  double param_a() const { return a_; }
  double param_b() const { return b_; }
  double param_c() const { return c_; }
  const RateFunctionSpec& inner() const { return *inner_; }

 private:
  RateFunctionSpec(Kind kind, double a, double b, double c)
      : kind_(kind), a_(a), b_(b), c_(c) {}
  Kind kind_;
  double a_ = 0, b_ = 0, c_ = 0;
  std::shared_ptr<const RateFunctionSpec> inner_;
};

// integral of the rate over [0, t]; closed form where available, adaptive
// quadrature otherwise
double cumulative_rate(const RateFunctionSpec& spec, double t);

// smallest t with cumulative_rate(t) == target; +inf if the total mass on the
// domain is below target
double inverse_cumulative_rate(const RateFunctionSpec& spec, double target);

struct JumpPath {
  std::vector<double> jump_times;  // strictly ascending, < horizon
  double horizon = std::numeric_limits<double>::infinity();

  // number of jumps at or before t
  std::int64_t count_at(double t) const;
};

// Inhomogeneous Poisson sample with rate scale*r(.) on [0, t_max], by
// feeding unit-rate exponential arrivals through the inverse cumulative rate.
JumpPath sample_inhomogeneous_poisson(const RateFunctionSpec& spec,
                                      double t_max, std::uint64_t seed,
                                      double scale = 1.0);

// Streaming variant: calls visit(t) per jump in increasing order.  Used where
// paths are too long to store.
void for_each_jump(const RateFunctionSpec& spec, double t_max,
                   std::uint64_t seed, double scale,
                   const std::function<void(double)>& visit);

// sum of f over jump times <= t
double stieltjes_integral(const std::function<double(double)>& f,
                          const JumpPath& path, double t);

// M_t = (prod_{J_i <= t} theta(J_i)) * exp(lambda * int_0^t (1 - theta)).
// Returns 0 if theta vanishes at some jump.
double exponential_martingale(const RateFunctionSpec& theta, double lambda,
                              const JumpPath& path, double t);

}  // namespace brwlab
