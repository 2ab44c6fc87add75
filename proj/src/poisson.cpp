#include "brwlab/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "brwlab/rng.hpp"

namespace brwlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// adaptive Simpson to ~1e-10 relative
double simpson(const std::function<double(double)>& f, double a, double m,
               double b, double fa, double fm, double fb, double whole,
               double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-11) {
  if (b <= a) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double tol = rel_tol * std::max(1.0, std::abs(whole));
  return simpson(f, a, m, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

RateFunctionSpec RateFunctionSpec::constant(double r) {
  if (!(r >= 0)) throw std::invalid_argument("RateFunctionSpec: rate must be >= 0");
  return RateFunctionSpec(Kind::kConstant, r, 0, 0);
}

RateFunctionSpec RateFunctionSpec::power_singular(double T, double c) {
  if (!(T > 0) || !(c > 0))
    throw std::invalid_argument("RateFunctionSpec: need T > 0 and c > 0");
  return RateFunctionSpec(Kind::kPowerSingular, T, c, 0);
}

RateFunctionSpec RateFunctionSpec::case_b(double c, double lambda, double p) {
  if (!(c > 0) || !(lambda > 0) || !(p > 0) || !(p < 1))
    throw std::invalid_argument("RateFunctionSpec: case_b needs c, lambda > 0 and p in (0,1)");
  return RateFunctionSpec(Kind::kCaseB, c, lambda, p);
}

RateFunctionSpec RateFunctionSpec::case_c(double alpha) {
  if (!(alpha > 0)) throw std::invalid_argument("RateFunctionSpec: alpha must be > 0");
  return RateFunctionSpec(Kind::kCaseC, alpha, 0, 0);
}

RateFunctionSpec RateFunctionSpec::reciprocal(const RateFunctionSpec& inner) {
  RateFunctionSpec out(Kind::kReciprocal, 0, 0, 0);
  out.inner_ = std::make_shared<RateFunctionSpec>(inner);
  return out;
}

double RateFunctionSpec::domain_end() const {
  if (kind_ == Kind::kPowerSingular) return a_;
  if (kind_ == Kind::kReciprocal) return inner_->domain_end();
  return kInf;
}

double RateFunctionSpec::rate(double t) const {
  switch (kind_) {
    case Kind::kConstant:
      return a_;
    case Kind::kPowerSingular:
      return std::pow(a_ - t, -b_);
    case Kind::kCaseB: {
      const double b_hat = 1.0 / (1.0 - c_);
      return a_ / (b_ * (1.0 - c_)) * std::pow(t, b_hat - 1.0) /
             std::pow(std::log(t + 2.0), b_hat);
    }
    case Kind::kCaseC:
      return std::exp(a_ * std::sqrt(t));
    case Kind::kReciprocal: {
      const double r = inner_->rate(t);
      return r > 0 ? 1.0 / r : kInf;
    }
  }
  return 0;
}

double cumulative_rate(const RateFunctionSpec& spec, double t) {
  if (!(t >= 0)) throw std::domain_error("cumulative_rate: t must be >= 0");
  const double end = spec.domain_end();
  if (t >= end && end < kInf)
    throw std::domain_error("cumulative_rate: t outside the rate's domain");
  switch (spec.kind()) {
    case RateFunctionSpec::Kind::kConstant:
      return spec.param_a() * t;
    case RateFunctionSpec::Kind::kPowerSingular: {
      const double T = spec.param_a(), c = spec.param_b();
      if (c == 1.0) return std::log(T / (T - t));
      return (std::pow(T - t, 1.0 - c) - std::pow(T, 1.0 - c)) / (c - 1.0);
    }
    case RateFunctionSpec::Kind::kCaseC: {
      const double a = spec.param_a(), rt = std::sqrt(t);
      return 2.0 * ((rt / a - 1.0 / (a * a)) * std::exp(a * rt) + 1.0 / (a * a));
    }
    case RateFunctionSpec::Kind::kReciprocal:
      switch (spec.inner().kind()) {
        case RateFunctionSpec::Kind::kConstant: {
          const double r = spec.inner().param_a();
          if (r == 0) throw std::domain_error("cumulative_rate: reciprocal of zero rate");
          return t / r;
        }
        case RateFunctionSpec::Kind::kPowerSingular: {
          const double T = spec.inner().param_a(), c = spec.inner().param_b();
          return (std::pow(T, c + 1.0) - std::pow(T - t, c + 1.0)) / (c + 1.0);
        }
        case RateFunctionSpec::Kind::kCaseC: {
          const double a = spec.inner().param_a(), rt = std::sqrt(t);
          return 2.0 * (1.0 / (a * a) -
                        (rt / a + 1.0 / (a * a)) * std::exp(-a * rt));
        }
        default:
          break;
      }
      [[fallthrough]];
    case RateFunctionSpec::Kind::kCaseB:
      return integrate([&spec](double s) { return spec.rate(s); }, 0.0, t);
  }
  return 0;
}

double inverse_cumulative_rate(const RateFunctionSpec& spec, double target) {
  if (!(target >= 0))
    throw std::domain_error("inverse_cumulative_rate: target must be >= 0");
  if (target == 0) return 0.0;
  switch (spec.kind()) {
    case RateFunctionSpec::Kind::kConstant: {
      const double r = spec.param_a();
      return r > 0 ? target / r : kInf;
    }
    case RateFunctionSpec::Kind::kPowerSingular: {
      const double T = spec.param_a(), c = spec.param_b();
      if (c == 1.0) return T * (1.0 - std::exp(-target));
      if (c > 1.0)
        return T - std::pow(std::pow(T, 1.0 - c) + (c - 1.0) * target,
                            1.0 / (1.0 - c));
      const double total = std::pow(T, 1.0 - c) / (1.0 - c);
      if (target >= total) return kInf;
      return T - std::pow(std::pow(T, 1.0 - c) - (1.0 - c) * target,
                          1.0 / (1.0 - c));
    }
    default:
      break;
  }
  // generic monotone solve on the cumulative
  const double end = spec.domain_end();
  double lo = 0.0, hi = std::min(1.0, end < kInf ? 0.5 * end : 1.0);
  if (end == kInf) {
    int iters = 0;
    while (cumulative_rate(spec, hi) < target) {
      lo = hi;
      hi *= 2.0;
      if (++iters > 400) return kInf;
    }
  } else {
    // approach the domain end geometrically; mass may be finite
    while (cumulative_rate(spec, hi) < target) {
      lo = hi;
      const double next = end - 0.5 * (end - hi);
      if (next - hi < 1e-15 * end) return kInf;
      hi = next;
    }
  }
  const double tol = 1e-10 * std::max(1.0, target);
  double t = 0.5 * (lo + hi);
  for (int i = 0; i < 200; ++i) {
    const double f = cumulative_rate(spec, t) - target;
    if (std::abs(f) <= tol || hi - lo <= 1e-14 * std::max(1.0, hi)) return t;
    (f < 0 ? lo : hi) = t;
    const double d = spec.rate(t);
    double next = (d > 0 && std::isfinite(d)) ? t - f / d : t;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    t = next;
  }
  return t;
}

std::int64_t JumpPath::count_at(double t) const {
  return std::upper_bound(jump_times.begin(), jump_times.end(), t) -
         jump_times.begin();
}

void for_each_jump(const RateFunctionSpec& spec, double t_max,
                   std::uint64_t seed, double scale,
                   const std::function<void(double)>& visit) {
  if (!(t_max >= 0) || t_max >= spec.domain_end())
    throw std::domain_error("for_each_jump: t_max outside the rate's domain");
  if (!(scale >= 0)) throw std::domain_error("for_each_jump: scale must be >= 0");
  if (scale == 0) return;
  Rng rng(seed);

  // fast paths keep the per-jump cost flat for the heavily used families
  if (spec.kind() == RateFunctionSpec::Kind::kConstant) {
    const double rate = scale * spec.param_a();
    if (rate == 0) return;
    double t = rng.exponential(rate);
    while (t <= t_max) {
      visit(t);
      t += rng.exponential(rate);
    }
    return;
  }
  if (spec.kind() == RateFunctionSpec::Kind::kPowerSingular &&
      spec.param_b() == 2.0) {
    const double T = spec.param_a();
    // cumulative = 1/(T-t) - 1/T, inverted without pow
    double s = 0.0;
    for (;;) {
      s += rng.exponential(scale);
      const double t = T - 1.0 / (1.0 / T + s);
      if (t > t_max) return;
      visit(t);
    }
  }
  double s = 0.0;
  for (;;) {
    s += rng.exponential(scale);
    const double t = inverse_cumulative_rate(spec, s);
    if (!(t <= t_max)) return;
    visit(t);
  }
}

JumpPath sample_inhomogeneous_poisson(const RateFunctionSpec& spec,
                                      double t_max, std::uint64_t seed,
                                      double scale) {
  JumpPath path;
  path.horizon = t_max;
  for_each_jump(spec, t_max, seed, scale,
                [&path](double t) { path.jump_times.push_back(t); });
  return path;
}

double stieltjes_integral(const std::function<double(double)>& f,
                          const JumpPath& path, double t) {
  double sum = 0.0;
  for (double j : path.jump_times) {
    if (j > t) break;
    sum += f(j);
  }
  return sum;
}

double exponential_martingale(const RateFunctionSpec& theta, double lambda,
                              const JumpPath& path, double t) {
  double log_prod = 0.0;
  for (double j : path.jump_times) {
    if (j > t) break;
    const double v = theta.rate(j);
    if (v == 0) return 0.0;
    log_prod += std::log(v);
  }
  return std::exp(log_prod + lambda * (t - cumulative_rate(theta, t)));
}

}  // namespace brwlab
