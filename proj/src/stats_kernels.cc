// Copyright 2026 The dplr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dplr/stats_kernels.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "dplr/error.h"

namespace dplr {
namespace {

constexpr double kTiny = 1e-300;
constexpr double kEps = 1e-16;
constexpr int kMaxContinuedFractionSteps = 100000;

// Modified Lentz evaluation of the incomplete-beta continued fraction.
double BetaContinuedFraction(double x, double a, double b) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxContinuedFractionSteps; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) return h;
  }
  return h;
}

// I_x(a, b) given both x and y = 1 - x, so callers that know 1 - x exactly
// avoid the cancellation in forming it.
double IncompleteBeta(double x, double y, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) -
                           std::lgamma(b) + a * std::log(x) + b * std::log(y);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * BetaContinuedFraction(x, a, b) / a;
  }
  return 1.0 - front * BetaContinuedFraction(y, b, a) / b;
}

// Upper tail of T_k at t >= 0: 0.5 I_{k/(k+t^2)}(k/2, 1/2).
double StudentTUpperTailNonNegative(double t, double k) {
  const double t2 = t * t;
  const double x = k / (k + t2);
  const double y = t2 / (k + t2);
  return 0.5 * IncompleteBeta(x, y, 0.5 * k, 0.5);
}

void CheckProbability(double q, const char* what) {
  if (!(q > 0.0 && q < 1.0)) {
    throw Error(ErrorCode::kInvalidParameter,
                std::string(what) + " must lie in (0, 1), got " +
                    std::to_string(q));
  }
}

}  // namespace

Dof::Dof(std::int64_t k) : k_(k) {
  if (k < 1) {
    throw Error(ErrorCode::kInvalidParameter,
                "degrees of freedom must be >= 1, got " + std::to_string(k));
  }
}

TailMass::TailMass(double q) : q_(q) { CheckProbability(q, "tail mass"); }

double RegularizedIncompleteBeta(double x, double a, double b) {
  if (!(a > 0.0 && b > 0.0) || x < 0.0 || x > 1.0) {
    throw Error(ErrorCode::kInvalidParameter,
                "incomplete beta requires a, b > 0 and x in [0, 1]");
  }
  return IncompleteBeta(x, 1.0 - x, a, b);
}

double RegularizedLowerGamma(double a, double x) {
  if (!(a > 0.0) || x < 0.0) {
    throw Error(ErrorCode::kInvalidParameter,
                "incomplete gamma requires a > 0 and x >= 0");
  }
  if (x == 0.0) return 0.0;
  const double log_front = -x + a * std::log(x) - std::lgamma(a);
  if (x < a + 1.0) {
    // Series representation.
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < kMaxContinuedFractionSteps; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(log_front);
  }
  // Continued fraction for the upper tail Q(a, x).
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxContinuedFractionSteps; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return 1.0 - std::exp(log_front) * h;
}

double StudentTPdf(double x, Dof k) {
  const double kd = static_cast<double>(k.value());
  const double log_norm = std::lgamma(0.5 * (kd + 1.0)) -
                          std::lgamma(0.5 * kd) -
                          0.5 * std::log(kd * std::numbers::pi);
  return std::exp(log_norm - 0.5 * (kd + 1.0) * std::log1p(x * x / kd));
}

double StudentTUpperTail(double x, Dof k) {
  const double kd = static_cast<double>(k.value());
  if (x >= 0.0) return StudentTUpperTailNonNegative(x, kd);
  return 1.0 - StudentTUpperTailNonNegative(-x, kd);
}

double StudentTCdf(double x, Dof k) {
  const double kd = static_cast<double>(k.value());
  if (x <= 0.0) return StudentTUpperTailNonNegative(-x, kd);
  return 1.0 - StudentTUpperTailNonNegative(x, kd);
}

double StudentTQuantile(TailMass q, Dof k) {
  const double qv = q.value();
  if (qv == 0.5) return 0.0;
  // Solve Pr[T > t] = tail for t > 0, then restore the sign.
  const double tail = std::min(qv, 1.0 - qv);
  const double kd = static_cast<double>(k.value());
  double lo = 0.0;
  double hi = 1.0;
  while (StudentTUpperTailNonNegative(hi, kd) > tail) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) {
      throw Error(ErrorCode::kInvalidParameter, "quantile out of range");
    }
  }
  for (int i = 0; i < 400 && hi - lo > 1e-11 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (StudentTUpperTailNonNegative(mid, kd) > tail) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double t = 0.5 * (lo + hi);
  for (int i = 0; i < 4; ++i) {
    const double f = StudentTUpperTailNonNegative(t, kd) - tail;
    const double slope = -StudentTPdf(t, k);
    if (slope == 0.0) break;
    const double next = t - f / slope;
    if (!(next > lo && next < hi)) break;
    t = next;
  }
  return qv > 0.5 ? t : -t;
}

double NormalPdf(double x, double stddev) {
  const double z = x / stddev;
  return std::exp(-0.5 * z * z) / (stddev * std::sqrt(2.0 * std::numbers::pi));
}

double NormalCdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double NormalUpperTail(double x) {
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double NormalQuantile(TailMass q) {
  // Acklam's rational approximation, refined by Halley steps on erfc.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;
  const double p = q.value();
  double x;
  if (p < kLow) {
    const double s = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * s + c[1]) * s + c[2]) * s + c[3]) * s + c[4]) * s + c[5]) /
        ((((d[0] * s + d[1]) * s + d[2]) * s + d[3]) * s + 1.0);
  } else if (p <= 1.0 - kLow) {
    const double s = p - 0.5;
    const double r = s * s;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        s /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double s = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * s + c[1]) * s + c[2]) * s + c[3]) * s + c[4]) * s + c[5]) /
        ((((d[0] * s + d[1]) * s + d[2]) * s + d[3]) * s + 1.0);
  }
  for (int i = 0; i < 3; ++i) {
    // Work on whichever tail keeps the residual free of cancellation.
    const double e = x < 0.0 ? NormalCdf(x) - p : (1.0 - p) - NormalUpperTail(x);
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double UpperTailQuantile(TailMass alpha) {
  return -NormalQuantile(alpha);
}

double ChiSquaredCdf(double x, Dof k) {
  if (x <= 0.0) return 0.0;
  return RegularizedLowerGamma(0.5 * static_cast<double>(k.value()), 0.5 * x);
}

Interval Chi2TailInterval(Dof k, TailMass nu) {
  const double root_k = std::sqrt(static_cast<double>(k.value()));
  const double slack = std::sqrt(2.0 * std::log(2.0 / nu.value()));
  const double lo = std::max(0.0, root_k - slack);
  return {lo * lo, (root_k + slack) * (root_k + slack)};
}

double GaussianTailBound(double sigma, TailMass nu) {
  return 2.0 * sigma * std::sqrt(std::log(2.0 / nu.value()));
}

double StudentTTailBound(Dof k, TailMass nu, double c) {
  const double kd = static_cast<double>(k.value());
  return c * std::sqrt(kd * (std::pow(1.0 / nu.value(), 2.0 / kd) - 1.0));
}

double SampleLaplace(double scale, Rng& rng) {
  if (!(scale > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, "Laplace scale must be > 0");
  }
  const double u = rng.Uniform() - 0.5;
  const double magnitude = -scale * std::log1p(-2.0 * std::fabs(u));
  return u < 0.0 ? -magnitude : magnitude;
}

Eigen::MatrixXd SampleGaussianMatrix(Eigen::Index rows, Eigen::Index cols,
                                     Rng& rng) {
  if (rows < 1 || cols < 1) {
    throw Error(ErrorCode::kInvalidParameter,
                "Gaussian matrix dimensions must be positive");
  }
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = rng.Normal();
  }
  return out;
}

double KolmogorovSmirnovStatistic(std::span<const double> samples,
                                  const std::function<double(double)>& cdf) {
  if (samples.empty()) {
    throw Error(ErrorCode::kInvalidInput, "KS statistic needs samples");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    worst = std::max({worst, (static_cast<double>(i) + 1.0) / n - f,
                      f - static_cast<double>(i) / n});
  }
  return worst;
}

double KolmogorovSmirnovCritical(std::size_t n, double level) {
  return std::sqrt(-0.5 * std::log(0.5 * level)) /
         std::sqrt(static_cast<double>(n));
}

double DkwRadius(std::size_t m, double gamma) {
  return std::sqrt(std::log(2.0 / gamma) / (2.0 * static_cast<double>(m)));
}

}  // namespace dplr
