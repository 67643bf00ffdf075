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

// Distribution functions, quantiles and samplers shared by every inference
// path. All CDFs are lower-tail; upper tails have their own entry points so
// callers never have to flip signs by hand.

#ifndef DPLR_STATS_KERNELS_H_
#define DPLR_STATS_KERNELS_H_

#include <cstdint>
#include <functional>
#include <span>

#include <Eigen/Dense>

#include "dplr/rng.h"

namespace dplr {

// Degrees of freedom of a T or chi-squared distribution; always >= 1.
class Dof {
 public:
  explicit Dof(std::int64_t k);
  std::int64_t value() const { return k_; }

 private:
  std::int64_t k_;
};

// A probability mass strictly inside (0, 1): confidence levels, tail masses.
class TailMass {
 public:
  explicit TailMass(double q);
  double value() const { return q_; }

 private:
  double q_;
};

struct Interval {
  double lo;
  double hi;
};

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double RegularizedIncompleteBeta(double x, double a, double b);

// Regularized lower incomplete gamma P(a, x).
double RegularizedLowerGamma(double a, double x);

double StudentTPdf(double x, Dof k);
double StudentTCdf(double x, Dof k);
// Pr[T_k > x], computed without cancellation for large x.
double StudentTUpperTail(double x, Dof k);
// Inverse of StudentTCdf: safeguarded bisection followed by Newton polish.
double StudentTQuantile(TailMass q, Dof k);

double NormalPdf(double x, double stddev = 1.0);
double NormalCdf(double x);
double NormalUpperTail(double x);
double NormalQuantile(TailMass q);
// tau such that Pr[N(0,1) > tau] = alpha.
double UpperTailQuantile(TailMass alpha);

double ChiSquaredCdf(double x, Dof k);

// ((sqrt(k) - sqrt(2 ln(2/nu)))_+^2, (sqrt(k) + sqrt(2 ln(2/nu)))^2): a
// chi-squared_k sample lands inside with probability at least 1 - nu.
Interval Chi2TailInterval(Dof k, TailMass nu);

// 2 sigma sqrt(ln(2/nu)); the more conservative of the two published forms
// of the Gaussian tail bound.
double GaussianTailBound(double sigma, TailMass nu);

// C sqrt(k ((1/nu)^(2/k) - 1)), the heavy-tail bound on T_k.
double StudentTTailBound(Dof k, TailMass nu, double c = 2.0);

// Laplace(0, scale) by inverse-CDF sampling; variance 2 scale^2.
double SampleLaplace(double scale, Rng& rng);

// rows x cols i.i.d. N(0, 1), drawn in row-major order.
Eigen::MatrixXd SampleGaussianMatrix(Eigen::Index rows, Eigen::Index cols,
                                     Rng& rng);

// sup_x |F_n(x) - F(x)| for the empirical CDF of `samples`.
double KolmogorovSmirnovStatistic(std::span<const double> samples,
                                  const std::function<double(double)>& cdf);

// Asymptotic one-sample KS critical value at significance `level`.
double KolmogorovSmirnovCritical(std::size_t n, double level);

// Dvoretzky-Kiefer-Wolfowitz radius sqrt(ln(2/gamma) / (2 m)).
double DkwRadius(std::size_t m, double gamma);

}  // namespace dplr

#endif  // DPLR_STATS_KERNELS_H_
