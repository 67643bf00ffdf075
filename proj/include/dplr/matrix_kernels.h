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

// Dense linear-algebra primitives templated on the scalar type: SVD-based
// least squares and ridge solves, minimum singular values, Gram products and
// positive-definite inverse queries.

#ifndef DPLR_MATRIX_KERNELS_H_
#define DPLR_MATRIX_KERNELS_H_

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "dplr/error.h"

namespace dplr {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Derived>
void RequireFinite(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::kInvalidInput,
                std::string(what) + " contains non-finite entries");
  }
}

template <typename Scalar>
struct SvdFactors {
  Matrix<Scalar> u;
  Vector<Scalar> s;  // nonincreasing
  Matrix<Scalar> v;
};

template <typename Derived>
SvdFactors<typename Derived::Scalar> ThinSvd(
    const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  RequireFinite(a, "matrix");
  Eigen::BDCSVD<Matrix<Scalar>> svd(a.derived(),
                                    Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

// Singular values below this are treated as zero by pseudo-inverse solves.
template <typename Scalar>
Scalar PseudoInverseTolerance(Eigen::Index rows, Eigen::Index cols,
                              Scalar largest_singular_value) {
  return static_cast<Scalar>(std::max(rows, cols)) *
         std::numeric_limits<Scalar>::epsilon() * largest_singular_value;
}

// Smallest of the `cols` singular values of `a`; a matrix with fewer rows
// than columns has a nontrivial kernel and returns zero.
template <typename Derived>
typename Derived::Scalar MinSingularValue(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.size() == 0) {
    throw Error(ErrorCode::kInvalidInput, "empty matrix has no singular values");
  }
  RequireFinite(a, "matrix");
  if (a.rows() < a.cols()) return Scalar(0);
  Eigen::BDCSVD<Matrix<Scalar>> svd(a.derived());
  return svd.singularValues()(svd.singularValues().size() - 1);
}

template <typename Scalar>
struct LeastSquaresSolution {
  Vector<Scalar> beta;
  Vector<Scalar> residual;
  Eigen::Index rank = 0;
};

// beta = X^+ y through the thin SVD; residual = y - X beta.
template <typename DerivedX, typename DerivedY>
LeastSquaresSolution<typename DerivedX::Scalar> LeastSquaresSolve(
    const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  if (x.rows() != y.rows() || y.cols() != 1) {
    throw Error(ErrorCode::kInvalidInput,
                "least squares: X has " + std::to_string(x.rows()) +
                    " rows but y has " + std::to_string(y.rows()));
  }
  RequireFinite(y, "response");
  const SvdFactors<Scalar> f = ThinSvd(x);
  const Scalar tol =
      f.s.size() ? PseudoInverseTolerance(x.rows(), x.cols(), f.s(0)) : Scalar(0);
  Vector<Scalar> projected = f.u.transpose() * y;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < f.s.size(); ++i) {
    if (f.s(i) > tol) {
      projected(i) /= f.s(i);
      ++rank;
    } else {
      projected(i) = Scalar(0);
    }
  }
  LeastSquaresSolution<Scalar> out;
  out.beta = f.v * projected;
  out.residual = y - x * out.beta;
  out.rank = rank;
  return out;
}

template <typename Scalar>
struct RidgeSolution {
  Vector<Scalar> beta;
  // Set when w2 == 0 and X is rank deficient, so the minimum-norm
  // least-squares solution was returned instead.
  bool used_pseudo_inverse = false;
};

// Solves (X^T X + w2 I) beta = X^T y via beta = V diag(s / (s^2 + w2)) U^T y.
template <typename DerivedX, typename DerivedY>
RidgeSolution<typename DerivedX::Scalar> RidgeSolve(
    const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y,
    typename DerivedX::Scalar w2) {
  using Scalar = typename DerivedX::Scalar;
  if (!(w2 >= Scalar(0))) {
    throw Error(ErrorCode::kInvalidParameter, "ridge penalty must be >= 0");
  }
  if (x.rows() != y.rows() || y.cols() != 1) {
    throw Error(ErrorCode::kInvalidInput, "ridge: dimension mismatch");
  }
  RequireFinite(y, "response");
  RidgeSolution<Scalar> out;
  if (w2 == Scalar(0)) {
    LeastSquaresSolution<Scalar> ls = LeastSquaresSolve(x, y);
    out.beta = std::move(ls.beta);
    out.used_pseudo_inverse = ls.rank < x.cols();
    return out;
  }
  const SvdFactors<Scalar> f = ThinSvd(x);
  Vector<Scalar> projected = f.u.transpose() * y;
  for (Eigen::Index i = 0; i < f.s.size(); ++i) {
    projected(i) *= f.s(i) / (f.s(i) * f.s(i) + w2);
  }
  out.beta = f.v * projected;
  return out;
}

// A^T A, accumulated row by row for each upper-triangle entry and mirrored,
// so the result is symmetric to the bit.
template <typename Derived>
Matrix<typename Derived::Scalar> Gram(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index d = a.cols();
  Matrix<Scalar> g(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = j; k < d; ++k) {
      Scalar sum(0);
      for (Eigen::Index i = 0; i < a.rows(); ++i) sum += a(i, j) * a(i, k);
      g(j, k) = sum;
      g(k, j) = sum;
    }
  }
  return g;
}

template <typename Derived>
Matrix<typename Derived::Scalar> Symmetrize(const Eigen::MatrixBase<Derived>& s) {
  Matrix<typename Derived::Scalar> out = s;
  out = (out + out.transpose().eval()) / 2;
  return out;
}

// Inverse queries against a symmetric positive-definite matrix, factored
// once. The input is symmetrized before factoring.
template <typename Scalar>
class SpdInverse {
 public:
  template <typename Derived>
  explicit SpdInverse(const Eigen::MatrixBase<Derived>& s) {
    if (s.rows() != s.cols() || s.rows() == 0) {
      throw Error(ErrorCode::kInvalidInput, "expected a nonempty square matrix");
    }
    RequireFinite(s, "matrix");
    ldlt_.compute(Symmetrize(s));
    const Vector<Scalar> pivots = ldlt_.vectorD();
    const Scalar smallest = pivots.minCoeff();
    const Scalar largest = pivots.cwiseAbs().maxCoeff();
    if (ldlt_.info() != Eigen::Success ||
        !(smallest > PseudoInverseTolerance(s.rows(), s.cols(), largest))) {
      throw Error(ErrorCode::kSingular,
                  "matrix is numerically singular (smallest pivot " +
                      std::to_string(static_cast<double>(smallest)) + ")");
    }
  }

  Eigen::Index size() const { return ldlt_.rows(); }

  template <typename Derived>
  Vector<Scalar> Solve(const Eigen::MatrixBase<Derived>& b) const {
    return ldlt_.solve(b);
  }

  // Row j of the inverse (equal to column j by symmetry).
  Vector<Scalar> Row(Eigen::Index j) const {
    CheckIndex(j);
    return ldlt_.solve(Vector<Scalar>::Unit(size(), j));
  }

  Scalar DiagEntry(Eigen::Index j) const { return Row(j)(j); }

  Vector<Scalar> Diagonal() const { return Inverse().diagonal(); }

  Matrix<Scalar> Inverse() const {
    return Symmetrize(
        ldlt_.solve(Matrix<Scalar>::Identity(size(), size())).eval());
  }

 private:
  void CheckIndex(Eigen::Index j) const {
    if (j < 0 || j >= size()) {
      throw Error(ErrorCode::kInvalidParameter,
                  "coordinate " + std::to_string(j) + " out of range");
    }
  }

  Eigen::LDLT<Matrix<Scalar>> ldlt_;
};

// e_j^T S^{-1} e_j through a single factorization and solve.
template <typename Derived>
typename Derived::Scalar InverseDiagEntry(const Eigen::MatrixBase<Derived>& s,
                                          Eigen::Index j) {
  return SpdInverse<typename Derived::Scalar>(s).DiagEntry(j);
}

}  // namespace dplr

#endif  // DPLR_MATRIX_KERNELS_H_
