#pragma once

// Scalar-generic kernels on the portfolio simplex. Everything here takes
// Eigen expressions and is header-only; the domain modules instantiate them
// with double.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>

namespace kcport {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
Vector<Scalar> uniform_portfolio(Eigen::Index m)
{
  return Vector<Scalar>::Constant(m, Scalar(1) / Scalar(m));
}

/// True when every coordinate is >= 0 and the coordinates sum to 1 within tol.
template <typename Derived>
bool on_simplex(const Eigen::MatrixBase<Derived>& b,
                typename Derived::Scalar tol = typename Derived::Scalar(1e-12))
{
  using Scalar = typename Derived::Scalar;
  if (b.size() == 0)
    return false;
  for (Eigen::Index j = 0; j < b.size(); ++j)
    if (!(b(j) >= Scalar(0)) || !std::isfinite(b(j)))
      return false;
  return std::abs(b.sum() - Scalar(1)) <= tol;
}

// log(sum_i exp(v_i)), shifted by the max so that huge or tiny exponents
// never overflow.
template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::MatrixBase<Derived>& v)
{
  using Scalar = typename Derived::Scalar;
  if (v.size() == 0)
    return -std::numeric_limits<Scalar>::infinity();
  const Scalar top = v.maxCoeff();
  if (!std::isfinite(top))
    return top;
  return top + std::log((v.array() - top).exp().sum());
}

/// Euclidean projection onto {b : b >= 0, sum b = 1} by the sort-and-threshold
/// method.
template <typename Derived>
Vector<typename Derived::Scalar> project_to_simplex(const Eigen::MatrixBase<Derived>& v)
{
  using Scalar = typename Derived::Scalar;
  const Eigen::Index m = v.size();
  Vector<Scalar> sorted = v;
  std::sort(sorted.data(), sorted.data() + m, std::greater<Scalar>());

  Scalar running = 0;
  Scalar theta = 0;
  for (Eigen::Index j = 0; j < m; ++j) {
    running += sorted(j);
    const Scalar candidate = (running - Scalar(1)) / Scalar(j + 1);
    if (sorted(j) - candidate > Scalar(0))
      theta = candidate;
  }
  Vector<Scalar> out = (v.array() - theta).max(Scalar(0)).matrix();
  const Scalar total = out.sum();
  if (total > Scalar(0))
    out /= total;
  return out;
}

// Weighted log objective sum_s w_s log<b, x_s> over the rows x_s of `rows`.
template <typename DerivedX, typename DerivedW, typename DerivedB>
typename DerivedB::Scalar log_objective(const Eigen::MatrixBase<DerivedX>& rows,
                                        const Eigen::MatrixBase<DerivedW>& weights,
                                        const Eigen::MatrixBase<DerivedB>& b)
{
  return weights.dot((rows * b).array().log().matrix());
}

template <typename DerivedX, typename DerivedW, typename DerivedB>
Vector<typename DerivedB::Scalar> log_objective_gradient(
    const Eigen::MatrixBase<DerivedX>& rows,
    const Eigen::MatrixBase<DerivedW>& weights,
    const Eigen::MatrixBase<DerivedB>& b)
{
  using Scalar = typename DerivedB::Scalar;
  const Vector<Scalar> scale = (weights.array() / (rows * b).array()).matrix();
  return rows.transpose() * scale;
}

/// Frank-Wolfe duality gap max_j g_j - <g, b>. For a concave objective on the
/// simplex this bounds the distance of f(b) to the maximum from above.
template <typename DerivedG, typename DerivedB>
typename DerivedB::Scalar simplex_gap(const Eigen::MatrixBase<DerivedG>& gradient,
                                      const Eigen::MatrixBase<DerivedB>& b)
{
  return gradient.maxCoeff() - gradient.dot(b);
}

} // namespace kcport
