#ifndef OCCUSCORE_LINALG_HPP
#define OCCUSCORE_LINALG_HPP

// Small dense linear algebra for fixed sizes up to 4x4: LU solves,
// cyclic Jacobi eigensolver, symmetric square roots. Everything is by
// value; matrices are row-major std::array wrappers.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>

namespace occuscore::la {

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t R, std::size_t C>
struct Mat {
  std::array<double, R * C> a{};

  double& operator()(std::size_t i, std::size_t j) { return a[i * C + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * C + j]; }

  static Mat identity()
    requires(R == C)
  {
    Mat m;
    for (std::size_t i = 0; i < R; ++i) m(i, i) = 1.0;
    return m;
  }
};

using Mat2 = Mat<2, 2>;
using Mat3 = Mat<3, 3>;
using Mat4 = Mat<4, 4>;

template <std::size_t R, std::size_t C>
Mat<C, R> transpose(const Mat<R, C>& m) {
  Mat<C, R> t;
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < C; ++j) t(j, i) = m(i, j);
  return t;
}

template <std::size_t R, std::size_t K, std::size_t C>
Mat<R, C> operator*(const Mat<R, K>& x, const Mat<K, C>& y) {
  Mat<R, C> z;
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t k = 0; k < K; ++k) {
      const double xik = x(i, k);
      for (std::size_t j = 0; j < C; ++j) z(i, j) += xik * y(k, j);
    }
  return z;
}

template <std::size_t R, std::size_t C>
Vec<R> operator*(const Mat<R, C>& m, const Vec<C>& v) {
  Vec<R> out{};
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < C; ++j) out[i] += m(i, j) * v[j];
  return out;
}

template <std::size_t R, std::size_t C>
Mat<R, C> operator+(const Mat<R, C>& x, const Mat<R, C>& y) {
  Mat<R, C> z;
  for (std::size_t i = 0; i < z.a.size(); ++i) z.a[i] = x.a[i] + y.a[i];
  return z;
}

template <std::size_t R, std::size_t C>
Mat<R, C> operator-(const Mat<R, C>& x, const Mat<R, C>& y) {
  Mat<R, C> z;
  for (std::size_t i = 0; i < z.a.size(); ++i) z.a[i] = x.a[i] - y.a[i];
  return z;
}

template <std::size_t R, std::size_t C>
Mat<R, C> operator*(double s, const Mat<R, C>& x) {
  Mat<R, C> z;
  for (std::size_t i = 0; i < z.a.size(); ++i) z.a[i] = s * x.a[i];
  return z;
}

template <std::size_t N>
double dot(const Vec<N>& x, const Vec<N>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) s += x[i] * y[i];
  return s;
}

template <std::size_t N>
double max_abs(const Vec<N>& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

template <std::size_t R, std::size_t C>
double frobenius_norm(const Mat<R, C>& m) {
  double s = 0.0;
  for (double v : m.a) s += v * v;
  return std::sqrt(s);
}

template <std::size_t R, std::size_t C>
Mat<R, C> symmetrize(const Mat<R, C>& m)
  requires(R == C)
{
  Mat<R, C> s;
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < C; ++j) s(i, j) = 0.5 * (m(i, j) + m(j, i));
  return s;
}

// Partial-pivot LU factorization. Singularity is flagged when a pivot
// vanishes or the pivot-ratio condition estimate exceeds 1e12.
template <std::size_t N>
struct Lu {
  Mat<N, N> lu;
  std::array<std::size_t, N> perm{};
  bool singular = false;

  explicit Lu(const Mat<N, N>& m) : lu(m) {
    for (std::size_t i = 0; i < N; ++i) perm[i] = i;
    double max_piv = 0.0, min_piv = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < N; ++k) {
      std::size_t piv = k;
      for (std::size_t i = k + 1; i < N; ++i)
        if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
      if (piv != k) {
        for (std::size_t j = 0; j < N; ++j) std::swap(lu(k, j), lu(piv, j));
        std::swap(perm[k], perm[piv]);
      }
      const double p = std::abs(lu(k, k));
      if (p == 0.0) {
        singular = true;
        return;
      }
      max_piv = std::max(max_piv, p);
      min_piv = std::min(min_piv, p);
      for (std::size_t i = k + 1; i < N; ++i) {
        lu(i, k) /= lu(k, k);
        for (std::size_t j = k + 1; j < N; ++j) lu(i, j) -= lu(i, k) * lu(k, j);
      }
    }
    if (max_piv / min_piv > 1e12) singular = true;
  }

  Vec<N> solve(const Vec<N>& b) const {
    Vec<N> x{};
    for (std::size_t i = 0; i < N; ++i) x[i] = b[perm[i]];
    for (std::size_t i = 1; i < N; ++i)
      for (std::size_t j = 0; j < i; ++j) x[i] -= lu(i, j) * x[j];
    for (std::size_t ii = N; ii > 0; --ii) {
      const std::size_t i = ii - 1;
      for (std::size_t j = i + 1; j < N; ++j) x[i] -= lu(i, j) * x[j];
      x[i] /= lu(i, i);
    }
    return x;
  }

  double det() const {
    if (singular && lu(N - 1, N - 1) == 0.0) return 0.0;
    double d = 1.0;
    for (std::size_t i = 0; i < N; ++i) d *= lu(i, i);
    // parity of the permutation
    std::array<std::size_t, N> p = perm;
    for (std::size_t i = 0; i < N; ++i)
      while (p[i] != i) {
        std::swap(p[i], p[p[i]]);
        d = -d;
      }
    return d;
  }
};

template <std::size_t N>
std::optional<Vec<N>> solve(const Mat<N, N>& m, const Vec<N>& b) {
  Lu<N> f(m);
  if (f.singular) return std::nullopt;
  return f.solve(b);
}

template <std::size_t N>
std::optional<Mat<N, N>> inverse(const Mat<N, N>& m) {
  Lu<N> f(m);
  if (f.singular) return std::nullopt;
  Mat<N, N> inv;
  for (std::size_t j = 0; j < N; ++j) {
    Vec<N> e{};
    e[j] = 1.0;
    Vec<N> col = f.solve(e);
    for (std::size_t i = 0; i < N; ++i) inv(i, j) = col[i];
  }
  return inv;
}

template <std::size_t N>
double det(const Mat<N, N>& m) {
  return Lu<N>(m).det();
}

template <std::size_t N>
struct EigenSym {
  Vec<N> values;          // sorted descending
  Mat<N, N> vectors;      // columns are the matching eigenvectors
};

// Cyclic Jacobi rotations for small symmetric matrices. Sweeps run
// until the off-diagonal Frobenius norm drops below 1e-12 relative to
// the matrix scale.
template <std::size_t N>
EigenSym<N> sym_eigen(const Mat<N, N>& input) {
  const double scale = std::max(1.0, frobenius_norm(input));
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j)
      if (std::abs(input(i, j) - input(j, i)) > 1e-8 * scale)
        throw std::domain_error("sym_eigen: matrix is not symmetric");

  Mat<N, N> a = symmetrize(input);
  Mat<N, N> v = Mat<N, N>::identity();

  auto off_norm = [&a]() {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 100 && off_norm() > 1e-12 * scale; ++sweep) {
    for (std::size_t p = 0; p + 1 < N; ++p)
      for (std::size_t q = p + 1; q < N; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < N; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < N; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < N; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }

  EigenSym<N> out;
  std::array<std::size_t, N> order{};
  for (std::size_t i = 0; i < N; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&a](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
  for (std::size_t i = 0; i < N; ++i) {
    out.values[i] = a(order[i], order[i]);
    for (std::size_t k = 0; k < N; ++k) out.vectors(k, i) = v(k, order[i]);
  }
  return out;
}

template <std::size_t N>
struct SymSqrt {
  Mat<N, N> sqrt;
  std::optional<Mat<N, N>> inv;
  std::optional<Mat<N, N>> inv_sqrt;
};

// Square root (and inverses when well conditioned) of a symmetric PSD
// matrix. Eigenvalues in [-1e-10, 0) are clipped to zero; anything more
// negative is rejected.
template <std::size_t N>
SymSqrt<N> sym_sqrt_and_inv(const Mat<N, N>& m) {
  EigenSym<N> e = sym_eigen(m);
  const double scale = std::max(1.0, std::abs(e.values[0]));
  SymSqrt<N> out;
  Vec<N> lam = e.values;
  for (double& l : lam) {
    if (l < -1e-10 * scale) throw std::domain_error("sym_sqrt_and_inv: matrix is not PSD");
    if (l < 0.0) l = 0.0;
  }
  const bool invertible = lam[N - 1] > 1e-12 * scale;
  Mat<N, N> s, inv, isq;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      for (std::size_t k = 0; k < N; ++k) {
        const double vv = e.vectors(i, k) * e.vectors(j, k);
        s(i, j) += std::sqrt(lam[k]) * vv;
        if (invertible) {
          inv(i, j) += vv / lam[k];
          isq(i, j) += vv / std::sqrt(lam[k]);
        }
      }
  out.sqrt = s;
  if (invertible) {
    out.inv = inv;
    out.inv_sqrt = isq;
  }
  return out;
}

}  // namespace occuscore::la

#endif
