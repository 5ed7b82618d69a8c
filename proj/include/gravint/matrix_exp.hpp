#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <utility>

namespace gravint {

template <std::size_t N>
using SquareMatrix = std::array<std::array<double, N>, N>;

template <std::size_t N>
using ColumnVector = std::array<double, N>;

namespace detail {

template <std::size_t N>
SquareMatrix<N> identity() {
  SquareMatrix<N> m{};
  for (std::size_t i = 0; i < N; ++i) m[i][i] = 1.0;
  return m;
}

template <std::size_t N>
SquareMatrix<N> multiply(const SquareMatrix<N>& a, const SquareMatrix<N>& b) {
  SquareMatrix<N> c{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t k = 0; k < N; ++k)
      for (std::size_t j = 0; j < N; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

/// sum_k coeffs[k] * terms[k]
template <std::size_t N, std::size_t K>
SquareMatrix<N> combine(const std::array<double, K>& coeffs,
                        const std::array<const SquareMatrix<N>*, K>& terms) {
  SquareMatrix<N> c{};
  for (std::size_t t = 0; t < K; ++t)
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) c[i][j] += coeffs[t] * (*terms[t])[i][j];
  return c;
}

template <std::size_t N>
double norm_one(const SquareMatrix<N>& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < N; ++i) col += std::abs(a[i][j]);
    best = std::max(best, col);
  }
  return best;
}

/// Solves A X = B by Gaussian elimination with partial pivoting.
template <std::size_t N>
SquareMatrix<N> solve(SquareMatrix<N> a, SquareMatrix<N> b) {
  for (std::size_t col = 0; col < N; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < N; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < N; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t j = col; j < N; ++j) a[r][j] -= f * a[col][j];
      for (std::size_t j = 0; j < N; ++j) b[r][j] -= f * b[col][j];
    }
  }
  for (std::size_t col = N; col-- > 0;) {
    for (std::size_t j = 0; j < N; ++j) {
      double s = b[col][j];
      for (std::size_t k = col + 1; k < N; ++k) s -= a[col][k] * b[k][j];
      b[col][j] = s / a[col][col];
    }
  }
  return b;
}

}  // namespace detail

/// exp(A) by scaling and squaring with a degree-13 Pade approximant
/// (Higham 2005). Small fixed sizes only.
template <std::size_t N>
SquareMatrix<N> expm(const SquareMatrix<N>& a) {
  constexpr double kTheta13 = 5.371920351148152;
  constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};

  const double norm = detail::norm_one(a);
  int squarings = 0;
  if (norm > kTheta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
  }
  SquareMatrix<N> x = a;
  const double scale = std::ldexp(1.0, -squarings);
  for (auto& row : x)
    for (auto& v : row) v *= scale;

  const auto id = detail::identity<N>();
  const auto x2 = detail::multiply(x, x);
  const auto x4 = detail::multiply(x2, x2);
  const auto x6 = detail::multiply(x4, x2);

  const auto u_inner = detail::combine<N, 3>({b[13], b[11], b[9]}, {&x6, &x4, &x2});
  auto u_outer = detail::multiply(x6, u_inner);
  const auto u_rest = detail::combine<N, 4>({b[7], b[5], b[3], b[1]},
                                            {&x6, &x4, &x2, &id});
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) u_outer[i][j] += u_rest[i][j];
  const auto u = detail::multiply(x, u_outer);

  const auto v_inner = detail::combine<N, 3>({b[12], b[10], b[8]}, {&x6, &x4, &x2});
  auto v = detail::multiply(x6, v_inner);
  const auto v_rest = detail::combine<N, 4>({b[6], b[4], b[2], b[0]},
                                            {&x6, &x4, &x2, &id});
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) v[i][j] += v_rest[i][j];

  SquareMatrix<N> num{}, den{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      num[i][j] = v[i][j] + u[i][j];
      den[i][j] = v[i][j] - u[i][j];
    }
  auto r = detail::solve(den, num);
  for (int s = 0; s < squarings; ++s) r = detail::multiply(r, r);
  return r;
}

template <std::size_t N>
ColumnVector<N> mat_vec(const SquareMatrix<N>& m, const ColumnVector<N>& v) {
  ColumnVector<N> out{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) out[i] += m[i][j] * v[j];
  return out;
}

}  // namespace gravint
