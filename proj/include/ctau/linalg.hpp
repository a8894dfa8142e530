#pragma once
#include <initializer_list>
#include <optional>
#include <vector>

#include "ctau/error.hpp"
#include "ctau/num.hpp"

namespace ctau {

/* Dense exact matrix over a field K; rows or cols may be 0 (legal empty matrix). */
template <class K>
struct Mat {
  int rows = 0, cols = 0;
  std::vector<K> a;  // row-major, size rows*cols

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(std::size_t(r) * std::size_t(c), K(0)) {}
  K& at(int i, int j) { return a[std::size_t(i) * cols + j]; }
  const K& at(int i, int j) const { return a[std::size_t(i) * cols + j]; }

  static Mat eye(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; i++) m.at(i, i) = K(1);
    return m;
  }
  static Mat from(std::initializer_list<std::initializer_list<long>> rs) {
    Mat m(int(rs.size()), rs.size() ? int(rs.begin()->size()) : 0);
    int i = 0;
    for (auto& r : rs) {
      int j = 0;
      for (long x : r) m.at(i, j++) = K(x);
      i++;
    }
    return m;
  }
  bool is_zero() const {
    for (auto& x : a)
      if (!(x == K(0))) return false;
    return true;
  }
  friend bool operator==(const Mat& x, const Mat& y) {
    return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
  }
};

template <class K>
Mat<K> mul(const Mat<K>& x, const Mat<K>& y) {
  if (x.cols != y.rows) precondition_error("mul shape mismatch");
  Mat<K> z(x.rows, y.cols);
  for (int i = 0; i < x.rows; i++)
    for (int k = 0; k < x.cols; k++) {
      const K& v = x.at(i, k);
      if (v == K(0)) continue;
      for (int j = 0; j < y.cols; j++) z.at(i, j) += v * y.at(k, j);
    }
  return z;
}

template <class K>
Mat<K> add(const Mat<K>& x, const Mat<K>& y) {
  if (x.rows != y.rows || x.cols != y.cols) precondition_error("add shape mismatch");
  Mat<K> z = x;
  for (std::size_t i = 0; i < z.a.size(); i++) z.a[i] += y.a[i];
  return z;
}

template <class K>
Mat<K> sub(const Mat<K>& x, const Mat<K>& y) {
  if (x.rows != y.rows || x.cols != y.cols) precondition_error("sub shape mismatch");
  Mat<K> z = x;
  for (std::size_t i = 0; i < z.a.size(); i++) z.a[i] -= y.a[i];
  return z;
}

template <class K>
Mat<K> scale(const K& c, const Mat<K>& x) {
  Mat<K> z = x;
  for (auto& v : z.a) v *= c;
  return z;
}

template <class K>
Mat<K> transpose(const Mat<K>& x) {
  Mat<K> z(x.cols, x.rows);
  for (int i = 0; i < x.rows; i++)
    for (int j = 0; j < x.cols; j++) z.at(j, i) = x.at(i, j);
  return z;
}

/* [x | y] side by side. */
template <class K>
Mat<K> hcat(const Mat<K>& x, const Mat<K>& y) {
  if (x.rows != y.rows) precondition_error("hcat shape mismatch");
  Mat<K> z(x.rows, x.cols + y.cols);
  for (int i = 0; i < x.rows; i++) {
    for (int j = 0; j < x.cols; j++) z.at(i, j) = x.at(i, j);
    for (int j = 0; j < y.cols; j++) z.at(i, x.cols + j) = y.at(i, j);
  }
  return z;
}

/* x stacked on top of y. */
template <class K>
Mat<K> vcat(const Mat<K>& x, const Mat<K>& y) {
  if (x.cols != y.cols) precondition_error("vcat shape mismatch");
  Mat<K> z(x.rows + y.rows, x.cols);
  for (int i = 0; i < x.rows; i++)
    for (int j = 0; j < x.cols; j++) z.at(i, j) = x.at(i, j);
  for (int i = 0; i < y.rows; i++)
    for (int j = 0; j < y.cols; j++) z.at(x.rows + i, j) = y.at(i, j);
  return z;
}

template <class K>
struct Rref {
  Mat<K> R;
  std::vector<int> pivots;  // strictly increasing pivot columns
  int rank = 0;
};

/* Gauss–Jordan reduced row-echelon form (exact, no pivoting heuristics needed). */
template <class K>
Rref<K> rref(const Mat<K>& m) {
  Rref<K> out;
  out.R = m;
  Mat<K>& R = out.R;
  int r = 0;
  for (int c = 0; c < R.cols && r < R.rows; c++) {
    int p = -1;
    for (int i = r; i < R.rows; i++)
      if (!(R.at(i, c) == K(0))) {
        p = i;
        break;
      }
    if (p < 0) continue;
    for (int j = 0; j < R.cols; j++) std::swap(R.at(p, j), R.at(r, j));
    K inv = K(1) / R.at(r, c);
    for (int j = c; j < R.cols; j++) R.at(r, j) *= inv;
    for (int i = 0; i < R.rows; i++) {
      if (i == r || R.at(i, c) == K(0)) continue;
      K f = R.at(i, c);
      for (int j = c; j < R.cols; j++) R.at(i, j) -= f * R.at(r, j);
    }
    out.pivots.push_back(c);
    r++;
  }
  out.rank = r;
  return out;
}

template <class K>
int rank(const Mat<K>& m) {
  return rref(m).rank;
}

/* Kernel basis as columns; cols = cols(m) - rank(m). */
template <class K>
Mat<K> nullspace(const Mat<K>& m) {
  Rref<K> rr = rref(m);
  std::vector<int> free_cols;
  {
    std::size_t pi = 0;
    for (int c = 0; c < m.cols; c++) {
      if (pi < rr.pivots.size() && rr.pivots[pi] == c)
        pi++;
      else
        free_cols.push_back(c);
    }
  }
  Mat<K> N(m.cols, int(free_cols.size()));
  for (int k = 0; k < int(free_cols.size()); k++) {
    int fc = free_cols[k];
    N.at(fc, k) = K(1);
    for (int i = 0; i < rr.rank; i++) N.at(rr.pivots[i], k) = -rr.R.at(i, fc);
  }
  return N;
}

/* One exact solution X of m·X = b (columnwise), or nullopt if inconsistent. */
template <class K>
std::optional<Mat<K>> solve(const Mat<K>& m, const Mat<K>& b) {
  if (m.rows != b.rows) precondition_error("solve shape mismatch");
  Rref<K> rr = rref(hcat(m, b));
  for (int p : rr.pivots)
    if (p >= m.cols) return std::nullopt;  // pivot in the b-block: no solution
  Mat<K> X(m.cols, b.cols);
  for (int i = 0; i < rr.rank; i++)
    for (int j = 0; j < b.cols; j++) X.at(rr.pivots[i], j) = rr.R.at(i, m.cols + j);
  return X;
}

/* Inverse via solve against the identity; nullopt when singular. */
template <class K>
std::optional<Mat<K>> inverse(const Mat<K>& m) {
  if (m.rows != m.cols) return std::nullopt;
  auto x = solve(m, Mat<K>::eye(m.rows));
  if (!x || !(mul(m, *x) == Mat<K>::eye(m.rows))) return std::nullopt;
  return x;
}

}  // namespace ctau
