#include "tlp/matrix.hpp"

#include <cmath>
#include <cstdlib>

#include "tlp/error.hpp"

namespace tlp {

DenseMat DenseMat::identity(int n) {
  DenseMat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

namespace {

void check_mul(const DenseMat& a, const DenseMat& b) {
  if (a.cols() != b.rows())
    throw ValidationError("matmul: shape mismatch " + shape_str(a) + " x " + shape_str(b));
}

inline void mul_row(const DenseMat& a, const DenseMat& b, DenseMat& out, int i) {
  const int n = a.cols(), m = b.cols();
  double* o = out.data() + std::size_t(i) * m;
  for (int k = 0; k < n; ++k) {
    const double aik = a(i, k);
    if (aik == 0.0) continue;
    const double* brow = b.data() + std::size_t(k) * m;
    for (int j = 0; j < m; ++j) o[j] += aik * brow[j];
  }
}

}  // namespace

DenseMat matmul(const DenseMat& a, const DenseMat& b) {
  check_mul(a, b);
  DenseMat out(a.rows(), b.cols());
  const int r = a.rows();
#pragma omp parallel for schedule(static) if (std::size_t(r) * a.cols() * b.cols() > 32768)
  for (int i = 0; i < r; ++i) mul_row(a, b, out, i);
  return out;
}

DenseMat matmul_serial(const DenseMat& a, const DenseMat& b) {
  check_mul(a, b);
  DenseMat out(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) mul_row(a, b, out, i);
  return out;
}

DenseMat transpose(const DenseMat& a) {
  DenseMat out(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

DenseMat at_b(const DenseMat& a, const DenseMat& b) { return matmul(transpose(a), b); }

DenseMat a_bt(const DenseMat& a, const DenseMat& b) { return matmul(a, transpose(b)); }

DenseMat add(const DenseMat& a, const DenseMat& b) {
  if (!a.same_shape(b)) throw ValidationError("add: shape mismatch");
  DenseMat out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += b.data()[i];
  return out;
}

DenseMat sub(const DenseMat& a, const DenseMat& b) {
  if (!a.same_shape(b)) throw ValidationError("sub: shape mismatch");
  DenseMat out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] -= b.data()[i];
  return out;
}

DenseMat hadamard(const DenseMat& a, const DenseMat& b) {
  if (!a.same_shape(b)) throw ValidationError("hadamard: shape mismatch");
  DenseMat out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= b.data()[i];
  return out;
}

DenseMat scaled(const DenseMat& a, double c) {
  DenseMat out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= c;
  return out;
}

void add_scaled(DenseMat& acc, const DenseMat& x, double c) {
  if (!acc.same_shape(x)) throw ValidationError("add_scaled: shape mismatch");
  for (std::size_t i = 0; i < acc.size(); ++i) acc.data()[i] += c * x.data()[i];
}

double frob_sq(const DenseMat& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * a.data()[i];
  return s;
}

double dot(const DenseMat& a, const DenseMat& b) {
  if (!a.same_shape(b)) throw ValidationError("dot: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * b.data()[i];
  return s;
}

double trace(const DenseMat& a) {
  const int n = a.rows() < a.cols() ? a.rows() : a.cols();
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a(i, i);
  return s;
}

double min_entry(const DenseMat& a) {
  if (a.empty()) return 0.0;
  double m = a.data()[0];
  for (std::size_t i = 1; i < a.size(); ++i) m = std::min(m, a.data()[i]);
  return m;
}

double max_abs(const DenseMat& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a.data()[i]));
  return m;
}

double max_abs_diff(const DenseMat& a, const DenseMat& b) {
  if (!a.same_shape(b)) throw ValidationError("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::fabs(a.data()[i] - b.data()[i]));
  return m;
}

double mean_entry(const DenseMat& a) {
  if (a.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i];
  return s / double(a.size());
}

bool all_finite(const DenseMat& a) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!std::isfinite(a.data()[i])) return false;
  return true;
}

DenseMat symmetrized(const DenseMat& a) {
  if (a.rows() != a.cols()) throw ValidationError("symmetrized: matrix not square");
  DenseMat out(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(i, j) = 0.5 * (a(i, j) + a(j, i));
  return out;
}

void clamp_min(DenseMat& a, double lo) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.data()[i] < lo) a.data()[i] = lo;
}

DenseMat matpow(const DenseMat& a, int k) {
  if (a.rows() != a.cols()) throw ValidationError("matpow: matrix not square");
  if (k < 0) throw ValidationError("matpow: negative exponent");
  DenseMat out = DenseMat::identity(a.rows());
  for (int i = 0; i < k; ++i) out = matmul(out, a);
  return out;
}

std::string shape_str(const DenseMat& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

}  // namespace tlp
