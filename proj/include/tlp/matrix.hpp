#pragma once

#include <string>
#include <vector>

namespace tlp {

// Row-major dense matrix of doubles. The workhorse of the factorization and
// scoring code; kept deliberately small.
class DenseMat {
 public:
  DenseMat() = default;
  DenseMat(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), v_(std::size_t(rows) * cols, fill) {}

  static DenseMat identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return v_.empty(); }

  double& operator()(int r, int c) { return v_[std::size_t(r) * cols_ + c]; }
  double operator()(int r, int c) const { return v_[std::size_t(r) * cols_ + c]; }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  std::size_t size() const { return v_.size(); }

  bool same_shape(const DenseMat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> v_;
};

// OpenMP-parallel product kernel and its serial reference. Both iterate in the
// same order per output element, so results are bitwise identical and
// independent of the thread count.
DenseMat matmul(const DenseMat& a, const DenseMat& b);
DenseMat matmul_serial(const DenseMat& a, const DenseMat& b);

DenseMat transpose(const DenseMat& a);

// aᵀ·b and a·bᵀ
DenseMat at_b(const DenseMat& a, const DenseMat& b);
DenseMat a_bt(const DenseMat& a, const DenseMat& b);

DenseMat add(const DenseMat& a, const DenseMat& b);
DenseMat sub(const DenseMat& a, const DenseMat& b);
DenseMat hadamard(const DenseMat& a, const DenseMat& b);
DenseMat scaled(const DenseMat& a, double c);
void add_scaled(DenseMat& acc, const DenseMat& x, double c);

double frob_sq(const DenseMat& a);
// Σ_ij a_ij·b_ij == tr(aᵀb)
double dot(const DenseMat& a, const DenseMat& b);
double trace(const DenseMat& a);
double min_entry(const DenseMat& a);
double max_abs(const DenseMat& a);
double max_abs_diff(const DenseMat& a, const DenseMat& b);
double mean_entry(const DenseMat& a);
bool all_finite(const DenseMat& a);

DenseMat symmetrized(const DenseMat& a);
void clamp_min(DenseMat& a, double lo);

// matrix power by repeated multiplication; k >= 0 (k = 0 gives identity)
DenseMat matpow(const DenseMat& a, int k);

std::string shape_str(const DenseMat& a);

}  // namespace tlp
