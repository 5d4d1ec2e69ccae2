#pragma once

#include <cstddef>
#include <vector>

namespace vpn {

// Dense row-major matrix.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

  double& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
  double* row(int r) { return a.data() + static_cast<size_t>(r) * cols; }
  const double* row(int r) const { return a.data() + static_cast<size_t>(r) * cols; }
};

// Hot loops, each in a serial reference form and an OpenMP form. The
// parallel forms keep per-element summation order identical to the serial
// ones (parallelism is across independent rows/items), so results are
// bit-identical; tests hold both variants to that.
namespace kernels {

// y = W x + b  (b may be null)
void matvec_serial(const Mat& w, const double* x, const double* b, double* y);
void matvec_omp(const Mat& w, const double* x, const double* b, double* y, int threads);
void matvec(const Mat& w, const double* x, const double* b, double* y, int threads = 1);

void relu_inplace(double* x, int n);

// Interval-affine stage product for bound propagation. Rows of in_lo/in_hi
// are affine functions of d free variables (d+1 columns, constant last),
// with in_lo row-wise a sound lower form and in_hi an upper form. Pushes
// them through y = W x + b, selecting lower/upper per coefficient sign.
void bound_stage_serial(const Mat& w, const std::vector<double>& bias,
                        const Mat& in_lo, const Mat& in_hi, Mat& out_lo, Mat& out_hi);
void bound_stage_omp(const Mat& w, const std::vector<double>& bias,
                     const Mat& in_lo, const Mat& in_hi, Mat& out_lo, Mat& out_hi,
                     int threads);
void bound_stage(const Mat& w, const std::vector<double>& bias,
                 const Mat& in_lo, const Mat& in_hi, Mat& out_lo, Mat& out_hi,
                 int threads = 1);

// Concretize an affine row over a box, by coefficient sign.
double affine_min_on_box(const double* row, const double* lo, const double* hi, int dim);
double affine_max_on_box(const double* row, const double* lo, const double* hi, int dim);

}  // namespace kernels
}  // namespace vpn
