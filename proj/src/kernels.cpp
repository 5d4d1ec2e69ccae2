#include "vpn/kernels.hpp"

#include <omp.h>

namespace vpn::kernels {

void matvec_serial(const Mat& w, const double* x, const double* b, double* y) {
  for (int i = 0; i < w.rows; ++i) {
    const double* row = w.row(i);
    double acc = b ? b[i] : 0.0;
    for (int j = 0; j < w.cols; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

void matvec_omp(const Mat& w, const double* x, const double* b, double* y, int threads) {
#pragma omp parallel for schedule(static) num_threads(threads)
  for (int i = 0; i < w.rows; ++i) {
    const double* row = w.row(i);
    double acc = b ? b[i] : 0.0;
    for (int j = 0; j < w.cols; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

void matvec(const Mat& w, const double* x, const double* b, double* y, int threads) {
  if (threads > 1)
    matvec_omp(w, x, b, y, threads);
  else
    matvec_serial(w, x, b, y);
}

void relu_inplace(double* x, int n) {
  for (int i = 0; i < n; ++i)
    if (x[i] < 0.0) x[i] = 0.0;
}

namespace {

inline void bound_stage_row(const Mat& w, const std::vector<double>& bias, const Mat& in_lo,
                            const Mat& in_hi, Mat& out_lo, Mat& out_hi, int i) {
  const int width = in_lo.cols;  // d + 1
  double* lo = out_lo.row(i);
  double* hi = out_hi.row(i);
  for (int t = 0; t < width; ++t) {
    lo[t] = 0.0;
    hi[t] = 0.0;
  }
  lo[width - 1] = bias[i];
  hi[width - 1] = bias[i];
  const double* wrow = w.row(i);
  for (int j = 0; j < w.cols; ++j) {
    const double wj = wrow[j];
    if (wj == 0.0) continue;
    const double* src_lo = wj >= 0.0 ? in_lo.row(j) : in_hi.row(j);
    const double* src_hi = wj >= 0.0 ? in_hi.row(j) : in_lo.row(j);
    for (int t = 0; t < width; ++t) {
      lo[t] += wj * src_lo[t];
      hi[t] += wj * src_hi[t];
    }
  }
}

}  // namespace

void bound_stage_serial(const Mat& w, const std::vector<double>& bias, const Mat& in_lo,
                        const Mat& in_hi, Mat& out_lo, Mat& out_hi) {
  for (int i = 0; i < w.rows; ++i) bound_stage_row(w, bias, in_lo, in_hi, out_lo, out_hi, i);
}

void bound_stage_omp(const Mat& w, const std::vector<double>& bias, const Mat& in_lo,
                     const Mat& in_hi, Mat& out_lo, Mat& out_hi, int threads) {
#pragma omp parallel for schedule(static) num_threads(threads)
  for (int i = 0; i < w.rows; ++i) bound_stage_row(w, bias, in_lo, in_hi, out_lo, out_hi, i);
}

void bound_stage(const Mat& w, const std::vector<double>& bias, const Mat& in_lo,
                 const Mat& in_hi, Mat& out_lo, Mat& out_hi, int threads) {
  if (threads > 1)
    bound_stage_omp(w, bias, in_lo, in_hi, out_lo, out_hi, threads);
  else
    bound_stage_serial(w, bias, in_lo, in_hi, out_lo, out_hi);
}

double affine_min_on_box(const double* row, const double* lo, const double* hi, int dim) {
  double acc = row[dim];
  for (int i = 0; i < dim; ++i) acc += row[i] * (row[i] >= 0.0 ? lo[i] : hi[i]);
  return acc;
}

double affine_max_on_box(const double* row, const double* lo, const double* hi, int dim) {
  double acc = row[dim];
  for (int i = 0; i < dim; ++i) acc += row[i] * (row[i] >= 0.0 ? hi[i] : lo[i]);
  return acc;
}

}  // namespace vpn::kernels
