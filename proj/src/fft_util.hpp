#pragma once

#include <fftw3.h>

#include <complex>
#include <cstring>

namespace kdlr::detail {

// RAII wrapper around FFTW real transforms on a 1D or 2D row-major array
// (n0 slow, n1 fast; pass n1 = 0 for 1D). Plans use FFTW_ESTIMATE so repeated
// runs are bit-reproducible. Not thread-safe: each instance owns its buffers.
class RealFFT {
public:
  RealFFT(int n0, int n1 = 0) : n0_(n0), n1_(n1) {
    nreal_ = n1_ > 0 ? static_cast<long>(n0_) * n1_ : n0_;
    ncomplex_ = n1_ > 0 ? static_cast<long>(n0_) * (n1_ / 2 + 1) : n0_ / 2 + 1;
    real_ = fftw_alloc_real(nreal_);
    cplx_ = fftw_alloc_complex(ncomplex_);
    if (n1_ > 0) {
      fwd_ = fftw_plan_dft_r2c_2d(n0_, n1_, real_, cplx_, FFTW_ESTIMATE);
      bwd_ = fftw_plan_dft_c2r_2d(n0_, n1_, cplx_, real_, FFTW_ESTIMATE);
    } else {
      fwd_ = fftw_plan_dft_r2c_1d(n0_, real_, cplx_, FFTW_ESTIMATE);
      bwd_ = fftw_plan_dft_c2r_1d(n0_, cplx_, real_, FFTW_ESTIMATE);
    }
  }

  RealFFT(const RealFFT&) = delete;
  RealFFT& operator=(const RealFFT&) = delete;

  ~RealFFT() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(real_);
    fftw_free(cplx_);
  }

  long n_real() const { return nreal_; }
  long n_complex() const { return ncomplex_; }

  void forward(const double* in, std::complex<double>* out) {
    std::memcpy(real_, in, sizeof(double) * nreal_);
    fftw_execute(fwd_);
    std::memcpy(out, cplx_, sizeof(fftw_complex) * ncomplex_);
  }

  // Unnormalized inverse; caller divides by n_real().
  void backward(const std::complex<double>* in, double* out) {
    std::memcpy(cplx_, in, sizeof(fftw_complex) * ncomplex_);
    fftw_execute(bwd_);
    std::memcpy(out, real_, sizeof(double) * nreal_);
  }

private:
  int n0_, n1_;
  long nreal_, ncomplex_;
  double* real_;
  fftw_complex* cplx_;
  fftw_plan fwd_, bwd_;
};

} // namespace kdlr::detail
