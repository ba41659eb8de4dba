#pragma once

#include <string>
#include <vector>

#include "idamp/common.hpp"
#include "idamp/profiles.hpp"
#include "idamp/resolvent.hpp"

namespace idamp {

struct CRect {
  double re_lo = 0.0, re_hi = 1.0, im_lo = -0.5, im_hi = 0.5;
};

struct ScanConfig {
  int n = 128;  // Nystrom nodes per c sample
  int q = 8;
  int n_re = 32, n_im = 16;
  double threshold = 1e-6;
  double h_floor = 1e-6;
  EpsSchedule eps{1.0 / 32.0, 4};
  int delta_y0 = 9;  // y0 samples of the real-axis approach
  int delta_n = 256;  // Nystrom nodes for delta_hat
};

// Default rectangle: [b(0), b(1)] with a margin of a quarter of the range.
CRect default_rect(const ShearProfile& prof);

struct SpectrumFlag {
  cplx c;
  double sigma = 0.0;
};

struct SpectrumReport {
  int k = 1;
  int n = 0;
  std::vector<double> c_re, c_im;
  RMatrix sigma_min;  // (im) x (re); sup-norm 1/||(I-S)^{-1}||
  // real axis outside [b(0), b(1)], where neutral modes can sit
  std::vector<double> axis_re, axis_sigma;
  double delta_hat = 0.0;
  std::vector<double> delta_by_eps;  // min over y0 per eps level
  std::vector<double> eps;
  std::vector<SpectrumFlag> flags;
};

// sup-norm smallest singular value surrogate of I - S_c.
double sigma_min_at(const ShearProfile& prof, int k, cplx c, int n, int q = 8, double h_floor = 1e-6);

SpectrumReport scan(const ShearProfile& prof, int k, const CRect& rect, const ScanConfig& cfg = {});
// delta_hat alone (real-axis approach c = b(y0) +- i eps); fills delta_hat,
// delta_by_eps and eps.
void measure_delta(const ShearProfile& prof, int k, const ScanConfig& cfg, SpectrumReport& rep);

struct Certificate {
  int k = 1;
  double delta_hat = 0.0;
  double delta_spread = 0.0;  // relative difference between the two resolutions
};

// Throws Rejected unless both reports are flag-free and delta_hat agrees
// within 20%.
Certificate certify(const SpectrumReport& lo, const SpectrumReport& hi);

std::string to_json(const SpectrumReport& rep);

}  // namespace idamp
