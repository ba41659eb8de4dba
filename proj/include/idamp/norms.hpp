#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "idamp/common.hpp"
#include "idamp/grid.hpp"
#include "idamp/profiles.hpp"
#include "idamp/resolvent.hpp"

namespace idamp {

struct WeightedNormValue {
  std::string kind;  // "Y1m", "Z1m_upper"
  int m = 1;
  double value = 0.0;
  double sup_part = 0.0, deriv_part = 0.0;
  CVector g, h;  // witness (Z kinds)
};

// Weight (L - 1/theta)^{1+m} at the grid nodes, L = log(b - b(y0) + i eps).
CVector y_weight(const ShearProfile& prof, const SpectralPoint& pt, const ChannelGrid& grid, int m);

// ||f||_inf + ||f' / (|k| (L - 1/theta)^{1+m})||_inf, f' by panel differentiation
WeightedNormValue y_norm(const ShearProfile& prof, const SpectralPoint& pt, const ChannelGrid& grid, const CVector& f,
                         int m);
// same with a supplied derivative
WeightedNormValue y_norm(const ShearProfile& prof, const SpectralPoint& pt, const ChannelGrid& grid, const CVector& f,
                         const CVector& fprime, int m);

// ||f||_inf + |k|^{-1} (||g||_{Y^{1,m}} + ||h||_{Y^{1,m+1}}) at the witness
// f' = g L + h. Throws WitnessMismatch if the witness misses f' by > 1e-8.
WeightedNormValue z_norm_upper(const ShearProfile& prof, const SpectralPoint& pt, const ChannelGrid& grid,
                               const CVector& f, const CVector& fprime, const CVector& g, const CVector& h, int m);

enum class LemmaTag { bX1, X11, bX17, bX17Corollary };
std::string lemma_name(LemmaTag t);

struct LemmaSweepConfig {
  std::vector<int> ks;  // default 1..32
  std::vector<double> y0s{0.0, 0.3, 0.71, 1.0};
  EpsSchedule eps{1.0 / 16.0, 4};
  int samples = 50;
  int m = 1;
  std::uint64_t seed = 20240601;
  int base_panels = 16;
  int q = 8;
};

struct LemmaReport {
  LemmaTag tag = LemmaTag::bX1;
  double max_ratio = 0.0;
  std::map<int, double> max_by_k;
  std::vector<double> eps;
  std::vector<double> max_by_eps;  // per eps level, max over k, y0, samples
  bool finite = true;
  bool monotone_blowup = false;  // strictly increasing over the schedule with last/first > 1.5
};

// Empirical ratio of each lemma's left side to its right-side scaling over
// random smooth inputs.
std::vector<LemmaReport> lemma_sweep(const ShearProfile& prof, const std::vector<LemmaTag>& tags,
                                     const LemmaSweepConfig& cfg = {});

std::string to_json(const std::vector<LemmaReport>& reps);

}  // namespace idamp
