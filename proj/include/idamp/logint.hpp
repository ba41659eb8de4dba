#pragma once

#include <functional>
#include <vector>

#include "idamp/common.hpp"
#include "idamp/greens.hpp"
#include "idamp/grid.hpp"

namespace idamp {

// Kernel of the form sum_d sum_part c[d][part](z) * Part(y,z) acting on the
// d-th derivative of a nodal function, where Part is one of
// G, dG/dy, dG/dz, G' (index 0..3).
struct KernelCoef {
  double c[3][4] = {};
};
using CoefFn = std::function<void(double z, KernelCoef&)>;
using WeightFn = std::function<cplx(double z)>;

enum GreenPart { kG = 0, kGy = 1, kGz = 2, kGp = 3 };

// W(z) = log|z - center| + smooth(z). Pieces of panels ending at the center
// get product integration with a Gauss rule for the log weight.
struct LogSplit {
  double center = 0.0;
  WeightFn smooth;
  int log_q = 16;
};

// Rows R with (R v)_t = int_0^1 K(y_t, z) v^{(d)}(z) W(z) dz, v the panel
// interpolant of nodal values. Panels containing a target in their interior
// are split there and integrated with sub-Gauss rules; W may be
// log-singular at a breakpoint.
CMatrix log_integral_rows(const ChannelGrid& grid, const GreensKernel& green, const std::vector<double>& targets,
                          int dmax, const CoefFn& coef, const WeightFn& weight, int sub_q = 24,
                          const LogSplit* split = nullptr);

}  // namespace idamp
