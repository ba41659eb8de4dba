#include "idamp/logint.hpp"

#include <algorithm>
#include <cmath>

namespace idamp {

CMatrix log_integral_rows(const ChannelGrid& grid, const GreensKernel& green, const std::vector<double>& targets,
                          int dmax, const CoefFn& coef, const WeightFn& weight, int sub_q,
                          const LogSplit* split) {
  const int n = grid.size(), q = grid.q(), M = grid.panels();
  const GaussRule& r = grid.rule();
  const GaussRule& sub = *gauss_rule(sub_q);

  std::vector<GreensKernel::Point> zp(n);
  std::vector<KernelCoef> cz(n);
  std::vector<cplx> ww(n);
  for (int i = 0; i < n; ++i) {
    double z = grid.node(i);
    zp[i] = green.point(z);
    coef(z, cz[i]);
    ww[i] = grid.weight(i) * weight(z);
  }

  CMatrix R = CMatrix::Zero(static_cast<Eigen::Index>(targets.size()), n);
  std::vector<cplx> cw[3];
  for (auto& v : cw) v.resize(q);
  std::vector<double> l(q), ld(q), ld2(q);

  for (size_t t = 0; t < targets.size(); ++t) {
    const double y = targets[t];
    const GreensKernel::Point yp = green.point(y);
    int ps = -1;
    {
      int p = grid.locate(y);
      double tol = 1e-13 * grid.h(p);
      if (y > grid.a(p) + tol && y < grid.b(p) - tol) ps = p;
    }
    // panels touching the log center
    int pc0 = -1, pc1 = -1;
    if (split) {
      int p = grid.locate(split->center);
      double tol = 1e-13 * grid.h(p);
      if (std::abs(split->center - grid.a(p)) <= tol) {
        pc0 = p - 1;
        pc1 = p;
      } else if (std::abs(split->center - grid.b(p)) <= tol) {
        pc0 = p;
        pc1 = p + 1 < M ? p + 1 : -1;
      } else {
        pc0 = pc1 = p;
      }
    }
    auto special = [&](int p) { return p >= 0 && (p == ps || p == pc0 || p == pc1); };
    auto row = R.row(static_cast<Eigen::Index>(t));
    for (int p = 0; p < M; ++p) {
      if (special(p)) continue;
      const double s1 = 2.0 / grid.h(p), s2 = s1 * s1;
      for (int m = 0; m < q; ++m) {
        const int i = p * q + m;
        GreensKernel::Values v = green.eval_all(yp, zp[i]);
        const double part[4] = {v.G, v.Gy, v.Gz, v.Gp};
        for (int d = 0; d <= dmax; ++d) {
          const double* c = cz[i].c[d];
          double K = c[0] * part[0] + c[1] * part[1] + c[2] * part[2] + c[3] * part[3];
          cw[d][m] = ww[i] * K;
        }
      }
      for (int j = 0; j < q; ++j) {
        cplx acc = cw[0][j];
        if (dmax >= 1) {
          cplx a1 = 0.0;
          for (int m = 0; m < q; ++m) a1 += cw[1][m] * r.D(m, j);
          acc += s1 * a1;
        }
        if (dmax >= 2) {
          cplx a2 = 0.0;
          for (int m = 0; m < q; ++m) a2 += cw[2][m] * r.D2(m, j);
          acc += s2 * a2;
        }
        row[p * q + j] += acc;
      }
    }

    KernelCoef kc;
    // adds wz * K(y,z) * basis at reference point sig of panel p
    auto add_point = [&](int p, double sig, cplx wz) {
      const double a = grid.a(p), h = grid.h(p);
      const double s1 = 2.0 / h, s2 = s1 * s1;
      const double z = a + 0.5 * h * (sig + 1.0);
      GreensKernel::Values v = green.eval_all(yp, green.point(z));
      const double part[4] = {v.G, v.Gy, v.Gz, v.Gp};
      coef(z, kc);
      r.basis(sig, l.data());
      if (dmax >= 1)
        for (int j = 0; j < q; ++j) {
          double acc = 0.0;
          for (int mm = 0; mm < q; ++mm) acc += l[mm] * r.D(mm, j);
          ld[j] = acc * s1;
        }
      if (dmax >= 2)
        for (int j = 0; j < q; ++j) {
          double acc = 0.0;
          for (int mm = 0; mm < q; ++mm) acc += l[mm] * r.D2(mm, j);
          ld2[j] = acc * s2;
        }
      double K[3];
      for (int d = 0; d <= dmax; ++d)
        K[d] = kc.c[d][0] * part[0] + kc.c[d][1] * part[1] + kc.c[d][2] * part[2] + kc.c[d][3] * part[3];
      for (int j = 0; j < q; ++j) {
        double acc = K[0] * l[j];
        if (dmax >= 1) acc += K[1] * ld[j];
        if (dmax >= 2) acc += K[2] * ld2[j];
        row[p * q + j] += wz * acc;
      }
    };
    // piece [lo, hi] of panel p in reference coordinates; logend 0/1 marks
    // the log center at lo/hi
    auto piece = [&](int p, double lo, double hi, int logend) {
      const double h = grid.h(p);
      const double half = 0.5 * (hi - lo);
      const double H = 0.5 * h * (hi - lo);  // physical length
      if (H <= 0.0) return;
      for (int m = 0; m < sub_q; ++m) {
        const double sig = lo + half * (sub.x[m] + 1.0);
        const double z = grid.a(p) + 0.5 * h * (sig + 1.0);
        const double wq = 0.5 * h * half * sub.w[m];
        cplx wz = logend < 0 ? wq * weight(z) : wq * (std::log(H) + split->smooth(z));
        add_point(p, sig, wz);
      }
      if (logend < 0) return;
      const LogGaussRule& lr = *log_gauss_rule(split->log_q);
      for (size_t m = 0; m < lr.x.size(); ++m) {
        const double sig = logend == 0 ? lo + 2.0 * half * lr.x[m] : hi - 2.0 * half * lr.x[m];
        add_point(p, sig, cplx(-H * lr.w[m]));
      }
    };
    for (int p = 0; p < M; ++p) {
      if (!special(p)) continue;
      std::vector<double> cuts{-1.0, 1.0};
      if (p == ps) cuts.push_back(grid.to_ref(p, y));
      const bool has_c = split && (p == pc0 || p == pc1);
      double cref = 0.0;
      if (has_c) {
        cref = grid.to_ref(p, split->center);
        cref = std::clamp(cref, -1.0, 1.0);
        cuts.push_back(cref);
      }
      std::sort(cuts.begin(), cuts.end());
      for (size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double lo = cuts[c], hi = cuts[c + 1];
        if (hi - lo < 1e-15) continue;
        int logend = -1;
        if (has_c && std::abs(lo - cref) < 1e-13) logend = 0;
        if (has_c && std::abs(hi - cref) < 1e-13) logend = 1;
        piece(p, lo, hi, logend);
      }
    }
  }
  return R;
}

}  // namespace idamp
