#include "idamp/spectral.hpp"

#include <algorithm>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <sstream>

#include "idamp/greens.hpp"
#include "idamp/parallel.hpp"

namespace idamp {

std::vector<double> density_y0_breakpoints(const std::vector<double>& ys, int diag_levels, int edge_levels) {
  std::vector<double> pts{0.0, 1.0};
  for (double y : ys)
    if (y > 0.0 && y < 1.0) pts.push_back(y);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(), [](double a, double b) { return b - a < 1e-14; }), pts.end());
  std::vector<double> bp = pts;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i], b = pts[i + 1], h = b - a;
    const int la = (a == 0.0) ? edge_levels : diag_levels;
    const int lb = (b == 1.0) ? edge_levels : diag_levels;
    for (int j = 1; j <= la; ++j) bp.push_back(a + h * std::ldexp(1.0, -j));
    for (int j = 1; j <= lb; ++j) bp.push_back(b - h * std::ldexp(1.0, -j));
  }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end(), [](double a, double b) { return b - a < 1e-15; }), bp.end());
  return bp;
}

namespace {

struct NodeResult {
  std::vector<CVector> D, Dy;  // per data set, over output points
};

// psi^- - psi^+ and its y-derivative at the output points for one operator.
// psi^- is obtained from the + operator by conjugation (real profile).
NodeResult jump_at(const ResolventOperator& op, const std::vector<CVector>& data, const CMatrix& Tr,
                   const CMatrix* Dr) {
  NodeResult r;
  const bool free = op.profile().shear_free();
  const CVector d2b = op.d2b_nodes().cast<cplx>();
  for (const auto& w : data) {
    CVector fp = w, fm = w.conjugate();
    if (!free) {
      CVector pp = op.solve(op.apply_T(w));
      CVector pm = op.solve(op.apply_T(fm));  // conj(psi^-)
      fp = w - d2b.cwiseProduct(pp);
      fm = fm - d2b.cwiseProduct(pm);
    }
    r.D.push_back(CVector((Tr * fm).conjugate() - Tr * fp));
    if (Dr) r.Dy.push_back(CVector(((*Dr) * fm).conjugate() - (*Dr) * fp));
  }
  return r;
}

}  // namespace

std::vector<SpectralDensity> build_densities(const ShearProfile& prof, int k, const std::vector<ModeFn>& data,
                                             const DensityConfig& cfg) {
  if (k == 0) fail(ErrorCode::InvalidArgument, "density requires k != 0");
  if (data.empty()) fail(ErrorCode::InvalidArgument, "no data");
  if (cfg.out_panels < 1 || cfg.out_order < 2 || cfg.y0_order < 2)
    fail(ErrorCode::InvalidArgument, "bad density grid");

  SpectralDensity base;
  base.k = k;
  base.ygrid = ChannelGrid::uniform(cfg.out_panels, cfg.out_order);
  base.y0_order = cfg.y0_order;
  base.y0_bp = density_y0_breakpoints(base.ygrid.nodes(), cfg.diag_levels, cfg.edge_levels);
  {
    ChannelGrid g0 = ChannelGrid::from_breakpoints(base.y0_bp, cfg.y0_order);
    base.y0_nodes = g0.nodes();
    base.y0_weights = g0.weights();
  }
  const int m = static_cast<int>(base.y0_nodes.size());
  const int ny = base.ygrid.size();
  for (double y0 : base.y0_nodes) {
    base.jac.push_back(std::abs(prof.db(y0)));
    base.b_y0.push_back(prof.b(y0));
    base.db_y0.push_back(prof.db(y0));
  }
  const std::vector<double>& ys = base.ygrid.nodes();
  const bool free = prof.shear_free();

  std::vector<NodeResult> res(m);
  parallel_for(m, [&](std::size_t i) {
    SpectralPoint pt{k, base.y0_nodes[i], 0.0, +1};
    ChannelGrid g = ChannelGrid::graded(cfg.nys_base, cfg.nys_order, {pt.y0}, cfg.h_min);
    ResolventOperator op(prof, k, LogWeight(prof, pt), g, !free, !free);
    std::vector<CVector> w;
    for (const auto& f : data) w.push_back(g.sample(f));
    CMatrix Tr = op.T_rows(ys), Dr = op.dyT_rows(ys);
    res[i] = jump_at(op, w, Tr, &Dr);
  });

  std::vector<SpectralDensity> out(data.size(), base);
  for (std::size_t s = 0; s < data.size(); ++s) {
    out[s].D.resize(m, ny);
    out[s].Dy.resize(m, ny);
    for (int i = 0; i < m; ++i) {
      out[s].D.row(i) = res[i].D[s].transpose();
      out[s].Dy.row(i) = res[i].Dy[s].transpose();
    }
  }

  // Cross-check a few nodes against the eps schedule.
  if (cfg.eps_checks > 0 && cfg.eps.levels >= 4) {
    std::vector<int> picks;
    for (int c = 0; c < cfg.eps_checks; ++c) {
      double target = (c + 1.0) / (cfg.eps_checks + 1.0);
      int best = 0;
      for (int i = 1; i < m; ++i)
        if (std::abs(base.y0_nodes[i] - target) < std::abs(base.y0_nodes[best] - target)) best = i;
      if (std::find(picks.begin(), picks.end(), best) == picks.end()) picks.push_back(best);
    }
    const int L = cfg.eps.levels;
    std::vector<std::vector<CVector>> fam(picks.size(), std::vector<CVector>(L));
    parallel_for(picks.size() * L, [&](std::size_t idx) {
      const int c = static_cast<int>(idx / L), j = static_cast<int>(idx % L);
      SpectralPoint pt{k, base.y0_nodes[picks[c]], cfg.eps.at(j), +1};
      ChannelGrid g = resolvent_grid(prof, pt, cfg.nys_base, cfg.nys_order);
      ResolventOperator op(prof, k, LogWeight(prof, pt), g, !free, !free);
      std::vector<CVector> w{g.sample(data[0])};
      fam[c][j] = jump_at(op, w, op.T_rows(ys), nullptr).D[0];
    });
    for (std::size_t c = 0; c < picks.size(); ++c) {
      EpsCheck chk;
      chk.y0 = base.y0_nodes[picks[c]];
      CVector d0 = out[0].D.row(picks[c]).transpose();
      CVector lim;
      try {
        EpsLimit el = eps_limit(fam[c], cfg.eps.eps0);
        chk.report = el.report;
        lim = el.value;
      } catch (const Error&) {
        chk.report.flag = "no-convergence";
        lim = fam[c].back();
      }
      const double sc = std::max(sup_norm(d0), 1e-300);
      chk.deviation = sup_norm(CVector(lim - d0)) / sc;
      for (auto& o : out) o.eps_report.push_back(chk);
    }
  }
  return out;
}

SpectralDensity build_density(const ShearProfile& prof, int k, const ModeFn& omega0, const DensityConfig& cfg) {
  return build_densities(prof, k, {omega0}, cfg).front();
}

namespace {

// Quadrature weights W_j so that int e^{-ikb(y0)t} |b'| D dy0 ~ sum_j W_j D_j.
// Gauss-Legendre on panels with a small phase span, Filon (Legendre moments
// of the linear phase) on the rest.
CVector time_weights(const SpectralDensity& d, double t) {
  const int q = d.y0_order;
  const int P = static_cast<int>(d.y0_bp.size()) - 1;
  const double kt = d.k * t;
  const auto& rule = *gauss_rule(q);
  CVector W(d.y0_nodes.size());
  std::vector<double> jn(q);
  for (int p = 0; p < P; ++p) {
    const double a = d.y0_bp[p], h = d.y0_bp[p + 1] - a;
    const int o = p * q;
    // slope of b on the panel from its nodes (endpoint-free estimate)
    double bmid = 0.0, slope = 0.0;
    {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (int j = 0; j < q; ++j) {
        sx += rule.x[j];
        sy += d.b_y0[o + j];
        sxx += rule.x[j] * rule.x[j];
        sxy += rule.x[j] * d.b_y0[o + j];
      }
      slope = (q * sxy - sx * sy) / (q * sxx - sx * sx);  // db/ds
      bmid = (sy - slope * sx) / q;
    }
    const double omega = kt * slope;  // phase rate in the reference variable
    if (std::abs(omega) < kPi || std::abs(kt) <= 50.0) {
      for (int j = 0; j < q; ++j)
        W[o + j] = d.y0_weights[o + j] * d.jac[o + j] * std::exp(cplx(0, -kt * d.b_y0[o + j]));
      continue;
    }
    const double aw = std::abs(omega);
    for (int n = 0; n < q; ++n) {
      double v = boost::math::sph_bessel(n, aw);
      jn[n] = (omega < 0 && (n % 2)) ? -v : v;
    }
    const cplx base = std::exp(cplx(0, -kt * bmid));
    for (int j = 0; j < q; ++j) {
      const double s = rule.x[j];
      cplx acc = 0.0;
      cplx mi = 1.0;
      for (int n = 0; n < q; ++n) {
        acc += (2.0 * n + 1.0) / 2.0 * boost::math::legendre_p(n, s) * 2.0 * mi * jn[n];
        mi *= cplx(0, -1);
      }
      const double resid = d.b_y0[o + j] - (bmid + slope * s);
      W[o + j] = base * acc * rule.w[j] * (h / 2.0) * d.jac[o + j] * std::exp(cplx(0, -kt * resid));
    }
  }
  return W;
}

CVector evolve_with(const SpectralDensity& d, const CMatrix& M, double t) {
  CVector W = time_weights(d, t);
  // psi = -(1/(2 pi i)) int e^{-ikb t} |b'| (psi^- - psi^+) dy0
  return (M.transpose() * W) * (-1.0 / cplx(0, 2.0 * kPi));
}

}  // namespace

CVector evolve_psi_k(const SpectralDensity& d, double t) { return evolve_with(d, d.D, t); }
CVector evolve_dy_psi_k(const SpectralDensity& d, double t) { return evolve_with(d, d.Dy, t); }

CVector recover_omega_k(const CVector& psi, int k, const ChannelGrid& grid) {
  return apply_laplacian(k, psi, grid);
}

ModeTrajectory spectral_trajectory(const SpectralDensity& d, const std::vector<double>& times) {
  ModeTrajectory tr;
  tr.k = d.k;
  tr.times = times;
  tr.y = d.y();
  const int nt = static_cast<int>(times.size()), ny = d.ygrid.size();
  tr.psi.resize(nt, ny);
  tr.dpsi.resize(nt, ny);
  tr.omega.resize(nt, ny);
  for (int i = 0; i < nt; ++i) {
    CVector p = evolve_psi_k(d, times[i]);
    tr.psi.row(i) = p.transpose();
    tr.dpsi.row(i) = evolve_dy_psi_k(d, times[i]).transpose();
    tr.omega.row(i) = recover_omega_k(p, d.k, d.ygrid).transpose();
  }
  tr.source = TrajectorySource::Spectral;
  return tr;
}

ModeTrajectory conjugate_trajectory(const ModeTrajectory& tr) {
  ModeTrajectory c = tr;
  c.k = -tr.k;
  c.psi = tr.psi.conjugate();
  c.dpsi = tr.dpsi.conjugate();
  c.omega = tr.omega.conjugate();
  return c;
}

std::string to_csv(const ModeTrajectory& tr) {
  std::ostringstream os;
  os.precision(17);
  os << "k,t,y,re_psi,im_psi,re_dpsi,im_dpsi,re_omega,im_omega\n";
  for (std::size_t i = 0; i < tr.times.size(); ++i)
    for (std::size_t j = 0; j < tr.y.size(); ++j) {
      const cplx p = tr.psi(i, j), dp = tr.dpsi(i, j), w = tr.omega(i, j);
      os << tr.k << ',' << tr.times[i] << ',' << tr.y[j] << ',' << p.real() << ',' << p.imag() << ','
         << dp.real() << ',' << dp.imag() << ',' << w.real() << ',' << w.imag() << '\n';
    }
  return os.str();
}

}  // namespace idamp
