#include "idamp/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "idamp/parallel.hpp"
#include "json.hpp"

namespace idamp {

namespace {

// Nystrom extension x(y) = r(y) - T(b'' x)(y) of a nodal solution of (I - S) x = r.
CVector extend(const ResolventOperator& op, const CMatrix& Trows, const CVector& x, const CVector& r_at) {
  if (op.profile().shear_free()) return r_at;
  return r_at - Trows * op.d2b_nodes().cast<cplx>().cwiseProduct(x);
}

struct Psi2 {
  cplx plus, minus_conj;  // psi^+(y, y0), psi^-(y, y0) via conjugation
};

// psi^+ and psi^- at targets ys for data w on op's grid (iota = +1 operator)
void psi_pm(const ResolventOperator& op, const CVector& w, const CMatrix& Tr, CVector& plus, CVector& minus) {
  const CVector d2b = op.d2b_nodes().cast<cplx>();
  CVector fp = w, fm = w.conjugate();
  if (!op.profile().shear_free()) {
    fp = w - d2b.cwiseProduct(op.solve(op.apply_T(w)));
    fm = fm - d2b.cwiseProduct(op.solve(op.apply_T(fm)));
  }
  plus = Tr * fp;
  minus = (Tr * fm).conjugate();
}

// d psi / d y0 at targets ys for data w (iota = +1 operator, eps > 0)
CVector dy0_at(const ResolventOperator& op, const ShearProfile& prof, double y0, const CVector& w,
               const std::vector<double>& ys, const CMatrix& Tr) {
  const double s = prof.db(y0);
  if (prof.shear_free()) return s * (op.F2_rows(ys) * w);
  const CVector d2b = op.d2b_nodes().cast<cplx>();
  CVector g = w - d2b.cwiseProduct(op.solve(op.apply_T(w)));
  CVector x = op.solve(s * (op.F2_rows(op.grid().nodes()) * g));
  return extend(op, Tr, x, s * (op.F2_rows(ys) * g));
}

// lim eps->0 of [d_y0 psi^- - d_y0 psi^+](y, y0) for y0 at a wall
CVector boundary_jump(const ShearProfile& prof, int k, double y0, const ModeFn& omega0,
                      const std::vector<double>& ys, const AsymptoticConfig& cfg, EpsReport& rep) {
  const int L = cfg.eps.levels;
  std::vector<CVector> fam(L);
  const bool free = prof.shear_free();
  parallel_for(L, [&](std::size_t j) {
    SpectralPoint pt{k, y0, cfg.eps.at(static_cast<int>(j)), +1};
    ChannelGrid g = resolvent_grid(prof, pt, cfg.nys_base, cfg.nys_order);
    ResolventOperator op(prof, k, LogWeight(prof, pt), g, !free, !free);
    CVector w = g.sample(omega0);
    CMatrix Tr = op.T_rows(ys);
    CVector dp = dy0_at(op, prof, y0, w, ys, Tr);
    CVector dm = dy0_at(op, prof, y0, CVector(w.conjugate()), ys, Tr).conjugate();
    fam[j] = dm - dp;
  });
  if (sup_norm(fam.back()) == 0.0) {
    rep.flag = "exact";
    return fam.back();
  }
  // convergence is of eps log eps type here, so the smallest-eps member is
  // the better witness; the report only records the behaviour
  try {
    rep = eps_limit(fam, cfg.eps.eps0).report;
  } catch (const Error&) {
    rep.flag = "no-convergence";
  }
  return fam.back();
}

// Phi^{0,+}(y, 0) (wall = 0) or Phi^{1,+}(y, 1) (wall = 1) at eps = 0
CVector boundary_Phi(const ShearProfile& prof, int k, int wall, const std::vector<double>& ys,
                     const AsymptoticConfig& cfg) {
  SpectralPoint pt{k, static_cast<double>(wall), 0.0, +1};
  ChannelGrid g = resolvent_grid(prof, pt, cfg.nys_base, cfg.nys_order, cfg.h_min);
  const bool free = prof.shear_free();
  ResolventOperator op(prof, k, LogWeight(prof, pt), g, !free, !free);
  GreensKernel green(k);
  const double bw = prof.db(static_cast<double>(wall));
  auto rfun = [&](double y) { return wall == 0 ? green.dz_at0(y) / (bw * bw) : -green.dz_at1(y) / (bw * bw); };
  CVector r_at(ys.size());
  for (size_t i = 0; i < ys.size(); ++i) r_at[i] = rfun(ys[i]);
  if (free) return r_at;
  CVector x = op.solve(g.sample(rfun));
  return extend(op, op.T_rows(ys), x, r_at);
}

}  // namespace

AsymptoticProfile compute_phis(const ShearProfile& prof, int k, const ModeFn& omega0, const std::vector<double>& y,
                               const AsymptoticConfig& cfg) {
  if (k == 0) fail(ErrorCode::InvalidArgument, "asymptotics need k != 0");
  if (prof.sign_aleph() < 0) fail(ErrorCode::InvalidArgument, "asymptotic main terms are set up for increasing b");
  AsymptoticProfile ap;
  ap.k = k;
  ap.y = y;
  const int ny = static_cast<int>(y.size());
  ap.b.resize(ny);
  ap.db.resize(ny);
  ap.d2b.resize(ny);
  ap.omega0.resize(ny);
  for (int i = 0; i < ny; ++i) {
    ap.b[i] = prof.b(y[i]);
    ap.db[i] = prof.db(y[i]);
    ap.d2b[i] = prof.d2b(y[i]);
    ap.omega0[i] = omega0(y[i]);
  }
  ap.omega0_at0 = omega0(0.0);
  ap.omega0_at1 = omega0(1.0);
  ap.b0 = prof.b(0.0);
  ap.b1 = prof.b(1.0);
  ap.db0 = prof.db(0.0);
  ap.db1 = prof.db(1.0);

  // diagonal y0 = y at eps = 0: phi1 = psi^+(y,y), phi2 = psi^-(y,y) - psi^+(y,y)
  ap.phi1 = CVector::Zero(ny);
  ap.phi2 = CVector::Zero(ny);
  ap.phi2_conj = CVector::Zero(ny);
  const bool free = prof.shear_free();
  parallel_for(ny, [&](std::size_t i) {
    const double yi = y[i];
    if (yi <= 0.0 || yi >= 1.0) return;
    SpectralPoint pp{k, yi, 0.0, +1}, pm{k, yi, 0.0, -1};
    ChannelGrid g = ChannelGrid::graded(cfg.nys_base, cfg.nys_order, {yi}, cfg.h_min);
    CVector w = g.sample(omega0);
    ResolventOperator opp(prof, k, LogWeight(prof, pp), g, !free, !free);
    CMatrix Tr = opp.T_rows({yi});
    CVector plus, minus_c;
    psi_pm(opp, w, Tr, plus, minus_c);
    // independent path: the iota = -1 operator applied to the data itself
    ResolventOperator opm(prof, k, LogWeight(prof, pm), g, !free, !free);
    CVector f = w;
    if (!free) f = w - opm.d2b_nodes().cast<cplx>().cwiseProduct(opm.solve(opm.apply_T(w)));
    cplx minus = (opm.T_rows({yi}) * f)[0];
    ap.phi1[i] = plus[0];
    ap.phi2[i] = minus - plus[0];
    ap.phi2_conj[i] = minus_c[0] - plus[0];
  });
  {
    double s = sup_norm(ap.phi2);
    ap.phi2_path_diff = s > 0 ? sup_norm(CVector(ap.phi2 - ap.phi2_conj)) / s : sup_norm(ap.phi2_conj);
  }

  // eps-schedule cross-check of phi1 at a few interior points
  for (int c = 0; c < cfg.phi1_checks; ++c) {
    const double target = (c + 1.0) / (cfg.phi1_checks + 1.0);
    int best = -1;
    for (int i = 0; i < ny; ++i)
      if (y[i] > 0.0 && y[i] < 1.0 && (best < 0 || std::abs(y[i] - target) < std::abs(y[best] - target))) best = i;
    if (best < 0) break;
    const int L = cfg.eps.levels;
    std::vector<CVector> fam(L);
    parallel_for(L, [&](std::size_t j) {
      SpectralPoint pt{k, y[best], cfg.eps.at(static_cast<int>(j)), +1};
      ChannelGrid g = resolvent_grid(prof, pt, cfg.nys_base, cfg.nys_order);
      ResolventOperator op(prof, k, LogWeight(prof, pt), g, !free, !free);
      CVector plus, minus;
      psi_pm(op, g.sample(omega0), op.T_rows({y[best]}), plus, minus);
      fam[j] = plus;
    });
    EpsCheck chk;
    chk.y0 = y[best];
    CVector lim;
    try {
      EpsLimit el = eps_limit(fam, cfg.eps.eps0);
      chk.report = el.report;
      lim = el.value;
    } catch (const Error&) {
      chk.report.flag = "no-convergence";
      lim = fam.back();
    }
    const double sc = std::max(std::abs(ap.phi1[best]), 1e-300);
    chk.deviation = std::abs(lim[0] - ap.phi1[best]) / sc;
    ap.phi1_checks.push_back(chk);
  }

  ap.phi5 = boundary_Phi(prof, k, 0, y, cfg);
  ap.phi6 = boundary_Phi(prof, k, 1, y, cfg);
  // At eps = 0 the + and - operators coincide for y0 at a wall (a constant
  // branch shift of L does not change T), so the jump of d_y0 psi comes only
  // from the wall term of F2: phi3 = i pi b'(0) omega0(0) Phi^0,
  // phi4 = -i pi b'(1) omega0(1) Phi^1.
  ap.phi3 = cplx(0, kPi) * ap.db0 * ap.omega0_at0 * ap.phi5;
  ap.phi4 = cplx(0, -kPi) * ap.db1 * ap.omega0_at1 * ap.phi6;
  {
    CVector s3 = boundary_jump(prof, k, 0.0, omega0, y, cfg, ap.phi3_report);
    CVector s4 = boundary_jump(prof, k, 1.0, omega0, y, cfg, ap.phi4_report);
    // measured away from the eps-wide boundary layer at the walls
    double d3 = 0.0, d4 = 0.0, sc = 1e-300;
    for (int i = 0; i < ny; ++i) {
      if (y[i] < 0.1 || y[i] > 0.9) continue;
      d3 = std::max(d3, std::abs(s3[i] - ap.phi3[i]));
      d4 = std::max(d4, std::abs(s4[i] - ap.phi4[i]));
      sc = std::max({sc, std::abs(ap.phi3[i]), std::abs(ap.phi4[i])});
    }
    ap.phi3_schedule_dev = d3 / sc;
    ap.phi4_schedule_dev = d4 / sc;
  }
  return ap;
}

namespace {

CVector diagonal_value(const AsymptoticProfile& ap, SwitchForm form) {
  if (form == SwitchForm::Corrected) return ap.k > 0 ? CVector(ap.phi1 + ap.phi2) : ap.phi1;
  return ap.k < 0 ? CVector(ap.phi1 - ap.phi2) : ap.phi1;
}

// b'' A - omega0
CVector interior_amp(const AsymptoticProfile& ap, SwitchForm form) {
  CVector A = diagonal_value(ap, form);
  return ap.d2b.cast<cplx>().cwiseProduct(A) - ap.omega0;
}

CVector wall_amp(const AsymptoticProfile& ap, int wall) {
  const cplx tpi(0, 2.0 * kPi);
  if (wall == 0) return ap.phi3 / (tpi * std::abs(ap.db0)) + 0.5 * ap.omega0_at0 * ap.phi5;
  return -ap.phi4 / (tpi * std::abs(ap.db1)) + 0.5 * ap.omega0_at1 * ap.phi6;
}

}  // namespace

CVector main_term_psi(const AsymptoticProfile& ap, double t, const MainTermOptions& opt) {
  const double k = ap.k, kt2 = k * k * t * t;
  CVector amp = interior_amp(ap, opt.form);
  CVector out(ap.y.size());
  for (size_t i = 0; i < ap.y.size(); ++i)
    out[i] = std::exp(cplx(0, -k * ap.b[i] * t)) * amp[i] / (ap.db[i] * ap.db[i] * kt2);
  if (opt.boundary_lines) {
    out += std::exp(cplx(0, -k * ap.b0 * t)) / kt2 * wall_amp(ap, 0);
    out += std::exp(cplx(0, -k * ap.b1 * t)) / kt2 * wall_amp(ap, 1);
  }
  return out;
}

CVector main_term_dy_psi(const AsymptoticProfile& ap, double t, const MainTermOptions& opt) {
  const double k = ap.k;
  CVector amp = interior_amp(ap, opt.form);
  CVector out(ap.y.size());
  for (size_t i = 0; i < ap.y.size(); ++i)
    out[i] = cplx(0, -1) * std::exp(cplx(0, -k * ap.b[i] * t)) * amp[i] / (ap.db[i] * k * t);
  return out;
}

cplx expint_e1(cplx z) {
  if (z == 0.0) fail(ErrorCode::InvalidArgument, "E1 is singular at 0");
  if (z.real() < 0.0 && std::abs(z.imag()) < 1e-300) fail(ErrorCode::InvalidArgument, "E1 on the branch cut");
  if (std::abs(z) <= 1.5) {
    // -gamma - log z - sum (-z)^n / (n n!)
    cplx sum = 0.0, term = 1.0;
    for (int n = 1; n < 200; ++n) {
      term *= -z / static_cast<double>(n);
      cplx add = term / static_cast<double>(n);
      sum += add;
      if (std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    return -0.57721566490153286061 - std::log(z) - sum;
  }
  // continued fraction, modified Lentz
  const double tiny = 1e-300;
  cplx b = z + 1.0, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    cplx del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-z);
}

namespace {

// int_T^inf e^{i W t} / t^2 dt = E2(-i W T) / T
cplx tail_integral(double W, double T) {
  if (std::abs(W * T) < 1e-14) return 1.0 / T;
  const cplx z(0, -W * T);
  return (std::exp(-z) - z * expint_e1(z)) / T;
}

}  // namespace

ScatterEntry scattering_profile(const ModeTrajectory& tr, const AsymptoticProfile& ap) {
  const int nt = static_cast<int>(tr.times.size());
  if (nt < 2 || tr.times.front() != 0.0) fail(ErrorCode::InvalidArgument, "trajectory must start at t = 0");
  if (tr.times.back() < 100.0) fail(ErrorCode::InvalidArgument, "trajectory must reach t >= 100");
  if (tr.y.size() != ap.y.size()) fail(ErrorCode::InvalidArgument, "trajectory and asymptotic grids differ");
  const int ny = static_cast<int>(tr.y.size());
  const double k = tr.k;
  ScatterEntry se;
  se.k = tr.k;
  se.y = tr.y;
  se.t_max = tr.times.back();
  se.integral = CVector::Zero(ny);
  auto integrand = [&](int it, int j) {
    return cplx(0, k * ap.d2b[j]) * std::exp(cplx(0, k * ap.b[j] * tr.times[it])) * tr.psi(it, j);
  };
  for (int it = 0; it + 1 < nt; ++it) {
    const double h = tr.times[it + 1] - tr.times[it];
    for (int j = 0; j < ny; ++j) se.integral[j] += 0.5 * h * (integrand(it, j) + integrand(it + 1, j));
  }
  // tail: ik b'' e^{ikbt} times the main term, integrated exactly in t
  const double T = se.t_max;
  CVector amp = interior_amp(ap, SwitchForm::Corrected);
  CVector w0 = wall_amp(ap, 0), w1 = wall_amp(ap, 1);
  se.tail.resize(ny);
  for (int j = 0; j < ny; ++j) {
    const cplx pre(0, k * ap.d2b[j]);
    cplx v = pre * amp[j] / (ap.db[j] * ap.db[j] * k * k) / T;
    v += pre * w0[j] / (k * k) * tail_integral(k * (ap.b[j] - ap.b0), T);
    v += pre * w1[j] / (k * k) * tail_integral(k * (ap.b[j] - ap.b1), T);
    se.tail[j] = v;
  }
  se.tail_estimate = sup_norm(se.tail);
  se.F = ap.omega0 + se.integral + se.tail;
  const double acc = sup_norm(se.integral);
  if (se.tail_estimate > 0.1 * acc && se.tail_estimate > 1e-14)
    fail(ErrorCode::TailTooLarge, "scattering tail exceeds 10% of the integral; extend t_max");
  return se;
}

CMatrix assemble_Psi(const std::vector<AsymptoticProfile>& aps, const std::vector<double>& xs) {
  if (aps.empty()) fail(ErrorCode::InvalidArgument, "no modes");
  const int ny = static_cast<int>(aps.front().y.size());
  CMatrix P = CMatrix::Zero(static_cast<Eigen::Index>(xs.size()), ny);
  for (const auto& ap : aps) {
    if (static_cast<int>(ap.y.size()) != ny) fail(ErrorCode::InvalidArgument, "modes on different grids");
    CVector amp = interior_amp(ap, SwitchForm::Corrected);
    const double k2 = static_cast<double>(ap.k) * ap.k;
    for (size_t ix = 0; ix < xs.size(); ++ix) {
      const cplx ph = std::exp(cplx(0, ap.k * xs[ix])) / k2;
      for (int j = 0; j < ny; ++j)
        P(ix, j) += FourierConvention::c0 / (ap.db[j] * ap.db[j]) * ph * amp[j];
    }
  }
  return P;
}

DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& values, double t_lo, double t_hi,
                   const std::string& quantity, bool require_fit) {
  if (times.size() != values.size()) fail(ErrorCode::InvalidArgument, "size mismatch");
  std::vector<double> X, Y;
  for (size_t i = 0; i < times.size(); ++i)
    if (times[i] >= t_lo && times[i] <= t_hi && times[i] > 0.0 && values[i] > 0.0) {
      X.push_back(std::log(times[i]));
      Y.push_back(std::log(values[i]));
    }
  if (X.size() < 10) fail(ErrorCode::InvalidArgument, "need at least 10 samples in the fit window");
  const double n = static_cast<double>(X.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < X.size(); ++i) {
    sx += X[i];
    sy += Y[i];
    sxx += X[i] * X[i];
    sxy += X[i] * Y[i];
    syy += Y[i] * Y[i];
  }
  DecayFit f;
  f.quantity = quantity;
  f.t_lo = t_lo;
  f.t_hi = t_hi;
  f.samples = static_cast<int>(X.size());
  const double vx = sxx - sx * sx / n, vy = syy - sy * sy / n, cxy = sxy - sx * sy / n;
  f.slope = cxy / vx;
  f.intercept = (sy - f.slope * sx) / n;
  f.r2 = vy > 0 ? cxy * cxy / (vx * vy) : 1.0;
  if (require_fit && f.r2 < 0.95) fail(ErrorCode::PoorFit, quantity + ": r2 = " + std::to_string(f.r2));
  return f;
}

DecayFit fit_decay(const ModeTrajectory& tr, DecayQuantity q, double t_lo, double t_hi, bool require_fit) {
  std::vector<double> v(tr.times.size());
  const CMatrix& M = q == DecayQuantity::SupPsi ? tr.psi : tr.dpsi;
  for (size_t i = 0; i < tr.times.size(); ++i) v[i] = M.row(static_cast<Eigen::Index>(i)).cwiseAbs().maxCoeff();
  return fit_decay(tr.times, v, t_lo, t_hi, q == DecayQuantity::SupPsi ? "sup|psi_k|" : "sup|dy psi_k|",
                   require_fit);
}

double hk3_norm(int k, const ModeFn& omega0) {
  ChannelGrid g = ChannelGrid::uniform(32, 12);
  CVector d = g.sample(omega0);
  double total = 0.0;
  const double ak = std::abs(static_cast<double>(k));
  for (int a = 0; a <= 3; ++a) {
    if (a > 0) d = g.differentiate(d, 1);
    double l2 = std::sqrt(std::abs(g.integrate(CVector(d.cwiseAbs2().cast<cplx>()))));
    total += std::pow(ak, 3 - a) * l2;
  }
  return total;
}

std::string to_json(const AsymptoticProfile& ap, const std::vector<DecayFit>& fits) {
  nlohmann::ordered_json j;
  j["k"] = ap.k;
  auto fj = nlohmann::ordered_json::array();
  for (const auto& f : fits)
    fj.push_back({{"quantity", f.quantity}, {"t_lo", f.t_lo}, {"t_hi", f.t_hi}, {"slope", f.slope},
                  {"r2", f.r2}, {"samples", f.samples}});
  j["slopes"] = fj;
  auto rr = nlohmann::ordered_json::array();
  for (auto& [t, r] : ap.residual_norms) rr.push_back({{"t", t}, {"ratio", r}});
  j["residual_ratios_by_t"] = rr;
  j["phi_norms"] = {{"phi1", sup_norm(ap.phi1)}, {"phi2", sup_norm(ap.phi2)}, {"phi3", sup_norm(ap.phi3)},
                    {"phi4", sup_norm(ap.phi4)}, {"phi5", sup_norm(ap.phi5)}, {"phi6", sup_norm(ap.phi6)}};
  j["phi2_path_diff"] = ap.phi2_path_diff;
  j["phi3_schedule_dev"] = ap.phi3_schedule_dev;
  j["phi4_schedule_dev"] = ap.phi4_schedule_dev;
  return j.dump(1);
}

}  // namespace idamp
