#include "idamp/direct.hpp"

#include <algorithm>
#include <cmath>

namespace idamp {

DirectProblem::DirectProblem(const ShearProfile& prof, int k, const DirectConfig& cfg)
    : prof_(prof), k_(k), grid_(ChannelGrid::uniform(cfg.panels, cfg.q)), es_(grid_, k) {
  if (k == 0) fail(ErrorCode::InvalidArgument, "direct solver needs k != 0");
  const int n = grid_.size();
  b_.resize(n);
  d2b_.resize(n);
  double m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    b_[i] = prof_.b(grid_.node(i));
    d2b_[i] = prof_.d2b(grid_.node(i));
    m2 = std::max(m2, std::abs(d2b_[i]));
  }
  dt_max_ = 0.01;
  if (m2 > 0.0) dt_max_ = std::min(dt_max_, 0.2 / (std::abs(k) * m2 * GreensKernel(k).op_norm()));
}

CVector DirectProblem::omega(double t, const CVector& f) const {
  CVector w(f.size());
  for (int i = 0; i < f.size(); ++i) w[i] = std::exp(cplx(0, -k_ * b_[i] * t)) * f[i];
  return w;
}

CVector DirectProblem::rhs(double t, const CVector& f) const {
  CVector psi = es_.solve(omega(t, f)).psi;
  CVector r(f.size());
  for (int i = 0; i < f.size(); ++i) r[i] = cplx(0, k_ * d2b_[i]) * std::exp(cplx(0, k_ * b_[i] * t)) * psi[i];
  return r;
}

DirectState direct_initial(const DirectProblem& pb, const ModeFn& omega0, double dt) {
  DirectState s;
  s.k = pb.k();
  s.t = 0.0;
  s.f = pb.grid().sample(omega0);
  s.dt = dt;
  return s;
}

DirectState step(const DirectProblem& pb, const DirectState& s) {
  if (std::abs(s.dt) > pb.dt_max() * (1.0 + 1e-12)) fail(ErrorCode::StepTooLarge, "dt exceeds dt_max");
  DirectState o = s;
  if (pb.profile().shear_free()) {
    o.t = s.t + s.dt;
    return o;
  }
  const double h = s.dt, t = s.t;
  CVector k1 = pb.rhs(t, s.f);
  CVector k2 = pb.rhs(t + 0.5 * h, s.f + 0.5 * h * k1);
  CVector k3 = pb.rhs(t + 0.5 * h, s.f + 0.5 * h * k2);
  CVector k4 = pb.rhs(t + h, s.f + h * k3);
  o.f = s.f + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  o.t = t + h;
  return o;
}

ModeTrajectory evolve_direct(const ShearProfile& prof, int k, const ModeFn& omega0,
                             const std::vector<double>& t_samples, const std::vector<double>& ys,
                             const DirectConfig& cfg) {
  if (t_samples.empty()) fail(ErrorCode::InvalidArgument, "no sample times");
  if (t_samples.front() < 0.0) fail(ErrorCode::InvalidArgument, "sample times must be >= 0");
  for (size_t i = 1; i < t_samples.size(); ++i)
    if (!(t_samples[i] > t_samples[i - 1])) fail(ErrorCode::InvalidArgument, "sample times must increase");

  DirectProblem pb(prof, k, cfg);
  const double dt = std::min(std::abs(cfg.dt), pb.dt_max());
  DirectState s = direct_initial(pb, omega0, dt);

  ModeTrajectory tr;
  tr.k = k;
  tr.times = t_samples;
  tr.y = ys;
  tr.source = TrajectorySource::Direct;
  const int nt = static_cast<int>(t_samples.size()), ny = static_cast<int>(ys.size());
  tr.psi.resize(nt, ny);
  tr.dpsi.resize(nt, ny);
  tr.omega.resize(nt, ny);
  const ChannelGrid& g = pb.grid();
  for (int i = 0; i < nt; ++i) {
    const double T = t_samples[i];
    // uniform steps, the last one landing on T
    const double span = T - s.t;
    if (span > 0.0) {
      const long nsteps = static_cast<long>(std::ceil(span / dt - 1e-9));
      const double h = span / nsteps;
      for (long j = 0; j < nsteps; ++j) {
        s.dt = h;
        s = step(pb, s);
      }
      s.t = T;
    }
    CVector w = pb.omega(T, s.f);
    auto r = pb.elliptic().solve_at(w, ys);
    tr.psi.row(i) = r.psi.transpose();
    tr.dpsi.row(i) = r.dpsi.transpose();
    CVector fi = g.interpolate(s.f, ys);
    for (int j = 0; j < ny; ++j) tr.omega(i, j) = std::exp(cplx(0, -k * prof.b(ys[j]) * T)) * fi[j];
  }
  return tr;
}

}  // namespace idamp
