#include "idamp/runner.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "idamp/asymptotics.hpp"
#include "idamp/direct.hpp"
#include "idamp/norms.hpp"
#include "idamp/spectrum.hpp"
#include "idamp/svg.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace idamp {

// ---------------------------------------------------------------- config

ModeFn InitialData::mode(int k) const {
  if (k == 0) fail(ErrorCode::InvalidArgument, "mode 0 is not evolved");
  cplx a = 1.0;
  auto it = amplitude.find(std::abs(k));
  if (it != amplitude.end()) a = it->second;
  if (k < 0) a = std::conj(a);
  std::function<double(double)> shape;
  if (kind == "sin_pi_y") {
    shape = [](double y) { return std::sin(kPi * y); };
  } else if (kind == "sin_pi_y_poly") {
    shape = [](double y) { return std::sin(kPi * y) * y * (1.0 - y); };
  } else if (kind == "affine_sine") {
    shape = [](double y) { return 1.0 + y + 0.5 * std::sin(3.0 * y); };
  } else if (kind == "polynomial") {
    auto c = values;
    shape = [c](double y) {
      double v = 0.0;
      for (size_t j = c.size(); j-- > 0;) v = v * y + c[j];
      return v;
    };
  } else if (kind == "tabulated") {
    const double h = 1.0 / static_cast<double>(values.size() - 1);
    auto sp = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(values.begin(),
                                                                                              values.end(), 0.0, h);
    shape = [sp](double y) { return (*sp)(std::clamp(y, 0.0, 1.0)); };
  } else {
    fail(ErrorCode::ConfigInvalid, "unknown omega0 kind " + kind);
  }
  return [shape, a](double y) { return a * shape(y); };
}

namespace {

[[noreturn]] void bad(const std::string& m) { fail(ErrorCode::ConfigInvalid, m); }

template <class T>
T get(const nlohmann::json& j, const char* key, T dflt) {
  if (!j.contains(key)) return dflt;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    bad(std::string("bad type for ") + key);
  }
}

std::vector<double> parse_times(const nlohmann::json& j) {
  std::vector<double> t;
  if (j.is_array()) {
    for (auto& v : j) {
      if (!v.is_number()) bad("t_samples entries must be numbers");
      t.push_back(v.get<double>());
    }
  } else if (j.is_object()) {
    double a = get<double>(j, "start", 0.0), b = get<double>(j, "stop", 0.0);
    int n = get<int>(j, "count", 0);
    if (n < 2 || !(b > a)) bad("t_samples range needs count >= 2 and stop > start");
    for (int i = 0; i < n; ++i) t.push_back(a + (b - a) * i / (n - 1));
  } else {
    bad("t_samples must be a list or {start, stop, count}");
  }
  if (t.empty()) bad("t_samples empty");
  if (t.front() < 0) bad("t_samples must be nonnegative");
  for (size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) bad("t_samples must be increasing");
  return t;
}

const std::set<std::string> kTasks{"scan", "evolve-spectral", "evolve-direct", "asymptotics", "norms"};

}  // namespace

RunConfig parse_config(const nlohmann::json& j) {
  static const std::set<std::string> keys{"spec_version", "profile",  "k_set",        "omega0",  "grid",
                                          "eps_schedule", "t_samples", "fit_window",  "x_resolution",
                                          "norms",        "seed",      "outputs",      "tasks",   "checks"};
  if (!j.is_object()) bad("config must be a JSON object");
  for (auto& [k, v] : j.items())
    if (!keys.count(k)) bad("unknown key " + k);
  if (!j.contains("spec_version") || !j["spec_version"].is_string() || j["spec_version"] != kSpecVersion)
    bad(std::string("spec_version must be \"") + kSpecVersion + "\"");
  RunConfig c;
  if (j.contains("profile")) c.profile = j["profile"];
  if (!j.contains("k_set") || !j["k_set"].is_array() || j["k_set"].empty()) bad("k_set must be a nonempty list");
  for (auto& v : j["k_set"]) {
    if (!v.is_number_integer()) bad("k_set entries must be integers");
    int k = v.get<int>();
    if (k == 0) bad("k_set contains 0");
    c.k_set.push_back(k);
  }
  if (j.contains("omega0")) {
    const auto& o = j["omega0"];
    if (!o.is_object()) bad("omega0 must be an object");
    c.omega0.kind = get<std::string>(o, "kind", c.omega0.kind);
    c.omega0.values = get<std::vector<double>>(o, "values", {});
    c.omega0.boundary_vanishing = get<bool>(o, "boundary_vanishing", false);
    if (o.contains("amplitude")) {
      for (auto& [k, v] : o["amplitude"].items()) {
        int kk = 0;
        try {
          kk = std::stoi(k);
        } catch (...) {
          bad("amplitude keys must be integers");
        }
        if (v.is_number()) c.omega0.amplitude[std::abs(kk)] = v.get<double>();
        else if (v.is_array() && v.size() == 2) c.omega0.amplitude[std::abs(kk)] = cplx(v[0], v[1]);
        else bad("amplitude values must be numbers or [re, im]");
      }
    }
    if (c.omega0.kind == "polynomial" && c.omega0.values.empty()) bad("polynomial omega0 needs values");
    if (c.omega0.kind == "tabulated" && c.omega0.values.size() < 4) bad("tabulated omega0 needs >= 4 values");
    ModeFn m = c.omega0.mode(1);
    if (c.omega0.boundary_vanishing && (std::abs(m(0.0)) > 1e-10 || std::abs(m(1.0)) > 1e-10))
      bad("omega0 flagged boundary_vanishing but does not vanish at the walls");
  }
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    c.n_total = get<int>(g, "n_total", c.n_total);
    c.order = get<int>(g, "order", c.order);
    c.h_min = get<double>(g, "h_min", c.h_min);
    c.out_panels = get<int>(g, "out_panels", c.out_panels);
    c.direct_panels = get<int>(g, "direct_panels", c.direct_panels);
  }
  if (c.order < 4 || c.order > 16) bad("grid.order must be in 4..16");
  if (c.n_total < 8 * c.order) bad("grid.n_total too small");
  if (!(c.h_min > 0 && c.h_min < 1e-2)) bad("grid.h_min must be in (0, 1e-2)");
  if (c.out_panels < 1 || c.direct_panels < 4) bad("grid panels");
  if (j.contains("eps_schedule")) {
    c.eps.eps0 = get<double>(j["eps_schedule"], "eps0", c.eps.eps0);
    c.eps.levels = get<int>(j["eps_schedule"], "levels", c.eps.levels);
  }
  if (!(c.eps.eps0 > 0 && c.eps.eps0 <= 0.25)) bad("eps0 must be in (0, 0.25]");
  if (c.eps.levels < 1 || c.eps.levels > 12) bad("eps levels must be in 1..12");
  c.t_samples = j.contains("t_samples") ? parse_times(j["t_samples"]) : std::vector<double>{0.0};
  c.fit_window = get<std::vector<double>>(j, "fit_window", c.fit_window);
  if (c.fit_window.size() != 2 || !(c.fit_window[1] > c.fit_window[0])) bad("fit_window must be [lo, hi]");
  c.x_resolution = get<int>(j, "x_resolution", c.x_resolution);
  if (c.x_resolution < 4) bad("x_resolution must be >= 4");
  if (j.contains("norms")) {
    c.norm_samples = get<int>(j["norms"], "samples", c.norm_samples);
    c.norm_k_max = get<int>(j["norms"], "k_max", c.norm_k_max);
    if (c.norm_samples < 1 || c.norm_k_max < 1) bad("norms settings");
  }
  c.seed = get<std::uint64_t>(j, "seed", c.seed);
  c.outputs = get<std::string>(j, "outputs", c.outputs);
  if (c.outputs.empty()) bad("outputs must name a directory");
  c.tasks = get<std::vector<std::string>>(j, "tasks", {"scan"});
  for (auto& t : c.tasks)
    if (!kTasks.count(t)) bad("unknown task " + t);
  if (j.contains("checks")) {
    const auto& ch = j["checks"];
    static const std::set<std::string> ck{"scan_certified", "cross_rel_tol",  "cross_t_max",    "psi_slope",
                                          "dpsi_slope",     "lemmas_bounded", "physical_real_tol",
                                          "psi_limit_tol",  "scatter_tail_factor"};
    for (auto& [k, v] : ch.items())
      if (!ck.count(k)) bad("unknown check " + k);
    c.checks.scan_certified = get<bool>(ch, "scan_certified", false);
    c.checks.cross_rel_tol = get<double>(ch, "cross_rel_tol", -1.0);
    c.checks.cross_t_max = get<double>(ch, "cross_t_max", 50.0);
    c.checks.psi_slope = get<std::vector<double>>(ch, "psi_slope", {});
    c.checks.dpsi_slope = get<std::vector<double>>(ch, "dpsi_slope", {});
    c.checks.lemmas_bounded = get<bool>(ch, "lemmas_bounded", false);
    c.checks.physical_real_tol = get<double>(ch, "physical_real_tol", -1.0);
    c.checks.psi_limit_tol = get<double>(ch, "psi_limit_tol", -1.0);
    c.checks.scatter_tail_factor = get<double>(ch, "scatter_tail_factor", -1.0);
    for (auto* w : {&c.checks.psi_slope, &c.checks.dpsi_slope})
      if (!w->empty() && (w->size() != 2 || (*w)[0] > (*w)[1])) bad("slope windows must be [lo, hi]");
  }
  // profile last: a bad descriptor is a configuration error too
  try {
    if (c.profile.is_string()) make_profile(c.profile.get<std::string>());
    else make_profile(c.profile);
  } catch (const Error& e) {
    bad(std::string("profile: ") + e.what());
  }
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("parse error: ") + e.what());
  }
  return parse_config(j);
}

// ---------------------------------------------------------------- hashing

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorCode::Internal, "sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + p.string());
  out << content;
  if (!out) fail(ErrorCode::Io, "write failed for " + p.string());
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------- physical fields

PhysicalFields assemble_physical(const ShearProfile& prof, const std::vector<ModeTrajectory>& trs, int x_resolution) {
  if (trs.empty()) fail(ErrorCode::InvalidArgument, "no trajectories");
  if (x_resolution < 1) fail(ErrorCode::InvalidArgument, "x_resolution");
  PhysicalFields pf;
  pf.times = trs.front().times;
  pf.y = trs.front().y;
  for (const auto& tr : trs)
    if (tr.times != pf.times || tr.y != pf.y) fail(ErrorCode::InvalidArgument, "trajectories must share times and y");
  for (int i = 0; i < x_resolution; ++i) pf.x.push_back(2.0 * kPi * i / x_resolution);
  const Eigen::Index nx = x_resolution, ny = static_cast<Eigen::Index>(pf.y.size());
  const double c0 = FourierConvention::c0;
  double vmax = 0.0, imax = 0.0;
  for (size_t ti = 0; ti < pf.times.size(); ++ti) {
    const double t = pf.times[ti];
    CMatrix phi = CMatrix::Zero(nx, ny), f = CMatrix::Zero(nx, ny);
    for (const auto& tr : trs) {
      const double k = tr.k;
      for (Eigen::Index j = 0; j < ny; ++j) {
        const double bt = prof.b(pf.y[static_cast<size_t>(j)]) * t;
        const cplx ps = tr.psi(static_cast<Eigen::Index>(ti), j), om = tr.omega(static_cast<Eigen::Index>(ti), j);
        for (Eigen::Index i = 0; i < nx; ++i) {
          cplx e = std::polar(c0, k * (bt + pf.x[static_cast<size_t>(i)]));
          phi(i, j) += e * ps;
          f(i, j) += e * om;
        }
      }
    }
    for (const CMatrix* m : {&phi, &f}) {
      vmax = std::max(vmax, m->cwiseAbs().maxCoeff());
      imax = std::max(imax, m->imag().cwiseAbs().maxCoeff());
    }
    pf.phi.push_back(std::move(phi));
    pf.f.push_back(std::move(f));
  }
  pf.max_imag = vmax > 0 ? imax / vmax : 0.0;
  return pf;
}

// ---------------------------------------------------------------- run

namespace {

struct Ctx {
  const RunConfig& cfg;
  fs::path dir;
  ShearProfile prof;
  std::vector<int> ks;  // positive modes
  std::map<int, bool> certified;
  std::map<int, ModeTrajectory> spectral, direct;
  std::map<int, AsymptoticProfile> aps;  // both signs
  RunReport rep;
  std::ostringstream log;
};

void add_check(Ctx& c, const std::string& name, bool pass, const std::string& detail) {
  c.rep.checks.push_back({name, pass, detail});
}

void task_scan(Ctx& c) {
  ScanConfig sc;
  sc.n = c.cfg.n_total;
  sc.q = c.cfg.order;
  sc.h_floor = c.cfg.h_min;
  sc.eps = c.cfg.eps;
  bool all = true;
  std::string detail;
  for (int k : c.ks) {
    SpectrumReport r = scan(c.prof, k, default_rect(c.prof), sc);
    write_file(c.dir / ("scan_k" + std::to_string(k) + ".json"), to_json(r));
    std::vector<double> xs = r.c_re, ys = r.c_im;
    write_file(c.dir / ("sigma_k" + std::to_string(k) + ".svg"),
               svg_heatmap(r.sigma_min, xs, ys, "sigma_min, k = " + std::to_string(k)));
    c.certified[k] = r.flags.empty();
    all &= r.flags.empty();
    detail += "k=" + std::to_string(k) + ": delta_hat " + fmt(r.delta_hat) + ", flags " +
              std::to_string(r.flags.size()) + "; ";
  }
  if (c.cfg.checks.scan_certified) add_check(c, "scan_certified", all, detail);
}

DensityConfig density_config(const RunConfig& cfg) {
  DensityConfig dc;
  dc.out_panels = cfg.out_panels;
  dc.out_order = cfg.order;
  dc.nys_base = std::max(8, cfg.n_total / cfg.order);
  dc.nys_order = cfg.order;
  dc.h_min = cfg.h_min;
  dc.eps = cfg.eps;
  return dc;
}

std::vector<double> output_y(const RunConfig& cfg) { return ChannelGrid::uniform(cfg.out_panels, cfg.order).nodes(); }

void decay_outputs(Ctx& c, const ModeTrajectory& tr, const std::string& tag) {
  std::vector<double> t, sp, sd;
  for (size_t i = 0; i < tr.times.size(); ++i) {
    if (tr.times[i] <= 0) continue;
    t.push_back(tr.times[i]);
    sp.push_back(tr.psi.row(static_cast<Eigen::Index>(i)).cwiseAbs().maxCoeff());
    sd.push_back(tr.dpsi.row(static_cast<Eigen::Index>(i)).cwiseAbs().maxCoeff());
  }
  if (t.size() < 2) return;
  write_file(c.dir / ("decay_" + tag + ".svg"),
             svg_loglog({{"sup |psi_k|", t, sp, false}, {"sup |dy psi_k|", t, sd, true}},
                        "decay, " + tag, "t", "sup norm"));
}

void slope_checks(Ctx& c, const ModeTrajectory& tr) {
  const double lo = c.cfg.fit_window[0], hi = c.cfg.fit_window[1];
  int inside = 0;
  for (double t : tr.times) inside += (t >= lo && t <= hi);
  if (inside < 10) return;
  DecayFit fp = fit_decay(tr, DecayQuantity::SupPsi, lo, hi, false);
  DecayFit fd = fit_decay(tr, DecayQuantity::SupDyPsi, lo, hi, false);
  auto win = [&](const std::vector<double>& w, const DecayFit& f, const std::string& name) {
    if (w.empty()) return;
    bool ok = f.slope >= w[0] && f.slope <= w[1] && f.r2 >= 0.95;
    add_check(c, name + "_k" + std::to_string(tr.k), ok, "slope " + fmt(f.slope) + ", r2 " + fmt(f.r2));
  };
  win(c.cfg.checks.psi_slope, fp, "psi_slope");
  win(c.cfg.checks.dpsi_slope, fd, "dpsi_slope");
  json j;
  for (auto* f : {&fp, &fd})
    j.push_back({{"quantity", f->quantity}, {"t_lo", f->t_lo}, {"t_hi", f->t_hi}, {"slope", f->slope},
                 {"r2", f->r2}, {"samples", f->samples}});
  write_file(c.dir / ("fits_k" + std::to_string(tr.k) + ".json"), j.dump(2));
}

void task_spectral(Ctx& c) {
  DensityConfig dc = density_config(c.cfg);
  std::string skipped;
  for (int k : c.ks) {
    if (c.certified.count(k) && !c.certified[k]) {
      skipped += " " + std::to_string(k);
      continue;
    }
    SpectralDensity d = build_density(c.prof, k, c.cfg.omega0.mode(k), dc);
    ModeTrajectory tr = spectral_trajectory(d, c.cfg.t_samples);
    write_file(c.dir / ("traj_spectral_k" + std::to_string(k) + ".csv"), to_csv(tr));
    decay_outputs(c, tr, "spectral_k" + std::to_string(k));
    slope_checks(c, tr);
    c.spectral[k] = std::move(tr);
  }
  if (!skipped.empty()) c.log << "  spectral evolution skipped for rejected modes:" << skipped << "\n";
}

void task_direct(Ctx& c) {
  DirectConfig dc;
  dc.panels = c.cfg.direct_panels;
  dc.q = c.cfg.order;
  const auto ys = output_y(c.cfg);
  for (int k : c.ks) {
    ModeTrajectory tr = evolve_direct(c.prof, k, c.cfg.omega0.mode(k), c.cfg.t_samples, ys, dc);
    write_file(c.dir / ("traj_direct_k" + std::to_string(k) + ".csv"), to_csv(tr));
    if (!c.spectral.count(k)) {
      decay_outputs(c, tr, "direct_k" + std::to_string(k));
      slope_checks(c, tr);
    }
    if (c.spectral.count(k) && c.cfg.checks.cross_rel_tol > 0) {
      const auto& s = c.spectral[k];
      double worst = 0.0;
      for (size_t i = 0; i < tr.times.size(); ++i) {
        if (tr.times[i] > c.cfg.checks.cross_t_max) break;
        auto row = static_cast<Eigen::Index>(i);
        double den = tr.psi.row(row).cwiseAbs().maxCoeff();
        if (den > 0) worst = std::max(worst, (s.psi.row(row) - tr.psi.row(row)).cwiseAbs().maxCoeff() / den);
      }
      add_check(c, "spectral_vs_direct_k" + std::to_string(k), worst <= c.cfg.checks.cross_rel_tol,
                "max relative difference " + fmt(worst));
    }
    c.direct[k] = std::move(tr);
  }
}

const ModeTrajectory* any_trajectory(Ctx& c, int k) {
  if (c.spectral.count(k)) return &c.spectral[k];
  if (c.direct.count(k)) return &c.direct[k];
  return nullptr;
}

void task_asymptotics(Ctx& c) {
  const auto ys = output_y(c.cfg);
  AsymptoticConfig ac;
  ac.nys_base = std::max(8, c.cfg.n_total / c.cfg.order);
  ac.nys_order = c.cfg.order;
  ac.h_min = c.cfg.h_min;
  ac.eps = c.cfg.eps;
  const double tmax = c.cfg.t_samples.back();
  std::string scatter_detail;
  bool scatter_ok = true, scatter_any = false;
  for (int k : c.ks) {
    for (int s : {+1, -1}) {
      const int kk = s * k;
      AsymptoticProfile ap = compute_phis(c.prof, kk, c.cfg.omega0.mode(kk), ys, ac);
      if (s > 0) {
        if (const ModeTrajectory* tr = any_trajectory(c, k)) {
          for (size_t i = 0; i < tr->times.size(); ++i) {
            double t = tr->times[i];
            if (t < c.cfg.fit_window[0]) continue;
            CVector psi = tr->psi.row(static_cast<Eigen::Index>(i)).transpose();
            double den = sup_norm(psi);
            if (den > 0) ap.residual_norms.push_back({t, sup_norm(psi - main_term_psi(ap, t)) / den});
          }
          if (!tr->times.empty() && tr->times.front() == 0.0 && tmax >= 100.0) {
            try {
              ScatterEntry se = scattering_profile(*tr, ap);
              // f_k(t_max) from the most accurate vorticity available
              const ModeTrajectory& fw = c.direct.count(k) ? c.direct[k] : *tr;
              auto last = static_cast<Eigen::Index>(fw.times.size() - 1);
              double err = 0.0;
              for (size_t j = 0; j < fw.y.size(); ++j) {
                cplx fk = std::polar(1.0, k * c.prof.b(fw.y[j]) * tmax) * fw.omega(last, static_cast<Eigen::Index>(j));
                err = std::max(err, std::abs(fk - se.F[static_cast<Eigen::Index>(j)]));
              }
              std::ostringstream csv;
              csv << "y,re_F,im_F\n";
              for (size_t j = 0; j < se.y.size(); ++j) {
                char buf[128];
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", se.y[j], se.F[static_cast<Eigen::Index>(j)].real(),
                              se.F[static_cast<Eigen::Index>(j)].imag());
                csv << buf;
              }
              write_file(c.dir / ("scattering_k" + std::to_string(k) + ".csv"), csv.str());
              scatter_any = true;
              bool ok = c.cfg.checks.scatter_tail_factor < 0 || err <= c.cfg.checks.scatter_tail_factor * se.tail_estimate;
              scatter_ok &= ok;
              scatter_detail += "k=" + std::to_string(k) + ": " + fmt(err) + " vs tail " + fmt(se.tail_estimate) + "; ";
            } catch (const Error& e) {
              if (e.code() != ErrorCode::TailTooLarge) throw;
              scatter_any = true;
              scatter_ok = false;
              scatter_detail += "k=" + std::to_string(k) + ": " + e.what() + "; ";
            }
          }
        }
        write_file(c.dir / ("asymptotics_k" + std::to_string(k) + ".json"), to_json(ap, {}));
      }
      c.aps[kk] = std::move(ap);
    }
  }
  if (c.cfg.checks.scatter_tail_factor > 0 && scatter_any) add_check(c, "scattering_tail", scatter_ok, scatter_detail);
}

void physical_outputs(Ctx& c) {
  std::vector<ModeTrajectory> trs;
  for (int k : c.ks) {
    const ModeTrajectory* tr = any_trajectory(c, k);
    if (!tr) return;
    trs.push_back(*tr);
    trs.push_back(conjugate_trajectory(*tr));
  }
  PhysicalFields pf = assemble_physical(c.prof, trs, c.cfg.x_resolution);
  json j;
  j["max_imag_ratio"] = pf.max_imag;
  json sup = json::array();
  std::vector<double> tt, sv;
  for (size_t i = 0; i < pf.times.size(); ++i) {
    double v = pf.phi[i].cwiseAbs().maxCoeff();
    sup.push_back({{"t", pf.times[i]}, {"sup_phi", v}});
    if (pf.times[i] >= c.cfg.fit_window[0] && pf.times[i] <= c.cfg.fit_window[1]) {
      tt.push_back(pf.times[i]);
      sv.push_back(v);
    }
  }
  j["sup_phi"] = sup;
  if (tt.size() >= 10) {
    DecayFit f = fit_decay(tt, sv, c.cfg.fit_window[0], c.cfg.fit_window[1], "sup_phi", false);
    j["sup_phi_fit"] = {{"slope", f.slope}, {"r2", f.r2}};
  }
  if (c.cfg.checks.physical_real_tol > 0)
    add_check(c, "physical_real", pf.max_imag <= c.cfg.checks.physical_real_tol, "max |Im| ratio " + fmt(pf.max_imag));

  bool have_all = true;
  for (int k : c.ks) have_all &= c.aps.count(k) && c.aps.count(-k);
  if (have_all && c.cfg.omega0.boundary_vanishing) {
    std::vector<AsymptoticProfile> aps;
    for (int k : c.ks) {
      aps.push_back(c.aps[k]);
      aps.push_back(c.aps[-k]);
    }
    CMatrix Psi = assemble_Psi(aps, pf.x);
    const double t = pf.times.back();
    double err = (t * t * pf.phi.back() - Psi).cwiseAbs().maxCoeff(), ref = Psi.cwiseAbs().maxCoeff();
    j["psi_limit"] = {{"t", t}, {"error", err}, {"sup_Psi", ref}};
    if (c.cfg.checks.psi_limit_tol > 0)
      add_check(c, "psi_limit", err <= c.cfg.checks.psi_limit_tol * ref,
                "||t^2 phi - Psi|| " + fmt(err) + " vs ||Psi|| " + fmt(ref));
  }
  write_file(c.dir / "physical.json", j.dump(2));
  std::ostringstream csv;
  csv << "x,y,phi,f\n";
  const size_t last = pf.times.size() - 1;
  for (Eigen::Index i = 0; i < pf.phi[last].rows(); ++i)
    for (Eigen::Index jj = 0; jj < pf.phi[last].cols(); ++jj) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", pf.x[static_cast<size_t>(i)],
                    pf.y[static_cast<size_t>(jj)], pf.phi[last](i, jj).real(), pf.f[last](i, jj).real());
      csv << buf;
    }
  write_file(c.dir / "physical_final.csv", csv.str());
}

void task_norms(Ctx& c) {
  LemmaSweepConfig lc;
  for (int k = 1; k <= c.cfg.norm_k_max; ++k) lc.ks.push_back(k);
  lc.samples = c.cfg.norm_samples;
  lc.eps = c.cfg.eps;
  lc.seed = c.cfg.seed;
  lc.q = c.cfg.order;
  auto reps = lemma_sweep(c.prof, {LemmaTag::bX1, LemmaTag::X11, LemmaTag::bX17, LemmaTag::bX17Corollary}, lc);
  write_file(c.dir / "norms.json", to_json(reps));
  if (c.cfg.checks.lemmas_bounded) {
    bool ok = true;
    std::string d;
    for (auto& r : reps) {
      ok &= r.finite && !r.monotone_blowup;
      d += lemma_name(r.tag) + " max " + fmt(r.max_ratio) + (r.monotone_blowup ? " (growing)" : "") + "; ";
    }
    add_check(c, "lemmas_bounded", ok, d);
  }
}

bool wants(const RunConfig& cfg, const std::string& t) {
  return std::find(cfg.tasks.begin(), cfg.tasks.end(), t) != cfg.tasks.end();
}

}  // namespace

RunReport run(const RunConfig& cfg) {
  Ctx c{cfg, fs::path(cfg.outputs), {}, {}, {}, {}, {}, {}, {}, {}};
  std::error_code ec;
  fs::create_directories(c.dir, ec);
  if (ec || !fs::is_directory(c.dir)) fail(ErrorCode::Io, "cannot create " + c.dir.string());
  c.prof = cfg.profile.is_string() ? make_profile(cfg.profile.get<std::string>()) : make_profile(cfg.profile);
  std::set<int> ks;
  for (int k : cfg.k_set) ks.insert(std::abs(k));
  c.ks.assign(ks.begin(), ks.end());

  bool numerical_fail = false;
  auto timed = [&](const std::string& name, const std::function<void()>& body) {
    TaskStatus st{name, "ok", "", 0.0};
    auto t0 = std::chrono::steady_clock::now();
    try {
      body();
    } catch (const Error& e) {
      st.status = "error";
      st.detail = e.what();
      numerical_fail = true;
    } catch (const std::exception& e) {
      st.status = "error";
      st.detail = std::string("Internal: ") + e.what();
      numerical_fail = true;
    }
    st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.log << name << ": " << st.status << " " << fmt(st.seconds) << " s" << (st.detail.empty() ? "" : " ")
          << st.detail << "\n";
    c.rep.tasks.push_back(st);
  };
  // fixed dependency order regardless of the listed order
  if (wants(cfg, "scan")) timed("scan", [&] { task_scan(c); });
  if (wants(cfg, "evolve-spectral")) timed("evolve-spectral", [&] { task_spectral(c); });
  if (wants(cfg, "evolve-direct")) timed("evolve-direct", [&] { task_direct(c); });
  if (wants(cfg, "asymptotics")) timed("asymptotics", [&] { task_asymptotics(c); });
  if (!c.spectral.empty() || !c.direct.empty()) timed("physical", [&] { physical_outputs(c); });
  if (wants(cfg, "norms")) timed("norms", [&] { task_norms(c); });

  bool checks_ok = true;
  for (auto& ch : c.rep.checks) checks_ok &= ch.pass;
  c.rep.exit_code = numerical_fail ? 4 : (checks_ok ? 0 : 3);

  json r;
  r["spec_version"] = kSpecVersion;
  r["profile"] = c.prof.name();
  r["k_set"] = c.ks;
  json ts = json::array();
  for (auto& t : c.rep.tasks) ts.push_back({{"task", t.task}, {"status", t.status}, {"detail", t.detail}});
  r["tasks"] = ts;
  json cs = json::array();
  for (auto& ch : c.rep.checks) cs.push_back({{"check", ch.name}, {"pass", ch.pass}, {"detail", ch.detail}});
  r["checks"] = cs;
  r["exit_code"] = c.rep.exit_code;
  write_file(c.dir / "report.json", r.dump(2));
  // wall-clock timings stay out of the JSON so reruns are byte-identical
  write_file(c.dir / "run.log", c.log.str());

  std::vector<fs::path> files;
  for (auto& e : fs::recursive_directory_iterator(c.dir))
    if (e.is_regular_file() && e.path().filename() != "manifest.json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  json m = json::array();
  for (auto& p : files) {
    std::string bytes = slurp(p);
    ManifestEntry me{fs::relative(p, c.dir).generic_string(), sha256_hex(bytes), bytes.size()};
    m.push_back({{"file", me.file}, {"sha256", me.sha256}, {"bytes", me.bytes}});
    c.rep.manifest.push_back(me);
  }
  write_file(c.dir / "manifest.json", m.dump(2));
  return std::move(c.rep);
}

RunReport run_file(const fs::path& config, const std::vector<std::string>& tasks_override) {
  RunConfig cfg;
  try {
    cfg = load_config(config);
    if (!tasks_override.empty()) {
      for (auto& t : tasks_override)
        if (!kTasks.count(t)) bad("unknown task " + t);
      cfg.tasks = tasks_override;
    }
  } catch (const Error& e) {
    RunReport r;
    r.tasks.push_back({"config", "error", e.what(), 0.0});
    r.exit_code = 2;
    return r;
  }
  try {
    return run(cfg);
  } catch (const Error& e) {
    RunReport r;
    r.tasks.push_back({"run", "error", e.what(), 0.0});
    r.exit_code = 4;
    return r;
  }
}

DirReport report_dir(const fs::path& dir) {
  DirReport out;
  std::ostringstream o;
  nlohmann::json man, rep;
  try {
    man = nlohmann::json::parse(slurp(dir / "manifest.json"));
    rep = nlohmann::json::parse(slurp(dir / "report.json"));
  } catch (const std::exception& e) {
    out.text = std::string("cannot read run directory: ") + e.what() + "\n";
    out.exit_code = 2;
    return out;
  }
  int bad_hash = 0;
  std::set<std::string> listed;
  for (auto& e : man) {
    std::string f = e["file"].get<std::string>();
    listed.insert(f);
    std::string h;
    try {
      h = sha256_hex(slurp(dir / f));
    } catch (const Error&) {
      h = "missing";
    }
    if (h != e["sha256"].get<std::string>()) {
      o << "hash mismatch: " << f << "\n";
      ++bad_hash;
    }
  }
  for (auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string f = fs::relative(e.path(), dir).generic_string();
    if (f != "manifest.json" && !listed.count(f)) {
      o << "not in manifest: " << f << "\n";
      ++bad_hash;
    }
  }
  o << "profile " << rep.value("profile", std::string("?")) << "\n";
  for (auto& t : rep["tasks"])
    o << "task  " << t["task"].get<std::string>() << ": " << t["status"].get<std::string>() << "\n";
  bool ok = true;
  for (auto& ch : rep["checks"]) {
    bool p = ch["pass"].get<bool>();
    ok &= p;
    o << (p ? "PASS  " : "FAIL  ") << ch["check"].get<std::string>() << "  " << ch["detail"].get<std::string>()
      << "\n";
  }
  o << man.size() << " files, " << (bad_hash ? "manifest mismatch" : "manifest verified") << "\n";
  out.text = o.str();
  int code = rep.value("exit_code", 0);
  out.exit_code = bad_hash ? 4 : (code != 0 ? code : (ok ? 0 : 3));
  return out;
}

}  // namespace idamp
