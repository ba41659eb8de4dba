#include "idamp/idamp.h"

#include <cstring>
#include <sstream>
#include <string>

#include "idamp/direct.hpp"
#include "idamp/greens.hpp"
#include "idamp/norms.hpp"
#include "idamp/profiles.hpp"
#include "idamp/runner.hpp"
#include "idamp/spectral.hpp"
#include "idamp/spectrum.hpp"

struct idamp_profile {
  idamp::ShearProfile prof;
};
struct idamp_density {
  idamp::SpectralDensity d;
};

namespace {

thread_local std::string g_last;

template <class F>
int guarded(F&& f) {
  try {
    g_last.clear();
    f();
    return 0;
  } catch (const idamp::Error& e) {
    g_last = e.what();
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    g_last = std::string("Internal: ") + e.what();
    return static_cast<int>(idamp::ErrorCode::Internal);
  } catch (...) {
    g_last = "Internal: unknown exception";
    return static_cast<int>(idamp::ErrorCode::Internal);
  }
}

void need(const void* p, const char* what) {
  if (!p) idamp::fail(idamp::ErrorCode::InvalidArgument, std::string("null ") + what);
}

idamp::ModeFn wrap(idamp_mode_fn fn, void* user) {
  if (!fn) return [](double y) { return idamp::cplx(std::sin(idamp::kPi * y), 0.0); };
  return [fn, user](double y) {
    double re = 0.0, im = 0.0;
    fn(y, user, &re, &im);
    return idamp::cplx(re, im);
  };
}

void copy_out(const std::string& s, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (buf && cap > 0) {
    size_t n = std::min(cap - 1, s.size());
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
  }
}

}  // namespace

extern "C" {

const char* idamp_version(void) { return "1.0.0"; }
const char* idamp_last_error(void) { return g_last.c_str(); }
const char* idamp_error_name(int code) {
  if (code == 0) return "Ok";
  return idamp::error_name(static_cast<idamp::ErrorCode>(code));
}

int idamp_profile_create(const char* descriptor, idamp_profile** out) {
  return guarded([&] {
    need(descriptor, "descriptor");
    need(out, "out");
    std::string s(descriptor);
    auto* p = new idamp_profile;
    try {
      if (!s.empty() && s[0] == '{') p->prof = idamp::make_profile(nlohmann::json::parse(s));
      else p->prof = idamp::make_profile(s);
    } catch (const nlohmann::json::exception& e) {
      delete p;
      idamp::fail(idamp::ErrorCode::InvalidArgument, e.what());
    } catch (...) {
      delete p;
      throw;
    }
    *out = p;
  });
}

void idamp_profile_destroy(idamp_profile* p) { delete p; }

int idamp_profile_eval(const idamp_profile* p, double y, double out[3]) {
  return guarded([&] {
    need(p, "profile");
    need(out, "out");
    if (!(y >= 0.0 && y <= 1.0)) idamp::fail(idamp::ErrorCode::OutOfRange, "y outside [0,1]");
    out[0] = p->prof.b(y);
    out[1] = p->prof.db(y);
    out[2] = p->prof.d2b(y);
  });
}

int idamp_profile_theta(const idamp_profile* p, double* theta) {
  return guarded([&] {
    need(p, "profile");
    need(theta, "theta");
    *theta = p->prof.theta();
  });
}

int idamp_green(int k, double y, double z, double* g) {
  return guarded([&] {
    need(g, "g");
    *g = idamp::GreensKernel(k).eval(y, z);
  });
}

int idamp_sigma_min(const idamp_profile* p, int k, double c_re, double c_im, int n, double* sigma) {
  return guarded([&] {
    need(p, "profile");
    need(sigma, "sigma");
    *sigma = idamp::sigma_min_at(p->prof, k, idamp::cplx(c_re, c_im), n);
  });
}

int idamp_delta_hat(const idamp_profile* p, int k, double* delta) {
  return guarded([&] {
    need(p, "profile");
    need(delta, "delta");
    idamp::SpectrumReport r;
    r.k = k;
    idamp::measure_delta(p->prof, k, idamp::ScanConfig{}, r);
    *delta = r.delta_hat;
  });
}

int idamp_density_create(const idamp_profile* p, int k, idamp_mode_fn fn, void* user, idamp_density** out) {
  return guarded([&] {
    need(p, "profile");
    need(out, "out");
    auto* d = new idamp_density;
    try {
      d->d = idamp::build_density(p->prof, k, wrap(fn, user));
    } catch (...) {
      delete d;
      throw;
    }
    *out = d;
  });
}

void idamp_density_destroy(idamp_density* d) { delete d; }

int idamp_density_size(const idamp_density* d, size_t* n) {
  return guarded([&] {
    need(d, "density");
    need(n, "n");
    *n = d->d.y().size();
  });
}

int idamp_density_y(const idamp_density* d, double* y) {
  return guarded([&] {
    need(d, "density");
    need(y, "y");
    std::copy(d->d.y().begin(), d->d.y().end(), y);
  });
}

int idamp_density_psi(const idamp_density* d, double t, double* re, double* im) {
  return guarded([&] {
    need(d, "density");
    need(re, "re");
    need(im, "im");
    if (!(t >= 0.0)) idamp::fail(idamp::ErrorCode::InvalidArgument, "t must be >= 0");
    idamp::CVector v = idamp::evolve_psi_k(d->d, t);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      re[i] = v[i].real();
      im[i] = v[i].imag();
    }
  });
}

int idamp_direct_psi(const idamp_profile* p, int k, idamp_mode_fn fn, void* user, double t, size_t n,
                     const double* ys, double* re, double* im) {
  return guarded([&] {
    need(p, "profile");
    need(ys, "ys");
    need(re, "re");
    need(im, "im");
    std::vector<double> y(ys, ys + n);
    auto tr = idamp::evolve_direct(p->prof, k, wrap(fn, user), {t}, y);
    for (size_t i = 0; i < n; ++i) {
      re[i] = tr.psi(0, static_cast<Eigen::Index>(i)).real();
      im[i] = tr.psi(0, static_cast<Eigen::Index>(i)).imag();
    }
  });
}

int idamp_lemma_sweep(const idamp_profile* p, int samples, int k_max, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    need(p, "profile");
    idamp::LemmaSweepConfig c;
    c.samples = samples;
    for (int k = 1; k <= k_max; ++k) c.ks.push_back(k);
    if (c.ks.empty()) idamp::fail(idamp::ErrorCode::InvalidArgument, "k_max must be >= 1");
    using idamp::LemmaTag;
    auto reps = idamp::lemma_sweep(
        p->prof, {LemmaTag::bX1, LemmaTag::X11, LemmaTag::bX17, LemmaTag::bX17Corollary}, c);
    copy_out(idamp::to_json(reps), buf, cap, needed);
  });
}

int idamp_run(const char* config_path, const char* tasks, int* exit_code) {
  return guarded([&] {
    need(config_path, "config_path");
    need(exit_code, "exit_code");
    std::vector<std::string> over;
    if (tasks) {
      std::stringstream ss(tasks);
      std::string t;
      while (std::getline(ss, t, ','))
        if (!t.empty()) over.push_back(t);
    }
    idamp::RunReport r = idamp::run_file(config_path, over);
    *exit_code = r.exit_code;
    if (r.exit_code == 2 || r.exit_code == 4) {
      for (auto& t : r.tasks)
        if (t.status == "error") g_last = t.detail;
    }
  });
}

int idamp_report(const char* dir, char* buf, size_t cap, size_t* needed, int* exit_code) {
  return guarded([&] {
    need(dir, "dir");
    need(exit_code, "exit_code");
    idamp::DirReport r = idamp::report_dir(dir);
    copy_out(r.text, buf, cap, needed);
    *exit_code = r.exit_code;
  });
}

}  // extern "C"
