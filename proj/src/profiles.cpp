#include "idamp/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <regex>

#include <boost/math/interpolators/cardinal_quintic_b_spline.hpp>
#include "json.hpp"

namespace idamp {

namespace {

struct Couette : ProfileImpl {
  double b(double y) const override { return y; }
  double db(double) const override { return 1.0; }
  double d2b(double) const override { return 0.0; }
  double d3b(double) const override { return 0.0; }
  double d4b(double) const override { return 0.0; }
};

struct SinePerturbed : ProfileImpl {
  double a;
  explicit SinePerturbed(double a_) : a(a_) {}
  static constexpr double w = 2.0 * kPi;
  double b(double y) const override { return y + a * std::sin(w * y) / w; }
  double db(double y) const override { return 1.0 + a * std::cos(w * y); }
  double d2b(double y) const override { return -a * w * std::sin(w * y); }
  double d3b(double y) const override { return -a * w * w * std::cos(w * y); }
  double d4b(double y) const override { return a * w * w * w * std::sin(w * y); }
};

// b = y + tanh(s(y-1/2))/(2s): b' = 1 + sech^2/2 stays in [1, 3/2].
struct TanhMonotone : ProfileImpl {
  double s;
  explicit TanhMonotone(double s_) : s(s_) {}
  double b(double y) const override { return y + std::tanh(s * (y - 0.5)) / (2.0 * s); }
  double db(double y) const override {
    double t = std::tanh(s * (y - 0.5));
    return 1.0 + 0.5 * (1.0 - t * t);
  }
  // derivatives of u = 1 - t^2 with t' = s u
  double d2b(double y) const override {
    double t = std::tanh(s * (y - 0.5)), u = 1.0 - t * t;
    return 0.5 * (-2.0 * s * t * u);
  }
  double d3b(double y) const override {
    double t = std::tanh(s * (y - 0.5)), u = 1.0 - t * t;
    return 0.5 * (-2.0 * s * s * u * (u - 2.0 * t * t));
  }
  double d4b(double y) const override {
    double t = std::tanh(s * (y - 0.5)), u = 1.0 - t * t;
    // d/dy [u^2 - 2 t^2 u] = s*(-4 t u^2 - 4 t u^2 + 4 t^3 u)
    return 0.5 * (-2.0 * s * s * s * (-8.0 * t * u * u + 4.0 * t * t * t * u));
  }
};

struct Polynomial : ProfileImpl {
  std::vector<double> c;
  explicit Polynomial(std::vector<double> c_) : c(std::move(c_)) {}
  double deriv(double y, int d) const {
    double acc = 0.0;
    for (int j = static_cast<int>(c.size()) - 1; j >= d; --j) {
      double f = 1.0;
      for (int r = 0; r < d; ++r) f *= (j - r);
      acc = acc * y + c[j] * f;
    }
    return acc;
  }
  double b(double y) const override { return deriv(y, 0); }
  double db(double y) const override { return deriv(y, 1); }
  double d2b(double y) const override { return deriv(y, 2); }
  double d3b(double y) const override { return deriv(y, 3); }
  double d4b(double y) const override { return deriv(y, 4); }
};

struct Tabulated : ProfileImpl {
  boost::math::interpolators::cardinal_quintic_b_spline<double> spline;
  explicit Tabulated(const std::vector<double>& v)
      : spline(v.data(), v.size(), 0.0, 1.0 / (v.size() - 1)) {}
  double b(double y) const override { return spline(y); }
  double db(double y) const override { return spline.prime(y); }
  double d2b(double y) const override { return spline.double_prime(y); }
  // higher derivatives by centered differences of the second derivative
  double d3b(double y) const override {
    const double h = 1e-4;
    double a = std::max(0.0, y - h), c = std::min(1.0, y + h);
    return (spline.double_prime(c) - spline.double_prime(a)) / (c - a);
  }
  double d4b(double y) const override {
    const double h = 1e-3;
    double m = std::clamp(y, h, 1.0 - h);
    return (spline.double_prime(m + h) - 2.0 * spline.double_prime(m) + spline.double_prime(m - h)) /
           (h * h);
  }
};

}  // namespace

double ShearProfile::b_ext(double y) const {
  if (y < 0.0) return b(0.0) + db(0.0) * y;
  if (y > 1.0) return b(1.0) + db(1.0) * (y - 1.0);
  return b(y);
}

ShearProfile ShearProfile::with_coupling_scale(double s) const {
  ShearProfile p = *this;
  p.scale2_ = scale2_ * s;
  p.max_d2b_ = max_d2b_ * std::abs(s);
  p.name_ = name_ + "*coupling(" + std::to_string(s) + ")";
  return p;
}

ShearProfile certify_profile(std::shared_ptr<const ProfileImpl> impl, std::string name,
                             bool check_consistency) {
  const int n = 2001;
  double mn = HUGE_VAL, mx = 0.0, m2 = 0.0;
  int sgn = 0;
  for (int i = 0; i < n; ++i) {
    double y = static_cast<double>(i) / (n - 1);
    double d = impl->db(y);
    if (!std::isfinite(d) || d == 0.0) fail(ErrorCode::NonMonotone, name + ": b' vanishes or is not finite");
    int s = d > 0 ? 1 : -1;
    if (sgn == 0) sgn = s;
    if (s != sgn) fail(ErrorCode::NonMonotone, name + ": b' changes sign");
    mn = std::min(mn, std::abs(d));
    mx = std::max(mx, std::abs(d));
    m2 = std::max(m2, std::abs(impl->d2b(y)));
  }
  // largest theta with theta/100 <= |b'| <= 1/(100 theta), strictly inside (0, 1/10)
  double theta = std::min(100.0 * mn, 1.0 / (100.0 * mx));
  theta = std::min(theta, 0.1 * (1.0 - 1e-12));
  if (!(theta > 0.0)) fail(ErrorCode::NonMonotone, name + ": no admissible theta");

  if (check_consistency) {
    // centered differences: error should be O(h^2) and shrink by ~4 under halving
    auto defect = [&](double h) {
      double e = 0.0;
      for (int i = 1; i < 100; ++i) {
        double y = std::clamp(i / 100.0, h, 1.0 - h);
        double d1 = (impl->b(y + h) - impl->b(y - h)) / (2 * h);
        double d2 = (impl->db(y + h) - impl->db(y - h)) / (2 * h);
        e = std::max(e, std::abs(d1 - impl->db(y)) / std::max(1.0, std::abs(impl->db(y))));
        e = std::max(e, std::abs(d2 - impl->d2b(y)) / std::max(1.0, m2));
      }
      return e;
    };
    double e1 = defect(1e-3), e2 = defect(5e-4);
    bool ok = (e1 < 1e-9) || (e2 < 0.35 * e1 && e1 < 1e-2);
    if (!ok) fail(ErrorCode::RegularityFail, name + ": derivatives inconsistent with b");
  }

  ShearProfile p;
  p.impl_ = std::move(impl);
  p.name_ = std::move(name);
  p.theta_ = theta;
  p.aleph_ = sgn;
  p.min_db_ = mn;
  p.max_db_ = mx;
  p.max_d2b_ = m2;
  return p;
}

ShearProfile make_couette() { return certify_profile(std::make_shared<Couette>(), "couette"); }

ShearProfile make_sine_perturbed(double a) {
  if (!(std::abs(a) < 1.0)) fail(ErrorCode::NonMonotone, "sine-perturbed needs |a| < 1");
  return certify_profile(std::make_shared<SinePerturbed>(a), "sine-perturbed(" + std::to_string(a) + ")");
}

ShearProfile make_tanh_monotone(double s) {
  if (!(s > 0.0)) fail(ErrorCode::InvalidArgument, "tanh-monotone needs s > 0");
  return certify_profile(std::make_shared<TanhMonotone>(s), "tanh-monotone(" + std::to_string(s) + ")");
}

ShearProfile make_polynomial(const std::vector<double>& coeffs) {
  if (coeffs.size() < 2) fail(ErrorCode::NonMonotone, "polynomial profile needs degree >= 1");
  return certify_profile(std::make_shared<Polynomial>(coeffs), "polynomial");
}

ShearProfile make_tabulated(const std::vector<double>& samples) {
  if (samples.size() < 8) fail(ErrorCode::InvalidArgument, "tabulated profile needs >= 8 samples");
  return certify_profile(std::make_shared<Tabulated>(samples), "tabulated");
}

ShearProfile make_profile(const nlohmann::json& d) {
  if (!d.is_object() || !d.contains("kind")) fail(ErrorCode::ConfigInvalid, "profile needs a kind");
  std::string kind = d.at("kind").get<std::string>();
  ShearProfile p;
  if (kind == "couette")
    p = make_couette();
  else if (kind == "sine-perturbed")
    p = make_sine_perturbed(d.value("a", 0.1));
  else if (kind == "tanh-monotone")
    p = make_tanh_monotone(d.value("s", 2.0));
  else if (kind == "polynomial")
    p = make_polynomial(d.at("coeffs").get<std::vector<double>>());
  else if (kind == "tabulated")
    p = make_tabulated(d.at("values").get<std::vector<double>>());
  else
    fail(ErrorCode::ConfigInvalid, "unknown profile kind " + kind);
  if (d.contains("coupling_scale")) p = p.with_coupling_scale(d.at("coupling_scale").get<double>());
  return p;
}

ShearProfile make_profile(const std::string& s) {
  static const std::regex re(R"(^\s*([a-z\-]+)\s*(\(\s*([-+0-9.eE]+)\s*\))?\s*$)");
  std::smatch m;
  if (!std::regex_match(s, m, re)) fail(ErrorCode::ConfigInvalid, "bad profile descriptor " + s);
  nlohmann::json d;
  d["kind"] = m[1].str();
  if (m[3].matched) {
    double v = std::stod(m[3].str());
    if (d["kind"] == "sine-perturbed") d["a"] = v;
    else if (d["kind"] == "tanh-monotone") d["s"] = v;
    else fail(ErrorCode::ConfigInvalid, "unexpected parameter in " + s);
  }
  return make_profile(d);
}

double b_inverse(const ShearProfile& p, double v) {
  double b0 = p.b(0.0), b1 = p.b(1.0);
  double lo_v = std::min(b0, b1), hi_v = std::max(b0, b1);
  double tol = 1e-14 * std::max(1.0, std::max(std::abs(b0), std::abs(b1)));
  if (!(v >= lo_v - tol && v <= hi_v + tol)) fail(ErrorCode::OutOfRange, "value outside range of b");
  if (v <= lo_v) return b0 < b1 ? 0.0 : 1.0;
  if (v >= hi_v) return b0 < b1 ? 1.0 : 0.0;
  // bracket [lo, hi] with g(lo) < 0 < g(hi) where g = aleph (b - v)
  double s = p.sign_aleph();
  double lo = 0.0, hi = 1.0;
  double y = (v - b0) / (b1 - b0);
  for (int it = 0; it < 200; ++it) {
    double g = s * (p.b(y) - v);
    if (g == 0.0) return y;
    if (g < 0) lo = y; else hi = y;
    double yn = y - g / (s * p.db(y));
    if (!(yn > lo && yn < hi)) yn = 0.5 * (lo + hi);
    if (std::abs(yn - y) < 1e-16 || hi - lo < 1e-16) { y = yn; break; }
    y = yn;
  }
  return y;
}

const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::AcceptanceFailed: return "AcceptanceFailed";
    case ErrorCode::Numerical: return "NumericalFailure";
    case ErrorCode::NonMonotone: return "NonMonotone";
    case ErrorCode::RegularityFail: return "RegularityFail";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::GradingMissing: return "GradingMissing";
    case ErrorCode::NearSingular: return "NearSingularResolvent";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::Rejected: return "Rejected";
    case ErrorCode::TailTooLarge: return "TailTooLarge";
    case ErrorCode::PoorFit: return "PoorFit";
    case ErrorCode::WitnessMismatch: return "WitnessMismatch";
    case ErrorCode::NotInSpace: return "NotInSpace";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::Internal: return "InternalError";
  }
  return "Unknown";
}

}  // namespace idamp
