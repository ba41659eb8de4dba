#pragma once

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "idamp/common.hpp"

namespace idamp {

// Pointwise values of b and its first four derivatives.
struct ProfileImpl {
  virtual ~ProfileImpl() = default;
  virtual double b(double y) const = 0;
  virtual double db(double y) const = 0;
  virtual double d2b(double y) const = 0;
  virtual double d3b(double y) const = 0;
  virtual double d4b(double y) const = 0;
};

class ShearProfile {
 public:
  ShearProfile() = default;

  double b(double y) const { return impl_->b(y); }
  double db(double y) const { return impl_->db(y); }
  double d2b(double y) const { return scale2_ * impl_->d2b(y); }
  double d3b(double y) const { return scale2_ * impl_->d3b(y); }
  double d4b(double y) const { return scale2_ * impl_->d4b(y); }

  // b continued linearly outside [0,1] with the endpoint slopes.
  double b_ext(double y) const;

  double theta() const { return theta_; }
  int sign_aleph() const { return aleph_; }
  const std::string& name() const { return name_; }
  double min_abs_db() const { return min_db_; }
  double max_abs_db() const { return max_db_; }
  double max_abs_d2b() const { return max_d2b_; }
  bool shear_free() const { return max_d2b_ == 0.0; }
  bool synthetic() const { return scale2_ != 1.0; }

  // Copy whose coupling b'' (and its derivatives) is multiplied by s. The
  // result is no longer consistent with b; it exists to plant eigenvalues.
  ShearProfile with_coupling_scale(double s) const;

  friend ShearProfile certify_profile(std::shared_ptr<const ProfileImpl>, std::string, bool);

 private:
  std::shared_ptr<const ProfileImpl> impl_;
  std::string name_;
  double theta_ = 0.0;
  int aleph_ = 1;
  double min_db_ = 0.0, max_db_ = 0.0, max_d2b_ = 0.0;
  double scale2_ = 1.0;
};

// Samples b' and b'' and certifies monotonicity and finite-difference
// consistency. Throws NonMonotone / RegularityFail.
ShearProfile certify_profile(std::shared_ptr<const ProfileImpl> impl, std::string name,
                             bool check_consistency = true);

ShearProfile make_couette();
ShearProfile make_sine_perturbed(double a);
ShearProfile make_tanh_monotone(double s);
// b(y) = sum c_j y^j
ShearProfile make_polynomial(const std::vector<double>& coeffs);
// Uniform samples of b on [0,1], interpolated by a cardinal quintic B-spline.
ShearProfile make_tabulated(const std::vector<double>& samples);

// {"kind": "couette"} | {"kind":"sine-perturbed","a":0.1} | {"kind":"tanh-monotone","s":2}
// | {"kind":"polynomial","coeffs":[...]} | {"kind":"tabulated","values":[...]}
// plus optional "coupling_scale".
ShearProfile make_profile(const nlohmann::json& descriptor);
// Short string form: "couette", "sine-perturbed(0.1)", "tanh-monotone(2)".
ShearProfile make_profile(const std::string& descriptor);

// y in [0,1] with b(y) = v. Throws OutOfRange.
double b_inverse(const ShearProfile& p, double v);

// Fourier convention in x: omega_k = int_0^{2pi} omega e^{-ikx} dx and
// omega = c0 * sum_k omega_k e^{ikx}.
struct FourierConvention {
  static constexpr double c0 = 1.0 / (2.0 * kPi);
};

}  // namespace idamp
