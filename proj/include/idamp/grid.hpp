#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "idamp/common.hpp"

namespace idamp {

// Gauss-Legendre rule on [-1,1] with barycentric weights and the nodal
// differentiation matrices of the degree q-1 interpolant.
struct GaussRule {
  int q = 0;
  std::vector<double> x, w, bary;
  Eigen::MatrixXd D, D2;
  // J(i,j) = integral of the j-th basis polynomial from -1 to x_i
  Eigen::MatrixXd J;

  // Lagrange basis values at s (size q).
  void basis(double s, double* out) const;
  // Integrals of the basis polynomials from -1 to s.
  void basis_integral(double s, double* out) const;
};

std::shared_ptr<const GaussRule> gauss_rule(int q);

// Gauss rule on [0,1] for the weight -log(s).
struct LogGaussRule {
  std::vector<double> x, w;
};
std::shared_ptr<const LogGaussRule> log_gauss_rule(int n);

// Panelized Gauss-Legendre grid on [0,1].
class ChannelGrid {
 public:
  ChannelGrid() = default;

  static ChannelGrid uniform(int panels, int q);
  static ChannelGrid from_breakpoints(std::vector<double> bp, int q);
  // Uniform base panels plus dyadic grading (ratio 1/2) toward each center,
  // from about the base width down to h_floor.
  static ChannelGrid graded(int base_panels, int q, const std::vector<double>& centers, double h_floor);
  // Graded about a single center with the base count chosen so that the node
  // count does not exceed n_total.
  static ChannelGrid with_total(int n_total, int q, double center, double h_floor);

  int q() const { return q_; }
  int panels() const { return static_cast<int>(bp_.size()) - 1; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& breakpoints() const { return bp_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  double node(int i) const { return nodes_[i]; }
  double weight(int i) const { return weights_[i]; }
  double a(int p) const { return bp_[p]; }
  double b(int p) const { return bp_[p + 1]; }
  double h(int p) const { return bp_[p + 1] - bp_[p]; }
  const GaussRule& rule() const { return *rule_; }
  std::optional<double> graded_about() const { return graded_about_; }
  double h_min() const;

  // Panel containing y (right-closed for the last panel).
  int locate(double y) const;
  // Reference coordinate of y inside panel p.
  double to_ref(int p, double y) const { return 2.0 * (y - bp_[p]) / h(p) - 1.0; }

  // Basis weights over the q nodes of the panel containing y for the
  // derivative of order d (0, 1 or 2) of the panel interpolant.
  int basis_row(double y, int d, double* out) const;

  cplx interpolate(const CVector& v, double y, int d = 0) const;
  CVector interpolate(const CVector& v, const std::vector<double>& ys, int d = 0) const;
  // Panel-wise spectral derivative at the nodes.
  CVector differentiate(const CVector& v, int order = 1) const;
  cplx integrate(const CVector& v) const;

  template <class F>
  CVector sample(F&& f) const {
    CVector v(size());
    for (int i = 0; i < size(); ++i) v[i] = f(nodes_[i]);
    return v;
  }

 private:
  void build();

  int q_ = 0;
  std::shared_ptr<const GaussRule> rule_;
  std::vector<double> bp_, nodes_, weights_;
  std::optional<double> graded_about_;
};

// Dyadic breakpoints toward the centers (see ChannelGrid::graded).
std::vector<double> graded_breakpoints(int base_panels, const std::vector<double>& centers, double h_floor);

}  // namespace idamp
