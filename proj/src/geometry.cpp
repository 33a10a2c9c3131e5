#include "hypertree/geometry.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "hypertree/errors.hpp"

namespace hypertree {

namespace {

void require_same_dim(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw InputError("dimension mismatch: " + std::to_string(u.size()) + " vs " +
                     std::to_string(v.size()));
  }
}

// gamma - 1 for the distance formula; always >= 0.
double distance_excess(std::span<const double> u, std::span<const double> v, double uu,
                       double vv) {
  double diff_sq = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double t = u[k] - v[k];
    diff_sq += t * t;
  }
  const double z = 2.0 * diff_sq / ((1.0 - uu) * (1.0 - vv));
  return z < 0.0 ? 0.0 : z;
}

// arcosh(1 + z) without forming 1 + z.
double arcosh1p(double z) { return std::log1p(z + std::sqrt(z * (z + 2.0))); }

}  // namespace

PoincarePoint::PoincarePoint(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.size() < 2) {
    throw InputError("Poincare points need dimension >= 2, got " +
                     std::to_string(coords_.size()));
  }
  if (!(squared_norm(coords_) < 1.0)) {
    throw InputError("point lies outside the open unit ball");
  }
}

PoincarePoint PoincarePoint::origin(std::size_t dim) {
  return PoincarePoint(std::vector<double>(dim, 0.0));
}

double squared_norm(std::span<const double> u) {
  return std::inner_product(u.begin(), u.end(), u.begin(), 0.0);
}

double poincare_distance(std::span<const double> u, std::span<const double> v) {
  require_same_dim(u, v);
  return arcosh1p(distance_excess(u, v, squared_norm(u), squared_norm(v)));
}

double hyperbolic_norm(std::span<const double> u) {
  return 2.0 * std::atanh(std::sqrt(squared_norm(u)));
}

void dilate_inplace(std::span<double> u, double k, double eps) {
  if (!(k > 0.0)) {
    throw InputError("dilation factor must be positive, got " + std::to_string(k));
  }
  const double a = std::sqrt(squared_norm(u));
  if (a == 0.0 || k == 1.0) {
    project_to_ball_inplace(u, eps);
    return;
  }
  const double scale = std::tanh(k * std::atanh(a)) / a;
  for (double& x : u) {
    x *= scale;
  }
  project_to_ball_inplace(u, eps);
}

std::vector<double> dilate(std::span<const double> u, double k, double eps) {
  std::vector<double> out(u.begin(), u.end());
  dilate_inplace(out, k, eps);
  return out;
}

void accumulate_distance_gradient(std::span<const double> u, std::span<const double> v,
                                  double scale, std::span<double> du, std::span<double> dv) {
  const double uu = squared_norm(u);
  const double vv = squared_norm(v);
  const double z = distance_excess(u, v, uu, vv);
  if (z < 1e-12) {
    return;
  }
  const double uv = std::inner_product(u.begin(), u.end(), v.begin(), 0.0);
  const double alpha = 1.0 - uu;
  const double beta = 1.0 - vv;
  const double root = std::sqrt(z * (z + 2.0));  // sqrt(gamma^2 - 1)

  const double fu = scale * 4.0 / (beta * root);
  const double cu = (vv - 2.0 * uv + 1.0) / (alpha * alpha);
  const double fv = scale * 4.0 / (alpha * root);
  const double cv = (uu - 2.0 * uv + 1.0) / (beta * beta);
  for (std::size_t k = 0; k < u.size(); ++k) {
    du[k] += fu * (cu * u[k] - v[k] / alpha);
    dv[k] += fv * (cv * v[k] - u[k] / beta);
  }
}

DistanceGradient distance_gradient(std::span<const double> u, std::span<const double> v) {
  require_same_dim(u, v);
  DistanceGradient g{std::vector<double>(u.size(), 0.0), std::vector<double>(u.size(), 0.0)};
  accumulate_distance_gradient(u, v, 1.0, g.du, g.dv);
  return g;
}

std::vector<double> riemannian_rescale(std::span<const double> theta,
                                       std::span<const double> euclid_grad) {
  require_same_dim(theta, euclid_grad);
  const double s = 1.0 - squared_norm(theta);
  const double factor = s * s / 4.0;
  std::vector<double> out(euclid_grad.begin(), euclid_grad.end());
  for (double& g : out) {
    g *= factor;
  }
  return out;
}

void project_to_ball_inplace(std::span<double> u, double eps) {
  const double limit = 1.0 - eps;
  const double norm = std::sqrt(squared_norm(u));
  if (norm <= limit) {
    return;
  }
  const double scale = limit / norm;
  for (double& x : u) {
    x *= scale;
  }
}

std::vector<double> project_to_ball(std::span<const double> u, double eps) {
  std::vector<double> out(u.begin(), u.end());
  project_to_ball_inplace(out, eps);
  return out;
}

InversionParams inversion_to_origin(std::span<const double> a) {
  const double aa = squared_norm(a);
  if (aa == 0.0) {
    return {};
  }
  InversionParams p;
  p.center.assign(a.begin(), a.end());
  for (double& c : p.center) {
    c /= aa;
  }
  p.radius_sq = 1.0 / aa - 1.0;
  return p;
}

std::vector<double> apply_inversion(const InversionParams& p, std::span<const double> x) {
  if (p.is_identity()) {
    return {x.begin(), x.end()};
  }
  require_same_dim(p.center, x);
  std::vector<double> diff(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    diff[k] = x[k] - p.center[k];
  }
  const double n2 = squared_norm(diff);
  if (n2 == 0.0) {
    throw std::logic_error("inversion evaluated at its own center");
  }
  const double s = p.radius_sq / n2;
  for (std::size_t k = 0; k < x.size(); ++k) {
    diff[k] = p.center[k] + s * diff[k];
  }
  return diff;
}

}  // namespace hypertree
