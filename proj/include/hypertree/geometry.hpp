#pragma once

#include <span>
#include <vector>

namespace hypertree {

// Margin kept between every stored point and the unit sphere.
inline constexpr double kDefaultEps = 1e-5;

/// A point strictly inside the unit ball, dimension >= 2.
class PoincarePoint {
 public:
  explicit PoincarePoint(std::vector<double> coords);

  static PoincarePoint origin(std::size_t dim);

  std::span<const double> coords() const { return coords_; }
  std::size_t dim() const { return coords_.size(); }
  operator std::span<const double>() const { return coords_; }

 private:
  std::vector<double> coords_;
};

/// Sphere inversion f(x) = C + radius_sq * (x - C) / |x - C|^2. The sphere is
/// orthogonal to the unit sphere, so f restricted to the ball is an isometry.
/// An empty center is the identity map.
struct InversionParams {
  std::vector<double> center;
  double radius_sq = 0.0;

  bool is_identity() const { return center.empty(); }
};

double squared_norm(std::span<const double> u);

/// Poincare-ball distance arcosh(1 + 2|u-v|^2 / ((1-|u|^2)(1-|v|^2))).
/// Throws InputError on a dimension mismatch.
double poincare_distance(std::span<const double> u, std::span<const double> v);

/// Distance from the origin, 2 artanh |u|.
double hyperbolic_norm(std::span<const double> u);

/// Rescales u so that its hyperbolic norm is multiplied by k, then projects
/// back into the ball with margin eps. Throws InputError for k <= 0.
std::vector<double> dilate(std::span<const double> u, double k, double eps = kDefaultEps);
void dilate_inplace(std::span<double> u, double k, double eps = kDefaultEps);

struct DistanceGradient {
  std::vector<double> du;
  std::vector<double> dv;
};

/// Euclidean partials of poincare_distance with respect to both arguments.
/// Coincident points (gamma within 1e-12 of 1) give zero vectors.
DistanceGradient distance_gradient(std::span<const double> u, std::span<const double> v);

/// Hot-path variant: adds scale * dd/du into du and scale * dd/dv into dv.
void accumulate_distance_gradient(std::span<const double> u, std::span<const double> v,
                                  double scale, std::span<double> du, std::span<double> dv);

/// Applies the inverse Poincare metric, (1 - |theta|^2)^2 / 4, to a Euclidean gradient.
std::vector<double> riemannian_rescale(std::span<const double> theta,
                                       std::span<const double> euclid_grad);

/// Leaves u alone when |u| <= 1 - eps, otherwise scales it to norm exactly 1 - eps.
std::vector<double> project_to_ball(std::span<const double> u, double eps = kDefaultEps);
void project_to_ball_inplace(std::span<double> u, double eps = kDefaultEps);

/// The inversion mapping a to the origin (identity when a is the origin).
InversionParams inversion_to_origin(std::span<const double> a);

std::vector<double> apply_inversion(const InversionParams& p, std::span<const double> x);

}  // namespace hypertree
