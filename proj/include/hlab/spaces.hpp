#pragma once

#include <map>
#include <string>
#include <vector>

#include "hlab/types.hpp"

namespace hlab {

// Model spaces live on the hyperboloid {<x,x>_J = -1, x0 > 0} in Minkowski
// R^{1,n}, coordinatized globally by xi in R^n via x(xi) = (sqrt(1+|xi|^2), xi).
// A perturbed space multiplies the metric by e^{2u} where u is a finite
// cosine series under a smooth compactly supported cutoff in the chart.

struct CosineTerm {
  double amplitude = 0;
  Vec wave;      // size n
  double phase = 0;
};

struct Potential {
  double bump_radius = 2.0;
  std::vector<CosineTerm> terms;
  bool trivial() const { return terms.empty(); }
};

enum class SpaceKind { Hyperbolic, PerturbedHyperbolic };

struct ModelSpace {
  SpaceKind kind = SpaceKind::Hyperbolic;
  int n = 3;
  Potential potential;
  double chart_bound = 1e4;  // max hyperbolic distance from the chart origin

  bool perturbed() const { return kind == SpaceKind::PerturbedHyperbolic; }

  std::map<std::string, std::string> to_config() const;
  static ModelSpace from_config(const std::map<std::string, std::string>& kv);
};

/// Unit tangent vector on the model space. x is a hyperboloid point and
/// g_space(v, v) = 1, <x, v>_J = 0.
struct PhasePoint {
  Vec x, v;
};

/// PhasePoint completed to a metric-orthonormal tangent frame
/// (v, e_2, ..., e_n); rows of `frame` are v, e_2, ..., e_n.
struct FramePoint {
  Vec x;
  Mat frame;  // n x (n+1)

  PhasePoint phase() const { return {x, frame.row(0).transpose()}; }
  int n() const { return int(frame.rows()); }
  /// The (n+1)x(n+1) matrix with rows x, v, e_2..e_n. For the unperturbed
  /// space this lies in SO0(1,n).
  Mat group_matrix() const;
};

/// Components of a tangent vector of SM in the Sasaki splitting
/// R X + H + V: flow component a, horizontal part h, vertical part k
/// (both ambient normal vectors at the base point).
struct TangentSplit {
  double a = 0;
  Vec h, k;
};

/// A tangent vector of SM at (x, v), as a pair of ambient derivatives.
struct SMTangent {
  Vec dx, dv;
};

// -- ambient Minkowski helpers --
double mink(const Vec& a, const Vec& b);
Vec project_tangent(const Vec& x, const Vec& w);  // J-orthogonal projection

// -- metric --
double potential_at(const ModelSpace& s, const Vec& x);
double metric(const ModelSpace& s, const Vec& x, const Vec& a, const Vec& b);
double norm(const ModelSpace& s, const Vec& x, const Vec& a);

PhasePoint make_phase_point(const ModelSpace& s, Vec x, Vec v);
double phase_residual(const ModelSpace& s, const PhasePoint& p);

/// Deterministic orthonormal completion of (x, v) to a FramePoint.
FramePoint canonical_frame(const ModelSpace& s, const PhasePoint& p);
double frame_residual(const ModelSpace& s, const FramePoint& f);

/// Riemann curvature R(u,v)w at x, with the convention
/// R(u,v)w = grad_u grad_v w - grad_v grad_u w - grad_{[u,v]} w,
/// so that sectional curvature is g(R(u,v)v, u) for orthonormal u, v.
Vec riemann(const ModelSpace& s, const Vec& x, const Vec& u, const Vec& v,
            const Vec& w);

double sectional(const ModelSpace& s, const Vec& x, const Vec& u, const Vec& v);

struct PinchingReport {
  double delta = 1;     // min |kappa| after normalizing max |kappa| to 1
  double beta = 0;      // delta^{-1/2} - 1
  double kappa_min = -1, kappa_max = -1;
  int samples = 0;
};

PinchingReport pinching(const ModelSpace& s, int samples, uint64_t seed);

/// Bunching constant from the pinching value.
inline double bunching_beta(double delta) { return 1.0 / std::sqrt(delta) - 1.0; }

TangentSplit sasaki_split(const ModelSpace& s, const PhasePoint& p,
                          const SMTangent& xi);
SMTangent sasaki_reconstruct(const ModelSpace& s, const PhasePoint& p,
                             const TangentSplit& split);
double sasaki_norm(const ModelSpace& s, const PhasePoint& p,
                   const TangentSplit& t);

/// d(lambda)(xi, eta) = g(h_xi, k_eta) - g(k_xi, h_eta); restricted to
/// E_s x E_u this is the nondegenerate contact pairing.
double liouville_pairing(const ModelSpace& s, const PhasePoint& p,
                         const TangentSplit& xi, const TangentSplit& eta);

// ---------------------------------------------------------------------------
// Conformal chart engine.
//
// Evaluates the perturbed metric, its Christoffel symbols and their first
// derivatives analytically in chart coordinates. An optional anchor isometry
// A (of the unperturbed structure) lets long orbits run in re-centered local
// coordinates: local points are x_loc with global position x_loc * A, and the
// pulled-back metric is e^{2u(x_loc A)} g_hyp since g_hyp is A-invariant.
// ---------------------------------------------------------------------------

class ConformalChart {
 public:
  ConformalChart(const ModelSpace& s, Mat anchor);
  explicit ConformalChart(const ModelSpace& s)
      : ConformalChart(s, Mat::Identity(s.n + 1, s.n + 1)) {}

  const ModelSpace& space() const { return *space_; }
  const Mat& anchor() const { return anchor_; }

  int n() const { return space_->n; }

  // chart <-> local-ambient conversions
  Vec chart_of(const Vec& x_loc) const;                      // xi = spatial part
  Vec point_of(const Vec& xi) const;                         // hyperboloid lift
  Vec push_tangent(const Vec& xi, const Vec& dxi) const;     // to ambient
  Vec pull_tangent(const Vec& x_loc, const Vec& w) const;    // to chart

  // potential of the pulled-back conformal factor and derivatives, all in
  // local chart coordinates
  double u(const Vec& xi) const;
  Vec du(const Vec& xi) const;
  Mat d2u(const Vec& xi) const;

  Mat metric(const Vec& xi) const;
  std::vector<Mat> dmetric(const Vec& xi) const;  // dmetric[k](i,j) = d_k g_ij

  /// Gamma[m](i,j) = Gamma^m_{ij}
  std::vector<Mat> christoffel(const Vec& xi) const;
  /// dGamma[l][m](i,j) = d_l Gamma^m_{ij}
  std::vector<std::vector<Mat>> dchristoffel(const Vec& xi) const;

  /// R(u,v)w in chart coordinates at xi.
  Vec riemann_chart(const Vec& xi, const Vec& u, const Vec& v, const Vec& w) const;

  /// Re-anchor so that the given local point moves to the chart origin;
  /// returns the local-coordinate change matrix T with new_loc = old_loc * T^{-1}
  /// ... (handled internally: use recenter() below).
  void recenter(const Vec& x_loc, Mat* local_change);

 private:
  const ModelSpace* space_;
  Mat anchor_;

  // global-position machinery for the potential
  double global_x0(const Vec& x_loc) const;
  struct PotEval {
    double value;
    Vec grad;    // d/d xi_loc
    Mat hess;    // d^2/d xi_loc^2
  };
  PotEval eval_potential(const Vec& xi, int order) const;
};

/// Transvection of the unperturbed hyperbolic structure taking the
/// hyperboloid origin to x (row-vector convention: origin * T = x).
Mat transvection_to(const Vec& x);

/// Levi-Civita parallel transport (unperturbed metric) of tangent vector u
/// from x to y along the connecting geodesic; closed form.
Vec lc_transport_hyperbolic(const Vec& x, const Vec& y, const Vec& u);

double hyperbolic_distance(const Vec& x, const Vec& y);

}  // namespace hlab
