#include "hlab/spaces.hpp"

#include <cmath>
#include <sstream>

namespace hlab {

double mink(const Vec& a, const Vec& b) {
  double s = -a(0) * b(0);
  for (int i = 1; i < a.size(); ++i) s += a(i) * b(i);
  return s;
}

Vec project_tangent(const Vec& x, const Vec& w) {
  return w + mink(w, x) * x;  // <x,x>_J = -1
}

namespace {

// smooth cutoff: 1 at the center, 0 for s >= 1 (s = |xi|^2 / r^2)
struct Bump {
  double b = 0, db = 0, d2b = 0;  // derivatives wrt s
};
Bump bump_eval(double s) {
  Bump out;
  if (s >= 0.985) return out;
  double inv = 1.0 / (1.0 - s);
  out.b = std::exp(1.0 - inv);
  out.db = -out.b * inv * inv;
  out.d2b = out.b * (inv * inv * inv * inv - 2.0 * inv * inv * inv);
  return out;
}

struct SeriesEval {
  double value = 0;
  Vec grad;
  Mat hess;
};

// u(xi) = bump(|xi|^2/r^2) * sum a cos(k.xi + phi), with derivatives
SeriesEval series_eval(const Potential& pot, const Vec& xi, int order) {
  const int n = int(xi.size());
  SeriesEval out;
  out.grad = Vec::Zero(n);
  out.hess = Mat::Zero(n, n);
  if (pot.trivial()) return out;
  double r2 = pot.bump_radius * pot.bump_radius;
  double s = xi.squaredNorm() / r2;
  Bump b = bump_eval(s);
  if (b.b == 0.0) return out;
  double c = 0;
  Vec dc = Vec::Zero(n);
  Mat d2c = Mat::Zero(n, n);
  for (const auto& t : pot.terms) {
    double ph = t.wave.dot(xi) + t.phase;
    double co = std::cos(ph), si = std::sin(ph);
    c += t.amplitude * co;
    if (order >= 1) dc -= t.amplitude * si * t.wave;
    if (order >= 2) d2c -= t.amplitude * co * (t.wave * t.wave.transpose());
  }
  Vec ds = (2.0 / r2) * xi;
  out.value = b.b * c;
  if (order >= 1) out.grad = b.db * c * ds + b.b * dc;
  if (order >= 2) {
    out.hess = b.d2b * c * (ds * ds.transpose()) +
               b.db * c * (2.0 / r2) * Mat::Identity(n, n) +
               b.db * (ds * dc.transpose() + dc * ds.transpose()) + b.b * d2c;
  }
  return out;
}

Vec lift_point(const Vec& xi) {
  Vec x(xi.size() + 1);
  x(0) = std::sqrt(1.0 + xi.squaredNorm());
  x.tail(xi.size()) = xi;
  return x;
}

}  // namespace

double potential_at(const ModelSpace& s, const Vec& x) {
  if (!s.perturbed()) return 0.0;
  return series_eval(s.potential, x.tail(s.n), 0).value;
}

double metric(const ModelSpace& s, const Vec& x, const Vec& a, const Vec& b) {
  double base = mink(a, b);
  if (!s.perturbed()) return base;
  return std::exp(2.0 * potential_at(s, x)) * base;
}

double norm(const ModelSpace& s, const Vec& x, const Vec& a) {
  return std::sqrt(std::max(0.0, metric(s, x, a, a)));
}

PhasePoint make_phase_point(const ModelSpace& s, Vec x, Vec v) {
  require(x.size() == s.n + 1 && v.size() == s.n + 1, "phase point size");
  double xn = mink(x, x);
  require(xn < 0, "point not timelike");
  x /= std::sqrt(-xn);
  if (x(0) < 0) x = -x;
  v = project_tangent(x, v);
  double vn = norm(s, x, v);
  require(vn > 1e-12, "degenerate tangent vector");
  v /= vn;
  return {x, v};
}

double phase_residual(const ModelSpace& s, const PhasePoint& p) {
  double r1 = std::abs(mink(p.x, p.x) + 1.0);
  double r2 = std::abs(metric(s, p.x, p.v, p.v) - 1.0);
  double r3 = std::abs(mink(p.x, p.v));
  return std::max({r1, r2, r3});
}

FramePoint canonical_frame(const ModelSpace& s, const PhasePoint& p) {
  const int n = s.n;
  FramePoint f;
  f.x = p.x;
  f.frame = Mat::Zero(n, n + 1);
  f.frame.row(0) = p.v.transpose();
  int row = 1;
  for (int seed = 0; seed <= n && row < n; ++seed) {
    Vec cand = Vec::Zero(n + 1);
    cand(seed) = 1.0;
    cand = project_tangent(p.x, cand);
    for (int k = 0; k < row; ++k) {
      Vec ek = f.frame.row(k).transpose();
      cand -= metric(s, p.x, cand, ek) / metric(s, p.x, ek, ek) * ek;
    }
    double nn = norm(s, p.x, cand);
    if (nn < 1e-8) continue;
    f.frame.row(row++) = (cand / nn).transpose();
  }
  require(row == n, "frame completion failed");
  return f;
}

double frame_residual(const ModelSpace& s, const FramePoint& f) {
  const int n = f.n();
  double worst = std::abs(mink(f.x, f.x) + 1.0);
  for (int i = 0; i < n; ++i) {
    worst = std::max(worst, std::abs(mink(f.x, f.frame.row(i).transpose())));
    for (int j = 0; j < n; ++j) {
      double want = (i == j) ? 1.0 : 0.0;
      worst = std::max(
          worst, std::abs(metric(s, f.x, f.frame.row(i).transpose(),
                                 f.frame.row(j).transpose()) -
                          want));
    }
  }
  return worst;
}

Mat FramePoint::group_matrix() const {
  const int m = int(frame.cols());
  Mat g(m, m);
  g.row(0) = x.transpose();
  g.bottomRows(m - 1) = frame;
  return g;
}

Vec riemann(const ModelSpace& s, const Vec& x, const Vec& u, const Vec& v,
            const Vec& w) {
  if (!s.perturbed()) {
    // constant curvature -1 closed form
    return -(mink(v, w) * u - mink(u, w) * v);
  }
  Vec xi = x.tail(s.n);
  if (xi.norm() > s.chart_bound)
    throw NumericError("chart-exit", "point outside the perturbation chart");
  ConformalChart chart(s);
  Vec uc = chart.pull_tangent(x, u), vc = chart.pull_tangent(x, v),
      wc = chart.pull_tangent(x, w);
  Vec rc = chart.riemann_chart(xi, uc, vc, wc);
  return chart.push_tangent(xi, rc);
}

double sectional(const ModelSpace& s, const Vec& x, const Vec& u, const Vec& v) {
  Vec ruvv = riemann(s, x, u, v, v);
  double num = metric(s, x, ruvv, u);
  double den = metric(s, x, u, u) * metric(s, x, v, v) -
               metric(s, x, u, v) * metric(s, x, u, v);
  return num / den;
}

PinchingReport pinching(const ModelSpace& s, int samples, uint64_t seed) {
  Rng rng(seed);
  PinchingReport rep;
  rep.samples = samples;
  double kmin = 1e300, kmax = -1e300;
  double radius = s.perturbed() ? 1.3 * s.potential.bump_radius : 2.0;
  for (int it = 0; it < samples; ++it) {
    Vec xi = rng.normal_vec(s.n);
    xi *= radius * std::pow(rng.uniform(), 1.0 / s.n) / std::max(xi.norm(), 1e-12);
    Vec x = lift_point(xi);
    Vec a = project_tangent(x, rng.normal_vec(s.n + 1));
    Vec b = project_tangent(x, rng.normal_vec(s.n + 1));
    b -= mink(a, b) / mink(a, a) * a;
    if (mink(a, a) < 1e-10 || mink(b, b) < 1e-10) continue;
    double k = sectional(s, x, a, b);
    kmin = std::min(kmin, k);
    kmax = std::max(kmax, k);
  }
  rep.kappa_min = kmin;
  rep.kappa_max = kmax;
  // after normalizing max |kappa| to 1, delta is the least |kappa|
  rep.delta = std::abs(kmax) / std::abs(kmin);
  rep.beta = bunching_beta(rep.delta);
  return rep;
}

namespace {

Vec space_gradient(const ModelSpace& s, const Vec& x) {
  // gradient of the potential wrt the unperturbed metric
  if (!s.perturbed()) return Vec::Zero(x.size());
  SeriesEval se = series_eval(s.potential, x.tail(s.n), 1);
  Vec amb = Vec::Zero(x.size());
  amb.tail(s.n) = se.grad;  // J * (0, grad)^T = (0, grad)^T
  return project_tangent(x, amb);
}

}  // namespace

TangentSplit sasaki_split(const ModelSpace& s, const PhasePoint& p,
                          const SMTangent& xi) {
  TangentSplit t;
  Vec dx = project_tangent(p.x, xi.dx);
  t.a = metric(s, p.x, dx, p.v);
  t.h = dx - t.a * p.v;
  // K = covariant derivative of v along the variation
  Vec kvec = xi.dv + mink(xi.dv, p.x) * p.x;  // tangential part
  kvec += mink(p.v, dx) * p.x;                // second fundamental form term
  kvec = project_tangent(p.x, kvec);
  if (s.perturbed()) {
    SeriesEval se = series_eval(s.potential, p.x.tail(s.n), 1);
    Vec grad = space_gradient(s, p.x);
    double du_dx = se.grad.dot(dx.tail(s.n));
    double du_v = se.grad.dot(p.v.tail(s.n));
    kvec += du_dx * p.v + du_v * dx - mink(dx, p.v) * grad;
  }
  // remove any flow component caused by norm drift in the input
  t.k = kvec - metric(s, p.x, kvec, p.v) / metric(s, p.x, p.v, p.v) * p.v;
  return t;
}

SMTangent sasaki_reconstruct(const ModelSpace& s, const PhasePoint& p,
                             const TangentSplit& split) {
  SMTangent xi;
  xi.dx = split.a * p.v + split.h;
  Vec kvec = split.k;
  if (s.perturbed()) {
    SeriesEval se = series_eval(s.potential, p.x.tail(s.n), 1);
    Vec grad = space_gradient(s, p.x);
    double du_dx = se.grad.dot(xi.dx.tail(s.n));
    double du_v = se.grad.dot(p.v.tail(s.n));
    kvec = kvec - (du_dx * p.v + du_v * xi.dx - mink(xi.dx, p.v) * grad);
  }
  xi.dv = kvec - mink(p.v, xi.dx) * p.x;
  return xi;
}

double sasaki_norm(const ModelSpace& s, const PhasePoint& p,
                   const TangentSplit& t) {
  return std::sqrt(t.a * t.a + metric(s, p.x, t.h, t.h) +
                   metric(s, p.x, t.k, t.k));
}

double liouville_pairing(const ModelSpace& s, const PhasePoint& p,
                         const TangentSplit& xi, const TangentSplit& eta) {
  return metric(s, p.x, xi.h, eta.k) - metric(s, p.x, xi.k, eta.h);
}

// --------------------------------------------------------------------------
// ConformalChart
// --------------------------------------------------------------------------

ConformalChart::ConformalChart(const ModelSpace& s, Mat anchor)
    : space_(&s), anchor_(std::move(anchor)) {
  require(anchor_.rows() == s.n + 1 && anchor_.cols() == s.n + 1,
          "anchor size mismatch");
}

Vec ConformalChart::chart_of(const Vec& x_loc) const { return x_loc.tail(n()); }

Vec ConformalChart::point_of(const Vec& xi) const { return lift_point(xi); }

Vec ConformalChart::push_tangent(const Vec& xi, const Vec& dxi) const {
  Vec w(n() + 1);
  w(0) = xi.dot(dxi) / std::sqrt(1.0 + xi.squaredNorm());
  w.tail(n()) = dxi;
  return w;
}

Vec ConformalChart::pull_tangent(const Vec& /*x_loc*/, const Vec& w) const {
  return w.tail(n());
}

double ConformalChart::global_x0(const Vec& x_loc) const {
  return anchor_.row(0).dot(x_loc);
}

ConformalChart::PotEval ConformalChart::eval_potential(const Vec& xi,
                                                       int order) const {
  PotEval out{0.0, Vec::Zero(n()), Mat::Zero(n(), n())};
  if (!space_->perturbed()) return out;
  Vec x_loc = lift_point(xi);
  const Potential& pot = space_->potential;
  double r = pot.bump_radius;
  double x0g = global_x0(x_loc);
  if (x0g > std::sqrt(1.0 + r * r) + 1e-9) return out;  // outside the bump
  if (x0g > std::cosh(space_->chart_bound))
    throw NumericError("chart-exit", "orbit left the configured chart");
  // global chart coordinate and its derivatives wrt local xi
  Vec xg = (anchor_ * x_loc).tail(n());
  double s0 = std::sqrt(1.0 + xi.squaredNorm());
  Vec b0 = anchor_.col(0).tail(n());
  Mat m = anchor_.block(1, 1, n(), n());
  Mat jac = b0 * (xi.transpose() / s0) + m;
  SeriesEval se = series_eval(pot, xg, order);
  out.value = se.value;
  if (order >= 1) out.grad = jac.transpose() * se.grad;
  if (order >= 2) {
    out.hess = jac.transpose() * se.hess * jac;
    double gb = se.grad.dot(b0);
    out.hess += gb * (Mat::Identity(n(), n()) / s0 -
                      (xi * xi.transpose()) / (s0 * s0 * s0));
  }
  return out;
}

double ConformalChart::u(const Vec& xi) const { return eval_potential(xi, 0).value; }
Vec ConformalChart::du(const Vec& xi) const { return eval_potential(xi, 1).grad; }
Mat ConformalChart::d2u(const Vec& xi) const { return eval_potential(xi, 2).hess; }

namespace {

// base hyperboloid chart metric and derivatives
Mat base_metric(const Vec& xi) {
  const int n = int(xi.size());
  double w = 1.0 + xi.squaredNorm();
  return Mat::Identity(n, n) - (xi * xi.transpose()) / w;
}

std::vector<Mat> base_dmetric(const Vec& xi) {
  const int n = int(xi.size());
  double w = 1.0 + xi.squaredNorm();
  std::vector<Mat> d(n, Mat::Zero(n, n));
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = 0;
        if (i == k) v -= xi(j) / w;
        if (j == k) v -= xi(i) / w;
        v += 2.0 * xi(i) * xi(j) * xi(k) / (w * w);
        d[k](i, j) = v;
      }
  }
  return d;
}

std::vector<std::vector<Mat>> base_d2metric(const Vec& xi) {
  const int n = int(xi.size());
  double w = 1.0 + xi.squaredNorm();
  std::vector<std::vector<Mat>> dd(n, std::vector<Mat>(n, Mat::Zero(n, n)));
  auto kron = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double v = -(kron(i, k) * kron(j, l) + kron(j, k) * kron(i, l)) / w;
          v += 2.0 * xi(l) * (kron(i, k) * xi(j) + kron(j, k) * xi(i)) / (w * w);
          v += 2.0 * xi(k) * (kron(i, l) * xi(j) + kron(j, l) * xi(i)) / (w * w);
          v += 2.0 * kron(k, l) * xi(i) * xi(j) / (w * w);
          v -= 8.0 * xi(i) * xi(j) * xi(k) * xi(l) / (w * w * w);
          dd[l][k](i, j) = v;
        }
  return dd;
}

}  // namespace

Mat ConformalChart::metric(const Vec& xi) const {
  double e2u = std::exp(2.0 * u(xi));
  return e2u * base_metric(xi);
}

std::vector<Mat> ConformalChart::dmetric(const Vec& xi) const {
  PotEval pe = eval_potential(xi, 1);
  double e2u = std::exp(2.0 * pe.value);
  Mat g0 = base_metric(xi);
  auto dg0 = base_dmetric(xi);
  std::vector<Mat> d(n());
  for (int k = 0; k < n(); ++k)
    d[k] = e2u * (2.0 * pe.grad(k) * g0 + dg0[k]);
  return d;
}

std::vector<Mat> ConformalChart::christoffel(const Vec& xi) const {
  auto dg = dmetric(xi);
  Mat ginv = metric(xi).inverse();
  std::vector<Mat> gamma(n(), Mat::Zero(n(), n()));
  for (int m = 0; m < n(); ++m)
    for (int i = 0; i < n(); ++i)
      for (int j = 0; j < n(); ++j) {
        double acc = 0;
        for (int k = 0; k < n(); ++k)
          acc += ginv(m, k) * (dg[i](k, j) + dg[j](k, i) - dg[k](i, j));
        gamma[m](i, j) = 0.5 * acc;
      }
  return gamma;
}

std::vector<std::vector<Mat>> ConformalChart::dchristoffel(const Vec& xi) const {
  PotEval pe = eval_potential(xi, 2);
  double e2u = std::exp(2.0 * pe.value);
  Mat g0 = base_metric(xi);
  auto dg0 = base_dmetric(xi);
  auto ddg0 = base_d2metric(xi);

  std::vector<Mat> dg(n());
  for (int k = 0; k < n(); ++k)
    dg[k] = e2u * (2.0 * pe.grad(k) * g0 + dg0[k]);
  std::vector<std::vector<Mat>> ddg(n(), std::vector<Mat>(n()));
  for (int l = 0; l < n(); ++l)
    for (int k = 0; k < n(); ++k) {
      ddg[l][k] = e2u * (4.0 * pe.grad(l) * pe.grad(k) * g0 +
                         2.0 * pe.hess(l, k) * g0 + 2.0 * pe.grad(k) * dg0[l] +
                         2.0 * pe.grad(l) * dg0[k] + ddg0[l][k]);
    }

  Mat g = e2u * g0;
  Mat ginv = g.inverse();
  std::vector<Mat> dginv(n());
  for (int l = 0; l < n(); ++l) dginv[l] = -ginv * dg[l] * ginv;

  std::vector<std::vector<Mat>> dgamma(n(), std::vector<Mat>(n(), Mat::Zero(n(), n())));
  for (int l = 0; l < n(); ++l)
    for (int m = 0; m < n(); ++m)
      for (int i = 0; i < n(); ++i)
        for (int j = 0; j < n(); ++j) {
          double acc = 0;
          for (int k = 0; k < n(); ++k) {
            acc += dginv[l](m, k) * (dg[i](k, j) + dg[j](k, i) - dg[k](i, j));
            acc += ginv(m, k) *
                   (ddg[l][i](k, j) + ddg[l][j](k, i) - ddg[l][k](i, j));
          }
          dgamma[l][m](i, j) = 0.5 * acc;
        }
  return dgamma;
}

Vec ConformalChart::riemann_chart(const Vec& xi, const Vec& uu, const Vec& vv,
                                  const Vec& ww) const {
  auto gamma = christoffel(xi);
  auto dgamma = dchristoffel(xi);
  auto gam = [&](const Vec& a, const Vec& b) {
    Vec out(n());
    for (int m = 0; m < n(); ++m) out(m) = a.dot(gamma[m] * b);
    return out;
  };
  Vec res = Vec::Zero(n());
  for (int m = 0; m < n(); ++m) {
    double acc = 0;
    for (int i = 0; i < n(); ++i)
      for (int j = 0; j < n(); ++j)
        acc += uu(i) * vv(j) *
               (dgamma[i][m].row(j).dot(ww) - dgamma[j][m].row(i).dot(ww));
    res(m) = acc;
  }
  res += gam(uu, gam(vv, ww)) - gam(vv, gam(uu, ww));
  return res;
}

void ConformalChart::recenter(const Vec& x_loc, Mat* local_change) {
  Mat t = transvection_to(x_loc);
  anchor_ = anchor_ * t;
  if (local_change) {
    // new_loc = T^{-1} old_loc with T^{-1} = J T^T J
    Mat j = minkowski(n() + 1);
    *local_change = j * t.transpose() * j;
  }
}

Mat transvection_to(const Vec& x) {
  const int n = int(x.size()) - 1;
  Mat t = Mat::Identity(n + 1, n + 1);
  Vec sp = x.tail(n);
  double snorm = sp.norm();
  if (snorm < 1e-300) return t;
  Vec nh = sp / snorm;
  double c = x(0);    // cosh d
  double sh = snorm;  // sinh d
  t(0, 0) = c;
  t.block(0, 1, 1, n) = sh * nh.transpose();
  t.block(1, 0, n, 1) = sh * nh;
  t.block(1, 1, n, n) = Mat::Identity(n, n) + (c - 1.0) * (nh * nh.transpose());
  return t;
}

Vec lc_transport_hyperbolic(const Vec& x, const Vec& y, const Vec& u) {
  double c = mink(x, y);  // = -cosh d
  return u + mink(u, y) / (1.0 - c) * (x + y);
}

double hyperbolic_distance(const Vec& x, const Vec& y) {
  double c = -mink(x, y);
  return std::acosh(std::max(1.0, c));
}

// --------------------------------------------------------------------------
// configuration round trip
// --------------------------------------------------------------------------

std::map<std::string, std::string> ModelSpace::to_config() const {
  std::map<std::string, std::string> kv;
  kv["space.kind"] = perturbed() ? "perturbed-hyperbolic" : "hyperbolic";
  kv["space.n"] = std::to_string(n);
  kv["space.chart_bound"] = std::to_string(chart_bound);
  if (perturbed()) {
    kv["space.bump_radius"] = std::to_string(potential.bump_radius);
    std::ostringstream os;
    for (size_t i = 0; i < potential.terms.size(); ++i) {
      const auto& t = potential.terms[i];
      if (i) os << ";";
      os << t.amplitude << ":";
      for (int k = 0; k < t.wave.size(); ++k) os << (k ? "," : "") << t.wave(k);
      os << ":" << t.phase;
    }
    kv["space.terms"] = os.str();
  }
  return kv;
}

ModelSpace ModelSpace::from_config(const std::map<std::string, std::string>& kv) {
  ModelSpace s;
  auto get = [&](const std::string& k) -> std::string {
    auto it = kv.find(k);
    return it == kv.end() ? std::string() : it->second;
  };
  std::string kind = get("space.kind");
  if (kind == "perturbed-hyperbolic")
    s.kind = SpaceKind::PerturbedHyperbolic;
  else if (kind == "hyperbolic" || kind.empty())
    s.kind = SpaceKind::Hyperbolic;
  else
    throw ContractViolation("unknown space.kind");
  if (!get("space.n").empty()) s.n = std::stoi(get("space.n"));
  require(s.n >= 3, "space.n must be >= 3");
  if (!get("space.chart_bound").empty())
    s.chart_bound = std::stod(get("space.chart_bound"));
  if (s.perturbed()) {
    if (!get("space.bump_radius").empty())
      s.potential.bump_radius = std::stod(get("space.bump_radius"));
    std::string terms = get("space.terms");
    std::istringstream is(terms);
    std::string item;
    while (std::getline(is, item, ';')) {
      if (item.empty()) continue;
      CosineTerm t;
      auto p1 = item.find(':');
      auto p2 = item.rfind(':');
      require(p1 != std::string::npos && p2 != p1, "bad space.terms entry");
      t.amplitude = std::stod(item.substr(0, p1));
      t.phase = std::stod(item.substr(p2 + 1));
      std::istringstream ks(item.substr(p1 + 1, p2 - p1 - 1));
      std::vector<double> comps;
      std::string c;
      while (std::getline(ks, c, ',')) comps.push_back(std::stod(c));
      require(int(comps.size()) == s.n, "wave vector size != n");
      t.wave = Eigen::Map<Vec>(comps.data(), comps.size());
      s.potential.terms.push_back(t);
    }
  }
  return s;
}

}  // namespace hlab
