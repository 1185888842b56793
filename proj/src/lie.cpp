#include "hlab/lie.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace hlab {

Mat minkowski(int m) {
  Mat j = Mat::Identity(m, m);
  j(0, 0) = -1.0;
  return j;
}

double AlgElement::membership_residual() const {
  switch (algebra) {
    case AlgebraTag::so_n:
      return (mat.transpose() + mat).cwiseAbs().maxCoeff();
    case AlgebraTag::so_1n: {
      Mat j = minkowski(dim());
      return (mat.transpose() * j + j * mat).cwiseAbs().maxCoeff();
    }
    case AlgebraTag::u3_real: {
      // realification of u(3): skew and commuting with the complex structure
      require(dim() == 6, "u3_real elements are 6x6");
      Mat j = Mat::Zero(6, 6);
      for (int b = 0; b < 3; ++b) {
        j(2 * b, 2 * b + 1) = -1.0;
        j(2 * b + 1, 2 * b) = 1.0;
      }
      double skew = (mat.transpose() + mat).cwiseAbs().maxCoeff();
      double comm = (mat * j - j * mat).cwiseAbs().maxCoeff();
      return std::max(skew, comm);
    }
    case AlgebraTag::gl:
      return 0.0;
  }
  return 0.0;
}

double GrpElement::membership_residual() const {
  switch (group) {
    case GroupTag::SO_n:
      return (mat.transpose() * mat - Mat::Identity(dim(), dim()))
          .cwiseAbs()
          .maxCoeff();
    case GroupTag::SO0_1n: {
      Mat j = minkowski(dim());
      return (mat.transpose() * j * mat - j).cwiseAbs().maxCoeff();
    }
    case GroupTag::GL:
      return 0.0;
  }
  return 0.0;
}

bool GrpElement::valid(double tol) const {
  if (membership_residual() > tol) return false;
  if (group == GroupTag::SO_n && mat.determinant() <= 0) return false;
  if (group == GroupTag::SO0_1n && mat(0, 0) < 1.0 - tol) return false;
  return true;
}

AlgElement make_alg(Mat m, AlgebraTag tag) { return AlgElement{std::move(m), tag}; }

namespace {
Mat unit(int m, int r, int c) {
  Mat e = Mat::Zero(m, m);
  e(r, c) = 1.0;
  return e;
}
}  // namespace

StandardBasis::StandardBasis(int n_) : n(n_) {
  require(n >= 3, "StandardBasis needs n >= 3");
  const int m = n + 1;
  auto E = [&](int r, int c) { return unit(m, r - 1, c - 1); };  // 1-based
  X = make_alg(E(1, 2) + E(2, 1), AlgebraTag::so_1n);
  for (int i = 2; i <= n; ++i) {
    U_plus.push_back(make_alg(-E(1, i + 1) - E(2, i + 1) - E(i + 1, 1) + E(i + 1, 2),
                              AlgebraTag::so_1n));
    U_minus.push_back(make_alg(-E(1, i + 1) + E(2, i + 1) - E(i + 1, 1) - E(i + 1, 2),
                               AlgebraTag::so_1n));
  }
  R.resize(n - 1);
  for (int i = 2; i <= n; ++i) {
    R[i - 2].resize(n - 1);
    for (int j = 2; j <= n; ++j)
      R[i - 2][j - 2] =
          make_alg(E(i + 1, j + 1) - E(j + 1, i + 1), AlgebraTag::so_1n);
  }
}

AlgElement bracket(const AlgElement& a, const AlgElement& b) {
  require(a.dim() == b.dim(), "bracket: dimension mismatch");
  AlgebraTag tag = (a.algebra == b.algebra) ? a.algebra : AlgebraTag::gl;
  return make_alg(a.mat * b.mat - b.mat * a.mat, tag);
}

namespace {

// Pade(13) scaling-and-squaring, the standard double-precision scheme.
Mat expm_pade13(const Mat& a) {
  static const double b[] = {64764752532480000.0, 32382376266240000.0,
                             7771770303897600.0,  1187353796428800.0,
                             129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,
                             1323241920.0,        40840800.0,
                             960960.0,            16380.0,
                             182.0,               1.0};
  const int m = int(a.rows());
  double nrm = a.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm
  int squarings = 0;
  Mat as = a;
  const double theta13 = 5.371920351148152;
  if (nrm > theta13) {
    squarings = int(std::ceil(std::log2(nrm / theta13)));
    as = a / std::pow(2.0, squarings);
  }
  Mat a2 = as * as, a4 = a2 * a2, a6 = a2 * a4;
  Mat u = as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
                b[5] * a4 + b[3] * a2 + b[1] * Mat::Identity(m, m));
  Mat v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
          b[2] * a2 + b[0] * Mat::Identity(m, m);
  Mat r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

GroupTag group_of(AlgebraTag t) {
  switch (t) {
    case AlgebraTag::so_n:
    case AlgebraTag::u3_real:
      return GroupTag::SO_n;
    case AlgebraTag::so_1n:
      return GroupTag::SO0_1n;
    default:
      return GroupTag::GL;
  }
}

}  // namespace

Mat expm(const Mat& a) {
  require(a.allFinite(), "expm: non-finite entries");
  require(a.cwiseAbs().rowwise().sum().maxCoeff() <= 50.0,
          "expm: ||t*a|| > 50 rejected");
  return expm_pade13(a);
}

GrpElement expm(const AlgElement& a, double t) {
  return GrpElement{expm(Mat(t * a.mat)), group_of(a.algebra)};
}

namespace {

// log(I + E) for ||E|| < ~0.3 via the Gregory (atanh) series in
// Z = E (2I + E)^{-1}:  log(I+E) = 2 (Z + Z^3/3 + Z^5/5 + ...).
Mat log_near_identity(const Mat& g) {
  const int m = int(g.rows());
  Mat e = g - Mat::Identity(m, m);
  Mat z = (2.0 * Mat::Identity(m, m) + e).partialPivLu().solve(e);
  Mat z2 = z * z;
  Mat term = z;
  Mat acc = z;
  for (int k = 3; k <= 41; k += 2) {
    term = term * z2;
    Mat add = term / double(k);
    acc += add;
    if (add.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  return 2.0 * acc;
}

}  // namespace

Mat logm(const Mat& g) {
  const int m = int(g.rows());
  Mat e = g - Mat::Identity(m, m);
  double spectral = Eigen::JacobiSVD<Mat>(e).singularValues()(0);
  if (!(spectral <= 0.5 + 1e-12))
    throw NumericError("log-branch-failure",
                       "logm: input too far from identity; shrink the loop");
  // Denman-Beavers square roots until comfortably inside the series domain.
  Mat a = g;
  int roots = 0;
  while ((a - Mat::Identity(m, m)).norm() > 0.25 && roots < 20) {
    Mat y = a, zz = Mat::Identity(m, m);
    for (int it = 0; it < 60; ++it) {
      Mat yn = 0.5 * (y + zz.inverse());
      Mat zn = 0.5 * (zz + y.inverse());
      double delta = (yn - y).norm();
      y = yn;
      zz = zn;
      if (delta < 1e-16 * std::max(1.0, y.norm())) break;
    }
    a = y;
    ++roots;
  }
  Mat l = std::pow(2.0, roots) * log_near_identity(a);
  // round-trip guard: the contract promises expm(logm(g)) = g to 1e-9
  if ((expm(l) - g).norm() > 1e-9 * std::max(1.0, g.norm()))
    throw NumericError("log-branch-failure", "logm: round trip failed");
  return l;
}

AlgElement logm(const GrpElement& g) {
  AlgebraTag tag = AlgebraTag::gl;
  if (g.group == GroupTag::SO_n) tag = AlgebraTag::so_n;
  if (g.group == GroupTag::SO0_1n) tag = AlgebraTag::so_1n;
  return make_alg(logm(g.mat), tag);
}

std::vector<Mat> orthonormalize_span(const std::vector<Mat>& mats, double tol) {
  if (mats.empty()) return {};
  const int m = int(mats[0].rows());
  Mat stack(mats.size(), m * m);
  for (size_t i = 0; i < mats.size(); ++i)
    stack.row(i) = Eigen::Map<const Vec>(mats[i].data(), m * m).transpose();
  Eigen::JacobiSVD<Mat> svd(stack, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  double cut = (sv.size() > 0 ? sv(0) : 0.0) * tol;
  std::vector<Mat> out;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) <= cut || sv(i) == 0.0) break;
    Vec col = svd.matrixV().col(i);
    out.push_back(Eigen::Map<const Mat>(col.data(), m, m));
  }
  return out;
}

ClosureResult lie_closure(const std::vector<Mat>& gens, double tol) {
  ClosureResult res;
  if (gens.empty()) return res;
  std::vector<Mat> basis = orthonormalize_span(gens, tol);
  while (true) {
    std::vector<Mat> all = basis;
    for (size_t i = 0; i < basis.size(); ++i)
      for (size_t j = i + 1; j < basis.size(); ++j)
        all.push_back(basis[i] * basis[j] - basis[j] * basis[i]);
    std::vector<Mat> next = orthonormalize_span(all, tol);
    if (next.size() == basis.size()) {
      basis = std::move(next);
      break;
    }
    basis = std::move(next);
  }
  res.dim = int(basis.size());
  res.basis = std::move(basis);
  return res;
}

ClosureResult lie_closure(const std::vector<AlgElement>& gens, double tol) {
  std::vector<Mat> raw;
  raw.reserve(gens.size());
  for (const auto& g : gens) raw.push_back(g.mat);
  return lie_closure(raw, tol);
}

std::vector<Mat> commutant(const std::vector<Mat>& action, double tol) {
  require(!action.empty(), "commutant: empty action");
  const int m = int(action[0].rows());
  for (const auto& g : action)
    require(g.rows() == m && g.cols() == m, "commutant: size mismatch");
  // vec(gA - Ag) = (I (x) g - g^T (x) I) vec(A)
  Mat stacked(int(action.size()) * m * m, m * m);
  Mat im = Mat::Identity(m, m);
  for (size_t k = 0; k < action.size(); ++k) {
    const Mat& g = action[k];
    Mat block = Mat::Zero(m * m, m * m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        block.block(j * m, i * m, m, m) += g * im(i, j);  // I (x) g part
    // subtract g^T (x) I
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        block.block(j * m, i * m, m, m) -= g(i, j) * im;
    stacked.middleRows(int(k) * m * m, m * m) = block;
  }
  Eigen::JacobiSVD<Mat> svd(stacked, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double smax = sv.size() ? sv(0) : 0.0;
  std::vector<Mat> out;
  for (int i = 0; i < m * m; ++i) {
    double s = (i < sv.size()) ? sv(i) : 0.0;
    if (s <= tol * std::max(smax, 1.0)) {
      Vec col = svd.matrixV().col(i);
      out.push_back(Eigen::Map<const Mat>(col.data(), m, m));
    }
  }
  return out;
}

InvariantMetricResult invariant_inner_product(const std::vector<Mat>& sample,
                                              int word_len, double tol) {
  InvariantMetricResult res;
  require(!sample.empty(), "invariant_inner_product: empty sample");
  const int m = int(sample[0].rows());

  // growth guard on words
  Mat probe = Mat::Identity(m, m);
  double g0 = 1.0;
  for (int w = 0; w < word_len; ++w) {
    probe = sample[w % sample.size()] * probe;
    double g = probe.norm() / std::sqrt(double(m));
    if (g > 50.0 * g0 || g < g0 / 50.0) {
      res.found = false;
      res.note = "no invariant metric detected";
      return res;
    }
  }

  // averaging operator on symmetric matrices: T(h) = mean_g g^T h g
  const int d = m * (m + 1) / 2;
  auto to_vec = [&](const Mat& h) {
    Vec v(d);
    int k = 0;
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) v(k++) = h(i, j);
    return v;
  };
  auto from_vec = [&](const Vec& v) {
    Mat h(m, m);
    int k = 0;
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        h(i, j) = v(k);
        h(j, i) = v(k);
        ++k;
      }
    return h;
  };
  Mat T = Mat::Zero(d, d);
  for (int c = 0; c < d; ++c) {
    Vec e = Vec::Zero(d);
    e(c) = 1.0;
    Mat h = from_vec(e);
    Mat acc = Mat::Zero(m, m);
    for (const auto& g : sample) acc += g.transpose() * h * g;
    acc /= double(sample.size());
    T.col(c) = to_vec(acc);
  }
  // fixed space of T
  Eigen::JacobiSVD<Mat> svd(Mat(T - Mat::Identity(d, d)), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int null_dim = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) <= tol * std::max(1.0, sv(0))) ++null_dim;
  if (null_dim == 0) {
    res.found = false;
    res.note = "no invariant metric detected";
    return res;
  }
  // pick the positive definite fixed element (exists for compact closure);
  // search the nullspace for a PSD representative.
  Mat h_best;
  double best_min_eig = -1e300;
  for (int i = d - null_dim; i < d; ++i) {
    Mat h = from_vec(svd.matrixV().col(i));
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    if (std::abs(lo) > std::abs(hi)) {
      h = -h;
      std::swap(lo, hi);
      lo = -es.eigenvalues().maxCoeff();
    }
    Eigen::SelfAdjointEigenSolver<Mat> es2(h);
    double mn = es2.eigenvalues().minCoeff();
    if (mn > best_min_eig) {
      best_min_eig = mn;
      h_best = h;
    }
  }
  if (best_min_eig <= 1e-10) {
    res.found = false;
    res.note = "fixed space of the averaging operator has no definite element";
    return res;
  }
  h_best *= double(m) / h_best.trace();  // normalize tr(h) = m
  // stationarity under further averaging (word-length sweep)
  Mat h = h_best;
  double worst = 0.0;
  for (int w = 0; w < word_len; ++w) {
    Mat acc = Mat::Zero(m, m);
    for (const auto& g : sample) acc += g.transpose() * h * g;
    acc /= double(sample.size());
    worst = std::max(worst, (acc - h).norm() / h.norm());
    h = acc;
  }
  res.found = worst <= 100 * tol;
  res.h = h_best;
  res.stationarity = worst;
  if (!res.found) res.note = "averaging not stationary";
  return res;
}

ConformalResult conformal_containment(const std::vector<Mat>& sample,
                                      const Mat& h, double tol) {
  ConformalResult res;
  double hn = h.norm();
  for (const auto& g : sample) {
    Mat ghg = g.transpose() * h * g;
    double lambda = (ghg.cwiseProduct(h)).sum() / (hn * hn);  // trace-optimal
    double r = (ghg - lambda * h).norm() / hn;
    res.max_residual = std::max(res.max_residual, r);
  }
  res.conformal = res.max_residual < tol;
  return res;
}

Mat polar_orthonormalize(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

double subspace_angle(const std::vector<Mat>& a, const std::vector<Mat>& b) {
  if (a.empty() || b.empty()) return a.size() == b.size() ? 0.0 : 1.5707963267948966;
  const int m = int(a[0].rows());
  Mat A(m * m, a.size()), B(m * m, b.size());
  for (size_t i = 0; i < a.size(); ++i)
    A.col(i) = Eigen::Map<const Vec>(a[i].data(), m * m);
  for (size_t i = 0; i < b.size(); ++i)
    B.col(i) = Eigen::Map<const Vec>(b[i].data(), m * m);
  Eigen::HouseholderQR<Mat> qa(A), qb(B);
  Mat Qa = qa.householderQ() * Mat::Identity(m * m, a.size());
  Mat Qb = qb.householderQ() * Mat::Identity(m * m, b.size());
  Eigen::JacobiSVD<Mat> svd(Qa.transpose() * Qb);
  double c = svd.singularValues().minCoeff();
  c = std::min(1.0, std::max(-1.0, c));
  return std::acos(c);
}

std::vector<Mat> so_generators(int m) {
  std::vector<Mat> gens;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      Mat g = Mat::Zero(m, m);
      g(i, j) = 1.0;
      g(j, i) = -1.0;
      gens.push_back(g);
    }
  return gens;
}

std::vector<Mat> group_sample(const std::vector<Mat>& algebra_gens) {
  std::vector<Mat> out;
  for (const auto& g : algebra_gens)
    for (double t : {0.3, 0.7, 1.1}) out.push_back(expm(Mat(t * g)));
  return out;
}

}  // namespace hlab
