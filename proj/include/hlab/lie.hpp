#pragma once

#include <optional>
#include <vector>

#include "hlab/types.hpp"

namespace hlab {

enum class AlgebraTag { so_n, so_1n, u3_real, gl };
enum class GroupTag { SO_n, SO0_1n, GL };

/// Minkowski form diag(-1, 1, ..., 1) of size m.
Mat minkowski(int m);

/// Square real matrix tagged with the algebra it is supposed to live in.
/// Membership is a checkable invariant, not a type-level guarantee.
struct AlgElement {
  Mat mat;
  AlgebraTag algebra = AlgebraTag::gl;

  int dim() const { return int(mat.rows()); }
  /// Residual of the defining relation of the tagged algebra
  /// (0 for gl, which has none).
  double membership_residual() const;
  bool valid(double tol = 1e-12) const { return membership_residual() <= tol; }
};

struct GrpElement {
  Mat mat;
  GroupTag group = GroupTag::GL;

  int dim() const { return int(mat.rows()); }
  double membership_residual() const;
  bool valid(double tol = 1e-10) const;
};

AlgElement make_alg(Mat m, AlgebraTag tag);

/// The root basis of so(1,n) adapted to the geodesic generator:
/// X, the expanding/contracting families U_i^{+/-} (i = 2..n) and the
/// rotation block R_{i,j} spanning so(n-1). All entries are integers.
struct StandardBasis {
  int n = 0;
  AlgElement X;
  std::vector<AlgElement> U_plus;   // U_plus[i-2] = U_i^+
  std::vector<AlgElement> U_minus;  // U_minus[i-2] = U_i^-
  std::vector<std::vector<AlgElement>> R;  // R[i-2][j-2] = R_{i,j}, i != j

  explicit StandardBasis(int n);
  const AlgElement& Up(int i) const { return U_plus.at(i - 2); }
  const AlgElement& Um(int i) const { return U_minus.at(i - 2); }
  const AlgElement& Rij(int i, int j) const { return R.at(i - 2).at(j - 2); }
};

AlgElement bracket(const AlgElement& a, const AlgElement& b);

/// exp(t*a) by scaling-and-squaring with Pade(13). Rejects |t|*||a|| > 50.
GrpElement expm(const AlgElement& a, double t = 1.0);
Mat expm(const Mat& a);

/// Principal logarithm for near-identity input (inverse scaling by
/// Denman-Beavers square roots, then an atanh series). Throws
/// NumericError("log-branch-failure") outside its domain.
AlgElement logm(const GrpElement& g);
Mat logm(const Mat& g);

struct ClosureResult {
  std::vector<Mat> basis;  // orthonormal wrt <A,B> = tr(A^T B)
  int dim = 0;
};

/// Smallest bracket-closed subspace containing the generators.
/// Iteratively brackets basis pairs and re-orthonormalizes with an SVD
/// rank cut at `tol` (relative to the largest singular value).
ClosureResult lie_closure(const std::vector<Mat>& gens, double tol = 1e-8);
ClosureResult lie_closure(const std::vector<AlgElement>& gens, double tol = 1e-8);

/// Orthonormal basis of {A : g A = A g for all g in action}, computed as
/// the nullspace of the stacked maps A -> gAg^{-1} - A.
std::vector<Mat> commutant(const std::vector<Mat>& action, double tol = 1e-8);

struct InvariantMetricResult {
  bool found = false;
  Mat h;                  // symmetric positive definite when found
  double stationarity = 0;  // residual of h under one more averaging pass
  std::string note;
};

/// Invariant inner product for the group generated by the sample, found as
/// the unit-eigenvalue fixed space of the averaging operator
/// h -> mean(g^T h g). Words up to length L probe stationarity; norm
/// growth along words reports "no invariant metric detected".
InvariantMetricResult invariant_inner_product(const std::vector<Mat>& sample,
                                              int word_len = 8,
                                              double tol = 1e-8);

struct ConformalResult {
  bool conformal = false;
  double max_residual = 0;  // max over g of ||g^T h g - lambda_g h|| / ||h||
};

/// Does every sample element preserve h up to scale?  lambda_g is the
/// trace-optimal scalar for each element.
ConformalResult conformal_containment(const std::vector<Mat>& sample,
                                      const Mat& h, double tol = 1e-6);

// -- small helpers shared across modules --

/// Project a matrix near SO(m) back onto SO(m) (polar factor).
Mat polar_orthonormalize(const Mat& a);

/// Orthonormal basis (tr(A^T B) inner product) of the span of `mats`,
/// SVD rank decision at `tol` relative to sigma_max.
std::vector<Mat> orthonormalize_span(const std::vector<Mat>& mats, double tol = 1e-8);

/// Largest principal angle between the spans of two orthonormal families.
double subspace_angle(const std::vector<Mat>& a, const std::vector<Mat>& b);

/// Group sample for a connected group: generators exponentiated at
/// t in {0.3, 0.7, 1.1}.
std::vector<Mat> group_sample(const std::vector<Mat>& algebra_gens);

/// Generators of so(m) (elementary rotations).
std::vector<Mat> so_generators(int m);

}  // namespace hlab
