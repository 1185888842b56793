#include "hlab/lie.hpp"

#include "doctest.h"
#include "support/oracles.hpp"

using namespace hlab;

TEST_CASE("standard basis satisfies the algebra invariant with integer entries") {
  for (int n : {3, 4, 6}) {
    StandardBasis sb(n);
    CHECK(sb.X.membership_residual() == 0.0);
    for (int i = 2; i <= n; ++i) {
      CHECK(sb.Up(i).membership_residual() == 0.0);
      CHECK(sb.Um(i).membership_residual() == 0.0);
      for (int j = 2; j <= n; ++j)
        if (i != j) CHECK(sb.Rij(i, j).membership_residual() == 0.0);
    }
  }
}

TEST_CASE("bracket table in exact integer arithmetic") {
  for (int n : {3, 4, 5, 8}) {
    StandardBasis sb(n);
    auto eq = [](const Mat& a, const Mat& b) {
      return (a - b).cwiseAbs().maxCoeff() == 0.0;
    };
    for (int i = 2; i <= n; ++i) {
      CHECK(eq(bracket(sb.X, sb.Up(i)).mat, sb.Up(i).mat));
      CHECK(eq(bracket(sb.X, sb.Um(i)).mat, -sb.Um(i).mat));
      CHECK(eq(bracket(sb.Up(i), sb.Um(i)).mat, 2.0 * sb.X.mat));
      for (int j = 2; j <= n; ++j) {
        if (i == j) continue;
        CHECK(eq(bracket(sb.Up(i), sb.Up(j)).mat, Mat::Zero(n + 1, n + 1)));
        CHECK(eq(bracket(sb.Um(i), sb.Um(j)).mat, Mat::Zero(n + 1, n + 1)));
        // derived from the integer matrices; twice the rotation generator
        CHECK(eq(bracket(sb.Up(i), sb.Um(j)).mat, 2.0 * sb.Rij(i, j).mat));
        // cross-check against the exact integer oracle
        auto ib = oracles::int_bracket(sb.Up(i).mat, sb.Um(j).mat);
        CHECK(eq(ib.cast<double>(), 2.0 * sb.Rij(i, j).mat));
      }
    }
  }
}

TEST_CASE("rotation-block brackets fixed by the explicit matrices") {
  // [R_{1,2}, R_{2,3}] on 4x4 integer matrices (the formula extended to
  // index 1), derived by direct multiplication.
  const int n = 3, m = n + 1;
  auto E = [&](int r, int c) {
    Mat e = Mat::Zero(m, m);
    e(r - 1, c - 1) = 1.0;
    return e;
  };
  Mat r12 = E(2, 3) - E(3, 2);
  Mat r23 = E(3, 4) - E(4, 3);
  Mat r13 = E(2, 4) - E(4, 2);
  auto ib = oracles::int_bracket(r12, r23);
  CHECK((ib.cast<double>() - r13).cwiseAbs().maxCoeff() == 0.0);
  auto lhs = bracket(make_alg(r12, AlgebraTag::so_1n), make_alg(r23, AlgebraTag::so_1n));
  CHECK((lhs.mat - r13).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bracket antisymmetry and dimension check") {
  StandardBasis sb(4);
  CHECK(bracket(sb.Up(2), sb.Up(2)).mat.norm() == 0.0);
  AlgElement a = make_alg(Mat::Zero(3, 3), AlgebraTag::gl);
  AlgElement b = make_alg(Mat::Zero(4, 4), AlgebraTag::gl);
  CHECK_THROWS_AS((void)bracket(a, b), ContractViolation);
}

TEST_CASE("jacobi identity residual on random triples") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    int m = 3 + int(rng.uniform() * 3);
    auto rand_skew = [&](int k) {
      Mat a(k, k);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) a(i, j) = rng.normal();
      return make_alg(Mat(a - a.transpose()), AlgebraTag::so_n);
    };
    auto a = rand_skew(m), b = rand_skew(m), c = rand_skew(m);
    Mat res = bracket(a, bracket(b, c)).mat + bracket(b, bracket(c, a)).mat +
              bracket(c, bracket(a, b)).mat;
    CHECK(res.norm() < 1e-10 * std::max(1.0, a.mat.norm() * b.mat.norm() * c.mat.norm()));
  }
  // and in so(1,n)
  StandardBasis sb(4);
  Mat res = bracket(sb.X, bracket(sb.Up(2), sb.Um(3))).mat +
            bracket(sb.Up(2), bracket(sb.Um(3), sb.X)).mat +
            bracket(sb.Um(3), bracket(sb.X, sb.Up(2))).mat;
  CHECK(res.norm() == 0.0);
}

TEST_CASE("expm basics") {
  SUBCASE("zero time gives identity") {
    StandardBasis sb(3);
    auto g = expm(sb.Up(2), 0.0);
    CHECK((g.mat - Mat::Identity(4, 4)).norm() < 1e-15);
  }
  SUBCASE("so(2) generator at pi/2 is a quarter turn") {
    Mat a(2, 2);
    a << 0, -1, 1, 0;
    auto g = expm(make_alg(a, AlgebraTag::so_n), M_PI / 2);
    Mat want(2, 2);
    want << 0, -1, 1, 0;
    CHECK((g.mat - want).norm() < 1e-14);
    CHECK(g.valid());
  }
  SUBCASE("matches an independent Taylor evaluation") {
    Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
      Mat a(5, 5);
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) a(i, j) = rng.normal();
      Mat diff = expm(a) - oracles::expm_taylor(a);
      CHECK(diff.norm() < 1e-12 * oracles::expm_taylor(a).norm());
    }
  }
  SUBCASE("group invariants of exponentials") {
    StandardBasis sb(5);
    auto g = expm(sb.X, 2.0);
    CHECK(g.group == GroupTag::SO0_1n);
    CHECK(g.valid());
    auto r = expm(sb.Rij(2, 4), 0.9);
    CHECK(r.membership_residual() < 1e-12);
  }
  SUBCASE("adjoint eigenvalue of the flow generator") {
    StandardBasis sb(4);
    for (double t : {0.5, 1.0, 2.0}) {
      Mat ad = expm(sb.X, t).mat * sb.Up(3).mat * expm(sb.X, -t).mat;
      CHECK((ad - std::exp(t) * sb.Up(3).mat).norm() < 1e-10 * std::exp(t));
    }
  }
  SUBCASE("semigroup law") {
    StandardBasis sb(4);
    AlgElement xi = make_alg(
        Mat(0.3 * sb.Up(2).mat - 0.2 * sb.Um(3).mat + 0.5 * sb.X.mat),
        AlgebraTag::so_1n);
    Mat lhs = expm(xi, 0.7).mat * expm(xi, 1.1).mat;
    Mat rhs = expm(xi, 1.8).mat;
    CHECK((lhs - rhs).norm() < 1e-9);
  }
  SUBCASE("overflow guard") {
    StandardBasis sb(3);
    CHECK_THROWS_AS((void)expm(sb.X, 60.0), ContractViolation);
  }
}

TEST_CASE("logm near identity") {
  SUBCASE("identity maps to zero") {
    GrpElement g{Mat::Identity(4, 4), GroupTag::SO_n};
    CHECK(logm(g).mat.norm() == 0.0);
  }
  SUBCASE("inverse pair with expm") {
    StandardBasis sb(4);
    Mat l = logm(expm(sb.Rij(2, 3), 0.1).mat);
    CHECK((l - 0.1 * sb.Rij(2, 3).mat).norm() < 1e-10);
  }
  SUBCASE("round trip on random near-identity rotations") {
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
      Mat a(3, 3);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a(i, j) = 0.08 * rng.normal();
      Mat g = expm(Mat(a - a.transpose()));
      Mat l = logm(g);
      CHECK((l + l.transpose()).norm() < 1e-9);
      CHECK((expm(l) - g).norm() < 1e-10);
    }
  }
  SUBCASE("far-from-identity input is rejected") {
    Mat rot(2, 2);
    rot << -1, 0, 0, -1;  // 180-degree turn, eigenvalues on the cut
    Mat g = Mat::Identity(4, 4);
    g.block(0, 0, 2, 2) = rot;
    CHECK_THROWS_AS((void)logm(GrpElement{g, GroupTag::SO_n}), NumericError);
  }
}

TEST_CASE("lie_closure dimensions") {
  SUBCASE("trivial input") {
    CHECK(lie_closure(std::vector<Mat>{Mat::Zero(4, 4)}).dim == 0);
    CHECK(lie_closure(std::vector<Mat>{}).dim == 0);
  }
  SUBCASE("geodesic generators saturate so(1,n)") {
    for (int n : {3, 4, 5}) {
      StandardBasis sb(n);
      std::vector<AlgElement> gens{sb.X};
      for (int i = 2; i <= n; ++i) {
        gens.push_back(sb.Up(i));
        gens.push_back(sb.Um(i));
      }
      CHECK(lie_closure(gens).dim == n * (n + 1) / 2);
    }
  }
  SUBCASE("rotation block is already closed") {
    for (int n : {4, 5, 6}) {
      StandardBasis sb(n);
      std::vector<AlgElement> gens;
      for (int i = 2; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) gens.push_back(sb.Rij(i, j));
      CHECK(lie_closure(gens).dim == (n - 1) * (n - 2) / 2);
    }
  }
  SUBCASE("monotone under extra generators") {
    StandardBasis sb(5);
    std::vector<AlgElement> gens{sb.Rij(2, 3)};
    int d1 = lie_closure(gens).dim;
    gens.push_back(sb.Rij(3, 4));
    int d2 = lie_closure(gens).dim;
    gens.push_back(sb.Up(2));
    int d3 = lie_closure(gens).dim;
    CHECK(d1 <= d2);
    CHECK(d2 <= d3);
  }
}

TEST_CASE("commutant computations") {
  SUBCASE("identity action fixes everything") {
    auto basis = commutant({Mat::Identity(3, 3)});
    CHECK(basis.size() == 9);
  }
  SUBCASE("SO(m) conjugation fixes only homotheties, m >= 3") {
    for (int m : {3, 4, 5}) {
      auto basis = commutant(group_sample(so_generators(m)));
      REQUIRE(basis.size() == 1);
      Mat b = basis[0];
      CHECK((b - b(0, 0) * Mat::Identity(m, m)).norm() < 1e-9);
      // agree with the LU-kernel oracle
      auto lu = oracles::commutant_lu(group_sample(so_generators(m)));
      CHECK(lu.size() == 1);
    }
  }
  SUBCASE("SU(3) on R^6 fixes the homotheties and the complex structure") {
    auto sample = group_sample(oracles::su3_real_basis());
    auto basis = commutant(sample);
    CHECK(basis.size() == 2);
    auto lu = oracles::commutant_lu(sample);
    CHECK(lu.size() == 2);
    // every basis element commutes with the action
    for (const auto& b : basis)
      for (const auto& g : sample) CHECK((g * b - b * g).norm() < 1e-9);
  }
}

TEST_CASE("invariant inner product") {
  SUBCASE("orthogonal sample keeps the standard metric") {
    auto sample = group_sample(so_generators(4));
    auto res = invariant_inner_product(sample);
    REQUIRE(res.found);
    CHECK((res.h - Mat::Identity(4, 4)).norm() < 1e-9);
  }
  SUBCASE("uniform scaling defeats the metric but not conformality") {
    auto sample = group_sample(so_generators(3));
    for (auto& g : sample) g *= 1.3;
    auto res = invariant_inner_product(sample);
    CHECK(!res.found);
    auto conf = conformal_containment(sample, Mat::Identity(3, 3));
    CHECK(conf.conformal);
  }
  SUBCASE("conjugated orthogonal sample recovers the conjugated metric") {
    Rng rng(5);
    Mat s(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s(i, j) = rng.normal() * 0.3;
    s += 2.0 * Mat::Identity(3, 3);
    Mat sinv = s.inverse();
    auto sample = group_sample(so_generators(3));
    for (auto& g : sample) g = s * g * sinv;
    auto res = invariant_inner_product(sample);
    REQUIRE(res.found);
    Mat want = s.inverse().transpose() * s.inverse();
    want *= 3.0 / want.trace();
    Mat got = res.h * (3.0 / res.h.trace());
    CHECK((got - want).norm() / want.norm() < 1e-8);
  }
}

TEST_CASE("conformal containment") {
  SUBCASE("orthogonal matrices have zero residual") {
    auto sample = group_sample(so_generators(4));
    auto res = conformal_containment(sample, Mat::Identity(4, 4));
    CHECK(res.conformal);
    CHECK(res.max_residual < 1e-12);
  }
  SUBCASE("homotheties are conformal") {
    auto sample = group_sample(so_generators(3));
    sample.push_back(2.0 * Mat::Identity(3, 3));
    CHECK(conformal_containment(sample, Mat::Identity(3, 3)).conformal);
  }
  SUBCASE("a shear is not conformal") {
    Mat shear = Mat::Identity(3, 3);
    shear(0, 1) = 0.5;
    CHECK(!conformal_containment({shear}, Mat::Identity(3, 3)).conformal);
  }
}
