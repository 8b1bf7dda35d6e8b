#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "covercert/hermitian.hpp"
#include "test_support.hpp"

using namespace covercert;
using testsupport::max_entry_diff;
using testsupport::random_density_matrix;
using testsupport::random_hermitian;
using testsupport::to_eigen;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CMatrix diag2(double a, double b) {
  CMatrix m(2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST_CASE("eigendecompose: pauli-x and diagonal cases") {
  CMatrix x(2);
  x(0, 1) = 1.0;
  x(1, 0) = 1.0;
  HermitianOperator op(x);
  REQUIRE(std::abs(op.spectrum().eigenvalues[0] - 1.0) < 1e-12);
  REQUIRE(std::abs(op.spectrum().eigenvalues[1] + 1.0) < 1e-12);

  HermitianOperator d(diag2(-1.5, 2.5));
  REQUIRE(std::abs(d.spectrum().eigenvalues[0] - 2.5) < 1e-12);
  REQUIRE(std::abs(d.spectrum().eigenvalues[1] + 1.5) < 1e-12);
}

TEST_CASE("eigendecompose: reconstruction and orthonormality on random input") {
  Rng rng = make_stream(11, 0);
  for (int rep = 0; rep < 20; ++rep) {
    std::size_t n = 2 + rep % 7;
    CMatrix m = random_hermitian(rng, n);
    HermitianOperator op(m);
    const Spectrum& s = op.spectrum();

    CMatrix recon = detail::rebuild(s);
    REQUIRE(schatten_norm(HermitianOperator(recon - op.matrix()), kInf) < 1e-10);

    CMatrix gram = s.eigenvectors.adjoint() * s.eigenvectors;
    REQUIRE(max_entry_diff(gram, CMatrix::identity(n)) < 1e-10);

    for (std::size_t i = 0; i + 1 < n; ++i)
      REQUIRE(s.eigenvalues[i] >= s.eigenvalues[i + 1]);
  }
}

TEST_CASE("eigendecompose: eigenvalues match the independent dense solver") {
  Rng rng = make_stream(12, 0);
  for (int rep = 0; rep < 10; ++rep) {
    std::size_t n = 2 + rep;
    CMatrix m = random_hermitian(rng, n);
    HermitianOperator op(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(op.matrix()));
    for (std::size_t i = 0; i < n; ++i) {
      // Oracle sorts ascending, implementation descending.
      REQUIRE(std::abs(op.spectrum().eigenvalues[i] - es.eigenvalues()(n - 1 - i)) < 1e-10);
    }
  }
}

TEST_CASE("eigendecompose: scale robustness") {
  Rng rng = make_stream(13, 0);
  CMatrix m = random_hermitian(rng, 5);
  HermitianOperator base(m);
  for (double scale : {1e-8, 1e8}) {
    HermitianOperator scaled(m * cd(scale, 0.0));
    for (std::size_t i = 0; i < 5; ++i)
      REQUIRE(std::abs(scaled.spectrum().eigenvalues[i] - scale * base.spectrum().eigenvalues[i]) <
              1e-9 * scale);
  }
}

TEST_CASE("construction: non-finite entries rejected, asymmetry recorded") {
  CMatrix bad(2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  REQUIRE_THROWS_AS(HermitianOperator(bad), NonFiniteEntry);

  CMatrix skew(2);
  skew(0, 1) = cd(1.0, 0.0);
  skew(1, 0) = cd(1.0 + 2e-13, 0.0);
  HermitianOperator op(skew);
  REQUIRE(op.hermiticity_correction() > 0.0);
  REQUIRE(op.hermiticity_correction() < 1e-12);
  REQUIRE(std::abs(op.matrix()(0, 1) - op.matrix()(1, 0)) < 1e-15);
}

TEST_CASE("schatten_norm: diagonal hand values and projector") {
  HermitianOperator d(diag2(3.0, -4.0));
  REQUIRE(std::abs(schatten_norm(d, 1.0) - 7.0) < 1e-12);
  REQUIRE(std::abs(schatten_norm(d, 2.0) - 5.0) < 1e-12);
  REQUIRE(std::abs(schatten_norm(d, kInf) - 4.0) < 1e-12);

  Rng rng = make_stream(14, 0);
  HermitianOperator proj(testsupport::random_pure_state(rng, 4));
  for (double p : {1.0, 1.5, 2.0, 7.0, kInf})
    REQUIRE(std::abs(schatten_norm(proj, p) - 1.0) < 1e-10);

  REQUIRE_THROWS_AS(schatten_norm(d, 0.5), InvalidP);
}

TEST_CASE("schatten_norm: p=1 matches the independent SVD oracle") {
  Rng rng = make_stream(15, 0);
  for (int rep = 0; rep < 100; ++rep) {
    std::size_t n = 2 + rep % 15;
    CMatrix m = random_hermitian(rng, n);
    HermitianOperator op(m);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(op.matrix()));
    REQUIRE(std::abs(schatten_norm(op, 1.0) - svd.singularValues().sum()) < 1e-9);
  }
}

TEST_CASE("schatten_norm: monotone in p and triangle inequality") {
  Rng rng = make_stream(16, 0);
  const double ps[] = {1.0, 1.3, 2.0, 3.0, 10.0, kInf};
  for (int rep = 0; rep < 100; ++rep) {
    std::size_t n = 2 + rep % 6;
    HermitianOperator a(random_hermitian(rng, n));
    HermitianOperator b(random_hermitian(rng, n));
    HermitianOperator sum(a.matrix() + b.matrix());
    for (std::size_t i = 0; i + 1 < std::size(ps); ++i)
      REQUIRE(schatten_norm(a, ps[i]) >= schatten_norm(a, ps[i + 1]) - 1e-10);
    REQUIRE(schatten_norm(sum, 1.0) <= schatten_norm(a, 1.0) + schatten_norm(b, 1.0) + 1e-10);
  }
}

TEST_CASE("pseudo_power: stated conventions") {
  HermitianOperator d(diag2(4.0, 0.0));
  HermitianOperator r = pseudo_power(d, -0.5);
  REQUIRE(std::abs(r.matrix()(0, 0).real() - 0.5) < 1e-12);
  REQUIRE(std::abs(r.matrix()(1, 1)) < 1e-12);

  HermitianOperator id(CMatrix::identity(3));
  for (double alpha : {-2.0, -0.5, 0.5, 3.0})
    REQUIRE(max_entry_diff(pseudo_power(id, alpha).matrix(), CMatrix::identity(3)) < 1e-12);

  HermitianOperator d2(diag2(2.0, 8.0));
  HermitianOperator root = pseudo_power(d2, 0.5);
  REQUIRE(max_entry_diff((root.matrix() * root.matrix()), d2.matrix()) < 1e-12);
}

TEST_CASE("pseudo_power: inverse pairs hold on the support") {
  Rng rng = make_stream(17, 0);
  for (int rep = 0; rep < 25; ++rep) {
    std::size_t n = 2 + rep % 5;
    HermitianOperator rho(random_density_matrix(rng, n));
    REQUIRE(max_entry_diff(pseudo_power(rho, 1.0).matrix(), rho.matrix()) < 1e-10);
    for (double alpha : {-1.0, -0.5, 0.5, 2.0}) {
      HermitianOperator back = pseudo_power(pseudo_power(rho, alpha), 1.0 / alpha);
      REQUIRE(max_entry_diff(back.matrix(), rho.matrix()) < 1e-8);
    }
  }
}

TEST_CASE("pseudo_power: negative eigenvalue rules") {
  HermitianOperator d(diag2(1.0, -2.0));
  REQUIRE_THROWS_AS(pseudo_power(d, 0.5), NegativeEigenvalue);
  HermitianOperator sq = pseudo_power(d, 2.0);
  REQUIRE(std::abs(sq.matrix()(1, 1).real() - 4.0) < 1e-12);
}

TEST_CASE("matrix_log2: support convention and exponential oracle") {
  HermitianOperator a(diag2(1.0, 2.0));
  HermitianOperator la = matrix_log2(a);
  REQUIRE(std::abs(la.matrix()(0, 0)) < 1e-12);
  REQUIRE(std::abs(la.matrix()(1, 1).real() - 1.0) < 1e-12);

  HermitianOperator b(diag2(4.0, 0.0));
  HermitianOperator lb = matrix_log2(b);
  REQUIRE(std::abs(lb.matrix()(0, 0).real() - 2.0) < 1e-12);
  REQUIRE(std::abs(lb.matrix()(1, 1)) < 1e-12);

  REQUIRE_THROWS_AS(matrix_log2(HermitianOperator(diag2(1.0, -1.0))), NegativeEigenvalue);

  Rng rng = make_stream(18, 0);
  for (int rep = 0; rep < 10; ++rep) {
    HermitianOperator rho(random_density_matrix(rng, 4));
    CMatrix proj = support_projector(rho);
    CMatrix back = proj * matrix_exp2(matrix_log2(rho)).matrix() * proj;
    REQUIRE(max_entry_diff(back, rho.matrix()) < 1e-9);
  }
}

TEST_CASE("trace_distance: hand values") {
  CMatrix zero_state(2), one_state(2);
  zero_state(0, 0) = 1.0;
  one_state(1, 1) = 1.0;
  DensityOperator p0(zero_state, Normalization::normalized);
  DensityOperator p1(one_state, Normalization::normalized);
  REQUIRE(std::abs(trace_distance(p0, p1) - 2.0) < 1e-12);
  REQUIRE(trace_distance(p0, p0) == 0.0);

  DensityOperator a(diag2(0.7, 0.3), Normalization::normalized);
  DensityOperator b(diag2(0.5, 0.5), Normalization::normalized);
  REQUIRE(std::abs(trace_distance(a, b) - 0.4) < 1e-12);

  CMatrix threes(3);
  threes(0, 0) = 1.0;
  REQUIRE_THROWS_AS(trace_distance(zero_state, threes), DimMismatch);
}

TEST_CASE("density operator: validation rules") {
  REQUIRE_THROWS_AS(DensityOperator(diag2(1.2, -0.2), Normalization::normalized),
                    NegativeEigenvalue);
  REQUIRE_THROWS_AS(DensityOperator(diag2(0.8, 0.4), Normalization::normalized),
                    InvalidDistribution);
  REQUIRE_THROWS_AS(DensityOperator(diag2(0.5, 0.3), Normalization::normalized),
                    InvalidDistribution);
  DensityOperator ok(diag2(0.5, 0.3), Normalization::subnormalized);
  REQUIRE(std::abs(ok.trace() - 0.8) < 1e-12);
}

TEST_CASE("weighted_cs_bound: equality case, zero case, support check") {
  std::size_t d = 4;
  CMatrix idm = CMatrix::identity(d) * cd(1.0 / d, 0.0);
  DensityOperator sigma(idm, Normalization::normalized);
  auto [one, two] = weighted_cs_bound(HermitianOperator(idm), sigma);
  REQUIRE(std::abs(one - 1.0) < 1e-12);
  REQUIRE(std::abs(two - 1.0) < 1e-12);

  auto [z1, z2] = weighted_cs_bound(HermitianOperator(CMatrix(d)), sigma);
  REQUIRE(z1 == 0.0);
  REQUIRE(z2 == 0.0);

  CMatrix rank1(2);
  rank1(0, 0) = 1.0;
  DensityOperator narrow(rank1, Normalization::normalized);
  CMatrix wide(2);
  wide(0, 0) = 0.5;
  wide(1, 1) = 0.5;
  REQUIRE_THROWS_AS(weighted_cs_bound(HermitianOperator(wide), narrow), SupportViolation);
}

TEST_CASE("weighted_cs_bound: inequality on random instances") {
  Rng rng = make_stream(19, 0);
  for (int rep = 0; rep < 100; ++rep) {
    std::size_t n = 2 + rep % 5;
    DensityOperator sigma(random_density_matrix(rng, n), Normalization::normalized);
    HermitianOperator m(random_hermitian(rng, n, 0.5));
    auto [lhs, rhs] = weighted_cs_bound(m, sigma);
    REQUIRE(lhs <= rhs + 1e-9);
  }
}
