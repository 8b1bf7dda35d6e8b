#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "covercert/divergence.hpp"
#include "test_support.hpp"

using namespace covercert;
using testsupport::max_entry_diff;
using testsupport::random_density_matrix;
using testsupport::to_eigen;

namespace {

DensityOperator diag_state(const std::vector<double>& d) {
  CMatrix m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return as_density(m);
}

CqEnsemble random_cq(Rng& rng, std::size_t nx, std::size_t d) {
  Distribution p = random_distribution(nx, rng);
  std::vector<DensityOperator> st;
  for (std::size_t x = 0; x < nx; ++x) {
    if (uniform_real(rng) < 0.4) {
      st.push_back(random_pure_states(1, d, rng)[0]);
    } else {
      st.push_back(DensityOperator(random_density_matrix(rng, d), Normalization::normalized));
    }
  }
  return CqEnsemble(p, st);
}

CMatrix assemble_blocks(const std::vector<double>& w, const std::vector<DensityOperator>& st) {
  const std::size_t d = st.front().dim();
  CMatrix out(w.size() * d);
  for (std::size_t x = 0; x < w.size(); ++x)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) out(x * d + i, x * d + j) = w[x] * st[x].matrix()(i, j);
  return out;
}

// Exact linear-program oracle: every vertex of the feasible test polytope has
// at most one fractional coordinate, so subset enumeration plus one partial
// element is exhaustive.
double oracle_np(const std::vector<double>& a, const std::vector<double>& b, double need) {
  const std::size_t n = a.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double xa = 0.0, xb = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::uint64_t{1} << i)) {
        xa += a[i];
        xb += b[i];
      }
    if (xa >= need - 1e-13) best = std::min(best, xb);
    for (std::size_t f = 0; f < n; ++f) {
      if (mask & (std::uint64_t{1} << f)) continue;
      if (a[f] <= 0.0) continue;
      const double t = (need - xa) / a[f];
      if (t > 0.0 && t <= 1.0) best = std::min(best, xb + t * b[f]);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("plain divergences on matched and mismatched supports") {
  Rng rng = make_stream(30, 0);

  SECTION("identical arguments give zero") {
    DensityOperator rho(random_density_matrix(rng, 4), Normalization::normalized);
    REQUIRE(std::abs(shannon_divergence(rho, rho).bits) <= 1e-9);
    REQUIRE(std::abs(renyi2_divergence(rho, rho).bits) <= 1e-9);
    REQUIRE(std::abs(max_divergence(rho, rho).bits) <= 1e-9);
  }

  SECTION("point mass against the fair coin is one bit") {
    DensityOperator a = diag_state({1.0, 0.0});
    DensityOperator b = diag_state({0.5, 0.5});
    REQUIRE(shannon_divergence(a, b).bits == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(renyi2_divergence(a, b).bits == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(max_divergence(a, b).bits == Catch::Approx(1.0).margin(1e-12));
  }

  SECTION("support escape is plus infinity") {
    DensityOperator a = diag_state({0.5, 0.5});
    DensityOperator b = diag_state({1.0, 0.0});
    REQUIRE(std::isinf(shannon_divergence(a, b).bits));
    REQUIRE(shannon_divergence(a, b).bits > 0.0);
    REQUIRE(std::isinf(renyi2_divergence(a, b).bits));
    REQUIRE(std::isinf(max_divergence(a, b).bits));
  }

  SECTION("dimension mismatch throws") {
    DensityOperator a = diag_state({1.0, 0.0});
    DensityOperator b = diag_state({0.5, 0.3, 0.2});
    REQUIRE_THROWS_AS(shannon_divergence(a, b), DimMismatch);
    REQUIRE_THROWS_AS(renyi2_divergence(a, b), DimMismatch);
    REQUIRE_THROWS_AS(max_divergence(a, b), DimMismatch);
  }
}

TEST_CASE("classical divergences match scalar oracles") {
  Rng rng = make_stream(31, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + uniform_index(rng, 4);
    Distribution p = random_distribution(n, rng);
    Distribution q = random_distribution(n, rng);
    double kl = 0.0, r2 = 0.0, mx = -1e300;
    for (std::size_t i = 0; i < n; ++i) {
      kl += p[i] * std::log2(p[i] / q[i]);
      r2 += p[i] * p[i] / q[i];
      mx = std::max(mx, std::log2(p[i] / q[i]));
    }
    DensityOperator a = diag_state(std::vector<double>(p.weights()));
    DensityOperator b = diag_state(std::vector<double>(q.weights()));
    REQUIRE(shannon_divergence(a, b).bits == Catch::Approx(kl).margin(1e-10));
    REQUIRE(renyi2_divergence(a, b).bits == Catch::Approx(std::log2(r2)).margin(1e-10));
    REQUIRE(max_divergence(a, b).bits == Catch::Approx(mx).margin(1e-10));
  }
}

TEST_CASE("quantum renyi divergences match an independent eigen oracle") {
  Rng rng = make_stream(32, 0);
  for (int trial = 0; trial < 10; ++trial) {
    DensityOperator a(random_density_matrix(rng, 4), Normalization::normalized);
    DensityOperator b(random_density_matrix(rng, 4, 9), Normalization::normalized);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(b.matrix()));
    Eigen::VectorXd vals = es.eigenvalues();
    Eigen::MatrixXcd quarter = Eigen::MatrixXcd::Zero(4, 4);
    Eigen::MatrixXcd half = Eigen::MatrixXcd::Zero(4, 4);
    for (int i = 0; i < 4; ++i) {
      quarter += std::pow(vals(i), -0.25) * es.eigenvectors().col(i) *
                 es.eigenvectors().col(i).adjoint();
      half += std::pow(vals(i), -0.5) * es.eigenvectors().col(i) *
              es.eigenvectors().col(i).adjoint();
    }
    const Eigen::MatrixXcd g2 = quarter * to_eigen(a.matrix()) * quarter;
    const Eigen::MatrixXcd gi = half * to_eigen(a.matrix()) * half;
    const double want_d2 = 2.0 * std::log2(g2.norm());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> gs(gi);
    const double want_dmax = std::log2(gs.eigenvalues().cwiseAbs().maxCoeff());

    REQUIRE(renyi2_divergence(a, b).bits == Catch::Approx(want_d2).margin(1e-9));
    REQUIRE(max_divergence(a, b).bits == Catch::Approx(want_dmax).margin(1e-9));
  }
}

TEST_CASE("orthogonal cq state has max divergence log of the alphabet") {
  const std::size_t n = 4;
  auto states = orthogonal_pure_states(n);
  std::vector<double> u(n, 1.0 / static_cast<double>(n));
  CMatrix joint = assemble_blocks(u, states);
  std::vector<DensityOperator> mixed(n, diag_state(std::vector<double>(n, 1.0 / n)));
  CMatrix ref = assemble_blocks(u, mixed);
  REQUIRE(max_divergence(as_density(joint), as_density(ref)).bits ==
          Catch::Approx(std::log2(static_cast<double>(n))).margin(1e-9));
}

TEST_CASE("divergences are positive away from equality") {
  Rng rng = make_stream(33, 0);
  int checked = 0;
  while (checked < 50) {
    const std::size_t d = 2 + uniform_index(rng, 5);
    DensityOperator a(random_density_matrix(rng, d), Normalization::normalized);
    DensityOperator b(random_density_matrix(rng, d, 2 * d + 3), Normalization::normalized);
    if (trace_distance(a, b) < 0.01) continue;
    ++checked;
    const double kl = shannon_divergence(a, b).bits;
    REQUIRE(kl > 1e-6);
    REQUIRE(renyi2_divergence(a, b).bits >= kl - 1e-9);
    REQUIRE(max_divergence(a, b).bits >= renyi2_divergence(a, b).bits - 1e-9);
  }
}

TEST_CASE("blockwise cq divergences equal the assembled full matrices") {
  Rng rng = make_stream(34, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t nx = 2 + uniform_index(rng, 5);
    const std::size_t d = 2 + uniform_index(rng, 3);
    CqEnsemble e = random_cq(rng, nx, d);
    DensityOperator avg = average_state(e);
    std::vector<DensityOperator> refs(nx, avg);

    DensityOperator joint = as_density(assemble_blocks(e.dist.weights(), e.states));
    DensityOperator ref = as_density(assemble_blocks(e.dist.weights(), refs));

    REQUIRE(cq_shannon_divergence(e, e.dist.weights(), avg) ==
            Catch::Approx(shannon_divergence(joint, ref).bits).margin(1e-9));
    REQUIRE(cq_renyi2_divergence(e, e.dist.weights(), avg) ==
            Catch::Approx(renyi2_divergence(joint, ref).bits).margin(1e-9));
    REQUIRE(cq_max_divergence(e, e.dist.weights(), avg) ==
            Catch::Approx(max_divergence(joint, ref).bits).margin(1e-9));
  }
}

TEST_CASE("ordering chain over random instances") {
  Rng rng = make_stream(35, 0);
  SmoothingBudget budget(0.1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t nx = 2 + uniform_index(rng, 15);
    const std::size_t d = 2 + uniform_index(rng, 7);
    CqEnsemble e = random_cq(rng, nx, d);
    MutualInformationReport mi = mutual_informations(e, budget);
    REQUIRE(mi.shannon <= mi.renyi2 + 1e-9);
    REQUIRE(mi.renyi2 <= mi.renyi_max + 1e-9);
    REQUIRE(mi.smooth_renyi2.bits <= mi.smooth_renyi_max.bits + 1e-9);
    REQUIRE(mi.smooth_renyi2.bits <= mi.renyi2 + 1e-9);
    REQUIRE(mi.smooth_renyi_max.bits <= mi.renyi_max + 1e-9);

    ConditionalEntropyReport ce = conditional_entropies(e, budget);
    REQUIRE(ce.shannon >= ce.renyi2 - 1e-9);
    REQUIRE(ce.renyi2 >= ce.min_entropy - 1e-9);
    REQUIRE(ce.smooth_renyi2.bits >= ce.smooth_min.bits - 1e-9);
    REQUIRE(ce.smooth_renyi2.bits <= ce.renyi2 + 1e-9);
    REQUIRE(ce.smooth_min.bits <= ce.min_entropy + 1e-9);
  }
}

TEST_CASE("mutual informations on structured ensembles") {
  Rng rng = make_stream(36, 0);
  SmoothingBudget budget(0.1);

  SECTION("product state carries no information") {
    CMatrix tau = random_density_matrix(rng, 3);
    std::vector<DensityOperator> st(4, DensityOperator(tau, Normalization::normalized));
    CqEnsemble e(random_distribution(4, rng), st);
    MutualInformationReport mi = mutual_informations(e, budget);
    REQUIRE(std::abs(mi.shannon) <= 1e-9);
    REQUIRE(std::abs(mi.renyi2) <= 1e-9);
    REQUIRE(std::abs(mi.renyi_max) <= 1e-9);
    REQUIRE(std::abs(mi.smooth_renyi_max.bits) <= 1e-10);
    REQUIRE(mi.smooth_renyi2.bits <= 1e-10);
    REQUIRE(mi.smooth_renyi2.bits >= 2.0 * std::log2(0.9) - 1e-9);
  }

  SECTION("uniform orthogonal pure states carry the full alphabet") {
    const std::size_t n = 4;
    CqEnsemble e(Distribution::uniform(n), orthogonal_pure_states(n));
    MutualInformationReport mi = mutual_informations(e, budget);
    REQUIRE(mi.shannon == Catch::Approx(2.0).margin(1e-9));
    REQUIRE(mi.renyi2 == Catch::Approx(2.0).margin(1e-9));
    REQUIRE(mi.renyi_max == Catch::Approx(2.0).margin(1e-9));
  }
}

TEST_CASE("conditional entropies on structured ensembles") {
  Rng rng = make_stream(37, 0);
  SmoothingBudget budget(0.1);

  SECTION("identical states leave the label fully uncertain") {
    CMatrix tau = random_density_matrix(rng, 3);
    std::vector<DensityOperator> st(8, DensityOperator(tau, Normalization::normalized));
    CqEnsemble e(Distribution::uniform(8), st);
    ConditionalEntropyReport ce = conditional_entropies(e, budget);
    REQUIRE(ce.min_entropy == Catch::Approx(3.0).margin(1e-9));
    REQUIRE(ce.smooth_min.bits <= ce.min_entropy + 1e-9);
  }

  SECTION("orthogonal pure states reveal the label") {
    CqEnsemble e(Distribution::uniform(4), orthogonal_pure_states(4));
    ConditionalEntropyReport ce = conditional_entropies(e, budget);
    REQUIRE(std::abs(ce.min_entropy) <= 1e-9);
  }
}

TEST_CASE("smooth divergence values and certificates") {
  Rng rng = make_stream(38, 0);

  SECTION("vanishing budget recovers the non-smooth values") {
    CqEnsemble e = random_cq(rng, 4, 3);
    DensityOperator avg = average_state(e);
    SmoothingBudget tiny(1e-9);
    REQUIRE(smooth_divergence(SmoothKind::renyi2, e, avg, tiny).bits ==
            Catch::Approx(cq_renyi2_divergence(e, e.dist.weights(), avg)).margin(1e-6));
    REQUIRE(smooth_divergence(SmoothKind::max, e, avg, tiny).bits ==
            Catch::Approx(cq_max_divergence(e, e.dist.weights(), avg)).margin(1e-6));
  }

  SECTION("two-symbol instance matches a grid-search oracle") {
    CqEnsemble e(Distribution({0.1, 0.9}), orthogonal_pure_states(2));
    DensityOperator avg = average_state(e);
    const double eps = 0.1;
    DivergenceValue got = smooth_divergence(SmoothKind::max, e, avg, SmoothingBudget(eps));

    // Diagonal instance: candidate value max_x log2(s_x * ratio_x) with
    // ratio_1 = 1/0.1, ratio_2 = 1/0.9 and removed mass d1 + d2 <= eps.
    double oracle = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 100; ++i) {
      const double d1 = std::min(1e-3 * i, 0.1);
      const double d2 = eps - d1;
      const double s1 = (0.1 - d1) / 0.1;
      const double s2 = (0.9 - d2) / 0.9;
      double v = -std::numeric_limits<double>::infinity();
      if (s1 > 0.0) v = std::max(v, std::log2(s1 * 10.0));
      if (s2 > 0.0) v = std::max(v, std::log2(s2 / 0.9));
      oracle = std::min(oracle, v);
    }
    REQUIRE(oracle == Catch::Approx(0.1344).margin(2e-3));
    REQUIRE(got.bits == Catch::Approx(std::log2(1.0 / 0.9)).margin(1e-9));
    REQUIRE(std::abs(got.bits - oracle) <= 0.02);
    REQUIRE(got.certificate.has_value());
    REQUIRE(got.certificate->scale[0] <= 1e-12);
    REQUIRE(got.bound == BoundKind::upper);
  }

  SECTION("values are non-increasing in the budget") {
    const std::vector<double> grid{0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5};
    for (int trial = 0; trial < 50; ++trial) {
      CqEnsemble e = random_cq(rng, 2 + uniform_index(rng, 4), 2 + uniform_index(rng, 2));
      DensityOperator avg = average_state(e);
      for (SmoothKind kind : {SmoothKind::renyi2, SmoothKind::max}) {
        double prev = std::numeric_limits<double>::infinity();
        for (double eps : grid) {
          const double v = smooth_divergence(kind, e, avg, SmoothingBudget(eps)).bits;
          REQUIRE(v <= prev + 1e-12);
          prev = v;
        }
      }
    }
  }

  SECTION("certificates respect the trace budget and the reference support") {
    for (int trial = 0; trial < 30; ++trial) {
      CqEnsemble e = random_cq(rng, 3 + uniform_index(rng, 3), 2 + uniform_index(rng, 2));
      DensityOperator avg = average_state(e);
      const double eps = trial % 2 == 0 ? 0.1 : 0.37;
      for (SmoothKind kind : {SmoothKind::renyi2, SmoothKind::max}) {
        DivergenceValue v = smooth_divergence(kind, e, avg, SmoothingBudget(eps));
        REQUIRE(v.certificate.has_value());
        CMatrix original = assemble_blocks(e.dist.weights(), e.states);
        CMatrix smoothed = assemble_blocks(v.certificate->masses, e.states);
        const double dist = trace_distance(original, smoothed);
        REQUIRE(dist <= eps * real_trace(original) + 1e-10);
        REQUIRE(dist == Catch::Approx(v.certificate->removed).margin(1e-9));
      }
    }
  }

  SECTION("a light support-violating symbol is smoothed away") {
    CqEnsemble e(Distribution({0.95, 0.05}), orthogonal_pure_states(2));
    DensityOperator tau = diag_state({1.0, 0.0});
    REQUIRE(std::isinf(cq_max_divergence(e, e.dist.weights(), tau)));
    DivergenceValue v =
        smooth_divergence(SmoothKind::max, e, e.dist.weights(), tau, SmoothingBudget(0.1));
    REQUIRE(v.finite());
    REQUIRE(v.bits <= 0.01);
    REQUIRE(v.certificate->scale[1] == 0.0);
  }

  SECTION("budget construction validates the range") {
    REQUIRE_THROWS_AS(SmoothingBudget(0.0), InvalidEps);
    REQUIRE_THROWS_AS(SmoothingBudget(1.0), InvalidEps);
    REQUIRE_THROWS_AS(SmoothingBudget(-0.2), InvalidEps);
  }
}

TEST_CASE("hypothesis testing on commuting pairs") {
  Rng rng = make_stream(39, 0);

  SECTION("identical states cost exactly the type-one slack") {
    DensityOperator rho(random_density_matrix(rng, 3), Normalization::normalized);
    for (double eps : {0.3, 0.5}) {
      DivergenceValue v = hypothesis_testing_divergence(rho, rho, eps);
      REQUIRE(v.bits == Catch::Approx(-std::log2(1.0 - eps)).margin(1e-9));
      REQUIRE(v.bound == BoundKind::exact);
      REQUIRE(v.bits >= 0.0);
    }
  }

  SECTION("skewed coin pair picks the likely outcome") {
    DensityOperator a = diag_state({0.5, 0.5});
    DensityOperator b = diag_state({0.9, 0.1});
    REQUIRE(hypothesis_testing_divergence(a, b, 0.5).bits ==
            Catch::Approx(std::log2(10.0)).margin(1e-9));
  }

  SECTION("fractional tests beat projector enumeration") {
    DensityOperator a = diag_state({1.0, 0.0});
    DensityOperator b = diag_state({0.5, 0.5});
    REQUIRE(hypothesis_testing_divergence(a, b, 0.5).bits == Catch::Approx(2.0).margin(1e-9));
  }

  SECTION("random diagonal pairs match the exhaustive vertex oracle") {
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = 2 + uniform_index(rng, 5);
      Distribution p = random_distribution(n, rng);
      Distribution q = random_distribution(n, rng);
      for (double eps : {0.2, 0.5}) {
        const double beta = oracle_np(p.weights(), q.weights(), 1.0 - eps);
        const double got =
            hypothesis_testing_divergence(diag_state(p.weights()), diag_state(q.weights()), eps)
                .bits;
        REQUIRE(got == Catch::Approx(-std::log2(beta)).margin(1e-9));
      }
    }
  }

  SECTION("eps is validated strictly") {
    DensityOperator rho = diag_state({0.5, 0.5});
    for (double eps : {0.0, 1.0, -0.1, 1.5})
      REQUIRE_THROWS_AS(hypothesis_testing_divergence(rho, rho, eps), InvalidEps);
  }
}

TEST_CASE("hypothesis testing threshold scan") {
  Rng rng = make_stream(40, 0);

  SECTION("scan agrees with the exact program on commuting pairs") {
    for (int trial = 0; trial < 10; ++trial) {
      const std::size_t n = 2 + uniform_index(rng, 4);
      Distribution p = random_distribution(n, rng);
      Distribution q = random_distribution(n, rng);
      std::vector<CMatrix> ab{diag_state(p.weights()).matrix()};
      std::vector<CMatrix> bb{diag_state(q.weights()).matrix()};
      for (double eps : {0.2, 0.5}) {
        const double exact = detail::ht_exact_commuting(ab, bb, eps).bits;
        const double scanned = detail::ht_scan(ab, bb, eps).bits;
        REQUIRE(scanned == Catch::Approx(exact).margin(1e-9));
      }
    }
  }

  SECTION("non-commuting pairs give a finite monotone lower bound") {
    CMatrix am(2);
    am(0, 0) = 0.8;
    am(0, 1) = cd(0.25, 0.1);
    am(1, 0) = cd(0.25, -0.1);
    am(1, 1) = 0.2;
    DensityOperator a = as_density(am);
    DensityOperator b(random_density_matrix(rng, 2, 7), Normalization::normalized);
    double prev = -1.0;
    for (double eps : {0.1, 0.2, 0.3, 0.5, 0.7}) {
      DivergenceValue v = hypothesis_testing_divergence(a, b, eps);
      REQUIRE(v.bound == BoundKind::lower);
      REQUIRE(v.finite());
      REQUIRE(v.bits >= prev - 1e-9);
      REQUIRE(v.bits >= -1e-9);
      prev = v.bits;
    }
  }
}

TEST_CASE("conditional hypothesis testing mutual information") {
  Rng rng = make_stream(41, 0);

  auto factorized_joint = [&](std::size_t nq, std::size_t nx, std::size_t ny) {
    Distribution pq = random_distribution(nq, rng);
    std::vector<double> joint(nq * nx * ny);
    for (std::size_t q = 0; q < nq; ++q) {
      Distribution px = random_distribution(nx, rng);
      Distribution py = random_distribution(ny, rng);
      for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) joint[(q * nx + x) * ny + y] = pq[q] * px[x] * py[y];
    }
    return joint;
  };

  SECTION("channel output independent of the inputs reduces to the slack") {
    CMatrix tau = random_density_matrix(rng, 2);
    std::vector<DensityOperator> st(4, DensityOperator(tau, Normalization::normalized));
    TripartiteCqState s(2, 2, 2, factorized_joint(2, 2, 2), st);
    DivergenceValue v = conditional_ht_mutual_information(s, 0.25);
    REQUIRE(v.bits == Catch::Approx(-std::log2(0.75)).margin(1e-9));
    REQUIRE(v.bound == BoundKind::exact);
  }

  SECTION("trivial conditioning register reduces to the plain divergence") {
    Rng srng = make_stream(41, 1);
    auto st = classical_diagonal_states(4, 3, srng);
    std::vector<double> joint = factorized_joint(1, 2, 2);
    TripartiteCqState s(1, 2, 2, joint, st);
    const double eps = 0.3;
    DivergenceValue got = conditional_ht_mutual_information(s, eps);

    CMatrix avg(3);
    for (std::size_t i = 0; i < 4; ++i) avg.add_scaled(st[i].matrix(), joint[i]);
    std::vector<DensityOperator> refs(4, as_density(avg));
    DensityOperator lhs = as_density(assemble_blocks(joint, st));
    DensityOperator rhs = as_density(assemble_blocks(joint, refs));
    DivergenceValue direct = hypothesis_testing_divergence(lhs, rhs, eps);
    REQUIRE(got.bits == Catch::Approx(direct.bits).margin(1e-10));
  }

  SECTION("diagonal toy instance matches the exhaustive oracle") {
    Rng srng = make_stream(41, 2);
    auto st = classical_diagonal_states(4, 2, srng);
    std::vector<double> joint = factorized_joint(2, 2, 2);
    TripartiteCqState s(2, 2, 2, joint, st);

    // Flatten p(q,x,y) sigma_xy and p(q,x,y) sigma_q over (q,x,y,c).
    std::vector<double> pq(2, 0.0);
    std::vector<std::vector<double>> px(2, std::vector<double>(2, 0.0));
    std::vector<std::vector<double>> py(2, std::vector<double>(2, 0.0));
    for (std::size_t q = 0; q < 2; ++q)
      for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 2; ++y) {
          pq[q] += s.p(q, x, y);
          px[q][x] += s.p(q, x, y);
          py[q][y] += s.p(q, x, y);
        }
    std::vector<double> av, bv;
    for (std::size_t q = 0; q < 2; ++q)
      for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 2; ++y)
          for (std::size_t c = 0; c < 2; ++c) {
            av.push_back(s.p(q, x, y) * st[x * 2 + y].matrix()(c, c).real());
            double bar = 0.0;
            for (std::size_t xp = 0; xp < 2; ++xp)
              for (std::size_t yp = 0; yp < 2; ++yp)
                bar += (px[q][xp] / pq[q]) * (py[q][yp] / pq[q]) *
                       st[xp * 2 + yp].matrix()(c, c).real();
            bv.push_back(s.p(q, x, y) * bar);
          }
    const double eps = 0.3;
    const double beta = oracle_np(av, bv, 1.0 - eps);
    DivergenceValue got = conditional_ht_mutual_information(s, eps);
    REQUIRE(got.bits == Catch::Approx(-std::log2(beta)).margin(1e-9));
  }

  SECTION("non-factorizing joints are rejected") {
    Rng srng = make_stream(41, 3);
    auto st = classical_diagonal_states(4, 2, srng);
    std::vector<double> joint{0.4, 0.1, 0.1, 0.4};
    TripartiteCqState s(1, 2, 2, joint, st);
    REQUIRE_THROWS_AS(conditional_ht_mutual_information(s, 0.3), FactorizationViolation);
  }

  SECTION("single-sided cuts see through one-register dependence") {
    Rng srng = make_stream(41, 4);
    auto base = classical_diagonal_states(2, 2, srng);
    // States depend only on y, so X decouples from (Y, C) given Q.
    std::vector<DensityOperator> st{base[0], base[1], base[0], base[1]};
    TripartiteCqState s(2, 2, 2, factorized_joint(2, 2, 2), st);
    DivergenceValue v = conditional_ht_mutual_information(s, 0.25, ConditionalCut::x_yc);
    REQUIRE(v.bits == Catch::Approx(-std::log2(0.75)).margin(1e-9));
  }
}

TEST_CASE("sample size requirements") {
  Rng rng = make_stream(42, 0);
  const double eps = 1e-6;
  const double slack = 2.0 * std::log2(1.0 / eps);

  SECTION("identical states need only the budget slack") {
    CMatrix tau = random_density_matrix(rng, 3);
    std::vector<DensityOperator> st(4, DensityOperator(tau, Normalization::normalized));
    Distribution p = random_distribution(4, rng);
    MultipartiteEnsemble e({4}, p, {p}, st);
    auto req = sample_size_requirements(e, eps);
    REQUIRE(req.size() == 1);
    REQUIRE(req.at(1) == Catch::Approx(slack).margin(1e-4));
  }

  SECTION("orthogonal uniform ensembles add the alphabet exponent") {
    const std::size_t n = 4;
    MultipartiteEnsemble e({n}, Distribution::uniform(n), {Distribution::uniform(n)},
                           orthogonal_pure_states(n));
    auto req = sample_size_requirements(e, eps);
    REQUIRE(req.at(1) == Catch::Approx(2.0 + slack).margin(1e-4));
  }

  SECTION("bipartite ensembles report all three subsets") {
    Rng erng = make_stream(42, 1);
    Distribution joint = random_distribution(4, erng);
    std::vector<DensityOperator> st;
    for (int i = 0; i < 4; ++i)
      st.push_back(DensityOperator(random_density_matrix(erng, 2), Normalization::normalized));
    MultipartiteEnsemble e({2, 2}, joint, {random_distribution(2, erng),
                                           random_distribution(2, erng)},
                           st);
    auto req = sample_size_requirements(e, 0.1);
    REQUIRE(req.size() == 3);
    REQUIRE(req.count(1) == 1);
    REQUIRE(req.count(2) == 1);
    REQUIRE(req.count(3) == 1);
    for (const auto& kv : req) REQUIRE(std::isfinite(kv.second));
  }
}
