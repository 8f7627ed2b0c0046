#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "catkerr/model.hpp"
#include "oracles.hpp"

using namespace catkerr;

namespace {

ModelSpec spec_with(double K, cd Ep, double kappa, int N) {
  ModelSpec s;
  s.K = K;
  s.Ep = Ep;
  s.kappa = kappa;
  s.N = N;
  return s;
}

double residual(const Operator& h, const Vector& v, cd e) {
  return (h.matrix() * v - e * v).norm();
}

// Smallest principal angle cosine^2 between span(u) and span(v) (both orthonormalised).
double subspace_overlap(const Matrix& u, const Matrix& v) {
  const Matrix qu = u.householderQr().householderQ() * Matrix::Identity(u.rows(), u.cols());
  const Matrix qv = v.householderQr().householderQ() * Matrix::Identity(v.rows(), v.cols());
  Eigen::JacobiSVD<Matrix> svd(qu.adjoint() * qv);
  const double s = svd.singularValues().minCoeff();
  return s * s;
}

}  // namespace

TEST_CASE("model spec validation") {
  ModelSpec s;
  s.kappa = -1.0;
  CHECK_THROWS_AS(s.validate(), DomainError);
  s = ModelSpec{};
  s.N = 1;
  CHECK_THROWS_AS(s.validate(), InvalidTruncation);
  s = ModelSpec{};
  s.n_drive = 1;
  CHECK_THROWS_AS(s.validate(), DomainError);
}

TEST_CASE("H0 coherent eigenstates") {
  const auto s = spec_with(1.0, 4.0, 0.0, 30);
  const auto h = build_H0(s);
  CHECK(h.is_hermitian(1e-12));
  for (double sign : {1.0, -1.0}) {
    const Vector v = oracle::coherent_series(sign * 2.0, 30);
    CHECK(residual(h, v / v.norm(), 16.0) < 1e-5);
  }
}

TEST_CASE("H0 without drive is diagonal") {
  const auto h = build_H0(spec_with(1.0, 0.0, 0.0, 12));
  for (int n = 0; n < 12; ++n) CHECK(h.matrix()(n, n).real() == doctest::Approx(-n * (n - 1.0)));
  CHECK((h.matrix() - Matrix(h.matrix().diagonal().asDiagonal())).norm() == 0.0);
}

TEST_CASE("H0 commutes with parity") {
  const auto s = spec_with(1.3, cd(2.0, -0.7), 0.0, 20);
  const auto c = commutator(build_H0(s), parity_operator(20));
  CHECK(c.matrix().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Hn reduces to H0 for n = 2") {
  const auto s = spec_with(0.8, cd(1.5, 0.5), 0.0, 20);
  CHECK((build_Hn(s).matrix() - build_H0(s).matrix()).norm() == 0.0);
}

TEST_CASE("Hn three-photon coherent triplet") {
  auto s = spec_with(1.0, 1.0, 0.0, 40);
  s.n_drive = 3;
  const auto h = build_Hn(s);
  Matrix basis(40, 3);
  for (int k = 0; k < 3; ++k) {
    const cd alpha = std::polar(1.0, 2.0 * M_PI * k / 3.0);
    CHECK(std::abs(std::pow(alpha, 3) - cd(1.0)) < 1e-12);
    const Vector v = oracle::coherent_series(alpha, 40);
    basis.col(k) = v / v.norm();
    CHECK(residual(h, basis.col(k), 1.0) < 1e-4);
  }
  SUBCASE("near-degenerate triplet at the top of the spectrum") {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
    const auto& ev = es.eigenvalues();
    const Eigen::Index n = ev.size();
    const double spread = ev(n - 1) - ev(n - 3);
    const double gap = ev(n - 3) - ev(n - 4);
    CHECK(spread < 0.5 * gap);
    CHECK(subspace_overlap(es.eigenvectors().rightCols(3), basis) > 1 - 1e-6);
  }
  s.N = 8;
  CHECK_THROWS_AS(build_Hn(s), TruncationInadequate);
}

TEST_CASE("Hn multiplets for n = 2, 3, 4") {
  for (int nd : {2, 3, 4}) {
    auto s = spec_with(1.0, 6.0, 0.0, 60);
    s.n_drive = nd;
    const auto h = build_Hn(s);
    const double r = std::pow(6.0, 1.0 / nd);
    Matrix basis(60, nd);
    for (int k = 0; k < nd; ++k) {
      const Vector v = oracle::coherent_series(std::polar(r, 2.0 * M_PI * k / nd), 60);
      basis.col(k) = v / v.norm();
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
    const auto& ev = es.eigenvalues();
    const Eigen::Index n = ev.size();
    CHECK(ev(n - 1) - ev(n - nd) < 0.5 * (ev(n - nd) - ev(n - nd - 1)));
    CHECK(subspace_overlap(es.eigenvectors().rightCols(nd), basis) > 1 - 1e-4);
  }
}

TEST_CASE("gate Hamiltonians") {
  auto s = spec_with(1.0, 4.0, 0.0, 20);
  CHECK((build_Hz(s).matrix() - build_H0(s).matrix()).norm() == 0.0);
  CHECK((build_Hx(s).matrix() - build_H0(s).matrix()).norm() == 0.0);
  s.Ez = 0.3;
  s.delta_x = 0.2;
  s.Ezz = 0.1;
  CHECK(build_Hz(s).is_hermitian(1e-12));
  CHECK(build_Hx(s).is_hermitian(1e-12));
  s.N = 8;
  const auto hzz = build_Hzz(s);
  CHECK(hzz.dims() == Dims{8, 8});
  CHECK(hzz.is_hermitian(1e-12));
  // exchange term conserves total photon number
  const auto ntot = embed(number(8), 0, hzz.dims()) + embed(number(8), 1, hzz.dims());
  const auto h_ex = hzz - embed(build_H0(s), 0, hzz.dims()) - embed(build_H0(s), 1, hzz.dims());
  CHECK(commutator(h_ex, ntot).matrix().cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Heff") {
  auto s = spec_with(1.0, 4.0, 0.0, 20);
  CHECK((build_Heff(s).matrix() - build_H0(s).matrix()).norm() == 0.0);
  s.kappa = 0.5;
  const Matrix anti = build_Heff(s).matrix() - build_H0(s).matrix();
  for (int n = 0; n < 20; ++n) CHECK(anti(n, n).imag() == doctest::Approx(-0.25 * n));
}

TEST_CASE("lossy eigen-amplitude") {
  SUBCASE("lossless limit") {
    const auto e = lossy_eigen_amplitude(spec_with(1.0, 4.0, 0.0, 30));
    CHECK(e.r0 == doctest::Approx(2.0));
    CHECK(std::abs(e.theta0) < 1e-12);
    CHECK_FALSE(e.below_threshold);
  }
  SUBCASE("strong-drive lossy regime") {
    const auto e = lossy_eigen_amplitude(spec_with(1.0, 16.0, 8.0, 40));
    CHECK(e.r0 == doctest::Approx(std::pow(252.0, 0.25)).epsilon(1e-12));
    CHECK(std::abs(e.theta0) == doctest::Approx(0.5 * std::atan(8.0 / std::sqrt(4032.0))).epsilon(1e-12));
    CHECK(e.theta0 < 0.0);  // theta0 < 0 for Ep > 0, K > 0
    CHECK(std::abs(displaced_linear_residual(spec_with(1.0, 16.0, 8.0, 40), e.alpha0)) < 1e-10);
  }
  SUBCASE("negative Kerr") {
    const auto s = spec_with(-1.0, -4.0, 8.0, 30);
    const auto e = lossy_eigen_amplitude(s);
    CHECK(e.r0 == doctest::Approx(std::pow(12.0, 0.25)).epsilon(1e-12));
    CHECK(std::abs(displaced_linear_residual(s, e.alpha0)) < 1e-10);
  }
  SUBCASE("below threshold") {
    const auto e = lossy_eigen_amplitude(spec_with(1.0, 1.0, 4.0, 30));
    CHECK(e.below_threshold);
    CHECK(e.r0 == 0.0);
  }
  SUBCASE("continuity as kappa -> 0") {
    double prev = 1.0;
    for (double kappa : {1.0, 0.1, 0.01, 0.001}) {
      const auto e = lossy_eigen_amplitude(spec_with(1.0, 4.0, kappa, 30));
      const double d = std::abs(e.alpha0 - cd(2.0));
      CHECK(d < prev);
      prev = d;
    }
    CHECK(prev < 1e-3);
  }
  SUBCASE("complex drive phase") {
    const auto s = spec_with(1.0, std::polar(4.0, 1.0), 0.2, 30);
    const auto e = lossy_eigen_amplitude(s);
    CHECK(std::abs(displaced_linear_residual(s, e.alpha0)) < 1e-10);
  }
}

TEST_CASE("displaced linear residual") {
  const auto s = spec_with(1.0, 4.0, 0.1, 40);
  CHECK(displaced_linear_residual(s, 0.0) == cd(0.0));
  const auto e = lossy_eigen_amplitude(s);
  CHECK(std::abs(displaced_linear_residual(s, e.alpha0)) < 1e-10);
  CHECK(std::abs(displaced_linear_residual(s, -e.alpha0)) < 1e-10);
  CHECK(std::abs(displaced_linear_residual(s, 1.01 * e.alpha0)) > 1e-3);
  // the wrong branch is not a root
  const cd mirrored = std::polar(e.r0, -e.theta0);
  CHECK(std::abs(displaced_linear_residual(s, mirrored)) > 1e-3);
}

TEST_CASE("Heff residual in the weak-loss regime") {
  const auto s = spec_with(1.0, 4.0, 0.1, 40);
  const auto e = lossy_eigen_amplitude(s);
  CHECK(heff_relative_residual(s, e.alpha0) < 1e-2);
}

TEST_CASE("Heff residual grows towards the strong-loss limit") {
  // kappa / (8 |K alpha0^2|) swept towards 1/4 at fixed Ep
  double prev = 0.0;
  for (double kappa : {0.5, 2.0, 4.0, 6.0, 7.5}) {
    const auto s = spec_with(1.0, 4.0, kappa, 40);
    const auto e = lossy_eigen_amplitude(s);
    const double r = heff_relative_residual(s, e.alpha0);
    CHECK(r > prev);
    prev = r;
  }
}

TEST_CASE("kappa = 0 cat-subspace degeneracy") {
  for (const auto& [K, Ep] : {std::pair{1.0, 8.0}, std::pair{-1.0, -8.0}}) {
    const auto s = spec_with(K, Ep, 0.0, 70);
    const double a0 = std::sqrt(Ep / K);
    REQUIRE(std::exp(-2.0 * a0 * a0) < 1e-6);
    Eigen::SelfAdjointEigenSolver<Matrix> es(build_H0(s).matrix());
    const double target = Ep * Ep / K;
    std::vector<std::pair<double, Eigen::Index>> dist;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      dist.emplace_back(std::abs(es.eigenvalues()(i) - target), i);
    }
    std::sort(dist.begin(), dist.end());
    const double e1 = es.eigenvalues()(dist[0].second), e2 = es.eigenvalues()(dist[1].second);
    CHECK(std::abs(e1 - e2) < 1e-6 * std::abs(K));
    Matrix eig(70, 2), cats(70, 2);
    eig.col(0) = es.eigenvectors().col(dist[0].second);
    eig.col(1) = es.eigenvectors().col(dist[1].second);
    cats.col(0) = oracle::cat_superposition(a0, +1, 70);
    cats.col(1) = oracle::cat_superposition(a0, -1, 70);
    CHECK(subspace_overlap(eig, cats) > 1 - 1e-6);
  }
}

TEST_CASE("logical projection") {
  SUBCASE("identity") {
    const auto m = project_to_logical(identity(40), 2.0);
    CHECK((m - Eigen::Matrix2cd::Identity()).norm() < 1e-12);
    const auto ls = logical_states(2.0, 40);
    CHECK(std::abs(inner(ls.zero, ls.one)) < 1e-12);
  }
  SUBCASE("single-photon drive lifts the degeneracy by 4 Ez alpha0") {
    const double Ez = 0.8, a0 = 2.0;
    const double dz = 4.0 * Ez * a0;
    const auto a = annihilation(40);
    const auto m = project_to_logical(Ez * (dag(a) + a), a0);
    const double corr = std::exp(-2.0 * a0 * a0) * dz;
    CHECK(std::abs(m(0, 0) - cd(dz / 2)) < corr);
    CHECK(std::abs(m(1, 1) + cd(dz / 2)) < corr);
    CHECK(std::abs(m(0, 1)) < corr);
  }
  SUBCASE("number operator, raw coherent matrix elements") {
    const double a0 = 1.0;
    const auto m = project_to_logical(number(40), a0, LogicalBasis::Raw);
    const double off = a0 * a0 * std::exp(-2.0 * a0 * a0);
    CHECK(std::abs(m(0, 0) - cd(a0 * a0)) < 1e-10);
    CHECK(std::abs(m(1, 1) - cd(a0 * a0)) < 1e-10);
    CHECK(std::abs(m(0, 1) + cd(off)) < 1e-10);
    CHECK(std::abs(m(1, 0) + cd(off)) < 1e-10);
  }
  SUBCASE("number operator, orthonormal basis analytic form") {
    for (double a0 : {1.0, 1.5, 2.0}) {
      const double x = 2.0 * a0 * a0;
      const auto m = project_to_logical(number(40), a0);
      CHECK(std::abs(m(0, 0) - cd(a0 * a0 / std::tanh(x))) < 1e-10);
      CHECK(std::abs(m(0, 1) + cd(a0 * a0 / std::sinh(x))) < 1e-10);
    }
  }
  SUBCASE("detuning off-diagonal matches delta_x |a0|^2 e^{-2|a0|^2}") {
    for (double a0 : {1.0, 1.5, 2.0, 2.5}) {
      auto s = spec_with(1.0, a0 * a0, 0.0, 40);
      s.delta_x = 1.0 / 3.0;
      const auto m = project_to_logical(build_Hx(s) - build_H0(s), a0, LogicalBasis::Raw);
      const double expected = s.delta_x * a0 * a0 * std::exp(-2.0 * a0 * a0);
      CHECK(std::abs(std::abs(m(0, 1)) - expected) < 0.05 * expected);
    }
  }
  SUBCASE("ill-conditioned basis") {
    CHECK_THROWS_AS(project_to_logical(identity(20), 0.05), IllConditionedBasis);
    CHECK_THROWS_AS(logical_states(0.05, 20), IllConditionedBasis);
  }
}
