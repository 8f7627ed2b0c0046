#include <doctest.h>

#include <cmath>

#include "catkerr/lindblad.hpp"
#include "catkerr/model.hpp"
#include "catkerr/observables.hpp"
#include "oracles.hpp"

using namespace catkerr;

namespace {

std::vector<double> grid(double t0, double t1, int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = t0 + (t1 - t0) * i / (n - 1);
  return t;
}

EvolutionProblem driven_kerr(double K, cd Ep, double kappa, int N) {
  ModelSpec s;
  s.K = K;
  s.Ep = Ep;
  s.kappa = kappa;
  s.N = N;
  EvolutionProblem p{build_H0(s), {}, {}, fock_state(N, 0), 0.0, 0.0, {}};
  if (kappa > 0) p.collapse_ops.push_back(CollapseOp::from_rate(kappa, annihilation(N)));
  return p;
}

}  // namespace

TEST_CASE("single-photon decay matches the exact exponential") {
  const int N = 6;
  const double kappa = 0.7;
  EvolutionProblem p{Operator(Matrix::Zero(N, N)), {}, {CollapseOp::from_rate(kappa, annihilation(N))},
                     fock_state(N, 1), 0.0, 5.0, grid(0.0, 5.0, 41)};
  const auto traj = evolve(p);
  REQUIRE(traj.states.size() == 41);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    CHECK(std::abs(mean_photon(traj.states[i]) - oracle::one_photon_decay(kappa, traj.times[i])) < 1e-6);
  }
  CHECK(traj.stats.accepted > 0);
  CHECK(traj.stats.final_step > 0.0);
}

TEST_CASE("dense output is consistent with stepping to each output time") {
  const int N = 6;
  EvolutionProblem p{Operator(Matrix::Zero(N, N)), {}, {CollapseOp::from_rate(1.3, annihilation(N))},
                     fock_state(N, 2), 0.0, 3.0, {0.37, 1.111, 2.5}};
  const auto dense = evolve(p);
  for (std::size_t i = 0; i < p.output_times.size(); ++i) {
    auto q = p;
    q.t1 = p.output_times[i];
    q.output_times = {q.t1};
    const auto direct = evolve(q);
    CHECK((dense.states[i].matrix() - direct.states.back().matrix()).norm() < 1e-7);
  }
}

TEST_CASE("cat eigenstate is stationary without loss") {
  const int N = 30;
  auto p = driven_kerr(1.0, 4.0, 0.0, N);
  const auto cat = cat_state(cd(2.0), Parity::Even, N);
  p.initial = DensityMatrix(cat);  // force the density-matrix path
  p.t1 = 10.0;
  p.output_times = grid(0.0, 10.0, 21);
  const auto traj = evolve(p);
  for (const auto& rho : traj.states) CHECK(fidelity(rho, cat) > 1 - 1e-6);
}

TEST_CASE("two-photon drive from vacuum conserves parity") {
  const int N = 25;
  auto p = driven_kerr(1.0, 0.0, 0.0, N);
  const auto a = annihilation(N);
  p.drives.push_back({[](double t) { return cd(4.0 * (1.0 - std::exp(-std::pow(t / 2.0, 4)))); }, dag(a) * dag(a)});
  p.t1 = 4.0;
  p.output_times = grid(0.0, 4.0, 17);
  SUBCASE("state-vector path") {
    const auto traj = evolve(p);
    for (const auto& rho : traj.states) CHECK(std::abs(parity_expectation(rho) - 1.0) < 1e-8);
    CHECK(mean_photon(traj.states.back()) > 1.0);
  }
  SUBCASE("density-matrix path") {
    p.initial = DensityMatrix(fock_state(N, 0));
    const auto traj = evolve(p);
    for (const auto& rho : traj.states) CHECK(std::abs(parity_expectation(rho) - 1.0) < 1e-8);
  }
}

TEST_CASE("pure and density-matrix paths agree") {
  const int N = 20;
  auto p = driven_kerr(1.0, cd(2.0, 0.5), 0.0, N);
  p.initial = coherent_state(cd(0.5, 0.2), N);
  p.t1 = 2.0;
  p.output_times = {2.0};
  const auto a = evolve(p);
  p.initial = DensityMatrix(coherent_state(cd(0.5, 0.2), N));
  const auto b = evolve(p);
  CHECK((a.states[0].matrix() - b.states[0].matrix()).norm() < 1e-7);
}

TEST_CASE("trajectory states satisfy density-matrix invariants") {
  const int N = 20;
  auto p = driven_kerr(1.0, 4.0, 0.5, N);
  p.initial = cat_state(cd(1.5), Parity::Odd, N);
  p.t1 = 3.0;
  p.output_times = grid(0.0, 3.0, 13);
  const auto traj = evolve(p);
  const double tr0 = traj.states.front().matrix().trace().real();
  for (const auto& rho : traj.states) {
    CHECK_NOTHROW(rho.validate(1e-10, 1e-6, 1e-8));
    CHECK(std::abs(rho.matrix().trace().real() - tr0) < 1e-6);
  }
}

TEST_CASE("refining the tolerance changes little") {
  const int N = 20;
  auto p = driven_kerr(1.0, 4.0, 0.2, N);
  p.t1 = 3.0;
  p.output_times = {3.0};
  const auto target = cat_state(cd(2.0), Parity::Even, N);
  IntegratorOptions o;
  const double f1 = fidelity(evolve(p, o).states[0], target);
  o.rel_tol /= 2;
  const double f2 = fidelity(evolve(p, o).states[0], target);
  CHECK(std::abs(f1 - f2) < 1e-8);
}

TEST_CASE("integrator error reporting") {
  const int N = 10;
  auto p = driven_kerr(1.0, 2.0, 0.5, N);
  p.t1 = 50.0;
  p.output_times = {50.0};
  IntegratorOptions o;
  o.max_steps = 5;
  CHECK_THROWS_AS(evolve(p, o), StiffnessError);
  CHECK_THROWS_AS(evolve(p, o), NumericalError);
  o = IntegratorOptions{};
  o.rel_tol = 1e-1;
  o.abs_tol = 1e-1;
  o.trace_drift_limit = 1e-15;
  CHECK_THROWS_AS(evolve(p, o), AccuracyError);
}

TEST_CASE("problem validation") {
  auto p = driven_kerr(1.0, 1.0, 0.0, 8);
  p.t1 = 1.0;
  p.output_times = {0.5, 0.2};
  CHECK_THROWS_AS(evolve(p), DomainError);
  p.output_times = {2.0};
  CHECK_THROWS_AS(evolve(p), DomainError);
  p.output_times = {};
  p.initial = fock_state(9, 0);
  CHECK_THROWS_AS(evolve(p), DimensionMismatch);
  CHECK_THROWS_AS(CollapseOp::from_rate(-1.0, annihilation(8)), DomainError);
}

TEST_CASE("liouvillian structure") {
  const int N = 6;
  SUBCASE("zero generator") {
    const Matrix l = liouvillian(Operator(Matrix::Zero(N, N)), {});
    CHECK(l.norm() == 0.0);
  }
  SUBCASE("trace preservation and agreement with the direct generator") {
    ModelSpec s;
    s.Ep = cd(1.0, 0.3);
    s.N = N;
    std::vector<CollapseOp> c{CollapseOp::from_rate(0.4, annihilation(N)),
                              CollapseOp::from_rate(0.1, annihilation(N) * annihilation(N))};
    const Matrix l = liouvillian(build_H0(s), c);
    const Vector vid = vectorize(Matrix::Identity(N, N));
    CHECK((vid.adjoint() * l).norm() < 1e-10);
    EvolutionProblem p{build_H0(s), {}, c, fock_state(N, 0), 0.0, 0.0, {}};
    const Matrix rho = DensityMatrix(coherent_state(cd(0.4, -0.3), N)).matrix();
    const Matrix direct = lindblad_rhs(p, 0.0, rho);
    CHECK((unvectorize(l * vectorize(rho), N) - direct).norm() < 1e-12);
  }
  SUBCASE("dimension guard") {
    CHECK_THROWS_AS(liouvillian(identity(81), {}), DomainError);
  }
  SUBCASE("vectorisation is column stacking") {
    Matrix m(2, 2);
    m << cd(1), cd(2), cd(3), cd(4);
    const Vector v = vectorize(m);
    CHECK(v(1) == cd(3));
    CHECK(v(2) == cd(2));
    CHECK((unvectorize(v, 2) - m).norm() == 0.0);
  }
}

TEST_CASE("steady states") {
  SUBCASE("empty cavity decays to vacuum") {
    auto p = driven_kerr(1.7, 0.0, 1.0, 12);
    p.initial = coherent_state(cd(1.0, 0.5), 12);
    for (auto m : {SteadyStateMethod::LongTime, SteadyStateMethod::NullSpace}) {
      SteadyStateOptions o;
      o.method = m;
      const auto ss = steady_state(p, o);
      CHECK(fidelity(ss.state, fock_state(12, 0)) > 1 - 1e-8);
    }
  }
  SUBCASE("long-time and null-space agree") {
    auto p = driven_kerr(1.0, 4.0, 2.0, 20);
    SteadyStateOptions lt;
    SteadyStateOptions ns;
    ns.method = SteadyStateMethod::NullSpace;
    const auto a = steady_state(p, lt);
    const auto b = steady_state(p, ns);
    CHECK(a.elapsed_time > 0.0);
    CHECK(std::abs(fidelity(a.state, b.state) - 1.0) < 1e-6);
    const auto e = lossy_eigen_amplitude(ModelSpec{1.0, 4.0, 2.0, 0, 0, 0, 2, 20});
    const Matrix rs = 0.5 * (DensityMatrix(coherent_state(e.alpha0, 20)).matrix() +
                             DensityMatrix(coherent_state(-e.alpha0, 20)).matrix());
    const DensityMatrix ideal(rs, Dims{20});
    CHECK(std::abs(fidelity(a.state, ideal) - fidelity(b.state, ideal)) < 1e-6);
  }
  SUBCASE("null-space state is annihilated by the liouvillian") {
    const double kappa = 2.0;
    auto p = driven_kerr(1.0, 4.0, kappa, 25);
    SteadyStateOptions o;
    o.method = SteadyStateMethod::NullSpace;
    const auto ss = steady_state(p, o);
    const Matrix l = liouvillian(p.hamiltonian, p.collapse_ops);
    CHECK((l * vectorize(ss.state.matrix())).norm() < 1e-6 * kappa);
    CHECK_NOTHROW(ss.state.validate());
  }
  SUBCASE("driven steady state is an equal mixture at large alpha0") {
    // alpha0 = 3.999 with kappa / (8 K alpha0^2) = 0.016
    auto p = driven_kerr(1.0, 16.0, 2.0, 45);
    const auto ss = steady_state(p);
    CHECK(std::abs(purity(ss.state) - 0.5) < 1e-3);
  }
  SUBCASE("errors") {
    auto p = driven_kerr(1.0, 4.0, 0.0, 10);
    CHECK_THROWS_AS(steady_state(p), DomainError);
    p = driven_kerr(1.0, 4.0, 1.0, 10);
    p.drives.push_back({[](double) { return cd(1.0); }, annihilation(10)});
    CHECK_THROWS_AS(steady_state(p), DomainError);
    p.drives.clear();
    SteadyStateOptions o;
    o.max_time = 0.5;
    CHECK_THROWS_AS(steady_state(p, o), ConvergenceError);
  }
}
