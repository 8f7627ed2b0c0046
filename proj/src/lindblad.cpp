#include "catkerr/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SparseCore>

namespace catkerr {

namespace {

constexpr cd kI{0.0, 1.0};

// Dormand-Prince 5(4) tableau with the 4th-order continuous extension.
namespace dp {
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
}  // namespace dp

using Sparse = Eigen::SparseMatrix<cd>;

Sparse sparse_view(const Matrix& m) {
  return m.sparseView(cd(1.0), 1e-300);
}

/// Evaluates the generator on sparse copies of the (banded) operators.
class Generator {
 public:
  Generator(const EvolutionProblem& p, bool pure) : problem_(p), pure_(pure) {
    for (const auto& c : p.collapse_ops) {
      jumps_.push_back(sparse_view(c.op.matrix()));
      jumps_dag_.push_back(sparse_view(c.op.matrix().adjoint()));
    }
    Matrix decay = Matrix::Zero(p.hamiltonian.dim(), p.hamiltonian.dim());
    for (const auto& c : p.collapse_ops) decay.noalias() += c.op.matrix().adjoint() * c.op.matrix();
    base_ = sparse_view(p.hamiltonian.matrix() - (0.5 * kI) * decay);
    for (const auto& d : p.drives) {
      couplings_.push_back(sparse_view(d.coupling.matrix()));
      couplings_dag_.push_back(sparse_view(d.coupling.matrix().adjoint()));
    }
  }

  const Sparse& heff(double t) {
    if (couplings_.empty()) return base_;
    current_ = base_;
    for (std::size_t j = 0; j < couplings_.size(); ++j) {
      const cd f = problem_.drives[j].envelope(t);
      if (f == cd(0.0)) continue;
      current_ += f * couplings_[j] + std::conj(f) * couplings_dag_[j];
    }
    return current_;
  }

  void operator()(double t, const Matrix& y, Matrix& dy) {
    const Sparse& h = heff(t);
    if (pure_) {
      dy.noalias() = h * y;
      dy *= -kI;
      return;
    }
    scratch_.noalias() = h * y;
    scratch_ *= -kI;
    dy = scratch_ + scratch_.adjoint();
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
      scratch_.noalias() = jumps_[k] * y;
      dy.noalias() += scratch_ * jumps_dag_[k];
    }
  }

 private:
  const EvolutionProblem& problem_;
  bool pure_;
  Sparse base_;
  Sparse current_;
  Matrix scratch_;
  std::vector<Sparse> jumps_, jumps_dag_, couplings_, couplings_dag_;
};

double error_norm(const Matrix& err, const Matrix& y0, const Matrix& y1, double rtol, double atol) {
  double acc = 0.0;
  const Eigen::Index n = err.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sc = atol + rtol * std::max(std::abs(y0.data()[i]), std::abs(y1.data()[i]));
    const double r = std::abs(err.data()[i]) / sc;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(n));
}

DensityMatrix to_density(const Matrix& y, bool pure, const Dims& dims) {
  if (pure) return DensityMatrix(y * y.adjoint(), dims, DensityMatrix::Unchecked{});
  return DensityMatrix(0.5 * (y + y.adjoint()), dims, DensityMatrix::Unchecked{});
}

double trace_of(const Matrix& y, bool pure) {
  return pure ? y.squaredNorm() : y.trace().real();
}

}  // namespace

CollapseOp CollapseOp::from_rate(double rate, const Operator& op) {
  if (!(rate >= 0.0)) throw DomainError("collapse rate must be non-negative");
  return {std::sqrt(rate) * op, rate};
}

void EvolutionProblem::validate() const {
  const auto& d = hamiltonian.dims();
  for (const auto& drv : drives) {
    if (drv.coupling.dims() != d) throw DimensionMismatch("drive coupling dims differ from Hamiltonian");
    if (!drv.envelope) throw DomainError("drive term without envelope");
  }
  for (const auto& c : collapse_ops) {
    if (c.op.dims() != d) throw DimensionMismatch("collapse operator dims differ from Hamiltonian");
  }
  const Dims& init_dims = std::visit([](const auto& s) -> const Dims& { return s.dims(); }, initial);
  if (init_dims != d) throw DimensionMismatch("initial state dims differ from Hamiltonian");
  if (!(t1 >= t0)) throw DomainError("t_span must satisfy t1 >= t0");
  if (!std::is_sorted(output_times.begin(), output_times.end())) {
    throw DomainError("output_times must be sorted");
  }
  if (!output_times.empty() && (output_times.front() < t0 || output_times.back() > t1)) {
    throw DomainError("output_times must lie inside [t0, t1]");
  }
}

Matrix lindblad_rhs(const EvolutionProblem& problem, double t, const Matrix& rho) {
  Generator gen(problem, false);
  Matrix out(rho.rows(), rho.cols());
  gen(t, rho, out);
  return out;
}

Trajectory evolve(const EvolutionProblem& problem, const IntegratorOptions& opt) {
  problem.validate();
  const bool pure = problem.collapse_ops.empty() && std::holds_alternative<PureState>(problem.initial);
  Matrix y = std::visit(
      [&](const auto& s) -> Matrix {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, PureState>) {
          if (pure) return s.amplitudes();
          return s.amplitudes() * s.amplitudes().adjoint();
        } else {
          return s.matrix();
        }
      },
      problem.initial);
  const Dims& dims = problem.dims();
  const double trace0 = trace_of(y, pure);

  Trajectory traj;
  std::size_t next_out = 0;
  auto record = [&](double t, const Matrix& state) {
    if (std::abs(trace_of(state, pure) - trace0) > opt.trace_drift_limit) {
      throw AccuracyError("trace drifted by more than " + std::to_string(opt.trace_drift_limit) +
                          " at t = " + std::to_string(t));
    }
    traj.times.push_back(t);
    traj.states.push_back(to_density(state, pure, dims));
  };

  double t = problem.t0;
  const double t_end = problem.t1;
  while (next_out < problem.output_times.size() && problem.output_times[next_out] <= t) {
    record(problem.output_times[next_out++], y);
  }
  if (t_end == t) return traj;

  Generator f(problem, pure);
  Matrix k1(y.rows(), y.cols()), k2 = k1, k3 = k1, k4 = k1, k5 = k1, k6 = k1, k7 = k1;
  Matrix tmp = k1, y1 = k1, err = k1;
  f(t, y, k1);
  traj.stats.rhs_evaluations++;

  // Initial step guess (Hairer & Wanner, II.4).
  double h;
  {
    const Matrix zero = Matrix::Zero(y.rows(), y.cols());
    const double d0 = error_norm(y, y, zero, opt.rel_tol, opt.abs_tol);
    const double d1 = error_norm(k1, y, zero, opt.rel_tol, opt.abs_tol);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, t_end - t);
    tmp = y + h0 * k1;
    f(t + h0, tmp, k2);
    traj.stats.rhs_evaluations++;
    const double d2 = error_norm(k2 - k1, y, zero, opt.rel_tol, opt.abs_tol) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
    h = std::min(100.0 * h0, h1);
  }
  if (opt.max_step > 0.0) h = std::min(h, opt.max_step);

  constexpr double safety = 0.9, fac_min = 0.2, fac_max = 10.0, beta = 0.04;
  const double expo1 = 0.2 - beta * 0.75;
  double err_old = 1e-4;
  bool last_rejected = false;

  while (t < t_end) {
    if (traj.stats.accepted + traj.stats.rejected >= opt.max_steps) {
      throw StiffnessError("step budget exhausted at t = " + std::to_string(t));
    }
    const double min_step = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
    if (h < min_step) throw StiffnessError("step size underflow at t = " + std::to_string(t));
    bool final_step = false;
    if (t + h >= t_end) {
      h = t_end - t;
      final_step = true;
    }

    using namespace dp;
    tmp = y + (h * a21) * k1;
    f(t + c2 * h, tmp, k2);
    tmp = y + h * (a31 * k1 + a32 * k2);
    f(t + c3 * h, tmp, k3);
    tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f(t + c4 * h, tmp, k4);
    tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(t + c5 * h, tmp, k5);
    tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(t + h, tmp, k6);
    y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    f(t + h, y1, k7);
    traj.stats.rhs_evaluations += 6;
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = error_norm(err, y, y1, opt.rel_tol, opt.abs_tol);

    if (!std::isfinite(en)) {
      h *= fac_min;
      traj.stats.rejected++;
      last_rejected = true;
      continue;
    }

    // PI step-size controller.
    const double fac11 = std::pow(en, expo1);
    double fac = fac11 / std::pow(err_old, beta);
    fac = std::clamp(fac / safety, 1.0 / fac_max, 1.0 / fac_min);
    double h_new = h / fac;

    if (en <= 1.0) {
      err_old = std::max(en, 1e-4);
      const double t_new = final_step ? t_end : t + h;
      while (next_out < problem.output_times.size() && problem.output_times[next_out] <= t_new) {
        const double to = problem.output_times[next_out];
        const double theta = (to - t) / h;
        const double theta1 = 1.0 - theta;
        const Matrix ydiff = y1 - y;
        const Matrix bspl = h * k1 - ydiff;
        const Matrix r4 = ydiff - h * k7 - bspl;
        const Matrix r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        Matrix yo = y + theta * (ydiff + theta1 * (bspl + theta * (r4 + theta1 * r5)));
        if (!pure) yo = 0.5 * (yo + yo.adjoint()).eval();
        record(to, yo);
        ++next_out;
      }
      y = y1;
      if (!pure) y = 0.5 * (y + y.adjoint()).eval();
      k1 = k7;
      t = t_new;
      traj.stats.accepted++;
      traj.stats.final_step = h;
      if (last_rejected) h_new = std::min(h_new, h);
      last_rejected = false;
      if (opt.max_step > 0.0) h_new = std::min(h_new, opt.max_step);
      h = h_new;
    } else {
      h = h / std::min(1.0 / fac_min, fac11 / safety);
      traj.stats.rejected++;
      last_rejected = true;
    }
  }
  return traj;
}

Vector vectorize(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvectorize(const Vector& v, Eigen::Index n) {
  if (v.size() != n * n) throw DimensionMismatch("vector length is not n^2");
  return Eigen::Map<const Matrix>(v.data(), n, n);
}

Matrix liouvillian(const Operator& hamiltonian, const std::vector<CollapseOp>& collapse_ops) {
  const Eigen::Index n = hamiltonian.dim();
  if (n > kMaxLiouvillianDim) {
    throw DomainError("liouvillian: dimension " + std::to_string(n) + " exceeds dense limit " +
                      std::to_string(kMaxLiouvillianDim));
  }
  const Matrix id = Matrix::Identity(n, n);
  const Matrix& h = hamiltonian.matrix();
  // vec(A X B) = (B^T kron A) vec(X)
  Matrix sup = -kI * (kron<double>(id, h) - kron<double>(h.transpose(), id));
  for (const auto& c : collapse_ops) {
    if (c.op.dims() != hamiltonian.dims()) throw DimensionMismatch("collapse operator dims differ");
    const Matrix& l = c.op.matrix();
    const Matrix ldl = l.adjoint() * l;
    sup += kron<double>(l.conjugate(), l) - 0.5 * kron<double>(id, ldl) -
           0.5 * kron<double>(ldl.transpose(), id);
  }
  return sup;
}

namespace {

double collapse_scale(const EvolutionProblem& p) {
  double kappa = 0.0;
  for (const auto& c : p.collapse_ops) kappa = std::max(kappa, c.rate);
  return kappa;
}

DensityMatrix normalised(const Matrix& m, const Dims& dims) {
  Matrix h = 0.5 * (m + m.adjoint());
  h /= h.trace().real();
  return DensityMatrix(std::move(h), dims, DensityMatrix::Unchecked{});
}

}  // namespace

SteadyStateResult steady_state(const EvolutionProblem& problem, const SteadyStateOptions& options) {
  problem.validate();
  if (problem.time_dependent()) throw DomainError("steady_state needs a time-independent Hamiltonian");
  const Dims& dims = problem.dims();

  if (options.method == SteadyStateMethod::NullSpace) {
    const Eigen::Index n = problem.hamiltonian.dim();
    Matrix sup = liouvillian(problem.hamiltonian, problem.collapse_ops);
    // The trace functional replaces the (redundant) first equation.
    sup.row(0).setZero();
    for (Eigen::Index i = 0; i < n; ++i) sup(0, i * n + i) = 1.0;
    Vector rhs = Vector::Zero(n * n);
    rhs(0) = 1.0;
    const Vector x = sup.partialPivLu().solve(rhs);
    auto state = normalised(unvectorize(x, n), dims);
    const double residual = lindblad_rhs(problem, 0.0, state.matrix()).norm();
    return {std::move(state), 0.0, residual};
  }

  const double kappa = collapse_scale(problem);
  if (kappa <= 0.0) throw DomainError("long-time steady state needs a non-zero collapse operator");
  const double threshold = options.convergence_eps * kappa;
  const double chunk = 1.0 / kappa;

  EvolutionProblem p = problem;
  p.output_times.clear();
  p.t0 = 0.0;
  double elapsed = 0.0;
  DensityMatrix current = std::visit(
      [](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, PureState>) return DensityMatrix(s);
        else return s;
      },
      problem.initial);
  // Integration noise puts a floor of roughly tol * ||L|| under the residual;
  // tolerances are tightened whenever a chunk stops making progress.
  IntegratorOptions integ = options.integrator;
  constexpr double kMinRelTol = 1e-13;
  double previous = std::numeric_limits<double>::infinity();
  while (true) {
    const double residual = lindblad_rhs(problem, 0.0, current.matrix()).norm();
    if (residual < threshold) return {current, elapsed, residual};
    if (elapsed >= options.max_time) {
      throw ConvergenceError("steady state not reached within t = " + std::to_string(options.max_time) +
                             " (||drho/dt|| = " + std::to_string(residual) + ")");
    }
    if (residual > 0.7 * previous && integ.rel_tol > kMinRelTol) {
      integ.rel_tol = std::max(kMinRelTol, integ.rel_tol / 10.0);
      integ.abs_tol = std::max(kMinRelTol * 1e-2, integ.abs_tol / 10.0);
    }
    previous = residual;
    p.initial = current;
    p.t1 = std::min(chunk, options.max_time - elapsed);
    p.output_times = {p.t1};
    auto traj = evolve(p, integ);
    current = normalised(traj.states.back().matrix(), dims);
    elapsed += p.t1;
  }
}

}  // namespace catkerr
