#pragma once

// Master-equation time evolution and steady states.
//
//   d rho/dt = -i[H(t), rho] + sum_k (L_k rho L_k^dag - {L_k^dag L_k, rho}/2)
//
// H(t) = H_base + sum_j (f_j(t) C_j + conj(f_j(t)) C_j^dag). Collapse operators
// are stored pre-multiplied by sqrt(rate).

#include <cstddef>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "catkerr/fock.hpp"

namespace catkerr {

using Envelope = std::function<cd(double)>;

/// Contributes f(t) C + conj(f(t)) C^dag to the Hamiltonian.
struct DriveTerm {
  Envelope envelope;
  Operator coupling;
};

struct CollapseOp {
  Operator op;        ///< already scaled by sqrt(rate)
  double rate = 1.0;  ///< nominal rate; sets the long-time convergence scale

  static CollapseOp from_rate(double rate, const Operator& op);
  /// Operator with its amplitude already folded in; nominal rate 1.
  static CollapseOp embedded(Operator op) { return {std::move(op), 1.0}; }
};

struct EvolutionProblem {
  Operator hamiltonian;
  std::vector<DriveTerm> drives;
  std::vector<CollapseOp> collapse_ops;
  std::variant<PureState, DensityMatrix> initial;
  double t0 = 0.0;
  double t1 = 0.0;
  std::vector<double> output_times;

  bool time_dependent() const { return !drives.empty(); }
  const Dims& dims() const { return hamiltonian.dims(); }
  void validate() const;
};

struct IntegratorOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  std::size_t max_steps = 5'000'000;
  double max_step = 0.0;  ///< 0 means unbounded
  double trace_drift_limit = 1e-4;
};

struct StepperStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
  double final_step = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  StepperStats stats;
};

/// Adaptive Dormand-Prince 5(4) integration with dense output at
/// `problem.output_times`. Problems without collapse operators that start
/// from a pure state are integrated on the state vector.
Trajectory evolve(const EvolutionProblem& problem, const IntegratorOptions& options = {});

/// Right-hand side of the master equation at time t.
Matrix lindblad_rhs(const EvolutionProblem& problem, double t, const Matrix& rho);

/// Largest system dimension accepted by `liouvillian`.
inline constexpr Eigen::Index kMaxLiouvillianDim = 80;

/// Superoperator with vec(d rho/dt) = L vec(rho), column stacking.
Matrix liouvillian(const Operator& hamiltonian, const std::vector<CollapseOp>& collapse_ops);

/// Column-stacking vec / unvec.
Vector vectorize(const Matrix& m);
Matrix unvectorize(const Vector& v, Eigen::Index n);

enum class SteadyStateMethod { LongTime, NullSpace };

struct SteadyStateOptions {
  SteadyStateMethod method = SteadyStateMethod::LongTime;
  /// Long-time convergence: ||d rho/dt||_F < convergence_eps * kappa_max.
  double convergence_eps = 1e-8;
  double max_time = 1e4;
  IntegratorOptions integrator{};
};

struct SteadyStateResult {
  DensityMatrix state;
  double elapsed_time = 0.0;  ///< simulated time (long-time method only)
  double residual = 0.0;      ///< ||d rho/dt||_F at the returned state
};

SteadyStateResult steady_state(const EvolutionProblem& problem, const SteadyStateOptions& options = {});

}  // namespace catkerr
