#include "catkerr/model.hpp"

#include <array>
#include <cmath>
#include <string>

namespace catkerr {

namespace {

constexpr cd kI{0.0, 1.0};

Operator kerr_drive(const ModelSpec& spec, int order) {
  const int n = spec.N;
  const auto a = annihilation(n);
  const auto an = power(a, order);
  const auto adn = dag(an);
  return (-spec.K) * (adn * an) + spec.Ep * adn + std::conj(spec.Ep) * an;
}

}  // namespace

void ModelSpec::validate() const {
  if (kappa < 0.0) throw DomainError("kappa must be non-negative");
  if (N < 2) throw InvalidTruncation("N must be at least 2");
  if (n_drive < 2) throw DomainError("n_drive must be at least 2");
  if (!std::isfinite(K) || !std::isfinite(Ep.real()) || !std::isfinite(Ep.imag())) {
    throw DomainError("model parameters must be finite");
  }
}

Operator build_H0(const ModelSpec& spec) {
  spec.validate();
  return kerr_drive(spec, 2);
}

Operator build_Hn(const ModelSpec& spec) {
  spec.validate();
  if (3 * spec.n_drive > spec.N) {
    throw TruncationInadequate("build_Hn: n_drive must not exceed N/3", 3 * spec.n_drive);
  }
  return kerr_drive(spec, spec.n_drive);
}

Operator build_Hz(const ModelSpec& spec) {
  const auto a = annihilation(spec.N);
  return build_H0(spec) + spec.Ez * (dag(a) + a);
}

Operator build_Hx(const ModelSpec& spec) {
  return build_H0(spec) + spec.delta_x * number(spec.N);
}

Operator build_Hzz(const ModelSpec& spec) {
  const auto h0 = build_H0(spec);
  const Dims dims{spec.N, spec.N};
  const auto a = annihilation(spec.N);
  const auto a1 = embed(a, 0, dims);
  const auto a2 = embed(a, 1, dims);
  return embed(h0, 0, dims) + embed(h0, 1, dims) + spec.Ezz * (dag(a1) * a2 + a1 * dag(a2));
}

Operator build_Heff(const ModelSpec& spec) {
  return build_H0(spec) + (-0.5 * spec.kappa * kI) * number(spec.N);
}

cd displaced_linear_residual(const ModelSpec& spec, cd alpha0) {
  const cd ac = std::conj(alpha0);
  return -2.0 * spec.K * alpha0 * alpha0 * ac + 2.0 * spec.Ep * ac - kI * (spec.kappa / 2.0) * alpha0;
}

cd displaced_energy(const ModelSpec& spec, cd alpha0) {
  const double m = std::norm(alpha0);
  return -spec.K * m * m + std::conj(spec.Ep) * alpha0 * alpha0 +
         spec.Ep * std::conj(alpha0) * std::conj(alpha0) - kI * spec.kappa * m / 2.0;
}

double heff_relative_residual(const ModelSpec& spec, cd alpha0) {
  const auto psi = coherent_state(alpha0, spec.N);
  const Vector h_psi = build_Heff(spec).matrix() * psi.amplitudes();
  const Vector r = h_psi - displaced_energy(spec, alpha0) * psi.amplitudes();
  return r.norm() / h_psi.norm();
}

EigenAmplitude lossy_eigen_amplitude(const ModelSpec& spec) {
  spec.validate();
  if (spec.K == 0.0) throw DomainError("lossy_eigen_amplitude needs K != 0");
  EigenAmplitude out;
  const double ep2 = std::norm(spec.Ep);
  const double k2 = spec.kappa * spec.kappa;
  if (4.0 * ep2 <= k2 / 4.0) {
    out.below_threshold = true;
    return out;
  }
  out.r0 = std::pow((4.0 * ep2 - k2 / 4.0) / (4.0 * spec.K * spec.K), 0.25);
  const double base = 0.5 * std::arg(spec.Ep / spec.K);
  const double tilt = 0.5 * std::atan(spec.kappa / std::sqrt(16.0 * ep2 - k2));

  // tan(2 theta0) only fixes the magnitude of the tilt. Score both signs by
  // the eigen-residual; fall back to the displaced linear term when the
  // truncation cannot hold |alpha0>.
  const bool representable = std::norm(out.r0) <= spec.N / 2.0;
  double best = 0.0;
  for (int sign : {+1, -1}) {
    const cd a = std::polar(out.r0, base + sign * tilt);
    const double score = representable ? heff_relative_residual(spec, a)
                                       : std::abs(displaced_linear_residual(spec, a));
    if (out.branch == 0 || score < best) {
      best = score;
      out.branch = sign;
      out.alpha0 = a;
      out.theta0 = base + sign * tilt;
    }
  }
  return out;
}

namespace {

struct RawBasis {
  Vector plus;
  Vector minus;
  cd overlap;
};

RawBasis raw_basis(cd alpha0, int n) {
  RawBasis b{coherent_state(alpha0, n).amplitudes(), coherent_state(-alpha0, n).amplitudes(), {}};
  b.overlap = b.plus.dot(b.minus);
  if (std::abs(b.overlap) > 0.99) {
    throw IllConditionedBasis("coherent states +/-alpha0 overlap by " +
                              std::to_string(std::abs(b.overlap)));
  }
  return b;
}

Eigen::MatrixX2cd lowdin_columns(cd alpha0, int n) {
  const auto raw = raw_basis(alpha0, n);
  Eigen::MatrixX2cd cols(n, 2);
  cols.col(0) = raw.plus;
  cols.col(1) = raw.minus;
  const Eigen::Matrix2cd gram = cols.adjoint() * cols;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(gram);
  const Eigen::Vector2d inv_sqrt = es.eigenvalues().cwiseSqrt().cwiseInverse();
  const Eigen::Matrix2cd s_inv_half =
      es.eigenvectors() * inv_sqrt.cast<cd>().asDiagonal() * es.eigenvectors().adjoint();
  return cols * s_inv_half;
}

}  // namespace

LogicalStates logical_states(cd alpha0, int n) {
  const auto cols = lowdin_columns(alpha0, n);
  return {PureState(cols.col(0)), PureState(cols.col(1))};
}

Eigen::Matrix2cd project_to_logical(const Operator& op, cd alpha0, LogicalBasis basis) {
  if (op.dims().size() != 1) throw DimensionMismatch("project_to_logical expects a single-mode operator");
  const int n = static_cast<int>(op.dim());
  Eigen::MatrixX2cd cols(n, 2);
  if (basis == LogicalBasis::Lowdin) {
    cols = lowdin_columns(alpha0, n);
  } else {
    const auto raw = raw_basis(alpha0, n);
    cols.col(0) = raw.plus;
    cols.col(1) = raw.minus;
  }
  return cols.adjoint() * op.matrix() * cols;
}

}  // namespace catkerr
