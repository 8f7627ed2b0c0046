#include "catkerr/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "catkerr/parallel.hpp"

namespace catkerr {

namespace {

const Dims& target_dims(const Target& t) {
  return std::visit([](const auto& s) -> const Dims& { return s.dims(); }, t);
}

Matrix psd_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.cast<cd>().asDiagonal() * es.eigenvectors().adjoint();
}

double uhlmann_root(const Matrix& rho, const Matrix& sigma) {
  const Matrix s = psd_sqrt(rho);
  const Matrix m = s * sigma * s;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
}

double diagonal_weighted(const DensityMatrix& rho, auto&& weight) {
  const Dims& dims = rho.dims();
  const Eigen::Index n = rho.dim();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    // decompose the flat index into per-mode occupations, last mode fastest
    Eigen::Index rest = i;
    std::vector<int> occ(dims.size());
    for (std::size_t m = dims.size(); m-- > 0;) {
      occ[m] = static_cast<int>(rest % dims[m]);
      rest /= dims[m];
    }
    acc += weight(occ) * rho.matrix()(i, i).real();
  }
  return acc;
}

}  // namespace

double root_fidelity(const DensityMatrix& rho, const Target& target) {
  if (rho.dims() != target_dims(target)) throw DimensionMismatch("fidelity: states live in different spaces");
  return std::visit(
      [&](const auto& t) -> double {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, PureState>) {
          const double ov = t.amplitudes().dot(rho.matrix() * t.amplitudes()).real();
          return std::sqrt(std::clamp(ov, 0.0, 1.0));
        } else {
          return std::clamp(uhlmann_root(rho.matrix(), t.matrix()), 0.0, 1.0);
        }
      },
      target);
}

double fidelity(const DensityMatrix& rho, const Target& target) {
  const double f = root_fidelity(rho, target);
  return f * f;
}

double parity_expectation(const DensityMatrix& rho) {
  return diagonal_weighted(rho, [](const std::vector<int>& occ) {
    int total = 0;
    for (int k : occ) total += k;
    return total % 2 == 0 ? 1.0 : -1.0;
  });
}

double mean_photon(const DensityMatrix& rho) {
  return diagonal_weighted(rho, [](const std::vector<int>& occ) {
    int total = 0;
    for (int k : occ) total += k;
    return static_cast<double>(total);
  });
}

double purity(const DensityMatrix& rho) {
  return (rho.matrix() * rho.matrix()).trace().real();
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::size_t keep) {
  const Dims& dims = rho.dims();
  if (keep >= dims.size()) throw DimensionMismatch("partial_trace: mode index out of range");
  if (dims.size() == 1) return rho;
  Eigen::Index before = 1, after = 1;
  for (std::size_t m = 0; m < keep; ++m) before *= dims[m];
  for (std::size_t m = keep + 1; m < dims.size(); ++m) after *= dims[m];
  const Eigen::Index d = dims[keep];
  Matrix out = Matrix::Zero(d, d);
  const Matrix& r = rho.matrix();
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      cd acc = 0.0;
      for (Eigen::Index b = 0; b < before; ++b) {
        for (Eigen::Index a = 0; a < after; ++a) {
          acc += r((b * d + i) * after + a, (b * d + j) * after + a);
        }
      }
      out(i, j) = acc;
    }
  }
  return DensityMatrix(std::move(out), Dims{dims[keep]}, DensityMatrix::Unchecked{});
}

double von_neumann_entropy(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho.matrix() + rho.matrix().adjoint()),
                                           Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (double lam : es.eigenvalues()) {
    if (lam > 1e-15) s -= lam * std::log2(lam);
  }
  return s;
}

double entanglement_entropy(const DensityMatrix& rho, std::size_t mode) {
  return von_neumann_entropy(partial_trace(rho, mode));
}

GridSpec default_grid(cd alpha0) {
  const double r = std::abs(alpha0) + 4.0;
  return {-r, r, -r, r, 201, 201};
}

double WignerGrid::cell_area() const {
  const double dx = x.size() > 1 ? (x.back() - x.front()) / static_cast<double>(x.size() - 1) : 0.0;
  const double dp = p.size() > 1 ? (p.back() - p.front()) / static_cast<double>(p.size() - 1) : 0.0;
  return dx * dp;
}

double WignerGrid::integral() const { return values.sum() * cell_area(); }

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return v;
}

// Laguerre recursion for the Wigner function of |m><n| at beta; w holds one
// row of the recursion table and is reused between points.
double wigner_point(const Matrix& rho, cd beta, std::vector<cd>& w) {
  const Eigen::Index m_max = rho.rows();
  w.assign(static_cast<std::size_t>(m_max), cd(0.0));
  w[0] = std::exp(-2.0 * std::norm(beta)) / std::numbers::pi;
  double acc = rho(0, 0).real() * w[0].real();
  for (Eigen::Index n = 1; n < m_max; ++n) {
    w[n] = 2.0 * beta * w[n - 1] / std::sqrt(static_cast<double>(n));
    acc += 2.0 * (rho(0, n) * w[n]).real();
  }
  for (Eigen::Index m = 1; m < m_max; ++m) {
    const double sm = std::sqrt(static_cast<double>(m));
    cd temp = w[m];
    w[m] = (2.0 * std::conj(beta) * temp - sm * w[m - 1]) / sm;
    acc += (rho(m, m) * w[m]).real();
    for (Eigen::Index n = m + 1; n < m_max; ++n) {
      const cd next = (2.0 * beta * w[n - 1] - sm * temp) / std::sqrt(static_cast<double>(n));
      temp = w[n];
      w[n] = next;
      acc += 2.0 * (rho(m, n) * w[n]).real();
    }
  }
  return 2.0 * acc;
}

}  // namespace

double wigner_at(const DensityMatrix& rho, cd beta) {
  if (rho.dims().size() != 1) throw DimensionMismatch("wigner expects a single-mode state");
  std::vector<cd> w;
  return wigner_point(rho.matrix(), beta, w);
}

WignerGrid wigner(const DensityMatrix& rho, const GridSpec& grid, double tail_tol) {
  if (rho.dims().size() != 1) throw DimensionMismatch("wigner expects a single-mode state");
  if (grid.nx < 1 || grid.np < 1) throw DomainError("wigner grid needs at least one point per axis");
  const Eigen::Index n = rho.dim();
  const double tail = rho.matrix()(n - 1, n - 1).real();
  if (tail > tail_tol) {
    throw TruncationInadequate("wigner: top Fock level holds population " + std::to_string(tail),
                               static_cast<int>(n + n / 2));
  }
  WignerGrid out;
  out.x = linspace(grid.x_min, grid.x_max, grid.nx);
  out.p = linspace(grid.p_min, grid.p_max, grid.np);
  out.values.resize(grid.np, grid.nx);
  const Matrix& r = rho.matrix();
  parallel_for(static_cast<std::size_t>(grid.np), [&](std::size_t i) {
    std::vector<cd> w;
    for (int j = 0; j < grid.nx; ++j) {
      out.values(static_cast<Eigen::Index>(i), j) = wigner_point(r, cd(out.x[static_cast<std::size_t>(j)], out.p[i]), w);
    }
  });
  return out;
}

}  // namespace catkerr
