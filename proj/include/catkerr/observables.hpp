#pragma once

// Scalar and phase-space diagnostics.

#include <Eigen/Dense>

#include <variant>
#include <vector>

#include "catkerr/fock.hpp"

namespace catkerr {

using Target = std::variant<PureState, DensityMatrix>;

/// Squared fidelity: <psi|rho|psi> for a pure target, (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 otherwise.
double fidelity(const DensityMatrix& rho, const Target& target);

/// Root (Uhlmann) fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)); sqrt(<psi|rho|psi>) for a pure target.
double root_fidelity(const DensityMatrix& rho, const Target& target);

/// Tr(rho P), with P the product of single-mode parities.
double parity_expectation(const DensityMatrix& rho);
/// Total photon number summed over all modes.
double mean_photon(const DensityMatrix& rho);
double purity(const DensityMatrix& rho);

/// Reduced state of one mode.
DensityMatrix partial_trace(const DensityMatrix& rho, std::size_t keep);
/// Von Neumann entropy in bits.
double von_neumann_entropy(const DensityMatrix& rho);
/// Entropy of the reduced state of `mode`.
double entanglement_entropy(const DensityMatrix& rho, std::size_t mode = 0);

struct GridSpec {
  double x_min = -6.0, x_max = 6.0;
  double p_min = -6.0, p_max = 6.0;
  int nx = 201, np = 201;

  bool operator==(const GridSpec&) const = default;
};

/// Square grid spanning +-(|alpha0| + 4) with 201 points per axis.
GridSpec default_grid(cd alpha0);

/// values(i, j) = W(x_j, p_i): rows follow p, columns follow x.
struct WignerGrid {
  std::vector<double> x;
  std::vector<double> p;
  Eigen::MatrixXd values;

  double cell_area() const;
  /// Riemann sum of W dx dp.
  double integral() const;
};

/// W(beta) = (2/pi) Tr[D^dag(beta) rho D(beta) P], beta = x + i p, on a single mode.
/// Throws TruncationInadequate when the top Fock level holds more than `tail_tol`.
WignerGrid wigner(const DensityMatrix& rho, const GridSpec& grid, double tail_tol = 1e-6);

/// Single-point evaluation of the same function.
double wigner_at(const DensityMatrix& rho, cd beta);

}  // namespace catkerr
