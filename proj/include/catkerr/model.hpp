#pragma once

// Hamiltonians of the two-photon driven Kerr resonator and the closed-form
// lossy eigen-amplitude.

#include <Eigen/Dense>

#include <complex>

#include "catkerr/fock.hpp"

namespace catkerr {

/// Physical parameters of one simulation, in units where rates carry 1/time.
struct ModelSpec {
  double K = 1.0;        ///< Kerr amplitude (sign allowed)
  cd Ep{0.0, 0.0};       ///< n-photon drive amplitude
  double kappa = 0.0;    ///< single-photon loss rate
  double Ez = 0.0;       ///< single-photon drive
  double delta_x = 0.0;  ///< drive-resonator detuning
  double Ezz = 0.0;      ///< exchange coupling between two identical resonators
  int n_drive = 2;
  int N = 30;            ///< Fock truncation per mode

  void validate() const;
  bool operator==(const ModelSpec&) const = default;
};

struct EigenAmplitude {
  double r0 = 0.0;
  double theta0 = 0.0;
  cd alpha0{0.0, 0.0};
  /// Which sign of the arctan term won the residual comparison (+1 or -1).
  int branch = 0;
  /// Set when 4|Ep|^2 <= kappa^2/4; r0 is then reported as 0.
  bool below_threshold = false;
};

/// -K a^dag^2 a^2 + Ep a^dag^2 + Ep^* a^2
Operator build_H0(const ModelSpec& spec);
/// -K a^dag^n a^n + Ep a^dag^n + Ep^* a^n; requires n_drive <= N/3.
Operator build_Hn(const ModelSpec& spec);
/// H0 + Ez (a^dag + a)
Operator build_Hz(const ModelSpec& spec);
/// H0 + delta_x a^dag a
Operator build_Hx(const ModelSpec& spec);
/// Two identical resonators with exchange Ezz (a1^dag a2 + a1 a2^dag).
Operator build_Hzz(const ModelSpec& spec);
/// Non-Hermitian no-jump Hamiltonian H0 - i kappa a^dag a / 2.
Operator build_Heff(const ModelSpec& spec);

EigenAmplitude lossy_eigen_amplitude(const ModelSpec& spec);

/// Coefficient of a^dag after displacing Heff by alpha0:
/// -2K alpha0^2 alpha0^* + 2 Ep alpha0^* - i (kappa/2) alpha0.
cd displaced_linear_residual(const ModelSpec& spec, cd alpha0);

/// Constant term E dropped in the displaced frame.
cd displaced_energy(const ModelSpec& spec, cd alpha0);

/// ||(Heff - E)|alpha0>|| / ||Heff|alpha0>||.
double heff_relative_residual(const ModelSpec& spec, cd alpha0);

enum class LogicalBasis {
  Lowdin,  ///< symmetric orthonormalisation of {|alpha0>, |-alpha0>}
  Raw,     ///< plain matrix elements between the normalised coherent states
};

struct LogicalStates {
  PureState zero;
  PureState one;
};

/// Löwdin-orthonormalised logical states |0> ~ |alpha0>, |1> ~ |-alpha0>.
LogicalStates logical_states(cd alpha0, int n);

/// Matrix of a single-mode operator in the logical basis.
/// Throws IllConditionedBasis when |<alpha0|-alpha0>| > 0.99.
Eigen::Matrix2cd project_to_logical(const Operator& op, cd alpha0,
                                    LogicalBasis basis = LogicalBasis::Lowdin);

}  // namespace catkerr
