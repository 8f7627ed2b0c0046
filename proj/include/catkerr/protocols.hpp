#pragma once

// Scripted experiments: cat initialisation, stabilisation and logical gates.

#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "catkerr/fock.hpp"
#include "catkerr/lindblad.hpp"
#include "catkerr/model.hpp"
#include "catkerr/observables.hpp"

namespace catkerr {

enum class EnvelopeKind { Constant, SmoothTurnOn, Counterdiabatic, Tabulated };

/// Time-dependent complex drive amplitude with its time derivative.
class DriveEnvelope {
 public:
  /// Ep(t) = ep0.
  static DriveEnvelope constant(cd ep0);
  /// Ep(t) = ep0 (1 - exp(-t^4 / tau^4)).
  static DriveEnvelope smooth_turn_on(cd ep0, double tau);
  /// Natural cubic spline through (t, value); derivatives by centred
  /// differences with step tau * 1e-6, tau being the table span.
  static DriveEnvelope tabulated(std::vector<double> t, std::vector<cd> values);
  /// Arbitrary closed form; used for counterdiabatic drives.
  static DriveEnvelope custom(EnvelopeKind kind, std::function<cd(double)> value,
                              std::function<cd(double)> derivative, cd ep0, double tau);

  cd operator()(double t) const { return value_(t); }
  cd derivative(double t) const { return derivative_(t); }
  Envelope as_function() const { return value_; }

  EnvelopeKind kind() const { return kind_; }
  cd ep0() const { return ep0_; }
  double tau() const { return tau_; }
  bool analytic_derivative() const { return kind_ != EnvelopeKind::Tabulated; }

 private:
  EnvelopeKind kind_ = EnvelopeKind::Constant;
  cd ep0_{0.0, 0.0};
  double tau_ = 0.0;
  std::function<cd(double)> value_;
  std::function<cd(double)> derivative_;
};

enum class Differentiation { Analytic, FiniteDifference };

/// alpha0(t) = sqrt(Ep(t)/K) and its derivative.
struct AlphaTrajectory {
  std::function<cd(double)> alpha;
  std::function<cd(double)> alpha_dot;
};

/// Throws DomainError (at construction for closed forms, at evaluation
/// otherwise) when Ep(t)/K is negative.
AlphaTrajectory alpha_trajectory(const DriveEnvelope& env, double K,
                                 Differentiation diff = Differentiation::Analytic);

enum class CdVariant {
  OverNorm,   ///< alpha_dot / (N_-(alpha) (1 + 2 alpha))
  TimesNorm,  ///< alpha_dot N_-(alpha) / (1 + 2 alpha), clamped
};

std::string to_string(CdVariant v);
CdVariant default_cd_variant();

/// Amplitude cap of the counterdiabatic drive, in units of |Ep0|.
inline constexpr double kCdClampFactor = 10.0;

struct CdEnvelope {
  DriveEnvelope envelope;
  /// [start, end] of the interval on which the clamp was active inside the
  /// scanned window, if any.
  std::optional<std::pair<double, double>> clamp_window;
};

/// Orthogonal two-photon drive i e^{i arg Ep} c(alpha0, alpha0_dot).
/// `scan_until` bounds the interval searched for clamp activity.
CdEnvelope counterdiabatic_envelope(const DriveEnvelope& env, double K, CdVariant variant,
                                    double scan_until);

struct TimePoint {
  double t = 0.0;
  double fidelity = 0.0;  ///< root fidelity to the protocol target
  double parity = 0.0;
  double mean_n = 0.0;
  double purity = 0.0;
};

struct ProtocolReport {
  std::string protocol;
  std::string target;
  double fidelity = 0.0;          ///< root fidelity, Tr sqrt(sqrt(rho) sigma sqrt(rho))
  double fidelity_squared = 0.0;  ///< squared convention
  double final_time = 0.0;
  std::map<std::string, double> params;
  std::map<std::string, double> metrics;
  std::map<std::string, std::string> conventions;
  std::vector<std::string> notes;
  std::vector<std::string> warnings;
  std::vector<TimePoint> series;
  std::optional<DensityMatrix> final_state;
  std::optional<WignerGrid> wigner;
  StepperStats stats;
};

struct RunOptions {
  IntegratorOptions integrator{};
  int series_points = 51;  ///< time-series samples, including both ends
  bool keep_final_state = true;
};

// ---------------------------------------------------------------------------
// Steady state

struct SteadyStateParams {
  double K = 1.0;
  double kappa = 8.0;
  cd Ep{16.0, 0.0};
  int N = 70;
  SteadyStateMethod method = SteadyStateMethod::LongTime;
};

/// Steady state of H0 with single-photon loss from the vacuum, compared with
/// the mixture (|a0><a0| + |-a0><-a0|)/2 at the lossy eigen-amplitude.
ProtocolReport run_steady_state(const SteadyStateParams& p, const SteadyStateOptions& ss = {},
                                const RunOptions& o = {});

/// Coherent multiplet of the n-photon Hamiltonian.
struct NPhotonCheck {
  int n = 3;
  double radius = 0.0;             ///< (|Ep|/|K|)^{1/n}
  std::vector<double> residuals;   ///< ||(Hn - E)|alpha_k>||, one per root
  double multiplet_spread = 0.0;   ///< width of the top n eigenvalues
  double gap = 0.0;                ///< distance to the next eigenvalue
  double subspace_overlap = 0.0;   ///< min cos^2 of principal angles
};

/// Builds Hn at `spec`, checks the n coherent roots of Ep/K and locates the
/// matching near-degenerate multiplet at the edge of the spectrum.
NPhotonCheck nphoton_check(const ModelSpec& spec);

// ---------------------------------------------------------------------------
// Initialisation

struct InitParams {
  double K = 1.0;
  double kappa = 0.0;
  cd Ep0{4.0, 0.0};
  double tau = 5.0;
  double t_final = 6.5;
  Parity initial = Parity::Even;  ///< Even: start from |0>, Odd: from |1>
  int N = 25;
};

/// Slow turn-on of the two-photon drive. Fidelity is measured against the
/// cat at sqrt(Ep0/K); the cat at alpha0(t_final) is reported as a metric.
ProtocolReport run_adiabatic_init(const InitParams& p, const RunOptions& o = {});

struct TransitionlessParams : InitParams {
  TransitionlessParams() {
    tau = 1.0;
    t_final = 1.37;
  }
  /// No value runs the uncorrected ramp.
  std::optional<CdVariant> variant = default_cd_variant();
};

ProtocolReport run_transitionless_init(const TransitionlessParams& p, const RunOptions& o = {});

/// exp(-2 int_0^t_final kappa |alpha0(t)|^2 dt), adaptive Simpson to 1e-10.
double analytic_init_dephasing(double kappa, const DriveEnvelope& env, double K, double t_final);

/// Root-fidelity loss of a cat whose coherence is scaled by c: 1 - sqrt((1 + c)/2).
double cat_phase_error(double coherence);

// ---------------------------------------------------------------------------
// Stabilisation

enum class StabilizationMode { DrivenKnr, UndrivenKnr, Linear };
std::string to_string(StabilizationMode m);

struct StabilizationParams {
  double K = 1.0;
  double kappa = 0.05;
  double alpha = 2.0;  ///< initial cat amplitude; the driven mode solves r0(Ep) = alpha
  StabilizationMode mode = StabilizationMode::DrivenKnr;
  std::vector<double> t_points;
  int N = 25;
  std::optional<GridSpec> wigner_grid;  ///< snapshot grid, if snapshots are wanted
};

/// Two-photon amplitude whose lossy eigen-amplitude has modulus `alpha`.
double stabilizing_drive(double K, double kappa, double alpha);

/// One report per requested time, fidelity measured against the initial cat.
std::vector<ProtocolReport> run_stabilization(const StabilizationParams& p, const RunOptions& o = {});

// ---------------------------------------------------------------------------
// Gates

enum class GateZTiming {
  PiOverDelta,   ///< t = theta / delta_z
  InverseDelta,  ///< t = (theta / pi) / delta_z
};

struct GateZParams {
  double K = 1.0;
  double kappa = 0.0;
  cd Ep{4.0, 0.0};
  double Ez = 0.8;
  double theta = std::numbers::pi;
  GateZTiming timing = GateZTiming::PiOverDelta;
  std::optional<double> time_override;
  int N = 30;
};

double gate_z_time(const GateZParams& p);
ProtocolReport run_gate_z(const GateZParams& p, const RunOptions& o = {});

enum class GateXTiming {
  Formula,     ///< t = (theta / (pi/2)) pi / (4 dx |a0|^2 e^{-2|a0|^2})
  Calibrated,  ///< fidelity-maximising time of the lossless gate
};

struct GateXParams {
  double K = 1.0;
  double kappa = 0.0;
  cd Ep{1.0, 0.0};
  double delta_x = 1.0 / 3.0;
  double theta = std::numbers::pi / 2;
  GateXTiming timing = GateXTiming::Calibrated;
  std::optional<double> time_override;
  int N = 15;
};

double gate_x_formula_time(const GateXParams& p);
/// Fidelity-maximising time at kappa = 0 within [0.2, 1.5] x the formula time.
double gate_x_calibrated_time(const GateXParams& p);
ProtocolReport run_gate_x(const GateXParams& p, const RunOptions& o = {});

struct GateZZParams {
  double K = 1.0;
  double kappa = 0.0;
  cd Ep{4.0, 0.0};
  double Ezz = 0.2;
  double time_factor = 1.0;  ///< t = time_factor * pi / (2 delta_zz)
  int N = 18;
};

ProtocolReport run_gate_zz(const GateZZParams& p, const RunOptions& o = {});

/// Evolves `problem` on a grid over [t_lo, t_hi], refines around the best
/// point and returns the time maximising the root fidelity to `target`.
double fidelity_maximizing_time(EvolutionProblem problem, const Target& target, double t_lo, double t_hi,
                                const IntegratorOptions& integ = {});

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepGate { Z, X, ZZ };
std::string to_string(SweepGate g);

struct SweepRow {
  double strength = 0.0;
  double fidelity = 0.0;
  double fidelity_squared = 0.0;
  double gate_time = 0.0;
};

struct SweepBase {
  GateZParams z{};
  GateXParams x{};
  GateZZParams zz{};
};

/// Runs one gate per strength (Ez, delta_x or Ezz) in parallel; rows keep
/// the order of `strengths`.
std::vector<SweepRow> condition_sweep(SweepGate gate, const std::vector<double>& strengths,
                                      const SweepBase& base = {}, const RunOptions& o = {});

}  // namespace catkerr
