#pragma once

#include <complex>
#include <string>
#include <vector>

#include "oscillon/basis.hpp"
#include "oscillon/coeffs.hpp"
#include "oscillon/fracop.hpp"
#include "oscillon/nonlin.hpp"
#include "oscillon/state.hpp"

namespace oscillon {

/// Coefficients and nonlinearity of one problem instance.
struct Models {
  OmegaModel omega;
  MuModel mu;
  NonlinearitySpec nonlin;
};

/// Any coefficient above this magnitude counts as blow-up.
inline constexpr double kBlowUpThreshold = 1e12;

/// phi_k(z) = sum_j z^j / (j + k)!, so phi_0 = e^z, phi_1 = (e^z - 1)/z,
/// phi_2 = (e^z - 1 - z)/z^2. Series below |z| = 1/2, closed form above.
std::complex<double> phi_function(int k, std::complex<double> z);

/// Matrix functions of h L with L = -B and B a Lambda^alpha mode block:
/// B = m c I + K with K^2 = -(m s)^2 I, so g(hL) = Re g(z) I + Im g(z) K/(m s)
/// with z = -h m (c + i s).
struct BlockPropagator {
  Block2 expo; // e^{hL}
  Block2 phi1; // phi_1(hL)
  Block2 phi2; // phi_2(hL)
};

BlockPropagator block_propagator(const Block2& B, double h);

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<State> states;
  double h = 0.0;
  double alpha = 1.0;
  double s_ref = 0.0;
  bool blew_up = false;
  double blow_up_time = 0.0;
};

/// The process S_alpha(t, tau) for dw/dt + Lambda(t)^alpha w = F(t, w) on a
/// spectral truncation, advanced by second-order exponential Runge-Kutta
/// (ETD2RK) with the linear part frozen at the step midpoint.
class Integrator {
public:
  Integrator(const SpectralBasis& basis, const Models& models, double alpha);

  const SpectralBasis& basis() const { return basis_; }
  const Models& models() const { return models_; }
  double alpha() const { return alpha_; }
  const NonlinearOperator& nonlinear() const { return op_; }

  /// One step from t to t_next.
  State step(const State& w, double t, double t_next) const;

  /// States at every `stride`-th grid time plus the final one. Times are
  /// snapped to the lattice h Z when tau is on it, so runs that share
  /// lattice points compose bit for bit.
  TrajectoryRecord evolve(const State& initial, double tau, double t_end, double h, int stride = 1) const;

  /// Final state only.
  State evolve_to(const State& initial, double tau, double t_end, double h, bool* blew_up = nullptr) const;

  /// Physical velocity u_t = mu^{(a-1)/2} s A^{(a-1)/2} v - mu^{a/2} c A^{a/2} u.
  Field velocity(const State& w, double t) const;

  /// Lambda(t)^alpha w applied mode by mode.
  State apply_lambda(const State& w, double t) const;

private:
  SpectralBasis basis_;
  Models models_;
  double alpha_;
  NonlinearOperator op_;
};

State step(const State& w, double t, double h, double alpha, const Models& models, const SpectralBasis& basis);
TrajectoryRecord evolve(const State& initial, double tau, double t_end, double h, double alpha, const Models& models,
                        const SpectralBasis& basis);
Field recover_velocity(const State& w, double t, double alpha, const Models& models, const SpectralBasis& basis);

/// Number of steps of size h spanning [tau, t_end]; throws unless h divides
/// the span to within 1e-9 relative.
long step_count(double tau, double t_end, double h);

/// Binary dump: "OSCW", u32 version 1, u32 d, u32 M, f64 alpha, u64 count,
/// then count records of f64 t, f64 u[K], f64 v[K]; little-endian.
void write_state_dump(const std::string& path, const SpectralBasis& basis, const TrajectoryRecord& rec);
TrajectoryRecord read_state_dump(const std::string& path, int* dim = nullptr, int* modes = nullptr);

} // namespace oscillon
