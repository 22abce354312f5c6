/** @file dynamics.hpp
 *  @brief Time integration of Models A, B and C.
 *
 *  Spatial scheme (all variants): finite volumes centred on the nodes, with
 *  half cells at the ends, so trapezoid mass is conserved to round-off. Face
 *  fluxes use arithmetic-mean m; both boundary fluxes are zero. Diffusion is
 *  backward Euler, transport is explicit.
 *
 *  Model A is carried on the reference interval xi = (x - c)/L with the
 *  reference density mhat = L m (unit trapezoid mass); the moving frame adds
 *  the transport velocity (c_t + xi L_t)/L.
 */
#pragma once

#include <string>
#include <vector>

#include "ks/elliptic.hpp"
#include "ks/numerics.hpp"

namespace ks {

struct CellState {
    Field m;          ///< reference density, unit mass
    double L = 1.0;   ///< Model A length; 1 for B and C
    double c = 0.0;   ///< center (A, B); unused for C
    double t = 0.0;
};

struct Snapshot {
    CellState state;
    double mass = 1.0;
    double vleft = 0.0;    ///< physical phi_x at the left edge
    double vright = 0.0;   ///< physical phi_x at the right edge
};

struct Trajectory {
    ModelParams params;
    double dt = 0.0;
    int stride = 1;
    std::vector<Snapshot> snapshots;
    std::size_t steps = 0;
    double max_mass_drift = 0.0;   ///< max over all steps of |mass - initial mass|
    std::string status = "ok";     ///< ok | blow-up | unstable-step
};

/// F_C(m) = m'' + phi'(1/2) m' - (m phi')' in flux form; zero trapezoid mean.
Field rhs_model_c(const Field& m, const ModelParams& params);

/// Exact directional derivative of the discrete F_C at base along u.
Field linearized_rhs_c(const Field& base, const Field& u, const ModelParams& params);

/// Psi(u) = phi_u'(1/2) u' - (u phi_u')', the quadratic part of F_C:
/// F_C(1 + u) = S_C u + Psi(u) exactly at the discrete level.
Field nonlinear_part(const Field& u, const ModelParams& params);

/// min(10 h^2, 0.25 h / max|a|) with a the face transport speed; Model A also
/// keeps dt below half the relaxation time of the length equation.
double dt_max(const CellState& s, const ModelParams& params);

/// One IMEX step of Model C (also B: c advances by phi_x(1/2) dt).
CellState step_c(const CellState& s, const ModelParams& params, double dt);
/// One IMEX step of Model A.
CellState step_a(const CellState& s, const ModelParams& params, double dt);
/// Dispatch on params.variant.
CellState step(const CellState& s, const ModelParams& params, double dt);

/// Fixed-dt integration with snapshots every `stride` steps (t = 0 included).
/// Stops early with status "blow-up" when ||m||_inf exceeds 1e6 and with
/// "unstable-step" when growth pushes dt above dt_max.
Trajectory simulate(const CellState& init, const ModelParams& params, double T, double dt,
                    int stride);

/// Physical boundary slopes for any variant.
BoundarySlopes edge_velocities(const CellState& s, const ModelParams& params);

struct DecayFit {
    double rate = 0.0;        ///< least-squares slope of log norm vs t
    double intercept = 0.0;
    bool decaying = false;    ///< rate < 0 and the norm dropped over the window
    bool monotone = false;    ///< strictly decreasing over the window
    std::size_t samples = 0;
};

/// Fit over the final half of the samples; needs at least 10 samples.
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& norms);
/// ||m(t) - reference||_L2 per snapshot, then fit_decay.
DecayFit decay_rate(const Trajectory& traj, const Field& reference);
std::vector<double> distance_series(const Trajectory& traj, const Field& reference);

/// CSV with columns t,c,L,mass,vleft,vright.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

}  // namespace ks
