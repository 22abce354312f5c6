/** @file traveling_wave.hpp
 *  @brief Traveling waves of Model C: small-V asymptotics, Newton solves and
 *         continuation of the pitchfork branch.
 *
 *  A wave with velocity V satisfies m_T = Lambda exp(phi_T - V x) with
 *  -Z phi_T'' + phi_T = P m_T, phi_T periodic and phi_T'(+-1/2) = V. The extra
 *  boundary condition selects P = P_T(V); Lambda fixes unit mass.
 *
 *  Two discretizations are provided. exact_tw approximates the continuous wave
 *  to fourth order (Numerov interior, compact boundary closures). scheme_tw
 *  returns the exact fixed point of the discrete Model C operator, which is the
 *  right reference for time-stepping experiments.
 */
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ks/numerics.hpp"

namespace ks {

/// Residual of the P0 equation in the cancellation-free form
/// sin(s) - P s cos(s), s = sqrt(P-1)/(2 sqrt Z)  (sinh/cosh for P < 1),
/// divided by max(1, P).
double p0_residual(double P, double Z);

/// Root of the P0 equation on the principal branch by bisection.
/// Z > 1/12 gives P0 > 1, Z < 1/12 gives P0 in (0, 1); |Z - 1/12| < 1e-6 is singular.
double solve_p0(double Z);

/// The next `count` roots, one per interval (j pi - pi/2, j pi + pi/2), j >= 1.
std::vector<double> p0_higher_branches(double Z, int count);

/// P2 as a rational function of (P0, Z); defined whenever P0 != 1, P0^2 != 12 Z.
double p2_coefficient(double P0, double Z);

/// Second-order coefficients of the wave in V, valid for Z > 1/12.
struct AsymptoticTW {
    double Z = 0, P0 = 0, P2 = 0;
    double k = 0;          ///< sqrt(P0 - 1)/sqrt(Z)
    double csc_half = 0;   ///< 1/sin(k/2)
    double A = 0, B = 0, C = 0, D = 0, E = 0, F = 0;         // m2
    double a0 = 0, a2 = 0, b0 = 0, b2 = 0, c1 = 0, d0 = 0;   // phi2 - P2
    double log_lambda0 = 0;   ///< -P0; Lambda itself underflows for large Z
    double lambda2_rel = 0;   ///< Lambda2 / Lambda0

    static AsymptoticTW make(double Z);
    double phi1(double x) const;
    double dphi1(double x) const;
    double phi2(double x) const;   ///< includes the constant P2
    double m1(double x) const;
    double m2(double x) const;
};

enum class TwSource { asymptotic, newton, discrete };
const char* to_string(TwSource s);

struct TravelingWave {
    double V = 0.0;
    double Z = 1.0;
    double P_T = 0.0;
    double log_lambda = 0.0;   ///< m_T = exp(log_lambda + phi_T - V x)
    Field m_T;
    Field phi_T;
    double residual = 0.0;          ///< ||F_C(m_T)||_L2 with the time-stepping operator
    double newton_residual = 0.0;   ///< max-norm residual of the solved system
    int newton_iters = 0;
    TwSource source = TwSource::asymptotic;
    std::string note;

    ModelParams params() const { return ModelParams::model_c(Z, P_T); }
    bool converged() const { return source != TwSource::asymptotic && newton_residual < 1e-8; }
};

/// m_T = 1 + V m1 + V^2 m2 renormalized to unit mass, P_T = P0 + V^2 P2.
TravelingWave asymptotic_tw(double V, double Z, const Grid& grid);

struct NewtonOptions {
    double tol = 1e-11;
    int max_iter = 50;
};

/// Fourth-order wave. Unknowns psi = phi - P at the nodes, P, and
/// theta = log Lambda + P. Throws NumericalError on divergence.
TravelingWave exact_tw(double V, double Z, const Grid& grid,
                       const std::optional<TravelingWave>& guess = std::nullopt,
                       NewtonOptions opt = {});

/// Residual vector of the exact_tw system (ordering: periodicity, left slope,
/// n-1 interior rows, right slope, mass). Exposed for the Jacobian oracle.
std::vector<double> exact_tw_residual(const std::vector<double>& unknowns, double V, double Z,
                                      const Grid& grid);
/// Analytic Jacobian of exact_tw_residual, dense row-major.
std::vector<std::vector<double>> exact_tw_jacobian(const std::vector<double>& unknowns, double V,
                                                   double Z, const Grid& grid);

/// Discrete fixed point of the Model C operator: every face flux vanishes,
/// mass is 1 and the discrete edge slope equals V. The stopping tolerance is
/// raised to the round-off floor 4 eps P / h when that exceeds opt.tol.
TravelingWave scheme_tw(double V, double Z, const Grid& grid,
                        const std::optional<TravelingWave>& guess = std::nullopt,
                        NewtonOptions opt = {});

/// phi_T'(-1/2), phi_T'(1/2) from the compact end closures used by exact_tw.
std::pair<double, double> tw_end_slopes(const TravelingWave& tw);

struct BifurcationPoint {
    double V = 0, P_T = 0, amplitude = 0, residual = 0;
    int newton_iters = 0;
};

/// Uniform continuation in V on [0, V_max], warm-started, mirrored to V < 0.
/// Points are sorted by V; V = 0 appears once.
std::vector<BifurcationPoint> trace_bifurcation(double Z, double V_max, int steps, const Grid& grid);

/// Least-squares c in P_T - P0 = c V^2 over points with 0 < |V| <= V_cut.
double fit_p2(const std::vector<BifurcationPoint>& curve, double P0, double V_cut);

/// CSV with columns V,P_T,amplitude,residual,newton_iters.
void write_bifurcation_csv(const std::string& path, const std::vector<BifurcationPoint>& curve);

/// C^2 piecewise quintic Hermite reconstruction of a wave from nodal psi,
/// psi' (fourth order) and psi'' (from the equation), for off-grid quadrature.
class TwInterpolant {
public:
    explicit TwInterpolant(const TravelingWave& tw);

    struct Sample {
        double m, dm, phi, dphi, d2phi;
    };
    Sample operator()(double x) const;

private:
    Grid grid_;
    double V_, P_, theta_;
    std::vector<double> psi_, dpsi_, d2psi_;
};

}  // namespace ks
