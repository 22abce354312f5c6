/** @file elliptic.hpp
 *  @brief Pressure equation -Z phi'' + phi = P m with periodic or Dirichlet data.
 *
 *  Discretization: three-point stencil on the nodal grid. In the periodic case
 *  nodes 0 and n are the same point and the source there is the average of the
 *  two one-sided values m_0 and m_n (the trapezoid rule applied to the Green's
 *  representation yields exactly this).
 */
#pragma once

#include <functional>
#include <vector>

#include "ks/numerics.hpp"

namespace ks {

/// Tridiagonal solve; sub[0] and sup[n-1] are ignored.
std::vector<double> solve_tridiagonal(const std::vector<double>& sub, const std::vector<double>& diag,
                                      const std::vector<double>& sup, std::vector<double> rhs);

/// Cyclic tridiagonal solve by a rank-one Sherman-Morrison correction.
/// sub[0] couples row 0 to column n-1, sup[n-1] couples row n-1 to column 0.
std::vector<double> solve_cyclic_tridiagonal(const std::vector<double>& sub,
                                             const std::vector<double>& diag,
                                             const std::vector<double>& sup,
                                             const std::vector<double>& rhs);

/// G(x, y) = cosh((1/2 - |x - y|)/sqrt(Z)).
double greens_kernel(double x, double y, double Z);

/// Banded periodic solve; returns a pressure field with phi[0] == phi[n].
Field solve_periodic(const Field& m, const ModelParams& params);

/// Reference-interval solve of -(Z/L^2) phi'' + phi = P m with phi(+-1/2) = 1 - L.
/// m is the physical density sampled at the mapped nodes.
Field solve_dirichlet(const Field& m, const ModelParams& params, double L);

/// Trapezoid quadrature of the Green's representation at every node (O(n^2)).
Field solve_periodic_greens(const Field& m, const ModelParams& params);

/// Green's representation at a single point for an analytic source, by
/// Gauss-Legendre quadrature split at the kernel's kink.
double greens_phi(const std::function<double(double)>& m, double x, double Z, double P,
                  int panels = 16);

/// phi'(-1/2) and phi'(1/2) from the half-cell flux balance
///   Z (phi'(1/2) - D_{n-1/2}) / (h/2) = phi_n - P m_n   (and mirrored),
/// which for the periodic discretization gives left == right exactly.
struct BoundarySlopes {
    double left = 0.0;
    double right = 0.0;
};
BoundarySlopes boundary_slopes(const Field& phi, const Field& m, double Z, double P);

struct EllipticBoundsReport {
    // index 0, 1, 2 -> p = 1, 2, infinity
    bool phi_ok[3] = {false, false, false};
    double phi_margin[3] = {0, 0, 0};   ///< (bound - value) / bound
    bool dphi_ok = false;               ///< ||phi'||_inf <= P/(2Z) ||u||_2
    double dphi_margin = 0;
    bool d2phi_ok[3] = {false, false, false};
    double d2phi_margin[3] = {0, 0, 0};
    bool all() const;
};

/// Evaluates the three a-priori bounds for phi solving the periodic problem
/// with source P u. Equality cases are accepted up to a 1e-12 relative slack.
EllipticBoundsReport verify_elliptic_bounds(const Field& u, const ModelParams& params);

}  // namespace ks
