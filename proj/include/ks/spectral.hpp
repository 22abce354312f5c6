/** @file spectral.hpp
 *  @brief Galerkin matrices of the linearized Model C operators and their
 *         spectral diagnostics.
 *
 *  Basis v_k (see numerics.hpp) with Gram matrix I/2. Matrices are stored
 *  Gram-normalized, A_mn = 2 <v_m, L v_n>, so their eigenvalues are operator
 *  eigenvalues.
 *
 *  S_C u = u'' - phi_u'' linearizes about m = 1. T_C linearizes about a wave:
 *  T_C u = u'' + phi_u'(1/2) m_T' + V u' - (m_T phi_u')' - (u phi_T')',
 *  assembled as the S_C matrix at P = P_T plus a quadrature part D that
 *  vanishes with V.
 */
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "ks/numerics.hpp"
#include "ks/traveling_wave.hpp"

namespace ks {

using cplx = std::complex<double>;

struct GalerkinMatrix {
    int N = 0;
    Eigen::MatrixXd A;
    std::string tag;   ///< "S_C" or "T_C"
    double P = 0, Z = 0, V = 0;
    double quad_gap = 0;   ///< T_C only: max |D_q - D_2q|
};

/// Closed-form entries; the odd block couples through coth(1/(2 sqrt Z)).
GalerkinMatrix assemble_s_c(double P, double Z, int N);

/// Analytic periodic pressure of a single basis mode, with derivatives.
struct ModePressure {
    double phi, dphi, d2phi;
};
ModePressure mode_pressure(int n, double x, double P, double Z);

/// D part of T_C by composite Simpson with `quad_points` panels
/// (a multiple of twice the wave's cell count). Columns run in parallel.
Eigen::MatrixXd assemble_t_c_d(const TravelingWave& tw, int N, int quad_points);
/// Serial reference for assemble_t_c_d.
Eigen::MatrixXd assemble_t_c_d_serial(const TravelingWave& tw, int N, int quad_points);

/// S_C(P_T) + D, with D checked against a doubled quadrature (gap <= 1e-8).
GalerkinMatrix assemble_t_c(const TravelingWave& tw, int N, int quad_points = 1024);

/// H(u1, u2) = <L u1, u2> - <u1, L u2> with L the exact linearization of the
/// discrete Model C operator about m = 1 (S_C) or about tw.m_T (T_C).
double adjoint_commutator_s(const ModelParams& params, const Field& u1, const Field& u2);
double adjoint_commutator_t(const TravelingWave& tw, const Field& u1, const Field& u2);
/// Central difference of the T_C commutator in V at V = 0, waves from exact_tw.
double commutator_slope_t(double Z, const Grid& grid, const std::function<double(double)>& u1,
                          const std::function<double(double)>& u2, double dV = 0.01);

struct GershgorinReport {
    double shift = 1, scale = 1, rho = 0;
    std::vector<double> diag;   ///< b_nn
    std::vector<double> Q;      ///< off-diagonal column sums of |b_mn|
    double max_ratio = 0;       ///< max Q_n / |b_nn|
    bool cond1 = false;         ///< b_nn != 0 and |b_nn| increasing over the upper half
    bool cond2 = false;         ///< max_ratio < rho
    bool cond3 = false;         ///< |b_nn - b_mm| >= Q_n + Q_m for odd n != m
    bool cond4 = false;         ///< all entries finite
    int discs_left = 0;         ///< rows with b_nn + Q_n < 0
};

/// (2 + 5 pi^2 + 4 pi^4)/(2 + 6 pi^2 + 4 pi^4)
double gershgorin_rho();
/// Discs of B = scale*A - shift*I.
GershgorinReport gershgorin_check(const Eigen::MatrixXd& A, double shift = 1.0, double scale = 1.0);

struct ResolventSample {
    cplx lambda;
    double norm;
};

struct SpectrumReport {
    std::vector<cplx> eigenvalues;   ///< descending real part, ties by descending imaginary part
    cplx leading;
    GershgorinReport gershgorin;
    std::vector<ResolventSample> resolvent;
    double sup_resolvent = 0;
};

/// Dense eigensolve; fills eigenvalues and leading.
SpectrumReport eigenvalues(const GalerkinMatrix& mat);

/// 3 (P0-1)(P0^2-12Z) / (P0 Z (3 P0^2 - 60 Z + 2)).
double mu_prime(double Z);

struct LambdaCurve {
    std::vector<double> V;
    std::vector<cplx> lambda;
    double quadratic_coeff = 0;   ///< least-squares c in Re lambda = c V^2 over V != 0
};
LambdaCurve leading_eigenvalue_curve(double Z, const std::vector<double>& Vs, int N, const Grid& grid,
                                     int quad_points = 1024);

/// 1 / sigma_min(lambda I - A); throws DomainError within 1e-10 of an eigenvalue.
double resolvent_norm(const Eigen::MatrixXd& A, cplx lambda);

/// Re uniform on [0, 50] (41 points); Im = 0 and +-geometric on [0.1, 200] (81 points).
std::vector<double> default_resolvent_re();
std::vector<double> default_resolvent_im();

/// Resolvent norms on the tensor grid re x im (OpenMP over points).
std::vector<ResolventSample> resolvent_grid(const Eigen::MatrixXd& A, const std::vector<double>& re,
                                            const std::vector<double>& im);
std::vector<ResolventSample> resolvent_grid_serial(const Eigen::MatrixXd& A,
                                                   const std::vector<double>& re,
                                                   const std::vector<double>& im);

/// JSON: eigenvalues as [re, im] pairs, leading, gershgorin record, sup_resolvent.
void write_spectrum_json(const std::string& path, const SpectrumReport& r);
/// CSV with columns re_lambda,im_lambda,norm.
void write_resolvent_csv(const std::string& path, const std::vector<ResolventSample>& s);

}  // namespace ks
