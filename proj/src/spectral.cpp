/** @file spectral.cpp
 *  @brief Galerkin assembly, eigen/Gershgorin diagnostics and resolvent probes.
 */
#include "ks/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <numbers>

#include "json.hpp"
#include "ks/dynamics.hpp"

namespace ks {

using std::numbers::pi;

GalerkinMatrix assemble_s_c(double P, double Z, int N) {
    if (N < 2) throw DomainError("assemble_s_c: N must be >= 2");
    if (!(P > 0) || !(Z > 0)) throw DomainError("assemble_s_c: need P > 0 and Z > 0");
    GalerkinMatrix g;
    g.N = N;
    g.tag = "S_C";
    g.P = P;
    g.Z = Z;
    g.A = Eigen::MatrixXd::Zero(N, N);
    const double sz = std::sqrt(Z);
    const double coth = 1.0 / std::tanh(0.5 / sz);
    auto den = [&](int n) { return 1.0 + n * n * pi * pi * Z; };
    for (int n = 1; n <= N; ++n) {
        double d = -n * n * pi * pi + (P / Z) / (1.0 + 1.0 / (pi * pi * n * n * Z));
        if (n % 2) d += 4.0 * P * coth / (sz * den(n) * den(n));
        g.A(n - 1, n - 1) = d;
        if (n % 2 == 0) continue;
        for (int m = 1; m <= N; m += 2) {
            if (m == n) continue;
            const double sign = ((m + 1) / 2 + (n + 1) / 2) % 2 ? -1.0 : 1.0;
            g.A(m - 1, n - 1) = sign * 4.0 * P * coth / (sz * den(m) * den(n));
        }
    }
    return g;
}

ModePressure mode_pressure(int n, double x, double P, double Z) {
    const double k = n * pi;
    const double den = 1.0 + k * k * Z;
    if (n % 2 == 0) {
        const double c = P / den;
        return {c * std::cos(k * x), -c * k * std::sin(k * x), -c * k * k * std::cos(k * x)};
    }
    // The sinh term restores periodicity of phi; sin(n pi/2) = (-1)^((n-1)/2).
    const double a = 1.0 / std::sqrt(Z);
    const double s = ((n - 1) / 2) % 2 ? -1.0 : 1.0;
    const double b = -P * s / (den * std::sinh(0.5 * a));
    const double c = P / den;
    return {c * std::sin(k * x) + b * std::sinh(a * x), c * k * std::cos(k * x) + b * a * std::cosh(a * x),
            -c * k * k * std::sin(k * x) + b * a * a * std::sinh(a * x)};
}

namespace {

struct WaveSamples {
    std::vector<double> x, m, dm, dphi, d2phi;
    std::vector<std::vector<double>> v, dv;   // basis values per mode
};

WaveSamples sample_wave(const TravelingWave& tw, int N, int q) {
    if (q < 2 || q % (2 * tw.m_T.grid.n) != 0)
        throw DomainError("assemble_t_c: quad_points must be a positive multiple of 2n");
    const TwInterpolant interp(tw);
    WaveSamples s;
    const std::size_t Q = static_cast<std::size_t>(q) + 1;
    s.x.resize(Q);
    s.m.resize(Q);
    s.dm.resize(Q);
    s.dphi.resize(Q);
    s.d2phi.resize(Q);
    for (std::size_t j = 0; j < Q; ++j) {
        const double x = -0.5 + static_cast<double>(j) / q;
        const auto w = interp(x);
        s.x[j] = x;
        s.m[j] = w.m;
        s.dm[j] = w.dm;
        s.dphi[j] = w.dphi;
        s.d2phi[j] = w.d2phi;
    }
    s.v.assign(N, std::vector<double>(Q));
    s.dv.assign(N, std::vector<double>(Q));
    for (int k = 1; k <= N; ++k)
        for (std::size_t j = 0; j < Q; ++j) {
            s.v[k - 1][j] = basis_value(k, s.x[j]);
            s.dv[k - 1][j] = basis_d1(k, s.x[j]);
        }
    return s;
}

/// Column n (1-based) of D.
void d_column(const WaveSamples& s, const TravelingWave& tw, int n, double h, Eigen::MatrixXd& D) {
    const std::size_t Q = s.x.size();
    const double P = tw.P_T, Z = tw.Z, V = tw.V;
    const double edge = mode_pressure(n, 0.5, P, Z).dphi;
    std::vector<double> f(Q), prod(Q);
    for (std::size_t j = 0; j < Q; ++j) {
        const auto ph = mode_pressure(n, s.x[j], P, Z);
        const double v = s.v[n - 1][j], dv = s.dv[n - 1][j];
        f[j] = edge * s.dm[j] + V * dv - (s.m[j] - 1.0) * ph.d2phi - s.dm[j] * ph.dphi -
               dv * s.dphi[j] - v * s.d2phi[j];
    }
    for (int m = 1; m <= D.rows(); ++m) {
        for (std::size_t j = 0; j < Q; ++j) prod[j] = s.v[m - 1][j] * f[j];
        D(m - 1, n - 1) = 2.0 * simpson(h, prod);
    }
}

Eigen::MatrixXd d_part(const TravelingWave& tw, int N, int q, bool parallel) {
    if (N < 2) throw DomainError("assemble_t_c: N must be >= 2");
    const WaveSamples s = sample_wave(tw, N, q);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N, N);
    const double h = 1.0 / q;
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int n = 1; n <= N; ++n) d_column(s, tw, n, h, D);
    } else {
        for (int n = 1; n <= N; ++n) d_column(s, tw, n, h, D);
    }
    return D;
}

}  // namespace

Eigen::MatrixXd assemble_t_c_d(const TravelingWave& tw, int N, int quad_points) {
    return d_part(tw, N, quad_points, true);
}

Eigen::MatrixXd assemble_t_c_d_serial(const TravelingWave& tw, int N, int quad_points) {
    return d_part(tw, N, quad_points, false);
}

GalerkinMatrix assemble_t_c(const TravelingWave& tw, int N, int quad_points) {
    if (!tw.converged())
        throw DomainError("assemble_t_c: wave is not a converged Newton solution");
    const Eigen::MatrixXd D = assemble_t_c_d(tw, N, quad_points);
    const Eigen::MatrixXd D2 = assemble_t_c_d(tw, N, 2 * quad_points);
    const double gap = (D - D2).cwiseAbs().maxCoeff();
    if (!(gap <= 1e-8))
        throw NumericalError("assemble_t_c: quadrature doubling changed D by " + std::to_string(gap));
    GalerkinMatrix g = assemble_s_c(tw.P_T, tw.Z, N);
    g.A += D2;
    g.tag = "T_C";
    g.V = tw.V;
    g.quad_gap = gap;
    return g;
}

// ---- adjoint commutator ------------------------------------------------------

double adjoint_commutator_s(const ModelParams& params, const Field& u1, const Field& u2) {
    const Field one = Field::constant(u1.grid, 1.0, FieldKind::myosin);
    const ModelParams p = ModelParams::model_c(params.Z, params.P);
    return inner(linearized_rhs_c(one, u1, p), u2) - inner(u1, linearized_rhs_c(one, u2, p));
}

double adjoint_commutator_t(const TravelingWave& tw, const Field& u1, const Field& u2) {
    const ModelParams p = tw.params();
    return inner(linearized_rhs_c(tw.m_T, u1, p), u2) - inner(u1, linearized_rhs_c(tw.m_T, u2, p));
}

double commutator_slope_t(double Z, const Grid& grid, const std::function<double(double)>& u1,
                          const std::function<double(double)>& u2, double dV) {
    if (!(dV > 0)) throw DomainError("commutator_slope_t: dV must be > 0");
    const Field f1 = Field::sample(grid, u1, FieldKind::perturbation);
    const Field f2 = Field::sample(grid, u2, FieldKind::perturbation);
    const double hp = adjoint_commutator_t(exact_tw(dV, Z, grid), f1, f2);
    const double hm = adjoint_commutator_t(exact_tw(-dV, Z, grid), f1, f2);
    return (hp - hm) / (2.0 * dV);
}

// ---- Gershgorin ----------------------------------------------------------------

double gershgorin_rho() {
    const double p2 = pi * pi, p4 = p2 * p2;
    return (2 + 5 * p2 + 4 * p4) / (2 + 6 * p2 + 4 * p4);
}

GershgorinReport gershgorin_check(const Eigen::MatrixXd& A, double shift, double scale) {
    const int N = static_cast<int>(A.rows());
    GershgorinReport r;
    r.shift = shift;
    r.scale = scale;
    r.rho = gershgorin_rho();
    const Eigen::MatrixXd B = scale * A - shift * Eigen::MatrixXd::Identity(N, N);
    r.cond4 = B.allFinite();
    r.diag.resize(N);
    r.Q.assign(N, 0.0);
    for (int n = 0; n < N; ++n) {
        r.diag[n] = B(n, n);
        for (int m = 0; m < N; ++m)
            if (m != n) r.Q[n] += std::abs(B(m, n));
    }
    r.cond1 = true;
    for (int n = 0; n < N; ++n) {
        if (r.diag[n] == 0.0) r.cond1 = false;
        if (n > N / 2 && !(std::abs(r.diag[n]) > std::abs(r.diag[n - 1]))) r.cond1 = false;
        if (r.diag[n] != 0.0) r.max_ratio = std::max(r.max_ratio, r.Q[n] / std::abs(r.diag[n]));
        if (r.diag[n] + r.Q[n] < 0) ++r.discs_left;
    }
    r.cond2 = r.cond1 && r.max_ratio < r.rho;
    r.cond3 = true;
    for (int n = 0; n < N; n += 2)   // 0-based even index = odd mode
        for (int m = n + 2; m < N; m += 2)
            if (std::abs(r.diag[n] - r.diag[m]) < r.Q[n] + r.Q[m]) r.cond3 = false;
    return r;
}

// ---- eigenvalues -------------------------------------------------------------------

namespace {

std::vector<cplx> sorted_eigenvalues(const GalerkinMatrix& mat) {
    std::vector<cplx> ev;
    if (mat.tag == "S_C") {
        const Eigen::MatrixXd S = 0.5 * (mat.A + mat.A.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw NumericalError("eigenvalues: solver failed");
        for (int i = 0; i < S.rows(); ++i) ev.emplace_back(es.eigenvalues()[i], 0.0);
    } else {
        Eigen::EigenSolver<Eigen::MatrixXd> es(mat.A, false);
        if (es.info() != Eigen::Success) throw NumericalError("eigenvalues: solver failed");
        for (int i = 0; i < mat.A.rows(); ++i) ev.push_back(es.eigenvalues()[i]);
    }
    std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
    });
    for (std::size_t i = 0; i + 1 < ev.size(); ++i)
        if (std::abs(ev[i] - std::conj(ev[i + 1])) < 1e-10) ev[i + 1] = std::conj(ev[i]);
    return ev;
}

}  // namespace

SpectrumReport eigenvalues(const GalerkinMatrix& mat) {
    if (mat.N > 512) throw DomainError("eigenvalues: N must be <= 512");
    if (!mat.A.allFinite()) throw NumericalError("eigenvalues: non-finite matrix entries");
    SpectrumReport r;
    r.eigenvalues = sorted_eigenvalues(mat);
    r.leading = r.eigenvalues.front();
    return r;
}

double mu_prime(double Z) {
    const double P0 = solve_p0(Z);
    const double den = P0 * Z * (3 * P0 * P0 - 60 * Z + 2);
    if (std::abs(den) < 1e-12 * std::max(1.0, P0 * Z * 3 * P0 * P0))
        throw DomainError("mu_prime: singular denominator");
    return 3 * (P0 - 1) * (P0 * P0 - 12 * Z) / den;
}

LambdaCurve leading_eigenvalue_curve(double Z, const std::vector<double>& Vs, int N, const Grid& grid,
                                     int quad_points) {
    LambdaCurve c;
    c.V = Vs;
    c.lambda.resize(Vs.size());
    std::vector<std::exception_ptr> errors(Vs.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < Vs.size(); ++i) {
        try {
            const auto tw = exact_tw(Vs[i], Z, grid);
            c.lambda[i] = eigenvalues(assemble_t_c(tw, N, quad_points)).leading;
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < Vs.size(); ++i) {
        const double x = Vs[i] * Vs[i];
        num += x * c.lambda[i].real();
        den += x * x;
    }
    c.quadratic_coeff = den > 0 ? num / den : 0.0;
    return c;
}

// ---- resolvent ---------------------------------------------------------------------

namespace {

double sigma_min_inverse(const Eigen::MatrixXd& A, cplx lambda) {
    Eigen::MatrixXcd M = -A.cast<cplx>();
    M.diagonal().array() += lambda;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(M);   // singular values only; 7x faster than Jacobi at N = 64
    return 1.0 / svd.singularValues().minCoeff();
}

void check_away_from_spectrum(const std::vector<cplx>& ev, cplx lambda) {
    for (const auto& e : ev)
        if (std::abs(e - lambda) <= 1e-10)
            throw DomainError("resolvent_norm: lambda is within 1e-10 of an eigenvalue");
}

std::vector<cplx> general_eigenvalues(const Eigen::MatrixXd& A) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    if (es.info() != Eigen::Success) throw NumericalError("resolvent: eigensolver failed");
    std::vector<cplx> ev;
    for (int i = 0; i < A.rows(); ++i) ev.push_back(es.eigenvalues()[i]);
    return ev;
}

std::vector<ResolventSample> grid_impl(const Eigen::MatrixXd& A, const std::vector<double>& re,
                                       const std::vector<double>& im, bool parallel) {
    const auto ev = general_eigenvalues(A);
    const std::size_t R = re.size(), I = im.size();
    std::vector<ResolventSample> out(R * I);
    for (std::size_t i = 0; i < R; ++i)
        for (std::size_t j = 0; j < I; ++j) {
            const cplx l(re[i], im[j]);
            check_away_from_spectrum(ev, l);
            out[i * I + j].lambda = l;
        }
    const auto total = static_cast<long>(out.size());
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 8)
        for (long k = 0; k < total; ++k) out[k].norm = sigma_min_inverse(A, out[k].lambda);
    } else {
        for (long k = 0; k < total; ++k) out[k].norm = sigma_min_inverse(A, out[k].lambda);
    }
    return out;
}

}  // namespace

double resolvent_norm(const Eigen::MatrixXd& A, cplx lambda) {
    check_away_from_spectrum(general_eigenvalues(A), lambda);
    return sigma_min_inverse(A, lambda);
}

std::vector<double> default_resolvent_re() {
    std::vector<double> re(41);
    for (int i = 0; i < 41; ++i) re[i] = 50.0 * i / 40.0;
    return re;
}

std::vector<double> default_resolvent_im() {
    std::vector<double> g(40);
    for (int i = 0; i < 40; ++i) g[i] = 0.1 * std::pow(2000.0, i / 39.0);
    std::vector<double> im;
    for (auto it = g.rbegin(); it != g.rend(); ++it) im.push_back(-*it);
    im.push_back(0.0);
    im.insert(im.end(), g.begin(), g.end());
    return im;
}

std::vector<ResolventSample> resolvent_grid(const Eigen::MatrixXd& A, const std::vector<double>& re,
                                            const std::vector<double>& im) {
    return grid_impl(A, re, im, true);
}

std::vector<ResolventSample> resolvent_grid_serial(const Eigen::MatrixXd& A,
                                                   const std::vector<double>& re,
                                                   const std::vector<double>& im) {
    return grid_impl(A, re, im, false);
}

// ---- export --------------------------------------------------------------------------

void write_spectrum_json(const std::string& path, const SpectrumReport& r) {
    nlohmann::json j;
    j["eigenvalues"] = nlohmann::json::array();
    for (const auto& e : r.eigenvalues) j["eigenvalues"].push_back({e.real(), e.imag()});
    j["leading"] = {r.leading.real(), r.leading.imag()};
    const auto& g = r.gershgorin;
    j["gershgorin"] = {{"shift", g.shift},         {"scale", g.scale},
                       {"rho", g.rho},             {"max_ratio", g.max_ratio},
                       {"condition1", g.cond1},    {"condition2", g.cond2},
                       {"condition3", g.cond3},    {"condition4", g.cond4},
                       {"discs_left", g.discs_left}, {"Q", g.Q},
                       {"diag", g.diag}};
    j["sup_resolvent"] = r.sup_resolvent;
    j["resolvent_samples"] = r.resolvent.size();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << j.dump(2) << '\n';
}

void write_resolvent_csv(const std::string& path, const std::vector<ResolventSample>& s) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out.precision(17);
    out << "re_lambda,im_lambda,norm\n";
    for (const auto& p : s) out << p.lambda.real() << ',' << p.lambda.imag() << ',' << p.norm << '\n';
}

}  // namespace ks
