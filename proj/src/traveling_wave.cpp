/** @file traveling_wave.cpp
 *  @brief Wave asymptotics, the compact Newton solve, the discrete fixed point
 *         and continuation.
 */
#include "ks/traveling_wave.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <fmt/core.h>
#include <limits>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "ks/dynamics.hpp"
#include "ks/elliptic.hpp"

namespace ks {

using std::numbers::pi;

namespace {

constexpr double kTwelfth = 1.0 / 12.0;

/// (tan w - w)/(4 w^3), increasing from 1/12 on (0, pi/2).
double k2(double w) {
    if (w < 1e-3) return kTwelfth + w * w / 30.0 + 17.0 * w * w * w * w / 1260.0;
    return (std::tan(w) - w) / (4.0 * w * w * w);
}

/// (v - tanh v)/(4 v^3), decreasing from 1/12 on (0, inf).
double k1(double v) {
    if (v < 1e-3) return kTwelfth - v * v / 30.0 + 17.0 * v * v * v * v / 1260.0;
    return (v - std::tanh(v)) / (4.0 * v * v * v);
}

template <class F>
double bisect(F f, double lo, double hi) {
    double flo = f(lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::string fmt_sci(double v) { return fmt::format("{:.3e}", v); }

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double a : v) m = std::max(m, std::abs(a));
    return m;
}

}  // namespace

double p0_residual(double P, double Z) {
    if (P > 1) {
        const double s = std::sqrt(P - 1) / (2.0 * std::sqrt(Z));
        return (std::sin(s) - P * s * std::cos(s)) / std::max(1.0, P);
    }
    const double s = std::sqrt(1 - P) / (2.0 * std::sqrt(Z));
    return (std::sinh(s) - P * s * std::cosh(s)) / std::max(1.0, P);
}

double solve_p0(double Z) {
    if (!(Z > 0) || !std::isfinite(Z)) throw DomainError("solve_p0: Z must be > 0");
    if (std::abs(Z - kTwelfth) < 1e-6)
        throw DomainError("solve_p0: Z = 1/12 is a singular parameter");
    if (Z > kTwelfth) {
        const double w = bisect([Z](double w) { return k2(w) - Z; }, 0.0, pi / 2);
        return 1.0 + 4.0 * Z * w * w;   // == tan(w)/w on the root, without the pole
    }
    const double v = bisect([Z](double v) { return k1(v) - Z; }, 0.0, 1.0 + 0.5 / std::sqrt(Z));
    return 1.0 - 4.0 * Z * v * v;
}

std::vector<double> p0_higher_branches(double Z, int count) {
    if (!(Z > kTwelfth)) throw DomainError("p0_higher_branches: need Z > 1/12");
    if (count < 0) throw DomainError("p0_higher_branches: count must be >= 0");
    std::vector<double> out;
    for (int j = 1; j <= count; ++j) {
        // tan runs from -inf to +inf across the branch, so the sign change is bracketed.
        const double lo = (j - 0.5) * pi, hi = (j + 0.5) * pi;
        const double eps = 1e-12;
        const double w = bisect(
            [Z](double w) { return std::tan(w) - w - 4.0 * Z * w * w * w; }, lo + eps, hi - eps);
        out.push_back(1.0 + 4.0 * Z * w * w);
    }
    return out;
}

double p2_coefficient(double P0, double Z) {
    const double den = 288.0 * std::pow(P0 - 1, 4) * (P0 * P0 - 12 * Z);
    if (std::abs(P0 - 1) < 1e-12 || std::abs(P0 * P0 - 12 * Z) < 1e-12 * std::max(1.0, 12 * Z))
        throw DomainError("p2_coefficient: singular at P0 = 1 or P0^2 = 12 Z");
    const double p = P0;
    const double num = 6 * std::pow(p, 6) - 15 * std::pow(p, 5) - 3 * std::pow(p, 4) * (56 * Z - 5) +
                       std::pow(p, 3) * (514 * Z - 6) - 1044 * p * p * Z + 72 * p * Z * (55 * Z - 1) +
                       5280 * Z * Z;
    return p * num / den;
}

AsymptoticTW AsymptoticTW::make(double Z) {
    AsymptoticTW a;
    a.Z = Z;
    a.P0 = solve_p0(Z);
    if (!(a.P0 > 1)) throw DomainError("asymptotic wave: profiles require Z > 1/12");
    a.P2 = p2_coefficient(a.P0, Z);
    const double p = a.P0, q = p - 1;
    a.k = std::sqrt(q / Z);
    a.csc_half = 1.0 / std::sin(0.5 * a.k);
    const double R = std::sqrt((p * p * p - p * p + 4 * Z) / Z);
    const double q4 = q * q * q * q;
    a.A = (-6 * p * Z + p + 24 * Z - 1) / (24 * q4);
    a.B = (12 - 12 * p) / (24 * q4);
    a.C = (p * (28 * Z - 3) + 3 * p * p - 60 * Z) * R / (96 * q4);
    a.D = -p * R / (8 * q * q * q);
    a.E = (4 - 3 * p) * std::sqrt(Z) * R / (8 * std::pow(q, 3.5));
    a.F = (3 - 4 * p) * (p * p * p - p * p + 4 * Z) / (48 * q4);
    a.a0 = (p * p * (1 - 30 * Z) + p * (48 * Z - 1)) / (24 * q4);
    a.a2 = -p / (2 * q * q * q);
    a.b0 = a.C;
    a.b2 = a.D;
    a.c1 = p * R * std::sqrt(Z) / (8 * std::pow(q, 3.5));
    a.d0 = (-4 * p * Z - p * p * p * p + p * p * p) / (48 * q4);
    a.log_lambda0 = -p;
    a.lambda2_rel = -a.P2 - (3 * p * p - 60 * Z + 2) / (48 * q * q);
    return a;
}

double AsymptoticTW::phi1(double x) const {
    const double r = P0 / (P0 - 1);
    return r * x - 0.5 * r * csc_half * std::sin(k * x);
}

double AsymptoticTW::dphi1(double x) const {
    const double r = P0 / (P0 - 1);
    return r - 0.5 * r * csc_half * k * std::cos(k * x);
}

double AsymptoticTW::phi2(double x) const {
    return P2 + a0 + a2 * x * x + (b0 + b2 * x * x) * std::cos(k * x) + c1 * x * std::sin(k * x) +
           d0 * std::cos(2 * k * x);
}

double AsymptoticTW::m1(double x) const { return phi1(x) - x; }

double AsymptoticTW::m2(double x) const {
    return A + B * x * x + (C + D * x * x) * std::cos(k * x) + E * x * std::sin(k * x) +
           F * std::cos(2 * k * x);
}

const char* to_string(TwSource s) {
    switch (s) {
        case TwSource::asymptotic: return "asymptotic";
        case TwSource::newton: return "newton";
        case TwSource::discrete: return "discrete";
    }
    return "?";
}

namespace {

double fc_residual(const Field& m, double Z, double P) {
    return norm(rhs_model_c(m, ModelParams::model_c(Z, P)), Norm::L2);
}

TravelingWave trivial_wave(double Z, const Grid& grid, TwSource src) {
    TravelingWave tw;
    tw.V = 0.0;
    tw.Z = Z;
    tw.P_T = solve_p0(Z);
    tw.log_lambda = -tw.P_T;
    tw.m_T = Field::constant(grid, 1.0, FieldKind::myosin);
    tw.phi_T = Field::constant(grid, tw.P_T, FieldKind::pressure);
    tw.source = src;
    return tw;
}

}  // namespace

TravelingWave asymptotic_tw(double V, double Z, const Grid& grid) {
    const auto a = AsymptoticTW::make(Z);
    TravelingWave tw;
    tw.V = V;
    tw.Z = Z;
    tw.P_T = a.P0 + V * V * a.P2;
    tw.log_lambda = a.log_lambda0 + V * V * a.lambda2_rel;
    tw.m_T = Field::sample(grid, [&](double x) { return 1 + V * a.m1(x) + V * V * a.m2(x); },
                           FieldKind::myosin);
    const double mass0 = mass(tw.m_T);
    for (auto& v : tw.m_T.values) v /= mass0;
    tw.phi_T = Field::sample(grid, [&](double x) { return a.P0 + V * a.phi1(x) + V * V * a.phi2(x); },
                             FieldKind::pressure);
    tw.source = TwSource::asymptotic;
    if (std::abs(V) > 0.3) tw.note = "|V| > 0.3: outside the small-velocity regime";
    tw.residual = fc_residual(tw.m_T, Z, tw.P_T);
    return tw;
}

// ---- compact fourth-order system -----------------------------------------

namespace {

struct TwLocal {
    std::vector<double> m, g, gp, gP, gt;   // m, psi'', and d psi''/d(psi_i, P, theta)
};

TwLocal tw_local(const std::vector<double>& u, double V, double Z, const Grid& grid) {
    const std::size_t N = grid.size();
    const double P = u[N], theta = u[N + 1];
    TwLocal l;
    l.m.resize(N);
    l.g.resize(N);
    l.gp.resize(N);
    l.gP.resize(N);
    l.gt.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double m = std::exp(theta + u[i] - V * grid.x(i));
        l.m[i] = m;
        l.g[i] = (u[i] - P * (m - 1)) / Z;
        l.gp[i] = (1 - P * m) / Z;
        l.gP[i] = -(m - 1) / Z;
        l.gt[i] = -P * m / Z;
    }
    return l;
}

using Triplets = std::vector<Eigen::Triplet<double>>;

Triplets tw_triplets(const std::vector<double>& u, double V, double Z, const Grid& grid) {
    const int n = grid.n;
    const double h = grid.h;
    const int cP = n + 1, cT = n + 2;
    const auto l = tw_local(u, V, Z, grid);
    Triplets t;
    t.reserve(9 * static_cast<std::size_t>(n) + 16);
    // periodicity
    t.emplace_back(0, 0, 1.0);
    t.emplace_back(0, n, -1.0);
    // end closures: weights (7, 6, -1)/24 on g at the end, next and next-next node
    auto closure = [&](int row, int e, int e1, int e2) {
        const double c = h / 24.0;
        t.emplace_back(row, e, -1.0 / h - 7 * c * l.gp[e]);
        t.emplace_back(row, e1, 1.0 / h - 6 * c * l.gp[e1]);
        t.emplace_back(row, e2, c * l.gp[e2]);
        t.emplace_back(row, cP, -c * (7 * l.gP[e] + 6 * l.gP[e1] - l.gP[e2]));
        t.emplace_back(row, cT, -c * (7 * l.gt[e] + 6 * l.gt[e1] - l.gt[e2]));
    };
    closure(1, 0, 1, 2);
    closure(n + 1, n, n - 1, n - 2);
    for (int i = 1; i < n; ++i) {
        const int row = i + 1;
        const double c = h / 12.0;
        t.emplace_back(row, i - 1, 1.0 / h - c * l.gp[i - 1]);
        t.emplace_back(row, i, -2.0 / h - 10 * c * l.gp[i]);
        t.emplace_back(row, i + 1, 1.0 / h - c * l.gp[i + 1]);
        t.emplace_back(row, cP, -c * (l.gP[i - 1] + 10 * l.gP[i] + l.gP[i + 1]));
        t.emplace_back(row, cT, -c * (l.gt[i - 1] + 10 * l.gt[i] + l.gt[i + 1]));
    }
    const auto w = trapezoid_weights(grid);
    double dtheta = 0.0;
    for (int i = 0; i <= n; ++i) {
        t.emplace_back(n + 2, i, w[i] * l.m[i]);
        dtheta += w[i] * l.m[i];
    }
    t.emplace_back(n + 2, cT, dtheta);
    return t;
}

}  // namespace

std::vector<double> exact_tw_residual(const std::vector<double>& u, double V, double Z,
                                      const Grid& grid) {
    const int n = grid.n;
    const double h = grid.h;
    if (u.size() != static_cast<std::size_t>(n) + 3)
        throw DomainError("exact_tw_residual: expected n + 3 unknowns");
    const auto l = tw_local(u, V, Z, grid);
    const auto& g = l.g;
    std::vector<double> r(n + 3);
    r[0] = u[0] - u[n];
    r[1] = (u[1] - u[0] - h * V - h * h * (7 * g[0] + 6 * g[1] - g[2]) / 24) / h;
    for (int i = 1; i < n; ++i)
        r[i + 1] = (u[i + 1] - 2 * u[i] + u[i - 1] - h * h * (g[i + 1] + 10 * g[i] + g[i - 1]) / 12) / h;
    r[n + 1] = (u[n - 1] - u[n] + h * V - h * h * (7 * g[n] + 6 * g[n - 1] - g[n - 2]) / 24) / h;
    r[n + 2] = trapezoid(grid, l.m) - 1.0;
    return r;
}

std::vector<std::vector<double>> exact_tw_jacobian(const std::vector<double>& u, double V, double Z,
                                                   const Grid& grid) {
    const std::size_t N = u.size();
    std::vector<std::vector<double>> J(N, std::vector<double>(N, 0.0));
    for (const auto& t : tw_triplets(u, V, Z, grid)) J[t.row()][t.col()] += t.value();
    return J;
}

TravelingWave exact_tw(double V, double Z, const Grid& grid, const std::optional<TravelingWave>& guess,
                       NewtonOptions opt) {
    if (!std::isfinite(V)) throw DomainError("exact_tw: V must be finite");
    if (V == 0.0) {
        // The Jacobian is singular at the bifurcation point; the trivial wave is exact.
        auto tw = trivial_wave(Z, grid, TwSource::newton);
        return tw;
    }
    const TravelingWave g0 = guess ? *guess : asymptotic_tw(V, Z, grid);
    if (!(g0.m_T.grid == grid)) throw DomainError("exact_tw: guess lives on a different grid");

    const int n = grid.n;
    std::vector<double> u(n + 3);
    for (int i = 0; i <= n; ++i) u[i] = g0.phi_T.values[i] - g0.P_T;
    u[n + 1] = g0.P_T;
    {
        std::vector<double> e(n + 1);
        for (int i = 0; i <= n; ++i) e[i] = std::exp(u[i] - V * grid.x(i));
        u[n + 2] = -std::log(trapezoid(grid, e));
    }

    auto r = exact_tw_residual(u, V, Z, grid);
    double rn = max_abs(r);
    int it = 0;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    while (rn >= opt.tol) {
        if (++it > opt.max_iter)
            throw NumericalError("exact_tw: Newton did not converge in " +
                                 std::to_string(opt.max_iter) + " iterations (V = " +
                                 std::to_string(V) + ", residual " + fmt_sci(rn) + ")");
        const auto t = tw_triplets(u, V, Z, grid);
        Eigen::SparseMatrix<double> J(n + 3, n + 3);
        J.setFromTriplets(t.begin(), t.end());
        lu.compute(J);
        if (lu.info() != Eigen::Success) throw NumericalError("exact_tw: singular Jacobian");
        Eigen::VectorXd rhs = -Eigen::Map<Eigen::VectorXd>(r.data(), n + 3);
        const Eigen::VectorXd du = lu.solve(rhs);
        double alpha = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 30 && !accepted; ++ls, alpha *= 0.5) {
            std::vector<double> trial(u);
            for (int i = 0; i < n + 3; ++i) trial[i] += alpha * du[i];
            auto rt = exact_tw_residual(trial, V, Z, grid);
            const double tn = max_abs(rt);
            if (std::isfinite(tn) && tn < rn) {
                u = std::move(trial);
                r = std::move(rt);
                rn = tn;
                accepted = true;
            }
        }
        if (!accepted)
            throw NumericalError("exact_tw: line search stalled at residual " + fmt_sci(rn));
    }

    TravelingWave tw;
    tw.V = V;
    tw.Z = Z;
    tw.P_T = u[n + 1];
    tw.log_lambda = u[n + 2] - tw.P_T;
    std::vector<double> m(n + 1), phi(n + 1);
    for (int i = 0; i <= n; ++i) {
        m[i] = std::exp(u[n + 2] + u[i] - V * grid.x(i));
        phi[i] = u[i] + tw.P_T;
        if (!(m[i] > 0)) throw NumericalError("exact_tw: non-positive density");
    }
    tw.m_T = Field(grid, std::move(m), FieldKind::myosin);
    tw.phi_T = Field(grid, std::move(phi), FieldKind::pressure);
    tw.newton_residual = rn;
    tw.newton_iters = it;
    tw.source = TwSource::newton;
    tw.residual = fc_residual(tw.m_T, Z, tw.P_T);
    return tw;
}

std::pair<double, double> tw_end_slopes(const TravelingWave& tw) {
    const auto& f = tw.phi_T.values;
    const auto& m = tw.m_T.values;
    const std::size_t n = f.size() - 1;
    const double h = tw.phi_T.grid.h, P = tw.P_T, Z = tw.Z;
    auto g = [&](std::size_t i) { return (f[i] - P * m[i]) / Z; };
    const double left = (f[1] - f[0]) / h - h * (7 * g(0) + 6 * g(1) - g(2)) / 24;
    const double right = (f[n] - f[n - 1]) / h + h * (7 * g(n) + 6 * g(n - 1) - g(n - 2)) / 24;
    return {left, right};
}

// ---- discrete fixed point of the time-stepping operator -------------------

namespace {

/// Face fluxes of F_C for (m, P), plus the discrete edge slope.
std::vector<double> scheme_fluxes(const Field& m, double Z, double P, double& v) {
    const ModelParams p = ModelParams::model_c(Z, P);
    const Field phi = solve_periodic(m, p);
    v = boundary_slopes(phi, m, Z, P).right;
    const double h = m.grid.h;
    std::vector<double> J(m.grid.n);
    for (int f = 0; f < m.grid.n; ++f)
        J[f] = (m.values[f + 1] - m.values[f]) / h +
               (v - (phi.values[f + 1] - phi.values[f]) / h) * 0.5 * (m.values[f] + m.values[f + 1]);
    return J;
}

std::vector<double> scheme_residual(const Field& m, double P, double V, double Z) {
    double v = 0;
    auto r = scheme_fluxes(m, Z, P, v);
    r.push_back(mass(m) - 1.0);
    r.push_back(v - V);
    return r;
}

}  // namespace

TravelingWave scheme_tw(double V, double Z, const Grid& grid, const std::optional<TravelingWave>& guess,
                        NewtonOptions opt) {
    if (V == 0.0) return trivial_wave(Z, grid, TwSource::discrete);
    const TravelingWave g0 = guess ? *guess : exact_tw(V, Z, grid);
    if (!(g0.m_T.grid == grid)) throw DomainError("scheme_tw: guess lives on a different grid");

    const int n = grid.n;
    const int N = n + 2;
    Field m = g0.m_T;
    double P = g0.P_T;
    auto r = scheme_residual(m, P, V, Z);
    double rn = max_abs(r);
    int it = 0;
    const double h = grid.h;
    const auto w = trapezoid_weights(grid);
    // Face slopes of phi ~ P carry round-off of order eps * P / h; no Newton
    // iteration can go below that.
    const double floor = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(P) / h;
    const double tol = std::max(opt.tol, floor);
    while (rn >= tol) {
        if (++it > opt.max_iter)
            throw NumericalError("scheme_tw: Newton did not converge (V = " + std::to_string(V) +
                                 ", residual " + fmt_sci(rn) + ")");
        // Exact Jacobian: phi is linear in m and proportional to P.
        const ModelParams p = ModelParams::model_c(Z, P);
        const Field phi = solve_periodic(m, p);
        const double v = boundary_slopes(phi, m, Z, P).right;
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(N, N);
        Field e = Field::constant(grid, 0.0, FieldKind::perturbation);
        for (int j = 0; j <= n; ++j) {
            e.values[j] = 1.0;
            const Field pu = solve_periodic(e, p);
            const double vu = boundary_slopes(pu, e, Z, P).right;
            e.values[j] = 0.0;
            for (int f = 0; f < n; ++f) {
                const double du = (f + 1 == j) - (f == j);
                const double ubar = 0.5 * ((f == j) + (f + 1 == j));
                const double mbar = 0.5 * (m.values[f] + m.values[f + 1]);
                J(f, j) = du / h + (v - (phi.values[f + 1] - phi.values[f]) / h) * ubar +
                          (vu - (pu.values[f + 1] - pu.values[f]) / h) * mbar;
            }
            J(n, j) = w[j];
            J(n + 1, j) = vu;
        }
        for (int f = 0; f < n; ++f) {
            const double mbar = 0.5 * (m.values[f] + m.values[f + 1]);
            J(f, n + 1) = (v - (phi.values[f + 1] - phi.values[f]) / h) * mbar / P;
        }
        J(n + 1, n + 1) = v / P;
        const Eigen::VectorXd du =
            J.partialPivLu().solve(-Eigen::Map<const Eigen::VectorXd>(r.data(), N));
        double alpha = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 30 && !accepted; ++ls, alpha *= 0.5) {
            Field mt = m;
            for (int i = 0; i <= n; ++i) mt.values[i] += alpha * du[i];
            const double Pt = P + alpha * du[n + 1];
            if (!(Pt > 0)) continue;
            auto rt = scheme_residual(mt, Pt, V, Z);
            const double tn = max_abs(rt);
            if (std::isfinite(tn) && tn < rn) {
                m = std::move(mt);
                P = Pt;
                r = std::move(rt);
                rn = tn;
                accepted = true;
            }
        }
        if (!accepted)
            throw NumericalError("scheme_tw: line search stalled at residual " + fmt_sci(rn));
    }
    for (double a : m.values)
        if (!(a > 0)) throw NumericalError("scheme_tw: non-positive density");

    TravelingWave tw;
    tw.V = V;
    tw.Z = Z;
    tw.P_T = P;
    m.kind = FieldKind::myosin;
    tw.phi_T = solve_periodic(m, ModelParams::model_c(Z, P));
    tw.m_T = std::move(m);
    tw.log_lambda = g0.log_lambda;
    tw.newton_residual = rn;
    tw.newton_iters = it;
    tw.source = TwSource::discrete;
    tw.residual = fc_residual(tw.m_T, Z, P);
    return tw;
}

// ---- continuation ----------------------------------------------------------

std::vector<BifurcationPoint> trace_bifurcation(double Z, double V_max, int steps, const Grid& grid) {
    if (steps < 2) throw DomainError("trace_bifurcation: steps must be >= 2");
    if (!(V_max > 0)) throw DomainError("trace_bifurcation: V_max must be > 0");
    std::vector<BifurcationPoint> half;
    std::optional<TravelingWave> prev;
    for (int k = 0; k <= steps; ++k) {
        const double V = V_max * k / steps;
        TravelingWave tw;
        try {
            tw = exact_tw(V, Z, grid, prev && prev->V != 0.0 ? prev : std::nullopt);
        } catch (const NumericalError& e) {
            throw NumericalError("trace_bifurcation: continuation stopped at V = " +
                                 std::to_string(V) + ": " + e.what());
        }
        Field dev = tw.m_T;
        for (auto& a : dev.values) a -= 1.0;
        half.push_back({V, tw.P_T, norm(dev, Norm::L2), tw.residual, tw.newton_iters});
        prev = std::move(tw);
    }
    std::vector<BifurcationPoint> curve;
    for (auto it = half.rbegin(); it != half.rend(); ++it) {
        if (it->V == 0.0) continue;
        BifurcationPoint p = *it;
        p.V = -p.V;
        curve.push_back(p);
    }
    curve.insert(curve.end(), half.begin(), half.end());
    return curve;
}

double fit_p2(const std::vector<BifurcationPoint>& curve, double P0, double V_cut) {
    double num = 0.0, den = 0.0;
    for (const auto& p : curve) {
        if (p.V == 0.0 || std::abs(p.V) > V_cut) continue;
        const double x = p.V * p.V;
        num += x * (p.P_T - P0);
        den += x * x;
    }
    if (den == 0.0) throw DomainError("fit_p2: no points with 0 < |V| <= V_cut");
    return num / den;
}

void write_bifurcation_csv(const std::string& path, const std::vector<BifurcationPoint>& curve) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out.precision(17);
    out << "V,P_T,amplitude,residual,newton_iters\n";
    for (const auto& p : curve)
        out << p.V << ',' << p.P_T << ',' << p.amplitude << ',' << p.residual << ',' << p.newton_iters
            << '\n';
}

// ---- interpolation ---------------------------------------------------------

TwInterpolant::TwInterpolant(const TravelingWave& tw)
    : grid_(tw.m_T.grid), V_(tw.V), P_(tw.P_T), theta_(0.0) {
    const std::size_t N = grid_.size();
    const double h = grid_.h, Z = tw.Z;
    psi_.resize(N);
    dpsi_.resize(N);
    d2psi_.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        psi_[i] = tw.phi_T.values[i] - P_;
        d2psi_[i] = (psi_[i] - P_ * (tw.m_T.values[i] - 1)) / Z;
    }
    // Central difference corrected by the known second derivative: O(h^4).
    for (std::size_t i = 1; i + 1 < N; ++i)
        dpsi_[i] = (psi_[i + 1] - psi_[i - 1]) / (2 * h) - h * (d2psi_[i + 1] - d2psi_[i - 1]) / 12;
    dpsi_.front() = dpsi_.back() = V_;
    // theta from the nodal density keeps m consistent with m_T at the nodes.
    theta_ = std::log(tw.m_T.values[0]) - psi_[0] + V_ * grid_.x(0);
}

TwInterpolant::Sample TwInterpolant::operator()(double x) const {
    const double h = grid_.h;
    const double s = (x + 0.5) / h;
    auto i = static_cast<std::size_t>(std::clamp(std::floor(s), 0.0, static_cast<double>(grid_.n - 1)));
    const double t = s - static_cast<double>(i);

    const double a0 = psi_[i], a1 = h * dpsi_[i], a2 = 0.5 * h * h * d2psi_[i];
    const double Y = psi_[i + 1] - (a0 + a1 + a2);
    const double D = h * dpsi_[i + 1] - (a1 + 2 * a2);
    const double S = h * h * d2psi_[i + 1] - 2 * a2;
    const double a3 = 10 * Y - 4 * D + 0.5 * S;
    const double a4 = -15 * Y + 7 * D - S;
    const double a5 = 6 * Y - 3 * D + 0.5 * S;

    const double p = a0 + t * (a1 + t * (a2 + t * (a3 + t * (a4 + t * a5))));
    const double dp = (a1 + t * (2 * a2 + t * (3 * a3 + t * (4 * a4 + t * 5 * a5)))) / h;
    const double d2p = (2 * a2 + t * (6 * a3 + t * (12 * a4 + t * 20 * a5))) / (h * h);

    Sample out;
    out.m = std::exp(theta_ + p - V_ * x);
    out.dm = out.m * (dp - V_);
    out.phi = p + P_;
    out.dphi = dp;
    out.d2phi = d2p;
    return out;
}

}  // namespace ks
