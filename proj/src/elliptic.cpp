/** @file elliptic.cpp
 *  @brief Banded solvers for the pressure equation plus the Green's-function oracles.
 */
#include "ks/elliptic.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

namespace ks {

std::vector<double> solve_tridiagonal(const std::vector<double>& sub, const std::vector<double>& diag,
                                      const std::vector<double>& sup, std::vector<double> rhs) {
    const std::size_t n = diag.size();
    std::vector<double> c(n);
    double beta = diag[0];
    if (beta == 0.0) throw NumericalError("tridiagonal: zero pivot");
    rhs[0] /= beta;
    for (std::size_t i = 1; i < n; ++i) {
        c[i - 1] = sup[i - 1] / beta;
        beta = diag[i] - sub[i] * c[i - 1];
        if (beta == 0.0) throw NumericalError("tridiagonal: zero pivot");
        rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / beta;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
    return rhs;
}

std::vector<double> solve_cyclic_tridiagonal(const std::vector<double>& sub,
                                             const std::vector<double>& diag,
                                             const std::vector<double>& sup,
                                             const std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    if (n < 3) throw DomainError("cyclic tridiagonal: need at least 3 unknowns");
    const double beta = sub[0];       // row 0, column n-1
    const double alpha = sup[n - 1];  // row n-1, column 0
    const double gamma = -diag[0];
    std::vector<double> d = diag;
    d[0] -= gamma;
    d[n - 1] -= alpha * beta / gamma;
    const auto y = solve_tridiagonal(sub, d, sup, rhs);
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = alpha;
    const auto z = solve_tridiagonal(sub, d, sup, u);
    const double fact = (y[0] + beta * y[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] - fact * z[i];
    return x;
}

double greens_kernel(double x, double y, double Z) {
    if (!(Z > 0)) throw DomainError("greens_kernel: Z must be > 0");
    const double s = std::sqrt(Z);
    return y < x ? std::cosh((0.5 + (y - x)) / s) : std::cosh((0.5 + (x - y)) / s);
}

namespace {

double greens_prefactor(double Z, double P) {
    const double s = std::sqrt(Z);
    return P / (2.0 * s * std::sinh(0.5 / s));
}

double l2(const std::vector<double>& v) {
    double s = 0.0;
    for (double a : v) s += a * a;
    return std::sqrt(s);
}

}  // namespace

Field solve_periodic(const Field& m, const ModelParams& params) {
    const Grid& g = m.grid;
    const int n = g.n;
    const double Z = params.Z, P = params.P;
    const double e = -Z / (g.h * g.h);
    const double d = 1.0 + 2.0 * Z / (g.h * g.h);

    // Constants are exact eigenvectors with eigenvalue 1, so solving for the
    // deviation from P*mean keeps the O(Z/h^2) conditioning away from the
    // (possibly large) mean level.
    const double mean = trapezoid(g, m.values);
    std::vector<double> src(n), f(n);
    src[0] = 0.5 * (m.values[0] + m.values[n]);
    for (int j = 1; j < n; ++j) src[j] = m.values[j];
    for (int j = 0; j < n; ++j) f[j] = P * (src[j] - mean);

    const std::vector<double> sub(n, e), dia(n, d), sup(n, e);
    const auto psi = solve_cyclic_tridiagonal(sub, dia, sup, f);

    std::vector<double> r(n), full(n);
    for (int j = 0; j < n; ++j) {
        const double left = psi[(j + n - 1) % n], right = psi[(j + 1) % n];
        r[j] = e * left + d * psi[j] + e * right - f[j];
        full[j] = P * src[j];
    }
    const double scale = l2(full);
    if (scale > 0 && l2(r) > 1e-10 * scale)
        throw NumericalError("solve_periodic: residual above 1e-10 relative");

    std::vector<double> phi(n + 1);
    for (int j = 0; j < n; ++j) phi[j] = P * mean + psi[j];
    phi[n] = phi[0];
    return Field(g, std::move(phi), FieldKind::pressure);
}

Field solve_dirichlet(const Field& m, const ModelParams& params, double L) {
    if (!(L > 0)) throw DomainError("solve_dirichlet: L must be > 0");
    const Grid& g = m.grid;
    const int n = g.n;
    const double Zh = params.Z / (L * L);
    const double e = -Zh / (g.h * g.h);
    const double d = 1.0 + 2.0 * Zh / (g.h * g.h);
    const double b = 1.0 - L;

    const int k = n - 1;
    std::vector<double> sub(k, e), dia(k, d), sup(k, e), rhs(k);
    for (int i = 0; i < k; ++i) rhs[i] = params.P * m.values[i + 1];
    rhs[0] -= e * b;
    rhs[k - 1] -= e * b;
    const auto in = solve_tridiagonal(sub, dia, sup, rhs);

    std::vector<double> phi(n + 1);
    phi[0] = phi[n] = b;
    for (int i = 0; i < k; ++i) phi[i + 1] = in[i];

    std::vector<double> r(k), full(k);
    for (int i = 1; i < n; ++i) {
        r[i - 1] = e * phi[i - 1] + d * phi[i] + e * phi[i + 1] - params.P * m.values[i];
        full[i - 1] = params.P * m.values[i] - (i == 1 || i == n - 1 ? e * b : 0.0);
    }
    const double scale = l2(full);
    if (scale > 0 && l2(r) > 1e-10 * scale)
        throw NumericalError("solve_dirichlet: residual above 1e-10 relative");
    return Field(g, std::move(phi), FieldKind::pressure);
}

Field solve_periodic_greens(const Field& m, const ModelParams& params) {
    const Grid& g = m.grid;
    const auto w = trapezoid_weights(g);
    const double c = greens_prefactor(params.Z, params.P);
    std::vector<double> phi(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j)
            s += w[j] * greens_kernel(g.x(i), g.x(j), params.Z) * m.values[j];
        phi[i] = c * s;
    }
    return Field(g, std::move(phi), FieldKind::pressure);
}

double greens_phi(const std::function<double(double)>& m, double x, double Z, double P, int panels) {
    using Rule = boost::math::quadrature::gauss<double, 20>;
    auto integrate = [&](double a, double b) {
        double s = 0.0;
        const double w = (b - a) / panels;
        for (int k = 0; k < panels; ++k) {
            const double lo = a + k * w, hi = lo + w;
            s += Rule::integrate([&](double y) { return greens_kernel(x, y, Z) * m(y); }, lo, hi);
        }
        return s;
    };
    double s = 0.0;
    if (x > -0.5) s += integrate(-0.5, x);
    if (x < 0.5) s += integrate(x, 0.5);
    return greens_prefactor(Z, P) * s;
}

BoundarySlopes boundary_slopes(const Field& phi, const Field& m, double Z, double P) {
    const auto& f = phi.values;
    const std::size_t n = f.size() - 1;
    const double h = phi.grid.h;
    BoundarySlopes s;
    s.right = (f[n] - f[n - 1]) / h + 0.5 * h * (f[n] - P * m.values[n]) / Z;
    s.left = (f[1] - f[0]) / h - 0.5 * h * (f[0] - P * m.values[0]) / Z;
    return s;
}

bool EllipticBoundsReport::all() const {
    return phi_ok[0] && phi_ok[1] && phi_ok[2] && dphi_ok && d2phi_ok[0] && d2phi_ok[1] &&
           d2phi_ok[2];
}

EllipticBoundsReport verify_elliptic_bounds(const Field& u, const ModelParams& params) {
    constexpr double slack = 1e-12;
    const double P = params.P, Z = params.Z;
    const Field phi = solve_periodic(u, params);
    Field d1(u.grid, derivative(u.grid, phi.values), FieldKind::pressure);
    Field d2 = phi;
    for (std::size_t i = 0; i < d2.size(); ++i) d2.values[i] = (phi.values[i] - P * u.values[i]) / Z;

    const Norm ps[3] = {Norm::L1, Norm::L2, Norm::Linf};
    EllipticBoundsReport r;
    auto judge = [](double value, double bound, bool& ok, double& margin) {
        ok = value <= bound * (1.0 + slack) + 1e-300;
        margin = bound > 0 ? (bound - value) / bound : 0.0;
    };
    for (int k = 0; k < 3; ++k) {
        const double un = norm(u, ps[k]);
        judge(norm(phi, ps[k]), P * un, r.phi_ok[k], r.phi_margin[k]);
        judge(norm(d2, ps[k]), 2.0 * P / Z * un, r.d2phi_ok[k], r.d2phi_margin[k]);
    }
    judge(norm(d1, Norm::Linf), P / (2.0 * Z) * norm(u, Norm::L2), r.dphi_ok, r.dphi_margin);
    return r;
}

}  // namespace ks
