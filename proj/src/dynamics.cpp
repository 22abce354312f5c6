/** @file dynamics.cpp
 *  @brief Conservative IMEX integration of Models A, B and C.
 */
#include "ks/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace ks {

namespace {

/// Nodal divergence of face fluxes J[0..n-1] (face f sits between nodes f, f+1)
/// with zero flux through both ends.
std::vector<double> divergence(const std::vector<double>& J, double h) {
    const std::size_t n = J.size();
    std::vector<double> out(n + 1);
    out[0] = J[0] / (0.5 * h);
    out[n] = -J[n - 1] / (0.5 * h);
    for (std::size_t i = 1; i < n; ++i) out[i] = (J[i] - J[i - 1]) / h;
    return out;
}

double face_mean(const std::vector<double>& v, std::size_t f) { return 0.5 * (v[f] + v[f + 1]); }

double slope(const std::vector<double>& v, std::size_t f, double h) { return (v[f + 1] - v[f]) / h; }

/// Transport speed v - phi_x on each face (Models B/C).
std::vector<double> face_speed_c(const Field& phi, double v) {
    const std::size_t n = phi.size() - 1;
    std::vector<double> a(n);
    for (std::size_t f = 0; f < n; ++f) a[f] = v - slope(phi.values, f, phi.grid.h);
    return a;
}

struct ModelAKinematics {
    Field phi;
    BoundarySlopes phys;   // physical phi_x at the two edges
    double L_t = 0.0, c_t = 0.0;
    std::vector<double> speed;   // reference-frame face transport speed
};

ModelAKinematics kinematics_a(const CellState& s, const ModelParams& p) {
    const double K = *p.K;
    const double L = s.L;
    Field mphys = s.m;
    for (auto& v : mphys.values) v /= L;
    ModelAKinematics k{solve_dirichlet(mphys, p, L), {}, 0.0, 0.0, {}};
    const BoundarySlopes ref = boundary_slopes(k.phi, mphys, p.Z / (L * L), p.P);
    k.phys.left = ref.left / L;
    k.phys.right = ref.right / L;
    k.L_t = K * (k.phys.right - k.phys.left);
    k.c_t = 0.5 * K * (k.phys.right + k.phys.left);
    const Grid& g = s.m.grid;
    k.speed.resize(g.n);
    for (int f = 0; f < g.n; ++f) {
        const double xi = 0.5 * (g.x(f) + g.x(f + 1));
        k.speed[f] = -K / (L * L) * slope(k.phi.values, f, g.h) + (k.c_t + xi * k.L_t) / L;
    }
    return k;
}

double length_relaxation_rate(const CellState& s, const ModelParams& p) {
    const double sz = std::sqrt(p.Z);
    return 2.0 * *p.K * std::tanh(s.L / (2.0 * sz)) / sz;
}

double cfl_limit(const std::vector<double>& speed, double h) {
    double amax = 0.0;
    for (double a : speed) amax = std::max(amax, std::abs(a));
    double dt = 10.0 * h * h;
    if (amax > 0) dt = std::min(dt, 0.25 * h / amax);
    return dt;
}

/// Backward-Euler diffusion with coefficient kappa on the Neumann finite-volume stencil.
std::vector<double> implicit_diffusion(const std::vector<double>& rhs, double kappa, double dt,
                                       double h) {
    const std::size_t N = rhs.size();
    const double r = kappa * dt / (h * h);
    std::vector<double> sub(N, -r), dia(N, 1.0 + 2.0 * r), sup(N, -r);
    sup[0] = -2.0 * r;
    sub[N - 1] = -2.0 * r;
    return solve_tridiagonal(sub, dia, sup, rhs);
}

void guard_finite(const CellState& s, const char* where) {
    for (double v : s.m.values)
        if (!std::isfinite(v))
            throw NumericalError(std::string(where) + ": non-finite density at t = " +
                                 std::to_string(s.t));
    if (!std::isfinite(s.L) || !(s.L > 0))
        throw NumericalError(std::string(where) + ": length left (0, inf) at t = " +
                             std::to_string(s.t));
}

enum class Advance { ok, dt_too_large };

Advance advance_c(CellState& s, const ModelParams& p, double dt) {
    const Field phi = solve_periodic(s.m, p);
    const double v = boundary_slopes(phi, s.m, p.Z, p.P).right;
    const auto a = face_speed_c(phi, v);
    if (dt > cfl_limit(a, s.m.grid.h) * (1.0 + 1e-9)) return Advance::dt_too_large;
    const double h = s.m.grid.h;
    std::vector<double> J(a.size());
    for (std::size_t f = 0; f < J.size(); ++f) J[f] = a[f] * face_mean(s.m.values, f);
    const auto div = divergence(J, h);
    std::vector<double> rhs(s.m.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = s.m.values[i] + dt * div[i];
    s.m.values = implicit_diffusion(rhs, 1.0, dt, h);
    if (p.variant == Variant::B) s.c += dt * v;
    s.t += dt;
    guard_finite(s, "step_c");
    return Advance::ok;
}

Advance advance_a(CellState& s, const ModelParams& p, double dt) {
    const auto k = kinematics_a(s, p);
    const double h = s.m.grid.h;
    const double limit =
        std::min(cfl_limit(k.speed, h), 0.5 / length_relaxation_rate(s, p));
    if (dt > limit * (1.0 + 1e-9)) return Advance::dt_too_large;
    std::vector<double> J(k.speed.size());
    for (std::size_t f = 0; f < J.size(); ++f) J[f] = k.speed[f] * face_mean(s.m.values, f);
    const auto div = divergence(J, h);
    std::vector<double> rhs(s.m.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = s.m.values[i] + dt * div[i];
    s.m.values = implicit_diffusion(rhs, 1.0 / (s.L * s.L), dt, h);
    s.L += dt * k.L_t;
    s.c += dt * k.c_t;
    s.t += dt;
    guard_finite(s, "step_a");
    return Advance::ok;
}

Advance advance(CellState& s, const ModelParams& p, double dt) {
    return p.variant == Variant::A ? advance_a(s, p, dt) : advance_c(s, p, dt);
}

}  // namespace

Field rhs_model_c(const Field& m, const ModelParams& params) {
    const Field phi = solve_periodic(m, params);
    const double v = boundary_slopes(phi, m, params.Z, params.P).right;
    const double h = m.grid.h;
    std::vector<double> J(m.grid.n);
    for (std::size_t f = 0; f < J.size(); ++f)
        J[f] = slope(m.values, f, h) + (v - slope(phi.values, f, h)) * face_mean(m.values, f);
    return Field(m.grid, divergence(J, h), FieldKind::perturbation);
}

Field linearized_rhs_c(const Field& base, const Field& u, const ModelParams& params) {
    const Field pb = solve_periodic(base, params);
    const Field pu = solve_periodic(u, params);
    const double vb = boundary_slopes(pb, base, params.Z, params.P).right;
    const double vu = boundary_slopes(pu, u, params.Z, params.P).right;
    const double h = u.grid.h;
    std::vector<double> J(u.grid.n);
    for (std::size_t f = 0; f < J.size(); ++f)
        J[f] = slope(u.values, f, h) + (vb - slope(pb.values, f, h)) * face_mean(u.values, f) +
               (vu - slope(pu.values, f, h)) * face_mean(base.values, f);
    return Field(u.grid, divergence(J, h), FieldKind::perturbation);
}

Field nonlinear_part(const Field& u, const ModelParams& params) {
    const Field pu = solve_periodic(u, params);
    const double vu = boundary_slopes(pu, u, params.Z, params.P).right;
    const double h = u.grid.h;
    std::vector<double> J(u.grid.n);
    for (std::size_t f = 0; f < J.size(); ++f)
        J[f] = (vu - slope(pu.values, f, h)) * face_mean(u.values, f);
    return Field(u.grid, divergence(J, h), FieldKind::perturbation);
}

double dt_max(const CellState& s, const ModelParams& params) {
    const double h = s.m.grid.h;
    if (params.variant == Variant::A) {
        const auto k = kinematics_a(s, params);
        return std::min(cfl_limit(k.speed, h), 0.5 / length_relaxation_rate(s, params));
    }
    const Field phi = solve_periodic(s.m, params);
    const double v = boundary_slopes(phi, s.m, params.Z, params.P).right;
    return cfl_limit(face_speed_c(phi, v), h);
}

CellState step_c(const CellState& s, const ModelParams& params, double dt) {
    if (!(dt > 0)) throw DomainError("step_c: dt must be > 0");
    CellState out = s;
    if (advance_c(out, params, dt) != Advance::ok)
        throw DomainError("step_c: dt exceeds dt_max");
    return out;
}

CellState step_a(const CellState& s, const ModelParams& params, double dt) {
    if (!(dt > 0)) throw DomainError("step_a: dt must be > 0");
    CellState out = s;
    if (advance_a(out, params, dt) != Advance::ok)
        throw DomainError("step_a: dt exceeds dt_max");
    return out;
}

CellState step(const CellState& s, const ModelParams& params, double dt) {
    return params.variant == Variant::A ? step_a(s, params, dt) : step_c(s, params, dt);
}

BoundarySlopes edge_velocities(const CellState& s, const ModelParams& params) {
    if (params.variant == Variant::A) return kinematics_a(s, params).phys;
    const Field phi = solve_periodic(s.m, params);
    return boundary_slopes(phi, s.m, params.Z, params.P);
}

Trajectory simulate(const CellState& init, const ModelParams& params, double T, double dt,
                    int stride) {
    params.validate();
    if (!(dt > 0) || !(T >= 0)) throw DomainError("simulate: need dt > 0 and T >= 0");
    if (stride < 1) throw DomainError("simulate: stride must be >= 1");
    if (init.m.kind != FieldKind::myosin) throw DomainError("simulate: initial field must be myosin");
    init.m.check(1e-9);

    Trajectory tr;
    tr.params = params;
    tr.dt = dt;
    tr.stride = stride;
    auto record = [&](const CellState& s) {
        const auto v = edge_velocities(s, params);
        tr.snapshots.push_back({s, mass(s.m), v.left, v.right});
    };

    CellState s = init;
    const double m0 = mass(s.m);
    record(s);
    const auto nsteps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
    for (std::size_t k = 1; k <= nsteps; ++k) {
        if (advance(s, params, dt) != Advance::ok) {
            tr.status = "unstable-step";
            break;
        }
        tr.steps = k;
        tr.max_mass_drift = std::max(tr.max_mass_drift, std::abs(mass(s.m) - m0));
        double sup = 0.0;
        for (double v : s.m.values) sup = std::max(sup, std::abs(v));
        if (sup > 1e6) {
            tr.status = "blow-up";
            record(s);
            break;
        }
        if (k % static_cast<std::size_t>(stride) == 0 || k == nsteps) record(s);
    }
    return tr;
}

std::vector<double> distance_series(const Trajectory& traj, const Field& reference) {
    std::vector<double> d;
    d.reserve(traj.snapshots.size());
    for (const auto& s : traj.snapshots)
        d.push_back(norm(axpby(1.0, s.state.m, -1.0, reference), Norm::L2));
    return d;
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& norms) {
    if (t.size() != norms.size() || t.size() < 10)
        throw DomainError("decay fit: need at least 10 samples");
    DecayFit fit;
    const std::size_t lo = t.size() / 2;
    fit.samples = t.size() - lo;
    double peak = 0.0;
    for (std::size_t i = lo; i < t.size(); ++i) peak = std::max(peak, norms[i]);
    if (peak == 0.0) return fit;   // identically zero: rate 0, not decaying

    double st = 0, sy = 0, stt = 0, sty = 0;
    const double k = static_cast<double>(fit.samples);
    for (std::size_t i = lo; i < t.size(); ++i) {
        const double y = std::log(std::max(norms[i], 1e-300));
        st += t[i];
        sy += y;
        stt += t[i] * t[i];
        sty += t[i] * y;
    }
    const double den = k * stt - st * st;
    fit.rate = den > 0 ? (k * sty - st * sy) / den : 0.0;
    fit.intercept = (sy - fit.rate * st) / k;
    fit.monotone = true;
    for (std::size_t i = lo + 1; i < t.size(); ++i)
        if (!(norms[i] < norms[i - 1])) fit.monotone = false;
    fit.decaying = fit.rate < 0 && norms.back() < norms[lo];
    return fit;
}

DecayFit decay_rate(const Trajectory& traj, const Field& reference) {
    std::vector<double> t;
    for (const auto& s : traj.snapshots) t.push_back(s.state.t);
    return fit_decay(t, distance_series(traj, reference));
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out.precision(17);
    out << "t,c,L,mass,vleft,vright\n";
    for (const auto& s : traj.snapshots)
        out << s.state.t << ',' << s.state.c << ',' << s.state.L << ',' << s.mass << ','
            << s.vleft << ',' << s.vright << '\n';
}

}  // namespace ks
