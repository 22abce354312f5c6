#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "ks/dynamics.hpp"

using namespace ks;
using std::numbers::pi;

namespace {

Field perturbed(const Grid& g, double eps, std::uint64_t seed = 3) {
    return axpby(1.0, Field::constant(g, 1.0, FieldKind::myosin), eps, band_limited(g, seed, 8, 1.0));
}

double max_abs(const Field& f) {
    double e = 0;
    for (double v : f.values) e = std::max(e, std::abs(v));
    return e;
}

}  // namespace

TEST_CASE("constant myosin is a fixed point of Model C") {
    const Grid g(64);
    CHECK(max_abs(rhs_model_c(Field::constant(g, 1.0, FieldKind::myosin), ModelParams::model_c(1, 5))) < 1e-10);
}

TEST_CASE("Model C right-hand side has zero trapezoid mean") {
    const Grid g(128);
    const Field f = rhs_model_c(perturbed(g, 0.2), ModelParams::model_c(0.5, 8));
    CHECK(std::abs(trapezoid(g, f.values)) < 1e-10 * max_abs(f));
}

TEST_CASE("linearization matches a central difference of the operator") {
    const Grid g(64);
    const auto p = ModelParams::model_c(0.7, 6);
    const Field base = perturbed(g, 0.1, 9);
    const Field u = band_limited(g, 4, 8, 1.0);
    const double d = 1e-5;
    const Field fp = rhs_model_c(axpby(1, base, d, u), p), fm = rhs_model_c(axpby(1, base, -d, u), p);
    const Field fd = axpby(0.5 / d, fp, -0.5 / d, fm);
    const Field lin = linearized_rhs_c(base, u, p);
    CHECK(max_abs(axpby(1, lin, -1, fd)) < 1e-6 * max_abs(lin));
}

TEST_CASE("F_C(1 + u) splits exactly into S_C u + Psi(u)") {
    const Grid g(128);
    const auto p = ModelParams::model_c(1, 5);
    const Field one = Field::constant(g, 1.0, FieldKind::myosin);
    const Field u = band_limited(g, 12, 8, 0.3);
    const Field full = rhs_model_c(axpby(1, one, 1, u), p);
    const Field split = axpby(1, linearized_rhs_c(one, u, p), 1, nonlinear_part(u, p));
    CHECK(max_abs(axpby(1, full, -1, split)) < 1e-10 * max_abs(full));
    // Psi is a quadratic form.
    const Field psi = nonlinear_part(u, p), psi2 = nonlinear_part(axpby(2, u, 0, u), p);
    CHECK(max_abs(axpby(1, psi2, -4, psi)) < 1e-10 * max_abs(psi2));
}

TEST_CASE("step rejects dt above dt_max and conserves mass") {
    const Grid g(64);
    const auto p = ModelParams::model_c(1, 5);
    CellState s{perturbed(g, 0.1)};
    const double dmax = dt_max(s, p);
    CHECK(dmax <= 10 * g.h * g.h * (1 + 1e-12));
    CHECK_THROWS_AS(step(s, p, 2 * dmax), DomainError);
    for (int k = 0; k < 200; ++k) s = step(s, p, dmax);
    CHECK(std::abs(mass(s.m) - 1.0) < 1e-12);
    CHECK(s.t == doctest::Approx(200 * dmax));
}

TEST_CASE("mode-2 perturbation decays at the diagonal S_C rate") {
    // Even modes are exact eigenfunctions: rate = -4 pi^2 + (P/Z)/(1 + 1/(4 pi^2 Z)).
    const double Z = 1, P = 5;
    const double lambda = -4 * pi * pi + (P / Z) / (1 + 1 / (4 * pi * pi * Z));
    const Grid g(128);
    const Field one = Field::constant(g, 1.0, FieldKind::myosin);
    CellState s{axpby(1, one, 1e-4, basis_fn(2, g))};
    const auto p = ModelParams::model_c(Z, P);
    const double dt = dt_max(s, p) / 4;
    const Trajectory tr = simulate(s, p, 0.2, dt, 10);
    const DecayFit fit = decay_rate(tr, one);
    CHECK(fit.decaying);
    CHECK(fit.monotone);
    CHECK(fit.rate == doctest::Approx(lambda).epsilon(0.01));
}

TEST_CASE("fit_decay recovers an exact exponential and needs 10 samples") {
    std::vector<double> t, y;
    for (int i = 0; i < 40; ++i) {
        t.push_back(0.1 * i);
        y.push_back(2.0 * std::exp(-3.0 * t.back()));
    }
    const DecayFit f = fit_decay(t, y);
    CHECK(f.rate == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(f.monotone);
    CHECK(f.decaying);
    CHECK(f.samples == 20);
    t.resize(9);
    y.resize(9);
    CHECK_THROWS_AS(fit_decay(t, y), DomainError);
}

TEST_CASE("snapshots include t = 0, every stride, and the final step") {
    const Grid g(32);
    const auto p = ModelParams::model_c(1, 5);
    CellState s{perturbed(g, 0.01)};
    const double dt = dt_max(s, p) / 2;
    const Trajectory tr = simulate(s, p, 23 * dt, dt, 5);
    CHECK(tr.steps == 23);
    REQUIRE(tr.snapshots.size() == 6);   // 0, 5, 10, 15, 20, 23
    CHECK(tr.snapshots.front().state.t == 0.0);
    CHECK(tr.snapshots.back().state.t == doctest::Approx(23 * dt));
    CHECK(tr.status == "ok");
}

TEST_CASE("simulate validates its input") {
    const Grid g(32);
    CellState bad{Field::constant(g, 1.2, FieldKind::myosin)};
    CHECK_THROWS_AS(simulate(bad, ModelParams::model_c(1, 5), 0.01, 1e-4, 1), DomainError);
}

TEST_CASE("supercritical pressure drives growth") {
    // P = 30 at Z = 1 is far above P0(1) ~ 10.06: the odd mode grows.
    const Grid g(64);
    const Field one = Field::constant(g, 1.0, FieldKind::myosin);
    CellState s{axpby(1, one, 1e-6, basis_fn(1, g))};
    const auto p = ModelParams::model_c(1, 30);
    const double dt = dt_max(s, p) / 2;
    const Trajectory tr = simulate(s, p, 0.3, dt, 20);
    const auto d = distance_series(tr, one);
    CHECK(d.back() > 10 * d.front());
}

TEST_CASE("Model B keeps a symmetric state centred; Model A keeps it symmetric") {
    const Grid g(64);
    const Field m = Field::sample(g, [](double x) { return 1 + 0.2 * std::cos(2 * pi * x); }, FieldKind::myosin);
    CellState s{axpby(1.0 / mass(m), m, 0, m)};
    const auto pb = ModelParams::model_b(1, 5);
    const Trajectory tb = simulate(s, pb, 0.05, dt_max(s, pb) / 2, 50);
    CHECK(std::abs(tb.snapshots.back().state.c) < 1e-12);
    const auto pa = ModelParams::model_a(1, 0.5, 5);
    const Trajectory ta = simulate(s, pa, 0.05, dt_max(s, pa) / 2, 50);
    CHECK(ta.status == "ok");
    CHECK(std::abs(ta.snapshots.back().state.c) < 1e-12);
    CHECK(ta.max_mass_drift < 1e-12);
    const auto v = edge_velocities(ta.snapshots.back().state, pa);
    CHECK(v.left == doctest::Approx(-v.right).epsilon(1e-9));
}

TEST_CASE("Model A length relaxes to the root of L^2 - L + P = 0") {
    // Uniform m = 1/L with phi = 1 - L at the edges has zero edge slope exactly
    // when 1 - L - P/L = 0, so the steady length is (1 + sqrt(1 - 4P))/2.
    const double P = 0.1;
    const double L_eq = 0.5 * (1 + std::sqrt(1 - 4 * P));
    const Grid g(64);
    CellState s{Field::constant(g, 1.0, FieldKind::myosin)};
    const auto pa = ModelParams::model_a(1, P, 10);
    const Trajectory ta = simulate(s, pa, 3.0, dt_max(s, pa) / 2, 1000);
    CHECK(ta.status == "ok");
    CHECK(ta.snapshots.back().state.L == doctest::Approx(L_eq).epsilon(1e-6));
    for (double v : ta.snapshots.back().state.m.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("trajectory csv header") {
    const Grid g(16);
    CellState s{Field::constant(g, 1.0, FieldKind::myosin)};
    const auto p = ModelParams::model_c(1, 5);
    const Trajectory tr = simulate(s, p, 5 * dt_max(s, p), dt_max(s, p), 1);
    write_trajectory_csv("test_dynamics_traj.csv", tr);
    std::ifstream in("test_dynamics_traj.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,c,L,mass,vleft,vright");
    std::remove("test_dynamics_traj.csv");
}
