#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "ks/numerics.hpp"

using namespace ks;
using std::numbers::pi;

namespace {
double gk(const std::function<double(double)>& f) {
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, -0.5, 0.5, 8, 1e-14);
}
}  // namespace

TEST_CASE("grid spans [-1/2, 1/2] with n+1 nodes") {
    const Grid g(64);
    CHECK(g.size() == 65);
    CHECK(g.x(0) == -0.5);
    CHECK(g.x(64) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g.h == doctest::Approx(1.0 / 64));
    CHECK_THROWS_AS(Grid(1), DomainError);
}

TEST_CASE("trapezoid is exact for affine data and second order otherwise") {
    const Grid g(32);
    std::vector<double> lin(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) lin[i] = 3 * g.x(i) + 2;
    CHECK(trapezoid(g, lin) == doctest::Approx(2.0).epsilon(1e-14));

    auto err = [](int n) {
        const Grid gg(n);
        std::vector<double> v(gg.size());
        for (std::size_t i = 0; i < gg.size(); ++i) v[i] = std::exp(gg.x(i));
        return std::abs(trapezoid(gg, v) - (std::exp(0.5) - std::exp(-0.5)));
    };
    CHECK(err(32) / err(64) == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("simpson is exact for cubics and rejects odd panel counts") {
    const int n = 10;
    const double h = 1.0 / n;
    std::vector<double> v(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double x = -0.5 + i * h;
        v[i] = x * x * x - 2 * x * x + 1;
    }
    CHECK(simpson(h, v) == doctest::Approx(1.0 - 2.0 / 12.0).epsilon(1e-14));
    v.pop_back();
    CHECK_THROWS_AS(simpson(h, v), DomainError);
}

TEST_CASE("basis is orthogonal with norm 1/2 and has zero mean and zero end slopes") {
    for (int j = 1; j <= 6; ++j) {
        CHECK(std::abs(gk([j](double x) { return basis_value(j, x); })) < 1e-14);
        CHECK(std::abs(basis_d1(j, 0.5)) < 1e-12);
        CHECK(std::abs(basis_d1(j, -0.5)) < 1e-12);
        for (int k = 1; k <= 6; ++k) {
            const double ip = gk([j, k](double x) { return basis_value(j, x) * basis_value(k, x); });
            CHECK(ip == doctest::Approx(j == k ? 0.5 : 0.0).epsilon(1e-13).scale(1));
        }
    }
}

TEST_CASE("basis derivatives agree with central differences") {
    const double d = 1e-5;
    for (int k = 1; k <= 7; ++k)
        for (double x : {-0.41, -0.1, 0.0, 0.23, 0.47}) {
            const double fd1 = (basis_value(k, x + d) - basis_value(k, x - d)) / (2 * d);
            const double fd2 = (basis_d1(k, x + d) - basis_d1(k, x - d)) / (2 * d);
            CHECK(basis_d1(k, x) == doctest::Approx(fd1).epsilon(1e-7).scale(k * pi));
            CHECK(basis_d2(k, x) == doctest::Approx(fd2).epsilon(1e-7).scale(k * k * pi * pi));
        }
}

TEST_CASE("trapezoid inner products of basis modes are spectrally accurate") {
    // All odd derivatives of v_j v_k vanish at the ends, so Euler-Maclaurin has no correction terms.
    const Grid g(64);
    for (int j = 1; j <= 10; ++j)
        for (int k = 1; k <= 10; ++k)
            CHECK(inner(basis_fn(j, g), basis_fn(k, g)) ==
                  doctest::Approx(j == k ? 0.5 : 0.0).scale(1).epsilon(1e-12));
}

TEST_CASE("project inverts reconstruct") {
    const Grid g(128);
    const std::vector<double> b = {0.3, -1.0, 0.0, 0.25, 2.0, -0.5};
    const auto back = project(reconstruct(b, g), 6);
    for (std::size_t k = 0; k < b.size(); ++k) CHECK(back[k] == doctest::Approx(b[k]).scale(1).epsilon(1e-12));
}

TEST_CASE("band_limited fields are seeded, zero-mean, and scaled") {
    const Grid g(256);
    const Field a = band_limited(g, 7, 8, 0.3), b = band_limited(g, 7, 8, 0.3), c = band_limited(g, 8, 8, 0.3);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
    CHECK(std::abs(trapezoid(g, a.values)) < 1e-14);
    CHECK(norm(a, Norm::L2) == doctest::Approx(0.3).epsilon(1e-12));
    const auto coeffs = project(a, 12);
    for (int k = 9; k <= 12; ++k) CHECK(std::abs(coeffs[k - 1]) < 1e-12);
}

TEST_CASE("norms of a known profile") {
    const Grid g(512);
    const Field f = basis_fn(2, g);   // cos(2 pi x)
    CHECK(norm(f, Norm::L2) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(norm(f, Norm::Linf) == doctest::Approx(1.0));
    CHECK(norm(f, Norm::L1) == doctest::Approx(2.0 / pi).epsilon(1e-5));
    // ||f||_H1^2 = ||f||^2 + ||f'||^2 = 1/2 + 2 pi^2
    CHECK(norm(f, Norm::H1) == doctest::Approx(std::sqrt(0.5 + 2 * pi * pi)).epsilon(1e-4));
}

TEST_CASE("field invariants and axpby") {
    const Grid g(16), g2(32);
    CHECK_NOTHROW(Field::constant(g, 1.0, FieldKind::myosin).check());
    CHECK_THROWS_AS(Field::constant(g, 1.1, FieldKind::myosin).check(), DomainError);
    CHECK_THROWS_AS(Field::constant(g, 0.1, FieldKind::perturbation).check(), DomainError);
    CHECK_THROWS_AS(axpby(1, Field::constant(g, 1, FieldKind::myosin), 1, Field::constant(g2, 1, FieldKind::myosin)),
                    DomainError);
    const Field s = axpby(2.0, Field::constant(g, 1.0, FieldKind::myosin), -1.0, basis_fn(2, g));
    CHECK(s.kind == FieldKind::myosin);
    CHECK(s[0] == doctest::Approx(2.0 - std::cos(-pi)));
}

TEST_CASE("model parameters validate their variant") {
    CHECK_NOTHROW(ModelParams::model_a(1, 5, 2).validate());
    CHECK_THROWS_AS(ModelParams::model_a(1, 5, -2).validate(), DomainError);
    ModelParams p = ModelParams::model_c(1, 5);
    p.K = 3.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
    CHECK_THROWS_AS(ModelParams::model_b(0, 5).validate(), DomainError);
    CHECK_THROWS_AS(ModelParams::model_c(1, -1).validate(), DomainError);
}

TEST_CASE("nondimensionalization groups") {
    DimensionalParams dp;
    dp.mu = 2;
    dp.zeta = 4;
    dp.L0 = 0.5;
    dp.k = 3;
    dp.M = 5;
    dp.k_e = 6;
    dp.D = 0.25;
    const ModelParams p = nondimensionalize(dp);
    CHECK(p.variant == Variant::A);
    CHECK(p.Z == doctest::Approx(2.0 / (4 * 0.25)));
    CHECK(p.P == doctest::Approx(3.0 * 5 / (6 * 0.5)));
    CHECK(*p.K == doctest::Approx(6.0 / (0.25 * 4)));
}

TEST_CASE("derivative is second order up to the ends") {
    auto err = [](int n) {
        const Grid g(n);
        std::vector<double> v(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) v[i] = std::sin(3 * g.x(i));
        const auto d = derivative(g, v);
        double e = 0;
        for (std::size_t i = 0; i < g.size(); ++i) e = std::max(e, std::abs(d[i] - 3 * std::cos(3 * g.x(i))));
        return e;
    };
    CHECK(err(64) / err(128) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("field csv round trip") {
    const Grid g(20);
    const Field f = band_limited(g, 3);
    const std::string path = "test_numerics_field.csv";
    write_field_csv(path, f);
    const Field r = read_field_csv(path, FieldKind::perturbation);
    std::remove(path.c_str());
    REQUIRE(r.size() == f.size());
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(r[i] == f[i]);
}
