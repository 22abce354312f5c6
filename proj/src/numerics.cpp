/** @file numerics.cpp
 *  @brief Grid, field, quadrature and basis primitives.
 */
#include "ks/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace ks {

using std::numbers::pi;

Grid::Grid(int cells) : n(cells), h(0.0) {
    if (cells < 2) throw DomainError("grid: cell count n must be >= 2");
    h = 1.0 / cells;
    nodes.resize(static_cast<std::size_t>(cells) + 1);
    for (int i = 0; i <= cells; ++i) nodes[i] = static_cast<double>(i) / cells - 0.5;
}

const char* to_string(FieldKind k) {
    switch (k) {
        case FieldKind::myosin: return "myosin";
        case FieldKind::pressure: return "pressure";
        case FieldKind::perturbation: return "perturbation";
    }
    return "?";
}

const char* to_string(Variant v) {
    switch (v) {
        case Variant::A: return "A";
        case Variant::B: return "B";
        case Variant::C: return "C";
    }
    return "?";
}

Field::Field(Grid g, std::vector<double> v, FieldKind k)
    : grid(std::move(g)), values(std::move(v)), kind(k) {
    if (values.size() != grid.size())
        throw DomainError("field: expected " + std::to_string(grid.size()) + " values, got " +
                          std::to_string(values.size()));
}

Field Field::sample(const Grid& g, const std::function<double(double)>& f, FieldKind k) {
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(g.x(i));
    return Field(g, std::move(v), k);
}

Field Field::constant(const Grid& g, double c, FieldKind k) {
    return Field(g, std::vector<double>(g.size(), c), k);
}

void Field::check(double tol) const {
    if (values.size() != grid.size()) throw DomainError("field: length mismatch");
    for (double v : values)
        if (!std::isfinite(v)) throw DomainError("field: non-finite value");
    if (kind == FieldKind::myosin) {
        const double m = trapezoid(grid, values);
        if (std::abs(m - 1.0) > tol)
            throw DomainError("field: myosin mass " + std::to_string(m) + " differs from 1");
    } else if (kind == FieldKind::perturbation) {
        const double m = trapezoid(grid, values);
        if (std::abs(m) > tol)
            throw DomainError("field: perturbation mean " + std::to_string(m) + " is not 0");
    }
}

Field axpby(double a, const Field& x, double b, const Field& y) {
    if (!(x.grid == y.grid)) throw DomainError("axpby: grid mismatch");
    Field r = x;
    for (std::size_t i = 0; i < r.size(); ++i) r.values[i] = a * x.values[i] + b * y.values[i];
    return r;
}

std::vector<double> trapezoid_weights(const Grid& g) {
    std::vector<double> w(g.size(), g.h);
    w.front() = w.back() = 0.5 * g.h;
    return w;
}

double trapezoid(const Grid& g, const std::vector<double>& v) {
    if (v.size() != g.size()) throw DomainError("trapezoid: length mismatch");
    double s = 0.5 * (v.front() + v.back());
    for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
    return s * g.h;
}

double simpson(double h, const std::vector<double>& v) {
    if (v.size() < 3 || v.size() % 2 == 0)
        throw DomainError("simpson: need an even number of panels");
    double odd = 0.0, even = 0.0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) (i % 2 ? odd : even) += v[i];
    return h / 3.0 * (v.front() + v.back() + 4.0 * odd + 2.0 * even);
}

void ModelParams::validate() const {
    if (!(Z > 0) || !std::isfinite(Z)) throw DomainError("params: Z must be > 0");
    if (!(P > 0) || !std::isfinite(P)) throw DomainError("params: P must be > 0");
    if (variant == Variant::A) {
        if (!K || !(*K > 0)) throw DomainError("params: K must be > 0 for variant A");
    } else if (K) {
        throw DomainError("params: K is only meaningful for variant A");
    }
}

ModelParams ModelParams::model_a(double Z, double P, double K) {
    ModelParams p{Z, P, K, Variant::A};
    p.validate();
    return p;
}
ModelParams ModelParams::model_b(double Z, double P) {
    ModelParams p{Z, P, std::nullopt, Variant::B};
    p.validate();
    return p;
}
ModelParams ModelParams::model_c(double Z, double P) {
    ModelParams p{Z, P, std::nullopt, Variant::C};
    p.validate();
    return p;
}

ModelParams nondimensionalize(const DimensionalParams& dp) {
    const std::pair<const char*, double> fields[] = {{"mu", dp.mu}, {"zeta", dp.zeta}, {"k", dp.k},
                                                     {"k_e", dp.k_e}, {"D", dp.D},      {"L0", dp.L0},
                                                     {"M", dp.M}};
    for (const auto& [name, v] : fields)
        if (!(v > 0) || !std::isfinite(v))
            throw DomainError(std::string("nondimensionalize: ") + name + " must be positive");
    ModelParams p;
    p.Z = dp.mu / (dp.zeta * dp.L0 * dp.L0);
    p.P = dp.k * dp.M / (dp.k_e * dp.L0);
    p.K = dp.k_e / (dp.D * dp.zeta);
    p.variant = Variant::A;
    return p;
}

std::vector<double> derivative(const Grid& g, const std::vector<double>& v) {
    const std::size_t n = v.size();
    if (n < 3) throw DomainError("derivative: need at least 2 cells");
    std::vector<double> d(n);
    const double h = g.h;
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    return d;
}

double norm(const Field& f, Norm which) {
    const auto& v = f.values;
    std::vector<double> tmp(v.size());
    switch (which) {
        case Norm::L1:
            std::transform(v.begin(), v.end(), tmp.begin(), [](double a) { return std::abs(a); });
            return trapezoid(f.grid, tmp);
        case Norm::L2:
            std::transform(v.begin(), v.end(), tmp.begin(), [](double a) { return a * a; });
            return std::sqrt(trapezoid(f.grid, tmp));
        case Norm::Linf: {
            double m = 0.0;
            for (double a : v) m = std::max(m, std::abs(a));
            return m;
        }
        case Norm::H1: {
            const auto d = derivative(f.grid, v);
            for (std::size_t i = 0; i < v.size(); ++i) tmp[i] = v[i] * v[i] + d[i] * d[i];
            return std::sqrt(trapezoid(f.grid, tmp));
        }
    }
    return 0.0;
}

double inner(const Field& f, const Field& g) {
    if (!(f.grid == g.grid)) throw DomainError("inner: grid mismatch");
    std::vector<double> p(f.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = f.values[i] * g.values[i];
    return trapezoid(f.grid, p);
}

std::complex<double> inner(const Grid& g, const std::vector<std::complex<double>>& f,
                           const std::vector<std::complex<double>>& u) {
    if (f.size() != g.size() || u.size() != g.size()) throw DomainError("inner: grid mismatch");
    const auto w = trapezoid_weights(g);
    std::complex<double> s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * std::conj(f[i]) * u[i];
    return s;
}

double mass(const Field& f) { return trapezoid(f.grid, f.values); }

double basis_value(int k, double x) {
    if (k < 1) throw DomainError("basis: index k must be >= 1");
    return k % 2 ? std::sin(k * pi * x) : std::cos(k * pi * x);
}

double basis_d1(int k, double x) {
    if (k < 1) throw DomainError("basis: index k must be >= 1");
    const double w = k * pi;
    return k % 2 ? w * std::cos(w * x) : -w * std::sin(w * x);
}

double basis_d2(int k, double x) {
    const double w = k * pi;
    return -w * w * basis_value(k, x);
}

Field basis_fn(int k, const Grid& g) {
    if (k < 1) throw DomainError("basis_fn: index k must be >= 1");
    return Field::sample(g, [k](double x) { return basis_value(k, x); }, FieldKind::perturbation);
}

std::vector<double> project(const Field& f, int N) {
    if (N < 1) throw DomainError("project: N must be >= 1");
    std::vector<double> b(N);
    for (int k = 1; k <= N; ++k) {
        const Field v = basis_fn(k, f.grid);
        b[k - 1] = inner(v, f) / inner(v, v);
    }
    return b;
}

Field reconstruct(const std::vector<double>& b, const Grid& g) {
    Field f = Field::constant(g, 0.0, FieldKind::perturbation);
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t k = 0; k < b.size(); ++k)
            f.values[i] += b[k] * basis_value(static_cast<int>(k) + 1, g.x(i));
    return f;
}

Field band_limited(const Grid& g, std::uint64_t seed, int modes, double l2) {
    if (modes < 1) throw DomainError("band_limited: modes must be >= 1");
    std::mt19937_64 gen(seed);
    std::vector<double> b(modes);
    // Explicit 53-bit mapping keeps the corpus identical across standard libraries.
    for (auto& c : b) c = 2.0 * static_cast<double>(gen() >> 11) * 0x1.0p-53 - 1.0;
    Field f = reconstruct(b, g);
    const double nrm = norm(f, Norm::L2);
    for (auto& v : f.values) v *= l2 / nrm;
    return f;
}

void write_field_csv(const std::string& path, const Field& f) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out.precision(17);
    out << "x,value\n";
    for (std::size_t i = 0; i < f.size(); ++i) out << f.grid.x(i) << ',' << f.values[i] << '\n';
}

Field read_field_csv(const std::string& path, FieldKind kind) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::getline(in, line);
    if (line != "x,value") throw DomainError("read_field_csv: expected header x,value");
    std::vector<double> vals;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw DomainError("read_field_csv: malformed row");
        vals.push_back(std::stod(line.substr(comma + 1)));
    }
    if (vals.size() < 3) throw DomainError("read_field_csv: too few rows");
    const Grid g(static_cast<int>(vals.size()) - 1);
    return Field(g, std::move(vals), kind);
}

}  // namespace ks
