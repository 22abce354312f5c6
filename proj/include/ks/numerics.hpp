/** @file numerics.hpp
 *  @brief Uniform nodal grids on [-1/2, 1/2], fields, quadrature norms,
 *         the Neumann sin/cos basis, and parameter scaling.
 */
#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ks {

/// Invalid argument whose message names the offending quantity.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when an iteration or integration cannot produce a trustworthy
/// number (Newton divergence, blow-up, NaN). The CLI maps it to exit code 2.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Grid {
    int n = 256;   ///< cells
    double h = 1.0 / 256;
    std::vector<double> nodes;   ///< n+1 points, nodes[0] = -1/2, nodes[n] = 1/2

    explicit Grid(int cells = 256);
    std::size_t size() const { return nodes.size(); }
    double x(std::size_t i) const { return nodes[i]; }
    bool operator==(const Grid& o) const { return n == o.n; }
};

enum class FieldKind { myosin, pressure, perturbation };
const char* to_string(FieldKind k);

struct Field {
    Grid grid;
    std::vector<double> values;
    FieldKind kind = FieldKind::perturbation;

    Field() = default;
    Field(Grid g, std::vector<double> v, FieldKind k);

    static Field sample(const Grid& g, const std::function<double(double)>& f, FieldKind k);
    static Field constant(const Grid& g, double c, FieldKind k);

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }

    /// Throws DomainError unless the kind's invariant holds (myosin: mass 1,
    /// perturbation: mean 0) to within tol.
    void check(double tol = 1e-10) const;
};

/// a*x + b*y on a common grid; the kind of x is kept.
Field axpby(double a, const Field& x, double b, const Field& y);

// ---- quadrature ----------------------------------------------------------

/// Trapezoid weights h/2, h, ..., h, h/2.
std::vector<double> trapezoid_weights(const Grid& g);
double trapezoid(const Grid& g, const std::vector<double>& v);
/// Composite Simpson on an even number of uniform panels of width h.
double simpson(double h, const std::vector<double>& v);

// ---- parameters ----------------------------------------------------------

enum class Variant { A, B, C };
const char* to_string(Variant v);

struct ModelParams {
    double Z = 1.0;
    double P = 1.0;
    std::optional<double> K;   ///< Model A only
    Variant variant = Variant::C;

    void validate() const;
    static ModelParams model_a(double Z, double P, double K);
    static ModelParams model_b(double Z, double P);
    static ModelParams model_c(double Z, double P);
};

struct DimensionalParams {
    double mu = 1, zeta = 1, k = 1, k_e = 1, D = 1, L0 = 1, M = 1;
};

/// Z = mu/(zeta L0^2), P = k M/(k_e L0), K = k_e/(D zeta); variant A.
ModelParams nondimensionalize(const DimensionalParams& dp);

// ---- norms and inner products -------------------------------------------

enum class Norm { L1, L2, Linf, H1 };

/// Second-order nodal derivative: centered inside, one-sided at the ends.
std::vector<double> derivative(const Grid& g, const std::vector<double>& v);
double norm(const Field& f, Norm which);
double inner(const Field& f, const Field& g);
std::complex<double> inner(const Grid& g, const std::vector<std::complex<double>>& f,
                           const std::vector<std::complex<double>>& u);
double mass(const Field& f);

// ---- basis ---------------------------------------------------------------

/// v_k = sin(k pi x) for odd k, cos(k pi x) for even k. Zero mean, v_k'(+-1/2) = 0,
/// <v_j, v_k> = delta_jk / 2.
double basis_value(int k, double x);
double basis_d1(int k, double x);
double basis_d2(int k, double x);
Field basis_fn(int k, const Grid& g);

/// b_k = <v_k, f> / <v_k, v_k>, k = 1..N.
std::vector<double> project(const Field& f, int N);
Field reconstruct(const std::vector<double>& b, const Grid& g);

/// Seeded combination of basis modes 1..modes with coefficients uniform in
/// [-1, 1], rescaled to the requested L2 norm. Zero mean by construction.
Field band_limited(const Grid& g, std::uint64_t seed, int modes = 8, double l2 = 1.0);

// ---- io ------------------------------------------------------------------

void write_field_csv(const std::string& path, const Field& f);
Field read_field_csv(const std::string& path, FieldKind kind);

}  // namespace ks
