/** @file experiments.cpp
 *  @brief The six command pipelines and the manifest writer.
 */
#include "ks/experiments.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "ks/dynamics.hpp"
#include "ks/elliptic.hpp"
#include "ks/spectral.hpp"
#include "ks/traveling_wave.hpp"

namespace ks {

namespace fs = std::filesystem;
using nlohmann::json;
using std::numbers::pi;

bool ExperimentResult::any_fail() const {
    return std::any_of(claims.begin(), claims.end(), [](const Claim& c) { return c.status == "FAIL"; });
}

namespace {

Grid grid_of(const Config& cfg) { return Grid(cfg.get_int("grid.n", 256)); }

int modes_of(const Config& cfg) {
    const int N = cfg.get_int("modes", 64);
    if (N < 2) throw DomainError("config: modes must be >= 2");
    return N;
}

std::uint64_t seed_of(const Config& cfg) {
    const int s = cfg.get_int("seed", 1);
    if (s < 0) throw DomainError("config: seed must be >= 0");
    return static_cast<std::uint64_t>(s);
}

std::string tag(double v) { return fmt::format("{:g}", v); }

void write_csv(const fs::path& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out.precision(17);
    out << header << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << j.dump(2) << '\n';
}

Claim check(std::string id, std::string statement, bool pass, double measured, double expected,
            double tol, std::string detail = "") {
    return {std::move(id), std::move(statement), pass ? "PASS" : "FAIL", measured, expected, tol,
            std::move(detail)};
}

Claim info(std::string id, std::string statement, double measured, std::string detail = "") {
    return {std::move(id), std::move(statement), "INFO", measured, 0.0, 0.0, std::move(detail)};
}

json claims_json(const std::vector<Claim>& cs) {
    json a = json::array();
    for (const auto& c : cs)
        a.push_back({{"id", c.id},
                     {"statement", c.statement},
                     {"status", c.status},
                     {"measured", c.measured},
                     {"expected", c.expected},
                     {"tolerance", c.tolerance},
                     {"detail", c.detail}});
    return a;
}

int stride_for(double T, double dt, int target) {
    const double steps = std::ceil(T / dt - 1e-9);
    return std::max(1, static_cast<int>(steps / target));
}

/// Least-squares log-slope over all samples; used when a run ends too early for fit_decay.
double endpoint_rate(const Trajectory& tr, const std::vector<double>& d) {
    const double t0 = tr.snapshots.front().state.t, t1 = tr.snapshots.back().state.t;
    if (!(t1 > t0) || !(d.front() > 0) || !(d.back() > 0)) return 0.0;
    return std::log(d.back() / d.front()) / (t1 - t0);
}

/// Leading eigenvalue of the S_C blocks touched by the excited modes.
double excited_leading_eigenvalue(const GalerkinMatrix& S, const std::vector<int>& modes) {
    double lead = -INFINITY;
    bool odd = false;
    for (int k : modes) {
        if (k < 1 || k > S.N) throw DomainError("config: perturbation mode outside 1..modes");
        if (k % 2 == 0)
            lead = std::max(lead, S.A(k - 1, k - 1));   // even modes are exact eigenvectors
        else
            odd = true;
    }
    if (odd) {
        const int n = (S.N + 1) / 2;
        Eigen::MatrixXd B(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) B(i, j) = S.A(2 * i, 2 * j);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (B + B.transpose()),
                                                          Eigen::EigenvaluesOnly);
        lead = std::max(lead, es.eigenvalues().maxCoeff());
    }
    return lead;
}

template <class F>
void parallel_for_each(std::size_t count, F body) {
    std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < count; ++i) {
        try {
            body(i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

// ---- stationary stability ----------------------------------------------------

ExperimentResult cmd_stationary_stability(const Config& cfg, const std::string& out_dir) {
    ExperimentResult r;
    r.command = "stationary-stability";
    fs::create_directories(out_dir);
    const Grid g = grid_of(cfg);
    const int N = modes_of(cfg);
    const double Z = cfg.get_double("stationary.Z", 1.0);
    const double P = cfg.get_double("stationary.P", 5.0);
    const double eps = cfg.get_double("stationary.eps", 1e-3);
    const double T = cfg.get_double("stationary.T", 0.5);
    const double tol = cfg.tolerance("stationary_rate", 0.02);
    const double mass_tol = cfg.tolerance("mass", 1e-9);
    const bool random = cfg.get_int("stationary.random", 0) != 0;
    std::vector<int> modes;
    for (double k : cfg.get_list("stationary.modes", {2})) modes.push_back(static_cast<int>(k));
    if (!(T > 0)) throw DomainError("config: stationary.T must be > 0");
    if (eps < 0) throw DomainError("config: stationary.eps must be >= 0");

    const ModelParams params = ModelParams::model_c(Z, P);
    Field pert = Field::constant(g, 0.0, FieldKind::perturbation);
    if (random) {
        pert = band_limited(g, seed_of(cfg), 8, 1.0);
        modes.clear();
        for (int k = 1; k <= 8; ++k) modes.push_back(k);
        r.operations.push_back("numerics-core:band_limited");
    } else {
        for (int k : modes) pert = axpby(1.0, pert, 1.0, basis_fn(k, g));
        r.operations.push_back("numerics-core:basis_fn");
    }
    Field m0 = Field::constant(g, 1.0, FieldKind::myosin);
    m0 = axpby(1.0, m0, eps, pert);
    CellState s0{m0};
    const double dt = cfg.get_double("stationary.dt", dt_max(s0, params));
    const Trajectory tr = simulate(s0, params, T, dt, stride_for(T, dt, 200));
    const Field one = Field::constant(g, 1.0, FieldKind::myosin);
    const auto dist = distance_series(tr, one);
    r.operations.insert(r.operations.end(), {"dynamics:simulate", "dynamics:decay_rate",
                                             "spectral:assemble_s_c", "spectral:eigenvalues"});

    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < dist.size(); ++i)
        rows.push_back({tr.snapshots[i].state.t, dist[i], tr.snapshots[i].mass});
    write_csv(fs::path(out_dir) / "decay.csv", "t,distance,mass", rows);
    r.outputs.push_back("decay.csv");

    const GalerkinMatrix S = assemble_s_c(P, Z, N);
    const double lambda_ref = excited_leading_eigenvalue(S, modes);
    std::string verdict;
    double rate = 0.0;
    if (eps == 0.0) {
        const double maxd = *std::max_element(dist.begin(), dist.end());
        verdict = "trivial";
        r.claims.push_back(check("constant_trajectory", "unperturbed state stays constant",
                                 maxd < 1e-12, maxd, 0.0, 1e-12));
    } else {
        DecayFit fit;
        if (tr.snapshots.size() >= 10) {
            fit = decay_rate(tr, one);
            rate = fit.rate;
        } else {
            rate = endpoint_rate(tr, dist);
        }
        if (P / Z < pi * pi) {
            const double rel = std::abs(rate - lambda_ref) / std::abs(lambda_ref);
            verdict = fit.decaying ? "decay" : "no decay";
            r.claims.push_back(check("decay_rate_matches_eigenvalue",
                                     "perturbation decays at the leading excited eigenvalue of S_C",
                                     fit.decaying && rel <= tol, rate, lambda_ref, tol,
                                     fmt::format("relative error {:.3e}", rel)));
        } else {
            verdict = rate > 0 ? "supercritical, growth detected" : "supercritical, no growth detected";
            r.claims.push_back(check("growth_consistent_with_spectrum",
                                     "growth observed iff the excited S_C block has a positive eigenvalue",
                                     (rate > 0) == (lambda_ref > 0), rate, lambda_ref, 0.0, verdict));
        }
    }
    r.claims.push_back(check("mass_conserved", "trapezoid mass stays at its initial value",
                             tr.max_mass_drift < mass_tol, tr.max_mass_drift, 0.0, mass_tol));

    r.summary = {{"Z", Z},          {"P", P},       {"eps", eps},
                 {"dt", dt},        {"steps", tr.steps}, {"status", tr.status},
                 {"rate", rate},    {"lambda_ref", lambda_ref}, {"verdict", verdict}};
    json v = r.summary;
    v["claims"] = claims_json(r.claims);
    write_json(fs::path(out_dir) / "verdict.json", v);
    r.outputs.push_back("verdict.json");
    return r;
}

// ---- bifurcation ---------------------------------------------------------------

ExperimentResult cmd_bifurcation(const Config& cfg, const std::string& out_dir) {
    ExperimentResult r;
    r.command = "bifurcation";
    fs::create_directories(out_dir);
    const Grid g = grid_of(cfg);
    const auto Zs = cfg.get_list("bifurcation.Z", {5.0});
    const double V_max = cfg.get_double("bifurcation.V_max", 0.2);
    const int steps = cfg.get_int("bifurcation.steps", 20);
    const auto profile_V = cfg.get_list("bifurcation.profile_V", {0.1, 0.2});
    const double fit_V = cfg.get_double("bifurcation.fit_V_max", 0.1);
    const double tol = cfg.tolerance("p2_fit", 0.10);
    r.operations = {"traveling-wave:solve_p0", "traveling-wave:asymptotic_tw",
                    "traveling-wave:exact_tw", "traveling-wave:trace_bifurcation"};

    struct PerZ {
        std::vector<Claim> claims;
        std::vector<std::string> outputs;
        json summary;
    };
    std::vector<PerZ> per(Zs.size());
    parallel_for_each(Zs.size(), [&](std::size_t i) {
        const double Z = Zs[i];
        PerZ& o = per[i];
        o.summary = {{"Z", Z}};
        if (std::abs(Z - 1.0 / 12.0) < 1e-6) {
            o.claims.push_back(info("skip_Z_" + tag(Z), "singular parameter Z = 1/12 skipped", Z));
            o.summary["note"] = "singular parameter";
            return;
        }
        const double P0 = solve_p0(Z);
        o.summary["P0"] = P0;
        double P2 = NAN;
        try {
            P2 = p2_coefficient(P0, Z);
        } catch (const DomainError& e) {
            o.summary["note"] = e.what();
        }
        o.summary["P2_closed_form"] = P2;
        if (!(P0 > 1)) {
            o.claims.push_back(info("p2_sign_Z_" + tag(Z), "P2 sign on the Z < 1/12 side", P2,
                                    "continuation not traced below Z = 1/12"));
            return;
        }
        try {
            const auto curve = trace_bifurcation(Z, V_max, steps, g);
            const std::string name = "curve_Z" + tag(Z) + ".csv";
            write_bifurcation_csv((fs::path(out_dir) / name).string(), curve);
            o.outputs.push_back(name);
            const double fitted = fit_p2(curve, P0, fit_V);
            o.summary["P2_fitted"] = fitted;
            const double rel = std::abs(fitted - P2) / std::abs(P2);
            o.claims.push_back(check("p2_fit_Z_" + tag(Z),
                                     "fitted V^2 coefficient of P_T - P0 matches closed-form P2",
                                     rel <= tol, fitted, P2, tol,
                                     fmt::format("relative error {:.3e}", rel)));
        } catch (const NumericalError& e) {
            o.claims.push_back(check("continuation_Z_" + tag(Z), "continuation reaches V_max", false,
                                     0.0, V_max, 0.0, e.what()));
        }
        for (double V : profile_V) {
            try {
                const auto tw = exact_tw(V, Z, g);
                std::vector<std::vector<double>> rows;
                for (std::size_t k = 0; k < g.size(); ++k)
                    rows.push_back({g.x(k), tw.m_T.values[k], tw.phi_T.values[k]});
                const std::string name = "profile_Z" + tag(Z) + "_V" + tag(V) + ".csv";
                write_csv(fs::path(out_dir) / name, "x,m_T,phi_T", rows);
                o.outputs.push_back(name);
            } catch (const NumericalError& e) {
                o.claims.push_back(check("profile_Z_" + tag(Z) + "_V_" + tag(V), "wave profile solved",
                                         false, 0.0, V, 0.0, e.what()));
            }
        }
    });
    r.summary["per_Z"] = json::array();
    for (auto& o : per) {
        r.claims.insert(r.claims.end(), o.claims.begin(), o.claims.end());
        r.outputs.insert(r.outputs.end(), o.outputs.begin(), o.outputs.end());
        r.summary["per_Z"].push_back(o.summary);
    }
    write_json(fs::path(out_dir) / "bifurcation.json", r.summary);
    r.outputs.push_back("bifurcation.json");
    return r;
}

// ---- spectrum --------------------------------------------------------------------

ExperimentResult cmd_spectrum(const Config& cfg, const std::string& out_dir) {
    ExperimentResult r;
    r.command = "spectrum";
    fs::create_directories(out_dir);
    const Grid g = grid_of(cfg);
    const int N = modes_of(cfg);
    const double Z = cfg.get_double("spectrum.Z", 50.0);
    const auto Vs = cfg.get_list("spectrum.V", {0.05});
    const auto curve_V = cfg.get_list("spectrum.curve_V", {0.01, 0.02, 0.03, 0.04, 0.05});
    const int q = cfg.get_int("spectrum.quad_points", 1024);
    const double shift = cfg.get_double("spectrum.gershgorin_shift", 1.0);
    const double scale = cfg.get_double("spectrum.gershgorin_scale", 1.0);
    const bool do_resolvent = cfg.get_int("spectrum.resolvent", 1) != 0;
    const double tol_law = cfg.tolerance("lambda_law", 0.20);
    const double factor = cfg.tolerance("resolvent_factor", 10.0);
    const double tol_neutral = cfg.tolerance("neutral", 1e-6);
    r.operations = {"traveling-wave:exact_tw", "spectral:assemble_t_c", "spectral:eigenvalues",
                    "spectral:gershgorin_check", "spectral:resolvent_norm",
                    "spectral:leading_eigenvalue_curve"};

    r.summary["per_V"] = json::array();
    for (double V : Vs) {
        const auto tw = exact_tw(V, Z, g);
        const auto A = assemble_t_c(tw, N, q);
        SpectrumReport rep = eigenvalues(A);
        rep.gershgorin = gershgorin_check(A.A, shift, scale);
        const std::string vt = tag(V);
        const double law = -pi * pi * V * V / 24.0;
        json s = {{"V", V}, {"leading", {rep.leading.real(), rep.leading.imag()}}, {"law", law}};
        if (V == 0.0) {
            const bool ok = std::abs(rep.leading) < tol_neutral;
            r.claims.push_back(check("neutral_V_0", "neutral (translation mode at bifurcation)", ok,
                                     std::abs(rep.leading), 0.0, tol_neutral));
        } else {
            const double rel = std::abs(rep.leading.real() - law) / std::abs(law);
            r.claims.push_back(check("leading_negative_V_" + vt, "leading eigenvalue of T_C has Re < 0",
                                     rep.leading.real() < 0, rep.leading.real(), 0.0, 0.0));
            r.claims.push_back(check("lambda_law_V_" + vt, "leading eigenvalue matches -pi^2 V^2/24",
                                     rel <= tol_law, rep.leading.real(), law, tol_law,
                                     fmt::format("relative error {:.3e}", rel)));
            const double second = rep.eigenvalues.size() > 1 ? rep.eigenvalues[1].real() : -INFINITY;
            r.claims.push_back(check("others_left_V_" + vt,
                                     "all other eigenvalues lie in the open left half-plane",
                                     second < 0, second, 0.0, 0.0,
                                     second < -1 ? "also below -1" : "not below -1"));
        }
        if (do_resolvent) {
            try {
                rep.resolvent = resolvent_grid(A.A, default_resolvent_re(), default_resolvent_im());
                for (const auto& p : rep.resolvent) rep.sup_resolvent = std::max(rep.sup_resolvent, p.norm);
                write_resolvent_csv((fs::path(out_dir) / ("resolvent_V" + vt + ".csv")).string(),
                                    rep.resolvent);
                r.outputs.push_back("resolvent_V" + vt + ".csv");
                s["sup_resolvent"] = rep.sup_resolvent;
                if (V != 0.0) {
                    const double bound = factor / std::abs(rep.leading.real());
                    r.claims.push_back(check("resolvent_bounded_V_" + vt,
                                             "sup of the resolvent norm over the right half-plane grid "
                                             "is finite and below factor/|Re lambda_lead|",
                                             std::isfinite(rep.sup_resolvent) && rep.sup_resolvent < bound,
                                             rep.sup_resolvent, bound, factor));
                }
            } catch (const DomainError& e) {
                r.claims.push_back(info("resolvent_V_" + vt, "resolvent grid touches the spectrum", 0.0,
                                        e.what()));
            }
        }
        write_spectrum_json((fs::path(out_dir) / ("spectrum_V" + vt + ".json")).string(), rep);
        r.outputs.push_back("spectrum_V" + vt + ".json");
        s["gershgorin_discs_left"] = rep.gershgorin.discs_left;
        r.summary["per_V"].push_back(s);
    }

    const auto curve = leading_eigenvalue_curve(Z, curve_V, N, g, q);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < curve.V.size(); ++i)
        rows.push_back({curve.V[i], curve.lambda[i].real(), curve.lambda[i].imag()});
    write_csv(fs::path(out_dir) / "lambda_curve.csv", "V,re_lambda,im_lambda", rows);
    r.outputs.push_back("lambda_curve.csv");
    const double c_law = -pi * pi / 24.0;
    const double rel = std::abs(curve.quadratic_coeff - c_law) / std::abs(c_law);
    r.claims.push_back(check("lambda_quadratic_fit", "quadratic fit of Re lambda(V) matches -pi^2/24",
                             rel <= tol_law, curve.quadratic_coeff, c_law, tol_law));
    r.summary["quadratic_coeff"] = curve.quadratic_coeff;
    write_json(fs::path(out_dir) / "spectrum_summary.json", r.summary);
    r.outputs.push_back("spectrum_summary.json");
    return r;
}

// ---- traveling-wave stability ---------------------------------------------------

ExperimentResult cmd_tw_stability(const Config& cfg, const std::string& out_dir) {
    ExperimentResult r;
    r.command = "tw-stability";
    fs::create_directories(out_dir);
    const Grid g = grid_of(cfg);
    const int N = modes_of(cfg);
    const double Z = cfg.get_double("tw.Z", 50.0);
    const double V = cfg.get_double("tw.V", 0.05);
    const double eps = cfg.get_double("tw.eps", 1e-4);
    const double T = cfg.get_double("tw.T", 200.0);
    const double TB = cfg.get_double("tw.model_b_T", 1.0);
    const int q = cfg.get_int("spectrum.quad_points", 1024);
    const double tol_rate = cfg.tolerance("tw_rate", 0.30);
    const double tol_drift = cfg.tolerance("drift", 0.02);
    if (V == 0.0) throw DomainError("config: tw.V must be nonzero");
    r.operations = {"traveling-wave:scheme_tw", "traveling-wave:exact_tw", "spectral:assemble_t_c",
                    "dynamics:simulate", "dynamics:decay_rate", "numerics-core:band_limited"};

    const auto ref = scheme_tw(V, Z, g);
    const auto lead = eigenvalues(assemble_t_c(exact_tw(V, Z, g), N, q)).leading.real();
    const ModelParams params = ref.params();

    CellState s0{axpby(1.0, ref.m_T, eps, band_limited(g, seed_of(cfg), 8, 1.0))};
    const double dt = cfg.get_double("tw.dt", std::min(10 * g.h * g.h, 0.9 * dt_max(s0, params)));
    const Trajectory tr = simulate(s0, params, T, dt, stride_for(T, dt, 400));
    const auto dist = distance_series(tr, ref.m_T);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < dist.size(); ++i) rows.push_back({tr.snapshots[i].state.t, dist[i]});
    write_csv(fs::path(out_dir) / "distance.csv", "t,distance", rows);
    write_trajectory_csv((fs::path(out_dir) / "trajectory.csv").string(), tr);
    r.outputs.insert(r.outputs.end(), {"distance.csv", "trajectory.csv"});

    double rate = 0.0;
    if (eps == 0.0) {
        const double maxd = *std::max_element(dist.begin(), dist.end());
        r.claims.push_back(check("comoving_stationary", "unperturbed wave is stationary in the co-moving frame",
                                 maxd < 1e-8, maxd, 0.0, 1e-8));
    } else {
        const DecayFit fit = decay_rate(tr, ref.m_T);
        rate = fit.rate;
        const double rel = std::abs(rate - lead) / std::abs(lead);
        r.claims.push_back(check("monotone_decay", "distance to the wave decreases monotonically after the transient",
                                 fit.monotone && fit.decaying, dist.back(), 0.0, 0.0));
        r.claims.push_back(check("rate_matches_lambda", "decay rate matches the leading T_C eigenvalue",
                                 rel <= tol_rate, rate, lead, tol_rate,
                                 fmt::format("relative error {:.3e}", rel)));
    }

    const ModelParams pb = ModelParams::model_b(Z, ref.P_T);
    CellState sb{ref.m_T};
    const Trajectory trb = simulate(sb, pb, TB, dt, stride_for(TB, dt, 100));
    write_trajectory_csv((fs::path(out_dir) / "model_b.csv").string(), trb);
    r.outputs.push_back("model_b.csv");
    const double drift = trb.snapshots.back().state.c / trb.snapshots.back().state.t;
    r.claims.push_back(check("model_b_drift", "Model B center drifts at the wave velocity",
                             std::abs(drift - V) <= tol_drift * std::abs(V), drift, V, tol_drift));

    r.summary = {{"Z", Z},    {"V", V},   {"eps", eps},  {"dt", dt},
                 {"T", T},    {"rate", rate}, {"lambda", lead}, {"P_T", ref.P_T},
                 {"model_b_velocity", drift}, {"status", tr.status}};
    write_json(fs::path(out_dir) / "tw_stability.json", r.summary);
    r.outputs.push_back("tw_stability.json");
    return r;
}

// ---- stiff limit ------------------------------------------------------------------

ExperimentResult cmd_stiff_limit(const Config& cfg, const std::string& out_dir) {
    ExperimentResult r;
    r.command = "stiff-limit";
    fs::create_directories(out_dir);
    const Grid g = grid_of(cfg);
    const auto eps_list = cfg.get_list("stiff.eps", {0.1, 0.05, 0.025});
    const double Z = cfg.get_double("stiff.Z", 1.0);
    const double Km1 = cfg.get_double("stiff.K_minus1", 10.0);
    const double P1 = cfg.get_double("stiff.P1", 0.5);
    const double T = cfg.get_double("stiff.T", 0.5);
    const double a = cfg.get_double("stiff.a", 0.1);
    const double b = cfg.get_double("stiff.b", 0.05);
    const double tol_ratio = cfg.tolerance("stiff_ratio", 0.5);
    const double pass_dev = cfg.tolerance("stiff_pass", 0.01);
    if (eps_list.size() < 2) throw DomainError("config: stiff.eps needs at least 2 values");
    for (double e : eps_list)
        if (e < 0.01) throw DomainError("config: stiff.eps values must be >= 0.01");
    r.operations = {"dynamics:simulate(A)", "dynamics:simulate(B)"};

    const Field m0 = Field::sample(
        g, [&](double x) { return 1.0 + a * std::cos(2 * pi * x) + b * std::sin(pi * x); },
        FieldKind::myosin);
    const ModelParams pb = ModelParams::model_b(Z, Km1 * P1);
    double dt = 10 * g.h * g.h;
    for (double e : eps_list)
        dt = std::min(dt, 0.5 * dt_max(CellState{m0}, ModelParams::model_a(Z, e * P1, Km1 / e)));
    dt = std::min(dt, 0.9 * dt_max(CellState{m0}, pb));
    const int stride = stride_for(T, dt, 200);
    const Trajectory trb = simulate(CellState{m0}, pb, T, dt, stride);

    struct Row {
        double dev = 0, devL = 0, devc = 0;
        std::string status;
    };
    std::vector<Row> rows(eps_list.size());
    parallel_for_each(eps_list.size(), [&](std::size_t i) {
        const double e = eps_list[i];
        const Trajectory tra = simulate(CellState{m0}, ModelParams::model_a(Z, e * P1, Km1 / e), T, dt, stride);
        Row& row = rows[i];
        row.status = tra.status;
        const std::size_t K = std::min(tra.snapshots.size(), trb.snapshots.size());
        for (std::size_t k = 0; k < K; ++k) {
            const auto& A = tra.snapshots[k].state;
            const auto& B = trb.snapshots[k].state;
            row.dev = std::max(row.dev, norm(axpby(1.0, A.m, -1.0, B.m), Norm::L2));
            row.devL = std::max(row.devL, std::abs(A.L - 1.0));
            row.devc = std::max(row.devc, std::abs(A.c - B.c));
        }
    });

    std::vector<std::vector<double>> table;
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        const double ratio = i ? rows[i - 1].dev / rows[i].dev : NAN;
        table.push_back({eps_list[i], rows[i].dev, rows[i].devL, rows[i].devc, ratio,
                         rows[i].dev < pass_dev ? 1.0 : 0.0});
        if (rows[i].status != "ok")
            r.claims.push_back(check("run_eps_" + tag(eps_list[i]), "Model A run completes", false, 0.0,
                                     0.0, 0.0, rows[i].status));
        if (rows[i].dev < pass_dev)
            r.claims.push_back(check("close_eps_" + tag(eps_list[i]), "Model A within threshold of Model B",
                                     true, rows[i].dev, 0.0, pass_dev));
    }
    write_csv(fs::path(out_dir) / "stiff_table.csv",
              "eps,sup_l2_deviation,sup_length_deviation,sup_center_deviation,ratio,pass_marker", table);
    r.outputs.push_back("stiff_table.csv");

    double order_sum = 0.0;
    int order_n = 0;
    for (std::size_t i = 1; i < eps_list.size(); ++i) {
        const double expected = eps_list[i - 1] / eps_list[i];
        const double ratio = rows[i - 1].dev / rows[i].dev;
        r.claims.push_back(check("ratio_" + tag(eps_list[i - 1]) + "_" + tag(eps_list[i]),
                                 "deviation shrinks linearly with eps",
                                 std::abs(ratio - expected) <= tol_ratio, ratio, expected, tol_ratio));
        order_sum += std::log(ratio) / std::log(expected);
        ++order_n;
        const double ratioL = rows[i - 1].devL / rows[i].devL;
        r.claims.push_back(check("length_ratio_" + tag(eps_list[i - 1]) + "_" + tag(eps_list[i]),
                                 "sup |L - 1| shrinks linearly with eps",
                                 std::abs(ratioL - expected) <= tol_ratio, ratioL, expected, tol_ratio));
    }
    const double order = order_sum / order_n;
    r.claims.push_back(info("convergence_order", "estimated order in eps", order));
    r.summary = {{"Z", Z}, {"K_minus1", Km1}, {"P1", P1}, {"T", T}, {"dt", dt}, {"order", order}};
    write_json(fs::path(out_dir) / "stiff_limit.json", r.summary);
    r.outputs.push_back("stiff_limit.json");
    return r;
}

// ---- plain simulation ----------------------------------------------------------------

ExperimentResult cmd_simulate(const Config& cfg, const std::string& out_dir) {
    ExperimentResult r;
    r.command = "simulate";
    fs::create_directories(out_dir);
    const Grid g = grid_of(cfg);
    const std::string variant = cfg.get_string("simulate.variant", "C");
    const double Z = cfg.get_double("simulate.Z", 1.0);
    const double P = cfg.get_double("simulate.P", 5.0);
    const double T = cfg.get_double("simulate.T", 0.1);
    const double eps = cfg.get_double("simulate.eps", 1e-3);
    const std::string init = cfg.get_string("simulate.init", "perturbed");
    const double mass_tol = cfg.tolerance("mass", 1e-9);

    ModelParams params;
    if (variant == "A") params = ModelParams::model_a(Z, P, cfg.get_double("simulate.K", 1.0));
    else if (variant == "B") params = ModelParams::model_b(Z, P);
    else if (variant == "C") params = ModelParams::model_c(Z, P);
    else throw DomainError("config: simulate.variant must be A, B or C");

    Field m0 = Field::constant(g, 1.0, FieldKind::myosin);
    if (init == "perturbed") {
        m0 = axpby(1.0, m0, eps, band_limited(g, seed_of(cfg), 8, 1.0));
    } else if (init == "tw") {
        const auto tw = scheme_tw(cfg.get_double("simulate.V", 0.05), Z, g);
        m0 = tw.m_T;
        params.P = tw.P_T;
        r.operations.push_back("traveling-wave:scheme_tw");
    } else if (init != "constant") {
        throw DomainError("config: simulate.init must be constant, perturbed or tw");
    }
    CellState s0{m0};
    const double dt = cfg.get_double("simulate.dt", std::min(10 * g.h * g.h, 0.9 * dt_max(s0, params)));
    const int stride = cfg.get_int("simulate.stride", stride_for(T, dt, 50));
    const Trajectory tr = simulate(s0, params, T, dt, stride);
    r.operations.push_back("dynamics:simulate");

    write_trajectory_csv((fs::path(out_dir) / "trajectory.csv").string(), tr);
    r.outputs.push_back("trajectory.csv");
    fs::create_directories(fs::path(out_dir) / "fields");
    for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
        const std::string name = fmt::format("fields/m_{:05d}.csv", k);
        write_field_csv((fs::path(out_dir) / name).string(), tr.snapshots[k].state.m);
        r.outputs.push_back(name);
    }
    const double m_init = mass(m0);
    r.claims.push_back(check("mass_conserved", "trapezoid mass stays at its initial value",
                             tr.max_mass_drift < mass_tol, tr.max_mass_drift, m_init, mass_tol));
    r.claims.push_back(check("run_completed", "no blow-up or step-size violation", tr.status == "ok",
                             static_cast<double>(tr.steps), 0.0, 0.0, tr.status));
    r.summary = {{"variant", variant}, {"Z", Z},     {"P", params.P}, {"T", T},
                 {"dt", dt},           {"steps", tr.steps}, {"status", tr.status}};
    return r;
}

// ---- dispatch and manifest -------------------------------------------------------------

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"stationary-stability", "bifurcation", "spectrum",
                                                   "tw-stability",         "stiff-limit", "simulate"};
    return names;
}

ExperimentResult run_command(const std::string& name, const Config& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    if (name == "stationary-stability") return cmd_stationary_stability(cfg, out_dir);
    if (name == "bifurcation") return cmd_bifurcation(cfg, out_dir);
    if (name == "spectrum") return cmd_spectrum(cfg, out_dir);
    if (name == "tw-stability") return cmd_tw_stability(cfg, out_dir);
    if (name == "stiff-limit") return cmd_stiff_limit(cfg, out_dir);
    if (name == "simulate") return cmd_simulate(cfg, out_dir);
    throw DomainError("unknown command " + name);
}

void write_manifest(const ExperimentResult& r, const Config& cfg, const std::string& out_dir) {
    json m;
    m["schema_version"] = kManifestSchemaVersion;
    m["command"] = r.command;
    m["config_hash"] = cfg.hash();
    m["config"] = cfg.entries();
    m["module_versions"] = {{"numerics-core", "1.0.0"}, {"elliptic", "1.0.0"},
                            {"dynamics", "1.0.0"},      {"traveling-wave", "1.0.0"},
                            {"spectral", "1.0.0"},      {"cli", "1.0.0"}};
    m["operations"] = r.operations;
    m["outputs"] = r.outputs;
    m["claims"] = claims_json(r.claims);
    m["summary"] = r.summary;
    m["empirical_thresholds"] = {
        {"Z_star", 50.0},
        {"V_star", 0.1},
        {"note", "desk-scale values where the checks pass; empirical, not proven constants"}};
    m["verdict"] = r.any_fail() ? "FAIL" : "PASS";
    write_json(fs::path(out_dir) / "manifest.json", m);
}

}  // namespace ks
