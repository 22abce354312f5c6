#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "ks/config.hpp"
#include "ks/experiments.hpp"
#include "ks/numerics.hpp"

using namespace ks;
namespace fs = std::filesystem;

namespace {

const Claim* find(const ExperimentResult& r, const std::string& prefix) {
    for (const auto& c : r.claims)
        if (c.id.rfind(prefix, 0) == 0) return &c;
    return nullptr;
}

std::string tmpdir(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("ks_test_" + name);
    fs::remove_all(p);
    return p.string();
}

}  // namespace

TEST_CASE("config parsing: comments, whitespace, lists, typed access") {
    const Config c = Config::parse("# header\n  grid.n = 64  # trailing\n\nstiff.eps=0.1, 0.05 ,0.025\nname = x\n");
    CHECK(c.get_int("grid.n", 0) == 64);
    CHECK(c.get_list("stiff.eps", {}) == std::vector<double>{0.1, 0.05, 0.025});
    CHECK(c.get_string("name", "") == "x");
    CHECK(c.get_double("missing", 2.5) == 2.5);
    CHECK_THROWS_AS(c.get_double("name", 0), DomainError);
    CHECK_THROWS_AS(Config::parse("no equals sign"), DomainError);
    CHECK_THROWS_AS(Config::parse(" = 3"), DomainError);
    CHECK_THROWS_AS(Config::parse("grid.n = 6.5").get_int("grid.n", 0), DomainError);
    CHECK_THROWS_AS(Config::parse("l = ,").get_list("l", {}), DomainError);
    CHECK_THROWS_AS(Config::parse("tol.x = 0").tolerance("x", 1), DomainError);
    CHECK_THROWS_AS(Config::parse("tol.x = -1").tolerance("x", 1), DomainError);
    CHECK(Config::parse("tol.x = 0.3").tolerance("x", 1) == 0.3);
}

TEST_CASE("config hash is order independent and content sensitive") {
    const Config a = Config::parse("a = 1\nb = 2\n"), b = Config::parse("b = 2\na = 1\n"), c = Config::parse("a = 1\nb = 3\n");
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != c.hash());
    CHECK(a.canonical() == "a=1\nb=2\n");
    // FIPS 180-2 test vector.
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("stationary pipeline: decay PASS, trivial PASS, supercritical growth") {
    Config c = Config::parse("grid.n = 128\nmodes = 16\nstationary.T = 0.2\n");   // n = 64 is 5% off: second-order scheme
    auto r = cmd_stationary_stability(c, tmpdir("st"));
    CHECK_FALSE(r.any_fail());
    REQUIRE(find(r, "decay_rate") != nullptr);
    CHECK(find(r, "decay_rate")->status == "PASS");

    c.set("stationary.eps", "0");
    r = cmd_stationary_stability(c, tmpdir("st0"));
    CHECK(r.summary["verdict"] == "trivial");
    CHECK_FALSE(r.any_fail());

    Config s = Config::parse("grid.n = 64\nmodes = 16\nstationary.P = 14\nstationary.modes = 1,2\nstationary.T = 1\n");
    r = cmd_stationary_stability(s, tmpdir("st_super"));
    CHECK(r.summary["verdict"] == "supercritical, growth detected");
    CHECK_FALSE(r.any_fail());
}

TEST_CASE("bifurcation pipeline skips the singular parameter and writes profiles") {
    const auto dir = tmpdir("bif");
    Config c = Config::parse("grid.n = 64\nbifurcation.Z = 0.0833333333333333, 5\nbifurcation.steps = 8\n");
    const auto r = cmd_bifurcation(c, dir);
    REQUIRE(find(r, "skip_Z") != nullptr);
    CHECK(find(r, "skip_Z")->status == "INFO");
    CHECK(find(r, "p2_fit_Z_5")->status == "PASS");
    CHECK(fs::exists(fs::path(dir) / "profile_Z5_V0.1.csv"));
    CHECK(fs::exists(fs::path(dir) / "profile_Z5_V0.2.csv"));
    CHECK(fs::exists(fs::path(dir) / "curve_Z5.csv"));
}

TEST_CASE("spectrum pipeline flags the neutral mode at V = 0") {
    Config c = Config::parse("grid.n = 128\nmodes = 24\nspectrum.V = 0, 0.05\nspectrum.curve_V = 0.03,0.05\nspectrum.resolvent = 0\n");
    const auto r = cmd_spectrum(c, tmpdir("spec"));
    REQUIRE(find(r, "neutral_V_0") != nullptr);
    CHECK(find(r, "neutral_V_0")->statement == "neutral (translation mode at bifurcation)");
    CHECK(find(r, "neutral_V_0")->status == "PASS");
    CHECK(find(r, "leading_negative_V_0.05")->status == "PASS");
}

TEST_CASE("stiff-limit pipeline validates eps and reports ratios") {
    Config bad = Config::parse("stiff.eps = 0.1, 0.005\n");
    CHECK_THROWS_AS(cmd_stiff_limit(bad, tmpdir("stiff_bad")), DomainError);
    Config one = Config::parse("stiff.eps = 0.1\n");
    CHECK_THROWS_AS(cmd_stiff_limit(one, tmpdir("stiff_one")), DomainError);
    Config c = Config::parse("grid.n = 64\nstiff.T = 0.2\n");
    const auto r = cmd_stiff_limit(c, tmpdir("stiff"));
    CHECK(find(r, "ratio_0.1_0.05") != nullptr);
    CHECK(find(r, "convergence_order")->status == "INFO");
}

TEST_CASE("manifest records hash, versions, operations, and claims") {
    const auto dir = tmpdir("man");
    Config c = Config::parse("grid.n = 32\nsimulate.T = 0.01\n");
    const auto r = run_command("simulate", c, dir);
    write_manifest(r, c, dir);
    std::ifstream in(fs::path(dir) / "manifest.json");
    const auto j = nlohmann::json::parse(in);
    CHECK(j["schema_version"] == kManifestSchemaVersion);
    CHECK(j["config_hash"] == c.hash());
    CHECK(j["module_versions"].contains("spectral"));
    CHECK(j["operations"].size() >= 1);
    CHECK(j["claims"].size() == r.claims.size());
    CHECK(j["empirical_thresholds"]["Z_star"] == 50.0);
    CHECK(j["verdict"] == "PASS");
    CHECK_THROWS_AS(run_command("nope", c, dir), DomainError);
}

TEST_CASE("simulate rejects unknown variants and init kinds") {
    CHECK_THROWS_AS(cmd_simulate(Config::parse("simulate.variant = D\n"), tmpdir("sv")), DomainError);
    CHECK_THROWS_AS(cmd_simulate(Config::parse("simulate.init = noise\n"), tmpdir("si")), DomainError);
}
