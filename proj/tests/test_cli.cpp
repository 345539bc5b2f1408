#include "yahil/cli.hpp"
#include "yahil/io.hpp"
#include "yahil/sonic.hpp"

#include <doctest.h>

#include <chrono>
#include <cstring>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>

#include <sys/wait.h>

using namespace yahil;
namespace fs = std::filesystem;

namespace {

const double pi = std::numbers::pi;

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("yahil_cli_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

// run the installed binary, discarding its console output
int cli(const std::string& args, const std::string& env = "")
{
    const std::string cmd = env + (env.empty() ? "" : " ") + YAHIL_CLI_PATH + std::string(" ") + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::vector<std::vector<double>> read_table(const fs::path& p, std::string* header = nullptr)
{
    std::istringstream in(read_file(p));
    std::string line;
    std::getline(in, line);
    if (header)
        *header = line;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

const fs::path& solved_profile()
{
    static const fs::path dir = [] {
        const fs::path d = scratch("solve12");
        REQUIRE(cli("solve --gamma 1.2 --out " + d.string()) == 0);
        return d;
    }();
    return dir;
}

} // namespace

TEST_CASE("exit codes")
{
    const auto d = scratch("codes").string();
    CHECK(cli("") == 1);
    CHECK(cli("--help") == 0);
    CHECK(cli("solve --gamma 1.34 --out " + d) == 1);
    CHECK(cli("solve --gamma 1 --out " + d) == 1);
    CHECK(cli("expand --gamma nan --out " + d) == 1);
    CHECK(cli("expand --format xml --out " + d) == 1);
    CHECK(cli("expand --y-star abc --out " + d) == 1);
    CHECK(cli("expand --n-max 1 --out " + d) == 1);
    CHECK(cli("physical --t 1 --out " + d) == 1);
    CHECK(cli("expand --gamma 1.2 --y-star 10 --out " + d) == 2);
    CHECK(cli("expand --gamma 1.2 --y-star 0.5 --out " + d) == 2);
    CHECK(cli("certify --corrupt quad1 --out " + d) == 2);
    // the in-process entry point follows the same contract
    CHECK(run({"solve", "--gamma", "1.4", "--out", d}) == ExitUsage);
}

TEST_CASE("certify writes every certificate and passes")
{
    const auto d = scratch("certify");
    REQUIRE(cli("certify --out " + d.string()) == 0);
    std::istringstream in(read_file(d / "certificates.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line == "name,kind,claim,tol,enclosure_lo,enclosure_hi,paper_lo,paper_hi,paper_intersects,verdict");
    int rows = 0, with_interval = 0;
    while (std::getline(in, line)) {
        ++rows;
        CHECK(line.substr(line.rfind(',') + 1) == "pass");
        with_interval += line.find(",1,pass") != std::string::npos;
    }
    CHECK(rows == 50);
    CHECK(with_interval == 38);

    REQUIRE(cli("certify --tol-scale 0.1 --format json --out " + d.string()) == 0);
    const auto j = nlohmann::json::parse(read_file(d / "certificates.json"));
    CHECK(j["schema_version"] == schema_version);
    CHECK(j["all_pass"] == true);
    CHECK(j["count"] == 50);
}

TEST_CASE("expand at the window ends")
{
    const auto d = scratch("expand");
    const PolytropicIndex g(1.2);
    REQUIRE(cli("expand --gamma 1.2 --y-star yf --out " + d.string()) == 0);
    std::string header;
    const auto far = read_table(d / "expand.csv", &header);
    CHECK(header == "N,rho_N,omega_N,P_N");
    CHECK(far.size() == 61);
    // far field: omega is constant, rho follows the binomial series
    for (std::size_t n = 1; n < far.size(); ++n)
        CHECK(std::abs(far[n][2]) <= 1e-12 * std::pow(sonic_window(g).y_f, -static_cast<double>(n)));
    const auto meta = nlohmann::json::parse(read_file(d / "expand_meta.json"));
    CHECK(meta["schema_version"] == schema_version);
    CHECK(meta["residual_slope_rho"].get<double>() >= 59);

    REQUIRE(cli("expand --gamma 1.2 --y-star yF --out " + d.string()) == 0);
    const auto fr = read_table(d / "expand.csv");
    CHECK(fr[1][2] > 0);
    CHECK(fr[0][2] == doctest::Approx((4 - 3 * 1.2) / 3).epsilon(1e-14));

    const auto t0 = std::chrono::steady_clock::now();
    REQUIRE(cli("expand --gamma 1.2 --out " + d.string()) == 0);
    CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 1.0);
}

TEST_CASE("solve writes a profile and a summary")
{
    const auto& d = solved_profile();
    std::string header;
    const auto rows = read_table(d / "profile.csv", &header);
    CHECK(header == "y,rho,omega,u,G,h");
    REQUIRE(rows.size() > 100);
    for (const auto& r : rows) {
        CHECK(r.size() == 6);
        CHECK(r[3] < 0);
    }
    const auto s = nlohmann::json::parse(read_file(d / "summary.json"));
    const auto w = sonic_window(PolytropicIndex(1.2));
    CHECK(s["schema_version"] == schema_version);
    CHECK(s["all_invariants_pass"] == true);
    const double yb = s["y_star_bar"].get<double>();
    CHECK(w.y_f < yb);
    CHECK(yb < w.y_F);
    CHECK(s["bracket"][0].get<double>() <= yb);
    CHECK(yb <= s["bracket"][1].get<double>());
    CHECK(s["asymptotics"]["k1_bar"].get<double>() > 0);
    CHECK(s["asymptotics"]["k2_bar"].get<double>() > 0);
    CHECK(s["invariants"].size() == 8);
    CHECK(s["rho_y_min"].get<double>() > 1 / (6 * pi));
}

TEST_CASE("solve output is deterministic, independent of thread count, and round-trips")
{
    const auto a = scratch("det_a"), b = scratch("det_b");
    REQUIRE(cli("solve --gamma 1.3 --out " + a.string()) == 0);
    REQUIRE(cli("solve --gamma 1.3 --out " + b.string(), "YAHIL_THREADS=1") == 0);
    CHECK(read_file(a / "profile.csv") == read_file(b / "profile.csv"));
    CHECK(read_file(a / "summary.json") == read_file(b / "summary.json"));

    const std::string text = read_file(a / "profile.csv");
    const auto samples = parse_profile_csv(text);
    CHECK(profile_csv(samples) == text);
    for (std::size_t i = 0; i + 1 < samples.size(); ++i)
        CHECK(samples[i].y < samples[i + 1].y);
    CHECK_THROWS_AS(parse_profile_csv("y,rho\n1,2\n"), ParameterError);
    CHECK_THROWS_AS(parse_profile_csv("y,rho,omega,u,G,h\n1,2,3\n"), ParameterError);
    CHECK_THROWS_AS(parse_profile_csv("y,rho,omega,u,G,h\n1,2,3,4,5,x\n"), ParameterError);

    REQUIRE(cli("solve --gamma 1.3 --format json --out " + a.string()) == 0);
    const auto j = nlohmann::json::parse(read_file(a / "profile.json"));
    REQUIRE(j["y"].size() == samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        CHECK(j["rho"][i].get<double>() == samples[i].rho);
    // atomic writes leave no temporaries behind
    for (const auto& e : fs::directory_iterator(a))
        CHECK(e.path().extension() != ".tmp");
}

TEST_CASE("shortest round-trip number formatting")
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::uint64_t> bits;
    for (int i = 0; i < 20000; ++i) {
        const auto b = bits(rng);
        double x;
        std::memcpy(&x, &b, sizeof x);
        if (!std::isfinite(x))
            continue;
        const std::string s = format_double(x);
        CHECK(std::strtod(s.c_str(), nullptr) == x);
        CHECK(s.size() <= 24);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
}

TEST_CASE("plot data reproduces the branch picture")
{
    const auto d = scratch("plot");
    REQUIRE(cli("plotdata --gammas 1 1.1111111111111112 1.2 --points 401 --format json --out " + d.string()) == 0);
    const auto j = nlohmann::json::parse(read_file(d / "plotdata.json"));
    REQUIRE(j["gammas"].size() == 3);
    // isothermal closed forms meet where 1 - 2 omega0 = 0
    {
        const auto& iso = j["gammas"][0];
        CHECK(iso["closed_form"] == true);
        double gap_at_half = 1e300, gap_elsewhere = 1e300;
        for (std::size_t i = 0; i < iso["omega0"].size(); ++i) {
            const double w = iso["omega0"][i], gap = std::abs(iso["R1"][i].get<double>() - iso["R2"][i].get<double>());
            if (std::abs(w - 0.5) < 1e-9)
                gap_at_half = gap;
            else if (std::abs(w - 0.5) > 0.05)
                gap_elsewhere = std::min(gap_elsewhere, gap);
        }
        CHECK(gap_at_half <= 1e-12);
        CHECK(gap_elsewhere > 0.1);
    }
    // at gamma = 10/9 the h = 0 level set bottoms out at the Friedman value
    {
        const auto& e = j["gammas"][1];
        const double g = e["gamma"];
        const auto& lw = e["levelset_omega"];
        const auto& lf = e["levelset_rho"];
        std::size_t best = 0;
        for (std::size_t i = 1; i < lf.size(); ++i)
            if (lf[i].get<double>() < lf[best].get<double>())
                best = i;
        const double spacing = lw[1].get<double>() - lw[0].get<double>();
        CHECK(std::abs(lw[best].get<double>() - (4 - 3 * g) / 3) <= spacing);
    }
    // far-field end of the branch curve
    for (std::size_t k = 1; k < 3; ++k) {
        const auto& e = j["gammas"][k];
        const double g = e["gamma"];
        CHECK(e["omega0"].back().get<double>() == doctest::Approx(2 - g).epsilon(1e-15));
        CHECK(e["R1"].back().get<double>() == doctest::Approx(-2 / (2 - g)).epsilon(1e-12));
    }
    CHECK(cli("plotdata --gammas 1.5 --out " + d.string()) == 1);
    REQUIRE(cli("plotdata --gammas 1.2 --points 11 --out " + d.string()) == 0);
    CHECK(fs::exists(d / "branches_1.2.csv"));
    CHECK(fs::exists(d / "levelset_1.2.csv"));
}

TEST_CASE("physical fields respect the scaling symmetry")
{
    const auto prof = (solved_profile() / "profile.csv").string();
    const auto d = scratch("phys");
    const double g = 1.2, b = 2 - g, lambda = 2.0;
    const double t0 = -0.7, t1 = t0 * std::pow(lambda, 1 / b);
    auto run_at = [&](double t, double r_min, double r_max, const std::string& tag) {
        std::ostringstream args;
        args.precision(17);
        args << "physical --gamma 1.2 --kappa 1.5 --t " << t << " --r-min " << r_min << " --r-max " << r_max
             << " --r-count 301 --profile " << prof << " --out " << (d / tag).string();
        REQUIRE(cli(args.str()) == 0);
        return read_table(d / tag / "physical.csv");
    };
    const auto base = run_at(t0, 1e-3, 1e3, "base");
    const auto scaled = run_at(t1, lambda * 1e-3, lambda * 1e3, "scaled");
    REQUIRE(base.size() == scaled.size());
    // rho -> l^(-2/b) rho, u -> l^(-(g-1)/b) u, m -> l^((4-3g)/b) m
    for (std::size_t i = 1; i + 1 < base.size(); ++i) {
        CHECK(std::abs(scaled[i][2] / (std::pow(lambda, -2 / b) * base[i][2]) - 1) <= 1e-6);
        CHECK(std::abs(scaled[i][3] / (std::pow(lambda, -(g - 1) / b) * base[i][3]) - 1) <= 1e-6);
        CHECK(std::abs(scaled[i][4] / (std::pow(lambda, (4 - 3 * g) / b) * base[i][4]) - 1) <= 1e-6);
    }
    for (const auto& r : base)
        CHECK(r[3] < 0);
}

TEST_CASE("physical fields: far-field slope, enclosed mass and extrapolation flags")
{
    const auto prof = (solved_profile() / "profile.csv").string();
    const auto d = scratch("phys2");
    const double g = 1.2, b = 2 - g;
    REQUIRE(cli("physical --gamma 1.2 --t -1 --kappa 1 --r-min 1e-3 --r-max 1e4 --r-count 4001 --profile " + prof
                + " --out " + d.string())
            == 0);
    const auto rows = read_table(d / "physical.csv");
    // log slope of rho at large r
    const auto& a = rows[rows.size() - 200];
    const auto& z = rows.back();
    CHECK(std::log(z[2] / a[2]) / std::log(z[0] / a[0]) == doctest::Approx(-2 / b).epsilon(1e-2));
    // enclosed mass against a trapezoid of 4 pi rho r^2
    double m = 4 * pi * rows[0][2] * std::pow(rows[0][0], 3) / 3;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& p = rows[i - 1];
        const auto& q = rows[i];
        m += 2 * pi * (q[0] - p[0]) * (q[2] * q[0] * q[0] + p[2] * p[0] * p[0]);
        if (q[0] > 0.01)
            CHECK(std::abs(m / q[4] - 1) <= 1e-4);
    }
    // beyond the solved range rows are flagged
    REQUIRE(cli("physical --gamma 1.2 --t -1 --r-min 1e-6 --r-max 1e6 --r-count 13 --profile " + prof + " --out "
                + d.string())
            == 0);
    const auto wide = read_table(d / "physical.csv");
    CHECK(wide.front()[5] == 1);
    CHECK(wide.back()[5] == 1);
    CHECK(wide[6][5] == 0);
}
