#include "yahil/cli.hpp"
#include "yahil/certify.hpp"
#include "yahil/io.hpp"
#include "yahil/shoot.hpp"

#include <cmath>

#include <CLI11.hpp>
// pchip.hpp calls isnan unqualified and expects it at global scope
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <omp.h>

#include <cstdlib>
#include <iostream>
#include <optional>

namespace yahil {

using Pchip = boost::math::interpolators::pchip<std::vector<double>>;

struct ProfileInterpolant::Impl {
    Pchip log_rho;
    Pchip omega;
    double rho_lo, omega_lo, rho_hi, omega_hi;
};

ProfileInterpolant::ProfileInterpolant(const std::vector<Sample>& samples, PolytropicIndex gamma) : gamma_(gamma)
{
    std::vector<double> x, lr, w;
    for (const auto& s : samples) {
        if (!(s.y > 0.0 && s.rho > 0.0))
            throw ParameterError("profile samples need y > 0 and rho > 0");
        const double l = std::log(s.y);
        if (!x.empty() && !(l > x.back()))
            continue;  // drop repeated or unordered abscissae
        x.push_back(l);
        lr.push_back(std::log(s.rho));
        w.push_back(s.omega);
    }
    if (x.size() < 4)
        throw ParameterError("profile needs at least four increasing samples");
    y_min_ = std::exp(x.front());
    y_max_ = std::exp(x.back());
    const double rl = std::exp(lr.front()), wl = w.front(), rh = std::exp(lr.back()), wh = w.back();
    std::vector<double> x2 = x;
    impl_ = std::make_unique<Impl>(Impl{Pchip(std::move(x), std::move(lr)), Pchip(std::move(x2), std::move(w)), rl,
                                        wl, rh, wh});
}

ProfileInterpolant::~ProfileInterpolant() = default;
ProfileInterpolant::ProfileInterpolant(ProfileInterpolant&&) noexcept = default;
ProfileInterpolant& ProfileInterpolant::operator=(ProfileInterpolant&&) noexcept = default;

FlowState ProfileInterpolant::operator()(double y) const
{
    if (y < y_min_)
        return {impl_->rho_lo, impl_->omega_lo};
    if (y > y_max_)
        return {impl_->rho_hi * std::pow(y / y_max_, -2.0 / (2.0 - gamma_)), impl_->omega_hi};
    const double l = std::log(y);
    return {std::exp(impl_->log_rho(l)), impl_->omega(l)};
}

std::vector<PhysicalRow> physical_fields(const ProfileInterpolant& p, PolytropicIndex gamma, double t, double kappa,
                                         const std::vector<double>& r)
{
    if (!(t < 0.0))
        throw ParameterError("physical fields need t < 0");
    if (!(kappa > 0.0))
        throw ParameterError("kappa must be positive");
    const double g = gamma, T = -t, sk = std::sqrt(kappa);
    const double y_scale = sk * std::pow(T, 2.0 - g);
    std::vector<PhysicalRow> out;
    out.reserve(r.size());
    for (double ri : r) {
        if (!(ri > 0.0))
            throw ParameterError("radii must be positive");
        PhysicalRow row;
        row.r = ri;
        row.y = ri / y_scale;
        const FlowState s = p(row.y);
        row.rho = s.rho / (T * T);
        row.u = sk * std::pow(T, 1.0 - g) * velocity(row.y, s.omega, gamma);
        row.m = 4.0 * formula::pi<double>() * kappa * sk * std::pow(T, 4.0 - 3.0 * g) * local_mass(row.y, s, gamma);
        row.extrapolated = !p.in_range(row.y);
        out.push_back(row);
    }
    return out;
}

namespace {

struct Config {
    double gamma = 1.2;
    std::vector<double> gammas;
    std::string out = ".";
    std::string format = "csv";
    double tol_scale = 1.0;
    double tol_rtol = 1e-13;
    double tol_ystar = 0.0;
    // certify
    bool serial = false;
    std::string corrupt;
    long max_iter = 4'000'000;
    // expand
    std::string y_star = "mid";
    int n_max = 60;
    // solve
    double y_min_factor = 1e-4;
    double y_max_factor = 1e4;
    bool soft_monitors = false;
    // plotdata
    int points = 201;
    // physical
    double t = -1.0;
    double kappa = 1.0;
    double r_min = 1e-3;
    double r_max = 1e3;
    int r_count = 121;
    std::string profile;
};

std::filesystem::path out_path(const Config& c, const std::string& name)
{
    return std::filesystem::path(c.out) / name;
}

void apply_thread_env()
{
    if (const char* env = std::getenv("YAHIL_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0)
            omp_set_num_threads(n);
    }
}

ShootOptions shoot_options(const Config& c)
{
    ShootOptions o;
    o.n_max = c.n_max;
    o.y_min_factor = c.y_min_factor;
    o.y_max_factor = c.y_max_factor;
    o.tol_ystar = c.tol_ystar;
    o.integ.rtol = c.tol_rtol;
    o.integ.hard_monitors = !c.soft_monitors;
    return o;
}

int cmd_certify(const Config& c)
{
    SuiteOptions o;
    o.tol_scale = c.tol_scale;
    o.parallel = !c.serial;
    o.corrupt = c.corrupt;
    o.max_iter = c.max_iter;
    const auto certs = run_suite(o);

    std::string csv = "name,kind,claim,tol,enclosure_lo,enclosure_hi,paper_lo,paper_hi,paper_intersects,verdict\n";
    nlohmann::json list = nlohmann::json::array();
    for (const auto& x : certs) {
        list.push_back(to_json(x));
        csv += x.name + ',' + to_string(x.kind) + ',' + to_string(x.claim) + ',' + format_double(x.tol) + ','
            + format_double(x.enclosure.lo()) + ',' + format_double(x.enclosure.hi()) + ','
            + (x.paper ? format_double(x.paper->lo()) : "") + ',' + (x.paper ? format_double(x.paper->hi()) : "")
            + ',' + (x.paper ? (x.paper_intersects ? "1" : "0") : "") + ',' + to_string(x.verdict) + '\n';
        std::cout << x.name << ' ' << to_string(x.verdict) << ' ' << to_string(x.enclosure) << '\n';
    }
    const bool ok = suite_passes(certs);
    if (c.format == "json") {
        nlohmann::json j = {{"schema_version", schema_version},
                            {"certificates", list},
                            {"count", certs.size()},
                            {"listing_count", listing_count()},
                            {"all_pass", ok}};
        write_atomic(out_path(c, "certificates.json"), j.dump(2) + "\n");
    } else {
        write_atomic(out_path(c, "certificates.csv"), csv);
    }
    for (const auto& x : certs)
        if (x.verdict != Verdict::Pass)
            std::cerr << "certificate " << x.name << ": " << to_string(x.verdict) << '\n';
    std::cout << certs.size() << " certificates, " << (ok ? "all pass" : "FAILED") << '\n';
    return ok ? ExitOk : ExitVerification;
}

double parse_y_star(const std::string& s, PolytropicIndex gamma)
{
    const auto w = sonic_window(gamma);
    if (s == "yf")
        return w.y_f;
    if (s == "yF")
        return w.y_F;
    if (s == "mid")
        return 0.5 * (w.y_f + w.y_F);
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != s.size())
        throw ParameterError("y-star must be a number, yf, yF or mid");
    return v;
}

int cmd_expand(const Config& c)
{
    const PolytropicIndex g(c.gamma);
    const double ys = parse_y_star(c.y_star, g);
    if (c.n_max < 2)
        throw ParameterError("n-max must be at least 2");
    const TaylorLocal t = build_taylor(ys, c.n_max, g);
    const ResidualSlopes sl = series_residual_slopes(ys, c.n_max, g);

    const auto& s = t.seed;
    nlohmann::json meta = {{"schema_version", schema_version},
                           {"gamma", c.gamma},
                           {"y_star", s.y_star},
                           {"rho0", s.rho0},
                           {"omega0", s.omega0},
                           {"R1", s.R1},
                           {"W1", s.W1},
                           {"order", t.order},
                           {"radius", t.radius},
                           {"fitted_C", t.fitted_C},
                           {"degraded_radius", t.degraded_radius},
                           {"residual_slope_rho", sl.slope_rho},
                           {"residual_slope_omega", sl.slope_omega}};
    if (c.format == "json") {
        meta["rho"] = t.rho_coeffs;
        meta["omega"] = t.omega_coeffs;
        meta["P"] = t.p_coeffs;
        write_atomic(out_path(c, "expand.json"), meta.dump(2) + "\n");
    } else {
        std::string csv = "N,rho_N,omega_N,P_N\n";
        for (int n = 0; n <= t.order; ++n)
            csv += std::to_string(n) + ',' + format_double(t.rho_coeffs[n]) + ',' + format_double(t.omega_coeffs[n])
                + ',' + format_double(t.p_coeffs[n]) + '\n';
        write_atomic(out_path(c, "expand.csv"), csv);
        write_atomic(out_path(c, "expand_meta.json"), meta.dump(2) + "\n");
    }
    std::cout << "y*=" << format_double(ys) << " radius=" << format_double(t.radius)
              << " slopes=" << format_double(sl.slope_rho) << ',' << format_double(sl.slope_omega) << '\n';
    return ExitOk;
}

int cmd_solve(const Config& c)
{
    const PolytropicIndex g(c.gamma);
    const ShootResult res = find_critical(g, shoot_options(c));
    const auto summary = solve_summary(res, g);
    if (c.format == "json") {
        nlohmann::json prof = nlohmann::json::object();
        for (const char* k : {"y", "rho", "omega", "u", "G", "h"})
            prof[k] = nlohmann::json::array();
        for (const auto& s : res.global.samples) {
            prof["y"].push_back(s.y);
            prof["rho"].push_back(s.rho);
            prof["omega"].push_back(s.omega);
            prof["u"].push_back(s.u);
            prof["G"].push_back(s.G);
            prof["h"].push_back(s.h);
        }
        write_atomic(out_path(c, "profile.json"), prof.dump() + "\n");
    } else {
        write_atomic(out_path(c, "profile.csv"), profile_csv(res.global.samples));
    }
    write_atomic(out_path(c, "summary.json"), summary.dump(2) + "\n");
    std::cout << "y*_bar=" << format_double(res.y_star_bar) << " k1=" << format_double(res.fit.k1_bar)
              << " k2=" << format_double(res.fit.k2_bar) << '\n';
    for (const auto& e : res.report.entries)
        std::cout << "  " << e.name << ' ' << (e.pass ? "pass" : "FAIL") << '\n';
    return res.report.all_pass() ? ExitOk : ExitVerification;
}

int cmd_plotdata(const Config& c)
{
    std::vector<double> gammas = c.gammas.empty() ? std::vector<double>{1.0, 10.0 / 9.0, c.gamma} : c.gammas;
    if (c.points < 2)
        throw ParameterError("points must be at least 2");
    for (double g : gammas)
        if (g != 1.0)
            (void)PolytropicIndex(g);

    nlohmann::json all = {{"schema_version", schema_version}, {"gammas", nlohmann::json::array()}};
    const int n = c.points;
    for (double g : gammas) {
        const bool iso = g == 1.0;
        const double lo = (4 - 3 * g) / 3, hi = 2 - g;
        std::vector<double> w(n), r1(n), r2(n), lw(n), lf(n);
#pragma omp parallel for
        for (int i = 0; i < n; ++i) {
            w[i] = lo + (hi - lo) * i / (n - 1);
            if (iso) {
                r1[i] = r1_isothermal_limit(w[i]);
                r2[i] = r2_isothermal_limit(w[i]);
            } else {
                const auto b = branch_pair(w[i], g);
                r1[i] = b.R1;
                r2[i] = b.R2;
            }
            // the level set h = 0 is rho = f1(omega); show it on a wider omega range
            lw[i] = 0.5 * lo + (hi - 0.5 * lo) * i / (n - 1);
            lf[i] = formula::f1<double>(lw[i], g);
        }
        const std::string tag = format_double(g);
        if (c.format == "json") {
            all["gammas"].push_back({{"gamma", g},
                                     {"closed_form", iso},
                                     {"omega0", w},
                                     {"R1", r1},
                                     {"R2", r2},
                                     {"levelset_omega", lw},
                                     {"levelset_rho", lf}});
        } else {
            std::string b = "omega0,R1,R2\n", l = "omega,rho\n";
            for (int i = 0; i < n; ++i) {
                b += format_double(w[i]) + ',' + format_double(r1[i]) + ',' + format_double(r2[i]) + '\n';
                l += format_double(lw[i]) + ',' + format_double(lf[i]) + '\n';
            }
            write_atomic(out_path(c, "branches_" + tag + ".csv"), b);
            write_atomic(out_path(c, "levelset_" + tag + ".csv"), l);
        }
    }
    if (c.format == "json")
        write_atomic(out_path(c, "plotdata.json"), all.dump(2) + "\n");
    std::cout << "plot data for " << gammas.size() << " values of gamma\n";
    return ExitOk;
}

std::vector<double> log_grid(double a, double b, int n)
{
    if (!(a > 0.0 && b > a) || n < 2)
        throw ParameterError("radius grid needs 0 < r-min < r-max and r-count >= 2");
    std::vector<double> r(n);
    for (int i = 0; i < n; ++i)
        r[i] = a * std::pow(b / a, static_cast<double>(i) / (n - 1));
    return r;
}

int cmd_physical(const Config& c)
{
    const PolytropicIndex g(c.gamma);
    if (!(c.t < 0.0))
        throw ParameterError("t must be negative");
    const auto r = log_grid(c.r_min, c.r_max, c.r_count);
    std::vector<Sample> samples;
    if (!c.profile.empty())
        samples = parse_profile_csv(read_file(c.profile));
    else
        samples = find_critical(g, shoot_options(c)).global.samples;
    const ProfileInterpolant p(samples, g);
    const auto rows = physical_fields(p, g, c.t, c.kappa, r);

    if (c.format == "json") {
        nlohmann::json j = {{"schema_version", schema_version}, {"gamma", c.gamma}, {"t", c.t}, {"kappa", c.kappa}};
        nlohmann::json a = nlohmann::json::array();
        for (const auto& x : rows)
            a.push_back({{"r", x.r}, {"y", x.y}, {"rho", x.rho}, {"u", x.u}, {"m", x.m}, {"extrapolated", x.extrapolated}});
        j["rows"] = a;
        write_atomic(out_path(c, "physical.json"), j.dump(2) + "\n");
    } else {
        std::string csv = "r,y,rho,u,m,extrapolated\n";
        for (const auto& x : rows)
            csv += format_double(x.r) + ',' + format_double(x.y) + ',' + format_double(x.rho) + ','
                + format_double(x.u) + ',' + format_double(x.m) + ',' + (x.extrapolated ? "1" : "0") + '\n';
        write_atomic(out_path(c, "physical.csv"), csv);
    }
    int flagged = 0;
    for (const auto& x : rows)
        flagged += x.extrapolated;
    std::cout << rows.size() << " rows, " << flagged << " extrapolated\n";
    return ExitOk;
}

} // namespace

int run(int argc, const char* const* argv)
{
    Config c;
    CLI::App app{"Yahil self-similar collapse profiles and interval certificates"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--gamma", c.gamma, "polytropic index in (1, 4/3)");
    app.add_option("--out", c.out, "output directory");
    app.add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--tol-scale", c.tol_scale, "scale every certificate tolerance")->check(CLI::PositiveNumber);
    app.add_option("--tol-rtol", c.tol_rtol, "integrator relative tolerance")->check(CLI::PositiveNumber);
    app.add_option("--tol-ystar", c.tol_ystar, "bisection bracket width, 0 for one ulp")->check(CLI::NonNegativeNumber);

    auto* certify = app.add_subcommand("certify", "run the interval certificate suite");
    certify->add_flag("--serial", c.serial, "evaluate certificates one at a time");
    certify->add_option("--max-iter", c.max_iter, "branch and bound iteration cap per certificate");
    certify->add_option("--corrupt", c.corrupt, "")->group("");

    auto* expand = app.add_subcommand("expand", "Taylor expansion at a sonic point");
    expand->add_option("--y-star", c.y_star, "sonic point: a number, yf, yF or mid");
    expand->add_option("--n-max", c.n_max, "expansion order");

    auto* solve = app.add_subcommand("solve", "shoot for the critical sonic point and build the global profile");
    solve->add_option("--n-max", c.n_max, "expansion order");
    solve->add_option("--y-min-factor", c.y_min_factor, "inner end as a multiple of y*");
    solve->add_option("--y-max-factor", c.y_max_factor, "outer end as a multiple of y*");
    solve->add_flag("--soft-monitors", c.soft_monitors, "record right-side monitor violations as warnings");

    auto* plot = app.add_subcommand("plotdata", "branch curves and h = 0 level sets");
    plot->add_option("--gammas", c.gammas, "values of gamma; 1 gives the isothermal closed form");
    plot->add_option("--points", c.points, "samples per curve");

    auto* phys = app.add_subcommand("physical", "fields in physical variables at a fixed time");
    phys->add_option("--t", c.t, "time before collapse, negative");
    phys->add_option("--kappa", c.kappa, "pressure constant");
    phys->add_option("--r-min", c.r_min);
    phys->add_option("--r-max", c.r_max);
    phys->add_option("--r-count", c.r_count);
    phys->add_option("--profile", c.profile, "profile CSV from solve; solved afresh when omitted");
    phys->add_option("--n-max", c.n_max, "expansion order");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ExitOk : ExitUsage;
    }

    apply_thread_env();
    try {
        if (!certify->parsed() && !plot->parsed())
            (void)PolytropicIndex(c.gamma);
        if (certify->parsed())
            return cmd_certify(c);
        if (expand->parsed())
            return cmd_expand(c);
        if (solve->parsed())
            return cmd_solve(c);
        if (plot->parsed())
            return cmd_plotdata(c);
        return cmd_physical(c);
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return ExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "verification failure: " << e.what() << '\n';
        return ExitVerification;
    }
}

int run(const std::vector<std::string>& args)
{
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("yahil");
    for (const auto& a : args)
        argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

} // namespace yahil
