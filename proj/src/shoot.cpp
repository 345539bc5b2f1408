#include "yahil/shoot.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <sstream>

namespace yahil {

const char* to_string(Classification c)
{
    switch (c) {
    case Classification::CrossesFriedman: return "CrossesFriedman";
    case Classification::SonicFirst: return "SonicFirst";
    case Classification::OriginFirst: return "OriginFirst";
    }
    return "?";
}

ShootAmbiguity::ShootAmbiguity(const std::string& what, std::vector<double> grid_,
                               std::vector<Classification> classes_)
    : std::runtime_error(what), grid(std::move(grid_)), classes(std::move(classes_))
{
}

bool InvariantReport::all_pass() const
{
    return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.pass; });
}

const InvariantEntry& InvariantReport::at(const std::string& name) const
{
    for (const auto& e : entries)
        if (e.name == name)
            return e;
    throw std::out_of_range("no invariant named " + name);
}

Profile left_profile(double y_star, PolytropicIndex gamma, const ShootOptions& opts)
{
    const auto t = build_taylor(make_seed(y_star, gamma), opts.n_max, gamma);
    return extend_left(t, opts.y_min_factor * y_star, gamma, opts.integ);
}

Classification classify(const Profile& left)
{
    switch (left.terminal) {
    case Terminal::FriedmanCrossing: return Classification::CrossesFriedman;
    case Terminal::SonicApproach: return Classification::SonicFirst;
    case Terminal::OriginReached: return Classification::OriginFirst;
    default: throw StepFailure("left profile has no classifiable terminal event");
    }
}

Classification classify(double y_star, PolytropicIndex gamma, const ShootOptions& opts)
{
    return classify(left_profile(y_star, gamma, opts));
}

std::vector<Classification> classify_sweep_serial(const std::vector<double>& ys, PolytropicIndex gamma,
                                                  const ShootOptions& opts)
{
    std::vector<Classification> out;
    out.reserve(ys.size());
    for (double y : ys)
        out.push_back(classify(y, gamma, opts));
    return out;
}

std::vector<Classification> classify_sweep(const std::vector<double>& ys, PolytropicIndex gamma,
                                           const ShootOptions& opts)
{
    if (!opts.parallel)
        return classify_sweep_serial(ys, gamma, opts);
    std::vector<Classification> out(ys.size());
    std::exception_ptr err;
    const long n = static_cast<long>(ys.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        try {
            out[i] = classify(ys[i], gamma, opts);
        } catch (...) {
#pragma omp critical(yahil_sweep_error)
            if (!err)
                err = std::current_exception();
        }
    }
    if (err)
        std::rethrow_exception(err);
    return out;
}

namespace {

std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = a + (b - a) * i / (n - 1);
    v.front() = a;
    v.back() = b;
    return v;
}

bool crosses(Classification c)
{
    return c == Classification::CrossesFriedman;
}

} // namespace

ShootResult find_critical(PolytropicIndex gamma, const ShootOptions& opts)
{
    const auto w = sonic_window(gamma);
    if (opts.tol_ystar != 0.0 && !(opts.tol_ystar >= 1e-13 * (w.y_F - w.y_f)))
        throw ParameterError("tol_ystar must be at least 1e-13 (y_F - y_f)");
    if (opts.coarse_grid < 3 || opts.fine_grid < 3)
        throw ParameterError("sweep grids need at least 3 points");

    ShootResult res;
    res.grid = linspace(w.y_f, w.y_F, opts.coarse_grid);
    res.grid_classes = classify_sweep(res.grid, gamma, opts);
    if (!crosses(res.grid_classes.back()) || crosses(res.grid_classes.front()))
        throw ShootAmbiguity("crossing predicate does not separate the sonic window endpoints", res.grid,
                             res.grid_classes);

    // the crossing set may have components away from y_F; the critical point
    // is the lower edge of the one adjacent to y_F
    int k = opts.coarse_grid - 1;
    while (k > 0 && crosses(res.grid_classes[k - 1]))
        --k;
    double lo = res.grid[k - 1], hi = res.grid[k];

    const auto fine = linspace(lo, hi, opts.fine_grid);
    std::vector<Classification> fc = classify_sweep(fine, gamma, opts);
    fc.front() = res.grid_classes[k - 1];
    fc.back() = res.grid_classes[k];
    int changes = 0, cell = -1;
    for (int i = 0; i + 1 < opts.fine_grid; ++i)
        if (crosses(fc[i]) != crosses(fc[i + 1])) {
            ++changes;
            cell = i;
        }
    if (changes != 1) {
        std::ostringstream os;
        os << "crossing predicate changes " << changes << " times inside [" << lo << ", " << hi << "]";
        throw ShootAmbiguity(os.str(), fine, fc);
    }
    lo = fine[cell];
    hi = fine[cell + 1];

    Profile hi_prof = left_profile(hi, gamma, opts);
    res.trace.push_back({hi, hi_prof.y_c});
    while (true) {
        if (opts.tol_ystar > 0.0 && hi - lo <= opts.tol_ystar)
            break;
        const double mid = lo + 0.5 * (hi - lo);
        if (!(mid > lo && mid < hi))
            break;
        Profile p = left_profile(mid, gamma, opts);
        ++res.iterations;
        if (crosses(classify(p))) {
            hi = mid;
            hi_prof = std::move(p);
            res.trace.push_back({hi, hi_prof.y_c});
        } else {
            lo = mid;
        }
    }
    res.y_lo = lo;
    res.y_hi = hi;
    res.y_star_bar = lo + 0.5 * (hi - lo);
    res.hi_profile = std::move(hi_prof);

    // the non-crossing endpoint carries the profile all the way to y_min;
    // at the crossing endpoint the crossing still sits at y_c > 0
    Profile lo_prof = left_profile(lo, gamma, opts);
    if (lo_prof.terminal == Terminal::OriginReached) {
        res.y_assembled = lo;
        res.left_profile = std::move(lo_prof);
    } else {
        res.y_assembled = hi;
        res.left_profile = res.hi_profile;
    }
    res.taylor = build_taylor(make_seed(res.y_assembled, gamma), opts.n_max, gamma);
    auto right = extend_right(res.taylor, opts.y_max_factor * res.y_assembled, gamma, opts.integ);
    res.right_profile = std::move(right.profile);
    res.fit = right.fit;
    res.global = assemble_global(res, gamma, opts, &res.origin);
    res.report = verify_invariants(res.global, gamma, opts);
    ShootOptions raw = opts;
    raw.origin_match = false;
    res.raw_report = verify_invariants(assemble_global(res, gamma, raw), gamma, opts);
    return res;
}

Profile origin_branch(double rho_c, double y0, double y1, PolytropicIndex gamma, const IntegrateOptions& opts)
{
    const double g = gamma, omega_F = (4.0 - 3.0 * g) / 3.0;
    const double hc = -4.0 * std::numbers::pi / 3.0 * (rho_c - 1.0 / (6.0 * std::numbers::pi));
    const double r2 = rho_c * hc / (2.0 * g * std::pow(rho_c, g - 1.0));
    const double w2 = -2.0 * r2 * omega_F / (5.0 * rho_c);
    const FlowState s0{rho_c + r2 * y0 * y0, omega_F + w2 * y0 * y0};
    return integrate_between(y0, s0, y1, gamma, opts);
}

OriginMatch match_origin(const Profile& left, double y_min, double y_match, PolytropicIndex gamma,
                         const IntegrateOptions& opts)
{
    // carry the inward profile from its last sample above y_match onto y_match
    const Sample* from = nullptr;
    for (const auto& s : left.samples)
        if (s.y > y_match)
            from = &s;
    if (!from)
        throw InternalError("profile does not reach above the matching point");
    const Profile hop = integrate_between(from->y, {from->rho, from->omega}, y_match, gamma, opts);
    const FlowState target{hop.samples.back().rho, hop.samples.back().omega};

    OriginMatch m;
    m.y_match = y_match;
    auto miss = [&](double rho_c) {
        return origin_branch(rho_c, y_min, y_match, gamma, opts).samples.back().rho / target.rho - 1.0;
    };
    double x0 = left.samples.back().y <= y_match ? left.samples.back().rho : target.rho;
    double x1 = x0 * (1.0 + 1e-6);
    double f0 = miss(x0), f1 = miss(x1);
    for (m.iterations = 2; m.iterations < 40 && f1 != 0.0 && f1 != f0; ++m.iterations) {
        const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = miss(x1);
        if (std::abs(x1 - x0) <= 4e-16 * std::abs(x1))
            break;
    }
    m.rho_c = x1;
    const Sample e = origin_branch(m.rho_c, y_min, y_match, gamma, opts).samples.back();
    m.omega_mismatch = std::abs(e.omega / target.omega - 1.0);
    return m;
}

Profile assemble_global(const ShootResult& res, PolytropicIndex gamma, const ShootOptions& opts, OriginMatch* match)
{
    const auto& t = res.taylor;
    const double ys = t.seed.y_star, nu = t.radius;
    IntegrateOptions io = opts.integ;
    io.dense_per_step = std::max(io.dense_per_step, 4);
    io.max_log_step = std::min(io.max_log_step, 0.05 * nu / ys);

    // integrator data on the overlap bands nu/4 .. nu/2, started from the series
    auto band = [&](double sgn) {
        const double y0 = ys + sgn * 0.25 * nu, y1 = ys + sgn * 0.5 * nu;
        return integrate_between(y0, eval_taylor(t, y0).state, y1, gamma, io);
    };
    const Profile lb = band(-1.0), rb = band(1.0);

    auto seam = [&](const Sample& a, const Sample& b) {
        const double d = std::max(std::abs(a.rho / b.rho - 1.0), std::abs(a.omega / b.omega - 1.0));
        if (!(d <= 1e-8)) {
            std::ostringstream os;
            os << "seam mismatch " << d << " at y=" << a.y;
            throw HandoffError(os.str());
        }
    };
    if (!res.left_profile.samples.empty())
        seam(lb.samples.back(), res.left_profile.samples.front());
    if (!res.right_profile.samples.empty())
        seam(rb.samples.back(), res.right_profile.samples.front());

    Profile g;
    g.direction = Direction::Right;
    g.terminal = res.right_profile.terminal;
    auto push = [&](const Sample& s) {
        if (g.samples.empty() || s.y > g.samples.back().y)
            g.samples.push_back(s);
    };
    double y_from = 0.0;
    if (opts.origin_match && !res.left_profile.samples.empty()) {
        const double y_min = opts.y_min_factor * ys, y_m = opts.match_factor * ys;
        if (res.left_profile.samples.back().y < y_m) {
            const OriginMatch m = match_origin(res.left_profile, y_min, y_m, gamma, io);
            if (!(m.omega_mismatch <= 1e-8)) {
                std::ostringstream os;
                os << "origin branch misses the inward profile by " << m.omega_mismatch << " in omega at y=" << y_m;
                throw HandoffError(os.str());
            }
            for (const auto& s : origin_branch(m.rho_c, y_min, y_m, gamma, io).samples)
                push(s);
            y_from = y_m;
            if (match)
                *match = m;
        }
    }
    for (auto it = res.left_profile.samples.rbegin(); it != res.left_profile.samples.rend(); ++it)
        if (it->y > y_from)
            push(*it);
    for (auto it = lb.samples.rbegin(); it != lb.samples.rend(); ++it)
        push(*it);
    constexpr int core = 33;
    for (int i = 1; i < core - 1; ++i) {
        const double y = ys + nu * (-0.25 + 0.5 * i / (core - 1));
        push(make_sample(y, eval_taylor(t, y).state, gamma));
    }
    for (const auto& s : rb.samples)
        push(s);
    for (const auto& s : res.right_profile.samples)
        push(s);
    return g;
}

InvariantReport verify_invariants(const Profile& p, PolytropicIndex gamma, const ShootOptions& opts)
{
    InvariantReport r;
    const auto& S = p.samples;
    const double b = 2.0 - gamma, omega_F = (4.0 - 3.0 * gamma) / 3.0;
    const double db = opts.deadband;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (S.size() < 2) {
        for (const char* n : {"rho_positive", "velocity_bounds", "rho_decreasing", "omega_increasing",
                              "origin_omega", "far_omega", "origin_density", "single_sonic_point"})
            r.entries.push_back({n, nan, nan, false});
        return r;
    }

    // (1) rho > 0
    {
        InvariantEntry e{"rho_positive", S[0].rho, S[0].y, true};
        for (const auto& s : S)
            if (s.rho < e.worst_value) {
                e.worst_value = s.rho;
                e.worst_y = s.y;
            }
        e.pass = e.worst_value > 0.0 && std::isfinite(e.worst_value);
        r.entries.push_back(e);
    }
    // (2) -2/3 y < u < 0 for y > y_min; worst value is the smaller margin over y
    {
        InvariantEntry e{"velocity_bounds", std::numeric_limits<double>::infinity(), nan, true};
        for (std::size_t i = 1; i < S.size(); ++i) {
            const auto& s = S[i];
            const double m = std::min(-s.u, s.u + 2.0 / 3.0 * s.y) / s.y;
            if (m < e.worst_value) {
                e.worst_value = m;
                e.worst_y = s.y;
            }
        }
        e.pass = e.worst_value > -db;
        r.entries.push_back(e);
    }
    // (3), (4) monotonicity from sample differences
    {
        InvariantEntry er{"rho_decreasing", -std::numeric_limits<double>::infinity(), nan, true};
        InvariantEntry ew{"omega_increasing", std::numeric_limits<double>::infinity(), nan, true};
        for (std::size_t i = 1; i < S.size(); ++i) {
            const double dr = (S[i].rho - S[i - 1].rho) / S[i - 1].rho;
            const double dw = (S[i].omega - S[i - 1].omega) / S[i - 1].omega;
            if (dr > er.worst_value) {
                er.worst_value = dr;
                er.worst_y = S[i].y;
            }
            if (dw < ew.worst_value) {
                ew.worst_value = dw;
                ew.worst_y = S[i].y;
            }
        }
        er.pass = er.worst_value < db;
        ew.pass = ew.worst_value > -db;
        r.entries.push_back(er);
        r.entries.push_back(ew);
    }
    // (5) omega(y_min) near the Friedman value
    {
        const double d = std::abs(S.front().omega - omega_F);
        r.entries.push_back({"origin_omega", d, S.front().y, d <= opts.origin_tol});
    }
    // (6) omega(y_max) approaches 2-g at the rate y^(-1/(2-g)): the scaled
    // defect must stay bounded over the last decade
    {
        const auto& last = S.back();
        const double y_ref = last.y / 10.0;
        const Sample* ref = &S.front();
        for (const auto& s : S)
            if (s.y <= y_ref)
                ref = &s;
        const double q_last = std::pow(last.y, 1.0 / b) * (b - last.omega);
        const double q_ref = std::pow(ref->y, 1.0 / b) * (b - ref->omega);
        const double defect = (b - last.omega) / b;
        const bool bounded = std::abs(q_last) <= 2.0 * std::abs(q_ref) + db * std::pow(last.y, 1.0 / b);
        r.entries.push_back({"far_omega", defect, last.y, defect > -db && defect < 1e-2 && bounded});
    }
    // (7) rho(y_min) finite and above the Friedman density
    {
        const double rho0 = S.front().rho;
        r.entries.push_back({"origin_density", rho0, S.front().y,
                             std::isfinite(rho0) && rho0 > 1.0 / (6.0 * std::numbers::pi)});
    }
    // (8) exactly one sign change of G, ignoring round-off sized values
    {
        int changes = 0, last_sign = 0;
        double where = nan;
        for (const auto& s : S) {
            const double scale = formula::sound_term<double>(s.rho, gamma) + s.y * s.y * s.omega * s.omega;
            if (std::abs(s.G) <= db * scale)
                continue;
            const int sg = s.G > 0 ? 1 : -1;
            if (last_sign != 0 && sg != last_sign) {
                ++changes;
                where = s.y;
            }
            last_sign = sg;
        }
        r.entries.push_back({"single_sonic_point", static_cast<double>(changes), where, changes == 1});
    }
    return r;
}

} // namespace yahil
