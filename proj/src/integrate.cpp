#include "yahil/integrate.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

namespace yahil {

MonitorViolation::MonitorViolation(const std::string& which, double y_)
    : std::runtime_error([&] {
          std::ostringstream os;
          os.precision(17);
          os << "monitor violated: " << which << " at y=" << y_;
          return os.str();
      }()),
      inequality(which), y(y_)
{
}

const char* to_string(Terminal t)
{
    switch (t) {
    case Terminal::ReachedYmax: return "ReachedYmax";
    case Terminal::FriedmanCrossing: return "FriedmanCrossing";
    case Terminal::SonicApproach: return "SonicApproach";
    case Terminal::OriginReached: return "OriginReached";
    case Terminal::StepFailure: return "StepFailure";
    }
    return "?";
}

Sample make_sample(double y, FlowState s, PolytropicIndex gamma)
{
    return {y, s.rho, s.omega, velocity(y, s.omega, gamma), G(y, s, gamma), h(s, gamma)};
}

Derivative rhs(double y, FlowState s, PolytropicIndex gamma, double eps_G)
{
    const double sound = formula::sound_term<double>(s.rho, gamma);
    const double g = G(y, s, gamma);
    if (!(std::abs(g) >= eps_G * sound)) {
        std::ostringstream os;
        os.precision(17);
        os << "sonic guard at y=" << y << ": G=" << g;
        throw SonicGuardError(os.str());
    }
    const double hh = h(s, gamma);
    const double c = 4.0 - 3.0 * gamma;
    return {y * s.rho * hh / g, (c - 3.0 * s.omega) / y - y * s.omega * hh / g};
}

namespace {

// State (ln y, rho, omega) advanced in the regularized time tau with
// dy/dtau = -y G. The sign flip at G = 0 is absorbed, so the same field runs
// both sides and stays finite through a sonic approach.
using V3 = std::array<double, 3>;

struct Field {
    double g, g1, c, b, four_pi_c, sigma = 1.0;

    explicit Field(double gamma)
        : g(gamma), g1(gamma - 1.0), c(4.0 - 3.0 * gamma), b(2.0 - gamma),
          four_pi_c(4.0 * std::numbers::pi / (4.0 - 3.0 * gamma))
    {
    }

    V3 operator()(const V3& x) const
    {
        const double y = std::exp(x[0]), rho = x[1], w = x[2];
        const double y2 = y * y;
        const double G = g * std::pow(rho, g1) - y2 * w * w;
        const double h = 2.0 * w * w + g1 * w - four_pi_c * rho * w + g1 * b;
        return {-sigma * G, -sigma * y2 * rho * h, sigma * (-(c - 3.0 * w) * G + y2 * w * h)};
    }
};

struct Dense {
    V3 r0, r1, r2, r3, r4;

    V3 at(double th) const
    {
        const double th1 = 1.0 - th;
        V3 out;
        for (int i = 0; i < 3; ++i)
            out[i] = r0[i] + th * (r1[i] + th1 * (r2[i] + th * (r3[i] + th1 * r4[i])));
        return out;
    }
};

// positive while running; the event fires when the value reaches zero
using EventFn = std::function<double(const V3&)>;

// called once per accepted step with the dense interpolant and the fraction
// of the step actually kept (1 unless an event cut it short)
using Observer = std::function<void(const Dense&, double theta_end, const V3& x_end)>;

struct RunResult {
    V3 x{};
    int event = -1;
    int steps = 0;
};

RunResult run_dopri(const Field& f, V3 x, const std::vector<EventFn>& events, const Observer& obs,
                    const IntegrateOptions& opts)
{
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                     a76 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;
    constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                     d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                     d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

    RunResult res;
    for (std::size_t i = 0; i < events.size(); ++i)
        if (!(events[i](x) > 0.0)) {
            res.x = x;
            res.event = static_cast<int>(i);
            return res;
        }

    const double atol[3] = {opts.rtol, 1e-300, 1e-300};
    V3 k1 = f(x);
    auto log_cap = [&](const V3& k) {
        const double rate = std::abs(k[0]);
        return rate > 0.0 ? opts.max_log_step / rate : std::numeric_limits<double>::infinity();
    };
    double h = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
        const double scale = std::max(std::abs(x[i]), i == 0 ? 1.0 : 0.0);
        if (k1[i] != 0.0)
            h = std::min(h, 1e-3 * scale / std::abs(k1[i]));
    }
    h = std::min(h, log_cap(k1));
    if (!std::isfinite(h) || h <= 0.0)
        throw StepFailure("cannot choose an initial step: flow field vanishes or is not finite");

    int rejects = 0;
    while (true) {
        if (res.steps >= opts.max_steps) {
            std::ostringstream os;
            os.precision(17);
            os << "step cap " << opts.max_steps << " reached at y=" << std::exp(x[0]);
            throw StepFailure(os.str());
        }
        h = std::min(h, log_cap(k1));
        V3 t, k2, k3, k4, k5, k6, k7, xn;
        for (int i = 0; i < 3; ++i) t[i] = x[i] + h * a21 * k1[i];
        k2 = f(t);
        for (int i = 0; i < 3; ++i) t[i] = x[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = f(t);
        for (int i = 0; i < 3; ++i) t[i] = x[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = f(t);
        for (int i = 0; i < 3; ++i) t[i] = x[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = f(t);
        for (int i = 0; i < 3; ++i)
            t[i] = x[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        k6 = f(t);
        for (int i = 0; i < 3; ++i)
            xn[i] = x[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        k7 = f(xn);

        double err = 0.0;
        bool finite = true;
        for (int i = 0; i < 3; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = atol[i] + opts.rtol * std::max(std::abs(x[i]), std::abs(xn[i]));
            finite = finite && std::isfinite(xn[i]) && std::isfinite(e);
            err = std::max(err, std::abs(e) / sc);
        }
        if (!finite || xn[1] <= 0.0)
            err = std::numeric_limits<double>::infinity();

        if (err > 1.0) {
            if (++rejects > 60) {
                std::ostringstream os;
                os.precision(17);
                os << "step size collapse at y=" << std::exp(x[0]) << " rho=" << x[1] << " omega=" << x[2]
                   << " (tau step " << h << ")";
                throw StepFailure(os.str());
            }
            h *= std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
            continue;
        }
        rejects = 0;
        ++res.steps;

        Dense dn;
        for (int i = 0; i < 3; ++i) {
            const double ydiff = xn[i] - x[i];
            const double bspl = h * k1[i] - ydiff;
            dn.r0[i] = x[i];
            dn.r1[i] = ydiff;
            dn.r2[i] = bspl;
            dn.r3[i] = ydiff - h * k7[i] - bspl;
            dn.r4[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }

        double theta = 2.0;
        int fired = -1;
        for (std::size_t i = 0; i < events.size(); ++i) {
            const double vb = events[i](xn);
            if (vb > 0.0)
                continue;
            const double va = events[i](x);
            double th = 1.0;
            if (vb < 0.0) {
                auto fn = [&](double s) { return events[i](dn.at(s)); };
                std::uintmax_t iters = 200;
                const auto r = boost::math::tools::toms748_solve(fn, 0.0, 1.0, va, vb,
                                                                 boost::math::tools::eps_tolerance<double>(52), iters);
                th = 0.5 * (r.first + r.second);
            }
            if (th < theta) {
                theta = th;
                fired = static_cast<int>(i);
            }
        }
        if (fired >= 0) {
            const V3 xe = dn.at(theta);
            if (obs)
                obs(dn, theta, xe);
            res.x = xe;
            res.event = fired;
            return res;
        }
        if (obs)
            obs(dn, 1.0, xn);
        x = xn;
        k1 = k7;
        const double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 10.0;
        h *= std::clamp(fac, 0.2, 10.0);
    }
}

V3 to_state(double y, FlowState s)
{
    return {std::log(y), s.rho, s.omega};
}

FlowState flow(const V3& x)
{
    return {x[1], x[2]};
}

void append(Profile& p, const V3& x, PolytropicIndex gamma)
{
    p.samples.push_back(make_sample(std::exp(x[0]), flow(x), gamma));
}

void fill_dense(Profile& p, const Dense& dn, double theta_end, int n, PolytropicIndex gamma)
{
    for (int j = 1; j <= n; ++j)
        append(p, dn.at(theta_end * j / (n + 1)), gamma);
}

// The crossing happened before the integrator's start point: locate it on the series.
double series_crossing(const TaylorLocal& t, double omega_F)
{
    const double ys = t.seed.y_star;
    if (t.seed.omega0 <= omega_F)
        return ys;
    const double a = ys - 0.5 * t.radius;
    auto fn = [&](double y) { return eval_taylor(t, y).state.omega - omega_F; };
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(fn, a, ys, boost::math::tools::eps_tolerance<double>(52), iters);
    return 0.5 * (r.first + r.second);
}

} // namespace

Profile integrate_between(double y0, FlowState s0, double y1, PolytropicIndex gamma, const IntegrateOptions& opts)
{
    Field f(gamma);
    const double G0 = G(y0, s0, gamma);
    const bool up = y1 > y0;
    // dL/dtau = -sigma G must carry y toward y1
    f.sigma = ((G0 < 0.0) == up) ? 1.0 : -1.0;
    const double L1 = std::log(y1);
    const double eps_G = opts.eps_G;
    std::vector<EventFn> ev{
        [=](const V3& x) { return up ? L1 - x[0] : x[0] - L1; },
        // signed, so a sign change of G inside one step is still caught
        [g = f.g, g1 = f.g1, eps_G, side = G0 < 0.0 ? -1.0 : 1.0](const V3& x) {
            const double y = std::exp(x[0]);
            const double sound = g * std::pow(x[1], g1);
            return side * (sound - y * y * x[2] * x[2]) / sound - eps_G;
        },
    };
    Profile p;
    p.direction = up ? Direction::Right : Direction::Left;
    p.samples.push_back(make_sample(y0, s0, gamma));
    const int n = opts.dense_per_step;
    auto obs = [&](const Dense& dn, double th, const V3& xe) {
        fill_dense(p, dn, th, n, gamma);
        append(p, xe, gamma);
    };
    const auto r = run_dopri(f, to_state(y0, s0), ev, obs, opts);
    p.steps = r.steps;
    if (r.event == 1) {
        p.terminal = Terminal::SonicApproach;
        p.sonic_s = std::exp(r.x[0]);
        throw SonicGuardError("sonic guard fired between the requested endpoints");
    }
    p.samples.back().y = y1;
    p.terminal = up ? Terminal::ReachedYmax : Terminal::OriginReached;
    return p;
}

double handoff_check(const TaylorLocal& t, Direction d, PolytropicIndex gamma, const IntegrateOptions& opts)
{
    const double sgn = d == Direction::Right ? 1.0 : -1.0;
    const double ys = t.seed.y_star;
    const double y0 = ys + sgn * 0.25 * t.radius;
    const double y1 = ys + sgn * 0.5 * t.radius;
    IntegrateOptions o = opts;
    o.dense_per_step = std::max(opts.dense_per_step, 8);
    o.max_log_step = std::min(opts.max_log_step, 0.05 * t.radius / ys);
    Profile p;
    try {
        p = integrate_between(y0, eval_taylor(t, y0).state, y1, gamma, o);
    } catch (const SonicGuardError& e) {
        throw HandoffError(std::string("handoff integration hit the sonic guard: ") + e.what());
    }
    double worst = 0.0;
    for (const auto& s : p.samples) {
        const auto e = eval_taylor(t, s.y).state;
        worst = std::max({worst, std::abs(s.rho - e.rho) / std::abs(e.rho), std::abs(s.omega - e.omega) / std::abs(e.omega)});
    }
    if (!(worst <= opts.handoff_tol)) {
        std::ostringstream os;
        os.precision(6);
        os << "series/integrator mismatch " << worst << " exceeds " << opts.handoff_tol << " on the "
           << (d == Direction::Right ? "right" : "left") << " of y*=" << ys;
        throw HandoffError(os.str());
    }
    return worst;
}

double handoff_check(const TaylorLocal& t, const Profile& p, PolytropicIndex gamma, const IntegrateOptions& opts)
{
    return handoff_check(t, p.direction, gamma, opts);
}

Profile extend_left(const TaylorLocal& t, double y_min_floor, PolytropicIndex gamma, const IntegrateOptions& opts)
{
    const double ys = t.seed.y_star;
    const double omega_F = (4.0 - 3.0 * gamma) / 3.0;
    const double y0 = ys - 0.5 * t.radius;
    const FlowState s0 = eval_taylor(t, y0).state;

    Profile p;
    p.direction = Direction::Left;
    if (opts.check_handoff)
        p.handoff = handoff_check(t, Direction::Left, gamma, opts);
    p.samples.push_back(make_sample(y0, s0, gamma));

    if (s0.omega <= omega_F) {
        p.terminal = Terminal::FriedmanCrossing;
        p.y_c = series_crossing(t, omega_F);
        p.samples.clear();
        p.samples.push_back(make_sample(p.y_c, eval_taylor(t, p.y_c).state, gamma));
        return p;
    }
    if (y0 <= y_min_floor) {
        p.terminal = Terminal::OriginReached;
        return p;
    }

    Field f(gamma);
    const double Lmin = std::log(y_min_floor);
    const double eps_G = opts.eps_G;
    std::vector<EventFn> ev{
        [=](const V3& x) { return x[2] - omega_F; },
        [g = f.g, g1 = f.g1, eps_G](const V3& x) {
            const double y = std::exp(x[0]);
            const double sound = g * std::pow(x[1], g1);
            return (sound - y * y * x[2] * x[2]) / sound - eps_G;
        },
        [=](const V3& x) { return x[0] - Lmin; },
    };
    const int n = opts.dense_per_step;
    auto obs = [&](const Dense& dn, double th, const V3& xe) {
        fill_dense(p, dn, th, n, gamma);
        append(p, xe, gamma);
        const auto& s = p.samples.back();
        if (s.omega > omega_F && !(s.h < 0.0) && !p.h_sign_flag) {
            p.h_sign_flag = true;
            p.h_sign_y = s.y;
        }
    };
    const auto r = run_dopri(f, to_state(y0, s0), ev, obs, opts);
    p.steps = r.steps;
    const double y_end = std::exp(r.x[0]);
    switch (r.event) {
    case 0:
        p.terminal = Terminal::FriedmanCrossing;
        p.y_c = y_end;
        p.samples.back().omega = omega_F;
        break;
    case 1:
        p.terminal = Terminal::SonicApproach;
        p.sonic_s = y_end;
        p.G_min = p.samples.back().G;
        break;
    case 2:
        p.terminal = Terminal::OriginReached;
        p.samples.back() = make_sample(y_min_floor, flow(r.x), gamma);
        break;
    default:
        throw StepFailure("left integration ended without a terminal event");
    }
    return p;
}

AsymptoticFit fit_asymptotics(const Profile& right, PolytropicIndex gamma)
{
    AsymptoticFit fit;
    if (right.samples.size() < 2)
        return fit;
    const double b = 2.0 - gamma;
    fit.y_hi = right.samples.back().y;
    fit.y_lo = fit.y_hi / 10.0;
    std::vector<double> q1, q2;
    const Sample* first = nullptr;
    for (const auto& s : right.samples) {
        if (s.y < fit.y_lo)
            continue;
        if (!first)
            first = &s;
        q1.push_back(std::pow(s.y, 1.0 / b) * (b - s.omega));
        q2.push_back(std::pow(s.y, 2.0 / b) * s.rho);
    }
    auto mean = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m += x;
        return m / static_cast<double>(v.size());
    };
    fit.k1_bar = mean(q1);
    fit.k2_bar = mean(q2);
    double res = 0.0;
    // on the far-field seed omega is 2-g to round-off and k1 carries no signal
    const bool k1_signal = std::abs(fit.k1_bar) > 1e-8 * b * std::pow(fit.y_hi, 1.0 / b);
    for (std::size_t i = 0; i < q1.size(); ++i) {
        if (k1_signal)
            res = std::max(res, std::abs(q1[i] / fit.k1_bar - 1.0));
        res = std::max(res, std::abs(q2[i] / fit.k2_bar - 1.0));
    }
    fit.residual = res;
    const auto& last = right.samples.back();
    const double m1 = local_mass(first->y, {first->rho, first->omega}, gamma);
    const double m2 = local_mass(last.y, {last.rho, last.omega}, gamma);
    fit.mass_log_slope = std::log(m2 / m1) / std::log(last.y / first->y);
    return fit;
}

RightResult extend_right(const TaylorLocal& t, double y_max, PolytropicIndex gamma, const IntegrateOptions& opts)
{
    const double ys = t.seed.y_star;
    if (!(y_max >= 1e3 * ys))
        throw ParameterError("right extension needs y_max >= 1e3 y*");
    const double y0 = ys + 0.5 * t.radius;
    const FlowState s0 = eval_taylor(t, y0).state;

    RightResult out;
    Profile& p = out.profile;
    p.direction = Direction::Right;
    if (opts.check_handoff)
        p.handoff = handoff_check(t, Direction::Right, gamma, opts);
    p.samples.push_back(make_sample(y0, s0, gamma));

    const double g = gamma, c = 4.0 - 3.0 * g, b = 2.0 - g, omega_F = c / 3.0;
    const double dband = opts.monitor_deadband;
    auto violated = [&](const char* name, double y) {
        if (opts.hard_monitors)
            throw MonitorViolation(name, y);
        const std::string msg = std::string("monitor ") + name;
        if (std::find(p.warnings.begin(), p.warnings.end(), msg) == p.warnings.end())
            p.warnings.push_back(msg);
    };
    auto monitor = [&](const Sample& s) {
        const double y = s.y, rho = s.rho, w = s.omega;
        const double sound = g * std::pow(rho, g - 1.0);
        if (!(w - omega_F > -dband * omega_F))
            violated("(4-3g)/3 < omega", y);
        if (!(b - w > -dband * b))
            violated("omega < 2-g", y);
        const double A = 4.0 * std::numbers::pi * y * y * rho * w / c, B = 2.0 / b * sound;
        if (!(A - B > -dband * (A + B)))
            violated("4 pi y^2 rho omega/(4-3g) > 2 g rho^(g-1)/(2-g)", y);
        if (!(s.G < dband * (sound + y * y * w * w)))
            violated("G < 0", y);
        const double hG = y * s.h / s.G;
        const double slope = y * hG;  // rho' y / rho
        const double lo = -4.0 / (c * b), hi = -1.0 / b;
        if (!(slope > lo - dband * std::abs(lo)) || !(slope < hi + dband * std::abs(hi)))
            violated("-4/((4-3g)(2-g)) < rho' y/rho < -1/(2-g)", y);
        const double t1 = (c - 3.0 * w) / y, t2 = w * hG;
        if (!(t1 - t2 > -dband * (std::abs(t1) + std::abs(t2))))
            violated("omega' > 0", y);
        if (!(slope < dband))
            violated("rho' < 0", y);
    };
    monitor(p.samples.front());

    Field f(gamma);
    const double Lmax = std::log(y_max);
    const double eps_G = opts.eps_G;
    std::vector<EventFn> ev{
        [=](const V3& x) { return Lmax - x[0]; },
        [g1 = f.g1, g, eps_G](const V3& x) {
            const double y = std::exp(x[0]);
            const double sound = g * std::pow(x[1], g1);
            return (y * y * x[2] * x[2] - sound) / sound - eps_G;
        },
    };
    const int n = opts.dense_per_step;
    auto obs = [&](const Dense& dn, double th, const V3& xe) {
        fill_dense(p, dn, th, n, gamma);
        append(p, xe, gamma);
        monitor(p.samples.back());
    };
    const auto r = run_dopri(f, to_state(y0, s0), ev, obs, opts);
    p.steps = r.steps;
    if (r.event == 0) {
        p.terminal = Terminal::ReachedYmax;
        p.samples.back() = make_sample(y_max, flow(r.x), gamma);
    } else {
        p.terminal = Terminal::SonicApproach;
        p.sonic_s = std::exp(r.x[0]);
        violated("G < 0", p.sonic_s);
    }
    out.fit = fit_asymptotics(p, gamma);
    return out;
}

} // namespace yahil
