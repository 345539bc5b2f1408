#include "yahil/sonic.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <sstream>

namespace yahil {

namespace {

void check_window(double y_star, PolytropicIndex gamma)
{
    const auto w = sonic_window(gamma);
    const double slack = 1e-12 * w.y_F;
    if (!(y_star >= w.y_f - slack && y_star <= w.y_F + slack)) {
        std::ostringstream os;
        os.precision(17);
        os << "sonic point " << y_star << " outside [" << w.y_f << ", " << w.y_F << "]";
        throw DomainError(os.str());
    }
}

} // namespace

std::pair<double, double> solve_sonic_state(double y_star, PolytropicIndex gamma)
{
    check_window(y_star, gamma);
    return solve_sonic_state<double>(y_star, gamma.value());
}

std::pair<double, double> lph_branch(double omega0, PolytropicIndex gamma)
{
    return lph_branch<double>(omega0, gamma.value());
}

BranchPair<double> branch_pair(double omega0, double gamma)
{
    return branch_pair<double>(omega0, gamma);
}

SonicSeed make_seed(double y_star, PolytropicIndex gamma)
{
    check_window(y_star, gamma);
    return make_seed<double>(y_star, gamma.value());
}

TaylorLocal build_taylor(const SonicSeed& seed, int N_max, PolytropicIndex gamma)
{
    return build_taylor<double>(seed, N_max, gamma.value());
}

TaylorLocal build_taylor(double y_star, int N_max, PolytropicIndex gamma)
{
    return build_taylor(make_seed(y_star, gamma), N_max, gamma);
}

TaylorEval eval_taylor(const TaylorLocal& t, double y)
{
    if (!(std::abs(y - t.seed.y_star) < t.radius)) {
        std::ostringstream os;
        os.precision(17);
        os << "series evaluated at y=" << y << " outside radius " << t.radius << " around " << t.seed.y_star;
        throw DomainError(os.str());
    }
    const auto v = eval_series<double>(t, y);
    return {{v.rho, v.omega}, v.drho, v.domega};
}

double r1_isothermal_limit(double omega0)
{
    return (1.0 - 4.0 * omega0 - std::abs(1.0 - 2.0 * omega0)) / (2.0 * omega0);
}

double r2_isothermal_limit(double omega0)
{
    return (1.0 - 4.0 * omega0 + std::abs(1.0 - 2.0 * omega0)) / (2.0 * omega0);
}

ResidualSlopes series_residual_slopes(double y_star, int N_max, PolytropicIndex gamma)
{
    // the truncation residual at 1e-4 nu is of order (5e-5)^(N_max+1), far
    // below double round-off
    using Real = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<320>>;
    check_window(y_star, gamma);
    const Real g = Real(gamma.value());
    const Real ys = Real(y_star);
    const auto seed = make_seed<Real>(ys, g);
    const auto t = build_taylor<Real>(seed, N_max, g);
    const Real nu = t.radius;
    const Real c = 4 - 3 * g;

    constexpr int samples = 9;
    double xs[samples], r1[samples], r2[samples];
    for (int i = 0; i < samples; ++i) {
        const double e = -4.0 + 2.0 * i / (samples - 1);
        const Real d = nu * Real(std::pow(10.0, e));
        const Real y = ys + d;
        const auto v = eval_series<Real>(t, y);
        const Real G = formula::G<Real>(y, v.rho, v.omega, g);
        const Real h = formula::h<Real>(v.rho, v.omega, g);
        const Real res1 = G * v.drho - y * v.rho * h;
        const Real res2 = G * v.domega - (c - 3 * v.omega) / y * G + y * v.omega * h;
        xs[i] = std::log(static_cast<double>(d));
        // magnitudes below double range are carried through their logarithm
        r1[i] = static_cast<double>(log(abs(res1)));
        r2[i] = static_cast<double>(log(abs(res2)));
    }
    auto slope = [&](const double* ys_) {
        double mx = 0, my = 0;
        for (int i = 0; i < samples; ++i) {
            mx += xs[i];
            my += ys_[i];
        }
        mx /= samples;
        my /= samples;
        double sxy = 0, sxx = 0;
        for (int i = 0; i < samples; ++i) {
            sxy += (xs[i] - mx) * (ys_[i] - my);
            sxx += (xs[i] - mx) * (xs[i] - mx);
        }
        return sxy / sxx;
    };
    return {slope(r1), slope(r2)};
}

} // namespace yahil
