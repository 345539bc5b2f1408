#pragma once

#include "yahil/model.hpp"
#include "yahil/sonic.hpp"

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace yahil {

// A proven inequality failed along the numerical solution.
struct MonitorViolation : std::runtime_error {
    MonitorViolation(const std::string& which, double y);
    std::string inequality;
    double y;
};

struct HandoffError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StepFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// |G| fell under the sonic guard; the flow field is not trusted there.
struct SonicGuardError : DomainError {
    using DomainError::DomainError;
};

enum class Direction { Left, Right };

enum class Terminal { ReachedYmax, FriedmanCrossing, SonicApproach, OriginReached, StepFailure };

const char* to_string(Terminal t);

struct Sample {
    double y = 0.0;
    double rho = 0.0;
    double omega = 0.0;
    double u = 0.0;
    double G = 0.0;
    double h = 0.0;
};

Sample make_sample(double y, FlowState s, PolytropicIndex gamma);

struct Profile {
    std::vector<Sample> samples;
    Direction direction = Direction::Left;
    Terminal terminal = Terminal::StepFailure;
    double y_c = std::numeric_limits<double>::quiet_NaN();      // Friedman crossing
    double sonic_s = std::numeric_limits<double>::quiet_NaN();  // where the sonic guard fired
    double G_min = std::numeric_limits<double>::quiet_NaN();
    double handoff = std::numeric_limits<double>::quiet_NaN();  // series/integrator discrepancy
    // h >= 0 or rho' >= 0 seen on the left while omega stayed above Friedman;
    // expected only for seeds outside the crossing and sonic sets
    bool h_sign_flag = false;
    double h_sign_y = std::numeric_limits<double>::quiet_NaN();
    int steps = 0;
    std::vector<std::string> warnings;
};

struct AsymptoticFit {
    double k1_bar = 0.0;
    double k2_bar = 0.0;
    double y_lo = 0.0;
    double y_hi = 0.0;
    double residual = 0.0;
    double mass_log_slope = 0.0;
};

struct IntegrateOptions {
    double rtol = 1e-13;
    double eps_G = 1e-10;
    double max_log_step = 0.25;
    int max_steps = 200000;
    double handoff_tol = 1e-8;
    bool check_handoff = true;
    bool hard_monitors = true;
    double monitor_deadband = 1e-10;
    int dense_per_step = 0;  // extra interpolated samples per accepted step
};

struct Derivative {
    double drho = 0.0;
    double domega = 0.0;
};

// rho' = y rho h / G, omega' = (4-3g-3 omega)/y - y omega h / G.
// Throws SonicGuardError when |G| < eps_G * g rho^(g-1).
Derivative rhs(double y, FlowState s, PolytropicIndex gamma, double eps_G = 1e-10);

struct RightResult {
    Profile profile;
    AsymptoticFit fit;
};

RightResult extend_right(const TaylorLocal& t, double y_max, PolytropicIndex gamma,
                         const IntegrateOptions& opts = {});

Profile extend_left(const TaylorLocal& t, double y_min_floor, PolytropicIndex gamma,
                    const IntegrateOptions& opts = {});

// Max relative series/integrator discrepancy over the overlap between nu/4
// and nu/2 on the side given by the profile direction.
double handoff_check(const TaylorLocal& t, const Profile& p, PolytropicIndex gamma,
                     const IntegrateOptions& opts = {});
double handoff_check(const TaylorLocal& t, Direction d, PolytropicIndex gamma, const IntegrateOptions& opts = {});

AsymptoticFit fit_asymptotics(const Profile& right, PolytropicIndex gamma);

// Integrate the flow from (y0, s0) to y1 without events other than the
// endpoint; used by tests and by the handoff check.
Profile integrate_between(double y0, FlowState s0, double y1, PolytropicIndex gamma,
                          const IntegrateOptions& opts = {});

} // namespace yahil
