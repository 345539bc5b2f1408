#include "yahil/model.hpp"

#include <cmath>
#include <sstream>

namespace yahil {

PolytropicIndex::PolytropicIndex(double gamma) : gamma_(gamma)
{
    if (!(gamma > 1.0 && gamma < 4.0 / 3.0)) {
        std::ostringstream os;
        os.precision(17);
        os << "gamma must lie in (1, 4/3), got " << gamma;
        throw ParameterError(os.str());
    }
}

SonicWindow sonic_window(PolytropicIndex gamma)
{
    return {formula::y_far<double>(gamma), formula::y_friedman<double>(gamma)};
}

double G(double y, FlowState s, PolytropicIndex gamma)
{
    return formula::G<double>(y, s.rho, s.omega, gamma);
}

double h(FlowState s, PolytropicIndex gamma)
{
    return formula::h<double>(s.rho, s.omega, gamma);
}

double f1(double omega, PolytropicIndex gamma)
{
    if (!(omega > 0.0))
        throw DomainError("f1 requires omega > 0");
    return formula::f1<double>(omega, gamma);
}

double f2(double omega, double y_star, PolytropicIndex gamma)
{
    return formula::f2<double>(omega, y_star, gamma);
}

FlowState friedman_state(PolytropicIndex gamma)
{
    return {1.0 / (6.0 * std::numbers::pi), (4.0 - 3.0 * gamma) / 3.0};
}

double far_field_k(PolytropicIndex gamma)
{
    return formula::far_field_k<double>(gamma);
}

FlowState far_field_state(double y, PolytropicIndex gamma)
{
    if (!(y > 0.0))
        throw DomainError("far-field state requires y > 0");
    const double b = 2.0 - gamma;
    return {far_field_k(gamma) * std::pow(y, -2.0 / b), b};
}

double local_mass(double y, FlowState s, PolytropicIndex gamma)
{
    return y * y * y * s.rho * s.omega / (4.0 - 3.0 * gamma);
}

double velocity(double y, double omega, PolytropicIndex gamma)
{
    return y * (omega - (2.0 - gamma));
}

double f1_argmin(PolytropicIndex gamma)
{
    return std::sqrt((gamma - 1.0) * (2.0 - gamma) / 2.0);
}

} // namespace yahil
