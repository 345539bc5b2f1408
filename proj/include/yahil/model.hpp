#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace yahil {

struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Polytropic index, validated to the open range (1, 4/3).
class PolytropicIndex {
public:
    explicit PolytropicIndex(double gamma);

    double value() const { return gamma_; }
    operator double() const { return gamma_; }

private:
    double gamma_;
};

struct FlowState {
    double rho = 0.0;
    double omega = 0.0;
};

struct SonicWindow {
    double y_f = 0.0;
    double y_F = 0.0;
};

// Scalar-generic closed forms. The double API below forwards here; the
// templates let the sonic recursion run in extended precision.
namespace formula {

template <class T>
T pi() {
    using std::acos;
    return acos(T(-1));
}

template <class T>
T sound_term(T rho, T gamma) {
    using std::pow;
    return gamma * pow(rho, gamma - 1);
}

template <class T>
T G(T y, T rho, T omega, T gamma) {
    return sound_term(rho, gamma) - y * y * omega * omega;
}

template <class T>
T h(T rho, T omega, T gamma) {
    const T g1 = gamma - 1, c = 4 - 3 * gamma;
    return 2 * omega * omega + g1 * omega - 4 * pi<T>() * rho * omega / c + g1 * (2 - gamma);
}

template <class T>
T f1(T omega, T gamma) {
    const T g1 = gamma - 1;
    return (4 - 3 * gamma) / (4 * pi<T>() * omega) * (2 * omega * omega + g1 * omega + g1 * (2 - gamma));
}

template <class T>
T f2(T omega, T y_star, T gamma) {
    using std::pow;
    return pow(y_star * y_star * omega * omega / gamma, 1 / (gamma - 1));
}

template <class T>
T y_friedman(T gamma) {
    using std::pow;
    using std::sqrt;
    return 3 / (4 - 3 * gamma) * sqrt(gamma / pow(6 * pi<T>(), gamma - 1));
}

template <class T>
T y_far(T gamma) {
    using std::pow;
    using std::sqrt;
    return sqrt(gamma) / (2 - gamma) * pow((4 - 3 * gamma) / (2 * pi<T>()), (gamma - 1) / 2);
}

template <class T>
T far_field_k(T gamma) {
    using std::pow;
    const T b = 2 - gamma;
    return pow(gamma * (4 - 3 * gamma) / (2 * pi<T>() * b * b), 1 / b);
}

} // namespace formula

SonicWindow sonic_window(PolytropicIndex gamma);

double G(double y, FlowState s, PolytropicIndex gamma);
double h(FlowState s, PolytropicIndex gamma);
double f1(double omega, PolytropicIndex gamma);
double f2(double omega, double y_star, PolytropicIndex gamma);

FlowState friedman_state(PolytropicIndex gamma);
FlowState far_field_state(double y, PolytropicIndex gamma);
double far_field_k(PolytropicIndex gamma);

// ∫_0^y z^2 rho dz for a regular solution, via the momentum identity.
double local_mass(double y, FlowState s, PolytropicIndex gamma);

// u = y (omega - (2 - gamma))
double velocity(double y, double omega, PolytropicIndex gamma);

// Stationary point of f1 on (0, 2-gamma).
double f1_argmin(PolytropicIndex gamma);

} // namespace yahil
