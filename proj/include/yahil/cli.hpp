#pragma once

#include "yahil/integrate.hpp"

#include <memory>
#include <string>
#include <vector>

namespace yahil {

enum ExitCode { ExitOk = 0, ExitUsage = 1, ExitVerification = 2 };

// Monotone cubic interpolation of a profile in ln y; ln rho and omega are
// interpolated, the other columns follow from them.
class ProfileInterpolant {
public:
    ProfileInterpolant(const std::vector<Sample>& samples, PolytropicIndex gamma);
    ~ProfileInterpolant();
    ProfileInterpolant(ProfileInterpolant&&) noexcept;
    ProfileInterpolant& operator=(ProfileInterpolant&&) noexcept;

    double y_min() const { return y_min_; }
    double y_max() const { return y_max_; }
    bool in_range(double y) const { return y >= y_min_ && y <= y_max_; }
    // Outside the range: constant state below y_min, far-field power law above y_max.
    FlowState operator()(double y) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    double gamma_;
    double y_min_;
    double y_max_;
};

struct PhysicalRow {
    double r = 0.0;
    double y = 0.0;
    double rho = 0.0;
    double u = 0.0;
    double m = 0.0;
    bool extrapolated = false;
};

// Fields at time t < 0 for pressure constant kappa:
// rho = (-t)^-2 rho~(y), u = sqrt(kappa) (-t)^(1-g) u~(y), y = r / (sqrt(kappa) (-t)^(2-g)).
std::vector<PhysicalRow> physical_fields(const ProfileInterpolant& p, PolytropicIndex gamma, double t, double kappa,
                                         const std::vector<double>& r);

// Command-line entry point; returns an ExitCode.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

} // namespace yahil
