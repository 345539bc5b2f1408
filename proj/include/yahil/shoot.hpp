#pragma once

#include "yahil/integrate.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace yahil {

enum class Classification { CrossesFriedman, SonicFirst, OriginFirst };

const char* to_string(Classification c);

// The crossing predicate switched more than once inside the final cell.
struct ShootAmbiguity : std::runtime_error {
    ShootAmbiguity(const std::string& what, std::vector<double> grid_, std::vector<Classification> classes_);
    std::vector<double> grid;
    std::vector<Classification> classes;
};

struct ShootOptions {
    IntegrateOptions integ;
    int n_max = 60;
    double y_min_factor = 1e-4;
    double y_max_factor = 1e4;
    int coarse_grid = 33;
    int fine_grid = 17;
    // bracket width target; 0 bisects until the midpoint is no longer representable
    double tol_ystar = 0.0;
    double origin_tol = 1e-3;
    double deadband = 1e-12;
    bool parallel = true;
    // replace the inward profile below match_factor * y* by the regular origin
    // branch integrated outward and fitted to it
    bool origin_match = true;
    double match_factor = 0.05;
};

struct OriginMatch {
    double rho_c = 0.0;           // central density of the fitted origin branch
    double y_match = 0.0;
    double omega_mismatch = 0.0;  // relative, at y_match; rho is matched exactly
    int iterations = 0;
};

struct InvariantEntry {
    std::string name;
    double worst_value = 0.0;
    double worst_y = 0.0;
    bool pass = false;
};

struct InvariantReport {
    std::vector<InvariantEntry> entries;
    bool all_pass() const;
    const InvariantEntry& at(const std::string& name) const;
};

struct CrossingTrace {
    double y_hi = 0.0;
    double y_c = 0.0;
};

struct ShootResult {
    double y_star_bar = 0.0;
    double y_lo = 0.0;
    double y_hi = 0.0;
    int iterations = 0;
    double y_assembled = 0.0;  // sonic point of the assembled profile
    TaylorLocal taylor;        // series at y_assembled
    Profile left_profile;
    Profile right_profile;
    Profile hi_profile;        // crossing side of the final bracket
    AsymptoticFit fit;
    Profile global;
    InvariantReport report;
    OriginMatch origin;
    InvariantReport raw_report;  // same checks on the unpatched inward profile
    std::vector<double> grid;
    std::vector<Classification> grid_classes;
    std::vector<CrossingTrace> trace;  // y_c(y_hi) along the bisection
};

Classification classify(double y_star, PolytropicIndex gamma, const ShootOptions& opts = {});
Classification classify(const Profile& left);
Profile left_profile(double y_star, PolytropicIndex gamma, const ShootOptions& opts = {});

std::vector<Classification> classify_sweep_serial(const std::vector<double>& ys, PolytropicIndex gamma,
                                                  const ShootOptions& opts = {});
std::vector<Classification> classify_sweep(const std::vector<double>& ys, PolytropicIndex gamma,
                                           const ShootOptions& opts = {});

ShootResult find_critical(PolytropicIndex gamma, const ShootOptions& opts = {});

// Merge left profile, series core and right profile into one increasing-y profile.
Profile assemble_global(const ShootResult& res, PolytropicIndex gamma, const ShootOptions& opts = {},
                        OriginMatch* match = nullptr);

// Regular solution near the origin, rho = rho_c + r2 y^2, omega = (4-3g)/3 + w2 y^2,
// integrated outward from y0 to y1.
Profile origin_branch(double rho_c, double y0, double y1, PolytropicIndex gamma, const IntegrateOptions& opts = {});

// Central density whose origin branch meets the profile's rho at y_match.
OriginMatch match_origin(const Profile& left, double y_min, double y_match, PolytropicIndex gamma,
                         const IntegrateOptions& opts = {});

InvariantReport verify_invariants(const Profile& p, PolytropicIndex gamma, const ShootOptions& opts = {});

} // namespace yahil
