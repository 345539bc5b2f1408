#pragma once

#include "yahil/interval.hpp"
#include "yahil/model.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace yahil {

enum class Extremum { Max, Min };
enum class Claim { MaxBelowZero, MinAboveZero };
enum class Verdict { Pass, Fail, Inconclusive };
// Listing: transcribed from the published certificate listings.
// Supplement: extra checks covering ranges the listings leave open.
enum class CertKind { Listing, Supplement };

const char* to_string(Claim c);
const char* to_string(Verdict v);
const char* to_string(CertKind k);

// One expression, evaluable as an interval extension and as a long double point.
struct Expr {
    std::function<Interval(const std::vector<Interval>&)> interval;
    std::function<long double(const std::vector<long double>&)> point;
};

template <class F>
Expr make_expr(F f)
{
    return {[f](const std::vector<Interval>& v) { return f(v); },
            [f](const std::vector<long double>& v) { return f(v); }};
}

struct BoundResult {
    Interval enclosure;
    bool conclusive = false;
    long iterations = 0;
};

// Branch and bound: the true extremum of f over box lies in the enclosure.
// Stops when the enclosure is no wider than tol; hitting max_iter leaves the
// result inconclusive.
BoundResult bound_extremum(const Expr& f, const Box& box, Extremum mode, double tol, long max_iter = 4'000'000);

struct CertificateSpec {
    std::string name;
    std::string group;  // the proof step the certificate serves
    CertKind kind = CertKind::Listing;
    Box box;
    Claim claim = Claim::MaxBelowZero;
    double tol = 1e-3;
    std::optional<Interval> paper;  // reported output interval, if printed
    Expr f;
};

struct Certificate {
    std::string name;
    std::string group;
    CertKind kind = CertKind::Listing;
    Box box;
    Claim claim = Claim::MaxBelowZero;
    double tol = 0.0;
    Interval enclosure;
    std::optional<Interval> paper;
    bool paper_intersects = true;
    bool paper_sign_agrees = true;
    Verdict verdict = Verdict::Inconclusive;
    long iterations = 0;
    double seconds = 0.0;
};

std::vector<CertificateSpec> certificate_manifest();
std::size_t listing_count();

struct SuiteOptions {
    double tol_scale = 1.0;
    bool parallel = true;
    long max_iter = 4'000'000;
    // test fixture: negate the named expression so its claim breaks
    std::string corrupt;
};

Certificate run_certificate(const CertificateSpec& spec, const SuiteOptions& opts = {});
std::vector<Certificate> run_suite_serial(const SuiteOptions& opts = {});
std::vector<Certificate> run_suite(const SuiteOptions& opts = {});
bool suite_passes(const std::vector<Certificate>& certs);

struct ConsistencyEntry {
    std::string name;
    double worst_margin = 0.0;  // smallest slack of the inequality over the grid
    double worst_y = 0.0;
    bool pass = false;
};

// Plain floating-point spot check of the seed inequalities on a y* grid.
std::vector<ConsistencyEntry> seed_consistency(PolytropicIndex gamma, int n = 101);

} // namespace yahil
