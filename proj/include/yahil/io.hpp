#pragma once

#include "yahil/certify.hpp"
#include "yahil/integrate.hpp"
#include "yahil/shoot.hpp"

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace yahil {

constexpr int schema_version = 1;

// Shortest decimal that reads back to the same double.
std::string format_double(double x);

std::string profile_csv(const std::vector<Sample>& samples);
// Inverse of profile_csv; throws ParameterError on a malformed table.
std::vector<Sample> parse_profile_csv(const std::string& text);

// Write to a sibling temporary file, then rename over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

nlohmann::json to_json(const Interval& x);
nlohmann::json to_json(const Certificate& c);
nlohmann::json to_json(const InvariantReport& r);
nlohmann::json to_json(const AsymptoticFit& f);

// Summary of a solve: bracket, fit, central values and both invariant reports.
nlohmann::json solve_summary(const ShootResult& res, PolytropicIndex gamma);

} // namespace yahil
