#include "yahil/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace yahil {

std::string format_double(double x)
{
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

namespace {

const char* const csv_header = "y,rho,omega,u,G,h";

double parse_field(const std::string& s, std::size_t line)
{
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw ParameterError("bad number '" + s + "' on line " + std::to_string(line));
    return v;
}

} // namespace

std::string profile_csv(const std::vector<Sample>& samples)
{
    std::string out = csv_header;
    out += '\n';
    for (const auto& s : samples) {
        for (double v : {s.y, s.rho, s.omega, s.u, s.G}) {
            out += format_double(v);
            out += ',';
        }
        out += format_double(s.h);
        out += '\n';
    }
    return out;
}

std::vector<Sample> parse_profile_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != csv_header)
        throw ParameterError("profile table must start with the header " + std::string(csv_header));
    std::vector<Sample> out;
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty())
            continue;
        double v[6];
        std::size_t start = 0;
        for (int k = 0; k < 6; ++k) {
            const std::size_t end = k < 5 ? line.find(',', start) : line.size();
            if (end == std::string::npos)
                throw ParameterError("too few columns on line " + std::to_string(n));
            v[k] = parse_field(line.substr(start, end - start), n);
            start = end + 1;
        }
        out.push_back({v[0], v[1], v[2], v[3], v[4], v[5]});
    }
    return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw std::runtime_error("cannot open " + tmp.string());
        f << content;
        if (!f.flush())
            throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw ParameterError("cannot read " + path.string());
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

nlohmann::json to_json(const Interval& x)
{
    return nlohmann::json::array({x.lo(), x.hi()});
}

nlohmann::json to_json(const Certificate& c)
{
    nlohmann::json box = nlohmann::json::object();
    for (std::size_t i = 0; i < c.box.size(); ++i)
        box[c.box.names[i]] = to_json(c.box.dims[i]);
    nlohmann::json j = {{"name", c.name},
                        {"group", c.group},
                        {"kind", to_string(c.kind)},
                        {"box", box},
                        {"claim", to_string(c.claim)},
                        {"tol", c.tol},
                        {"enclosure", to_json(c.enclosure)},
                        {"verdict", to_string(c.verdict)},
                        {"iterations", c.iterations},
                        {"seconds", c.seconds}};
    if (c.paper) {
        j["paper_enclosure"] = to_json(*c.paper);
        j["paper_intersects"] = c.paper_intersects;
    } else {
        j["paper_enclosure"] = nullptr;
    }
    return j;
}

nlohmann::json to_json(const InvariantReport& r)
{
    nlohmann::json a = nlohmann::json::array();
    for (const auto& e : r.entries)
        a.push_back({{"name", e.name}, {"worst_value", e.worst_value}, {"worst_y", e.worst_y}, {"pass", e.pass}});
    return a;
}

nlohmann::json to_json(const AsymptoticFit& f)
{
    return {{"k1_bar", f.k1_bar},       {"k2_bar", f.k2_bar},     {"y_lo", f.y_lo},
            {"y_hi", f.y_hi},           {"residual", f.residual}, {"mass_log_slope", f.mass_log_slope}};
}

nlohmann::json solve_summary(const ShootResult& res, PolytropicIndex gamma)
{
    const auto w = sonic_window(gamma);
    const auto& g = res.global.samples;
    nlohmann::json j = {{"schema_version", schema_version},
                        {"gamma", static_cast<double>(gamma)},
                        {"y_f", w.y_f},
                        {"y_F", w.y_F},
                        {"y_star_bar", res.y_star_bar},
                        {"bracket", {res.y_lo, res.y_hi}},
                        {"bisection_iterations", res.iterations},
                        {"y_star_assembled", res.y_assembled},
                        {"series_radius", res.taylor.radius},
                        {"asymptotics", to_json(res.fit)},
                        {"origin_match",
                         {{"rho_c", res.origin.rho_c},
                          {"y_match", res.origin.y_match},
                          {"omega_mismatch", res.origin.omega_mismatch}}},
                        {"invariants", to_json(res.report)},
                        {"invariants_unpatched", to_json(res.raw_report)},
                        {"all_invariants_pass", res.report.all_pass()}};
    if (!g.empty()) {
        j["y_min"] = g.front().y;
        j["rho_y_min"] = g.front().rho;
        j["omega_y_min"] = g.front().omega;
        j["y_max"] = g.back().y;
    }
    return j;
}

} // namespace yahil
