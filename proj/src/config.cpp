#include "coneflow/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "coneflow/errors.hpp"

namespace coneflow {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v)
{
    const std::string t = trim(v);
    char* end = nullptr;
    const double x = std::strtod(t.c_str(), &end);
    if (t.empty() || *end != '\0' || !std::isfinite(x)) throw ConfigError(key + ": not a number: '" + v + "'");
    return x;
}

long to_long(const std::string& key, const std::string& v)
{
    const std::string t = trim(v);
    char* end = nullptr;
    const long x = std::strtol(t.c_str(), &end, 10);
    if (t.empty() || *end != '\0') throw ConfigError(key + ": not an integer: '" + v + "'");
    return x;
}

int to_int(const std::string& key, const std::string& v) { return static_cast<int>(to_long(key, v)); }

bool to_bool(const std::string& key, const std::string& v)
{
    const std::string t = trim(v);
    if (t == "true" || t == "yes" || t == "1" || t == "on") return true;
    if (t == "false" || t == "no" || t == "0" || t == "off") return false;
    throw ConfigError(key + ": not a boolean: '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v)
{
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> to_angles(const std::string& key, const std::string& v)
{
    std::vector<double> out;
    for (const std::string& s : split_list(v)) {
        try {
            out.push_back(parse_angle(s));
        } catch (const ConfigError& e) {
            throw ConfigError(key + ": " + e.what());
        }
    }
    return out;
}

std::vector<double> to_doubles(const std::string& key, const std::string& v)
{
    std::vector<double> out;
    for (const std::string& s : split_list(v)) out.push_back(to_double(key, s));
    return out;
}

std::vector<int> to_ints(const std::string& key, const std::string& v)
{
    std::vector<int> out;
    for (const std::string& s : split_list(v)) out.push_back(to_int(key, s));
    return out;
}

std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

template <class T>
std::string join(const std::vector<T>& v)
{
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) out += ", ";
        if constexpr (std::is_floating_point_v<T>)
            out += fmt(v[k]);
        else
            out += std::to_string(v[k]);
    }
    return out;
}

const char* scheme_name(TimeScheme s) { return s == TimeScheme::BackwardEuler ? "backward_euler" : "crank_nicolson"; }

const char* initial_name(InitialData d)
{
    switch (d) {
    case InitialData::Example: return "example";
    case InitialData::Swirl: return "swirl";
    case InitialData::Zero: return "zero";
    case InitialData::Snapshot: return "snapshot";
    }
    return "?";
}

using Setter = std::function<void(AppConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters()
{
    static const std::map<std::string, Setter> s = {
        {"output.dir", [](AppConfig& c, auto&, auto& v) { c.output_dir = trim(v); }},

        {"domain.alpha", [](AppConfig& c, auto&, auto& v) { c.sim.alpha = parse_angle(v); }},
        {"domain.m", [](AppConfig& c, auto& k, auto& v) { c.sim.m = to_int(k, v); }},
        {"grid.nr", [](AppConfig& c, auto& k, auto& v) { c.sim.nr = to_int(k, v); }},
        {"grid.nphi", [](AppConfig& c, auto& k, auto& v) { c.sim.nphi = to_int(k, v); }},
        {"time.t_final", [](AppConfig& c, auto& k, auto& v) { c.sim.t_final = to_double(k, v); }},
        {"time.dt", [](AppConfig& c, auto& k, auto& v) { c.sim.dt = to_double(k, v); }},
        {"time.window", [](AppConfig& c, auto& k, auto& v) { c.sim.window = to_double(k, v); }},
        {"time.window_floor", [](AppConfig& c, auto& k, auto& v) { c.sim.window_floor = to_double(k, v); }},
        {"time.cfl_safety", [](AppConfig& c, auto& k, auto& v) { c.sim.cfl_safety = to_double(k, v); }},
        {"time.startup_steps", [](AppConfig& c, auto& k, auto& v) { c.sim.startup_steps = to_int(k, v); }},
        {"time.scheme",
         [](AppConfig& c, auto& k, auto& v) {
             const std::string t = trim(v);
             if (t == "crank_nicolson")
                 c.sim.scheme = TimeScheme::CrankNicolson;
             else if (t == "backward_euler")
                 c.sim.scheme = TimeScheme::BackwardEuler;
             else
                 throw ConfigError(k + ": expected crank_nicolson or backward_euler");
         }},
        {"picard.tol", [](AppConfig& c, auto& k, auto& v) { c.sim.picard_tol = to_double(k, v); }},
        {"picard.max_iter", [](AppConfig& c, auto& k, auto& v) { c.sim.picard_max_iter = to_int(k, v); }},
        {"initial.kind",
         [](AppConfig& c, auto& k, auto& v) {
             const std::string t = trim(v);
             if (t == "example")
                 c.sim.initial = InitialData::Example;
             else if (t == "swirl")
                 c.sim.initial = InitialData::Swirl;
             else if (t == "zero")
                 c.sim.initial = InitialData::Zero;
             else if (t == "snapshot")
                 c.sim.initial = InitialData::Snapshot;
             else
                 throw ConfigError(k + ": expected example, swirl, zero or snapshot");
         }},
        {"initial.lambda1", [](AppConfig& c, auto& k, auto& v) { c.sim.lambda1 = to_double(k, v); }},
        {"initial.lambda2", [](AppConfig& c, auto& k, auto& v) { c.sim.lambda2 = to_double(k, v); }},
        {"initial.gamma_target", [](AppConfig& c, auto& k, auto& v) { c.sim.gamma_target = to_double(k, v); }},
        {"initial.file", [](AppConfig& c, auto&, auto& v) { c.sim.snapshot_path = trim(v); }},
        {"run.enforce_symmetry", [](AppConfig& c, auto& k, auto& v) { c.sim.enforce_symmetry = to_bool(k, v); }},
        {"run.snapshot_every", [](AppConfig& c, auto& k, auto& v) { c.sim.snapshot_every = to_int(k, v); }},
        {"run.residuals", [](AppConfig& c, auto& k, auto& v) { c.sim.compute_residuals = to_bool(k, v); }},

        {"diagnostics.c_tol", [](AppConfig& c, auto& k, auto& v) { c.diag.c_tol = to_double(k, v); }},
        {"diagnostics.bound_factor", [](AppConfig& c, auto& k, auto& v) { c.diag.bound_factor = to_double(k, v); }},
        {"diagnostics.gamma_threshold",
         [](AppConfig& c, auto& k, auto& v) { c.diag.gamma_threshold = to_double(k, v); }},
        {"diagnostics.eoo_factor", [](AppConfig& c, auto& k, auto& v) { c.diag.eoo_factor = to_double(k, v); }},
        {"diagnostics.residual_c", [](AppConfig& c, auto& k, auto& v) { c.diag.residual_c = to_double(k, v); }},
        {"diagnostics.identity_c", [](AppConfig& c, auto& k, auto& v) { c.diag.identity_c = to_double(k, v); }},

        {"inequalities.alphas", [](AppConfig& c, auto& k, auto& v) { c.ineq.alphas = to_angles(k, v); }},
        {"inequalities.curl_grad_alphas",
         [](AppConfig& c, auto& k, auto& v) { c.ineq.curl_grad_alphas = to_angles(k, v); }},
        {"inequalities.m", [](AppConfig& c, auto& k, auto& v) { c.ineq.m = to_int(k, v); }},
        {"inequalities.eigen_nodes", [](AppConfig& c, auto& k, auto& v) { c.ineq.eigen_nodes = to_int(k, v); }},
        {"inequalities.nr", [](AppConfig& c, auto& k, auto& v) { c.ineq.nr = to_int(k, v); }},
        {"inequalities.nphi", [](AppConfig& c, auto& k, auto& v) { c.ineq.nphi = to_int(k, v); }},
        {"inequalities.hardy_fields", [](AppConfig& c, auto& k, auto& v) { c.ineq.hardy_fields = to_int(k, v); }},
        {"inequalities.hardy_eps", [](AppConfig& c, auto& k, auto& v) { c.ineq.hardy_eps = to_double(k, v); }},
        {"inequalities.curl_grad_fields",
         [](AppConfig& c, auto& k, auto& v) { c.ineq.curl_grad_fields = to_int(k, v); }},
        {"inequalities.curl_grad_nr", [](AppConfig& c, auto& k, auto& v) { c.ineq.curl_grad_nr = to_int(k, v); }},
        {"inequalities.curl_grad_nphi",
         [](AppConfig& c, auto& k, auto& v) { c.ineq.curl_grad_nphi = to_int(k, v); }},
        {"inequalities.seed",
         [](AppConfig& c, auto& k, auto& v) { c.ineq.seed = static_cast<unsigned long long>(to_long(k, v)); }},

        {"analytic.alpha", [](AppConfig& c, auto&, auto& v) { c.analytic.alpha = parse_angle(v); }},
        {"analytic.m", [](AppConfig& c, auto& k, auto& v) { c.analytic.m = to_int(k, v); }},
        {"analytic.swirl_grids", [](AppConfig& c, auto& k, auto& v) { c.analytic.swirl_grids = to_ints(k, v); }},
        {"analytic.beta", [](AppConfig& c, auto& k, auto& v) { c.analytic.beta = to_double(k, v); }},
        {"analytic.depth", [](AppConfig& c, auto& k, auto& v) { c.analytic.depth = to_int(k, v); }},
        {"analytic.slab_nodes", [](AppConfig& c, auto& k, auto& v) { c.analytic.slab_nodes = to_ints(k, v); }},
        {"analytic.times", [](AppConfig& c, auto& k, auto& v) { c.analytic.times = to_doubles(k, v); }},
        {"analytic.energy", [](AppConfig& c, auto& k, auto& v) { c.analytic.energy = to_bool(k, v); }},
        {"analytic.energy_nodes", [](AppConfig& c, auto& k, auto& v) { c.analytic.energy_nodes = to_int(k, v); }},
    };
    return s;
}

}  // namespace

double parse_angle(const std::string& text)
{
    const std::string s = trim(text);
    const auto p = s.find("pi");
    if (p == std::string::npos) return to_double("angle", s);
    double num = 1.0, den = 1.0;
    const std::string pre = trim(s.substr(0, p)), post = trim(s.substr(p + 2));
    if (!pre.empty()) {
        if (pre.back() != '*') throw ConfigError("malformed angle '" + s + "'");
        num = to_double("angle", pre.substr(0, pre.size() - 1));
    }
    if (!post.empty()) {
        if (post.front() != '/') throw ConfigError("malformed angle '" + s + "'");
        den = to_double("angle", post.substr(1));
        if (den == 0.0) throw ConfigError("angle divides by zero");
    }
    return num * kPi / den;
}

AppConfig parse_config(const std::string& text, const std::string& source)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream is(text);
    try {
        pt::ini_parser::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    AppConfig c;
    c.source = source;
    const auto& table = setters();
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw ConfigError(source + ": key '" + section + "' outside any [section]");
        for (const auto& [key, value] : body) {
            const std::string full = section + "." + key;
            const auto it = table.find(full);
            if (it == table.end()) throw ConfigError(source + ": unknown setting '" + full + "'");
            try {
                it->second(c, full, value.data());
            } catch (const ConfigError& e) {
                throw ConfigError(source + ": " + e.what());
            }
        }
    }
    if (const char* od = std::getenv("OUTPUT_DIR"); od && *od) c.output_dir = od;
    return c;
}

AppConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

std::vector<std::pair<std::string, std::string>> config_echo(const AppConfig& c)
{
    const SimulationConfig& s = c.sim;
    const DiagnosticsOptions& d = c.diag;
    const InequalityConfig& q = c.ineq;
    const AnalyticConfig& a = c.analytic;
    return {
        {"output.dir", c.output_dir},
        {"domain.alpha", fmt(s.alpha)},
        {"domain.m", std::to_string(s.m)},
        {"grid.nr", std::to_string(s.nr)},
        {"grid.nphi", std::to_string(s.nphi)},
        {"time.t_final", fmt(s.t_final)},
        {"time.dt", fmt(s.dt)},
        {"time.window", fmt(s.window)},
        {"time.window_floor", fmt(s.window_floor)},
        {"time.cfl_safety", fmt(s.cfl_safety)},
        {"time.scheme", scheme_name(s.scheme)},
        {"time.startup_steps", std::to_string(s.startup_steps)},
        {"picard.tol", fmt(s.picard_tol)},
        {"picard.max_iter", std::to_string(s.picard_max_iter)},
        {"initial.kind", initial_name(s.initial)},
        {"initial.lambda1", fmt(s.lambda1)},
        {"initial.lambda2", fmt(s.lambda2)},
        {"initial.gamma_target", fmt(s.gamma_target)},
        {"initial.file", s.snapshot_path},
        {"run.enforce_symmetry", s.enforce_symmetry ? "true" : "false"},
        {"run.snapshot_every", std::to_string(s.snapshot_every)},
        {"run.residuals", s.compute_residuals ? "true" : "false"},
        {"diagnostics.c_tol", fmt(d.c_tol)},
        {"diagnostics.bound_factor", fmt(d.bound_factor)},
        {"diagnostics.gamma_threshold", fmt(d.gamma_threshold)},
        {"diagnostics.eoo_factor", fmt(d.eoo_factor)},
        {"diagnostics.residual_c", fmt(d.residual_c)},
        {"diagnostics.identity_c", fmt(d.identity_c)},
        {"inequalities.alphas", join(q.alphas)},
        {"inequalities.curl_grad_alphas", join(q.curl_grad_alphas)},
        {"inequalities.m", std::to_string(q.m)},
        {"inequalities.eigen_nodes", std::to_string(q.eigen_nodes)},
        {"inequalities.nr", std::to_string(q.nr)},
        {"inequalities.nphi", std::to_string(q.nphi)},
        {"inequalities.hardy_fields", std::to_string(q.hardy_fields)},
        {"inequalities.hardy_eps", fmt(q.hardy_eps)},
        {"inequalities.curl_grad_fields", std::to_string(q.curl_grad_fields)},
        {"inequalities.curl_grad_nr", std::to_string(q.curl_grad_nr)},
        {"inequalities.curl_grad_nphi", std::to_string(q.curl_grad_nphi)},
        {"inequalities.seed", std::to_string(q.seed)},
        {"analytic.alpha", fmt(a.alpha)},
        {"analytic.m", std::to_string(a.m)},
        {"analytic.swirl_grids", join(a.swirl_grids)},
        {"analytic.beta", fmt(a.beta)},
        {"analytic.depth", std::to_string(a.depth)},
        {"analytic.slab_nodes", join(a.slab_nodes)},
        {"analytic.times", join(a.times)},
        {"analytic.energy", a.energy ? "true" : "false"},
        {"analytic.energy_nodes", std::to_string(a.energy_nodes)},
    };
}

}  // namespace coneflow
