#pragma once

#include <string>
#include <vector>

#include "coneflow/diagnostics.hpp"
#include "coneflow/geometry.hpp"
#include "coneflow/solver.hpp"

namespace coneflow {

struct InequalityConfig {
    std::vector<double> alphas{kPi / 6.0, kPi / 4.0};
    std::vector<double> curl_grad_alphas{kPi / 6.0};
    int m = 2;
    int eigen_nodes = 257;
    int nr = 33, nphi = 33;
    int hardy_fields = 1000;
    double hardy_eps = 1.0;
    int curl_grad_fields = 100;
    int curl_grad_nr = 257, curl_grad_nphi = 257;
    unsigned long long seed = 20240601ULL;
};

struct AnalyticConfig {
    double alpha = kPi / 6.0;
    int m = 2;
    std::vector<int> swirl_grids{17, 33, 65};
    double beta = 3.0;
    int depth = 12;
    std::vector<int> slab_nodes{17, 33, 65};
    std::vector<double> times{1.25, 1.5, 1.75};
    bool energy = true;
    int energy_nodes = 65;
};

struct AppConfig {
    std::string source;  // path the config was read from
    std::string output_dir = "out";
    SimulationConfig sim;
    DiagnosticsOptions diag;
    InequalityConfig ineq;
    AnalyticConfig analytic;
};

// Parses an INI file ("key = value" under [section] headers, ';' or '#'
// comments). Unknown sections or keys are errors. OUTPUT_DIR in the
// environment overrides [output] dir.
AppConfig load_config(const std::string& path);
AppConfig parse_config(const std::string& text, const std::string& source = "<string>");

// Accepts plain numbers and multiples of pi written as "pi", "pi/6" or "3*pi/8".
double parse_angle(const std::string& s);

// Echo of every setting as ordered "section.key" -> text pairs.
std::vector<std::pair<std::string, std::string>> config_echo(const AppConfig& c);

}  // namespace coneflow
