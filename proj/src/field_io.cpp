#include "coneflow/field_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "coneflow/errors.hpp"

namespace coneflow {

namespace {

void write_rows(const std::string& path, const MeridianGrid& g, const char* header,
                const std::vector<const ScalarField*>& cols)
{
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw std::runtime_error("cannot open " + path + " for writing");
    std::fprintf(fp, "%s\n", header);
    for (int j = 0; j < g.nphi(); ++j)
        for (int i = 0; i < g.nr(); ++i) {
            std::fprintf(fp, "%.17g,%.17g", g.rho(i), g.phi(j));
            for (const ScalarField* c : cols) std::fprintf(fp, ",%.17g", (*c)(i, j));
            std::fputc('\n', fp);
        }
    if (std::fclose(fp) != 0) throw std::runtime_error("write failed for " + path);
}

std::vector<std::vector<double>> read_rows(const std::string& path, const MeridianGrid& g,
                                           const std::string& header, std::size_t ncols)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open snapshot " + path);
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header) throw ConfigError("unexpected header in " + path + ": " + line);
    std::vector<std::vector<double>> cols(ncols, std::vector<double>(g.size()));
    std::size_t k = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (k >= g.size()) throw ConfigError("too many rows in " + path);
        const int i = static_cast<int>(k % g.nr()), j = static_cast<int>(k / g.nr());
        std::istringstream ss(line);
        std::string tok;
        std::vector<double> vals;
        while (std::getline(ss, tok, ',')) vals.push_back(std::strtod(tok.c_str(), nullptr));
        if (vals.size() != ncols + 2) throw ConfigError("bad column count in " + path);
        if (std::abs(vals[0] - g.rho(i)) > 1e-12 || std::abs(vals[1] - g.phi(j)) > 1e-12)
            throw ConfigError("node coordinates in " + path + " do not match the grid");
        for (std::size_t c = 0; c < ncols; ++c) cols[c][k] = vals[c + 2];
        ++k;
    }
    if (k != g.size()) throw ConfigError("too few rows in " + path);
    return cols;
}

}  // namespace

void write_csv(const std::string& path, const ScalarField& f)
{
    write_rows(path, f.grid(), "rho,phi,value", {&f});
}

void write_csv(const std::string& path, const VectorField& v)
{
    write_rows(path, v.grid(), "rho,phi,v_rho,v_phi,v_theta", {&v.rho, &v.phi, &v.theta});
}

ScalarField read_scalar_csv(const std::string& path, GridPtr grid)
{
    auto cols = read_rows(path, *grid, "rho,phi,value", 1);
    return ScalarField(grid, std::move(cols[0]));
}

VectorField read_vector_csv(const std::string& path, GridPtr grid)
{
    auto cols = read_rows(path, *grid, "rho,phi,v_rho,v_phi,v_theta", 3);
    return VectorField(ScalarField(grid, std::move(cols[0])), ScalarField(grid, std::move(cols[1])),
                       ScalarField(grid, std::move(cols[2])));
}

}  // namespace coneflow
