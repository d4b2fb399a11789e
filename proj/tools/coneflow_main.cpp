#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "coneflow/commands.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Axisymmetric flow solver and diagnostics on truncated cones"};
    app.require_subcommand(1);

    std::string config;
    auto add = [&](const char* name, const char* help) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("config", config, "INI configuration file")->required()->check(CLI::ExistingFile);
        return sub;
    };
    CLI::App* ineq = add("verify-inequalities", "Check the functional inequalities on sampled fields");
    CLI::App* solve = add("solve", "Run the fixed-point solver and write the trajectory");
    CLI::App* diag = add("diagnose", "Re-run the audits on a written trajectory");
    CLI::App* analytic = add("analytic-tests", "Check the exact-solution oracles");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? coneflow::kExitOk : coneflow::kExitUsage;
    }

    if (ineq->parsed()) return coneflow::cmd_verify_inequalities(config, std::cout);
    if (solve->parsed()) return coneflow::cmd_solve(config, std::cout);
    if (diag->parsed()) return coneflow::cmd_diagnose(config, std::cout);
    if (analytic->parsed()) return coneflow::cmd_analytic(config, std::cout);
    return coneflow::kExitUsage;
}
