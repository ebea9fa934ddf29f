// tikmor: experiment runner for Tikhonov-Morozov solvers.
//
//   tikmor run <config>     solve, write traces / runs.csv / summary.csv / manifest.txt
//   tikmor curve <config>   sample the discrepancy curve, write curve.csv
//   tikmor gen <config>     write a problem directory
//
// Exit status: 0 success, 1 configuration error, 2 some solver run failed.

#include "tikmor/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace
{

constexpr int exit_ok      = 0;
constexpr int exit_config  = 1;
constexpr int exit_partial = 2;

int cmd_run(const std::string& path)
{
    auto cfg     = tikmor::load_config(path);
    auto summary = tikmor::run_experiment(cfg);
    tikmor::write_summary_csv(std::cout, summary.methods);
    for (const auto& r : summary.runs)
        if (r.status == "error")
            std::cerr << "run " << r.solver << " seed " << r.seed << ": " << r.message << '\n';
    return summary.all_converged() ? exit_ok : exit_partial;
}

int cmd_curve(const std::string& path)
{
    auto cfg    = tikmor::load_config(path);
    auto points = tikmor::run_curve(cfg);
    std::cout << "wrote " << points.size() << " points to " << (cfg.output / "curve.csv").string()
              << '\n';
    return exit_ok;
}

int cmd_gen(const std::string& path)
{
    auto cfg = tikmor::load_config(path);
    auto p   = tikmor::run_gen(cfg);
    std::cout << "wrote " << p.op.rows() << "x" << p.op.cols() << " problem to "
              << cfg.output.string() << '\n';
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Tikhonov-Morozov experiment runner"};
    app.require_subcommand(1);

    std::string run_cfg, curve_cfg, gen_cfg;
    auto* run = app.add_subcommand("run", "run the solvers in a config file");
    run->add_option("config", run_cfg, "config file")->required();
    auto* curve = app.add_subcommand("curve", "sample the discrepancy curve");
    curve->add_option("config", curve_cfg, "config file")->required();
    auto* gen = app.add_subcommand("gen", "generate a problem directory");
    gen->add_option("config", gen_cfg, "config file")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try
    {
        if (*run)
            return cmd_run(run_cfg);
        if (*curve)
            return cmd_curve(curve_cfg);
        return cmd_gen(gen_cfg);
    }
    catch (const tikmor::ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_partial;
    }
}
