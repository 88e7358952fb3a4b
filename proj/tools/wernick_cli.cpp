// Command-line front end for the Wernick construction solver.

#include <iostream>

#include <CLI11.hpp>

#include "wernick/cli.hpp"

using namespace wernick;

int main(int argc, char** argv) {
    CLI::App app{"Solver for Wernick's triangle construction problems"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    RunConfig cfg;
    app.add_option("--kb", cfg.kb_path, "Knowledge base file (default: built-in)");
    app.add_option("--catalog", cfg.catalog_path, "Catalog file (default: built-in)");
    app.add_option("--seed", cfg.seed, "Base random seed");
    app.add_option("--instances", cfg.instances, "Verification instances per problem");
    app.add_option("--tol", cfg.tol, "Relative verification tolerance");
    app.add_option("--budget-steps", cfg.budget_steps, "Raw search step budget");
    app.add_option("--budget-secs", cfg.budget_secs, "Search time budget (seconds)");
    app.add_option("--out", cfg.out_dir, "Directory for emitted artifacts");
    app.add_option("--jobs", cfg.jobs, "Batch worker threads");
    app.add_option("--format", cfg.format, "Output format: text|gclc|svg|all");

    std::string list_status, list_index;
    auto* list = app.add_subcommand("list", "List catalog problems");
    list->add_option("--status", list_status, "Filter by status (S,U,R,L,?)");
    list->add_option("index", list_index, "Show a single problem");

    std::string solve_ref;
    auto* solve = app.add_subcommand("solve", "Solve one problem and verify the plan");
    solve->add_option("problem", solve_ref, "Catalog index or triple like A,B,H")->required();

    std::string verify_ref;
    auto* verify = app.add_subcommand("verify", "Solve and print the verification report");
    verify->add_option("problem", verify_ref)->required();

    std::string render_ref;
    auto* render = app.add_subcommand("render", "Solve and render (text, gclc or svg)");
    render->add_option("problem", render_ref)->required();

    auto* batch = app.add_subcommand("batch", "Run the whole catalog and print a summary");
    batch->add_option("--only", cfg.only_status, "Restrict to one status class");
    batch->add_flag("--no-timing", [&cfg](std::int64_t) { cfg.timing = false; },
                    "Omit the wall-clock column");

    int check_samples = 1000;
    auto* check = app.add_subcommand("check-kb", "Numerically validate every KB fact");
    check->add_option("--samples", check_samples, "Random triangles to test");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        Session session(cfg);
        if (list->parsed()) return cmd_list(session, list_status, list_index, std::cout);
        ProblemSpec p;
        std::string err;
        if (solve->parsed() || verify->parsed() || render->parsed()) {
            const std::string& ref =
                solve->parsed() ? solve_ref : (verify->parsed() ? verify_ref : render_ref);
            if (!parse_problem_ref(session, ref, p, err)) {
                std::cerr << "error: " << err << "\n";
                return kExitUsage;
            }
        }
        if (solve->parsed()) return cmd_solve(session, p, cfg, std::cout);
        if (verify->parsed()) return cmd_verify(session, p, cfg, std::cout);
        if (render->parsed()) return cmd_render(session, p, cfg, std::cout);
        if (batch->parsed()) return cmd_batch(session, cfg, std::cout);
        if (check->parsed()) return cmd_check_kb(session, check_samples, cfg, std::cout);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitUsage;
}
