// Command-line front end: batch simulation runs, map diffing, ontology
// validation and a fusion micro-benchmark.
//
// Exit codes: 0 success, 1 invariant failure during a run, 2 bad
// configuration or command line.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <semgsl/semgsl.hpp>

namespace {

int cmd_run(const std::string& scenario, const std::string& ontology,
            const std::vector<std::string>& mode_names, const std::string& strategy_name,
            const std::vector<std::uint64_t>& seeds, const std::string& out_dir,
            std::size_t pgm_every, std::size_t threads) {
    semgsl::ExperimentConfig cfg;
    cfg.scenario_path = scenario;
    cfg.ontology_path = ontology;
    cfg.out_dir = out_dir;
    cfg.seeds = seeds;
    cfg.pgm_every = pgm_every;
    cfg.threads = threads;

    cfg.modes.clear();
    for (const auto& name : mode_names) {
        if (name == "all") {
            cfg.modes = {semgsl::Mode::Olfaction, semgsl::Mode::Semantic,
                         semgsl::Mode::SemanticRooms};
            break;
        }
        const auto mode = semgsl::parse_mode(name);
        if (!mode) throw semgsl::ConfigError("unknown mode '" + name + "'");
        cfg.modes.push_back(*mode);
    }
    const auto strategy = semgsl::parse_strategy(strategy_name);
    if (!strategy) throw semgsl::ConfigError("unknown strategy '" + strategy_name + "'");
    cfg.strategy = *strategy;

    const semgsl::ExperimentSummary summary = semgsl::run_experiment(cfg);
    std::printf("%-16s %6s %22s %20s %22s\n", "mode", "seeds", "median_final_error_m",
                "iqr_final_error_m", "median_step10_error_m");
    for (const auto& arm : summary.arms)
        std::printf("%-16s %6zu %22.4f %20.4f %22.4f\n", semgsl::to_string(arm.mode),
                    arm.seed_count, arm.median_final_error_m, arm.iqr_final_error_m,
                    arm.median_step10_error_m);
    std::printf("outputs written to %s\n", out_dir.c_str());
    return 0;
}

int cmd_diff(const std::string& a, const std::string& b) {
    const semgsl::SourceDist da = semgsl::read_source_csv(a);
    const semgsl::SourceDist db = semgsl::read_source_csv(b);
    double d;
    try {
        d = semgsl::diff_maps(da, db);
    } catch (const semgsl::DomainMismatchError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2; // incompatible inputs are a usage problem
    }
    std::printf("%.17g\n", d);
    return 0;
}

int cmd_validate(const std::string& ontology) {
    const semgsl::OntologyConfig cfg = semgsl::load_ontology_config(ontology);
    const std::vector<std::string> violations = semgsl::validate(cfg);
    if (violations.empty()) {
        std::printf("ok: %s\n", ontology.c_str());
        return 0;
    }
    for (const auto& v : violations) std::fprintf(stderr, "violation: %s\n", v.c_str());
    return 2;
}

int cmd_bench(std::size_t width, std::size_t height, std::size_t classes, std::size_t reps) {
    const double ms = semgsl::bench_fusion_cycle_ms(width, height, classes, reps);
    std::printf("grid=%zux%zu classes=%zu reps=%zu median_cycle_ms=%.3f\n", width, height,
                classes, reps, ms);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semantic gas-source localization simulation harness"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "simulate a scenario over modes and seeds");
    std::string scenario, ontology, out_dir;
    std::string strategy = "scripted";
    std::vector<std::string> modes{"all"};
    std::vector<std::uint64_t> seeds{1};
    std::size_t pgm_every = 0, threads = 0;
    run->add_option("--scenario", scenario, "scenario JSON file")->required();
    run->add_option("--ontology", ontology, "ontology JSON file")->required();
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--mode", modes,
                    "modes to run: olfaction, semantic, semantic+rooms or all")
        ->delimiter(',');
    run->add_option("--strategy", strategy, "scripted or infogain");
    run->add_option("--seeds", seeds, "random seeds, comma separated")->delimiter(',');
    run->add_option("--pgm-every", pgm_every, "dump a posterior heat map every N steps");
    run->add_option("--threads", threads, "worker threads (0 = all hardware threads)");

    // diff
    auto* diff = app.add_subcommand("diff", "largest per-cell difference of two map dumps");
    std::string file_a, file_b;
    diff->add_option("--a", file_a, "first source CSV")->required();
    diff->add_option("--b", file_b, "second source CSV")->required();

    // validate
    auto* validate = app.add_subcommand("validate", "check an ontology file");
    std::string val_ontology;
    validate->add_option("--ontology", val_ontology, "ontology JSON file")->required();

    // bench
    auto* bench = app.add_subcommand("bench", "time one semantic-source + fusion cycle");
    std::size_t bw = 100, bh = 100, bk = 20, breps = 21;
    bench->add_option("--width", bw, "grid width in cells");
    bench->add_option("--height", bh, "grid height in cells");
    bench->add_option("--classes", bk, "number of object classes");
    bench->add_option("--reps", breps, "timed repetitions");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run->parsed())
            return cmd_run(scenario, ontology, modes, strategy, seeds, out_dir, pgm_every,
                           threads);
        if (diff->parsed()) return cmd_diff(file_a, file_b);
        if (validate->parsed()) return cmd_validate(val_ontology);
        if (bench->parsed()) return cmd_bench(bw, bh, bk, breps);
    } catch (const semgsl::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const semgsl::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
