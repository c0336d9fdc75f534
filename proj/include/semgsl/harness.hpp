#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <semgsl/error.hpp>
#include <semgsl/estimation.hpp>
#include <semgsl/io.hpp>
#include <semgsl/olfaction.hpp>
#include <semgsl/rng.hpp>
#include <semgsl/simulator.hpp>

namespace semgsl {

/// Largest absolute per-cell difference between two source distributions.
inline double diff_maps(const SourceDist& a, const SourceDist& b) {
    if (a.size() != b.size())
        throw DomainMismatchError("diff_maps: distributions cover different site counts");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

inline double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw Error("quantile_sorted: empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, 0.5);
}

inline double interquartile_range(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, 0.75) - quantile_sorted(values, 0.25);
}

struct ExperimentConfig {
    std::filesystem::path scenario_path;
    std::filesystem::path ontology_path;
    std::filesystem::path out_dir;
    std::vector<Mode> modes{Mode::Olfaction, Mode::Semantic, Mode::SemanticRooms};
    Strategy strategy = Strategy::Scripted;
    std::vector<std::uint64_t> seeds{1};
    std::size_t pgm_every = 0; // dump a heat map every N steps (0 = off)
    std::size_t threads = 0;   // 0 = one per hardware thread
};

struct ArmSummary {
    Mode mode = Mode::Semantic;
    std::size_t seed_count = 0;
    double median_final_error_m = 0.0;
    double iqr_final_error_m = 0.0;
    double median_step10_error_m = 0.0;
};

struct ExperimentSummary {
    std::vector<ArmSummary> arms;
};

inline void write_summary_csv(const std::filesystem::path& path,
                              const ExperimentSummary& summary) {
    auto out = detail::open_output(path);
    out << "mode,seeds,median_final_error_m,iqr_final_error_m,median_step10_error_m\n";
    for (const ArmSummary& a : summary.arms)
        out << to_string(a.mode) << ',' << a.seed_count << ','
            << detail::format_double(a.median_final_error_m) << ','
            << detail::format_double(a.iqr_final_error_m) << ','
            << detail::format_double(a.median_step10_error_m) << '\n';
}

inline ExperimentSummary read_summary_csv(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    detail::expect_header(in, "mode,seeds,median_final_error_m,iqr_final_error_m,median_step10_error_m",
                          path.string());
    ExperimentSummary summary;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_csv(line);
        if (f.size() != 5) throw ConfigError(path.string() + ": malformed row '" + line + "'");
        const auto mode = parse_mode(f[0]);
        if (!mode) throw ConfigError(path.string() + ": unknown mode '" + f[0] + "'");
        summary.arms.push_back({*mode, detail::parse_size(f[1], path.string()),
                                detail::parse_double(f[2], path.string()),
                                detail::parse_double(f[3], path.string()),
                                detail::parse_double(f[4], path.string())});
    }
    return summary;
}

namespace detail {

struct JobOutput {
    std::vector<StepMetrics> metrics;
    std::vector<PlannerTraceRow> trace;
    std::vector<std::pair<std::size_t, SourceDist>> frames; // (step, posterior)
    std::vector<double> final_source;                       // final fused posterior
    std::vector<double> belief_probs;                       // site-major belief dump
    std::size_t belief_classes = 0;
};

inline std::string run_stem(Mode mode, std::uint64_t seed) {
    return std::string(to_string(mode)) + "_seed" + std::to_string(seed);
}

} // namespace detail

/// Runs every (mode x seed) combination of a scenario, writes all artifacts
/// under out_dir, and returns per-arm summary statistics.
///
/// Workers only simulate; every file is written by the calling thread in a
/// fixed (mode, seed) order, so two executions of the same configuration
/// produce byte-identical outputs regardless of scheduling.
inline ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    if (cfg.modes.empty()) throw ConfigError("run_experiment: no modes selected");
    if (cfg.seeds.empty()) throw ConfigError("run_experiment: no seeds given");
    if (!fs::exists(cfg.ontology_path))
        throw ConfigError("ontology file not found: " + cfg.ontology_path.string());
    if (!fs::exists(cfg.scenario_path))
        throw ConfigError("scenario file not found: " + cfg.scenario_path.string());

    const Ontology ontology = load_ontology(cfg.ontology_path);
    const Scenario scenario = load_scenario(cfg.scenario_path, ontology);
    if (std::error_code ec; fs::create_directories(cfg.out_dir, ec), ec)
        throw ConfigError("cannot create output directory: " + cfg.out_dir.string());

    struct Job {
        Mode mode;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (Mode mode : cfg.modes)
        for (std::uint64_t seed : cfg.seeds) jobs.push_back({mode, seed});

    std::vector<detail::JobOutput> outputs(jobs.size());
    std::vector<std::exception_ptr> failures(jobs.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            try {
                detail::JobOutput& out = outputs[i];
                RunOptions opt;
                opt.mode = jobs[i].mode;
                opt.strategy = cfg.strategy;
                opt.seed = jobs[i].seed;
                if (cfg.pgm_every > 0)
                    opt.on_step = [&](std::size_t step, const SourceDist& fused) {
                        if (step % cfg.pgm_every == 0) out.frames.emplace_back(step, fused);
                    };
                RunResult res = run(scenario, ontology, opt);
                out.metrics = std::move(res.metrics);
                out.trace = std::move(res.trace);
                out.final_source = res.fused.probs();
                out.belief_classes = res.belief.class_count();
                out.belief_probs.reserve(res.belief.site_count() * out.belief_classes);
                for (std::size_t s = 0; s < res.belief.site_count(); ++s) {
                    const Categorical d = res.belief.site_dist(s);
                    out.belief_probs.insert(out.belief_probs.end(), d.begin(), d.end());
                }
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };

    std::size_t hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const std::size_t n_threads = std::min(cfg.threads > 0 ? cfg.threads : hw, jobs.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const auto& failure : failures)
        if (failure) std::rethrow_exception(failure);

    // Single-writer phase, in job order.
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const detail::JobOutput& out = outputs[i];
        const std::string stem = detail::run_stem(jobs[i].mode, jobs[i].seed);
        write_metrics_csv(cfg.out_dir / ("run_" + stem + ".csv"), out.metrics);
        write_source_csv(cfg.out_dir / ("source_" + stem + ".csv"),
                         Categorical(out.final_source));
        if (cfg.strategy == Strategy::InfoGain)
            write_trace_csv(cfg.out_dir / ("trace_" + stem + ".csv"), out.trace);
        for (const auto& [step, fused] : out.frames) {
            char suffix[32];
            std::snprintf(suffix, sizeof suffix, "_step%04zu.pgm", step);
            write_pgm(cfg.out_dir / ("map_" + stem + suffix), fused, scenario.grid);
        }
        auto belief_out = detail::open_output(cfg.out_dir / ("belief_" + stem + ".csv"));
        belief_out << "cell,class,prob\n";
        for (std::size_t r = 0; r < out.belief_probs.size(); ++r)
            belief_out << r / out.belief_classes << ',' << r % out.belief_classes << ','
                       << detail::format_double(out.belief_probs[r]) << '\n';
    }

    ExperimentSummary summary;
    for (std::size_t m = 0; m < cfg.modes.size(); ++m) {
        std::vector<double> final_err, step10_err;
        for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
            const auto& rows = outputs[m * cfg.seeds.size() + s].metrics;
            final_err.push_back(rows.back().error_m);
            step10_err.push_back(rows[std::min<std::size_t>(10, rows.size() - 1)].error_m);
        }
        summary.arms.push_back({cfg.modes[m], cfg.seeds.size(), median(final_err),
                                interquartile_range(final_err), median(step10_err)});
    }
    write_summary_csv(cfg.out_dir / "summary.csv", summary);
    return summary;
}

namespace detail {
inline volatile double bench_sink = 0.0;
}

/// Median wall-clock milliseconds of one full estimation cycle (semantic
/// source scores plus fusion with an olfactory map) on a synthetic grid of
/// the given size, over `reps` repetitions.
inline double bench_fusion_cycle_ms(std::size_t width, std::size_t height, std::size_t classes,
                                    std::size_t reps = 21) {
    if (width == 0 || height == 0 || classes == 0 || reps == 0)
        throw ConfigError("bench_fusion_cycle_ms: sizes and reps must be positive");
    Grid2D grid(width, height, 1.0);

    OntologyConfig cfg;
    std::vector<double> emission(classes);
    double esum = 0.0;
    for (std::size_t i = 0; i < classes; ++i) {
        cfg.classes.push_back("class" + std::to_string(i));
        emission[i] = static_cast<double>(i + 1);
        esum += emission[i];
    }
    for (double& e : emission) e /= esum;
    cfg.gases = {"gas"};
    cfg.class_priors.assign(classes, 1.0 / static_cast<double>(classes));
    cfg.emission = {emission};
    const Ontology ontology = Ontology::from_config(cfg);

    SemanticBelief belief = SemanticBelief::init(grid, ontology);
    Rng rng(20260816);
    std::vector<double> lik(classes);
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        for (double& l : lik) l = rng.uniform(0.2, 1.0);
        belief.update({c, lik});
    }
    std::vector<double> olf_w(grid.cell_count());
    for (double& w : olf_w) w = rng.uniform(0.1, 1.0);
    const SourceDist olfactory = normalize(std::move(olf_w));
    const GasClassBelief gas = Categorical::point_mass(1, 0);

    std::vector<double> ms;
    ms.reserve(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        const SourceDist semantic = semantic_source_mixture(belief, ontology, gas);
        const SourceDist fused = fuse(olfactory, semantic);
        const auto t1 = std::chrono::steady_clock::now();
        detail::bench_sink = detail::bench_sink + fused[0];
        ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return median(std::move(ms));
}

} // namespace semgsl
