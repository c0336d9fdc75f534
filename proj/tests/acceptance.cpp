// End-to-end acceptance checks. Each numbered criterion prints exactly one
// [PASS]/[FAIL] line with the measured evidence; the process exits non-zero
// if any criterion fails.
//
//   1. the factorized source posterior matches exhaustive enumeration
//   2. multiply-and-normalize fusion matches the exhaustive joint posterior
//   3. reduction identities (point-mass gas, uniform olfaction, column sums)
//   4. mutual-information bounds and field-of-view monotonicity
//   5. semantic arms beat the olfaction-only arm on the kitchen batch
//   6. one full estimation cycle on a 100x100x20 problem stays under 50 ms
//   7. repeated batches produce byte-identical outputs

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <semgsl/semgsl.hpp>

namespace {

using namespace semgsl;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Categorical random_distribution(Rng& rng, std::size_t n) {
    std::vector<double> w(n);
    for (double& x : w) x = rng.uniform(0.05, 1.0);
    return normalize(std::move(w));
}

Ontology random_ontology(Rng& rng, std::size_t classes, std::size_t gases) {
    OntologyConfig cfg;
    for (std::size_t i = 0; i < classes; ++i) cfg.classes.push_back("class" + std::to_string(i));
    for (std::size_t g = 0; g < gases; ++g) cfg.gases.push_back("gas" + std::to_string(g));
    cfg.class_priors = random_distribution(rng, classes).probs();
    for (std::size_t g = 0; g < gases; ++g)
        cfg.emission.push_back(random_distribution(rng, classes).probs());
    return Ontology::from_config(cfg);
}

/// One random inference problem spelled out twice: as raw tables for the
/// exhaustive reference and as a belief/ontology pair for the estimator.
struct RandomProblem {
    JointInstance instance;
    SemanticBelief belief;
    Ontology ontology;
    GasClassBelief gas_belief;
};

RandomProblem random_problem(std::uint64_t seed, std::size_t cells, std::size_t classes,
                             std::size_t gases) {
    Rng rng(seed);
    JointInstance inst;
    inst.cells = cells;
    inst.classes = classes;

    std::vector<Categorical> priors;
    for (std::size_t c = 0; c < cells; ++c) {
        Categorical p = random_distribution(rng, classes);
        inst.class_priors.push_back(p.probs());
        priors.push_back(std::move(p));
    }

    Ontology ontology = random_ontology(rng, classes, gases);
    for (std::size_t g = 0; g < gases; ++g)
        inst.emission.push_back(ontology.emission_row(GasId{g}).probs());

    SemanticBelief belief = SemanticBelief::with_priors(Grid2D(cells, 1, 1.0), std::move(priors));
    for (std::size_t c = 0; c < cells; ++c) {
        std::vector<double> lik(classes);
        for (double& l : lik) l = rng.uniform(0.05, 1.0);
        inst.observation_likelihood.push_back(lik);
        belief.update({c, lik});
    }

    GasClassBelief gas_belief =
        gases == 1 ? Categorical::point_mass(1, 0) : random_distribution(rng, gases);
    inst.gas_weights = gas_belief.probs();
    return {std::move(inst), std::move(belief), std::move(ontology), std::move(gas_belief)};
}

/// A random planning snapshot over a small free grid, with one cell whose
/// class is known with certainty.
struct GainState {
    Grid2D grid;
    Ontology ontology;
    SemanticBelief belief;
    SourceDist olfaction;
    std::size_t certain_cell = 0;
};

GainState make_gain_state(std::uint64_t seed) {
    Rng rng(seed * 7 + 3);
    const std::size_t w = 2 + seed % 3;
    const std::size_t h = 2 + (seed / 3) % 3;
    const std::size_t classes = 2 + seed % 2;
    Grid2D grid(w, h, 1.0);
    Ontology ontology = random_ontology(rng, classes, 1);

    SemanticBelief belief = SemanticBelief::init(grid, ontology);
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        if (rng.uniform(0.0, 1.0) >= 0.8) continue;
        std::vector<double> lik(classes);
        for (double& l : lik) l = rng.uniform(0.05, 1.0);
        belief.update({c, lik});
    }

    const std::size_t certain = seed % grid.cell_count();
    std::vector<double> onehot(classes, 0.0);
    onehot[seed % classes] = 1.0;
    belief.update({certain, onehot});

    SourceDist olfaction = random_distribution(rng, grid.cell_count());
    return {std::move(grid), std::move(ontology), std::move(belief), std::move(olfaction),
            certain};
}

std::string read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> dir_listing(const fs::path& dir) {
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir))
        names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end());
    return names;
}

ExperimentConfig kitchen_config(const fs::path& out_dir, std::size_t seed_count,
                                std::size_t pgm_every) {
    ExperimentConfig cfg;
    cfg.scenario_path = fs::path(SEMGSL_DATA_DIR) / "kitchen_scenario.json";
    cfg.ontology_path = fs::path(SEMGSL_DATA_DIR) / "apartment_ontology.json";
    cfg.out_dir = out_dir;
    cfg.modes = {Mode::Olfaction, Mode::Semantic, Mode::SemanticRooms};
    cfg.strategy = Strategy::Scripted;
    cfg.seeds.clear();
    for (std::uint64_t s = 1; s <= seed_count; ++s) cfg.seeds.push_back(s);
    cfg.pgm_every = pgm_every;
    cfg.threads = 0;
    return cfg;
}

} // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, bool ok, const std::string& detail) {
        std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    };
    auto guarded = [&](int id, auto&& body) {
        try {
            body();
        } catch (const std::exception& e) {
            report(id, false, std::string("unexpected error: ") + e.what());
        }
    };
    char buf[512];

    // 1. Factorized estimator vs exhaustive enumeration.
    guarded(1, [&] {
        const auto t0 = Clock::now();
        double worst = 0.0;
        std::size_t count = 0;
        for (std::uint64_t seed = 1; seed <= 120; ++seed) {
            const std::size_t cells = 2 + seed % 5, classes = 2 + seed % 2;
            const RandomProblem p = random_problem(seed, cells, classes, 1);
            worst = std::max(worst, diff_maps(semantic_source(p.belief, p.ontology, GasId{0}),
                                              semantic_source_bruteforce(p.instance)));
            ++count;
        }
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            const std::size_t cells = 2 + seed % 5, classes = 2 + seed % 2;
            const RandomProblem p = random_problem(9000 + seed, cells, classes, 2);
            worst = std::max(worst,
                             diff_maps(semantic_source_mixture(p.belief, p.ontology, p.gas_belief),
                                       semantic_source_bruteforce(p.instance)));
            ++count;
        }
        const double secs = seconds_since(t0);
        std::snprintf(buf, sizeof buf,
                      "factorized source posterior matches exhaustive enumeration "
                      "(%zu instances, max gap %.3g, %.2f s)",
                      count, worst, secs);
        report(1, count >= 200 && worst < 1e-9 && secs < 60.0, buf);
    });

    // 2. Fusion vs the exhaustive joint posterior.
    guarded(2, [&] {
        double worst = 0.0;
        std::size_t count = 0;
        for (std::uint64_t seed = 1; seed <= 220; ++seed) {
            const std::size_t cells = 2 + seed % 5, classes = 2 + seed % 2;
            const std::size_t gases = 1 + seed % 2;
            RandomProblem p = random_problem(40000 + seed, cells, classes, gases);

            Rng orng(seed * 31 + 7);
            std::vector<double> olf(cells);
            for (double& v : olf) v = orng.uniform(0.05, 1.0);
            p.instance.olfaction_likelihood = olf;

            const SourceDist semantic =
                gases == 1 ? semantic_source(p.belief, p.ontology, GasId{0})
                           : semantic_source_mixture(p.belief, p.ontology, p.gas_belief);
            const SourceDist fused = fuse(normalize(std::vector<double>(olf)), semantic);
            worst = std::max(worst, diff_maps(fused, joint_posterior(p.instance)));
            ++count;
        }
        std::snprintf(buf, sizeof buf,
                      "multiply-and-normalize fusion matches the exhaustive joint posterior "
                      "(%zu instances, max gap %.3g)",
                      count, worst);
        report(2, count >= 200 && worst < 1e-9, buf);
    });

    // 3. Reduction identities.
    guarded(3, [&] {
        double worst_point = 0.0, worst_uniform = 0.0, worst_columns = 0.0;

        for (std::uint64_t seed = 1; seed <= 50; ++seed) {
            const std::size_t cells = 2 + seed % 5, classes = 2 + seed % 2;
            const RandomProblem p = random_problem(70000 + seed, cells, classes, 2);

            // A point-mass gas belief must reproduce the single-gas path.
            const std::size_t which = seed % 2;
            const SourceDist mixture = semantic_source_mixture(
                p.belief, p.ontology, Categorical::point_mass(2, which));
            const SourceDist single = semantic_source(p.belief, p.ontology, GasId{which});
            worst_point = std::max(worst_point, diff_maps(mixture, single));

            // Fusing with a uniform partner must change nothing.
            worst_uniform = std::max(
                worst_uniform, diff_maps(fuse(Categorical::uniform(cells), single), single));
        }

        // Column aggregation must preserve each column's mass exactly.
        for (std::uint64_t seed = 1; seed <= 25; ++seed) {
            Rng rng(seed * 13 + 1);
            const std::size_t w = 2 + seed % 3, h = 2 + seed % 2, layers = 2 + seed % 2;
            const Grid2D base(w, h, 1.0);
            const VoxelGrid vgrid(base, layers);
            const std::size_t classes = 3;

            Ontology ontology = random_ontology(rng, classes, 1);
            std::vector<Categorical> priors;
            for (std::size_t v = 0; v < vgrid.voxel_count(); ++v)
                priors.push_back(random_distribution(rng, classes));
            SemanticBelief belief = SemanticBelief::with_priors(vgrid, std::move(priors));
            for (std::size_t v = 0; v < vgrid.voxel_count(); ++v) {
                std::vector<double> lik(classes);
                for (double& l : lik) l = rng.uniform(0.05, 1.0);
                belief.update({v, lik});
            }

            const SourceDist voxels = semantic_source(belief, ontology, GasId{0});
            const SourceDist columns = aggregate_columns(voxels, vgrid);
            for (std::size_t c = 0; c < base.cell_count(); ++c) {
                double sum = 0.0;
                for (std::size_t l = 0; l < layers; ++l) sum += voxels[l * base.cell_count() + c];
                worst_columns = std::max(worst_columns, std::abs(columns[c] - sum));
            }
        }

        std::snprintf(buf, sizeof buf,
                      "reduction identities hold (point-mass gas gap %.3g, uniform-olfaction gap "
                      "%.3g, column-sum gap %.3g)",
                      worst_point, worst_uniform, worst_columns);
        report(3, worst_point <= 1e-12 && worst_uniform <= 1e-12 && worst_columns == 0.0, buf);
    });

    // 4. Mutual-information bounds and sensor monotonicity.
    guarded(4, [&] {
        bool bounds_ok = true;
        double worst_certain = 0.0;
        std::size_t cells_checked = 0;
        for (std::uint64_t seed = 1; seed <= 50; ++seed) {
            const GainState st = make_gain_state(seed);
            const GainContext ctx = make_gain_context(st.belief, st.ontology,
                                                      Categorical::point_mass(1, 0),
                                                      &st.olfaction);
            for (std::size_t c = 0; c < st.belief.site_count(); ++c) {
                const double info = mutual_info_cell(ctx, CellId{c});
                if (!(info >= 0.0) || info > ctx.current_entropy + 1e-9) bounds_ok = false;
                ++cells_checked;
            }
            worst_certain =
                std::max(worst_certain, mutual_info_cell(ctx, CellId{st.certain_cell}));
        }

        std::size_t monotone_violations = 0;
        for (std::uint64_t seed = 1; seed <= 50; ++seed) {
            const GainState st = make_gain_state(500 + seed);
            const GainContext ctx = make_gain_context(st.belief, st.ontology,
                                                      Categorical::point_mass(1, 0),
                                                      &st.olfaction);
            Rng rng(seed * 101 + 9);
            const double x = rng.uniform(0.05, st.grid.width_m() - 0.05);
            const double y = rng.uniform(0.05, st.grid.height_m() - 0.05);
            const double heading = rng.uniform(-std::numbers::pi, std::numbers::pi);
            const double fov_wide = rng.uniform(0.8, 2.0 * std::numbers::pi);
            const double range_wide = rng.uniform(1.0, 5.0);
            const Pose wide{x, y, heading, fov_wide, range_wide};
            const Pose narrow{x, y, heading, fov_wide * rng.uniform(0.3, 0.95),
                              range_wide * rng.uniform(0.3, 0.95)};
            if (semantic_gain(ctx, wide) + 1e-12 < semantic_gain(ctx, narrow))
                ++monotone_violations;
        }

        std::snprintf(buf, sizeof buf,
                      "information gain bounded and monotone (%zu cells within [0, H]+1e-9, "
                      "certain-cell gain %.3g, %zu/50 pose pairs monotone)",
                      cells_checked, worst_certain, 50 - monotone_violations);
        report(4, bounds_ok && worst_certain <= 1e-12 && monotone_violations == 0, buf);
    });

    // 5. Kitchen batch: semantic arms beat olfaction alone.
    guarded(5, [&] {
        const fs::path out = fs::temp_directory_path() / "semgsl_acceptance_kitchen";
        fs::remove_all(out);
        const auto t0 = Clock::now();
        const ExperimentSummary s = run_experiment(kitchen_config(out, 25, 0));
        const double secs = seconds_since(t0);

        const ArmSummary& olf = s.arms[0];
        const ArmSummary& sem = s.arms[1];
        const ArmSummary& rooms = s.arms[2];
        const bool ok = sem.median_final_error_m <= 0.8 * olf.median_final_error_m &&
                        rooms.median_step10_error_m <= sem.median_step10_error_m && secs < 300.0;
        std::snprintf(buf, sizeof buf,
                      "kitchen batch over 25 seeds: median final error semantic %.3f m vs 0.8 x "
                      "olfaction %.3f m; step-10 error rooms %.3f m vs semantic %.3f m (%.1f s)",
                      sem.median_final_error_m, olf.median_final_error_m,
                      rooms.median_step10_error_m, sem.median_step10_error_m, secs);
        report(5, ok, buf);
    });

    // 6. One estimation cycle on a 100x100 grid with 20 classes.
    guarded(6, [&] {
        const double ms = bench_fusion_cycle_ms(100, 100, 20);
        std::snprintf(buf, sizeof buf,
                      "median semantic-source + fusion cycle on 100x100x20: %.3f ms (< 50 ms)",
                      ms);
        report(6, ms < 50.0, buf);
    });

    // 7. Determinism of repeated batches.
    guarded(7, [&] {
        const fs::path out_a = fs::temp_directory_path() / "semgsl_acceptance_rep_a";
        const fs::path out_b = fs::temp_directory_path() / "semgsl_acceptance_rep_b";
        fs::remove_all(out_a);
        fs::remove_all(out_b);
        run_experiment(kitchen_config(out_a, 3, 50));
        run_experiment(kitchen_config(out_b, 3, 50));

        const auto names_a = dir_listing(out_a);
        const auto names_b = dir_listing(out_b);
        bool ok = !names_a.empty() && names_a == names_b;
        std::string first_bad;
        if (ok) {
            for (const auto& name : names_a) {
                if (read_bytes(out_a / name) != read_bytes(out_b / name)) {
                    ok = false;
                    first_bad = name;
                    break;
                }
            }
        }
        if (ok)
            std::snprintf(buf, sizeof buf,
                          "two executions of the same batch are byte-identical (%zu files)",
                          names_a.size());
        else
            std::snprintf(buf, sizeof buf, "repeated batch outputs differ%s%s",
                          first_bad.empty() ? " in file listing" : " at ", first_bad.c_str());
        report(7, ok, buf);
    });

    return failures == 0 ? 0 : 1;
}
