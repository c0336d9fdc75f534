#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include <semgsl/belief.hpp>
#include <semgsl/grid.hpp>
#include <semgsl/ontology.hpp>

using namespace semgsl;

namespace {

Ontology two_class_ontology() {
    OntologyConfig cfg;
    cfg.classes = {"oven", "countertop"};
    cfg.gases = {"smoke"};
    cfg.class_priors = {0.5, 0.5};
    cfg.emission = {{0.8, 0.2}};
    return Ontology::from_config(cfg);
}

Ontology room_ontology() {
    OntologyConfig cfg;
    cfg.classes = {"oven", "countertop"};
    cfg.gases = {"smoke"};
    cfg.class_priors = {0.5, 0.5};
    cfg.emission = {{0.8, 0.2}};
    cfg.rooms = {"kitchen", "other"};
    cfg.room_priors = {{0.8, 0.2}, {0.3, 0.7}};
    return Ontology::from_config(cfg);
}

} // namespace

TEST(ConfusionMatrix, IdentityAndUniformError) {
    const auto id = ConfusionMatrix::identity(3);
    EXPECT_DOUBLE_EQ(id.prob(ClassId{1}, ClassId{1}), 1.0);
    EXPECT_DOUBLE_EQ(id.prob(ClassId{1}, ClassId{2}), 0.0);

    const auto cm = ConfusionMatrix::uniform_error(3, 0.8);
    EXPECT_DOUBLE_EQ(cm.prob(ClassId{0}, ClassId{0}), 0.8);
    EXPECT_DOUBLE_EQ(cm.prob(ClassId{0}, ClassId{1}), 0.1);
    // rows are distributions
    for (std::size_t t = 0; t < 3; ++t) {
        double s = 0.0;
        for (std::size_t d = 0; d < 3; ++d) s += cm.prob(ClassId{t}, ClassId{d});
        EXPECT_NEAR(s, 1.0, 1e-15);
    }
    // single-class detector degenerates to identity
    const auto one = ConfusionMatrix::uniform_error(1, 0.8);
    EXPECT_DOUBLE_EQ(one.prob(ClassId{0}, ClassId{0}), 1.0);
}

TEST(ConfusionMatrix, ValidatesRows) {
    EXPECT_THROW(ConfusionMatrix({{0.5, 0.6}, {0.5, 0.5}}), Error);
    EXPECT_THROW(ConfusionMatrix({{1.2, -0.2}, {0.5, 0.5}}), Error);
    EXPECT_THROW(ConfusionMatrix({{0.5, 0.5}, {1.0}}), Error);
}

TEST(ConfusionMatrix, ColumnGivesLikelihoodOverTrueClasses) {
    const ConfusionMatrix cm({{0.8, 0.2}, {0.3, 0.7}});
    const auto lik = likelihood_from_detection(cm, ClassId{0});
    ASSERT_EQ(lik.size(), 2u);
    EXPECT_DOUBLE_EQ(lik[0], 0.8);
    EXPECT_DOUBLE_EQ(lik[1], 0.3);
}

TEST(SemanticBelief, InitialisesToPriors) {
    const Grid2D g(2, 1, 1.0);
    const auto ont = two_class_ontology();
    const auto belief = SemanticBelief::init(g, ont);
    EXPECT_EQ(belief.site_count(), 2u);
    const auto d = belief.site_dist(0);
    EXPECT_DOUBLE_EQ(d[0], 0.5);
    EXPECT_DOUBLE_EQ(d[1], 0.5);
    EXPECT_DOUBLE_EQ(belief.init_prior(0)[0], 0.5);
}

TEST(SemanticBelief, RoomMapSelectsPerCellPriors) {
    const Grid2D g(2, 1, 1.0);
    const auto ont = room_ontology();
    const std::vector<RoomId> rooms = {RoomId{0}, RoomId{1}};
    const auto belief = SemanticBelief::init(g, ont, &rooms);
    EXPECT_DOUBLE_EQ(belief.site_dist(0)[0], 0.8);
    EXPECT_DOUBLE_EQ(belief.site_dist(1)[0], 0.3);
    EXPECT_DOUBLE_EQ(belief.init_prior(1)[1], 0.7);
}

TEST(SemanticBelief, UpdateAppliesBayesRule) {
    const Grid2D g(2, 1, 1.0);
    const auto ont = two_class_ontology();
    auto belief = SemanticBelief::init(g, ont);
    belief.update({0, {0.9, 0.1}});
    const auto d = belief.site_dist(0);
    EXPECT_DOUBLE_EQ(d[0], 0.9);
    EXPECT_DOUBLE_EQ(d[1], 0.1);
    // the other site is untouched
    EXPECT_DOUBLE_EQ(belief.site_dist(1)[0], 0.5);
    // a second identical observation sharpens it further: 0.81/0.82
    belief.update({0, {0.9, 0.1}});
    EXPECT_NEAR(belief.site_dist(0)[0], 0.81 / 0.82, 1e-15);
}

TEST(SemanticBelief, UpdateValidatesItsInputs) {
    const Grid2D g(2, 1, 1.0);
    const auto ont = two_class_ontology();
    auto belief = SemanticBelief::init(g, ont);
    EXPECT_THROW(belief.update({5, {0.9, 0.1}}), OutOfBoundsError);
    EXPECT_THROW(belief.update({0, {0.9, 0.1, 0.0}}), DomainMismatchError);
    EXPECT_THROW(belief.update({0, {0.9, -0.1}}), InvalidWeightError);
}

TEST(SemanticBelief, ContradictoryEvidenceLeavesBeliefUnchanged) {
    const Grid2D g(1, 1, 1.0);
    const auto ont = two_class_ontology();
    auto belief = SemanticBelief::init(g, ont);
    belief.update({0, {1.0, 0.0}}); // now certain of class 0
    EXPECT_THROW(belief.update({0, {0.0, 1.0}}), AllZeroError);
    // strong guarantee: the failed update changed nothing
    EXPECT_DOUBLE_EQ(belief.site_dist(0)[0], 1.0);
}

TEST(SemanticBelief, VoxelBackedSharesColumnRoom) {
    const VoxelGrid vg(Grid2D(2, 1, 1.0), 2);
    const auto ont = room_ontology();
    const std::vector<RoomId> rooms = {RoomId{0}, RoomId{1}};
    const auto belief = SemanticBelief::init(vg, ont, &rooms);
    EXPECT_TRUE(belief.voxel_backed());
    EXPECT_EQ(belief.site_count(), 4u);
    // voxel 2 = layer 1 of cell 0, so it carries the kitchen prior
    EXPECT_DOUBLE_EQ(belief.site_dist(2)[0], 0.8);
    EXPECT_DOUBLE_EQ(belief.site_dist(3)[0], 0.3);
}

TEST(SemanticBelief, WithPriorsOverridesRows) {
    const Grid2D g(2, 1, 1.0);
    const std::vector<Categorical> priors = {
        Categorical({0.9, 0.1}),
        Categorical({0.2, 0.8}),
    };
    const auto belief = SemanticBelief::with_priors(g, priors);
    EXPECT_DOUBLE_EQ(belief.site_dist(0)[0], 0.9);
    EXPECT_DOUBLE_EQ(belief.site_dist(1)[1], 0.8);
}

TEST(SemanticBelief, OccupiedSitesAreFlagged) {
    const Grid2D g(2, 1, 1.0, {1, 0});
    const auto ont = two_class_ontology();
    const auto belief = SemanticBelief::init(g, ont);
    EXPECT_TRUE(belief.site_is_free(0));
    EXPECT_FALSE(belief.site_is_free(1));
}
