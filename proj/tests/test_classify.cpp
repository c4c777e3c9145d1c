#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "gbx/classify.hpp"
#include "gbx/error.hpp"
#include "gbx/rng.hpp"

using namespace gbx;

namespace {

ClassifierSpec forest_spec(std::uint64_t seed) {
    ClassifierSpec spec;
    spec.kind = ClassifierKind::random_forest;
    spec.seed = seed;
    return spec;
}

ClassifierSpec knn_spec(std::size_t k) {
    ClassifierSpec spec;
    spec.kind = ClassifierKind::knn;
    spec.k_neighbors = k;
    return spec;
}

// two tight blobs at +-5
void make_blobs(Eigen::MatrixXd& X, std::vector<int>& y, std::size_t per_class, Rng& rng) {
    X.resize(static_cast<Eigen::Index>(2 * per_class), 2);
    y.assign(2 * per_class, 0);
    for (std::size_t i = 0; i < 2 * per_class; ++i) {
        const int cls = i < per_class ? 0 : 1;
        const double center = cls == 0 ? -5.0 : 5.0;
        X(static_cast<Eigen::Index>(i), 0) = rng.normal(center, 0.1);
        X(static_cast<Eigen::Index>(i), 1) = rng.normal(center, 0.1);
        y[i] = cls;
    }
}

}  // namespace

TEST_CASE("nearest neighbour returns the label of an exact match") {
    Eigen::MatrixXd X(3, 2);
    X << 0, 0, 1, 1, 2, 2;
    const std::vector<int> y = {0, 1, 0};
    Eigen::MatrixXd probe(1, 2);
    probe << 1, 1;
    const std::vector<int> got = train_predict(X, y, probe, knn_spec(1));
    CHECK(got[0] == 1);
}

TEST_CASE("separated blobs classify perfectly") {
    Rng rng(42);
    Eigen::MatrixXd X;
    std::vector<int> y;
    make_blobs(X, y, 50, rng);
    Eigen::MatrixXd probes(4, 2);
    probes << -5.1, -4.9, -4.8, -5.2, 5.1, 4.9, 4.95, 5.05;
    const std::vector<int> expect = {0, 0, 1, 1};
    CHECK(train_predict(X, y, probes, forest_spec(7)) == expect);
    CHECK(train_predict(X, y, probes, knn_spec(5)) == expect);
}

TEST_CASE("random labels yield chance error") {
    Rng rng(1313);
    double total = 0.0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        Eigen::MatrixXd X(60, 3);
        std::vector<int> y(60);
        for (Eigen::Index i = 0; i < 60; ++i) {
            for (Eigen::Index j = 0; j < 3; ++j) X(i, j) = rng.normal();
            y[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(2));
        }
        Eigen::MatrixXd probes(40, 3);
        std::vector<int> truth(40);
        for (Eigen::Index i = 0; i < 40; ++i) {
            for (Eigen::Index j = 0; j < 3; ++j) probes(i, j) = rng.normal();
            truth[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(2));
        }
        const std::vector<int> got = train_predict(X, y, probes, forest_spec(rng.next_u64()));
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < 40; ++i)
            if (got[i] != truth[i]) ++wrong;
        total += static_cast<double>(wrong) / 40.0;
    }
    const double mean_error = total / seeds;
    CHECK(mean_error >= 0.4);
    CHECK(mean_error <= 0.6);
}

TEST_CASE("single-class training is rejected") {
    Eigen::MatrixXd X(3, 1);
    X << 0, 1, 2;
    CHECK_THROWS_AS(train_predict(X, {1, 1, 1}, X, forest_spec(0)), validation_error);
}

TEST_CASE("forest training is deterministic in the seed") {
    Rng rng(515);
    Eigen::MatrixXd X(30, 4);
    std::vector<int> y(30);
    for (Eigen::Index i = 0; i < 30; ++i) {
        for (Eigen::Index j = 0; j < 4; ++j) X(i, j) = rng.normal();
        y[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(3));
    }
    CHECK(train_predict(X, y, X, forest_spec(99)) == train_predict(X, y, X, forest_spec(99)));
}

TEST_CASE("failure probability is the tail fraction") {
    CHECK(failure_probability({0.2, 0.6, 0.5}) == doctest::Approx(2.0 / 3.0));
    CHECK(failure_probability({0.0, 0.0, 0.0}) == 0.0);
    CHECK(failure_probability({0.5, 0.5}) == 1.0);
    CHECK_THROWS_AS(failure_probability({}), validation_error);
}

TEST_CASE("stratified split keeps class proportions") {
    std::vector<int> labels;
    for (int i = 0; i < 60; ++i) labels.push_back(0);
    for (int i = 0; i < 40; ++i) labels.push_back(1);
    Rng rng(77);
    const auto [train, test] = stratified_split(labels, 50, rng);
    CHECK(train.size() == 50);
    CHECK(test.size() == 50);
    std::size_t c0 = 0;
    for (std::size_t idx : train)
        if (labels[idx] == 0) ++c0;
    CHECK(c0 == 30);  // 60% of 50

    Rng rng2(78);
    CHECK_THROWS_AS(stratified_split(labels, 100, rng2), validation_error);
}

TEST_CASE("stratified split keeps rare classes present") {
    std::vector<int> labels(20, 0);
    labels[19] = 1;
    Rng rng(5);
    const auto [train, test] = stratified_split(labels, 4, rng);
    std::size_t ones = 0;
    for (std::size_t idx : train) ones += labels[idx] == 1;
    CHECK(ones == 1);
}

TEST_CASE("dimension rules resolve against the matrix size") {
    DistanceMatrix D;
    D.n = 6;
    D.entries.assign(36, 1.0);
    for (std::size_t i = 0; i < 6; ++i) D.entries[i * 6 + i] = 0.0;
    CHECK(DimensionRule::fixed(8).resolve(D) == 5);
    CHECK(DimensionRule::fixed(3).resolve(D) == 3);
    CHECK(DimensionRule::cap(10).resolve(D) == 5);
    const std::size_t d = DimensionRule::second_elbow(10).resolve(D);
    CHECK(d >= 1);
    CHECK(d <= 5);
}

TEST_CASE("experiments on a zero tensor sit at chance") {
    PerQueryDistances pqd;
    pqd.n_models = 40;
    pqd.n_queries = 6;
    pqd.data.assign(pqd.size(), 0.0);
    std::vector<int> labels(40);
    for (std::size_t i = 0; i < 40; ++i) labels[i] = static_cast<int>(i % 2);

    ExperimentConfig cfg;
    cfg.m_grid = {3};
    cfg.n_train_grid = {20};
    cfg.repetitions = 60;
    cfg.distributions = {{PoolKind::uniform, {}}};
    cfg.d_rule = DimensionRule::fixed(2);
    cfg.classifier = forest_spec(0);
    cfg.classifier.trees = 30;
    cfg.master_seed = 7;
    const ExperimentResult res = run_experiment(pqd, labels, {}, cfg);
    const CellResult& cell = res.cell("uniform", 3, 20);
    CHECK(cell.mean_error >= 0.35);
    CHECK(cell.mean_error <= 0.65);
}

TEST_CASE("experiment results are identical across thread counts") {
    Rng rng(808);
    PerQueryDistances pqd;
    pqd.n_models = 20;
    pqd.n_queries = 8;
    pqd.data.assign(pqd.size(), 0.0);
    for (std::size_t q = 0; q < 8; ++q)
        for (std::size_t i = 0; i < 20; ++i)
            for (std::size_t j = i + 1; j < 20; ++j)
                pqd.at(q, i, j) = pqd.at(q, j, i) = rng.uniform01();
    std::vector<int> labels(20);
    for (std::size_t i = 0; i < 20; ++i) labels[i] = static_cast<int>(i % 2);

    ExperimentConfig cfg;
    cfg.m_grid = {1, 4};
    cfg.n_train_grid = {10, 14};
    cfg.repetitions = 12;
    cfg.distributions = {{PoolKind::uniform, {}}, {PoolKind::custom, {0, 2, 4}}};
    cfg.d_rule = DimensionRule::second_elbow(10);
    cfg.classifier = forest_spec(0);
    cfg.classifier.trees = 20;
    cfg.master_seed = 99;

    cfg.threads = 1;
    const ExperimentResult seq = run_experiment(pqd, labels, {}, cfg);
    cfg.threads = 4;
    const ExperimentResult par = run_experiment(pqd, labels, {}, cfg);
    REQUIRE(seq.cells.size() == par.cells.size());
    for (std::size_t i = 0; i < seq.cells.size(); ++i) {
        CHECK(seq.cells[i].mean_error == par.cells[i].mean_error);
        CHECK(seq.cells[i].failure_probability == par.cells[i].failure_probability);
        CHECK(seq.cells[i].stderr_mean == par.cells[i].stderr_mean);
    }
}

TEST_CASE("pool duplication leaves results distribution-identical") {
    Rng rng(909);
    PerQueryDistances pqd;
    pqd.n_models = 24;
    pqd.n_queries = 6;
    pqd.data.assign(pqd.size(), 0.0);
    for (std::size_t q = 0; q < 6; ++q)
        for (std::size_t i = 0; i < 24; ++i)
            for (std::size_t j = i + 1; j < 24; ++j) {
                const double v = rng.uniform01() + (i % 2 == j % 2 ? 0.0 : 0.4);
                pqd.at(q, i, j) = pqd.at(q, j, i) = v;
            }
    std::vector<int> labels(24);
    for (std::size_t i = 0; i < 24; ++i) labels[i] = static_cast<int>(i % 2);

    ExperimentConfig cfg;
    cfg.m_grid = {3};
    cfg.n_train_grid = {12};
    cfg.repetitions = 150;
    cfg.d_rule = DimensionRule::fixed(3);
    cfg.classifier = forest_spec(0);
    cfg.classifier.trees = 20;
    cfg.master_seed = 5;

    cfg.distributions = {{PoolKind::custom, {0, 1, 2, 3, 4, 5}}};
    const CellResult once = run_experiment(pqd, labels, {}, cfg).cells.at(0);
    cfg.distributions = {{PoolKind::custom, {0, 1, 2, 3, 4, 5, 0, 1, 2, 3, 4, 5}}};
    const CellResult twice = run_experiment(pqd, labels, {}, cfg).cells.at(0);

    const double slack =
        3.0 * std::sqrt(once.stderr_mean * once.stderr_mean + twice.stderr_mean * twice.stderr_mean) +
        0.01;
    CHECK(std::abs(once.mean_error - twice.mean_error) <= slack);
}
