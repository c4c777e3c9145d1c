#include "gbx/parity_experiment.hpp"

#include <algorithm>
#include <cmath>

#include "gbx/error.hpp"
#include "gbx/parallel.hpp"
#include "gbx/rng.hpp"

namespace gbx {

namespace {

// Models restricted to the given indices (for estimation on the labeled
// subset only).
SyntheticModels subset_models(const SyntheticModels& models, const std::vector<std::size_t>& keep) {
    SyntheticModels out;
    out.n = keep.size();
    out.r = models.r;
    out.seed = models.seed;
    out.theta.resize(out.n * out.r);
    out.labels.resize(out.n);
    for (std::size_t k = 0; k < keep.size(); ++k) {
        for (std::size_t l = 0; l < models.r; ++l) out.theta[k * out.r + l] = models.bit(keep[k], l);
        out.labels[k] = models.labels[keep[k]];
    }
    return out;
}

struct RepetitionState {
    SyntheticWorld world;
    SyntheticModels models;
    std::vector<std::size_t> train, test;
    std::vector<std::size_t> pool;
};

// Pools estimated end-to-end from the labeled models: uniform pilot
// multiset, query-model matrix, zero-set estimation, then mapped back to
// original query indices.
std::vector<std::size_t> estimated_pool(const ParityExperimentConfig& cfg, const RepetitionState& state,
                                        std::uint64_t rep, bool want_signal) {
    Rng pilot_rng(derive_seed(cfg.master_seed, {rep, 3}));
    std::vector<std::size_t> pilot;
    if (cfg.pilot_m == 0) {
        pilot.resize(cfg.M);
        for (std::size_t q = 0; q < cfg.M; ++q) pilot[q] = q;
    } else {
        pilot.resize(cfg.pilot_m);
        for (auto& q : pilot) q = pilot_rng.below(cfg.M);
    }

    const SyntheticModels labeled = subset_models(state.models, state.train);
    const PerQueryDistances pqd = synthetic_distances_subset(
        state.world, labeled, pilot, cfg.noise_sigma, derive_seed(cfg.master_seed, {rep, 7}));
    QueryMultiset identity;
    identity.indices.resize(pilot.size());
    for (std::size_t k = 0; k < pilot.size(); ++k) identity.indices[k] = k;
    const QueryModelMatrix E = build_query_model_matrix(pqd, identity);

    GmmConfig gmm = cfg.gmm;
    gmm.seed = derive_seed(cfg.master_seed, {rep, 4});
    const FactorizationEstimate est = estimate_zero_sets(E, 10, 1e-10, gmm);

    std::vector<std::size_t> pool;
    const auto& rows = want_signal ? est.signal_set : est.orthogonal_set;
    for (std::size_t row : rows) pool.push_back(pilot[row]);
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    if (pool.empty())
        throw validation_error(std::string("parity experiment: estimated ") +
                               (want_signal ? "signal" : "orthogonal") + " pool is empty");
    return pool;
}

RepetitionState make_repetition(const ParityExperimentConfig& cfg, std::uint64_t rep) {
    RepetitionState state;
    state.world = generate_world(cfg.M, cfg.r, cfg.rho, derive_seed(cfg.master_seed, {rep, 0}));
    state.models = generate_models(cfg.n_train + cfg.n_test, cfg.r, derive_seed(cfg.master_seed, {rep, 1}));
    Rng split_rng(derive_seed(cfg.master_seed, {rep, 2}));
    std::tie(state.train, state.test) = stratified_split(state.models.labels, cfg.n_train, split_rng);

    switch (cfg.pool) {
        case PoolKind::uniform: {
            state.pool.resize(cfg.M);
            for (std::size_t q = 0; q < cfg.M; ++q) state.pool[q] = q;
            break;
        }
        case PoolKind::signal:
            state.pool = state.world.signal_queries;
            if (state.pool.empty()) throw validation_error("parity experiment: signal pool is empty");
            break;
        case PoolKind::orthogonal:
            state.pool = state.world.orthogonal_queries;
            if (state.pool.empty()) throw validation_error("parity experiment: orthogonal pool is empty");
            break;
        case PoolKind::estimated_signal:
            state.pool = estimated_pool(cfg, state, rep, true);
            break;
        case PoolKind::estimated_orthogonal:
            state.pool = estimated_pool(cfg, state, rep, false);
            break;
        case PoolKind::custom:
            throw validation_error("parity experiment: custom pools are not defined for parity worlds");
    }
    return state;
}

double error_for_budget(const ParityExperimentConfig& cfg, const RepetitionState& state, std::uint64_t rep,
                        std::size_t m) {
    Rng rng(derive_seed(cfg.master_seed, {rep, 5, m, static_cast<std::uint64_t>(cfg.pool)}));

    std::vector<std::size_t> sampled(m);
    for (auto& q : sampled) q = state.pool[rng.below(state.pool.size())];

    const PerQueryDistances pqd = synthetic_distances_subset(
        state.world, state.models, sampled, cfg.noise_sigma, derive_seed(cfg.master_seed, {rep, 6, m}));
    QueryMultiset identity;
    identity.indices.resize(m);
    for (std::size_t k = 0; k < m; ++k) identity.indices[k] = k;

    const DistanceMatrix D = aggregate_distance_matrix(pqd, identity);
    const std::size_t d = cfg.d_rule.resolve(D);
    const ModelRepresentation rep_coords = classical_mds(D, d);

    Eigen::MatrixXd train_coords(static_cast<Eigen::Index>(state.train.size()), rep_coords.coords.cols());
    Eigen::MatrixXd test_coords(static_cast<Eigen::Index>(state.test.size()), rep_coords.coords.cols());
    std::vector<int> train_labels(state.train.size());
    for (std::size_t i = 0; i < state.train.size(); ++i) {
        train_coords.row(static_cast<Eigen::Index>(i)) =
            rep_coords.coords.row(static_cast<Eigen::Index>(state.train[i]));
        train_labels[i] = state.models.labels[state.train[i]];
    }
    for (std::size_t i = 0; i < state.test.size(); ++i)
        test_coords.row(static_cast<Eigen::Index>(i)) =
            rep_coords.coords.row(static_cast<Eigen::Index>(state.test[i]));

    ClassifierSpec seeded = cfg.classifier;
    seeded.seed = rng.next_u64();
    const std::vector<int> predicted = train_predict(train_coords, train_labels, test_coords, seeded);

    std::size_t wrong = 0;
    for (std::size_t i = 0; i < state.test.size(); ++i)
        if (predicted[i] != state.models.labels[state.test[i]]) ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(state.test.size());
}

}  // namespace

void ParityExperimentConfig::validate() const {
    if (M < 1) throw validation_error("parity experiment: M must be >= 1");
    if (r < 1) throw validation_error("parity experiment: r must be >= 1");
    if (!(rho >= 0.0 && rho <= 1.0)) throw validation_error("parity experiment: rho must lie in [0, 1]");
    if (n_train < 2) throw validation_error("parity experiment: n_train must be >= 2");
    if (n_test < 1) throw validation_error("parity experiment: n_test must be >= 1");
    if (m_grid.empty()) throw validation_error("parity experiment: m grid must be non-empty");
    for (std::size_t m : m_grid)
        if (m < 1) throw validation_error("parity experiment: query budgets must be >= 1");
    if (repetitions < 1) throw validation_error("parity experiment: repetitions must be >= 1");
    classifier.validate();
}

std::vector<ParityCell> run_parity_experiment(const ParityExperimentConfig& cfg) {
    cfg.validate();
    std::vector<std::vector<double>> errors(cfg.m_grid.size(),
                                            std::vector<double>(cfg.repetitions, 0.0));

    parallel_for(cfg.repetitions, cfg.threads, [&](std::size_t rep) {
        const RepetitionState state = make_repetition(cfg, rep);
        for (std::size_t mi = 0; mi < cfg.m_grid.size(); ++mi)
            errors[mi][rep] = error_for_budget(cfg, state, rep, cfg.m_grid[mi]);
    });

    std::vector<ParityCell> cells(cfg.m_grid.size());
    for (std::size_t mi = 0; mi < cfg.m_grid.size(); ++mi) {
        ParityCell& cell = cells[mi];
        cell.m = cfg.m_grid[mi];
        cell.repetitions = cfg.repetitions;
        double mean = 0.0;
        for (double e : errors[mi]) mean += e;
        mean /= static_cast<double>(cfg.repetitions);
        double var = 0.0;
        for (double e : errors[mi]) var += (e - mean) * (e - mean);
        cell.mean_error = mean;
        cell.stderr_mean = cfg.repetitions > 1 ? std::sqrt(var / static_cast<double>(cfg.repetitions - 1) /
                                                           static_cast<double>(cfg.repetitions))
                                               : 0.0;
        cell.failure_probability = failure_probability(errors[mi], 0.5);
    }
    return cells;
}

double parity_repetition_error(const ParityExperimentConfig& cfg, std::size_t m, std::uint64_t rep_seed) {
    cfg.validate();
    ParityExperimentConfig local = cfg;
    local.master_seed = rep_seed;
    const RepetitionState state = make_repetition(local, 0);
    return error_for_budget(local, state, 0, m);
}

}  // namespace gbx
