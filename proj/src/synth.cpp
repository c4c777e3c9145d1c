#include "gbx/synth.hpp"

#include <algorithm>

#include "gbx/error.hpp"
#include "gbx/rng.hpp"

namespace gbx {

namespace {

// one symmetric slice: d2(i,j) = sum_l alpha_l * 1[theta_i,l != theta_j,l]
void fill_slice(const SyntheticWorld& world, const SyntheticModels& models, std::size_t q, double* slice,
                double noise_sigma, Rng* noise) {
    const std::size_t n = models.n;
    const std::size_t r = world.r;
    for (std::size_t i = 0; i < n; ++i) slice[i * n + i] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double d2 = 0.0;
            for (std::size_t l = 0; l < r; ++l)
                if (models.bit(i, l) != models.bit(j, l))
                    d2 += world.alpha(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(l));
            if (noise_sigma > 0.0 && noise) d2 = std::max(0.0, d2 + noise_sigma * noise->normal());
            slice[i * n + j] = d2;
            slice[j * n + i] = d2;
        }
    }
}

}  // namespace

SyntheticWorld generate_world(std::size_t M, std::size_t r, double rho, std::uint64_t seed) {
    if (M < 1) throw validation_error("synthetic world: M must be >= 1");
    if (r < 1) throw validation_error("synthetic world: r must be >= 1");
    if (!(rho >= 0.0 && rho <= 1.0)) throw validation_error("synthetic world: rho must lie in [0, 1]");

    SyntheticWorld world;
    world.M = M;
    world.r = r;
    world.rho = rho;
    world.seed = seed;
    world.alpha.setZero(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(r));

    Rng rng(derive_seed(seed, {0x5741ULL}));
    for (std::size_t q = 0; q < M; ++q) {
        bool any_signal = false;
        for (std::size_t l = 0; l < r; ++l) {
            const bool gate = rng.bernoulli(1.0 - rho);
            const double w = rng.uniform_open01();
            if (gate) {
                world.alpha(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(l)) = w;
                any_signal = true;
            }
        }
        (any_signal ? world.signal_queries : world.orthogonal_queries).push_back(q);
    }
    return world;
}

SyntheticModels generate_models(std::size_t n, std::size_t r, std::uint64_t seed) {
    if (n < 2) throw validation_error("synthetic models: n must be >= 2");
    if (r < 1) throw validation_error("synthetic models: r must be >= 1");

    SyntheticModels models;
    models.n = n;
    models.r = r;
    models.seed = seed;
    models.theta.resize(n * r);
    models.labels.resize(n);

    Rng rng(derive_seed(seed, {0x4D4FULL}));
    for (std::size_t i = 0; i < n; ++i) {
        int parity = 0;
        for (std::size_t l = 0; l < r; ++l) {
            const auto bit = static_cast<std::uint8_t>(rng.below(2));
            models.theta[i * r + l] = bit;
            parity ^= bit;
        }
        models.labels[i] = parity;
    }
    return models;
}

PerQueryDistances synthetic_distances(const SyntheticWorld& world, const SyntheticModels& models,
                                      double noise_sigma, std::uint64_t noise_seed) {
    if (world.r != models.r) throw validation_error("synthetic distances: world and models disagree on r");
    PerQueryDistances out;
    out.n_models = models.n;
    out.n_queries = world.M;
    out.data.assign(out.size(), 0.0);
    Rng noise(derive_seed(noise_seed, {0x4E5AULL}));
    for (std::size_t q = 0; q < world.M; ++q)
        fill_slice(world, models, q, out.data.data() + q * models.n * models.n, noise_sigma,
                   noise_sigma > 0.0 ? &noise : nullptr);
    return out;
}

PerQueryDistances synthetic_distances_subset(const SyntheticWorld& world, const SyntheticModels& models,
                                             const std::vector<std::size_t>& queries, double noise_sigma,
                                             std::uint64_t noise_seed) {
    if (world.r != models.r) throw validation_error("synthetic distances: world and models disagree on r");
    for (std::size_t q : queries)
        if (q >= world.M) throw validation_error("synthetic distances: query index out of range");
    PerQueryDistances out;
    out.n_models = models.n;
    out.n_queries = queries.size();
    out.data.assign(out.size(), 0.0);
    Rng noise(derive_seed(noise_seed, {0x4E5AULL}));
    for (std::size_t k = 0; k < queries.size(); ++k)
        fill_slice(world, models, queries[k], out.data.data() + k * models.n * models.n, noise_sigma,
                   noise_sigma > 0.0 ? &noise : nullptr);
    return out;
}

std::map<PoolKind, std::vector<std::size_t>> query_pools(const SyntheticWorld& world) {
    std::map<PoolKind, std::vector<std::size_t>> pools;
    if (!world.signal_queries.empty()) pools[PoolKind::signal] = world.signal_queries;
    if (!world.orthogonal_queries.empty()) pools[PoolKind::orthogonal] = world.orthogonal_queries;
    std::vector<std::size_t> all(world.M);
    for (std::size_t q = 0; q < world.M; ++q) all[q] = q;
    pools[PoolKind::uniform] = std::move(all);
    return pools;
}

}  // namespace gbx
