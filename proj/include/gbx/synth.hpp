#ifndef GBX_SYNTH_HPP
#define GBX_SYNTH_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "gbx/classify.hpp"
#include "gbx/tensor.hpp"

namespace gbx {

// Query weights with known zero structure: alpha[q][l] = xi * w with
// xi ~ Bernoulli(1-rho) and w ~ Uniform(0,1), so zeros are exact.
struct SyntheticWorld {
    std::size_t M = 0;
    std::size_t r = 0;
    double rho = 0.0;
    Eigen::MatrixXd alpha;                      // M x r, nonnegative
    std::vector<std::size_t> orthogonal_queries;  // alpha row identically zero
    std::vector<std::size_t> signal_queries;      // complement
    std::uint64_t seed = 0;
};

// Latent binary model types with parity labels.
struct SyntheticModels {
    std::size_t n = 0;
    std::size_t r = 0;
    std::vector<std::uint8_t> theta;  // n x r row-major bits
    std::vector<int> labels;          // parity of each row
    std::uint64_t seed = 0;

    std::uint8_t bit(std::size_t i, std::size_t l) const { return theta[i * r + l]; }
};

SyntheticWorld generate_world(std::size_t M, std::size_t r, double rho, std::uint64_t seed);

SyntheticModels generate_models(std::size_t n, std::size_t r, std::uint64_t seed);

// slice[q][i][j] = sum_l alpha[q][l] * 1[theta_i,l != theta_j,l];
// distances are constructed directly, no responses or embeddings.
// noise_sigma > 0 adds symmetric Gaussian perturbation (clamped at 0,
// diagonal kept zero) seeded by noise_seed.
PerQueryDistances synthetic_distances(const SyntheticWorld& world, const SyntheticModels& models,
                                      double noise_sigma = 0.0, std::uint64_t noise_seed = 0);

// Same, restricted to the given query indices (slice k of the result is
// query queries[k]); the experiment drivers use this to avoid building
// the full tensor per repetition.
PerQueryDistances synthetic_distances_subset(const SyntheticWorld& world, const SyntheticModels& models,
                                             const std::vector<std::size_t>& queries,
                                             double noise_sigma = 0.0, std::uint64_t noise_seed = 0);

// signal / orthogonal / uniform pools; empty pools are omitted from the
// map (e.g. rho = 1 leaves no signal queries).
std::map<PoolKind, std::vector<std::size_t>> query_pools(const SyntheticWorld& world);

}  // namespace gbx

#endif
