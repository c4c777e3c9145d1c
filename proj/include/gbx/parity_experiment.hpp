#ifndef GBX_PARITY_EXPERIMENT_HPP
#define GBX_PARITY_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gbx/classify.hpp"
#include "gbx/factorization.hpp"
#include "gbx/synth.hpp"

namespace gbx {

// Monte-Carlo driver over parity worlds. Every repetition regenerates
// the world, the models, the query sample, and the train/test split
// from a derived seed, so cells are independent of scheduling.
struct ParityExperimentConfig {
    std::size_t M = 100;
    std::size_t r = 5;
    double rho = 0.7;
    std::size_t n_train = 100;
    std::size_t n_test = 50;
    std::vector<std::size_t> m_grid = {1, 2, 5, 10, 20, 50, 100};
    PoolKind pool = PoolKind::uniform;
    std::size_t repetitions = 200;
    DimensionRule d_rule = DimensionRule::second_elbow();
    ClassifierSpec classifier;
    std::uint64_t master_seed = 0;
    std::size_t threads = 1;
    double noise_sigma = 0.0;
    // estimated_* pools: size of the uniform pilot sample feeding the
    // query-model matrix (0 means all M queries once each)
    std::size_t pilot_m = 0;
    GmmConfig gmm;

    void validate() const;
};

struct ParityCell {
    std::size_t m = 0;
    double mean_error = 0.0;
    double failure_probability = 0.0;
    double stderr_mean = 0.0;
    std::size_t repetitions = 0;
};

std::vector<ParityCell> run_parity_experiment(const ParityExperimentConfig& cfg);

// One parity-world repetition (exposed for the estimation studies):
// generates world + models from the repetition seed and returns the
// classification error for the given pool and query budget.
double parity_repetition_error(const ParityExperimentConfig& cfg, std::size_t m, std::uint64_t rep_seed);

}  // namespace gbx

#endif
