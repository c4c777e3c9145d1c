#ifndef GBX_CLASSIFY_HPP
#define GBX_CLASSIFY_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gbx/classifiers.hpp"
#include "gbx/mds.hpp"
#include "gbx/metric.hpp"
#include "gbx/rng.hpp"
#include "gbx/tensor.hpp"

namespace gbx {

enum class PoolKind { signal, orthogonal, uniform, estimated_signal, estimated_orthogonal, custom };

const char* pool_kind_name(PoolKind k);
PoolKind pool_kind_from_name(const std::string& name);

// Which queries a distribution may sample; custom carries its own indices.
struct QueryDistribution {
    PoolKind kind = PoolKind::uniform;
    std::vector<std::size_t> custom_indices;

    std::string name() const;
};

// Embedding-dimension rule applied per repetition.
struct DimensionRule {
    enum class Kind { fixed, second_elbow, cap };
    Kind kind = Kind::second_elbow;
    std::size_t value = 10;  // d for fixed, ceiling for cap and second_elbow

    static DimensionRule fixed(std::size_t d) { return {Kind::fixed, d}; }
    static DimensionRule second_elbow(std::size_t ceiling = 10) { return {Kind::second_elbow, ceiling}; }
    static DimensionRule cap(std::size_t k) { return {Kind::cap, k}; }

    // resolve against a concrete distance matrix (n models)
    std::size_t resolve(const DistanceMatrix& D) const;
};

struct ExperimentConfig {
    std::vector<std::size_t> m_grid;
    std::vector<std::size_t> n_train_grid;
    std::size_t repetitions = 200;
    std::vector<QueryDistribution> distributions;
    DimensionRule d_rule = DimensionRule::second_elbow();
    ClassifierSpec classifier;
    std::uint64_t master_seed = 0;
    std::size_t threads = 1;
    double failure_threshold = 0.5;

    void validate() const;
};

// Aggregates of one (distribution, m, n) cell.
struct CellResult {
    std::string distribution;
    std::size_t m = 0;
    std::size_t n = 0;
    double mean_error = 0.0;
    double failure_probability = 0.0;
    double stderr_mean = 0.0;
    std::size_t repetitions = 0;
    std::uint64_t seed = 0;  // cell-level seed all repetition seeds derive from
};

struct ExperimentResult {
    std::vector<CellResult> cells;  // sorted by (distribution, m, n)

    const CellResult& cell(const std::string& distribution, std::size_t m, std::size_t n) const;
};

// Fraction of errors >= threshold.
double failure_probability(const std::vector<double>& errors, double threshold = 0.5);

// Stratified split of model indices into n_train / rest, proportional
// per class (largest-remainder rounding, at least one per class when
// feasible). Returns (train, test).
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    const std::vector<int>& labels, std::size_t n_train, Rng& rng);

// One repetition of the shared pipeline: sample m queries i.i.d. from
// the pool (with replacement), aggregate distances, embed all models
// jointly, split, train, return test error.
double classification_error_once(const PerQueryDistances& pqd, const std::vector<int>& labels,
                                 const std::vector<std::size_t>& pool, std::size_t m,
                                 std::size_t n_train, const DimensionRule& d_rule,
                                 const ClassifierSpec& classifier, Rng& rng);

// Grid experiment over a fixed distance tensor. Each repetition draws
// its own query sample and train/test split; per-repetition seeds are
// derived from (master_seed, cell, rep), so results are identical for
// any thread count.
ExperimentResult run_experiment(const PerQueryDistances& pqd, const std::vector<int>& labels,
                                const std::map<PoolKind, std::vector<std::size_t>>& query_pools,
                                const ExperimentConfig& cfg);

}  // namespace gbx

#endif
