#ifndef GBX_TENSOR_HPP
#define GBX_TENSOR_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace gbx {

// Embedded responses of n models to M queries, R replicate samples per
// (model, query), each a vector in R^p. Dense row-major n x M x R x p.
// Stored as float32 on disk, held as float64 in memory.
struct ResponseTensor {
    std::size_t n_models = 0;
    std::size_t n_queries = 0;
    std::size_t replicates = 0;
    std::size_t dim = 0;
    std::vector<double> data;

    std::size_t size() const { return n_models * n_queries * replicates * dim; }

    double& at(std::size_t i, std::size_t j, std::size_t rep, std::size_t k) {
        return data[((i * n_queries + j) * replicates + rep) * dim + k];
    }
    double at(std::size_t i, std::size_t j, std::size_t rep, std::size_t k) const {
        return data[((i * n_queries + j) * replicates + rep) * dim + k];
    }
    // pointer to the p-vector of one replicate
    const double* vec(std::size_t i, std::size_t j, std::size_t rep) const {
        return data.data() + ((i * n_queries + j) * replicates + rep) * dim;
    }

    // throws validation_error naming the violated clause
    void validate() const;
};

// Per-query squared distributional distances, dense M x n x n.
// Flattening each query slice row-major over model pairs gives the rows
// of the query-model matrix.
struct PerQueryDistances {
    std::size_t n_models = 0;
    std::size_t n_queries = 0;
    std::vector<double> data;

    std::size_t size() const { return n_queries * n_models * n_models; }

    double& at(std::size_t q, std::size_t i, std::size_t j) {
        return data[(q * n_models + i) * n_models + j];
    }
    double at(std::size_t q, std::size_t i, std::size_t j) const {
        return data[(q * n_models + i) * n_models + j];
    }
    const double* slice(std::size_t q) const { return data.data() + q * n_models * n_models; }

    void validate() const;
};

// Sidecar metadata stored as JSON next to the binary tensor.
struct Manifest {
    std::vector<std::string> model_ids;
    std::optional<std::vector<int>> model_labels;
    std::vector<std::string> query_ids;
    // entries are "signal" or "orthogonal" when present
    std::optional<std::vector<std::string>> oracle_query_labels;
    std::size_t embedding_dim = 0;
    std::string provenance;
    // output-space cardinality; annotation only, never consumed
    std::optional<std::size_t> output_cardinality;

    // cross-check list lengths against tensor dimensions (when both present)
    void validate_against(std::size_t n_models, std::size_t n_queries) const;
};

}  // namespace gbx

#endif
