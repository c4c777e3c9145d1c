#include "gbx/tensor.hpp"

#include <cmath>

#include "gbx/error.hpp"

namespace gbx {

namespace {

void require(bool ok, const char* clause) {
    if (!ok) throw validation_error(clause);
}

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

void ResponseTensor::validate() const {
    require(n_models >= 1, "response tensor: n_models must be >= 1");
    require(n_queries >= 1, "response tensor: n_queries must be >= 1");
    require(replicates >= 1, "response tensor: replicates must be >= 1");
    require(dim >= 1, "response tensor: dim must be >= 1");
    require(data.size() == size(), "response tensor: data length must equal n*M*R*p");
    require(all_finite(data), "response tensor: data must be finite (no NaN/Inf)");
}

void PerQueryDistances::validate() const {
    require(n_models >= 1, "per-query distances: n_models must be >= 1");
    require(n_queries >= 1, "per-query distances: n_queries must be >= 1");
    require(data.size() == size(), "per-query distances: data length must equal M*n*n");
    require(all_finite(data), "per-query distances: data must be finite (no NaN/Inf)");
    for (std::size_t q = 0; q < n_queries; ++q) {
        for (std::size_t i = 0; i < n_models; ++i) {
            require(at(q, i, i) == 0.0, "per-query distances: slice diagonal must be zero");
            for (std::size_t j = i + 1; j < n_models; ++j) {
                require(at(q, i, j) >= 0.0, "per-query distances: entries must be nonnegative");
                require(at(q, i, j) == at(q, j, i), "per-query distances: slices must be symmetric");
            }
        }
    }
}

void Manifest::validate_against(std::size_t tensor_models, std::size_t tensor_queries) const {
    if (!model_ids.empty() && model_ids.size() != tensor_models)
        throw validation_error("manifest: model_ids length does not match tensor n_models");
    if (model_labels && model_labels->size() != tensor_models)
        throw validation_error("manifest: model_labels length does not match tensor n_models");
    if (!query_ids.empty() && query_ids.size() != tensor_queries)
        throw validation_error("manifest: query_ids length does not match tensor n_queries");
    if (oracle_query_labels) {
        if (oracle_query_labels->size() != tensor_queries)
            throw validation_error("manifest: oracle_query_labels length does not match tensor n_queries");
        for (const auto& l : *oracle_query_labels)
            if (l != "signal" && l != "orthogonal")
                throw validation_error("manifest: oracle_query_labels entries must be 'signal' or 'orthogonal'");
    }
}

}  // namespace gbx
