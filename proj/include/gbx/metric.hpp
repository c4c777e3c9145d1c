#ifndef GBX_METRIC_HPP
#define GBX_METRIC_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "gbx/tensor.hpp"

namespace gbx {

// A multiset of query indices; repeats count with multiplicity.
struct QueryMultiset {
    std::vector<std::size_t> indices;

    std::size_t m() const { return indices.size(); }
    void validate(std::size_t n_queries) const;
};

// Pairwise model distances (not squared): symmetric, zero diagonal.
struct DistanceMatrix {
    std::size_t n = 0;
    std::vector<double> entries;  // n x n row-major

    double& at(std::size_t i, std::size_t j) { return entries[i * n + j]; }
    double at(std::size_t i, std::size_t j) const { return entries[i * n + j]; }
};

// Squared energy distance between two empirical samples in R^p,
// V-statistic form:
//   (2/ab) sum ||x-y|| - (1/a^2) sum ||x-x'|| - (1/b^2) sum ||y-y'||
// Nonnegative for the V-statistic; round-off below -1e-12 is clamped
// to zero. Accumulation order is fixed (index-ascending) so results do
// not depend on scheduling.
double energy_distance_sq(std::span<const double> xs, std::span<const double> ys, std::size_t dim);

// slice[j][i][i'] = energy_distance_sq of the replicate samples of
// models i, i' at query j.
PerQueryDistances per_query_distances(const ResponseTensor& tensor);

// entries[i][i'] = sqrt( (1/m) * sum_{j in Q} pqd[j][i][i'] )
DistanceMatrix aggregate_distance_matrix(const PerQueryDistances& pqd, const QueryMultiset& Q);

}  // namespace gbx

#endif
