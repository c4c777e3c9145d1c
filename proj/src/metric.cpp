#include "gbx/metric.hpp"

#include <cmath>

#include "gbx/error.hpp"

namespace gbx {

namespace {

// Euclidean norm of the difference of two p-vectors.
double norm_diff(const double* a, const double* b, std::size_t p) {
    double s = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return std::sqrt(s);
}

constexpr double kNegativeTolerance = -1e-12;

}  // namespace

void QueryMultiset::validate(std::size_t n_queries) const {
    if (indices.empty()) throw validation_error("query multiset must be non-empty");
    for (std::size_t j : indices)
        if (j >= n_queries) throw validation_error("query multiset index out of range");
}

double energy_distance_sq(std::span<const double> xs, std::span<const double> ys, std::size_t dim) {
    if (dim == 0) throw validation_error("energy distance: dimension must be >= 1");
    if (xs.empty() || ys.empty()) throw validation_error("energy distance: empty sample");
    if (xs.size() % dim != 0 || ys.size() % dim != 0)
        throw validation_error("energy distance: sample size not a multiple of dimension");
    const std::size_t a = xs.size() / dim;
    const std::size_t b = ys.size() / dim;

    double cross = 0.0;
    for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < b; ++j) cross += norm_diff(&xs[i * dim], &ys[j * dim], dim);

    double within_x = 0.0;
    for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = i + 1; j < a; ++j) within_x += norm_diff(&xs[i * dim], &xs[j * dim], dim);

    double within_y = 0.0;
    for (std::size_t i = 0; i < b; ++i)
        for (std::size_t j = i + 1; j < b; ++j) within_y += norm_diff(&ys[i * dim], &ys[j * dim], dim);

    const double value = 2.0 * cross / (static_cast<double>(a) * static_cast<double>(b)) -
                         2.0 * within_x / (static_cast<double>(a) * static_cast<double>(a)) -
                         2.0 * within_y / (static_cast<double>(b) * static_cast<double>(b));
    if (value < kNegativeTolerance)
        throw numerical_error("energy distance: V-statistic came out negative beyond tolerance");
    return value < 0.0 ? 0.0 : value;
}

PerQueryDistances per_query_distances(const ResponseTensor& tensor) {
    tensor.validate();
    const std::size_t n = tensor.n_models;
    const std::size_t M = tensor.n_queries;
    const std::size_t R = tensor.replicates;
    const std::size_t p = tensor.dim;

    PerQueryDistances out;
    out.n_models = n;
    out.n_queries = M;
    out.data.assign(M * n * n, 0.0);

    for (std::size_t q = 0; q < M; ++q) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                std::span<const double> xs(tensor.vec(i, q, 0), R * p);
                std::span<const double> ys(tensor.vec(j, q, 0), R * p);
                const double d2 = energy_distance_sq(xs, ys, p);
                out.at(q, i, j) = d2;
                out.at(q, j, i) = d2;
            }
        }
    }
    return out;
}

DistanceMatrix aggregate_distance_matrix(const PerQueryDistances& pqd, const QueryMultiset& Q) {
    Q.validate(pqd.n_queries);
    const std::size_t n = pqd.n_models;
    const double m = static_cast<double>(Q.m());

    DistanceMatrix D;
    D.n = n;
    D.entries.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t idx : Q.indices) acc += pqd.at(idx, i, j);
            const double d = std::sqrt(acc / m);
            D.at(i, j) = d;
            D.at(j, i) = d;
        }
    }
    return D;
}

}  // namespace gbx
