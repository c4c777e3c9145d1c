#ifndef GBX_FACTORIZATION_HPP
#define GBX_FACTORIZATION_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "gbx/metric.hpp"
#include "gbx/tensor.hpp"

namespace gbx {

// m x n^2 matrix of per-query squared distances over all model pairs;
// row j is the flattened distance slice of pilot query j.
struct QueryModelMatrix {
    std::size_t m = 0;
    std::size_t n_models = 0;
    Eigen::MatrixXd entries;  // m x n_models^2
};

// One-dimensional Gaussian mixture fit.
struct GmmFit1D {
    int K = 1;
    std::vector<double> weights;
    std::vector<double> means;
    std::vector<double> variances;
    double loglik = 0.0;
    double bic = 0.0;
};

struct GmmConfig {
    int restarts = 5;
    std::uint64_t seed = 0;
    int max_iters = 500;
    double tol = 1e-8;
    // when >= 0, zero-set membership uses |loading| < epsilon instead of
    // the GMM posterior assignment
    double explicit_epsilon = -1.0;
};

// Estimated discriminative structure of a query-model matrix.
struct FactorizationEstimate {
    std::size_t r_hat = 0;
    std::vector<double> singular_values;       // descending
    Eigen::MatrixXd loadings;                  // m x r_hat, |left singular vectors|
    std::vector<GmmFit1D> gmm_per_direction;   // one per estimated direction
    std::vector<double> rho_hat;               // zero-set probability per direction
    std::vector<std::vector<bool>> zero_set_member;  // [direction][query]
    std::vector<std::size_t> orthogonal_set;   // queries in every zero set
    std::vector<std::size_t> signal_set;       // complement
};

struct QuerySets {
    std::vector<std::size_t> signal;
    std::vector<std::size_t> orthogonal;
    bool signal_empty = false;
    bool orthogonal_empty = false;
};

// Row j of the result is the flattened slice of pqd at queries[j].
QueryModelMatrix build_query_model_matrix(const PerQueryDistances& pqd, const QueryMultiset& queries);

// Spectral-gap rank estimate: argmax_s sigma_s / sigma_{s+1}.
//
// The search is restricted to s <= min(s_max, k) where k is the count
// of singular values above tail_tol * sigma_1, so ratios of pure
// round-off never participate; an exactly rank-k matrix returns k.
// Ties break toward the smallest s. Throws numerical_error("no signal")
// on an all-zero matrix.
std::pair<std::size_t, std::vector<double>> estimate_rank(const QueryModelMatrix& E,
                                                          std::size_t s_max = 10,
                                                          double tail_tol = 1e-10);

// EM fit of a K-component Gaussian mixture to scalar data; restarts keep
// the best log-likelihood, BIC = -2 loglik + (3K-1) ln N. All-equal
// input degenerates to a K=1 fit at the variance floor.
// iteration_trace, when given, receives the winning restart's
// log-likelihood sequence.
GmmFit1D fit_gmm_1d(const std::vector<double>& values, int K, int restarts, std::uint64_t seed,
                    std::vector<double>* iteration_trace = nullptr);

// Full estimation pipeline: rank, loadings, per-direction GMM zero-set
// probabilities, and the orthogonal set (intersection of zero sets).
FactorizationEstimate estimate_zero_sets(const QueryModelMatrix& E, std::size_t s_max,
                                         double tail_tol, const GmmConfig& gmm);

// Adjusted Rand index between two partitions, in [-1, 1].
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

// Permutation p-value for the observed ARI:
//   p = (1 + #{pi : ARI(a, pi(b)) >= ARI(a, b)}) / (n_perm + 1)
double ari_permutation_test(const std::vector<int>& a, const std::vector<int>& b,
                            std::size_t n_perm, std::uint64_t seed);

// Orthogonal set and its complement, with explicit empty-set flags.
QuerySets select_query_sets(const FactorizationEstimate& est);

}  // namespace gbx

#endif
