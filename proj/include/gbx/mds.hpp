#ifndef GBX_MDS_HPP
#define GBX_MDS_HPP

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "gbx/metric.hpp"

namespace gbx {

// Result of classical (Torgerson) multidimensional scaling.
struct ModelRepresentation {
    Eigen::MatrixXd coords;            // n x d, one row per model
    std::vector<double> eigenvalues;   // all n Gram eigenvalues, descending
    std::size_t d = 0;
    double stress = 0.0;               // Frobenius misfit of reconstructed distances
};

// Classical MDS of a distance matrix into d dimensions.
//
// B = -1/2 J D^2 J with J = I - 11^T/n; coords are the top-d eigenpairs
// scaled by sqrt(eigenvalue). Negative eigenvalues are truncated to
// zero columns. Sign convention: within each eigenvector the entry of
// largest magnitude is made nonnegative (ties broken by lowest index),
// so output is deterministic.
ModelRepresentation classical_mds(const DistanceMatrix& D, std::size_t d);

// Singular values of the distance matrix itself, descending; the scree
// input for dimension selection.
std::vector<double> distance_singular_values(const DistanceMatrix& D);

// Profile-likelihood elbow (two Gaussians, pooled variance) applied to
// a descending value sequence. elbow_order > 1 recurses on the tail
// after the previous elbow and returns the cumulative split index,
// which is a valid dimension count in [1, len-1].
std::size_t select_dimension(const std::vector<double>& values, std::size_t elbow_order);

}  // namespace gbx

#endif
