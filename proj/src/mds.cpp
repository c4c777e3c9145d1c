#include "gbx/mds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gbx/error.hpp"

namespace gbx {

namespace {

Eigen::MatrixXd to_eigen(const DistanceMatrix& D) {
    const auto n = static_cast<Eigen::Index>(D.n);
    Eigen::MatrixXd M(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) M(i, j) = D.at(i, j);
    return M;
}

void check_square_symmetric(const DistanceMatrix& D) {
    if (D.n == 0 || D.entries.size() != D.n * D.n)
        throw validation_error("distance matrix: storage does not match n");
    for (std::size_t i = 0; i < D.n; ++i)
        for (std::size_t j = i + 1; j < D.n; ++j)
            if (D.at(i, j) != D.at(j, i)) throw validation_error("distance matrix must be symmetric");
}

// Largest-magnitude entry nonnegative, ties broken by lowest index.
void canonical_sign(Eigen::Ref<Eigen::VectorXd> v) {
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        if (a > best) {
            best = a;
            pivot = i;
        }
    }
    if (v[pivot] < 0.0) v = -v;
}

// Two-Gaussian pooled-variance profile log-likelihood of splitting the
// sequence before index k.
double split_loglik(const std::vector<double>& v, std::size_t k, double var_floor) {
    const std::size_t n = v.size();
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < k; ++i) m1 += v[i];
    for (std::size_t i = k; i < n; ++i) m2 += v[i];
    m1 /= static_cast<double>(k);
    m2 /= static_cast<double>(n - k);
    double ss = 0.0;
    for (std::size_t i = 0; i < k; ++i) ss += (v[i] - m1) * (v[i] - m1);
    for (std::size_t i = k; i < n; ++i) ss += (v[i] - m2) * (v[i] - m2);
    const double var = ss / static_cast<double>(n) + var_floor;
    return -0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi * var) - ss / (2.0 * var);
}

std::size_t single_elbow(const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double var_floor = 1e-12 * (*hi - *lo) * (*hi - *lo) + 1e-300;
    std::size_t best_k = 1;
    double best_ll = split_loglik(v, 1, var_floor);
    for (std::size_t k = 2; k < v.size(); ++k) {
        const double ll = split_loglik(v, k, var_floor);
        if (ll > best_ll) {
            best_ll = ll;
            best_k = k;
        }
    }
    return best_k;
}

}  // namespace

ModelRepresentation classical_mds(const DistanceMatrix& D, std::size_t d) {
    check_square_symmetric(D);
    const std::size_t n = D.n;
    if (d < 1 || d > n - 1) throw validation_error("mds: dimension must satisfy 1 <= d <= n-1");

    const Eigen::MatrixXd Dm = to_eigen(D);
    const Eigen::MatrixXd D2 = Dm.array().square().matrix();
    const auto ni = static_cast<Eigen::Index>(n);
    const Eigen::MatrixXd J =
        Eigen::MatrixXd::Identity(ni, ni) - Eigen::MatrixXd::Constant(ni, ni, 1.0 / static_cast<double>(n));
    const Eigen::MatrixXd B = -0.5 * J * D2 * J;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(B);
    if (solver.info() != Eigen::Success) throw numerical_error("mds: eigendecomposition failed");

    // Eigen returns ascending order; flip to descending.
    ModelRepresentation rep;
    rep.d = d;
    rep.eigenvalues.resize(n);
    Eigen::MatrixXd vectors(ni, ni);
    for (Eigen::Index k = 0; k < ni; ++k) {
        rep.eigenvalues[static_cast<std::size_t>(k)] = solver.eigenvalues()[ni - 1 - k];
        vectors.col(k) = solver.eigenvectors().col(ni - 1 - k);
    }

    rep.coords.setZero(ni, static_cast<Eigen::Index>(d));
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(d); ++k) {
        const double lambda = rep.eigenvalues[static_cast<std::size_t>(k)];
        if (lambda <= 0.0) continue;  // negative mass truncated to a zero column
        Eigen::VectorXd v = vectors.col(k);
        canonical_sign(v);
        rep.coords.col(k) = v * std::sqrt(lambda);
    }

    double misfit = 0.0;
    for (Eigen::Index i = 0; i < ni; ++i) {
        for (Eigen::Index j = 0; j < ni; ++j) {
            const double rec = (rep.coords.row(i) - rep.coords.row(j)).norm();
            const double diff = rec - Dm(i, j);
            misfit += diff * diff;
        }
    }
    rep.stress = std::sqrt(misfit);
    return rep;
}

std::vector<double> distance_singular_values(const DistanceMatrix& D) {
    check_square_symmetric(D);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(D));
    if (solver.info() != Eigen::Success) throw numerical_error("distance singular values: eigensolve failed");
    std::vector<double> sv(D.n);
    for (std::size_t i = 0; i < D.n; ++i) sv[i] = std::abs(solver.eigenvalues()[static_cast<Eigen::Index>(i)]);
    std::sort(sv.begin(), sv.end(), std::greater<>());
    return sv;
}

std::size_t select_dimension(const std::vector<double>& values, std::size_t elbow_order) {
    if (values.size() < 3) throw validation_error("dimension selection needs at least 3 values");
    if (elbow_order < 1) throw validation_error("elbow order must be >= 1");

    std::size_t offset = 0;
    std::vector<double> tail = values;
    for (std::size_t e = 0; e < elbow_order; ++e) {
        if (tail.size() < 2) throw validation_error("elbow order exhausts the value sequence");
        const std::size_t k = single_elbow(tail);
        offset += k;
        tail.erase(tail.begin(), tail.begin() + static_cast<std::ptrdiff_t>(k));
    }
    return offset;
}

}  // namespace gbx
