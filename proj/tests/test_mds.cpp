#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "gbx/error.hpp"
#include "gbx/mds.hpp"
#include "gbx/rng.hpp"

using namespace gbx;

namespace {

DistanceMatrix from_points(const Eigen::MatrixXd& points) {
    DistanceMatrix D;
    D.n = static_cast<std::size_t>(points.rows());
    D.entries.assign(D.n * D.n, 0.0);
    for (Eigen::Index i = 0; i < points.rows(); ++i)
        for (Eigen::Index j = 0; j < points.rows(); ++j)
            D.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
                (points.row(i) - points.row(j)).norm();
    return D;
}

// Brute-force profile-likelihood split: identical formula, independent
// code path used to freeze expected elbow values.
std::size_t elbow_oracle(const std::vector<double>& v) {
    const std::size_t n = v.size();
    double lo = v[0], hi = v[0];
    for (double x : v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    const double floor = 1e-12 * (hi - lo) * (hi - lo) + 1e-300;
    std::size_t best_k = 1;
    double best = -1e308;
    for (std::size_t k = 1; k < n; ++k) {
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t i = 0; i < k; ++i) m1 += v[i];
        for (std::size_t i = k; i < n; ++i) m2 += v[i];
        m1 /= static_cast<double>(k);
        m2 /= static_cast<double>(n - k);
        double ss = 0.0;
        for (std::size_t i = 0; i < k; ++i) ss += (v[i] - m1) * (v[i] - m1);
        for (std::size_t i = k; i < n; ++i) ss += (v[i] - m2) * (v[i] - m2);
        const double var = ss / static_cast<double>(n) + floor;
        const double ll =
            -0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi * var) - ss / (2.0 * var);
        if (ll > best) {
            best = ll;
            best_k = k;
        }
    }
    return best_k;
}

}  // namespace

TEST_CASE("equilateral triangle embeds exactly") {
    DistanceMatrix D;
    D.n = 3;
    D.entries = {0, 1, 1, 1, 0, 1, 1, 1, 0};
    const ModelRepresentation rep = classical_mds(D, 2);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j)
            CHECK((rep.coords.row(static_cast<Eigen::Index>(i)) -
                   rep.coords.row(static_cast<Eigen::Index>(j)))
                      .norm() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("random point clouds round-trip through mds") {
    Rng rng(404);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::MatrixXd pts(4, 3);
        for (Eigen::Index i = 0; i < 4; ++i)
            for (Eigen::Index j = 0; j < 3; ++j) pts(i, j) = rng.normal();
        const DistanceMatrix D = from_points(pts);
        const ModelRepresentation rep = classical_mds(D, 3);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) {
                const double rec = (rep.coords.row(static_cast<Eigen::Index>(i)) -
                                    rep.coords.row(static_cast<Eigen::Index>(j)))
                                       .norm();
                CHECK(rec == doctest::Approx(D.at(i, j)).epsilon(1e-9));
            }
        CHECK(rep.stress <= 1e-6 * Eigen::Map<const Eigen::VectorXd>(D.entries.data(),
                                                                     static_cast<Eigen::Index>(
                                                                         D.entries.size()))
                                       .norm());
    }
}

TEST_CASE("two points land at +3 and -3 under the sign rule") {
    DistanceMatrix D;
    D.n = 2;
    D.entries = {0, 6, 6, 0};
    const ModelRepresentation rep = classical_mds(D, 1);
    CHECK(rep.coords(0, 0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(rep.coords(1, 0) == doctest::Approx(-3.0).epsilon(1e-12));
}

TEST_CASE("eigenvalues are sorted descending and negatives truncate") {
    // non-Euclidean distances: violating the triangle inequality forces
    // negative Gram eigenvalues, which must become zero columns
    DistanceMatrix D;
    D.n = 3;
    D.entries = {0, 10, 1, 10, 0, 1, 1, 1, 0};
    const ModelRepresentation rep = classical_mds(D, 2);
    for (std::size_t k = 1; k < rep.eigenvalues.size(); ++k)
        CHECK(rep.eigenvalues[k - 1] >= rep.eigenvalues[k]);
    CHECK(rep.eigenvalues.back() < 0.0);
    CHECK(rep.coords.col(1).norm() == 0.0);  // truncated column
}

TEST_CASE("duplicate model duplicates its row") {
    Rng rng(1234);
    Eigen::MatrixXd pts(5, 2);
    for (Eigen::Index i = 0; i < 5; ++i)
        for (Eigen::Index j = 0; j < 2; ++j) pts(i, j) = rng.normal();
    pts.row(4) = pts.row(1);
    const ModelRepresentation rep = classical_mds(from_points(pts), 2);
    CHECK((rep.coords.row(4) - rep.coords.row(1)).norm() == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("mds argument validation") {
    DistanceMatrix D;
    D.n = 3;
    D.entries = {0, 1, 1, 1, 0, 1, 1, 1, 0};
    CHECK_THROWS_AS(classical_mds(D, 0), validation_error);
    CHECK_THROWS_AS(classical_mds(D, 3), validation_error);
    D.entries[1] = 2.0;  // asymmetric
    CHECK_THROWS_AS(classical_mds(D, 1), validation_error);
}

TEST_CASE("dimension selection matches the brute-force oracle") {
    const std::vector<double> first = {10, 9.8, 1.0, 0.9, 0.8};
    CHECK(elbow_oracle(first) == 2);
    CHECK(select_dimension(first, 1) == 2);

    // second-elbow recursion, frozen against the oracle
    const std::vector<double> second = {10, 5, 4.9, 4.8, 0.1, 0.09};
    const std::size_t e1 = elbow_oracle(second);
    CHECK(e1 == 4);
    const std::vector<double> tail(second.begin() + static_cast<std::ptrdiff_t>(e1), second.end());
    CHECK(select_dimension(second, 2) == e1 + elbow_oracle(tail));
    CHECK(select_dimension(second, 2) == 5);
}

TEST_CASE("dimension selection on random descending sequences") {
    Rng rng(55);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t len = 4 + rng.below(10);
        std::vector<double> vals(len);
        double v = 10.0 + rng.uniform01();
        for (auto& x : vals) {
            x = v;
            v *= 0.3 + 0.6 * rng.uniform01();
        }
        CHECK(select_dimension(vals, 1) == elbow_oracle(vals));
    }
}

TEST_CASE("dimension selection contracts") {
    const std::vector<double> constant = {2, 2, 2, 2, 2};
    const std::size_t k = select_dimension(constant, 1);
    CHECK(k >= 1);
    CHECK(k <= 4);

    CHECK_THROWS_AS(select_dimension({1.0, 0.5}, 1), validation_error);
    // order exhausts the sequence: first elbow of a 3-value sequence can
    // leave a single-element tail
    CHECK_THROWS_AS(select_dimension({10.0, 1.0, 0.9}, 3), validation_error);
}

TEST_CASE("distance singular values are the scree input") {
    Rng rng(77);
    Eigen::MatrixXd pts(6, 2);
    for (Eigen::Index i = 0; i < 6; ++i)
        for (Eigen::Index j = 0; j < 2; ++j) pts(i, j) = rng.normal();
    const DistanceMatrix D = from_points(pts);
    const std::vector<double> sv = distance_singular_values(D);
    CHECK(sv.size() == 6);
    for (std::size_t k = 1; k < sv.size(); ++k) CHECK(sv[k - 1] >= sv[k]);

    Eigen::MatrixXd Dm(6, 6);
    for (Eigen::Index i = 0; i < 6; ++i)
        for (Eigen::Index j = 0; j < 6; ++j)
            Dm(i, j) = D.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Dm);
    for (std::size_t k = 0; k < 6; ++k)
        CHECK(sv[k] == doctest::Approx(svd.singularValues()[static_cast<Eigen::Index>(k)]).epsilon(1e-10));
}
