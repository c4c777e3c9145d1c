#include "gbx/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gbx/error.hpp"
#include "gbx/rng.hpp"

namespace gbx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_gaussian(double x, double mean, double var) {
    const double d = x - mean;
    return -0.5 * std::log(2.0 * std::numbers::pi * var) - d * d / (2.0 * var);
}

// Shared by estimate_rank and estimate_zero_sets so both apply the same
// spectral-gap rule.
std::size_t rank_from_singular_values(const std::vector<double>& sv, std::size_t s_max, double tail_tol) {
    if (sv.empty() || sv[0] <= 0.0) throw numerical_error("rank estimation: no signal (all-zero matrix)");
    const double cutoff = tail_tol * sv[0];
    std::size_t above = 0;
    while (above < sv.size() && sv[above] > cutoff) ++above;

    // Candidate gaps: s = above is allowed so an exactly rank-k matrix
    // returns k; everything past the numerical tail never participates.
    const std::size_t last = std::min({s_max, above, sv.size() - 1});
    if (last == 0) return 1;
    std::size_t best_s = 1;
    double best_ratio = -1.0;
    for (std::size_t s = 1; s <= last; ++s) {
        const double ratio = sv[s] > 0.0 ? sv[s - 1] / sv[s] : kInf;
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best_s = s;
        }
    }
    return best_s;
}

struct GmmParams {
    std::vector<double> w, mu, var;
};

// One E-step: responsibilities (as log then exp) and the data log-likelihood.
double e_step(const std::vector<double>& x, const GmmParams& p, std::vector<double>& resp) {
    const std::size_t n = x.size();
    const std::size_t K = p.w.size();
    double loglik = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double lo[2];
        double mx = -kInf;
        for (std::size_t k = 0; k < K; ++k) {
            lo[k] = std::log(p.w[k]) + log_gaussian(x[i], p.mu[k], p.var[k]);
            mx = std::max(mx, lo[k]);
        }
        double denom = 0.0;
        for (std::size_t k = 0; k < K; ++k) denom += std::exp(lo[k] - mx);
        const double lse = mx + std::log(denom);
        loglik += lse;
        for (std::size_t k = 0; k < K; ++k) resp[i * K + k] = std::exp(lo[k] - lse);
    }
    return loglik;
}

void m_step(const std::vector<double>& x, const std::vector<double>& resp, double var_floor, GmmParams& p) {
    const std::size_t n = x.size();
    const std::size_t K = p.w.size();
    for (std::size_t k = 0; k < K; ++k) {
        double nk = 0.0, sx = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            nk += resp[i * K + k];
            sx += resp[i * K + k] * x[i];
        }
        const double safe_nk = std::max(nk, 1e-300);
        p.mu[k] = sx / safe_nk;
        double sv = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = x[i] - p.mu[k];
            sv += resp[i * K + k] * d * d;
        }
        p.var[k] = std::max(sv / safe_nk, var_floor);
        p.w[k] = std::max(nk / static_cast<double>(n), 1e-12);
    }
    double wsum = 0.0;
    for (double w : p.w) wsum += w;
    for (auto& w : p.w) w /= wsum;
}

GmmFit1D single_gaussian_fit(const std::vector<double>& x, double var_floor) {
    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var = std::max(var / n, var_floor);
    GmmFit1D fit;
    fit.K = 1;
    fit.weights = {1.0};
    fit.means = {mean};
    fit.variances = {var};
    fit.loglik = 0.0;
    for (double v : x) fit.loglik += log_gaussian(v, mean, var);
    fit.bic = -2.0 * fit.loglik + 2.0 * std::log(n);
    return fit;
}

}  // namespace

QueryModelMatrix build_query_model_matrix(const PerQueryDistances& pqd, const QueryMultiset& queries) {
    queries.validate(pqd.n_queries);
    const std::size_t n = pqd.n_models;
    QueryModelMatrix E;
    E.m = queries.m();
    E.n_models = n;
    E.entries.resize(static_cast<Eigen::Index>(E.m), static_cast<Eigen::Index>(n * n));
    for (std::size_t row = 0; row < E.m; ++row) {
        const double* slice = pqd.slice(queries.indices[row]);
        for (std::size_t c = 0; c < n * n; ++c) E.entries(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(c)) = slice[c];
    }
    return E;
}

std::pair<std::size_t, std::vector<double>> estimate_rank(const QueryModelMatrix& E, std::size_t s_max,
                                                          double tail_tol) {
    if (E.entries.size() == 0) throw validation_error("rank estimation: empty matrix");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(E.entries);
    std::vector<double> sv(svd.singularValues().data(),
                           svd.singularValues().data() + svd.singularValues().size());
    const std::size_t r = rank_from_singular_values(sv, s_max, tail_tol);
    return {r, std::move(sv)};
}

GmmFit1D fit_gmm_1d(const std::vector<double>& values, int K, int restarts, std::uint64_t seed,
                    std::vector<double>* iteration_trace) {
    if (K != 1 && K != 2) throw validation_error("gmm: K must be 1 or 2");
    if (restarts < 1) throw validation_error("gmm: restarts must be >= 1");
    const std::size_t n = values.size();
    if (n < static_cast<std::size_t>(2 * K)) throw validation_error("gmm: need at least 2K values");

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    const double var_floor = 1e-10 * var + 1e-300;

    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const bool degenerate = (*lo == *hi);
    if (K == 1 || degenerate) {
        GmmFit1D fit = single_gaussian_fit(values, var_floor);
        if (iteration_trace) *iteration_trace = {fit.loglik};
        return fit;
    }

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[n / 2];

    GmmFit1D best;
    std::vector<double> best_trace;
    bool have_best = false;

    Rng rng(derive_seed(seed, {0x67ULL, static_cast<std::uint64_t>(restarts)}));
    for (int attempt = 0; attempt < restarts; ++attempt) {
        GmmParams p{{0.5, 0.5}, {0.0, 0.0}, {var, var}};
        if (attempt == 0) {
            // quantile-split init: below/above the median
            std::vector<double> a, b;
            for (double v : values) (v <= median ? a : b).push_back(v);
            if (b.empty()) {
                a.clear();
                for (double v : values) (v < median ? a : b).push_back(v);
            }
            if (a.empty() || b.empty()) continue;
            auto moments = [&](const std::vector<double>& g, double& mu, double& s2) {
                mu = 0.0;
                for (double v : g) mu += v;
                mu /= static_cast<double>(g.size());
                s2 = 0.0;
                for (double v : g) s2 += (v - mu) * (v - mu);
                s2 = std::max(s2 / static_cast<double>(g.size()), var_floor);
            };
            moments(a, p.mu[0], p.var[0]);
            moments(b, p.mu[1], p.var[1]);
            p.w[0] = static_cast<double>(a.size()) / static_cast<double>(n);
            p.w[1] = 1.0 - p.w[0];
        } else {
            // random restart: two distinct data points as means
            const double m0 = values[rng.below(n)];
            double m1 = m0;
            for (int tries = 0; tries < 64 && m1 == m0; ++tries) m1 = values[rng.below(n)];
            if (m1 == m0) continue;
            p.mu = {m0, m1};
            p.var = {std::max(var, var_floor), std::max(var, var_floor)};
        }

        std::vector<double> resp(n * 2);
        std::vector<double> trace;
        double prev = -kInf;
        double loglik = -kInf;
        for (int iter = 0; iter < 500; ++iter) {
            loglik = e_step(values, p, resp);
            trace.push_back(loglik);
            if (iter > 0 && std::abs(loglik - prev) < 1e-8) break;
            prev = loglik;
            m_step(values, resp, var_floor, p);
        }

        if (!have_best || loglik > best.loglik) {
            have_best = true;
            best.K = 2;
            best.weights = p.w;
            best.means = p.mu;
            best.variances = p.var;
            best.loglik = loglik;
            best_trace = std::move(trace);
        }
    }
    if (!have_best) {
        GmmFit1D fit = single_gaussian_fit(values, var_floor);
        if (iteration_trace) *iteration_trace = {fit.loglik};
        return fit;
    }
    best.bic = -2.0 * best.loglik + 5.0 * std::log(static_cast<double>(n));
    if (iteration_trace) *iteration_trace = best_trace;
    return best;
}

FactorizationEstimate estimate_zero_sets(const QueryModelMatrix& E, std::size_t s_max, double tail_tol,
                                         const GmmConfig& gmm) {
    if (E.entries.size() == 0) throw validation_error("zero-set estimation: empty matrix");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(E.entries, Eigen::ComputeThinU);

    FactorizationEstimate est;
    est.singular_values.assign(svd.singularValues().data(),
                               svd.singularValues().data() + svd.singularValues().size());
    est.r_hat = rank_from_singular_values(est.singular_values, s_max, tail_tol);

    const std::size_t m = E.m;
    est.loadings = svd.matrixU().leftCols(static_cast<Eigen::Index>(est.r_hat)).cwiseAbs();

    est.rho_hat.assign(est.r_hat, 0.0);
    est.zero_set_member.assign(est.r_hat, std::vector<bool>(m, false));

    for (std::size_t l = 0; l < est.r_hat; ++l) {
        std::vector<double> col(m);
        for (std::size_t j = 0; j < m; ++j) col[j] = est.loadings(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l));

        const GmmFit1D fit1 = fit_gmm_1d(col, 1, gmm.restarts, derive_seed(gmm.seed, {l, 1}));
        GmmFit1D chosen = fit1;
        if (m >= 4) {
            const GmmFit1D fit2 = fit_gmm_1d(col, 2, gmm.restarts, derive_seed(gmm.seed, {l, 2}));
            if (fit2.K == 2 && fit2.bic < fit1.bic) chosen = fit2;
        }

        if (chosen.K == 2) {
            // near-zero component: smaller |mean|, tie toward smaller variance
            std::size_t nz = 0;
            if (std::abs(chosen.means[1]) < std::abs(chosen.means[0]) ||
                (std::abs(chosen.means[1]) == std::abs(chosen.means[0]) &&
                 chosen.variances[1] < chosen.variances[0]))
                nz = 1;
            est.rho_hat[l] = chosen.weights[nz];
            for (std::size_t j = 0; j < m; ++j) {
                if (gmm.explicit_epsilon >= 0.0) {
                    est.zero_set_member[l][j] = col[j] < gmm.explicit_epsilon;
                } else {
                    const double lo0 = std::log(chosen.weights[0]) +
                                       log_gaussian(col[j], chosen.means[0], chosen.variances[0]);
                    const double lo1 = std::log(chosen.weights[1]) +
                                       log_gaussian(col[j], chosen.means[1], chosen.variances[1]);
                    const double mx = std::max(lo0, lo1);
                    const double post_nz = std::exp((nz == 0 ? lo0 : lo1) - mx) /
                                           (std::exp(lo0 - mx) + std::exp(lo1 - mx));
                    est.zero_set_member[l][j] = post_nz > 0.5;
                }
            }
        } else if (gmm.explicit_epsilon >= 0.0) {
            // rho_hat stays 0 for K=1; explicit epsilon only drives membership
            for (std::size_t j = 0; j < m; ++j)
                est.zero_set_member[l][j] = col[j] < gmm.explicit_epsilon;
        }
        est.gmm_per_direction.push_back(std::move(chosen));
    }

    for (std::size_t j = 0; j < m; ++j) {
        bool everywhere = true;
        for (std::size_t l = 0; l < est.r_hat && everywhere; ++l) everywhere = est.zero_set_member[l][j];
        if (everywhere)
            est.orthogonal_set.push_back(j);
        else
            est.signal_set.push_back(j);
    }
    return est;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw validation_error("ari: partition lengths differ");
    if (a.empty()) throw validation_error("ari: empty partitions");
    const std::size_t n = a.size();

    auto compact = [](const std::vector<int>& labels) {
        std::vector<int> sorted = labels;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        std::vector<std::size_t> out(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i)
            out[i] = static_cast<std::size_t>(
                std::lower_bound(sorted.begin(), sorted.end(), labels[i]) - sorted.begin());
        return std::pair{out, sorted.size()};
    };
    const auto [ca, ka] = compact(a);
    const auto [cb, kb] = compact(b);

    std::vector<double> table(ka * kb, 0.0), row(ka, 0.0), col(kb, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        table[ca[i] * kb + cb[i]] += 1.0;
        row[ca[i]] += 1.0;
        col[cb[i]] += 1.0;
    }
    auto choose2 = [](double c) { return c * (c - 1.0) / 2.0; };
    double index = 0.0, sum_row = 0.0, sum_col = 0.0;
    for (double c : table) index += choose2(c);
    for (double c : row) sum_row += choose2(c);
    for (double c : col) sum_col += choose2(c);
    const double total = choose2(static_cast<double>(n));
    if (total == 0.0) return 1.0;
    const double expected = sum_row * sum_col / total;
    const double max_index = 0.5 * (sum_row + sum_col);
    const double denom = max_index - expected;
    if (denom == 0.0) return 1.0;  // both partitions trivial
    return (index - expected) / denom;
}

double ari_permutation_test(const std::vector<int>& a, const std::vector<int>& b, std::size_t n_perm,
                            std::uint64_t seed) {
    if (n_perm < 1) throw validation_error("permutation test: n_perm must be >= 1");
    const double observed = adjusted_rand_index(a, b);
    Rng rng(derive_seed(seed, {0xA21ULL}));
    std::vector<int> permuted = b;
    std::size_t at_least = 0;
    for (std::size_t p = 0; p < n_perm; ++p) {
        rng.shuffle(permuted);
        if (adjusted_rand_index(a, permuted) >= observed) ++at_least;
    }
    return static_cast<double>(1 + at_least) / static_cast<double>(n_perm + 1);
}

QuerySets select_query_sets(const FactorizationEstimate& est) {
    QuerySets sets;
    sets.orthogonal = est.orthogonal_set;
    sets.signal = est.signal_set;
    sets.signal_empty = sets.signal.empty();
    sets.orthogonal_empty = sets.orthogonal.empty();
    return sets;
}

}  // namespace gbx
