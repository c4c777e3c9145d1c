#include "gbx/classify.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gbx/error.hpp"
#include "gbx/parallel.hpp"

namespace gbx {

const char* pool_kind_name(PoolKind k) {
    switch (k) {
        case PoolKind::signal: return "signal";
        case PoolKind::orthogonal: return "orthogonal";
        case PoolKind::uniform: return "uniform";
        case PoolKind::estimated_signal: return "estimated_signal";
        case PoolKind::estimated_orthogonal: return "estimated_orthogonal";
        case PoolKind::custom: return "custom";
    }
    return "unknown";
}

PoolKind pool_kind_from_name(const std::string& name) {
    for (PoolKind k : {PoolKind::signal, PoolKind::orthogonal, PoolKind::uniform,
                       PoolKind::estimated_signal, PoolKind::estimated_orthogonal, PoolKind::custom})
        if (name == pool_kind_name(k)) return k;
    throw validation_error("unknown query distribution: " + name);
}

std::string QueryDistribution::name() const { return pool_kind_name(kind); }

std::size_t DimensionRule::resolve(const DistanceMatrix& D) const {
    const std::size_t n = D.n;
    if (n < 2) throw validation_error("dimension rule: need at least 2 models");
    const std::size_t limit = n - 1;
    switch (kind) {
        case Kind::fixed:
            return std::max<std::size_t>(1, std::min(value, limit));
        case Kind::cap:
            return std::max<std::size_t>(1, std::min(value, limit));
        case Kind::second_elbow: {
            if (n < 3) return 1;
            const std::vector<double> sv = distance_singular_values(D);
            std::size_t d;
            try {
                d = select_dimension(sv, 2);
            } catch (const validation_error&) {
                d = select_dimension(sv, 1);  // first elbow already consumed the tail
            }
            return std::max<std::size_t>(1, std::min({d, value, limit}));
        }
    }
    throw validation_error("dimension rule: unknown kind");
}

void ExperimentConfig::validate() const {
    if (m_grid.empty()) throw validation_error("experiment: m grid must be non-empty");
    if (n_train_grid.empty()) throw validation_error("experiment: n grid must be non-empty");
    if (repetitions < 1) throw validation_error("experiment: repetitions must be >= 1");
    if (distributions.empty()) throw validation_error("experiment: no query distributions requested");
    for (std::size_t m : m_grid)
        if (m < 1) throw validation_error("experiment: query budgets must be >= 1");
    classifier.validate();
}

double failure_probability(const std::vector<double>& errors, double threshold) {
    if (errors.empty()) throw validation_error("failure probability: empty error list");
    std::size_t count = 0;
    for (double e : errors)
        if (e >= threshold) ++count;
    return static_cast<double>(count) / static_cast<double>(errors.size());
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    const std::vector<int>& labels, std::size_t n_train, Rng& rng) {
    const std::size_t n = labels.size();
    if (n_train < 1 || n_train >= n)
        throw validation_error("stratified split: need 1 <= n_train < n_models");

    // class member lists in ascending label order
    std::vector<int> classes(labels.begin(), labels.end());
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    std::vector<std::vector<std::size_t>> members(classes.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::size_t>(
            std::lower_bound(classes.begin(), classes.end(), labels[i]) - classes.begin());
        members[c].push_back(i);
    }

    // proportional quotas, largest remainder
    std::vector<std::size_t> quota(classes.size(), 0);
    std::vector<std::pair<double, std::size_t>> remainder;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        const double exact =
            static_cast<double>(n_train) * static_cast<double>(members[c].size()) / static_cast<double>(n);
        quota[c] = static_cast<std::size_t>(std::floor(exact));
        quota[c] = std::min(quota[c], members[c].size());
        assigned += quota[c];
        remainder.emplace_back(exact - std::floor(exact), c);
    }
    std::sort(remainder.begin(), remainder.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t k = 0; assigned < n_train; k = (k + 1) % remainder.size()) {
        const std::size_t c = remainder[k].second;
        if (quota[c] < members[c].size()) {
            ++quota[c];
            ++assigned;
        }
    }
    // keep every class represented when the budget allows
    if (n_train >= classes.size()) {
        for (std::size_t c = 0; c < classes.size(); ++c) {
            if (quota[c] > 0) continue;
            std::size_t donor = 0;
            for (std::size_t k = 1; k < classes.size(); ++k)
                if (quota[k] > quota[donor]) donor = k;
            if (quota[donor] > 1) {
                --quota[donor];
                ++quota[c];
            }
        }
    }

    std::vector<std::size_t> train, test;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        rng.shuffle(members[c]);
        for (std::size_t k = 0; k < members[c].size(); ++k)
            (k < quota[c] ? train : test).push_back(members[c][k]);
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {std::move(train), std::move(test)};
}

double classification_error_once(const PerQueryDistances& pqd, const std::vector<int>& labels,
                                 const std::vector<std::size_t>& pool, std::size_t m,
                                 std::size_t n_train, const DimensionRule& d_rule,
                                 const ClassifierSpec& classifier, Rng& rng) {
    if (pool.empty()) throw validation_error("experiment: empty query pool");
    if (m < 1) throw validation_error("experiment: query budget must be >= 1");

    // i.i.d. multiset draw, with replacement
    QueryMultiset Q;
    Q.indices.resize(m);
    for (auto& idx : Q.indices) idx = pool[rng.below(pool.size())];

    const DistanceMatrix D = aggregate_distance_matrix(pqd, Q);
    const std::size_t d = d_rule.resolve(D);
    const ModelRepresentation rep = classical_mds(D, d);

    auto [train, test] = stratified_split(labels, n_train, rng);

    Eigen::MatrixXd train_coords(static_cast<Eigen::Index>(train.size()), rep.coords.cols());
    Eigen::MatrixXd test_coords(static_cast<Eigen::Index>(test.size()), rep.coords.cols());
    std::vector<int> train_labels(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) {
        train_coords.row(static_cast<Eigen::Index>(i)) = rep.coords.row(static_cast<Eigen::Index>(train[i]));
        train_labels[i] = labels[train[i]];
    }
    for (std::size_t i = 0; i < test.size(); ++i)
        test_coords.row(static_cast<Eigen::Index>(i)) = rep.coords.row(static_cast<Eigen::Index>(test[i]));

    ClassifierSpec seeded = classifier;
    seeded.seed = rng.next_u64();
    const std::vector<int> predicted = train_predict(train_coords, train_labels, test_coords, seeded);

    std::size_t wrong = 0;
    for (std::size_t i = 0; i < test.size(); ++i)
        if (predicted[i] != labels[test[i]]) ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(test.size());
}

ExperimentResult run_experiment(const PerQueryDistances& pqd, const std::vector<int>& labels,
                                const std::map<PoolKind, std::vector<std::size_t>>& query_pools,
                                const ExperimentConfig& cfg) {
    cfg.validate();
    if (labels.size() != pqd.n_models)
        throw validation_error("experiment: label count does not match models");
    if (std::set<int>(labels.begin(), labels.end()).size() < 2)
        throw validation_error("experiment: labels must cover at least 2 classes");
    for (std::size_t n : cfg.n_train_grid)
        if (n >= pqd.n_models) throw validation_error("experiment: n_train must be < n_models");

    std::vector<std::size_t> all_queries(pqd.n_queries);
    for (std::size_t q = 0; q < pqd.n_queries; ++q) all_queries[q] = q;

    auto pool_for = [&](const QueryDistribution& dist) -> const std::vector<std::size_t>& {
        if (dist.kind == PoolKind::custom) {
            if (dist.custom_indices.empty()) throw validation_error("experiment: empty custom pool");
            return dist.custom_indices;
        }
        const auto it = query_pools.find(dist.kind);
        if (it != query_pools.end()) {
            if (it->second.empty())
                throw validation_error(std::string("experiment: empty pool for ") + dist.name());
            return it->second;
        }
        if (dist.kind == PoolKind::uniform) return all_queries;
        throw validation_error(std::string("experiment: no pool supplied for ") + dist.name());
    };
    for (const auto& dist : cfg.distributions) pool_for(dist);  // fail fast

    struct Cell {
        std::size_t dist_idx, m, n;
    };
    std::vector<Cell> cells;
    for (std::size_t di = 0; di < cfg.distributions.size(); ++di)
        for (std::size_t m : cfg.m_grid)
            for (std::size_t n : cfg.n_train_grid) cells.push_back({di, m, n});

    std::vector<std::vector<double>> errors(cells.size(), std::vector<double>(cfg.repetitions, 0.0));
    const std::size_t units = cells.size() * cfg.repetitions;
    parallel_for(units, cfg.threads, [&](std::size_t u) {
        const std::size_t ci = u / cfg.repetitions;
        const std::size_t rep = u % cfg.repetitions;
        const Cell& cell = cells[ci];
        const auto& dist = cfg.distributions[cell.dist_idx];
        Rng rng(derive_seed(cfg.master_seed,
                            {static_cast<std::uint64_t>(dist.kind), cell.m, cell.n, rep}));
        errors[ci][rep] = classification_error_once(pqd, labels, pool_for(dist), cell.m, cell.n,
                                                    cfg.d_rule, cfg.classifier, rng);
    });

    ExperimentResult result;
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        const Cell& cell = cells[ci];
        CellResult out;
        out.distribution = cfg.distributions[cell.dist_idx].name();
        out.m = cell.m;
        out.n = cell.n;
        out.repetitions = cfg.repetitions;
        out.seed = derive_seed(cfg.master_seed,
                               {static_cast<std::uint64_t>(cfg.distributions[cell.dist_idx].kind),
                                cell.m, cell.n});
        double mean = 0.0;
        for (double e : errors[ci]) mean += e;
        mean /= static_cast<double>(cfg.repetitions);
        double var = 0.0;
        for (double e : errors[ci]) var += (e - mean) * (e - mean);
        out.mean_error = mean;
        out.stderr_mean = cfg.repetitions > 1
                              ? std::sqrt(var / static_cast<double>(cfg.repetitions - 1) /
                                          static_cast<double>(cfg.repetitions))
                              : 0.0;
        out.failure_probability = failure_probability(errors[ci], cfg.failure_threshold);
        result.cells.push_back(std::move(out));
    }
    std::sort(result.cells.begin(), result.cells.end(), [](const CellResult& a, const CellResult& b) {
        if (a.distribution != b.distribution) return a.distribution < b.distribution;
        if (a.m != b.m) return a.m < b.m;
        return a.n < b.n;
    });
    return result;
}

const CellResult& ExperimentResult::cell(const std::string& distribution, std::size_t m,
                                         std::size_t n) const {
    for (const auto& c : cells)
        if (c.distribution == distribution && c.m == m && c.n == n) return c;
    throw validation_error("experiment result: no such cell");
}

}  // namespace gbx
