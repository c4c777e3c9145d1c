#include "gbx/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gbx/error.hpp"
#include "gbx/rng.hpp"

namespace gbx {

void ClassifierSpec::validate() const {
    if (trees < 1) throw validation_error("classifier: trees must be >= 1");
    if (min_leaf < 1) throw validation_error("classifier: min_leaf must be >= 1");
    if (k_neighbors < 1) throw validation_error("classifier: k_neighbors must be >= 1");
}

namespace {

int majority_label(const std::vector<double>& counts) {
    int best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c)
        if (counts[c] > counts[best]) best = static_cast<int>(c);  // tie keeps the smaller label
    return best;
}

double gini(const std::vector<double>& counts, double total) {
    if (total <= 0.0) return 0.0;
    double s = 0.0;
    for (double c : counts) {
        const double p = c / total;
        s += p * p;
    }
    return 1.0 - s;
}

}  // namespace

RandomForest::RandomForest(std::size_t n_trees, std::size_t min_leaf, std::uint64_t seed)
    : n_trees_(n_trees), min_leaf_(min_leaf), seed_(seed) {
    if (n_trees_ < 1) throw validation_error("random forest: need at least one tree");
    if (min_leaf_ < 1) throw validation_error("random forest: min_leaf must be >= 1");
}

void RandomForest::fit(const Eigen::MatrixXd& X, const std::vector<int>& y) {
    const auto n = static_cast<std::size_t>(X.rows());
    const auto d = static_cast<std::size_t>(X.cols());
    if (n == 0 || d == 0) throw validation_error("random forest: empty training data");
    if (y.size() != n) throw validation_error("random forest: label count mismatch");
    n_labels_ = 0;
    for (int label : y) {
        if (label < 0) throw validation_error("random forest: labels must be nonnegative");
        n_labels_ = std::max(n_labels_, label + 1);
    }

    const std::size_t mtry = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
    trees_.assign(n_trees_, {});

    for (std::size_t t = 0; t < n_trees_; ++t) {
        Rng rng(derive_seed(seed_, {0x7265ULL, t}));
        std::vector<std::size_t> sample(n);
        for (auto& idx : sample) idx = rng.below(n);

        Tree& tree = trees_[t];
        std::vector<std::size_t> features(d);
        for (std::size_t f = 0; f < d; ++f) features[f] = f;

        // iterative node construction; work items reference slices of a
        // shared index buffer
        struct Item {
            std::vector<std::size_t> rows;
            int slot;
        };
        tree.nodes.emplace_back();
        std::vector<Item> stack;
        stack.push_back({std::move(sample), 0});

        while (!stack.empty()) {
            Item item = std::move(stack.back());
            stack.pop_back();
            Node& node = tree.nodes[static_cast<std::size_t>(item.slot)];

            std::vector<double> counts(static_cast<std::size_t>(n_labels_), 0.0);
            for (std::size_t row : item.rows) counts[static_cast<std::size_t>(y[row])] += 1.0;
            const double total = static_cast<double>(item.rows.size());
            const double node_gini = gini(counts, total);
            node.label = majority_label(counts);

            if (node_gini == 0.0 || item.rows.size() < 2 * min_leaf_) continue;

            // sample candidate features without replacement
            for (std::size_t k = 0; k < mtry; ++k)
                std::swap(features[k], features[k + rng.below(d - k)]);

            double best_impurity = node_gini - 1e-12;
            int best_feature = -1;
            double best_threshold = 0.0;

            std::vector<std::pair<double, int>> ordered(item.rows.size());
            for (std::size_t k = 0; k < mtry; ++k) {
                const auto f = static_cast<Eigen::Index>(features[k]);
                for (std::size_t i = 0; i < item.rows.size(); ++i)
                    ordered[i] = {X(static_cast<Eigen::Index>(item.rows[i]), f), y[item.rows[i]]};
                std::sort(ordered.begin(), ordered.end());

                std::vector<double> left(static_cast<std::size_t>(n_labels_), 0.0);
                std::vector<double> right = counts;
                for (std::size_t i = 0; i + 1 < ordered.size(); ++i) {
                    const auto label = static_cast<std::size_t>(ordered[i].second);
                    left[label] += 1.0;
                    right[label] -= 1.0;
                    if (ordered[i].first == ordered[i + 1].first) continue;
                    const double nl = static_cast<double>(i + 1);
                    const double nr = total - nl;
                    if (nl < static_cast<double>(min_leaf_) || nr < static_cast<double>(min_leaf_)) continue;
                    const double impurity = (nl * gini(left, nl) + nr * gini(right, nr)) / total;
                    if (impurity < best_impurity) {
                        best_impurity = impurity;
                        best_feature = static_cast<int>(features[k]);
                        best_threshold = 0.5 * (ordered[i].first + ordered[i + 1].first);
                    }
                }
            }
            if (best_feature < 0) continue;  // no admissible split; stay a leaf

            std::vector<std::size_t> left_rows, right_rows;
            for (std::size_t row : item.rows) {
                if (X(static_cast<Eigen::Index>(row), best_feature) <= best_threshold)
                    left_rows.push_back(row);
                else
                    right_rows.push_back(row);
            }
            if (left_rows.empty() || right_rows.empty()) continue;

            const int slot_left = static_cast<int>(tree.nodes.size());
            const int slot_right = slot_left + 1;
            tree.nodes.emplace_back();
            tree.nodes.emplace_back();
            Node& parent = tree.nodes[static_cast<std::size_t>(item.slot)];  // re-fetch: vector may have grown
            parent.feature = best_feature;
            parent.threshold = best_threshold;
            parent.left = slot_left;
            parent.right = slot_right;
            stack.push_back({std::move(right_rows), slot_right});
            stack.push_back({std::move(left_rows), slot_left});
        }
    }
}

int RandomForest::predict_one(const Tree& t, const Eigen::RowVectorXd& x) const {
    int at = 0;
    for (;;) {
        const Node& node = t.nodes[static_cast<std::size_t>(at)];
        if (node.feature < 0) return node.label;
        at = x[node.feature] <= node.threshold ? node.left : node.right;
    }
}

std::vector<int> RandomForest::predict(const Eigen::MatrixXd& X) const {
    if (trees_.empty()) throw validation_error("random forest: predict before fit");
    std::vector<int> out(static_cast<std::size_t>(X.rows()));
    std::vector<double> votes(static_cast<std::size_t>(n_labels_));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        std::fill(votes.begin(), votes.end(), 0.0);
        for (const Tree& t : trees_) votes[static_cast<std::size_t>(predict_one(t, X.row(i)))] += 1.0;
        out[static_cast<std::size_t>(i)] = majority_label(votes);
    }
    return out;
}

void KnnClassifier::fit(const Eigen::MatrixXd& X, const std::vector<int>& y) {
    if (static_cast<std::size_t>(X.rows()) != y.size())
        throw validation_error("knn: label count mismatch");
    if (y.empty()) throw validation_error("knn: empty training data");
    train_ = X;
    labels_ = y;
}

std::vector<int> KnnClassifier::predict(const Eigen::MatrixXd& X) const {
    if (labels_.empty()) throw validation_error("knn: predict before fit");
    const std::size_t n = labels_.size();
    const std::size_t k = std::min(k_, n);
    int n_labels = 0;
    for (int label : labels_) n_labels = std::max(n_labels, label + 1);

    std::vector<int> out(static_cast<std::size_t>(X.rows()));
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        for (std::size_t j = 0; j < n; ++j)
            dist[j] = {(train_.row(static_cast<Eigen::Index>(j)) - X.row(i)).squaredNorm(), j};
        // distance ties resolve toward the lower training index
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        std::vector<double> votes(static_cast<std::size_t>(n_labels), 0.0);
        for (std::size_t j = 0; j < k; ++j) votes[static_cast<std::size_t>(labels_[dist[j].second])] += 1.0;
        out[static_cast<std::size_t>(i)] = majority_label(votes);
    }
    return out;
}

std::vector<int> train_predict(const Eigen::MatrixXd& train_coords, const std::vector<int>& train_labels,
                               const Eigen::MatrixXd& test_coords, const ClassifierSpec& spec) {
    spec.validate();
    if (static_cast<std::size_t>(train_coords.rows()) != train_labels.size())
        throw validation_error("train_predict: training size mismatch");
    if (train_coords.cols() != test_coords.cols())
        throw validation_error("train_predict: train/test dimension mismatch");
    const std::set<int> classes(train_labels.begin(), train_labels.end());
    if (classes.size() < 2) throw validation_error("train_predict: training set has a single class");

    if (spec.kind == ClassifierKind::random_forest) {
        RandomForest forest(spec.trees, spec.min_leaf, spec.seed);
        forest.fit(train_coords, train_labels);
        return forest.predict(test_coords);
    }
    KnnClassifier knn(spec.k_neighbors);
    knn.fit(train_coords, train_labels);
    return knn.predict(test_coords);
}

}  // namespace gbx
