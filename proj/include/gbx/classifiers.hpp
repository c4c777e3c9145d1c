#ifndef GBX_CLASSIFIERS_HPP
#define GBX_CLASSIFIERS_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace gbx {

enum class ClassifierKind { random_forest, knn };

struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::random_forest;
    std::size_t trees = 100;
    std::size_t min_leaf = 1;      // minimum samples per leaf
    std::size_t k_neighbors = 5;
    std::uint64_t seed = 0;

    void validate() const;
};

// Bagged CART forest: Gini impurity, ceil(sqrt(d)) candidate features
// per split, unlimited depth, majority vote (ties toward the smaller
// label). Fully deterministic given the seed.
class RandomForest {
public:
    RandomForest(std::size_t n_trees, std::size_t min_leaf, std::uint64_t seed);

    void fit(const Eigen::MatrixXd& X, const std::vector<int>& y);
    std::vector<int> predict(const Eigen::MatrixXd& X) const;

private:
    struct Node {
        int feature = -1;        // -1 marks a leaf
        double threshold = 0.0;
        int left = -1, right = -1;
        int label = 0;
    };
    struct Tree {
        std::vector<Node> nodes;
    };

    std::size_t n_trees_;
    std::size_t min_leaf_;
    std::uint64_t seed_;
    int n_labels_ = 0;
    std::vector<Tree> trees_;

    int predict_one(const Tree& t, const Eigen::RowVectorXd& x) const;
};

// Euclidean k-nearest-neighbour majority vote. Distance ties resolve
// toward the lower training index, vote ties toward the smaller label.
class KnnClassifier {
public:
    explicit KnnClassifier(std::size_t k) : k_(k) {}

    void fit(const Eigen::MatrixXd& X, const std::vector<int>& y);
    std::vector<int> predict(const Eigen::MatrixXd& X) const;

private:
    std::size_t k_;
    Eigen::MatrixXd train_;
    std::vector<int> labels_;
};

// Train the classifier named by spec and predict test labels.
// Throws validation_error if the training set has fewer than two classes.
std::vector<int> train_predict(const Eigen::MatrixXd& train_coords, const std::vector<int>& train_labels,
                               const Eigen::MatrixXd& test_coords, const ClassifierSpec& spec);

}  // namespace gbx

#endif
