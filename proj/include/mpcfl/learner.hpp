#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mpcfl/errors.hpp"
#include "mpcfl/rng.hpp"

namespace mpcfl {

/// Bias-free feed-forward architecture. The two stock configurations match
/// the aggregation payload sizes used throughout: 121*2 = 242 weights for
/// the plain model and 121*60 + 60*2 = 7380 with one hidden layer.
struct ModelSpec {
    int input_dim = 121;
    std::vector<int> hidden_dims;
    int output_dim = 2;

    static ModelSpec simple() { return {121, {}, 2}; }
    static ModelSpec complex() { return {121, {60}, 2}; }

    /// Consecutive (in, out) pairs, input through output.
    std::vector<std::pair<int, int>> layer_shapes() const;
    Eigen::Index param_count() const;

    bool operator==(const ModelSpec&) const = default;
};

/// Flat weight vector of a local or global model, tagged with its global
/// epoch and cumulative local-iteration counters.
struct ModelTensor {
    ModelSpec spec;
    Eigen::VectorXd weights;
    int epoch = 0;
    int iteration = 0;
};

struct Dataset {
    Eigen::MatrixXd features;  // rows x 121
    Eigen::VectorXi labels;    // {0, 1}, 1 = faulty

    Eigen::Index rows() const { return features.rows(); }
};

/// Confusion counts and derived rates. A rate whose denominator is zero is
/// reported as NaN; the other metrics are still computed.
struct Metrics {
    double recall = 0.0;
    double precision = 0.0;
    double balanced = 0.0;
    long tp = 0, fp = 0, tn = 0, fn = 0;
};

/// Weights drawn uniform in +-1/sqrt(fan_in), layer by layer.
ModelTensor init_model(const ModelSpec& spec, RngStream& rng);
ModelTensor init_model(const ModelSpec& spec, std::uint64_t seed);

/// Raw class scores for one feature row (rectifier on hidden layers, no
/// activation at the output). Prediction is argmax, ties to class 0.
Eigen::Vector2d forward(const ModelTensor& model, const Eigen::RowVectorXd& row);

/// Scores for a whole feature matrix, rows x 2.
Eigen::MatrixXd forward_batch(const ModelTensor& model, const Eigen::MatrixXd& features);

/// Mean softmax cross-entropy and its gradient by backpropagation.
std::pair<double, Eigen::VectorXd> loss_and_grad(const ModelTensor& model,
                                                 const Dataset& data);

/// `iters` full-batch gradient steps, w <- w - lr * grad.
ModelTensor local_train(ModelTensor model, const Dataset& data, int iters, double lr);

Metrics compute_metrics(const ModelTensor& model, const Dataset& data);

/// Synthetic fault-detection data: class-conditional Gaussians over 121
/// features, one mean-shift vector per party to model heterogeneous
/// operating conditions across companies.
struct SyntheticConfig {
    int parties = 4;
    Eigen::Index rows_per_party = 200;
    double shift = 1.0;
    std::uint64_t seed = 1;
    double separation = 4.0;
    Eigen::Index held_out_rows = 400;
};

struct SyntheticData {
    std::vector<Dataset> party_data;
    Dataset held_out;  // drawn from the pooled mixture of all parties
};

SyntheticData gen_synthetic(const SyntheticConfig& cfg);

/// CSV with exactly 122 columns (121 features then a {0,1} label); one
/// optional header row. The writer emits the same format.
Dataset load_csv(const std::string& path);
void write_csv(const std::string& path, const Dataset& data);

}  // namespace mpcfl
