#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace raftcensus {

/// Fully connected layer; weights are n_out x n_in, row-major.
struct Layer {
    int n_in = 0;
    int n_out = 0;
    std::vector<double> weights;
    std::vector<double> biases;

    double& w(int out, int in) { return weights[static_cast<std::size_t>(out * n_in + in)]; }
    double w(int out, int in) const { return weights[static_cast<std::size_t>(out * n_in + in)]; }
    bool operator==(const Layer&) const = default;
};

/// Parameters of a network, or a gradient of the same shape.
using Parameters = std::vector<Layer>;

enum class Activation { Sigmoid };

/// Feed-forward perceptron with logistic units on every layer.
class MlpModel {
public:
    MlpModel() = default;
    /// All-zero parameters. feature_order must have one entry per input.
    MlpModel(std::vector<int> layer_sizes, std::vector<std::string> feature_order);

    /// Weights and biases drawn uniformly from [-0.5, 0.5].
    static MlpModel random(std::vector<int> layer_sizes, std::vector<std::string> feature_order,
                           std::uint64_t seed);

    const std::vector<int>& layer_sizes() const { return layer_sizes_; }
    const std::vector<std::string>& feature_order() const { return feature_order_; }
    Activation activation() const { return Activation::Sigmoid; }
    int n_inputs() const { return layer_sizes_.front(); }
    int n_outputs() const { return layer_sizes_.back(); }

    const Parameters& params() const { return params_; }
    Parameters& params() { return params_; }

    /// Throws DataError on arity mismatch or non-finite input.
    std::vector<double> forward(std::span<const double> x) const;
    /// Unchecked variant for hot loops; `scratch` is resized as needed.
    void forward_into(std::span<const double> x, std::vector<double>& scratch,
                      std::vector<double>& out) const;

    bool operator==(const MlpModel&) const = default;

private:
    std::vector<int> layer_sizes_;
    std::vector<std::string> feature_order_;
    Parameters params_;
};

/// Ten band names in canonical classifier order.
std::vector<std::string> band_feature_names();

/// Logistic function with the argument clamped to [-36, 36], which keeps
/// outputs strictly inside (0, 1).
double sigmoid(double z);

/// Inputs with explicit regression targets in [0, 1].
struct Batch {
    int n_features = 0;
    int n_outputs = 0;
    std::vector<double> x;        ///< N x n_features
    std::vector<double> targets;  ///< N x n_outputs
    std::size_t size() const {
        return n_features == 0 ? 0 : x.size() / static_cast<std::size_t>(n_features);
    }
};

/// Integer-labelled samples.
struct LabeledSet {
    int n_features = 0;
    std::vector<double> x;  ///< N x n_features
    std::vector<int> labels;
    std::size_t size() const { return labels.size(); }
    std::span<const double> row(std::size_t i) const {
        return {x.data() + i * static_cast<std::size_t>(n_features),
                static_cast<std::size_t>(n_features)};
    }
    void push(std::span<const double> features, int label);
};

/// Single-output nets get the label itself as target; wider nets get one-hot.
Batch make_batch(const LabeledSet& set, int n_outputs);

struct LossAndGradient {
    double mse = 0.0;
    Parameters grad;
};

/// Mean over samples and outputs of (y - t)^2 together with its exact
/// gradient. The reduction is chunked in a fixed order, so results are
/// identical for any thread count.
LossAndGradient loss_and_gradient(const MlpModel& m, const Batch& batch);
double mean_squared_error(const MlpModel& m, const Batch& batch);

struct DataSplitFractions {
    double train = 0.70;
    double validation = 0.15;
    double test = 0.15;
};

struct TrainConfig {
    int max_epochs = 3000;
    double target_loss = 1e-3;
    double learning_rate = 1.0;
    double momentum = 0.9;
    std::uint64_t seed = 1;
    DataSplitFractions split;
};

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;
    double validation_loss = 0.0;
};

struct TrainResult {
    MlpModel model;  ///< parameters from the epoch with the lowest validation loss
    std::vector<EpochRecord> history;
    int best_epoch = 0;
    bool reached_target = false;
    LabeledSet train_set;
    LabeledSet validation_set;
    LabeledSet test_set;
};

/// Seeded shuffle then split; an empty fraction yields an empty subset.
void split_dataset(const LabeledSet& data, const DataSplitFractions& split, std::uint64_t seed,
                   LabeledSet& train, LabeledSet& validation, LabeledSet& test);

/// Full-batch gradient descent with momentum. Stops once the validation loss
/// (training loss when the validation split is empty) reaches target_loss.
TrainResult train(const MlpModel& initial, const LabeledSet& data, const TrainConfig& cfg);

struct ConfusionMatrix {
    int classes = 0;
    std::vector<std::uint64_t> counts;  ///< rows = true class, cols = predicted

    explicit ConfusionMatrix(int k = 0)
        : classes(k), counts(static_cast<std::size_t>(k) * static_cast<std::size_t>(k), 0) {}
    std::uint64_t& at(int truth, int predicted) {
        return counts[static_cast<std::size_t>(truth * classes + predicted)];
    }
    std::uint64_t at(int truth, int predicted) const {
        return counts[static_cast<std::size_t>(truth * classes + predicted)];
    }
    std::uint64_t total() const;
    std::uint64_t trace() const;
    double error_rate() const;
};

struct ArgmaxDecision {};
/// Binary nets compare their single output to a threshold; wider nets take
/// the argmax (lowest index on ties).
using Decision = std::variant<double, ArgmaxDecision>;

ConfusionMatrix evaluate_confusion(const MlpModel& m, const LabeledSet& set,
                                   Decision decision = 0.5);

void save_model(const MlpModel& m, const std::filesystem::path& path);
MlpModel load_model(const std::filesystem::path& path);
std::string serialize_model(const MlpModel& m);
MlpModel parse_model(const std::string& text);

}  // namespace raftcensus
