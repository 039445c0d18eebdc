#include "raftcensus/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "raftcensus/bandstack.hpp"
#include "raftcensus/error.hpp"
#include "raftcensus/parallel.hpp"
#include "raftcensus/rng.hpp"

namespace raftcensus {

std::vector<std::string> band_feature_names() {
    std::vector<std::string> names;
    for (BandId b : kAllBands) names.emplace_back(band_name(b));
    return names;
}

double sigmoid(double z) {
    z = std::clamp(z, -36.0, 36.0);
    return 1.0 / (1.0 + std::exp(-z));
}

MlpModel::MlpModel(std::vector<int> layer_sizes, std::vector<std::string> feature_order)
    : layer_sizes_(std::move(layer_sizes)), feature_order_(std::move(feature_order)) {
    if (layer_sizes_.size() < 2) throw DataError("a network needs at least input and output sizes");
    for (int n : layer_sizes_)
        if (n <= 0) throw DataError("layer sizes must be positive");
    if (feature_order_.size() != static_cast<std::size_t>(layer_sizes_.front()))
        throw DataError("bad feature order: one name per input required");
    for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
        Layer layer;
        layer.n_in = layer_sizes_[l];
        layer.n_out = layer_sizes_[l + 1];
        layer.weights.assign(static_cast<std::size_t>(layer.n_in * layer.n_out), 0.0);
        layer.biases.assign(static_cast<std::size_t>(layer.n_out), 0.0);
        params_.push_back(std::move(layer));
    }
}

MlpModel MlpModel::random(std::vector<int> layer_sizes, std::vector<std::string> feature_order,
                          std::uint64_t seed) {
    MlpModel m(std::move(layer_sizes), std::move(feature_order));
    Rng rng(seed);
    for (Layer& layer : m.params_) {
        for (double& w : layer.weights) w = uniform(rng, -0.5, 0.5);
        for (double& b : layer.biases) b = uniform(rng, -0.5, 0.5);
    }
    return m;
}

void MlpModel::forward_into(std::span<const double> x, std::vector<double>& scratch,
                            std::vector<double>& out) const {
    scratch.assign(x.begin(), x.end());
    for (std::size_t l = 0; l < params_.size(); ++l) {
        const Layer& layer = params_[l];
        out.resize(static_cast<std::size_t>(layer.n_out));
        for (int o = 0; o < layer.n_out; ++o) {
            const double* wrow = layer.weights.data() + static_cast<std::ptrdiff_t>(o) * layer.n_in;
            double z = layer.biases[static_cast<std::size_t>(o)];
            for (int i = 0; i < layer.n_in; ++i) z += wrow[i] * scratch[static_cast<std::size_t>(i)];
            out[static_cast<std::size_t>(o)] = sigmoid(z);
        }
        if (l + 1 < params_.size()) scratch.swap(out);
    }
}

std::vector<double> MlpModel::forward(std::span<const double> x) const {
    if (x.size() != static_cast<std::size_t>(n_inputs()))
        throw DataError(fmt::format("model arity mismatch: expected {} inputs, got {}", n_inputs(),
                                    x.size()));
    for (double v : x)
        if (!std::isfinite(v)) throw DataError("non-finite model input");
    std::vector<double> scratch, out;
    forward_into(x, scratch, out);
    return out;
}

void LabeledSet::push(std::span<const double> features, int label) {
    if (features.size() != static_cast<std::size_t>(n_features))
        throw DataError("feature width mismatch");
    x.insert(x.end(), features.begin(), features.end());
    labels.push_back(label);
}

Batch make_batch(const LabeledSet& set, int n_outputs) {
    Batch b;
    b.n_features = set.n_features;
    b.n_outputs = n_outputs;
    b.x = set.x;
    b.targets.assign(set.size() * static_cast<std::size_t>(n_outputs), 0.0);
    for (std::size_t i = 0; i < set.size(); ++i) {
        const int label = set.labels[i];
        if (n_outputs == 1) {
            if (label != 0 && label != 1) throw DataError("binary nets need labels 0/1");
            b.targets[i] = label;
        } else {
            if (label < 0 || label >= n_outputs)
                throw DataError(fmt::format("label {} outside {} classes", label, n_outputs));
            b.targets[i * static_cast<std::size_t>(n_outputs) + static_cast<std::size_t>(label)] = 1.0;
        }
    }
    return b;
}

namespace {

constexpr std::size_t kChunk = 256;

Parameters zeros_like(const Parameters& p) {
    Parameters g = p;
    for (Layer& l : g) {
        std::fill(l.weights.begin(), l.weights.end(), 0.0);
        std::fill(l.biases.begin(), l.biases.end(), 0.0);
    }
    return g;
}

void check_batch(const MlpModel& m, const Batch& batch) {
    if (batch.size() == 0) throw DataError("empty batch");
    if (batch.n_features != m.n_inputs() || batch.n_outputs != m.n_outputs())
        throw DataError("model arity mismatch with batch");
    if (batch.targets.size() != batch.size() * static_cast<std::size_t>(batch.n_outputs))
        throw DataError("target count mismatch");
}

struct Partial {
    double sse = 0.0;
    Parameters grad;
};

// Unscaled sums over one chunk of samples: sum (y - t)^2 and the gradient of
// that sum.
void accumulate_chunk(const MlpModel& m, const Batch& batch, std::size_t lo, std::size_t hi,
                      bool with_grad, Partial& part) {
    const Parameters& params = m.params();
    const std::size_t n_layers = params.size();
    std::vector<std::vector<double>> acts(n_layers + 1);
    std::vector<double> delta, prev_delta;
    const auto nf = static_cast<std::size_t>(batch.n_features);
    const auto no = static_cast<std::size_t>(batch.n_outputs);

    for (std::size_t s = lo; s < hi; ++s) {
        acts[0].assign(batch.x.begin() + static_cast<std::ptrdiff_t>(s * nf),
                       batch.x.begin() + static_cast<std::ptrdiff_t>((s + 1) * nf));
        for (std::size_t l = 0; l < n_layers; ++l) {
            const Layer& layer = params[l];
            auto& out = acts[l + 1];
            out.resize(static_cast<std::size_t>(layer.n_out));
            for (int o = 0; o < layer.n_out; ++o) {
                double z = layer.biases[static_cast<std::size_t>(o)];
                for (int i = 0; i < layer.n_in; ++i) z += layer.w(o, i) * acts[l][static_cast<std::size_t>(i)];
                out[static_cast<std::size_t>(o)] = sigmoid(z);
            }
        }
        const auto& y = acts[n_layers];
        const double* t = batch.targets.data() + s * no;
        delta.resize(no);
        for (std::size_t o = 0; o < no; ++o) {
            const double err = y[o] - t[o];
            part.sse += err * err;
            delta[o] = 2.0 * err * y[o] * (1.0 - y[o]);
        }
        if (!with_grad) continue;

        for (std::size_t l = n_layers; l-- > 0;) {
            const Layer& layer = params[l];
            Layer& g = part.grad[l];
            const auto& a_in = acts[l];
            for (int o = 0; o < layer.n_out; ++o) {
                const double d = delta[static_cast<std::size_t>(o)];
                g.biases[static_cast<std::size_t>(o)] += d;
                for (int i = 0; i < layer.n_in; ++i) g.w(o, i) += d * a_in[static_cast<std::size_t>(i)];
            }
            if (l == 0) break;
            prev_delta.assign(static_cast<std::size_t>(layer.n_in), 0.0);
            for (int o = 0; o < layer.n_out; ++o)
                for (int i = 0; i < layer.n_in; ++i)
                    prev_delta[static_cast<std::size_t>(i)] += layer.w(o, i) * delta[static_cast<std::size_t>(o)];
            for (int i = 0; i < layer.n_in; ++i) {
                const double a = a_in[static_cast<std::size_t>(i)];
                prev_delta[static_cast<std::size_t>(i)] *= a * (1.0 - a);
            }
            delta.swap(prev_delta);
        }
    }
}

LossAndGradient reduce(const MlpModel& m, const Batch& batch, bool with_grad) {
    check_batch(m, batch);
    const std::size_t n = batch.size();
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<Partial> parts(chunks);
    parallel_for(chunks, [&](std::size_t c) {
        Partial& p = parts[c];
        if (with_grad) p.grad = zeros_like(m.params());
        accumulate_chunk(m, batch, c * kChunk, std::min(n, (c + 1) * kChunk), with_grad, p);
    });

    LossAndGradient result;
    const double scale = 1.0 / (static_cast<double>(n) * batch.n_outputs);
    if (with_grad) result.grad = zeros_like(m.params());
    double sse = 0.0;
    for (const Partial& p : parts) {
        sse += p.sse;
        if (!with_grad) continue;
        for (std::size_t l = 0; l < p.grad.size(); ++l) {
            for (std::size_t k = 0; k < p.grad[l].weights.size(); ++k)
                result.grad[l].weights[k] += p.grad[l].weights[k];
            for (std::size_t k = 0; k < p.grad[l].biases.size(); ++k)
                result.grad[l].biases[k] += p.grad[l].biases[k];
        }
    }
    result.mse = sse * scale;
    for (Layer& l : result.grad) {
        for (double& v : l.weights) v *= scale;
        for (double& v : l.biases) v *= scale;
    }
    return result;
}

}  // namespace

LossAndGradient loss_and_gradient(const MlpModel& m, const Batch& batch) {
    return reduce(m, batch, true);
}

double mean_squared_error(const MlpModel& m, const Batch& batch) { return reduce(m, batch, false).mse; }

void split_dataset(const LabeledSet& data, const DataSplitFractions& split, std::uint64_t seed,
                   LabeledSet& train_set, LabeledSet& validation, LabeledSet& test) {
    const double sum = split.train + split.validation + split.test;
    if (!(split.train > 0.0) || split.validation < 0.0 || split.test < 0.0 ||
        std::abs(sum - 1.0) > 1e-9)
        throw DataError("split fractions must be non-negative, train > 0, and sum to 1");
    const std::size_t n = data.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    shuffle_in_place(order, rng);

    std::size_t n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * split.train));
    std::size_t n_val = static_cast<std::size_t>(std::llround(static_cast<double>(n) * split.validation));
    n_train = std::clamp<std::size_t>(n_train, 1, n);
    n_val = std::min(n_val, n - n_train);
    if (split.test == 0.0) n_val = n - n_train;

    for (LabeledSet* s : {&train_set, &validation, &test}) *s = LabeledSet{data.n_features, {}, {}};
    for (std::size_t k = 0; k < n; ++k) {
        LabeledSet& dst = k < n_train ? train_set : (k < n_train + n_val ? validation : test);
        dst.push(data.row(order[k]), data.labels[order[k]]);
    }
}

TrainResult train(const MlpModel& initial, const LabeledSet& data, const TrainConfig& cfg) {
    if (data.size() == 0) throw DataError("empty training set");
    if (data.n_features != initial.n_inputs()) throw DataError("model arity mismatch with data");
    for (double v : data.x)
        if (!std::isfinite(v)) throw DataError("non-finite training feature");
    const int n_classes = initial.n_outputs() == 1 ? 2 : initial.n_outputs();
    std::vector<std::size_t> per_class(static_cast<std::size_t>(n_classes), 0);
    for (int label : data.labels) {
        if (label < 0 || label >= n_classes)
            throw DataError(fmt::format("label {} outside {} classes", label, n_classes));
        ++per_class[static_cast<std::size_t>(label)];
    }
    if (std::count_if(per_class.begin(), per_class.end(), [](std::size_t c) { return c > 0; }) < 2)
        throw DataError("single-class data: training needs at least two classes");
    if (cfg.max_epochs <= 0) throw DataError("max_epochs must be positive");

    TrainResult result;
    split_dataset(data, cfg.split, cfg.seed, result.train_set, result.validation_set, result.test_set);
    const Batch train_batch = make_batch(result.train_set, initial.n_outputs());
    const bool has_val = result.validation_set.size() > 0;
    const Batch val_batch = has_val ? make_batch(result.validation_set, initial.n_outputs()) : Batch{};

    MlpModel current = initial;
    Parameters velocity = zeros_like(current.params());
    double best = std::numeric_limits<double>::infinity();
    result.model = initial;

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        LossAndGradient lg = loss_and_gradient(current, train_batch);
        const double val = has_val ? mean_squared_error(current, val_batch) : lg.mse;
        if (!std::isfinite(lg.mse) || !std::isfinite(val))
            throw DivergenceError(fmt::format("training diverged at epoch {}", epoch), epoch);
        result.history.push_back({epoch, lg.mse, val});
        if (val < best) {
            best = val;
            result.model = current;
            result.best_epoch = epoch;
        }
        if (val <= cfg.target_loss) {
            result.reached_target = true;
            break;
        }
        auto& params = current.params();
        for (std::size_t l = 0; l < params.size(); ++l) {
            auto step = [&](std::vector<double>& p, std::vector<double>& v, const std::vector<double>& g) {
                for (std::size_t k = 0; k < p.size(); ++k) {
                    v[k] = cfg.momentum * v[k] - cfg.learning_rate * g[k];
                    p[k] += v[k];
                }
            };
            step(params[l].weights, velocity[l].weights, lg.grad[l].weights);
            step(params[l].biases, velocity[l].biases, lg.grad[l].biases);
        }
        for (const Layer& l : params) {
            const bool finite =
                std::all_of(l.weights.begin(), l.weights.end(), [](double v) { return std::isfinite(v); }) &&
                std::all_of(l.biases.begin(), l.biases.end(), [](double v) { return std::isfinite(v); });
            if (!finite)
                throw DivergenceError(fmt::format("training diverged at epoch {}", epoch), epoch);
        }
    }
    return result;
}

std::uint64_t ConfusionMatrix::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::trace() const {
    std::uint64_t t = 0;
    for (int k = 0; k < classes; ++k) t += at(k, k);
    return t;
}

double ConfusionMatrix::error_rate() const {
    const auto n = total();
    return n == 0 ? 0.0 : 1.0 - static_cast<double>(trace()) / static_cast<double>(n);
}

ConfusionMatrix evaluate_confusion(const MlpModel& m, const LabeledSet& set, Decision decision) {
    if (set.size() == 0) throw DataError("empty evaluation set");
    if (set.n_features != m.n_inputs()) throw DataError("model arity mismatch with data");
    const bool binary = m.n_outputs() == 1;
    const double thr = std::holds_alternative<double>(decision) ? std::get<double>(decision) : 0.5;
    ConfusionMatrix cm(binary ? 2 : m.n_outputs());
    std::vector<double> scratch, out;
    for (std::size_t i = 0; i < set.size(); ++i) {
        const int truth = set.labels[i];
        if (truth < 0 || truth >= cm.classes) throw DataError(fmt::format("label {} out of range", truth));
        m.forward_into(set.row(i), scratch, out);
        int predicted = 0;
        if (binary) {
            predicted = out[0] >= thr ? 1 : 0;
        } else {
            predicted = static_cast<int>(std::max_element(out.begin(), out.end()) - out.begin());
        }
        ++cm.at(truth, predicted);
    }
    return cm;
}

std::string serialize_model(const MlpModel& m) {
    std::string s = "MLPv1\nlayers";
    for (int n : m.layer_sizes()) s += fmt::format(" {}", n);
    s += "\nfeatures";
    for (const auto& f : m.feature_order()) s += " " + f;
    s += "\nactivation sigmoid\n";
    for (const Layer& l : m.params()) {
        s += "w";
        for (double v : l.weights) s += fmt::format(" {:.17g}", v);
        s += "\nb";
        for (double v : l.biases) s += fmt::format(" {:.17g}", v);
        s += "\n";
    }
    return s;
}

namespace {

std::vector<std::string> tokens_after(const std::string& line, const std::string& key) {
    std::istringstream in(line);
    std::string head;
    in >> head;
    if (head != key) throw DataError(fmt::format("malformed model file: expected '{}' line", key));
    std::vector<std::string> out;
    for (std::string t; in >> t;) out.push_back(t);
    return out;
}

std::vector<double> parse_values(const std::vector<std::string>& tokens, std::size_t expected,
                                 const char* what) {
    if (tokens.size() != expected)
        throw DataError(fmt::format("malformed model file: {} has {} values, expected {}", what,
                                    tokens.size(), expected));
    std::vector<double> v;
    v.reserve(expected);
    for (const auto& t : tokens) {
        char* end = nullptr;
        const double d = std::strtod(t.c_str(), &end);
        if (end == t.c_str() || *end != '\0' || !std::isfinite(d))
            throw DataError(fmt::format("malformed model file: bad number '{}'", t));
        v.push_back(d);
    }
    return v;
}

}  // namespace

MlpModel parse_model(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);)
        if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos) lines.push_back(line);
    if (lines.size() < 4 || lines[0].rfind("MLPv1", 0) != 0)
        throw DataError("malformed model file: missing MLPv1 header");

    std::vector<int> sizes;
    for (const auto& t : tokens_after(lines[1], "layers")) {
        try {
            std::size_t used = 0;
            sizes.push_back(std::stoi(t, &used));
            if (used != t.size()) throw std::invalid_argument(t);
        } catch (const std::exception&) {
            throw DataError(fmt::format("malformed model file: bad layer size '{}'", t));
        }
    }
    if (sizes.size() < 2 || std::any_of(sizes.begin(), sizes.end(), [](int n) { return n <= 0; }))
        throw DataError("dimension inconsistency: bad layer sizes");

    const auto features = tokens_after(lines[2], "features");
    if (features.size() != static_cast<std::size_t>(sizes.front()))
        throw DataError("bad feature order: feature count differs from input size");
    if (sizes.front() == static_cast<int>(kBandCount) && features != band_feature_names())
        throw DataError("bad feature order: expected B2 B3 B4 B5 B6 B7 B8 B8A B11 B12");

    const auto act = tokens_after(lines[3], "activation");
    if (act.size() != 1 || act[0] != "sigmoid")
        throw DataError(fmt::format("unknown activation tag '{}'", act.empty() ? "" : act[0]));

    MlpModel m(sizes, features);
    const std::size_t n_layers = sizes.size() - 1;
    if (lines.size() != 4 + 2 * n_layers)
        throw DataError(fmt::format("dimension inconsistency: expected {} parameter lines, found {}",
                                    2 * n_layers, lines.size() - 4));
    for (std::size_t l = 0; l < n_layers; ++l) {
        Layer& layer = m.params()[l];
        layer.weights = parse_values(tokens_after(lines[4 + 2 * l], "w"), layer.weights.size(), "weight list");
        layer.biases = parse_values(tokens_after(lines[5 + 2 * l], "b"), layer.biases.size(), "bias list");
    }
    return m;
}

void save_model(const MlpModel& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(fmt::format("cannot write model {}", path.string()));
    out << serialize_model(m);
    if (!out) throw DataError(fmt::format("failed writing model {}", path.string()));
}

MlpModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(fmt::format("cannot open model {}", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

}  // namespace raftcensus
