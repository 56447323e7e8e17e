#pragma once

// Network builders and end-to-end task pipelines.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fdl/curve.hpp"
#include "fdl/drawing.hpp"
#include "fdl/encode.hpp"
#include "fdl/errors.hpp"
#include "fdl/nn/loss.hpp"
#include "fdl/nn/network.hpp"
#include "fdl/nn/optim.hpp"
#include "fdl/nn/train.hpp"
#include "fdl/oracles.hpp"
#include "fdl/stats.hpp"
#include "fdl/synth.hpp"

namespace fdl {

using nn::LayerSpec;

inline std::vector<LayerSpec> cnn_trunk() {
    return {LayerSpec::conv(8),  LayerSpec::batch_norm(), LayerSpec::relu(), LayerSpec::avg_pool(),
            LayerSpec::conv(16), LayerSpec::batch_norm(), LayerSpec::relu(), LayerSpec::avg_pool(),
            LayerSpec::conv(32), LayerSpec::batch_norm(), LayerSpec::relu(), LayerSpec::dropout(0.2)};
}

/// One linear output, trained with MSE.
inline std::vector<LayerSpec> build_regression_cnn() {
    auto s = cnn_trunk();
    s.push_back(LayerSpec::dense(1));
    return s;
}

inline std::vector<LayerSpec> build_classifier_cnn(std::size_t num_classes) {
    if (num_classes < 2) throw ArgumentError("classifier needs at least 2 classes");
    auto s = cnn_trunk();
    s.push_back(LayerSpec::dense(num_classes));
    s.push_back(LayerSpec::softmax());
    return s;
}

/// Trainable parameters of the trunk plus a dense head with `outputs` units:
/// conv 9*c*f + f, batch norm 2f, dense 3*3*32*outputs + outputs.
constexpr std::size_t cnn_param_count(std::size_t outputs, std::size_t channels = 1) {
    std::size_t n = 0, cin = channels;
    for (std::size_t f : {8, 16, 32}) {
        n += 9 * cin * f + f + 2 * f;
        cin = f;
    }
    return n + 9 * 32 * outputs + outputs;
}

// ---------------------------------------------------------------------------
// Tasks

enum class TaskId {
    ExpRate,
    SineFreq,
    CosFreq,
    PeakWidth,
    PeakHeight,
    Lyapunov,
    SirBeta,
    Monotone,
    Curvature,
    Growth,
    PeakCount,
    DissolutionSim,
    Drawing,
};

inline constexpr std::array<TaskId, 13> all_tasks{
    TaskId::ExpRate,  TaskId::SineFreq,  TaskId::CosFreq, TaskId::PeakWidth, TaskId::PeakHeight,
    TaskId::Lyapunov, TaskId::SirBeta,   TaskId::Monotone, TaskId::Curvature, TaskId::Growth,
    TaskId::PeakCount, TaskId::DissolutionSim, TaskId::Drawing};

inline const char* to_string(TaskId t) {
    switch (t) {
        case TaskId::ExpRate: return "exp_rate";
        case TaskId::SineFreq: return "sine_freq";
        case TaskId::CosFreq: return "cos_freq";
        case TaskId::PeakWidth: return "peak_width";
        case TaskId::PeakHeight: return "peak_height";
        case TaskId::Lyapunov: return "lyapunov";
        case TaskId::SirBeta: return "sir_beta";
        case TaskId::Monotone: return "monotone";
        case TaskId::Curvature: return "curvature";
        case TaskId::Growth: return "growth";
        case TaskId::PeakCount: return "peak_count";
        case TaskId::DissolutionSim: return "dissolution_sim";
        case TaskId::Drawing: return "drawing";
    }
    return "?";
}

inline TaskId task_from_string(const std::string& s) {
    for (TaskId t : all_tasks)
        if (s == to_string(t)) return t;
    throw ArgumentError("unknown task '" + s + "'");
}

struct TaskPreset {
    TaskId id = TaskId::ExpRate;
    Family family = Family::Exponential;
    std::string label;
    /// 0 for regression.
    std::size_t classes = 0;
    /// Global normalization with bounds taken from the training curves.
    bool global_norm = false;
    std::size_t n_train = 1000;
    std::size_t n_val = 100;
    std::size_t n_test = 100;
    /// Samples per curve; 0 keeps the generator default.
    std::size_t points = 0;
    nn::TrainConfig train;

    bool is_classification() const noexcept { return classes > 0; }
};

/// Replication presets. Peak tasks default to the reduced 2000-curve
/// training set; pass full_scale for the 10000-curve configuration.
inline TaskPreset task_preset(TaskId id, bool full_scale = false) {
    TaskPreset p;
    p.id = id;
    p.train.batch_size = 16;
    p.train.epochs = 100;
    p.train.lr_drop_factor = 0.5;
    p.train.lr_drop_period = 25;
    const std::size_t peak_train = full_scale ? 10000 : 2000;
    switch (id) {
        case TaskId::ExpRate: p.family = Family::Exponential, p.label = "omega"; break;
        case TaskId::SineFreq: p.family = Family::Sine, p.label = "omega"; break;
        case TaskId::CosFreq: p.family = Family::Cosine, p.label = "omega"; break;
        case TaskId::PeakWidth:
            p.family = Family::GaussianMixture, p.label = "width", p.n_train = peak_train;
            break;
        case TaskId::PeakHeight:
            p.family = Family::GaussianMixture, p.label = "height", p.n_train = peak_train, p.global_norm = true;
            break;
        case TaskId::Lyapunov: p.family = Family::Lorenz, p.label = "lle"; break;
        case TaskId::SirBeta: p.family = Family::Sir, p.label = "beta"; break;
        case TaskId::Monotone: p.family = Family::Monotone, p.label = "class", p.classes = 2; break;
        case TaskId::Curvature: p.family = Family::Curvature, p.label = "class", p.classes = 2; break;
        case TaskId::Growth: p.family = Family::Growth, p.label = "class", p.classes = 2; break;
        case TaskId::PeakCount:
            p.family = Family::GaussianMixture, p.label = "peaks", p.classes = 3, p.n_train = peak_train;
            break;
        case TaskId::DissolutionSim: p.family = Family::Dissolution, p.label = "similar", p.classes = 2; break;
        case TaskId::Drawing: p.family = Family::Drawing, p.label = "class", p.classes = 2; break;
    }
    p.train.loss = p.is_classification() ? nn::LossKind::SoftmaxCrossEntropy : nn::LossKind::MSE;
    return p;
}

// ---------------------------------------------------------------------------
// Seeded generation
//
// split seed  = mix_seed(master, split)        split: 1 train, 2 val, 3 test
// record seed = mix_seed(split_seed, index)
// parameters from Rng(mix_seed(record, 0)), noise from mix_seed(record, 1).

enum class Split : std::uint64_t { Train = 1, Val = 2, Test = 3 };

inline const char* to_string(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    return "?";
}

inline std::uint64_t split_seed(std::uint64_t master, Split s) { return mix_seed(master, static_cast<std::uint64_t>(s)); }

/// Noise-free curve of a family with replication-preset parameter draws.
inline Curve draw_family_curve(Family f, Rng& rng, std::size_t points = 0) {
    auto with_n = [points](auto spec) {
        if (points) spec.n = points;
        return spec;
    };
    switch (f) {
        case Family::Exponential: return gen_exponential(with_n(draw_exponential(rng)));
        case Family::Sine: return gen_trig(with_n(draw_trig(rng, TrigKind::Sine)));
        case Family::Cosine: return gen_trig(with_n(draw_trig(rng, TrigKind::Cosine)));
        case Family::GaussianMixture: return gen_gaussian_mixture(draw_gaussian_mixture(rng, points ? points : 1000));
        case Family::Monotone: return gen_classification_curve(with_n(draw_monotone(rng)));
        case Family::Curvature: return gen_classification_curve(with_n(draw_curvature(rng)));
        case Family::Growth: return gen_classification_curve(with_n(draw_growth(rng)));
        case Family::Lorenz: return gen_lorenz(draw_lorenz(rng, points ? points : 1000));
        case Family::Sir: return gen_sir(with_n(draw_sir(rng)));
        default: break;
    }
    throw ArgumentError(std::string("family '") + to_string(f) + "' has no curve generator");
}

inline Curve make_record(Family f, std::uint64_t record_seed, double sigma, std::size_t points = 0) {
    Rng rng(mix_seed(record_seed, 0));
    Curve c = add_noise(draw_family_curve(f, rng, points), NoiseSpec{sigma}, mix_seed(record_seed, 1));
    c.meta().seed = record_seed;
    return c;
}

inline bool has_label(const Curve& c, const std::string& label) {
    const auto it = c.meta().labels.find(label);
    return it != c.meta().labels.end() && std::isfinite(it->second);
}

/// `count` records of one split. With a non-empty `required_label`, records
/// lacking that label (e.g. peak width of a curve without peaks) are skipped
/// and further indices drawn until the count is met.
inline std::vector<Curve> generate_split(Family f, std::size_t count, double sigma, std::uint64_t split_seed_value,
                                         std::size_t points = 0, const std::string& required_label = {}) {
    std::vector<Curve> out;
    out.reserve(count);
    for (std::uint64_t i = 0; out.size() < count; ++i) {
        if (i > 100 * count + 1000) throw DataError("generator rarely produces label '" + required_label + "'");
        Curve c = make_record(f, mix_seed(split_seed_value, i), sigma, points);
        if (!required_label.empty() && !has_label(c, required_label)) continue;
        out.push_back(std::move(c));
    }
    return out;
}

inline std::vector<double> labels_of(std::span<const Curve> curves, const std::string& label) {
    std::vector<double> out;
    out.reserve(curves.size());
    for (const Curve& c : curves) {
        const auto it = c.meta().labels.find(label);
        if (it == c.meta().labels.end()) throw DataError("curve has no label '" + label + "'");
        out.push_back(it->second);
    }
    return out;
}

/// Smallest and largest ordinate over a corpus.
inline std::pair<double, double> corpus_range(std::span<const Curve> curves) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const Curve& c : curves) {
        const auto [a, b] = std::minmax_element(c.ys().begin(), c.ys().end());
        lo = std::min(lo, *a);
        hi = std::max(hi, *b);
    }
    return {lo, hi};
}

/// Affine map of regression labels onto [0, 1].
struct LabelScaler {
    double lo = 0.0;
    double hi = 1.0;

    static LabelScaler fit(std::span<const double> v) {
        if (v.empty()) throw ArgumentError("label scaler: no labels");
        const auto [a, b] = std::minmax_element(v.begin(), v.end());
        return {*a, *b > *a ? *b : *a + 1.0};
    }
    double forward(double v) const { return (v - lo) / (hi - lo); }
    double inverse(double v) const { return lo + v * (hi - lo); }
    bool operator==(const LabelScaler&) const = default;
};

// ---------------------------------------------------------------------------
// Image tensors

inline nn::Tensor<float> images_to_tensor(std::span<const EncodedImage> images) {
    nn::Tensor<float> t(images.size(), {image_side, image_side, 1});
    for (std::size_t i = 0; i < images.size(); ++i)
        std::copy(images[i].pixels.begin(), images[i].pixels.end(), t.data.begin() + i * image_pixels);
    return t;
}

inline nn::Tensor<float> encode_tensor(std::span<const Curve> curves, const NormalizationMode& mode) {
    nn::Tensor<float> t(curves.size(), {image_side, image_side, 1});
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const EncodedImage img = encode(curves[i], mode);
        std::copy(img.pixels.begin(), img.pixels.end(), t.data.begin() + i * image_pixels);
    }
    return t;
}

/// Interleaves per-channel images (channels[c][i] is channel c of sample i)
/// into an n x 28 x 28 x C tensor.
inline nn::Tensor<float> stack_channels(const std::vector<std::vector<EncodedImage>>& channels) {
    if (channels.empty()) throw ArgumentError("stack_channels: no channels");
    const std::size_t c = channels.size(), n = channels[0].size();
    for (const auto& ch : channels)
        if (ch.size() != n) throw ArgumentError("stack_channels: channels differ in sample count");
    nn::Tensor<float> t(n, {image_side, image_side, c});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t p = 0; p < image_pixels; ++p)
            for (std::size_t k = 0; k < c; ++k) t.data[(i * image_pixels + p) * c + k] = static_cast<float>(channels[k][i].pixels[p]);
    return t;
}

// ---------------------------------------------------------------------------
// Trained model and report

struct ModelArtifact {
    TaskId task = TaskId::ExpRate;
    Family family = Family::Exponential;
    std::string label;
    std::size_t classes = 0;
    NormalizationMode norm;
    LabelScaler scaler;
    std::size_t points = 0;
    double train_sigma = 0.0;
    std::uint64_t master_seed = 0;
    nn::TrainConfig train;
    nn::History history;
    nn::Network<float> network;

    explicit ModelArtifact(nn::Network<float> net) : network(std::move(net)) {}

    bool is_classification() const noexcept { return classes > 0; }
    std::size_t input_channels() const noexcept { return network.input_shape().c; }

    /// Regression: denormalized values. Classification: argmax class.
    std::vector<double> predict_tensor(const nn::Tensor<float>& x) {
        const nn::Tensor<float> y = nn::predict(network, x);
        std::vector<double> out(x.n);
        for (std::size_t i = 0; i < x.n; ++i) {
            auto row = y.sample(i);
            if (is_classification())
                out[i] = static_cast<double>(std::max_element(row.begin(), row.end()) - row.begin());
            else
                out[i] = scaler.inverse(row[0]);
        }
        return out;
    }

    std::vector<double> predict_curves(std::span<const Curve> curves) { return predict_tensor(encode_tensor(curves, norm)); }
};

struct EvalReport {
    std::string task;
    double sigma = 0.0;        // noise of the evaluated test set
    double train_sigma = 0.0;  // noise the model was trained on
    std::uint64_t seed = 0;
    std::size_t n_train = 0, n_val = 0, n_test = 0;
    std::optional<RegressionReport> regression;
    std::optional<ConfusionMatrix> confusion;
    std::vector<BenchResult> bench;
    nn::History history;
    /// Extra per-item payloads for plotting (e.g. "f1", "f2").
    std::map<std::string, std::vector<double>> series;
    std::map<std::string, double> scalars;
};

struct TaskRun {
    EvalReport report;
    ModelArtifact model;
};

inline std::vector<int> to_int_labels(std::span<const double> v) {
    std::vector<int> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<int>(std::lround(v[i]));
    return out;
}

/// Fills regression or confusion fields from truth and predictions.
inline void score_into(EvalReport& rep, const ModelArtifact& model, std::span<const double> truth,
                       std::span<const double> pred) {
    if (model.is_classification()) {
        const auto t = to_int_labels(truth), p = to_int_labels(pred);
        rep.confusion = confusion(t, p, model.classes);
    } else {
        rep.regression = regression_report(truth, pred);
    }
}

/// Labels as network targets: class indices, or scaled regression values.
inline std::vector<float> make_targets(std::span<const double> labels, const ModelArtifact& model) {
    std::vector<float> t(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
        t[i] = static_cast<float>(model.is_classification() ? labels[i] : model.scaler.forward(labels[i]));
    return t;
}

struct RunOptions {
    std::uint64_t master_seed = 7;
    /// Noise of the test set when it differs from the training noise.
    std::optional<double> test_sigma;
    std::function<void(std::size_t, const nn::History&)> on_epoch;
};

/// generate -> encode -> train -> evaluate on the held-out test split.
inline TaskRun run_task(const TaskPreset& preset, const nn::TrainConfig& cfg, NoiseSpec sigma,
                        const RunOptions& opt = {}) {
    if (preset.id == TaskId::DissolutionSim || preset.id == TaskId::Drawing)
        throw ArgumentError(std::string("run_task: task '") + to_string(preset.id) + "' has its own pipeline");
    if (!(sigma.sigma >= 0.0)) throw ArgumentError("run_task: sigma must be >= 0");
    const std::string& required = preset.label;
    const double test_sigma = opt.test_sigma.value_or(sigma.sigma);
    const auto train_c = generate_split(preset.family, preset.n_train, sigma.sigma,
                                        split_seed(opt.master_seed, Split::Train), preset.points, required);
    const auto val_c = generate_split(preset.family, preset.n_val, sigma.sigma, split_seed(opt.master_seed, Split::Val),
                                      preset.points, required);
    const auto test_c = generate_split(preset.family, preset.n_test, test_sigma,
                                       split_seed(opt.master_seed, Split::Test), preset.points, required);

    const auto specs = preset.is_classification() ? build_classifier_cnn(preset.classes) : build_regression_cnn();
    ModelArtifact model(nn::Network<float>(specs, {image_side, image_side, 1}, {}, cfg.seed));
    model.task = preset.id;
    model.family = preset.family;
    model.label = preset.label;
    model.classes = preset.classes;
    model.points = preset.points;
    model.train_sigma = sigma.sigma;
    model.master_seed = opt.master_seed;
    model.train = cfg;

    const auto train_y = labels_of(train_c, preset.label);
    if (preset.global_norm) {
        const auto [lo, hi] = corpus_range(train_c);
        model.norm = NormalizationMode::global(lo, hi);
        // Labels share the image scaler.
        model.scaler = {lo, hi};
    } else {
        model.norm = NormalizationMode::local();
        if (!preset.is_classification()) model.scaler = LabelScaler::fit(train_y);
    }

    nn::LabeledSet<float> train_set{encode_tensor(train_c, model.norm), make_targets(train_y, model), 1};
    nn::LabeledSet<float> val_set{encode_tensor(val_c, model.norm), make_targets(labels_of(val_c, preset.label), model), 1};
    model.history = nn::train(model.network, train_set, &val_set, cfg, opt.on_epoch);

    EvalReport rep;
    rep.task = to_string(preset.id);
    rep.sigma = test_sigma;
    rep.train_sigma = sigma.sigma;
    rep.seed = opt.master_seed;
    rep.n_train = train_c.size();
    rep.n_val = val_c.size();
    rep.n_test = test_c.size();
    rep.history = model.history;
    const auto truth = labels_of(test_c, preset.label);
    const auto pred = model.predict_curves(test_c);
    score_into(rep, model, truth, pred);
    return {std::move(rep), std::move(model)};
}

// ---------------------------------------------------------------------------
// Siamese similarity network

struct SiameseSpec {
    std::size_t embedding = image_pixels;
    double init_sd = 0.01;
    /// Off by default: independent masks on the two branches make identical
    /// inputs look different during training.
    double dropout = 0.0;
};

/// Twin: conv blocks with max pooling and no batch norm, linear dense
/// embedding.
inline std::vector<LayerSpec> siamese_twin_layers(const SiameseSpec& s) {
    std::vector<LayerSpec> v{LayerSpec::conv(8),  LayerSpec::relu(), LayerSpec::max_pool(),
                             LayerSpec::conv(16), LayerSpec::relu(), LayerSpec::max_pool(),
                             LayerSpec::conv(32), LayerSpec::relu()};
    if (s.dropout > 0.0) v.push_back(LayerSpec::dropout(s.dropout));
    v.push_back(LayerSpec::dense(s.embedding));
    return v;
}

/// Both inputs run through one twin network (hard weight sharing); the head
/// scores p = sigmoid(w . |h1 - h2| + b).
template <class T>
class BasicSiamese {
public:
    BasicSiamese(const SiameseSpec& spec, nn::Shape input, std::uint64_t seed)
        : spec_(spec),
          twin_(siamese_twin_layers(spec), input, {nn::InitSpec::Kind::Normal, spec.init_sd}, seed),
          head_({LayerSpec::dense(1), LayerSpec::sigmoid()}, {1, 1, spec.embedding},
                {nn::InitSpec::Kind::Normal, spec.init_sd}, mix_seed(seed, 1)) {}

    const SiameseSpec& spec() const noexcept { return spec_; }
    nn::Network<T>& twin() noexcept { return twin_; }
    nn::Network<T>& head() noexcept { return head_; }
    nn::Shape input_shape() const noexcept { return twin_.input_shape(); }

    /// Probability that each pair (a_i, b_i) is similar.
    const nn::Tensor<T>& forward(const nn::Tensor<T>& a, const nn::Tensor<T>& b, bool training) {
        if (a.n != b.n || !(a.shape == b.shape)) throw ArgumentError("siamese: pair tensors differ in shape");
        const std::size_t n = a.n, k = a.sample_size();
        both_.resize(2 * n, a.shape);
        std::copy(a.data.begin(), a.data.end(), both_.data.begin());
        std::copy(b.data.begin(), b.data.end(), both_.data.begin() + n * k);
        const nn::Tensor<T>& h = twin_.forward(both_, training);
        const std::size_t e = spec_.embedding;
        diff_.resize(n, {1, 1, e});
        sign_.resize(n * e);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < e; ++j) {
                const T d = h.data[i * e + j] - h.data[(n + i) * e + j];
                diff_.data[i * e + j] = std::abs(d);
                sign_[i * e + j] = static_cast<T>((d > 0) - (d < 0));
            }
        n_ = n;
        return head_.forward(diff_, training);
    }

    void backward(const nn::Tensor<T>& grad_p) {
        const nn::Tensor<T>& gd = head_.backward(grad_p);
        const std::size_t n = n_, e = spec_.embedding;
        gh_.resize(2 * n, {1, 1, e});
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < e; ++j) {
                const T g = gd.data[i * e + j] * sign_[i * e + j];
                gh_.data[i * e + j] = g;
                gh_.data[(n + i) * e + j] = -g;
            }
        // Gradients of both twins accumulate into the shared parameters.
        twin_.backward(gh_);
    }

    void zero_grad() {
        twin_.zero_grad();
        head_.zero_grad();
    }
    std::vector<std::span<T>> param_groups() {
        auto v = twin_.param_groups();
        for (auto g : head_.param_groups()) v.push_back(g);
        return v;
    }
    std::vector<std::span<T>> grad_groups() {
        auto v = twin_.grad_groups();
        for (auto g : head_.grad_groups()) v.push_back(g);
        return v;
    }
    std::size_t param_count() { return twin_.param_count() + head_.param_count(); }

    std::vector<T> state_vector() {
        auto v = twin_.state_vector();
        const auto h = head_.state_vector();
        v.insert(v.end(), h.begin(), h.end());
        return v;
    }
    void load_state_vector(std::span<const T> v) {
        const std::size_t nt = twin_.state_vector().size();
        if (v.size() < nt) throw DataError("siamese parameter stream too short");
        twin_.load_state_vector(v.subspan(0, nt));
        head_.load_state_vector(v.subspan(nt));
    }

    /// Inference-mode similarity probabilities, chunked.
    std::vector<double> predict(const nn::Tensor<T>& a, const nn::Tensor<T>& b, std::size_t chunk = 128) {
        std::vector<double> out(a.n);
        nn::Tensor<T> ca, cb;
        std::vector<std::size_t> idx;
        for (std::size_t s = 0; s < a.n; s += chunk) {
            const std::size_t e = std::min(a.n, s + chunk);
            idx.resize(e - s);
            std::iota(idx.begin(), idx.end(), s);
            nn::gather(a, std::span<const std::size_t>(idx), ca);
            nn::gather(b, std::span<const std::size_t>(idx), cb);
            const auto& p = forward(ca, cb, false);
            for (std::size_t i = 0; i < idx.size(); ++i) out[s + i] = p.data[i];
        }
        return out;
    }

private:
    SiameseSpec spec_;
    nn::Network<T> twin_;
    nn::Network<T> head_;
    nn::Tensor<T> both_, diff_, gh_;
    std::vector<T> sign_;
    std::size_t n_ = 0;
};

using SiameseNetwork = BasicSiamese<float>;

inline SiameseNetwork build_siamese(const SiameseSpec& spec = {}, std::uint64_t seed = 0, std::size_t channels = 1) {
    return SiameseNetwork(spec, {image_side, image_side, channels}, seed);
}

struct PairSet {
    nn::Tensor<float> a, b;
    std::vector<float> targets;  // 1 similar, 0 dissimilar

    std::size_t size() const noexcept { return targets.size(); }
};

/// Mini-batch Adam on binary cross-entropy; same determinism contract as
/// nn::train.
inline nn::History train_siamese(SiameseNetwork& net, const PairSet& data, const PairSet* val,
                                 const nn::TrainConfig& cfg,
                                 const std::function<void(std::size_t, const nn::History&)>& on_epoch = {}) {
    if (data.size() == 0) throw ArgumentError("train_siamese: empty dataset");
    if (cfg.batch_size < 1) throw ArgumentError("train: batch_size must be >= 1");
    nn::Adam<float> opt(net.param_groups(), net.grad_groups(), cfg.adam);
    Rng shuffle_rng(mix_seed(cfg.seed, 12));
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    nn::Tensor<float> ba, bb, grad;
    std::vector<float> targets;
    nn::History hist;
    auto val_loss = [&]() {
        const auto p = net.predict(val->a, val->b);
        nn::Tensor<float> pt(p.size(), {1, 1, 1});
        for (std::size_t i = 0; i < p.size(); ++i) pt.data[i] = static_cast<float>(p[i]);
        return nn::compute_loss<float>(nn::LossKind::BinaryCrossEntropy, pt, val->targets, nullptr);
    };
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (cfg.lr_drop_period > 0 && epoch > 0 && epoch % cfg.lr_drop_period == 0)
            opt.set_lr(opt.lr() * cfg.lr_drop_factor);
        shuffle_rng.shuffle(std::span<std::size_t>(order));
        double total = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            std::span<const std::size_t> idx(order.data() + start, end - start);
            nn::gather(data.a, idx, ba);
            nn::gather(data.b, idx, bb);
            targets.resize(idx.size());
            for (std::size_t i = 0; i < idx.size(); ++i) targets[i] = data.targets[idx[i]];
            net.zero_grad();
            const auto& p = net.forward(ba, bb, true);
            const double loss = nn::compute_loss<float>(nn::LossKind::BinaryCrossEntropy, p, targets, &grad);
            if (!std::isfinite(loss))
                throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                   std::to_string(batches) + "; layer norms: " + net.twin().layer_norms());
            net.backward(grad);
            opt.step();
            total += loss;
            ++batches;
        }
        hist.train_loss.push_back(total / static_cast<double>(batches));
        if (val && val->size() > 0) hist.val_loss.push_back(val_loss());
        if (on_epoch) on_epoch(epoch, hist);
    }
    return hist;
}

/// Dissolution profiles are encoded with the fixed 0-100 % release scale.
inline NormalizationMode dissolution_norm() { return NormalizationMode::global(0.0, 100.0); }

/// Half the pairs similar, alternating by index.
inline std::vector<DissolutionPair> generate_pairs(std::size_t count, std::uint64_t split_seed_value) {
    std::vector<DissolutionPair> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(gen_dissolution_pair(i % 2 == 0 ? PairKind::Similar : PairKind::Dissimilar,
                                           mix_seed(split_seed_value, i)));
    return out;
}

inline PairSet encode_pairs(std::span<const DissolutionPair> pairs) {
    PairSet s;
    std::vector<EncodedImage> a, b;
    for (const auto& p : pairs) {
        a.push_back(encode(profile_curve(p.reference), dissolution_norm()));
        b.push_back(encode(profile_curve(p.test), dissolution_norm()));
        s.targets.push_back(p.kind == PairKind::Similar ? 1.0f : 0.0f);
    }
    s.a = images_to_tensor(a);
    s.b = images_to_tensor(b);
    return s;
}

struct DissolutionRun {
    EvalReport report;
    SiameseNetwork model;
    std::vector<double> f1, f2;  // per test pair
    double oracle_agreement = 0.0;
};

struct DissolutionOptions {
    std::uint64_t master_seed = 7;
    std::size_t n_train = 1000;
    std::size_t n_val = 100;
    std::size_t n_test = 100;
    SiameseSpec spec;
};

inline nn::TrainConfig dissolution_train_config() {
    nn::TrainConfig cfg = task_preset(TaskId::DissolutionSim).train;
    cfg.loss = nn::LossKind::BinaryCrossEntropy;
    return cfg;
}

inline DissolutionRun run_dissolution_task(const nn::TrainConfig& cfg, const DissolutionOptions& opt = {}) {
    const auto train_p = generate_pairs(opt.n_train, split_seed(opt.master_seed, Split::Train));
    const auto val_p = generate_pairs(opt.n_val, split_seed(opt.master_seed, Split::Val));
    const auto test_p = generate_pairs(opt.n_test, split_seed(opt.master_seed, Split::Test));
    DissolutionRun run{{}, build_siamese(opt.spec, cfg.seed), {}, {}, 0.0};
    const PairSet tr = encode_pairs(train_p), va = encode_pairs(val_p), te = encode_pairs(test_p);
    run.report.history = train_siamese(run.model, tr, &va, cfg);

    const auto prob = run.model.predict(te.a, te.b);
    std::vector<int> truth, pred;
    std::size_t agree = 0;
    for (std::size_t i = 0; i < test_p.size(); ++i) {
        truth.push_back(test_p[i].kind == PairKind::Similar ? 1 : 0);
        pred.push_back(prob[i] >= 0.5 ? 1 : 0);
        const auto sc = f1_f2(test_p[i].reference, test_p[i].test);
        run.f1.push_back(sc.f1);
        run.f2.push_back(sc.f2);
        agree += (sc.similar() ? 1 : 0) == truth.back();
    }
    run.oracle_agreement = static_cast<double>(agree) / static_cast<double>(test_p.size());
    auto& rep = run.report;
    rep.task = to_string(TaskId::DissolutionSim);
    rep.seed = opt.master_seed;
    rep.n_train = tr.size();
    rep.n_val = va.size();
    rep.n_test = te.size();
    rep.confusion = confusion(truth, pred, std::vector<std::string>{"dissimilar", "similar"});
    rep.series["f1"] = run.f1;
    rep.series["f2"] = run.f2;
    rep.series["probability"] = prob;
    rep.scalars["oracle_agreement"] = run.oracle_agreement;
    return run;
}

// ---------------------------------------------------------------------------
// Drawing classification

struct DrawingOptions {
    std::uint64_t seed = 7;
    std::vector<Channel> channels{Channel::X, Channel::Y};
    AugmentSpec augment;
    std::size_t base_copies = 4;
    /// Share of subjects held out for testing.
    double test_fraction = 0.2;
};

/// Per-channel locally normalized images for a set of records.
inline nn::Tensor<float> encode_drawings(std::span<const DrawingRecord> recs, const std::vector<Channel>& channels) {
    std::vector<std::vector<EncodedImage>> per(channels.size());
    for (const auto& r : recs) {
        const auto curves = drawings_to_curves(r, channels);
        for (std::size_t c = 0; c < channels.size(); ++c) per[c].push_back(encode(curves[c], NormalizationMode::local()));
    }
    return stack_channels(per);
}

/// Subject-level split (80/20 by default), augmentation of both parts, then
/// binary classification on C-channel images.
inline TaskRun run_drawing_task(const std::vector<DrawingRecord>& records, const nn::TrainConfig& cfg,
                                const DrawingOptions& opt = {}) {
    if (records.size() < 2) throw DataError("drawing task needs at least 2 subjects");
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(mix_seed(opt.seed, 21));
    rng.shuffle(std::span<std::size_t>(order));
    // Hold out a fraction of each class so both appear in the test part.
    std::vector<DrawingRecord> train_r, test_r;
    for (DrawingClass cls : {DrawingClass::Control, DrawingClass::Patient}) {
        std::vector<std::size_t> idx;
        for (std::size_t i : order)
            if (records[i].cls == cls) idx.push_back(i);
        const auto n_test = static_cast<std::size_t>(std::lround(opt.test_fraction * static_cast<double>(idx.size())));
        for (std::size_t j = 0; j < idx.size(); ++j) (j < n_test ? test_r : train_r).push_back(records[idx[j]]);
    }
    const auto train_aug = augment_corpus(train_r, opt.augment, opt.base_copies, mix_seed(opt.seed, 22));
    const auto test_aug = augment_corpus(test_r, opt.augment, opt.base_copies, mix_seed(opt.seed, 23));
    auto labels = [](std::span<const DrawingRecord> rs) {
        std::vector<double> v;
        for (const auto& r : rs) v.push_back(static_cast<double>(r.cls));
        return v;
    };

    ModelArtifact model(nn::Network<float>(build_classifier_cnn(2), {image_side, image_side, opt.channels.size()}, {},
                                           cfg.seed));
    model.task = TaskId::Drawing;
    model.family = Family::Drawing;
    model.label = "class";
    model.classes = 2;
    model.master_seed = opt.seed;
    model.train = cfg;
    const auto ytr = labels(train_aug);
    nn::LabeledSet<float> train_set{encode_drawings(train_aug, opt.channels), make_targets(ytr, model), 1};
    model.history = nn::train<float>(model.network, train_set, nullptr, cfg);

    EvalReport rep;
    rep.task = "drawing";
    rep.seed = opt.seed;
    rep.n_train = train_aug.size();
    rep.n_test = test_aug.size();
    rep.history = model.history;
    const auto truth = labels(test_aug);
    const auto pred = model.predict_tensor(encode_drawings(test_aug, opt.channels));
    rep.confusion = confusion(to_int_labels(truth), to_int_labels(pred), std::vector<std::string>{"control", "patient"});
    return {std::move(rep), std::move(model)};
}

// ---------------------------------------------------------------------------
// Benchmark

/// Times Rosenstein on every curve against encode + CNN predict on the same
/// curves. Returns {rosenstein, cnn}; cnn.speedup is the ratio.
inline std::pair<BenchResult, BenchResult> bench_lyapunov(std::span<const Curve> curves, ModelArtifact& model,
                                                          const RosensteinConfig& cfg, std::vector<double>* sink = nullptr) {
    if (curves.empty()) throw ArgumentError("bench_lyapunov: no curves");
    using clock = std::chrono::steady_clock;
    std::vector<double> rl(curves.size());
    const auto t0 = clock::now();
    for (std::size_t i = 0; i < curves.size(); ++i) rl[i] = rosenstein_lle(curves[i].ys(), cfg).lambda;
    const auto t1 = clock::now();
    const auto cnn = model.predict_curves(curves);
    const auto t2 = clock::now();
    if (sink) {
        *sink = rl;
        sink->insert(sink->end(), cnn.begin(), cnn.end());
    }
    BenchResult ros{"rosenstein", std::chrono::duration<double>(t1 - t0).count(), curves.size(), 1.0};
    BenchResult net{"cnn", std::chrono::duration<double>(t2 - t1).count(), curves.size(), 1.0};
    ros.seconds = std::max(ros.seconds, 1e-9);
    net.seconds = std::max(net.seconds, 1e-9);
    net.speedup = ros.seconds / net.seconds;
    return {ros, net};
}

}  // namespace fdl
