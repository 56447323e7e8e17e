#pragma once

// Persistence: dataset containers, model artifacts, PGM images, reports.
//
// Dataset directory:
//   manifest.json   format_version, family, count, points, x0/x1, sigma,
//                   master_seed, split, label_names, normalization, images
//   curves.f32le    count * points values, record-major
//   labels.f32le    count * label_names.size() values (NaN = absent)
//   images.f32le    count * 784 values, optional
//
// Model directory:
//   model.json      layers, input shape, scalers, seeds, training history
//   params.f32le    parameters then buffers of each layer, in layer order

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fdl/curve.hpp"
#include "fdl/encode.hpp"
#include "fdl/errors.hpp"
#include "fdl/models.hpp"

namespace fdl {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr int dataset_format_version = 1;
inline constexpr int model_format_version = 1;
inline constexpr int report_schema_version = 1;

// ---------------------------------------------------------------------------
// Little-endian float32 streams

inline void write_f32le(const fs::path& path, std::span<const float> v) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    std::vector<unsigned char> buf(v.size() * 4);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto u = std::bit_cast<std::uint32_t>(v[i]);
        for (int b = 0; b < 4; ++b) buf[4 * i + b] = static_cast<unsigned char>(u >> (8 * b));
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw DataError("short write to '" + path.string() + "'");
}

/// Reads exactly `expected` floats; any other file length is a size mismatch.
inline std::vector<float> read_f32le(const fs::path& path, std::size_t expected) {
    std::error_code ec;
    const auto bytes = fs::file_size(path, ec);
    if (ec) throw DataError("cannot read '" + path.string() + "'");
    if (bytes != expected * 4)
        throw DataError("size mismatch in '" + path.string() + "': " + std::to_string(bytes) + " bytes, manifest implies " +
                        std::to_string(expected * 4));
    std::ifstream in(path, std::ios::binary);
    std::vector<unsigned char> buf(bytes);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(bytes));
    if (!in) throw DataError("short read from '" + path.string() + "'");
    std::vector<float> v(expected);
    for (std::size_t i = 0; i < expected; ++i) {
        std::uint32_t u = 0;
        for (int b = 0; b < 4; ++b) u |= static_cast<std::uint32_t>(buf[4 * i + b]) << (8 * b);
        v[i] = std::bit_cast<float>(u);
    }
    return v;
}

inline json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError("malformed JSON in '" + path.string() + "': " + e.what());
    }
}

inline void write_json_file(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

/// Advisory lock: a lock file created exclusively, removed on destruction.
class DirectoryLock {
public:
    explicit DirectoryLock(const fs::path& dir) : path_(dir / ".lock") {
        fs::create_directories(dir);
        FILE* f = std::fopen(path_.string().c_str(), "wx");
        if (!f) throw DataError("directory '" + dir.string() + "' is locked by another writer (" + path_.string() + ")");
        std::fclose(f);
    }
    ~DirectoryLock() {
        std::error_code ec;
        fs::remove(path_, ec);
    }
    DirectoryLock(const DirectoryLock&) = delete;
    DirectoryLock& operator=(const DirectoryLock&) = delete;

private:
    fs::path path_;
};

// ---------------------------------------------------------------------------
// JSON conversions

inline json to_json(const NormalizationMode& m) {
    if (!m.is_global()) return {{"kind", "local"}};
    return {{"kind", "global"}, {"min", m.global_min}, {"max", m.global_max}};
}

inline NormalizationMode normalization_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "local") return NormalizationMode::local();
    if (kind == "global") return NormalizationMode::global(j.at("min").get<double>(), j.at("max").get<double>());
    throw DataError("unknown normalization kind '" + kind + "'");
}

/// Ranges of the replication-preset parameter draws, recorded in manifests.
inline json family_parameter_ranges(Family f) {
    switch (f) {
        case Family::Exponential: return {{"omega", {-1.0, 1.0}}, {"x", {0.0, 10.0}}};
        case Family::Sine:
        case Family::Cosine: return {{"omega", {0.0, 3.0}}, {"x", {0.0, 10.0}}};
        case Family::GaussianMixture:
            return {{"height", {0.0, 2200.0}}, {"width", "floor(50U+1)"}, {"position", "floor(50U+1)"}, {"x", {0.0, 50.0}}};
        case Family::Monotone:
        case Family::Curvature: return {{"w1", "sign(U-0.5)"}, {"w2", {2.5, 4.5}}, {"x", {0.0, 5.0}}};
        case Family::Growth: return {{"c", {1.0, 4.0}}, {"kind", "exp|algebraic 50/50"}, {"x", {0.0, 3.0}}};
        case Family::Lorenz: return {{"alpha", {0.0, 10.0}}, {"beta", {0.0, 8.0 / 3.0}}, {"rho", {0.0, 20.0}}, {"t", {0.0, 1.0}}};
        case Family::Sir: return {{"beta", {0.01, 1.0}}, {"t", {0.0, 50.0}}, {"scale", "percent"}};
        default: return json::object();
    }
}

inline std::vector<std::string> family_label_names(Family f) {
    switch (f) {
        case Family::Exponential:
        case Family::Sine:
        case Family::Cosine: return {"omega"};
        case Family::GaussianMixture: return {"peaks", "height", "width"};
        case Family::Monotone:
        case Family::Curvature:
        case Family::Growth: return {"class"};
        case Family::Lorenz: return {"lle", "degenerate"};
        case Family::Sir: return {"beta"};
        default: return {};
    }
}

// ---------------------------------------------------------------------------
// Dataset container

struct DatasetContainer {
    Family family = Family::Custom;
    std::size_t count = 0;
    std::size_t points = 0;
    double x0 = 0.0, x1 = 1.0;
    double sigma = 0.0;
    std::uint64_t master_seed = 0;
    std::string split = "train";
    std::vector<std::string> label_names;
    NormalizationMode norm;
    json parameter_ranges = json::object();
    std::vector<float> curves;
    std::vector<float> labels;
    std::vector<float> images;  // empty when not stored

    bool has_images() const noexcept { return !images.empty(); }

    std::vector<Curve> to_curves() const {
        std::vector<Curve> out;
        out.reserve(count);
        const std::size_t k = label_names.size();
        for (std::size_t i = 0; i < count; ++i) {
            std::vector<double> ys(curves.begin() + i * points, curves.begin() + (i + 1) * points);
            CurveMeta meta;
            meta.family = family;
            meta.noise_sigma = sigma;
            for (std::size_t j = 0; j < k; ++j) meta.labels[label_names[j]] = labels[i * k + j];
            out.push_back(Curve::on_grid(x0, x1, std::move(ys), std::move(meta)));
        }
        return out;
    }

    std::vector<double> label_column(const std::string& name) const {
        const auto it = std::find(label_names.begin(), label_names.end(), name);
        if (it == label_names.end()) throw DataError("dataset has no label '" + name + "'");
        const std::size_t j = static_cast<std::size_t>(it - label_names.begin()), k = label_names.size();
        std::vector<double> out(count);
        for (std::size_t i = 0; i < count; ++i) out[i] = labels[i * k + j];
        return out;
    }
};

inline Split split_from_string(const std::string& s) {
    for (Split sp : {Split::Train, Split::Val, Split::Test})
        if (s == to_string(sp)) return sp;
    throw ArgumentError("unknown split '" + s + "' (train, val or test)");
}

/// Packs curves into a container; labels missing on a curve are stored as NaN.
inline DatasetContainer pack_dataset(std::span<const Curve> curves, Family family, std::vector<std::string> label_names,
                                     bool with_images, const NormalizationMode& norm = NormalizationMode::local()) {
    DatasetContainer d;
    d.family = family;
    d.count = curves.size();
    d.label_names = std::move(label_names);
    d.norm = norm;
    d.parameter_ranges = family_parameter_ranges(family);
    if (!curves.empty()) {
        d.points = curves[0].size();
        d.x0 = curves[0].xs().front();
        d.x1 = curves[0].xs().back();
        d.sigma = curves[0].meta().noise_sigma;
    }
    const std::size_t k = d.label_names.size();
    d.curves.reserve(d.count * d.points);
    d.labels.reserve(d.count * k);
    for (const Curve& c : curves) {
        if (c.size() != d.points) throw ArgumentError("pack_dataset: curves differ in length");
        for (double y : c.ys()) d.curves.push_back(static_cast<float>(y));
        for (const auto& name : d.label_names) {
            const auto it = c.meta().labels.find(name);
            d.labels.push_back(it == c.meta().labels.end() ? std::numeric_limits<float>::quiet_NaN()
                                                           : static_cast<float>(it->second));
        }
        if (with_images) {
            const EncodedImage img = encode(c, norm);
            for (double p : img.pixels) d.images.push_back(static_cast<float>(p));
        }
    }
    return d;
}

/// Seeded generation of one split. Records are never filtered here; labels a
/// curve does not carry (peak width without peaks) are NaN.
inline DatasetContainer make_dataset(Family family, std::size_t count, double sigma, std::uint64_t master_seed,
                                     Split split = Split::Train, std::size_t points = 0, bool with_images = true) {
    const auto curves = generate_split(family, count, sigma, split_seed(master_seed, split), points);
    DatasetContainer d = pack_dataset(curves, family, family_label_names(family), with_images);
    d.master_seed = master_seed;
    d.split = to_string(split);
    d.sigma = sigma;
    return d;
}

inline json manifest_json(const DatasetContainer& d) {
    return {{"format_version", dataset_format_version},
            {"family", to_string(d.family)},
            {"count", d.count},
            {"points", d.points},
            {"x0", d.x0},
            {"x1", d.x1},
            {"sigma", d.sigma},
            {"master_seed", d.master_seed},
            {"split", d.split},
            {"seed_derivation", "record_seed = mix_seed(mix_seed(master_seed, split_id), index)"},
            {"label_names", d.label_names},
            {"normalization", to_json(d.norm)},
            {"parameter_ranges", d.parameter_ranges},
            {"images", d.has_images()},
            {"files", {{"curves", "curves.f32le"}, {"labels", "labels.f32le"}, {"images", "images.f32le"}}}};
}

inline void write_dataset(const fs::path& dir, const DatasetContainer& d) {
    if (d.curves.size() != d.count * d.points || d.labels.size() != d.count * d.label_names.size() ||
        (d.has_images() && d.images.size() != d.count * image_pixels))
        throw ArgumentError("write_dataset: payload sizes disagree with count");
    DirectoryLock lock(dir);
    write_f32le(dir / "curves.f32le", d.curves);
    write_f32le(dir / "labels.f32le", d.labels);
    std::error_code ec;
    if (d.has_images())
        write_f32le(dir / "images.f32le", d.images);
    else
        fs::remove(dir / "images.f32le", ec);
    write_json_file(dir / "manifest.json", manifest_json(d));
}

inline DatasetContainer read_dataset(const fs::path& dir) {
    const json m = read_json_file(dir / "manifest.json");
    DatasetContainer d;
    try {
        const int version = m.at("format_version").get<int>();
        if (version != dataset_format_version)
            throw DataError("dataset format version " + std::to_string(version) + " is not supported (expected " +
                            std::to_string(dataset_format_version) + ")");
        d.family = family_from_string(m.at("family").get<std::string>());
        d.count = m.at("count").get<std::size_t>();
        d.points = m.at("points").get<std::size_t>();
        d.x0 = m.at("x0").get<double>();
        d.x1 = m.at("x1").get<double>();
        d.sigma = m.at("sigma").get<double>();
        d.master_seed = m.at("master_seed").get<std::uint64_t>();
        d.split = m.at("split").get<std::string>();
        d.label_names = m.at("label_names").get<std::vector<std::string>>();
        d.norm = normalization_from_json(m.at("normalization"));
        d.parameter_ranges = m.value("parameter_ranges", json::object());
        const bool images = m.at("images").get<bool>();
        d.curves = read_f32le(dir / "curves.f32le", d.count * d.points);
        d.labels = read_f32le(dir / "labels.f32le", d.count * d.label_names.size());
        if (images) d.images = read_f32le(dir / "images.f32le", d.count * image_pixels);
    } catch (const json::exception& e) {
        throw DataError("invalid manifest in '" + dir.string() + "': " + e.what());
    } catch (const ArgumentError& e) {
        throw DataError("invalid manifest in '" + dir.string() + "': " + e.what());
    }
    return d;
}

// ---------------------------------------------------------------------------
// Models

inline json to_json(const nn::LayerSpec& s) {
    json j{{"kind", nn::to_string(s.kind)}};
    switch (s.kind) {
        case nn::LayerKind::Conv:
        case nn::LayerKind::Dense: j["units"] = s.units; break;
        case nn::LayerKind::Dropout: j["rate"] = s.rate; break;
        case nn::LayerKind::BatchNorm:
            j["eps"] = s.eps;
            j["momentum"] = s.momentum;
            break;
        default: break;
    }
    return j;
}

inline nn::LayerSpec layer_from_json(const json& j) {
    nn::LayerSpec s;
    s.kind = nn::layer_kind_from_string(j.at("kind").get<std::string>());
    s.units = j.value("units", std::size_t{0});
    s.rate = j.value("rate", 0.0);
    s.eps = j.value("eps", 1e-5);
    s.momentum = j.value("momentum", 0.9);
    return s;
}

inline json to_json(const nn::Shape& s) { return {s.h, s.w, s.c}; }
inline nn::Shape shape_from_json(const json& j) { return {j.at(0).get<std::size_t>(), j.at(1).get<std::size_t>(), j.at(2).get<std::size_t>()}; }

inline json to_json(const nn::InitSpec& i) {
    if (i.kind == nn::InitSpec::Kind::Normal) return {{"kind", "normal"}, {"sd", i.sd}};
    return {{"kind", "he_uniform"}};
}
inline nn::InitSpec init_from_json(const json& j) {
    if (j.at("kind") == "normal") return {nn::InitSpec::Kind::Normal, j.at("sd").get<double>()};
    return {};
}

inline json to_json(const nn::TrainConfig& c) {
    return {{"optimizer", "adam"},
            {"lr", c.adam.lr},
            {"beta1", c.adam.beta1},
            {"beta2", c.adam.beta2},
            {"eps", c.adam.eps},
            {"batch_size", c.batch_size},
            {"epochs", c.epochs},
            {"loss", nn::to_string(c.loss)},
            {"seed", c.seed},
            {"lr_drop_factor", c.lr_drop_factor},
            {"lr_drop_period", c.lr_drop_period}};
}

inline nn::TrainConfig train_config_from_json(const json& j, nn::TrainConfig c = {}) {
    c.adam.lr = j.value("lr", c.adam.lr);
    c.adam.beta1 = j.value("beta1", c.adam.beta1);
    c.adam.beta2 = j.value("beta2", c.adam.beta2);
    c.adam.eps = j.value("eps", c.adam.eps);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.epochs = j.value("epochs", c.epochs);
    if (j.contains("loss")) c.loss = nn::loss_kind_from_string(j.at("loss").get<std::string>());
    c.seed = j.value("seed", c.seed);
    c.lr_drop_factor = j.value("lr_drop_factor", c.lr_drop_factor);
    c.lr_drop_period = j.value("lr_drop_period", c.lr_drop_period);
    return c;
}

inline json to_json(const nn::History& h) { return {{"train_loss", h.train_loss}, {"val_loss", h.val_loss}}; }

inline nn::History history_from_json(const json& j) {
    return {j.at("train_loss").get<std::vector<double>>(), j.at("val_loss").get<std::vector<double>>()};
}

inline json layers_json(const std::vector<nn::LayerSpec>& specs) {
    json a = json::array();
    for (const auto& s : specs) a.push_back(to_json(s));
    return a;
}

inline std::vector<nn::LayerSpec> layers_from_json(const json& a) {
    std::vector<nn::LayerSpec> out;
    for (const auto& j : a) out.push_back(layer_from_json(j));
    return out;
}

inline json model_manifest(ModelArtifact& m) {
    return {{"format_version", model_format_version},
            {"kind", "cnn"},
            {"task", to_string(m.task)},
            {"family", to_string(m.family)},
            {"label", m.label},
            {"classes", m.classes},
            {"input_shape", to_json(m.network.input_shape())},
            {"layers", layers_json(m.network.specs())},
            {"init", to_json(m.network.init_spec())},
            {"normalization", to_json(m.norm)},
            {"label_scaler", {{"min", m.scaler.lo}, {"max", m.scaler.hi}}},
            {"points", m.points},
            {"train_sigma", m.train_sigma},
            {"master_seed", m.master_seed},
            {"train", to_json(m.train)},
            {"history", to_json(m.history)},
            {"param_count", m.network.param_count()},
            {"state_size", m.network.state_vector().size()},
            {"param_file", "params.f32le"}};
}

inline void save_model(const fs::path& dir, ModelArtifact& m) {
    DirectoryLock lock(dir);
    write_f32le(dir / "params.f32le", m.network.state_vector());
    write_json_file(dir / "model.json", model_manifest(m));
}

inline ModelArtifact load_model(const fs::path& dir) {
    const json j = read_json_file(dir / "model.json");
    try {
        if (j.at("format_version").get<int>() != model_format_version) throw DataError("unsupported model format version");
        if (j.value("kind", std::string("cnn")) != "cnn") throw DataError("model in '" + dir.string() + "' is not a CNN model");
        ModelArtifact m(nn::Network<float>(layers_from_json(j.at("layers")), shape_from_json(j.at("input_shape")),
                                           init_from_json(j.at("init"))));
        m.task = task_from_string(j.at("task").get<std::string>());
        m.family = family_from_string(j.at("family").get<std::string>());
        m.label = j.at("label").get<std::string>();
        m.classes = j.at("classes").get<std::size_t>();
        m.norm = normalization_from_json(j.at("normalization"));
        m.scaler = {j.at("label_scaler").at("min").get<double>(), j.at("label_scaler").at("max").get<double>()};
        m.points = j.at("points").get<std::size_t>();
        m.train_sigma = j.at("train_sigma").get<double>();
        m.master_seed = j.at("master_seed").get<std::uint64_t>();
        m.train = train_config_from_json(j.at("train"));
        m.history = history_from_json(j.at("history"));
        const auto state = read_f32le(dir / "params.f32le", j.at("state_size").get<std::size_t>());
        m.network.load_state_vector(state);
        return m;
    } catch (const json::exception& e) {
        throw DataError("invalid model manifest in '" + dir.string() + "': " + e.what());
    } catch (const ArgumentError& e) {
        throw DataError("invalid model manifest in '" + dir.string() + "': " + e.what());
    }
}

inline void save_siamese(const fs::path& dir, SiameseNetwork& net, const nn::TrainConfig& cfg, const nn::History& h,
                         std::uint64_t master_seed) {
    DirectoryLock lock(dir);
    const auto state = net.state_vector();
    write_f32le(dir / "params.f32le", state);
    write_json_file(dir / "model.json",
                    {{"format_version", model_format_version},
                     {"kind", "siamese"},
                     {"task", to_string(TaskId::DissolutionSim)},
                     {"input_shape", to_json(net.input_shape())},
                     {"twin_layers", layers_json(net.twin().specs())},
                     {"embedding", net.spec().embedding},
                     {"init_sd", net.spec().init_sd},
                     {"dropout", net.spec().dropout},
                     {"normalization", to_json(dissolution_norm())},
                     {"master_seed", master_seed},
                     {"train", to_json(cfg)},
                     {"history", to_json(h)},
                     {"param_count", net.param_count()},
                     {"state_size", state.size()},
                     {"param_file", "params.f32le"}});
}

inline SiameseNetwork load_siamese(const fs::path& dir) {
    const json j = read_json_file(dir / "model.json");
    try {
        if (j.at("kind") != "siamese") throw DataError("model in '" + dir.string() + "' is not a Siamese model");
        SiameseSpec spec{j.at("embedding").get<std::size_t>(), j.at("init_sd").get<double>(), j.at("dropout").get<double>()};
        SiameseNetwork net(spec, shape_from_json(j.at("input_shape")), 0);
        net.load_state_vector(read_f32le(dir / "params.f32le", j.at("state_size").get<std::size_t>()));
        return net;
    } catch (const json::exception& e) {
        throw DataError("invalid model manifest in '" + dir.string() + "': " + e.what());
    }
}

// ---------------------------------------------------------------------------
// PGM (P5, maxval 255)

inline std::uint8_t gray_byte(double g) {
    const double v = std::floor(255.0 * std::clamp(g, 0.0, 1.0) + 0.5);
    return static_cast<std::uint8_t>(v);
}

inline void export_pgm(const EncodedImage& img, const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << "P5\n" << image_side << ' ' << image_side << "\n255\n";
    for (double p : img.pixels) out.put(static_cast<char>(gray_byte(p)));
    if (!out) throw DataError("short write to '" + path.string() + "'");
}

inline EncodedImage import_pgm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::string magic;
    std::size_t w = 0, h = 0, maxval = 0;
    in >> magic >> w >> h >> maxval;
    if (magic != "P5" || w != image_side || h != image_side || maxval != 255)
        throw DataError("'" + path.string() + "' is not a 28x28 P5 PGM with maxval 255");
    in.get();
    EncodedImage img;
    for (double& p : img.pixels) {
        const int c = in.get();
        if (c == EOF) throw DataError("truncated PGM '" + path.string() + "'");
        p = static_cast<double>(c) / 255.0;
    }
    return img;
}

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const RegressionReport& r) {
    return {{"n", r.n},
            {"r", r.r},
            {"intercept", r.intercept},
            {"slope", r.slope},
            {"se_intercept", r.se_intercept},
            {"se_slope", r.se_slope},
            {"p_intercept", r.p_intercept},
            {"p_slope", r.p_slope},
            {"degenerate", r.degenerate},
            {"scatter", {{"true", r.truth}, {"predicted", r.predicted}}}};
}

inline json to_json(const ConfusionMatrix& c) {
    return {{"labels", c.labels}, {"counts", c.counts}, {"accuracy", c.accuracy}, {"total", c.total()}};
}

inline json to_json(const BenchResult& b) {
    return {{"method", b.method}, {"seconds", b.seconds}, {"items", b.items}, {"speedup", b.speedup}};
}

/// EvalReport schema (version 1): schema_version, task, sigma, train_sigma,
/// seed, sizes{train,val,test}, history{train_loss,val_loss}, and optional
/// regression, confusion, bench[], series{name: [..]}, scalars{name: x}.
inline json to_json(const EvalReport& r) {
    json j{{"schema_version", report_schema_version},
           {"task", r.task},
           {"sigma", r.sigma},
           {"train_sigma", r.train_sigma},
           {"seed", r.seed},
           {"sizes", {{"train", r.n_train}, {"val", r.n_val}, {"test", r.n_test}}},
           {"history", to_json(r.history)}};
    if (r.regression) j["regression"] = to_json(*r.regression);
    if (r.confusion) j["confusion"] = to_json(*r.confusion);
    if (!r.bench.empty()) {
        j["bench"] = json::array();
        for (const auto& b : r.bench) j["bench"].push_back(to_json(b));
    }
    if (!r.series.empty()) j["series"] = r.series;
    if (!r.scalars.empty()) j["scalars"] = r.scalars;
    return j;
}

/// Problems found in a report document; empty when it conforms.
inline std::vector<std::string> validate_report_json(const json& j) {
    std::vector<std::string> errs;
    auto need = [&](const json& obj, const char* key, auto pred, const char* what, const std::string& where) {
        if (!obj.is_object() || !obj.contains(key))
            errs.push_back(where + key + " missing");
        else if (!pred(obj.at(key)))
            errs.push_back(where + key + " must be " + what);
    };
    auto is_num = [](const json& v) { return v.is_number() || v.is_null(); };
    auto is_str = [](const json& v) { return v.is_string(); };
    auto is_obj = [](const json& v) { return v.is_object(); };
    auto is_arr = [](const json& v) { return v.is_array(); };
    auto is_uint = [](const json& v) { return v.is_number_unsigned(); };
    need(j, "schema_version", [](const json& v) { return v == report_schema_version; }, "1", "");
    need(j, "task", is_str, "a string", "");
    need(j, "sigma", is_num, "a number", "");
    need(j, "train_sigma", is_num, "a number", "");
    need(j, "seed", is_uint, "an unsigned integer", "");
    need(j, "sizes", is_obj, "an object", "");
    need(j, "history", is_obj, "an object", "");
    if (j.contains("sizes"))
        for (const char* k : {"train", "val", "test"}) need(j["sizes"], k, is_uint, "an unsigned integer", "sizes.");
    if (j.contains("history"))
        for (const char* k : {"train_loss", "val_loss"}) need(j["history"], k, is_arr, "an array", "history.");
    if (j.contains("regression")) {
        const auto& r = j["regression"];
        for (const char* k : {"r", "intercept", "slope", "p_intercept", "p_slope"}) need(r, k, is_num, "a number", "regression.");
        need(r, "n", is_uint, "an unsigned integer", "regression.");
        need(r, "scatter", is_obj, "an object", "regression.");
        if (r.contains("r") && r["r"].is_number() && std::abs(r["r"].get<double>()) > 1.0) errs.push_back("regression.r outside [-1, 1]");
        for (const char* k : {"p_intercept", "p_slope"})
            if (r.contains(k) && r[k].is_number() && (r[k].get<double>() < 0.0 || r[k].get<double>() > 1.0))
                errs.push_back(std::string("regression.") + k + " outside [0, 1]");
    }
    if (j.contains("confusion")) {
        const auto& c = j["confusion"];
        need(c, "labels", is_arr, "an array", "confusion.");
        need(c, "counts", is_arr, "an array", "confusion.");
        need(c, "accuracy", is_num, "a number", "confusion.");
    }
    if (j.contains("bench")) {
        if (!j["bench"].is_array()) errs.push_back("bench must be an array");
        else
            for (const auto& b : j["bench"]) {
                need(b, "method", is_str, "a string", "bench[].");
                need(b, "seconds", is_num, "a number", "bench[].");
                need(b, "speedup", is_num, "a number", "bench[].");
            }
    }
    return errs;
}

inline void write_report(const fs::path& path, const EvalReport& r) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_json_file(path, to_json(r));
}

/// true,predicted rows of a regression report.
inline void write_scatter_csv(const fs::path& path, const RegressionReport& r) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out.precision(9);
    out << "true,predicted\n";
    for (std::size_t i = 0; i < r.truth.size(); ++i) out << r.truth[i] << ',' << r.predicted[i] << '\n';
}

/// Histogram of a series: bin_lo,bin_hi,count rows over [lo, hi).
inline void write_histogram_csv(const fs::path& path, std::span<const double> v, std::size_t bins, double lo, double hi) {
    if (bins == 0 || !(hi > lo)) throw ArgumentError("histogram: need bins > 0 and hi > lo");
    std::vector<std::size_t> counts(bins, 0);
    for (double x : v) {
        if (!std::isfinite(x)) continue;
        auto b = static_cast<std::ptrdiff_t>(std::floor((x - lo) / (hi - lo) * static_cast<double>(bins)));
        b = std::clamp<std::ptrdiff_t>(b, 0, static_cast<std::ptrdiff_t>(bins) - 1);
        ++counts[static_cast<std::size_t>(b)];
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << "bin_lo,bin_hi,count\n";
    const double w = (hi - lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i < bins; ++i) out << lo + w * i << ',' << lo + w * (i + 1) << ',' << counts[i] << '\n';
}

}  // namespace fdl
