// fdl: command-line front end.
//
//   fdl generate  --family exp --count 1000 --noise 0 --seed 7 --out data/exp_train
//   fdl train     --task exp_rate --data data/exp_train --val data/exp_val --out models/exp
//   fdl eval      --model models/exp --data data/exp_test --report reports/exp.json
//   fdl bench     --task lyapunov --count 10000
//   fdl replicate --matrix configs/replicate_quick.json --out runs/quick [--dry-run]
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric failure.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fdl/io.hpp"
#include "fdl/models.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Timestamped progress lines go to <out>/run.log only, so every other
/// output file is byte-identical across reruns.
class RunLog {
public:
    void open(const fs::path& dir) {
        fs::create_directories(dir);
        file_.open(dir / "run.log", std::ios::app);
    }
    void line(const std::string& msg) {
        std::cout << msg << '\n';
        if (!file_) return;
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        gmtime_r(&now, &tm);
        file_ << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << ' ' << msg << '\n';
        file_.flush();
    }

private:
    std::ofstream file_;
};

/// Defaults < config file < explicit flags.
struct Settings {
    json config = json::object();
    CLI::App* app = nullptr;

    template <class T>
    void resolve(const std::string& flag, const std::string& key, T& value) const {
        if (app->count("--" + flag) > 0) return;
        if (config.contains(key)) {
            try {
                value = config.at(key).get<T>();
            } catch (const json::exception& e) {
                throw fdl::ArgumentError("config key '" + key + "': " + e.what());
            }
        }
    }
};

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    json j = fdl::read_json_file(path);
    if (!j.is_object()) throw fdl::ArgumentError("config file must hold a JSON object");
    return j;
}

std::size_t thread_cap() {
    const char* env = std::getenv("FDL_THREADS");
    if (!env || !*env) return 1;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw fdl::ArgumentError("FDL_THREADS must be a positive integer");
    return static_cast<std::size_t>(v);
}

void write_resolved(const fs::path& dir, const json& resolved) {
    fs::create_directories(dir);
    fdl::write_json_file(dir / "config.resolved.json", resolved);
}

std::string fmt(double v, int prec = 4) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(prec) << v;
    return s.str();
}

std::string summary(const fdl::EvalReport& r) {
    std::string s = r.task + " sigma=" + fmt(r.sigma, 2);
    if (r.regression) s += " r=" + fmt(r.regression->r) + " slope=" + fmt(r.regression->slope, 3);
    if (r.confusion) s += " accuracy=" + fmt(r.confusion->accuracy, 3);
    return s;
}

/// Report JSON plus CSV payloads next to it.
void write_report_bundle(const fs::path& path, const fdl::EvalReport& rep) {
    fdl::write_report(path, rep);
    const fs::path stem = path.parent_path() / path.stem();
    if (rep.regression) fdl::write_scatter_csv(stem.string() + ".scatter.csv", *rep.regression);
    if (auto it = rep.series.find("f1"); it != rep.series.end())
        fdl::write_histogram_csv(stem.string() + ".f1_hist.csv", it->second, 20, 0.0, 100.0);
    if (auto it = rep.series.find("f2"); it != rep.series.end())
        fdl::write_histogram_csv(stem.string() + ".f2_hist.csv", it->second, 20, 0.0, 100.0);
}

/// Curves of a dataset that carry `label`, with the label values.
std::pair<std::vector<fdl::Curve>, std::vector<double>> labeled_curves(const fdl::DatasetContainer& d,
                                                                         const std::string& label) {
    std::vector<fdl::Curve> curves;
    std::vector<double> y;
    for (auto& c : d.to_curves()) {
        if (!fdl::has_label(c, label)) continue;
        y.push_back(c.meta().labels.at(label));
        curves.push_back(std::move(c));
    }
    if (curves.empty()) throw fdl::DataError("dataset has no records with label '" + label + "'");
    return {std::move(curves), std::move(y)};
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
    std::string family, out, split = "train";
    std::size_t count = 1000, points = 0;
    double noise = 0.0;
    std::uint64_t seed = 7;
    bool no_images = false;
    std::string normalization = "local";
};

fdl::NormalizationMode parse_normalization(const std::string& s) {
    if (s == "local") return fdl::NormalizationMode::local();
    // global:MIN:MAX
    if (s.rfind("global:", 0) == 0) {
        const auto rest = s.substr(7);
        const auto colon = rest.find(':');
        if (colon != std::string::npos) {
            try {
                return fdl::NormalizationMode::global(std::stod(rest.substr(0, colon)), std::stod(rest.substr(colon + 1)));
            } catch (const std::invalid_argument&) {
            }
        }
    }
    throw fdl::ArgumentError("normalization must be 'local' or 'global:MIN:MAX'");
}

int cmd_generate(const GenerateArgs& a, RunLog& log) {
    const fdl::Family family = fdl::family_from_string(a.family);
    if (a.count == 0) throw fdl::ArgumentError("--count must be >= 1");
    if (!(a.noise >= 0.0)) throw fdl::ArgumentError("--noise must be >= 0");
    const auto split = fdl::split_from_string(a.split);
    const auto norm = parse_normalization(a.normalization);
    log.open(a.out);
    write_resolved(a.out, {{"command", "generate"}, {"family", a.family}, {"count", a.count}, {"noise", a.noise},
                           {"seed", a.seed}, {"split", a.split}, {"points", a.points}, {"images", !a.no_images},
                           {"normalization", fdl::to_json(norm)}});
    log.line("generating " + std::to_string(a.count) + " " + a.family + " curves (" + a.split + ", sigma " +
             fmt(a.noise, 2) + ", seed " + std::to_string(a.seed) + ")");
    const auto curves = fdl::generate_split(family, a.count, a.noise, fdl::split_seed(a.seed, split), a.points);
    auto d = fdl::pack_dataset(curves, family, fdl::family_label_names(family), !a.no_images, norm);
    d.master_seed = a.seed;
    d.split = a.split;
    d.sigma = a.noise;
    fdl::write_dataset(a.out, d);
    log.line("wrote " + (fs::path(a.out) / "manifest.json").string());
    return 0;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
    std::string task, data, val, out, drawings, channels = "X,Y";
    std::size_t epochs = 100, batch_size = 16;
    double lr = 1e-3, noise = 0.0;
    std::uint64_t seed = 7;
    bool full_scale = false;
};

std::vector<fdl::Channel> parse_channels(const std::string& s) {
    std::vector<fdl::Channel> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(fdl::channel_from_string(tok));
    if (out.empty()) throw fdl::ArgumentError("--channels needs at least one of X,Y,Z,P,A");
    return out;
}

int cmd_train(const TrainArgs& a, RunLog& log) {
    const fdl::TaskId task = fdl::task_from_string(a.task);
    fdl::TaskPreset preset = fdl::task_preset(task, a.full_scale);
    fdl::nn::TrainConfig cfg = preset.train;
    cfg.epochs = a.epochs;
    cfg.batch_size = a.batch_size;
    cfg.adam.lr = a.lr;
    cfg.seed = a.seed;
    if (!(a.lr >= 0.0)) throw fdl::ArgumentError("--lr must be >= 0");
    if (a.batch_size < 1) throw fdl::ArgumentError("--batch-size must be >= 1");
    log.open(a.out);
    json resolved{{"command", "train"},   {"task", a.task},   {"data", a.data},   {"val", a.val},
                  {"epochs", a.epochs},   {"batch_size", a.batch_size}, {"lr", a.lr}, {"seed", a.seed},
                  {"noise", a.noise},     {"full_scale", a.full_scale}, {"threads", thread_cap()},
                  {"train", fdl::to_json(cfg)}};
    auto epoch_log = [&](std::size_t e, const fdl::nn::History& h) {
        std::string msg = "epoch " + std::to_string(e + 1) + "/" + std::to_string(cfg.epochs) + " train " +
                          fmt(h.train_loss.back(), 6);
        if (!h.val_loss.empty()) msg += " val " + fmt(h.val_loss.back(), 6);
        log.line(msg);
    };

    if (task == fdl::TaskId::DissolutionSim) {
        cfg.loss = fdl::nn::LossKind::BinaryCrossEntropy;
        resolved["train"] = fdl::to_json(cfg);
        write_resolved(a.out, resolved);
        fdl::DissolutionOptions opt;
        opt.master_seed = a.seed;
        const auto tr = fdl::encode_pairs(fdl::generate_pairs(opt.n_train, fdl::split_seed(a.seed, fdl::Split::Train)));
        const auto va = fdl::encode_pairs(fdl::generate_pairs(opt.n_val, fdl::split_seed(a.seed, fdl::Split::Val)));
        auto net = fdl::build_siamese(opt.spec, cfg.seed);
        const auto hist = fdl::train_siamese(net, tr, &va, cfg, epoch_log);
        fdl::save_siamese(a.out, net, cfg, hist, a.seed);
        log.line("saved Siamese model to " + a.out);
        return 0;
    }

    if (task == fdl::TaskId::Drawing) {
        write_resolved(a.out, resolved);
        const auto records = a.drawings.empty() ? fdl::synthetic_spiral_corpus(10, 40, a.seed)
                                                : fdl::ingest_drawings(a.drawings);
        fdl::DrawingOptions opt;
        opt.seed = a.seed;
        opt.channels = parse_channels(a.channels);
        auto run = fdl::run_drawing_task(records, cfg, opt);
        fdl::save_model(a.out, run.model);
        write_report_bundle(fs::path(a.out) / "report.json", run.report);
        log.line(summary(run.report));
        return 0;
    }

    // Curve tasks: from dataset containers, or generated in memory.
    std::vector<fdl::Curve> train_c, val_c;
    std::vector<double> train_y, val_y;
    if (!a.data.empty()) {
        const auto d = fdl::read_dataset(a.data);
        if (d.family != preset.family)
            throw fdl::DataError(std::string("dataset family '") + fdl::to_string(d.family) + "' does not fit task " + a.task);
        std::tie(train_c, train_y) = labeled_curves(d, preset.label);
        if (!a.val.empty()) {
            const auto v = fdl::read_dataset(a.val);
            if (v.family != preset.family) throw fdl::DataError("validation dataset family does not fit task " + a.task);
            std::tie(val_c, val_y) = labeled_curves(v, preset.label);
        }
    } else {
        train_c = fdl::generate_split(preset.family, preset.n_train, a.noise, fdl::split_seed(a.seed, fdl::Split::Train),
                                      preset.points, preset.label);
        val_c = fdl::generate_split(preset.family, preset.n_val, a.noise, fdl::split_seed(a.seed, fdl::Split::Val),
                                    preset.points, preset.label);
        train_y = fdl::labels_of(train_c, preset.label);
        val_y = fdl::labels_of(val_c, preset.label);
    }
    write_resolved(a.out, resolved);

    const auto specs = preset.is_classification() ? fdl::build_classifier_cnn(preset.classes) : fdl::build_regression_cnn();
    fdl::ModelArtifact model(fdl::nn::Network<float>(specs, {fdl::image_side, fdl::image_side, 1}, {}, cfg.seed));
    model.task = task;
    model.family = preset.family;
    model.label = preset.label;
    model.classes = preset.classes;
    model.points = train_c.front().size();
    model.train_sigma = train_c.front().meta().noise_sigma;
    model.master_seed = a.seed;
    model.train = cfg;
    if (preset.global_norm) {
        const auto [lo, hi] = fdl::corpus_range(train_c);
        model.norm = fdl::NormalizationMode::global(lo, hi);
        model.scaler = {lo, hi};
    } else if (!preset.is_classification()) {
        model.scaler = fdl::LabelScaler::fit(train_y);
    }
    log.line("training " + a.task + " on " + std::to_string(train_c.size()) + " curves");
    fdl::nn::LabeledSet<float> tr{fdl::encode_tensor(train_c, model.norm), fdl::make_targets(train_y, model), 1};
    fdl::nn::LabeledSet<float> va{fdl::encode_tensor(val_c, model.norm), fdl::make_targets(val_y, model), 1};
    model.history = fdl::nn::train(model.network, tr, val_c.empty() ? nullptr : &va, cfg, epoch_log);
    fdl::save_model(a.out, model);
    log.line("saved model to " + a.out);
    return 0;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
    std::string model, data, report;
    std::uint64_t seed = 7;
};

int cmd_eval(const EvalArgs& a, RunLog& log) {
    const fs::path report = a.report.empty() ? fs::path(a.model) / "eval.json" : fs::path(a.report);
    log.open(report.parent_path().empty() ? fs::path(".") : report.parent_path());
    const json mj = fdl::read_json_file(fs::path(a.model) / "model.json");
    if (mj.value("kind", std::string("cnn")) == "siamese") {
        auto net = fdl::load_siamese(a.model);
        const auto pairs = fdl::generate_pairs(100, fdl::split_seed(a.seed, fdl::Split::Test));
        const auto te = fdl::encode_pairs(pairs);
        const auto prob = net.predict(te.a, te.b);
        fdl::EvalReport rep;
        rep.task = fdl::to_string(fdl::TaskId::DissolutionSim);
        rep.seed = a.seed;
        rep.n_test = pairs.size();
        std::vector<int> truth, pred;
        std::vector<double> f1, f2;
        std::size_t agree = 0;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            truth.push_back(pairs[i].kind == fdl::PairKind::Similar);
            pred.push_back(prob[i] >= 0.5);
            const auto sc = fdl::f1_f2(pairs[i].reference, pairs[i].test);
            f1.push_back(sc.f1);
            f2.push_back(sc.f2);
            agree += static_cast<int>(sc.similar()) == truth.back();
        }
        rep.confusion = fdl::confusion(truth, pred, std::vector<std::string>{"dissimilar", "similar"});
        rep.series = {{"f1", f1}, {"f2", f2}, {"probability", prob}};
        rep.scalars["oracle_agreement"] = static_cast<double>(agree) / static_cast<double>(pairs.size());
        write_report_bundle(report, rep);
        log.line(summary(rep));
        return 0;
    }

    auto model = fdl::load_model(a.model);
    if (a.data.empty()) throw fdl::ArgumentError("eval: --data is required for CNN models");
    const auto d = fdl::read_dataset(a.data);
    if (d.family != model.family)
        throw fdl::DataError(std::string("dataset family '") + fdl::to_string(d.family) + "' does not match model family '" +
                             fdl::to_string(model.family) + "'");
    if (d.has_images() && !(d.norm == model.norm))
        throw fdl::DataError("normalization mismatch: dataset images were encoded with " + fdl::to_json(d.norm).dump() +
                             " but the model expects " + fdl::to_json(model.norm).dump() +
                             "; regenerate the dataset with matching --normalization or without images");
    auto [curves, truth] = labeled_curves(d, model.label);
    const auto pred = model.predict_curves(curves);
    fdl::EvalReport rep;
    rep.task = fdl::to_string(model.task);
    rep.sigma = d.sigma;
    rep.train_sigma = model.train_sigma;
    rep.seed = d.master_seed;
    rep.n_test = curves.size();
    rep.history = model.history;
    fdl::score_into(rep, model, truth, pred);
    write_report_bundle(report, rep);
    log.line(summary(rep));
    return 0;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
    std::string task = "lyapunov", model, report;
    std::size_t count = 10000;
    double noise = 0.0;
    std::uint64_t seed = 7;
};

int cmd_bench(const BenchArgs& a, RunLog& log) {
    if (fdl::task_from_string(a.task) != fdl::TaskId::Lyapunov) throw fdl::ArgumentError("bench supports --task lyapunov");
    if (a.count == 0) throw fdl::ArgumentError("--count must be >= 1");
    const fs::path report = a.report.empty() ? fs::path("bench_lyapunov.json") : fs::path(a.report);
    log.open(report.parent_path().empty() ? fs::path(".") : report.parent_path());
    // Timing does not depend on the weights, so an untrained network is a
    // valid stand-in when no model is given.
    fdl::ModelArtifact model = a.model.empty()
                                   ? fdl::ModelArtifact(fdl::nn::Network<float>(
                                         fdl::build_regression_cnn(), {fdl::image_side, fdl::image_side, 1}, {}, a.seed))
                                   : fdl::load_model(a.model);
    log.line("generating " + std::to_string(a.count) + " Lorenz curves");
    const auto curves = fdl::generate_split(fdl::Family::Lorenz, a.count, a.noise, fdl::split_seed(a.seed, fdl::Split::Test));
    const auto cfg = fdl::lorenz_label_config(fdl::LorenzSpec{});
    const auto [ros, cnn] = fdl::bench_lyapunov(curves, model, cfg);
    fdl::EvalReport rep;
    rep.task = "lyapunov_bench";
    rep.sigma = a.noise;
    rep.seed = a.seed;
    rep.n_test = a.count;
    rep.bench = {ros, cnn};
    fdl::write_report(report, rep);
    log.line("rosenstein " + fmt(ros.seconds, 3) + " s, cnn " + fmt(cnn.seconds, 3) + " s, speedup " + fmt(cnn.speedup, 1) + "x");
    return 0;
}

// ---------------------------------------------------------------------------

struct ReplicateArgs {
    std::string matrix, out = "replicate";
    bool dry_run = false;
};

struct Job {
    std::string task;
    double sigma = 0.0;
    std::optional<double> test_sigma;
    std::optional<std::size_t> epochs;
    std::size_t count = 10000;  // bench only
    bool full_scale = false;
    std::string name() const {
        std::string s = task + "_s" + fmt(sigma, 1);
        if (test_sigma) s += "_test" + fmt(*test_sigma, 1);
        return s;
    }
};

std::vector<Job> parse_matrix(const json& m) {
    std::vector<Job> jobs;
    if (!m.contains("jobs") || !m["jobs"].is_array()) throw fdl::DataError("matrix needs a 'jobs' array");
    for (const auto& j : m["jobs"]) {
        const std::string task = j.at("task").get<std::string>();
        std::vector<double> sigmas;
        if (j.contains("sigmas"))
            sigmas = j["sigmas"].get<std::vector<double>>();
        else
            sigmas.push_back(j.value("sigma", 0.0));
        for (double s : sigmas) {
            Job job;
            job.task = task;
            job.sigma = s;
            if (j.contains("test_sigma")) job.test_sigma = j["test_sigma"].get<double>();
            if (j.contains("epochs")) job.epochs = j["epochs"].get<std::size_t>();
            job.count = j.value("count", std::size_t{10000});
            job.full_scale = j.value("full_scale", false);
            if (task != "lyapunov_bench") fdl::task_from_string(task);
            jobs.push_back(job);
        }
    }
    return jobs;
}

int cmd_replicate(const ReplicateArgs& a, RunLog& log) {
    json m;
    try {
        m = fdl::read_json_file(a.matrix);
        auto jobs = parse_matrix(m);
        const std::uint64_t seed = m.value("seed", std::uint64_t{7});
        if (a.dry_run) {
            for (const auto& j : jobs) std::cout << j.name() << '\n';
            return 0;
        }
        log.open(a.out);
        write_resolved(a.out, {{"command", "replicate"}, {"matrix", m}, {"threads", thread_cap()}});
        json consolidated{{"seed", seed}, {"jobs", json::array()}};
        for (const auto& job : jobs) {
            log.line("job " + job.name());
            fdl::EvalReport rep;
            if (job.task == "lyapunov_bench") {
                fdl::ModelArtifact model(fdl::nn::Network<float>(fdl::build_regression_cnn(),
                                                                 {fdl::image_side, fdl::image_side, 1}, {}, seed));
                const auto curves = fdl::generate_split(fdl::Family::Lorenz, job.count, job.sigma,
                                                        fdl::split_seed(seed, fdl::Split::Test));
                const auto [ros, cnn] = fdl::bench_lyapunov(curves, model, fdl::lorenz_label_config(fdl::LorenzSpec{}));
                rep.task = job.task;
                rep.seed = seed;
                rep.n_test = job.count;
                rep.bench = {ros, cnn};
            } else if (job.task == fdl::to_string(fdl::TaskId::DissolutionSim)) {
                auto cfg = fdl::dissolution_train_config();
                cfg.seed = seed;
                if (job.epochs) cfg.epochs = *job.epochs;
                fdl::DissolutionOptions opt;
                opt.master_seed = seed;
                rep = fdl::run_dissolution_task(cfg, opt).report;
            } else if (job.task == fdl::to_string(fdl::TaskId::Drawing)) {
                auto cfg = fdl::task_preset(fdl::TaskId::Drawing).train;
                cfg.seed = seed;
                if (job.epochs) cfg.epochs = *job.epochs;
                fdl::DrawingOptions opt;
                opt.seed = seed;
                rep = fdl::run_drawing_task(fdl::synthetic_spiral_corpus(10, 40, seed), cfg, opt).report;
            } else {
                const auto preset = fdl::task_preset(fdl::task_from_string(job.task), job.full_scale);
                auto cfg = preset.train;
                cfg.seed = seed;
                if (job.epochs) cfg.epochs = *job.epochs;
                fdl::RunOptions opt;
                opt.master_seed = seed;
                opt.test_sigma = job.test_sigma;
                rep = fdl::run_task(preset, cfg, {job.sigma}, opt).report;
            }
            write_report_bundle(fs::path(a.out) / (job.name() + ".json"), rep);
            json entry = fdl::to_json(rep);
            entry["job"] = job.name();
            consolidated["jobs"].push_back(entry);
            log.line(job.task == "lyapunov_bench" ? job.name() + " speedup " + fmt(rep.bench[1].speedup, 1) + "x"
                                                  : summary(rep));
        }
        fdl::write_json_file(fs::path(a.out) / "replicate.json", consolidated);
    } catch (const json::exception& e) {
        throw fdl::DataError(std::string("matrix: ") + e.what());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Functional data learning: curve images, CNN training and evaluation"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON file with default flag values")->check(CLI::ExistingFile);

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Generate a seeded curve dataset container");
    g->add_option("--family", gen.family, "exp, sine, cosine, gaussmix, monotone, curvature, growth, lorenz, sir");
    g->add_option("--count", gen.count, "Number of curves");
    g->add_option("--noise", gen.noise, "Gaussian noise sigma");
    g->add_option("--seed", gen.seed, "Master seed");
    g->add_option("--split", gen.split, "train, val or test (selects the seed stream)");
    g->add_option("--points", gen.points, "Samples per curve (0 = family default)");
    g->add_option("--normalization", gen.normalization, "Image normalization: local or global:MIN:MAX");
    g->add_flag("--no-images", gen.no_images, "Store curves and labels only");
    g->add_option("--out", gen.out, "Output directory");

    TrainArgs tr;
    auto* t = app.add_subcommand("train", "Train a task model");
    t->add_option("--task", tr.task, "Task id, e.g. exp_rate, lyapunov, dissolution_sim, drawing");
    t->add_option("--data", tr.data, "Training dataset directory (omit to generate from the preset)");
    t->add_option("--val", tr.val, "Validation dataset directory");
    t->add_option("--drawings", tr.drawings, "Drawing CSV for the drawing task (default: synthetic spirals)");
    t->add_option("--channels", tr.channels, "Drawing channels, e.g. X,Y");
    t->add_option("--epochs", tr.epochs, "Epochs (0 saves the initialized model)");
    t->add_option("--batch-size", tr.batch_size, "Mini-batch size");
    t->add_option("--lr", tr.lr, "Adam learning rate");
    t->add_option("--noise", tr.noise, "Noise sigma when generating in memory");
    t->add_option("--seed", tr.seed, "Master seed");
    t->add_flag("--full-scale", tr.full_scale, "10000 training curves for the peak tasks");
    t->add_option("--out", tr.out, "Model output directory");

    EvalArgs ev;
    auto* e = app.add_subcommand("eval", "Evaluate a model on a dataset");
    e->add_option("--model", ev.model, "Model directory");
    e->add_option("--data", ev.data, "Test dataset directory");
    e->add_option("--report", ev.report, "Report JSON path");
    e->add_option("--seed", ev.seed, "Seed for generated test pairs (Siamese models)");

    BenchArgs be;
    auto* b = app.add_subcommand("bench", "Time Rosenstein against the CNN path");
    b->add_option("--task", be.task, "lyapunov");
    b->add_option("--count", be.count, "Number of curves");
    b->add_option("--model", be.model, "Trained Lyapunov model (optional)");
    b->add_option("--noise", be.noise, "Noise sigma of the benchmark curves");
    b->add_option("--seed", be.seed, "Master seed");
    b->add_option("--report", be.report, "Report JSON path");

    ReplicateArgs re;
    auto* r = app.add_subcommand("replicate", "Run a matrix of tasks");
    r->add_option("--matrix", re.matrix, "Matrix JSON file")->required()->check(CLI::ExistingFile);
    r->add_option("--out", re.out, "Output directory");
    r->add_flag("--dry-run", re.dry_run, "List planned jobs only");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 2;
    }

    RunLog log;
    try {
        const json config = load_config(config_path);
        thread_cap();
        if (*g) {
            Settings s{config, g};
            s.resolve("family", "family", gen.family);
            s.resolve("count", "count", gen.count);
            s.resolve("noise", "noise", gen.noise);
            s.resolve("seed", "seed", gen.seed);
            s.resolve("split", "split", gen.split);
            s.resolve("points", "points", gen.points);
            s.resolve("normalization", "normalization", gen.normalization);
            s.resolve("out", "out", gen.out);
            if (gen.family.empty() || gen.out.empty()) throw fdl::ArgumentError("generate needs --family and --out");
            return cmd_generate(gen, log);
        }
        if (*t) {
            Settings s{config, t};
            s.resolve("task", "task", tr.task);
            s.resolve("data", "data", tr.data);
            s.resolve("val", "val", tr.val);
            s.resolve("epochs", "epochs", tr.epochs);
            s.resolve("batch-size", "batch_size", tr.batch_size);
            s.resolve("lr", "lr", tr.lr);
            s.resolve("noise", "noise", tr.noise);
            s.resolve("seed", "seed", tr.seed);
            s.resolve("out", "out", tr.out);
            s.resolve("channels", "channels", tr.channels);
            if (tr.task.empty() || tr.out.empty()) throw fdl::ArgumentError("train needs --task and --out");
            return cmd_train(tr, log);
        }
        if (*e) {
            Settings s{config, e};
            s.resolve("model", "model", ev.model);
            s.resolve("data", "data", ev.data);
            s.resolve("report", "report", ev.report);
            s.resolve("seed", "seed", ev.seed);
            if (ev.model.empty()) throw fdl::ArgumentError("eval needs --model");
            return cmd_eval(ev, log);
        }
        if (*b) {
            Settings s{config, b};
            s.resolve("count", "count", be.count);
            s.resolve("seed", "seed", be.seed);
            s.resolve("noise", "noise", be.noise);
            s.resolve("model", "model", be.model);
            s.resolve("report", "report", be.report);
            return cmd_bench(be, log);
        }
        if (*r) return cmd_replicate(re, log);
    } catch (const fdl::ArgumentError& err) {
        std::cerr << "usage error: " << err.what() << '\n';
        return 2;
    } catch (const fdl::DataError& err) {
        std::cerr << "data error: " << err.what() << '\n';
        return 3;
    } catch (const fdl::NumericError& err) {
        std::cerr << "numeric failure: " << err.what() << '\n';
        return 4;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    }
    return 0;
}
