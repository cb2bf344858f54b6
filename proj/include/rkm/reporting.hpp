#ifndef RKM_REPORTING_HPP
#define RKM_REPORTING_HPP

// Experiment runner. Loads a JSON config, splits the data, tunes every
// requested model with k-fold CV, refits on the full training split and
// writes report.json, metrics.csv, tuning_scores.csv, one model file per
// kind, and a PPM classification map when the dataset carries pixel
// coordinates. Output files are written atomically (tmp + rename) and any
// partial outputs are removed if a later write fails. Timings live in
// their own report subtree so reruns are byte-identical elsewhere.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rkm/dataset.hpp"
#include "rkm/errors.hpp"
#include "rkm/evaluation.hpp"
#include "rkm/model_io.hpp"
#include "rkm/model_selection.hpp"
#include "rkm/models.hpp"
#include "rkm/version.hpp"

namespace rkm {

struct SplitSpec {
    enum class Kind { random, per_class } kind = Kind::random;
    double train_fraction = 0.7;
    std::optional<std::size_t> count;              // same count for every class
    std::map<std::string, std::size_t> counts;     // per-label counts
};

struct Palette {
    std::array<int, 3> background{0, 0, 0};
    std::map<std::string, std::array<int, 3>> classes;
};

struct ExperimentConfig {
    Task task = Task::classification;
    std::string dataset_path;
    CsvSchema schema;
    std::vector<ModelKind> models;
    SplitSpec split;
    std::size_t folds = 5;
    std::uint64_t seed = 42;
    unsigned jobs = 1;
    std::string output_dir;
    SearchSpace space = SearchSpace::defaults();
    std::optional<std::pair<std::size_t, std::size_t>> scene; // height, width
    std::optional<Palette> palette;
    nlohmann::json raw;      // config document as loaded, echoed into the report
    std::string base_dir;    // directory of the config file, for relative paths
};

namespace detail {

inline std::array<int, 3> rgb_from_json(const nlohmann::json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 3)
        throw DataError("config: " + what + " must be an array of three integers");
    std::array<int, 3> c{};
    for (std::size_t i = 0; i < 3; ++i) {
        if (!j[i].is_number_integer())
            throw DataError("config: " + what + " must be an array of three integers");
        const long long v = j[i].get<long long>();
        if (v < 0 || v > 255)
            throw DataError("config: " + what + " channel out of range 0..255");
        c[i] = static_cast<int>(v);
    }
    return c;
}

inline std::vector<double> grid_from_json(const nlohmann::json& j, const std::string& what) {
    if (!j.is_array() || j.empty())
        throw DataError("config: " + what + " must be a non-empty array of numbers");
    std::vector<double> out;
    for (const nlohmann::json& v : j) {
        if (!v.is_number())
            throw DataError("config: " + what + " must be a non-empty array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

} // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j, const std::string& base_dir) {
    if (!j.is_object()) throw DataError("config: document must be a JSON object");
    if (j.value("schema_version", 0) != 1)
        throw DataError("config: unsupported or missing schema_version (expected 1)");

    ExperimentConfig cfg;
    cfg.raw = j;
    cfg.base_dir = base_dir;

    const std::string task = j.value("task", std::string("classification"));
    if (task == "classification") cfg.task = Task::classification;
    else if (task == "regression") cfg.task = Task::regression;
    else throw DataError("config: unknown task '" + task + "'");
    cfg.schema.task = cfg.task;

    if (!j.contains("dataset") || !j.at("dataset").is_object())
        throw DataError("config: missing dataset object");
    const nlohmann::json& ds = j.at("dataset");
    if (!ds.contains("path") || !ds.at("path").is_string())
        throw DataError("config: dataset.path is required");
    cfg.dataset_path = ds.at("path").get<std::string>();
    cfg.schema.has_header = ds.value("has_header", true);
    cfg.schema.label_column = ds.value("label_column", -1);
    if (ds.contains("coord_columns")) {
        const nlohmann::json& cc = ds.at("coord_columns");
        if (!cc.is_array() || cc.size() != 2)
            throw DataError("config: dataset.coord_columns must list exactly two columns");
        cfg.schema.coord_columns = {cc[0].get<int>(), cc[1].get<int>()};
    }

    if (!j.contains("models") || !j.at("models").is_array() || j.at("models").empty())
        throw DataError("config: models must be a non-empty array of model names");
    for (const nlohmann::json& m : j.at("models"))
        cfg.models.push_back(model_kind_from_name(m.get<std::string>()));

    if (!j.contains("split") || !j.at("split").is_object())
        throw DataError("config: missing split object");
    const nlohmann::json& sp = j.at("split");
    const std::string sk = sp.value("kind", std::string());
    if (sk == "random") {
        cfg.split.kind = SplitSpec::Kind::random;
        if (!sp.contains("train_fraction"))
            throw DataError("config: split.train_fraction is required for a random split");
        cfg.split.train_fraction = sp.at("train_fraction").get<double>();
    } else if (sk == "per_class") {
        cfg.split.kind = SplitSpec::Kind::per_class;
        const bool has_count = sp.contains("count");
        const bool has_counts = sp.contains("counts");
        if (has_count == has_counts)
            throw DataError("config: a per-class split needs exactly one of count or counts");
        if (has_count) {
            cfg.split.count = sp.at("count").get<std::size_t>();
        } else {
            for (const auto& [label, v] : sp.at("counts").items())
                cfg.split.counts[label] = v.get<std::size_t>();
            if (cfg.split.counts.empty())
                throw DataError("config: split.counts must not be empty");
        }
        if (cfg.task != Task::classification)
            throw DataError("config: per-class splits need a classification task");
    } else {
        throw DataError("config: split.kind must be 'random' or 'per_class'");
    }

    cfg.folds = j.value("folds", std::size_t(5));
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.jobs = j.value("jobs", 1u);
    cfg.output_dir = j.value("output_dir", std::string());

    if (j.contains("grids")) {
        const nlohmann::json& g = j.at("grids");
        if (g.contains("r2km")) {
            const nlohmann::json& r = g.at("r2km");
            if (r.contains("eta")) cfg.space.r2km_eta = detail::grid_from_json(r.at("eta"), "grids.r2km.eta");
            if (r.contains("lambda")) cfg.space.r2km_lambda = detail::grid_from_json(r.at("lambda"), "grids.r2km.lambda");
            if (r.contains("sigma")) cfg.space.r2km_sigma = detail::grid_from_json(r.at("sigma"), "grids.r2km.sigma");
        }
        if (g.contains("rkm")) {
            const nlohmann::json& r = g.at("rkm");
            if (r.contains("gamma")) cfg.space.rkm_gamma = detail::grid_from_json(r.at("gamma"), "grids.rkm.gamma");
            if (r.contains("eta")) cfg.space.rkm_eta = detail::grid_from_json(r.at("eta"), "grids.rkm.eta");
            if (r.contains("sigma")) cfg.space.rkm_sigma = detail::grid_from_json(r.at("sigma"), "grids.rkm.sigma");
        }
        if (g.contains("rvfl")) {
            const nlohmann::json& r = g.at("rvfl");
            if (r.contains("c")) cfg.space.rvfl_c = detail::grid_from_json(r.at("c"), "grids.rvfl.c");
            if (r.contains("nodes")) {
                cfg.space.rvfl_nodes.clear();
                for (double v : detail::grid_from_json(r.at("nodes"), "grids.rvfl.nodes"))
                    cfg.space.rvfl_nodes.push_back(static_cast<std::size_t>(v));
            }
            if (r.contains("activations")) {
                cfg.space.rvfl_activations.clear();
                for (const nlohmann::json& a : r.at("activations"))
                    cfg.space.rvfl_activations.push_back(activation_from_name(a.get<std::string>()));
                if (cfg.space.rvfl_activations.empty())
                    throw DataError("config: grids.rvfl.activations must not be empty");
            }
        }
    }

    if (j.contains("scene")) {
        const nlohmann::json& sc = j.at("scene");
        cfg.scene = {sc.at("height").get<std::size_t>(), sc.at("width").get<std::size_t>()};
    }
    if (j.contains("palette")) {
        Palette p;
        const nlohmann::json& pj = j.at("palette");
        if (pj.contains("background"))
            p.background = detail::rgb_from_json(pj.at("background"), "palette.background");
        if (pj.contains("classes"))
            for (const auto& [label, rgb] : pj.at("classes").items())
                p.classes[label] = detail::rgb_from_json(rgb, "palette.classes." + label);
        cfg.palette = std::move(p);
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("config: '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(j, std::filesystem::path(path).parent_path().string());
}

inline std::string resolve_against(const std::string& base_dir, const std::string& p) {
    std::filesystem::path fp(p);
    if (fp.is_absolute() || base_dir.empty()) return p;
    return (std::filesystem::path(base_dir) / fp).string();
}

// Renders one P6 image from per-sample labels and pixel coordinates.
// Every pixel starts as background; labelled samples overwrite their pixel.
inline std::string render_map(const std::vector<std::string>& labels,
                              const std::vector<std::array<int, 2>>& coords,
                              std::size_t height, std::size_t width,
                              const Palette& palette) {
    if (labels.size() != coords.size())
        throw InputError("render_map: labels and coordinates differ in length");
    if (height == 0 || width == 0)
        throw InputError("render_map: scene dimensions must be positive");
    std::string raster(height * width * 3, '\0');
    for (std::size_t p = 0; p < height * width; ++p)
        for (std::size_t c = 0; c < 3; ++c)
            raster[p * 3 + c] = static_cast<char>(palette.background[c]);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto [row, col] = coords[i];
        if (row < 0 || col < 0 || static_cast<std::size_t>(row) >= height ||
            static_cast<std::size_t>(col) >= width)
            throw DataError("render_map: coordinate (" + std::to_string(row) + "," +
                            std::to_string(col) + ") falls outside the scene");
        const auto it = palette.classes.find(labels[i]);
        if (it == palette.classes.end())
            throw DataError("render_map: no palette colour for class '" + labels[i] + "'");
        const std::size_t p = (static_cast<std::size_t>(row) * width +
                               static_cast<std::size_t>(col)) * 3;
        for (std::size_t c = 0; c < 3; ++c)
            raster[p + c] = static_cast<char>(it->second[c]);
    }
    std::string out = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    out += raster;
    return out;
}

struct ModelResult {
    ModelKind kind;
    TuneResult tuning;
    TrainedModel model;
    std::vector<std::string> test_pred_labels;   // classification
    std::vector<std::string> test_true_labels;
    std::vector<double> test_pred_values;        // regression
    std::vector<double> test_true_values;
    std::optional<ClassificationMetrics> cls;
    std::optional<RegressionErrors> reg;
    std::vector<std::string> scene_labels;       // labelled pixels, dataset order
    double tune_seconds = 0;
    double refit_seconds = 0;
};

struct ExperimentResult {
    Dataset data;
    SplitIndices split;
    std::vector<ModelResult> models;
    double total_seconds = 0;
};

namespace detail {

template <typename Fn>
auto stage(const std::string& name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const InputError& e) {
        throw InputError(name + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError(name + ": " + e.what());
    } catch (const NumericError& e) {
        throw NumericError(name + ": " + e.what());
    }
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace detail

inline SplitIndices make_split(const ExperimentConfig& cfg, const Dataset& d) {
    if (cfg.split.kind == SplitSpec::Kind::random)
        return split_random_indices(d.n(), cfg.split.train_fraction, cfg.seed);
    std::vector<std::size_t> counts(d.codec.num_classes(), 0);
    if (cfg.split.count) {
        for (std::size_t& c : counts) c = *cfg.split.count;
    } else {
        for (const auto& [label, cnt] : cfg.split.counts)
            counts[d.codec.index_of(label)] = cnt;
    }
    return split_per_class_indices(d, counts, cfg.seed);
}

inline ExperimentResult run_models(const ExperimentConfig& cfg) {
    const auto t_total = std::chrono::steady_clock::now();
    ExperimentResult res;
    res.data = detail::stage("load", [&] {
        return load_csv(resolve_against(cfg.base_dir, cfg.dataset_path), cfg.schema);
    });
    res.split = detail::stage("split", [&] { return make_split(cfg, res.data); });

    const Dataset train = subset(res.data, res.split.train);
    const Dataset test = subset(res.data, res.split.test);

    for (ModelKind kind : cfg.models) {
        ModelResult mr;
        mr.kind = kind;
        const std::string tag = model_kind_name(kind);

        const auto t_tune = std::chrono::steady_clock::now();
        mr.tuning = detail::stage("tune " + tag, [&] {
            return tune(kind, train, cfg.space, cfg.folds, cfg.seed, cfg.jobs);
        });
        mr.tune_seconds = detail::seconds_since(t_tune);

        const auto t_refit = std::chrono::steady_clock::now();
        detail::stage("refit " + tag, [&]() -> int {
            const std::uint64_t layer_seed =
                derive_seed(cfg.seed, mr.tuning.best.grid_index, cfg.folds);
            StandardizeResult sr = standardize(train, {test});
            mr.model = fit_model(kind, sr.train, mr.tuning.best, layer_seed);
            mr.model.scaler = sr.scaler;
            const Dataset& test_s = sr.others[0];
            if (cfg.task == Task::classification) {
                const std::vector<int> pred = predict_labels(mr.model, test_s.x);
                for (std::size_t i = 0; i < test.n(); ++i) {
                    mr.test_pred_labels.push_back(
                        res.data.codec.class_ids[static_cast<std::size_t>(pred[i])]);
                    mr.test_true_labels.push_back(test.label_of(i));
                }
                mr.cls = classification_metrics(
                    confusion(test.y_class, pred, res.data.codec.num_classes()));
                if (res.data.has_coords) {
                    const DenseMatrix all_s = scale_for_model(mr.model, res.data.x);
                    for (int c : predict_labels(mr.model, all_s))
                        mr.scene_labels.push_back(
                            res.data.codec.class_ids[static_cast<std::size_t>(c)]);
                }
            } else {
                mr.test_pred_values = predict_values(mr.model, test_s.x);
                mr.test_true_values = test.y_real;
                mr.reg = regression_metrics(mr.test_true_values, mr.test_pred_values);
            }
            return 0;
        });
        mr.refit_seconds = detail::seconds_since(t_refit);
        res.models.push_back(std::move(mr));
    }
    res.total_seconds = detail::seconds_since(t_total);
    return res;
}

// Scene geometry: configured dimensions win; otherwise the smallest box
// containing every labelled and background coordinate.
inline std::pair<std::size_t, std::size_t> scene_dimensions(const ExperimentConfig& cfg,
                                                            const Dataset& d) {
    if (cfg.scene) return *cfg.scene;
    long long max_row = -1;
    long long max_col = -1;
    for (const auto& rc : d.coords) {
        max_row = std::max(max_row, static_cast<long long>(rc[0]));
        max_col = std::max(max_col, static_cast<long long>(rc[1]));
    }
    for (const auto& rc : d.background_coords) {
        max_row = std::max(max_row, static_cast<long long>(rc[0]));
        max_col = std::max(max_col, static_cast<long long>(rc[1]));
    }
    if (max_row < 0 || max_col < 0)
        throw DataError("map: no coordinates available to size the scene");
    return {static_cast<std::size_t>(max_row) + 1, static_cast<std::size_t>(max_col) + 1};
}

inline nlohmann::json build_report(const ExperimentConfig& cfg, const ExperimentResult& res) {
    nlohmann::json report;
    report["schema_version"] = 1;
    report["library"] = std::string(library_name) + " " + library_version;
    report["rng"] = rng_identity;
    report["seed"] = cfg.seed;
    report["task"] = task_name(cfg.task);
    report["config"] = cfg.raw;
    report["preprocessing"] =
        "z-score standardization fit on training rows only; constant features pass through unchanged";
    report["notes"] = {
        {"residual_sign",
         "pos_error averages positive residuals (prediction - target), neg_error averages the "
         "magnitudes of negative ones; a side with no residuals reports 0"},
        {"cv_layers",
         "random feature layers are redrawn per CV fold from a sub-seed of (seed, combination, "
         "fold); the refit layer uses fold index equal to the fold count"}};
    report["dataset"] = {{"path", resolve_against(cfg.base_dir, cfg.dataset_path)},
                         {"rows", res.data.n()},
                         {"features", res.data.m()}};
    if (cfg.task == Task::classification && res.data.has_coords) {
        const auto [height, width] = scene_dimensions(cfg, res.data);
        report["scene"] = {{"height", height}, {"width", width}};
    }
    report["split"] = {
        {"kind", cfg.split.kind == SplitSpec::Kind::random ? "random" : "per_class"},
        {"train_size", res.split.train.size()},
        {"test_size", res.split.test.size()}};

    nlohmann::json models = nlohmann::json::object();
    nlohmann::json timings = nlohmann::json::object();
    for (const ModelResult& mr : res.models) {
        const std::string tag = model_kind_name(mr.kind);
        nlohmann::json m;
        m["best_params"] = detail::params_to_json(mr.tuning.best);
        m["cv_score"] = mr.tuning.best_score;
        if (mr.cls) {
            nlohmann::json per_class = nlohmann::json::object();
            for (std::size_t c = 0; c < mr.cls->per_class.size(); ++c) {
                const std::string& label = res.data.codec.class_ids[c];
                if (mr.cls->per_class[c]) per_class[label] = *mr.cls->per_class[c];
                else per_class[label] = nullptr;
            }
            m["metrics"] = {{"per_class", per_class},
                            {"oa", mr.cls->oa},
                            {"aa", mr.cls->aa},
                            {"kappa", mr.cls->kappa ? nlohmann::json(*mr.cls->kappa)
                                                    : nlohmann::json(nullptr)}};
            m["test"] = {{"true", mr.test_true_labels}, {"pred", mr.test_pred_labels}};
        }
        if (mr.reg) {
            m["metrics"] = {{"rmse", mr.reg->rmse},
                            {"mae", mr.reg->mae},
                            {"pos_error", mr.reg->pos_error},
                            {"neg_error", mr.reg->neg_error}};
            m["test"] = {{"true", mr.test_true_values}, {"pred", mr.test_pred_values}};
        }
        if (!mr.scene_labels.empty()) m["scene_pred"] = mr.scene_labels;
        models[tag] = std::move(m);
        timings[tag] = {{"tune_seconds", mr.tune_seconds},
                        {"refit_seconds", mr.refit_seconds}};
    }
    timings["total_seconds"] = res.total_seconds;
    report["models"] = std::move(models);
    report["timings"] = std::move(timings);
    return report;
}

inline std::string build_metrics_csv(const ExperimentConfig& cfg, const ExperimentResult& res) {
    std::ostringstream out;
    out << "metric";
    for (const ModelResult& mr : res.models) out << "," << model_kind_name(mr.kind);
    out << "\n";
    const auto cell = [](std::optional<double> v) {
        return v ? format_double(*v) : std::string();
    };
    if (cfg.task == Task::classification) {
        for (std::size_t c = 0; c < res.data.codec.num_classes(); ++c) {
            out << "class:" << res.data.codec.class_ids[c];
            for (const ModelResult& mr : res.models)
                out << "," << cell(mr.cls->per_class[c]);
            out << "\n";
        }
        out << "oa";
        for (const ModelResult& mr : res.models) out << "," << format_double(mr.cls->oa);
        out << "\naa";
        for (const ModelResult& mr : res.models) out << "," << format_double(mr.cls->aa);
        out << "\nkappa";
        for (const ModelResult& mr : res.models) out << "," << cell(mr.cls->kappa);
        out << "\n";
    } else {
        out << "rmse";
        for (const ModelResult& mr : res.models) out << "," << format_double(mr.reg->rmse);
        out << "\nmae";
        for (const ModelResult& mr : res.models) out << "," << format_double(mr.reg->mae);
        out << "\npos_error";
        for (const ModelResult& mr : res.models) out << "," << format_double(mr.reg->pos_error);
        out << "\nneg_error";
        for (const ModelResult& mr : res.models) out << "," << format_double(mr.reg->neg_error);
        out << "\n";
    }
    return out.str();
}

inline std::string build_tuning_csv(const ExperimentConfig& cfg, const ExperimentResult& res) {
    std::ostringstream out;
    bool first = true;
    for (const ModelResult& mr : res.models) {
        write_score_table_csv(out, mr.kind, mr.tuning, cfg.folds, first);
        first = false;
    }
    return out.str();
}

namespace detail {

class StagedWriter {
  public:
    explicit StagedWriter(std::string dir) : dir_(std::move(dir)) {}

    void add(const std::string& name, std::string content) {
        files_.emplace_back(name, std::move(content));
    }

    // Writes every staged file through a tmp name, then renames. If anything
    // fails, all files created by this writer are removed before rethrowing.
    void commit() {
        std::vector<std::filesystem::path> created;
        try {
            if (!dir_.empty()) std::filesystem::create_directories(dir_);
            for (const auto& [name, content] : files_) {
                const std::filesystem::path final_path =
                    std::filesystem::path(dir_.empty() ? "." : dir_) / name;
                const std::filesystem::path tmp_path = final_path.string() + ".tmp";
                {
                    std::ofstream out(tmp_path, std::ios::binary);
                    if (!out) throw DataError("write: cannot create '" + tmp_path.string() + "'");
                    out.write(content.data(),
                              static_cast<std::streamsize>(content.size()));
                    if (!out) throw DataError("write: failed writing '" + tmp_path.string() + "'");
                }
                created.push_back(tmp_path);
                std::filesystem::rename(tmp_path, final_path);
                created.back() = final_path;
            }
        } catch (...) {
            std::error_code ec;
            for (const std::filesystem::path& p : created) std::filesystem::remove(p, ec);
            throw;
        }
    }

  private:
    std::string dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

} // namespace detail

// Runs the full pipeline and writes all artifacts into cfg.output_dir.
// Returns the report document.
inline nlohmann::json run_experiment(const ExperimentConfig& cfg) {
    const ExperimentResult res = run_models(cfg);
    const nlohmann::json report = build_report(cfg, res);

    detail::StagedWriter writer(cfg.output_dir);
    writer.add("report.json", report.dump(2) + "\n");
    writer.add("metrics.csv", build_metrics_csv(cfg, res));
    writer.add("tuning_scores.csv", build_tuning_csv(cfg, res));
    for (const ModelResult& mr : res.models)
        writer.add("model_" + std::string(model_kind_name(mr.kind)) + ".json",
                   model_to_json(mr.model).dump(2) + "\n");

    if (cfg.task == Task::classification && res.data.has_coords) {
        if (!cfg.palette) throw DataError("map: config has no palette for the scene image");
        const auto [height, width] = scene_dimensions(cfg, res.data);
        for (const ModelResult& mr : res.models) {
            const std::string name =
                res.models.size() == 1
                    ? "map.ppm"
                    : "map_" + std::string(model_kind_name(mr.kind)) + ".ppm";
            writer.add(name, detail::stage("map", [&] {
                return render_map(mr.scene_labels, res.data.coords, height, width,
                                  *cfg.palette);
            }));
        }
    }
    detail::stage("write", [&]() -> int {
        writer.commit();
        return 0;
    });
    return report;
}

} // namespace rkm

#endif
