// Command-line front end: experiment runner, tuner, predictor, map
// renderer, rank statistics and the generalization-bound calculator.
//
// Exit codes: 0 success, 1 usage error, 2 data or configuration error,
// 3 numerical failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rkm/rkm.hpp"

namespace {

std::vector<double> read_values_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw rkm::DataError("cannot open '" + path + "'");
    std::vector<double> vals;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        for (const std::string& cell : rkm::detail::split_csv_line(line)) {
            if (cell.empty()) continue;
            double v = 0.0;
            if (!rkm::detail::parse_double(cell, v))
                throw rkm::DataError(path + ": line " + std::to_string(line_no) +
                                     ": cannot parse value '" + cell + "'");
            vals.push_back(v);
        }
    }
    if (vals.empty()) throw rkm::DataError(path + ": no numeric values found");
    return vals;
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw rkm::DataError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw rkm::DataError("'" + path + "' is not valid JSON: " + e.what());
    }
    return j;
}

std::string resolve_out_dir(const std::string& cli_out, const std::string& config_out) {
    if (!cli_out.empty()) return cli_out;
    if (!config_out.empty()) return config_out;
    if (const char* env = std::getenv("RKMBENCH_OUTPUT_DIR"))
        if (*env) return env;
    return ".";
}

std::string fmt(double v) { return rkm::format_double(v); }

struct GlobalOpts {
    std::uint64_t seed = 42;
    unsigned jobs = 1;
    bool json = false;
    std::string out;
    bool seed_given = false;
    bool jobs_given = false;
};

void apply_overrides(rkm::ExperimentConfig& cfg, const GlobalOpts& g) {
    if (g.seed_given || !cfg.raw.contains("seed")) cfg.seed = g.seed;
    if (g.jobs_given) cfg.jobs = g.jobs;
    const std::string config_out =
        cfg.output_dir.empty() ? std::string()
                               : rkm::resolve_against(cfg.base_dir, cfg.output_dir);
    cfg.output_dir = resolve_out_dir(g.out, config_out);
}

int cmd_bench_run(const std::string& config_path, const GlobalOpts& g) {
    rkm::ExperimentConfig cfg = rkm::load_config(config_path);
    apply_overrides(cfg, g);
    const nlohmann::json report = rkm::run_experiment(cfg);
    if (g.json) {
        std::cout << report.dump(2) << "\n";
        return 0;
    }
    std::cout << "seed: " << cfg.seed << "\n";
    for (const auto& [name, m] : report.at("models").items()) {
        std::cout << "model " << name << ": cv_score " << fmt(m.at("cv_score").get<double>());
        const nlohmann::json& metrics = m.at("metrics");
        if (metrics.contains("oa")) {
            std::cout << ", test oa " << fmt(metrics.at("oa").get<double>()) << ", aa "
                      << fmt(metrics.at("aa").get<double>()) << ", kappa "
                      << (metrics.at("kappa").is_null()
                              ? std::string("undefined")
                              : fmt(metrics.at("kappa").get<double>()));
        } else {
            std::cout << ", test rmse " << fmt(metrics.at("rmse").get<double>()) << ", mae "
                      << fmt(metrics.at("mae").get<double>());
        }
        std::cout << "\n";
    }
    std::cout << "outputs: " << cfg.output_dir << "\n";
    return 0;
}

int cmd_tune(const std::string& config_path, const GlobalOpts& g) {
    rkm::ExperimentConfig cfg = rkm::load_config(config_path);
    apply_overrides(cfg, g);
    const rkm::Dataset d =
        rkm::load_csv(rkm::resolve_against(cfg.base_dir, cfg.dataset_path), cfg.schema);
    const rkm::SplitIndices sp = rkm::make_split(cfg, d);
    const rkm::Dataset train = rkm::subset(d, sp.train);

    nlohmann::json doc;
    doc["seed"] = cfg.seed;
    std::ostringstream csv;
    bool first = true;
    for (rkm::ModelKind kind : cfg.models) {
        const rkm::TuneResult tr =
            rkm::tune(kind, train, cfg.space, cfg.folds, cfg.seed, cfg.jobs);
        rkm::write_score_table_csv(csv, kind, tr, cfg.folds, first);
        first = false;
        doc["models"][rkm::model_kind_name(kind)] = {
            {"best_params", rkm::detail::params_to_json(tr.best)},
            {"cv_score", tr.best_score}};
    }
    rkm::detail::StagedWriter writer(cfg.output_dir);
    writer.add("tuning_scores.csv", csv.str());
    writer.commit();

    if (g.json) {
        std::cout << doc.dump(2) << "\n";
        return 0;
    }
    std::cout << "seed: " << cfg.seed << "\n";
    for (const auto& [name, m] : doc.at("models").items()) {
        std::cout << "model " << name << ": cv_score "
                  << fmt(m.at("cv_score").get<double>()) << ", best";
        for (const auto& [k, v] : m.at("best_params").items()) {
            if (k == "grid_index") continue;
            std::cout << " " << k << "=" << (v.is_string() ? v.get<std::string>() : v.dump());
        }
        std::cout << "\n";
    }
    std::cout << "outputs: " << cfg.output_dir << "\n";
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& csv_path, bool no_header,
                bool label_col_given, int label_col, const GlobalOpts& g) {
    const rkm::TrainedModel model = rkm::load_model(model_path);
    rkm::DenseMatrix x;
    std::vector<std::string> true_labels;
    std::vector<double> true_values;
    if (label_col_given) {
        rkm::CsvSchema schema;
        schema.label_column = label_col;
        schema.has_header = !no_header;
        schema.task = model.task;
        const rkm::Dataset d = rkm::load_csv(csv_path, schema);
        x = d.x;
        if (model.task == rkm::Task::classification)
            for (std::size_t i = 0; i < d.n(); ++i) true_labels.push_back(d.label_of(i));
        else
            true_values = d.y_real;
    } else {
        x = rkm::load_matrix_csv(csv_path, !no_header);
    }
    const rkm::DenseMatrix xs = rkm::scale_for_model(model, x);

    nlohmann::json doc;
    doc["seed"] = g.seed;
    doc["model"] = rkm::model_kind_name(model.kind);
    std::vector<std::string> pred_labels;
    std::vector<double> pred_values;
    if (model.task == rkm::Task::classification) {
        for (int c : rkm::predict_labels(model, xs))
            pred_labels.push_back(model.codec.class_ids[static_cast<std::size_t>(c)]);
        doc["predictions"] = pred_labels;
        if (!true_labels.empty()) {
            std::size_t hits = 0;
            for (std::size_t i = 0; i < pred_labels.size(); ++i)
                if (pred_labels[i] == true_labels[i]) ++hits;
            doc["truth"] = true_labels;
            doc["oa"] = static_cast<double>(hits) / static_cast<double>(pred_labels.size());
        }
    } else {
        pred_values = rkm::predict_values(model, xs);
        doc["predictions"] = pred_values;
        if (!true_values.empty()) {
            doc["truth"] = true_values;
            doc["rmse"] = rkm::regression_metrics(true_values, pred_values).rmse;
        }
    }

    if (g.json) {
        std::cout << doc.dump(2) << "\n";
        return 0;
    }
    std::ostringstream body;
    const bool with_truth = !true_labels.empty() || !true_values.empty();
    body << "prediction" << (with_truth ? ",truth" : "") << "\n";
    const std::size_t n = model.task == rkm::Task::classification ? pred_labels.size()
                                                                  : pred_values.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (model.task == rkm::Task::classification) {
            body << pred_labels[i];
            if (with_truth) body << "," << true_labels[i];
        } else {
            body << fmt(pred_values[i]);
            if (with_truth) body << "," << fmt(true_values[i]);
        }
        body << "\n";
    }
    if (!g.out.empty()) {
        std::ofstream out(g.out, std::ios::binary);
        if (!out) throw rkm::DataError("cannot write '" + g.out + "'");
        out << body.str();
        std::cout << "seed: " << g.seed << "\n";
        std::cout << "outputs: " << g.out << "\n";
    } else {
        std::cerr << "seed: " << g.seed << "\n";
        std::cout << body.str();
    }
    return 0;
}

int cmd_map(const std::string& report_path, const std::string& palette_path,
            const std::string& model_filter, const GlobalOpts& g) {
    const nlohmann::json report = read_json_file(report_path);
    const nlohmann::json pal_doc = read_json_file(palette_path);

    rkm::Palette palette;
    if (pal_doc.contains("background"))
        palette.background = rkm::detail::rgb_from_json(pal_doc.at("background"), "background");
    if (!pal_doc.contains("classes") || !pal_doc.at("classes").is_object())
        throw rkm::DataError("palette: missing classes object");
    for (const auto& [label, rgb] : pal_doc.at("classes").items())
        palette.classes[label] = rkm::detail::rgb_from_json(rgb, "classes." + label);

    if (!report.contains("scene"))
        throw rkm::DataError("report: no scene information (dataset had no coordinates)");
    const std::size_t height = report.at("scene").at("height").get<std::size_t>();
    const std::size_t width = report.at("scene").at("width").get<std::size_t>();

    rkm::CsvSchema schema;
    const nlohmann::json& dcfg = report.at("config").at("dataset");
    schema.has_header = dcfg.value("has_header", true);
    schema.label_column = dcfg.value("label_column", -1);
    for (const nlohmann::json& c : dcfg.at("coord_columns")) schema.coord_columns.push_back(c.get<int>());
    schema.task = rkm::Task::classification;
    const rkm::Dataset d =
        rkm::load_csv(report.at("dataset").at("path").get<std::string>(), schema);

    std::vector<std::pair<std::string, std::vector<std::string>>> targets;
    for (const auto& [name, m] : report.at("models").items()) {
        if (!m.contains("scene_pred")) continue;
        if (!model_filter.empty() && name != model_filter) continue;
        targets.emplace_back(name, m.at("scene_pred").get<std::vector<std::string>>());
    }
    if (targets.empty())
        throw rkm::DataError(model_filter.empty()
                                 ? "report: no model carries scene predictions"
                                 : "report: no scene predictions for model '" + model_filter + "'");

    const std::string out_dir = resolve_out_dir(g.out, "");
    rkm::detail::StagedWriter writer(out_dir);
    std::vector<std::string> names;
    for (const auto& [name, preds] : targets) {
        const std::string file =
            targets.size() == 1 ? "map.ppm" : "map_" + name + ".ppm";
        writer.add(file, rkm::render_map(preds, d.coords, height, width, palette));
        names.push_back(file);
    }
    writer.commit();

    if (g.json) {
        nlohmann::json doc;
        doc["seed"] = g.seed;
        doc["outputs"] = names;
        doc["directory"] = out_dir;
        std::cout << doc.dump(2) << "\n";
        return 0;
    }
    std::cout << "seed: " << g.seed << "\n";
    for (const std::string& n : names) std::cout << "wrote " << out_dir << "/" << n << "\n";
    return 0;
}

int cmd_stats_friedman(const std::string& scores_path, bool ranks_mode, std::size_t n_datasets,
                       bool lower_better, const GlobalOpts& g) {
    std::vector<double> ranks;
    std::vector<std::string> names;
    std::size_t n = 0;
    if (ranks_mode) {
        const rkm::ScoreTable t = rkm::read_score_table_csv(scores_path, true);
        if (t.num_datasets() != 1)
            throw rkm::DataError("expected a single row of average ranks in '" + scores_path + "'");
        names = t.model_names;
        for (std::size_t q = 0; q < t.num_models(); ++q) ranks.push_back(t.scores(0, q));
        n = n_datasets;
    } else {
        const rkm::ScoreTable t = rkm::read_score_table_csv(scores_path, !lower_better);
        names = t.model_names;
        ranks = rkm::average_ranks(t);
        n = t.num_datasets();
    }
    const rkm::FriedmanResult fr = rkm::friedman(ranks, n);

    if (g.json) {
        nlohmann::json doc;
        doc["seed"] = g.seed;
        doc["models"] = names;
        doc["average_ranks"] = ranks;
        doc["n_datasets"] = n;
        doc["chi2_f"] = fr.chi2_f;
        doc["f_f"] = fr.f_f;
        doc["df_chi2"] = fr.df_chi2;
        doc["df_f"] = {fr.df_f.first, fr.df_f.second};
        std::cout << doc.dump(2) << "\n";
        return 0;
    }
    std::cout << "seed: " << g.seed << "\n";
    std::cout << "models:";
    for (const std::string& s : names) std::cout << " " << s;
    std::cout << "\naverage ranks:";
    for (double r : ranks) std::cout << " " << fmt(r);
    std::cout << "\nn_datasets: " << n << "\n";
    std::cout << "chi2_f: " << fmt(fr.chi2_f) << " (df " << fr.df_chi2 << ")\n";
    std::cout << "f_f: " << fmt(fr.f_f) << " (df " << fr.df_f.first << ", " << fr.df_f.second
              << ")\n";
    return 0;
}

int cmd_stats_cd(std::size_t k, std::size_t n, double q, const GlobalOpts& g) {
    const double cd = rkm::nemenyi_cd(k, n, q);
    if (g.json) {
        nlohmann::json doc;
        doc["seed"] = g.seed;
        doc["k"] = k;
        doc["n"] = n;
        doc["q"] = q;
        doc["cd"] = cd;
        std::cout << doc.dump(2) << "\n";
        return 0;
    }
    std::cout << "seed: " << g.seed << "\n";
    std::cout << "cd: " << fmt(cd) << "\n";
    return 0;
}

int cmd_bound(const std::string& diag_path, const std::string& slacks_path, double norm_bound,
              double eps, const GlobalOpts& g) {
    const std::vector<double> diag = read_values_csv(diag_path);
    std::vector<double> slacks(diag.size(), 0.0);
    if (!slacks_path.empty()) slacks = read_values_csv(slacks_path);
    const rkm::BoundResult b = rkm::rademacher_bound(diag, norm_bound, slacks, eps);
    if (g.json) {
        nlohmann::json doc;
        doc["seed"] = g.seed;
        doc["n"] = diag.size();
        doc["slack_term"] = b.slack_term;
        doc["confidence_term"] = b.confidence_term;
        doc["complexity_term"] = b.complexity_term;
        doc["total"] = b.total;
        std::cout << doc.dump(2) << "\n";
        return 0;
    }
    std::cout << "seed: " << g.seed << "\n";
    std::cout << "slack_term: " << fmt(b.slack_term) << "\n";
    std::cout << "confidence_term: " << fmt(b.confidence_term) << "\n";
    std::cout << "complexity_term: " << fmt(b.complexity_term) << "\n";
    std::cout << "bound: " << fmt(b.total) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"randomized and kernel learning machines: benchmarks, statistics, maps"};
    app.fallthrough();
    app.require_subcommand(1);

    GlobalOpts g;
    CLI::Option* seed_opt =
        app.add_option("--seed", g.seed, "master random seed (default 42)");
    CLI::Option* jobs_opt =
        app.add_option("--jobs", g.jobs, "worker threads for grid search");
    app.add_flag("--json", g.json, "emit a single JSON document on stdout");
    app.add_option("--out", g.out, "output directory (or file for predict)");

    std::string config_path, model_path, data_path, report_path, palette_path, scores_path;
    std::string model_filter, diag_path, slacks_path;
    bool no_header = false, ranks_mode = false, lower_better = false;
    int label_col = -1;
    std::size_t cd_k = 0, cd_n = 0, fr_n = 0;
    double cd_q = 0.0, norm_bound = 0.0, eps = 0.0;

    CLI::App* bench = app.add_subcommand("bench", "experiment pipelines");
    bench->require_subcommand(1);
    CLI::App* bench_run = bench->add_subcommand("run", "run a full benchmark from a config file");
    bench_run->add_option("config", config_path, "experiment config (JSON)")->required();

    CLI::App* tune_cmd = app.add_subcommand("tune", "grid-search only, write tuning scores");
    tune_cmd->add_option("config", config_path, "experiment config (JSON)")->required();

    CLI::App* predict_cmd = app.add_subcommand("predict", "apply a saved model to a CSV");
    predict_cmd->add_option("model", model_path, "model file (JSON)")->required();
    predict_cmd->add_option("data", data_path, "input CSV")->required();
    predict_cmd->add_flag("--no-header", no_header, "input CSV has no header row");
    CLI::Option* lc_opt = predict_cmd->add_option(
        "--label-column", label_col, "0-based label column (-1 last); enables accuracy output");

    CLI::App* map_cmd = app.add_subcommand("map", "render classification maps from a report");
    map_cmd->add_option("report", report_path, "report.json from bench run")->required();
    map_cmd->add_option("palette", palette_path, "palette JSON (background + class colors)")
        ->required();
    map_cmd->add_option("--model", model_filter, "render only this model kind");

    CLI::App* stats = app.add_subcommand("stats", "rank statistics");
    stats->require_subcommand(1);
    CLI::App* fr_cmd = stats->add_subcommand("friedman", "Friedman test from a score table");
    fr_cmd->add_option("scores", scores_path, "CSV score table (header of model names)")
        ->required();
    CLI::Option* ranks_opt = fr_cmd->add_flag(
        "--ranks", ranks_mode, "the CSV holds one row of precomputed average ranks");
    CLI::Option* frn_opt =
        fr_cmd->add_option("--n", fr_n, "number of datasets behind the average ranks");
    ranks_opt->needs(frn_opt);
    frn_opt->needs(ranks_opt);
    fr_cmd->add_flag("--lower-better", lower_better,
                     "scores are errors: smaller values rank first");
    CLI::App* cd_cmd = stats->add_subcommand("cd", "Nemenyi critical difference");
    cd_cmd->add_option("--k", cd_k, "number of models")->required();
    cd_cmd->add_option("--n", cd_n, "number of datasets")->required();
    cd_cmd->add_option("--q", cd_q, "critical value q_alpha")->required();

    CLI::App* bound_cmd = app.add_subcommand("bound", "generalization bound calculator");
    bound_cmd->add_option("--diag-csv", diag_path, "kernel diagonal values, one per line")
        ->required();
    bound_cmd->add_option("--norm", norm_bound, "norm bound on the weight vector")->required();
    bound_cmd->add_option("--eps", eps, "confidence epsilon in (0, 2]")->required();
    bound_cmd->add_option("--slacks-csv", slacks_path,
                          "slack values, one per line (default all zero)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            std::cout << app.help();
            return 0;
        }
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }
    g.seed_given = seed_opt->count() > 0;
    g.jobs_given = jobs_opt->count() > 0;

    try {
        if (bench_run->parsed()) return cmd_bench_run(config_path, g);
        if (tune_cmd->parsed()) return cmd_tune(config_path, g);
        if (predict_cmd->parsed())
            return cmd_predict(model_path, data_path, no_header, lc_opt->count() > 0,
                               label_col, g);
        if (map_cmd->parsed()) return cmd_map(report_path, palette_path, model_filter, g);
        if (fr_cmd->parsed())
            return cmd_stats_friedman(scores_path, ranks_mode, fr_n, lower_better, g);
        if (cd_cmd->parsed()) return cmd_stats_cd(cd_k, cd_n, cd_q, g);
        if (bound_cmd->parsed()) return cmd_bound(diag_path, slacks_path, norm_bound, eps, g);
    } catch (const rkm::NumericError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const rkm::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
