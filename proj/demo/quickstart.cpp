// Minimal end-to-end walk through the library: load a labelled CSV, split,
// standardize on the training rows, grid-search one model, refit and score.
//
//   ./quickstart [data/two_blobs.csv]

#include <iostream>
#include <string>

#include <rkm/rkm.hpp>

int main(int argc, char** argv) {
    const std::string path = argc > 1 ? argv[1] : "data/two_blobs.csv";
    try {
        rkm::CsvSchema schema;
        const rkm::Dataset data = rkm::load_csv(path, schema);
        std::cout << "loaded " << data.n() << " rows, " << data.m() << " features, "
                  << data.codec.num_classes() << " classes\n";

        const rkm::SplitIndices split = rkm::split_random_indices(data.n(), 0.7, 42);
        const rkm::Dataset train = rkm::subset(data, split.train);
        const rkm::Dataset test = rkm::subset(data, split.test);

        rkm::SearchSpace space = rkm::SearchSpace::defaults();
        space.r2km_eta = {0.1, 1.0, 10.0};
        space.r2km_lambda = {0.001, 0.1};
        space.r2km_sigma = {0.5, 1.0, 2.0};
        const rkm::TuneResult tuned =
            rkm::tune(rkm::ModelKind::r2km, train, space, 5, 42, 1);
        std::cout << "best cv accuracy " << rkm::format_double(tuned.best_score)
                  << " at eta=" << rkm::format_double(tuned.best.eta)
                  << " lambda=" << rkm::format_double(tuned.best.lambda)
                  << " sigma=" << rkm::format_double(tuned.best.sigma) << "\n";

        const rkm::StandardizeResult scaled = rkm::standardize(train, {test});
        rkm::TrainedModel model =
            rkm::fit_model(rkm::ModelKind::r2km, scaled.train, tuned.best, 42);
        model.scaler = scaled.scaler;

        const std::vector<int> pred = rkm::predict_labels(model, scaled.others[0].x);
        const rkm::ConfusionMatrix cm = rkm::confusion(test.y_class, pred,
                                                       data.codec.num_classes());
        const rkm::ClassificationMetrics metrics = rkm::classification_metrics(cm);
        std::cout << "test oa " << rkm::format_double(metrics.oa) << ", aa "
                  << rkm::format_double(metrics.aa) << "\n";

        rkm::save_model("quickstart_model.json", model);
        std::cout << "model written to quickstart_model.json\n";
    } catch (const rkm::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
