#ifndef RKM_MODEL_IO_HPP
#define RKM_MODEL_IO_HPP

// Model files: a self-describing JSON container with kind tag,
// hyperparameters, seed, codec, scaler and every matrix the predictor
// needs. Doubles are emitted in shortest round-trip form, so save/load is
// lossless at full precision.

#include <fstream>
#include <string>

#include <json.hpp>

#include "rkm/errors.hpp"
#include "rkm/models.hpp"
#include "rkm/version.hpp"

namespace rkm {

namespace detail {

inline nlohmann::json matrix_to_json(const DenseMatrix& m) {
    return {{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

inline DenseMatrix matrix_from_json(const nlohmann::json& j) {
    DenseMatrix m;
    m.rows = j.at("rows").get<std::size_t>();
    m.cols = j.at("cols").get<std::size_t>();
    m.data = j.at("data").get<std::vector<double>>();
    if (m.data.size() != m.rows * m.cols)
        throw DataError("model file: matrix data length does not match its shape");
    return m;
}

inline nlohmann::json params_to_json(const HyperParams& p) {
    return {{"c_reg", p.c_reg},
            {"hidden_nodes", p.hidden_nodes},
            {"activation", activation_name(p.activation)},
            {"gamma", p.gamma},
            {"eta", p.eta},
            {"lambda", p.lambda},
            {"sigma", p.sigma},
            {"grid_index", p.grid_index}};
}

inline HyperParams params_from_json(const nlohmann::json& j) {
    HyperParams p;
    p.c_reg = j.at("c_reg").get<double>();
    p.hidden_nodes = j.at("hidden_nodes").get<std::size_t>();
    p.activation = activation_from_name(j.at("activation").get<std::string>());
    p.gamma = j.at("gamma").get<double>();
    p.eta = j.at("eta").get<double>();
    p.lambda = j.at("lambda").get<double>();
    p.sigma = j.at("sigma").get<double>();
    p.grid_index = j.at("grid_index").get<std::size_t>();
    return p;
}

} // namespace detail

inline nlohmann::json model_to_json(const TrainedModel& m) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["library"] = std::string(library_name) + " " + library_version;
    j["kind"] = model_kind_name(m.kind);
    j["task"] = task_name(m.task);
    j["seed"] = m.layer_seed;
    j["params"] = detail::params_to_json(m.params);
    if (m.task == Task::classification) j["codec"] = m.codec.class_ids;
    if (m.scaler)
        j["scaler"] = {{"mean", m.scaler->mean}, {"std", m.scaler->std_dev}};
    switch (m.kind) {
        case ModelKind::rvfl:
        case ModelKind::rvflwodl:
            j["rvfl"] = {{"direct_link", m.rvfl.direct_link},
                         {"activation", activation_name(m.rvfl.layer.activation)},
                         {"weights", detail::matrix_to_json(m.rvfl.layer.weights)},
                         {"biases", m.rvfl.layer.biases},
                         {"w2", detail::matrix_to_json(m.rvfl.w2)}};
            break;
        case ModelKind::rkm:
            j["rkm"] = {{"gamma", m.rkm.gamma},
                        {"eta", m.rkm.eta},
                        {"kernel", kernel_kind_name(m.rkm.kernel.kind)},
                        {"sigma", m.rkm.kernel.sigma},
                        {"x_train", detail::matrix_to_json(m.rkm.x_train)},
                        {"h", detail::matrix_to_json(m.rkm.h)},
                        {"y_signs", detail::matrix_to_json(m.rkm.y_signs)},
                        {"b", m.rkm.b}};
            break;
        case ModelKind::r2km:
            j["r2km"] = {{"eta", m.r2km.eta},
                         {"lambda", m.r2km.lambda},
                         {"sigma", m.r2km.sigma},
                         {"x_train", detail::matrix_to_json(m.r2km.x_train)},
                         {"h", detail::matrix_to_json(m.r2km.h)}};
            break;
    }
    return j;
}

inline TrainedModel model_from_json(const nlohmann::json& j) {
    if (j.value("schema_version", 0) != 1)
        throw DataError("model file: unsupported schema version");
    TrainedModel m;
    m.kind = model_kind_from_name(j.at("kind").get<std::string>());
    m.task = j.at("task").get<std::string>() == "regression" ? Task::regression
                                                             : Task::classification;
    m.layer_seed = j.at("seed").get<std::uint64_t>();
    m.params = detail::params_from_json(j.at("params"));
    if (j.contains("codec"))
        m.codec.class_ids = j.at("codec").get<std::vector<std::string>>();
    if (j.contains("scaler")) {
        Scaler s;
        s.mean = j.at("scaler").at("mean").get<std::vector<double>>();
        s.std_dev = j.at("scaler").at("std").get<std::vector<double>>();
        m.scaler = std::move(s);
    }
    switch (m.kind) {
        case ModelKind::rvfl:
        case ModelKind::rvflwodl: {
            const nlohmann::json& r = j.at("rvfl");
            m.rvfl.direct_link = r.at("direct_link").get<bool>();
            m.rvfl.layer.activation =
                activation_from_name(r.at("activation").get<std::string>());
            m.rvfl.layer.weights = detail::matrix_from_json(r.at("weights"));
            m.rvfl.layer.biases = r.at("biases").get<std::vector<double>>();
            m.rvfl.layer.seed = m.layer_seed;
            m.rvfl.w2 = detail::matrix_from_json(r.at("w2"));
            m.rvfl.task = m.task;
            m.rvfl.codec = m.codec;
            break;
        }
        case ModelKind::rkm: {
            const nlohmann::json& r = j.at("rkm");
            m.rkm.gamma = r.at("gamma").get<double>();
            m.rkm.eta = r.at("eta").get<double>();
            const KernelKind kk = kernel_kind_from_name(r.at("kernel").get<std::string>());
            m.rkm.kernel = kk == KernelKind::gaussian
                               ? Kernel::gaussian(r.at("sigma").get<double>())
                               : Kernel::linear();
            m.rkm.x_train = detail::matrix_from_json(r.at("x_train"));
            m.rkm.h = detail::matrix_from_json(r.at("h"));
            m.rkm.y_signs = detail::matrix_from_json(r.at("y_signs"));
            m.rkm.b = r.at("b").get<std::vector<double>>();
            m.rkm.codec = m.codec;
            break;
        }
        case ModelKind::r2km: {
            const nlohmann::json& r = j.at("r2km");
            m.r2km.eta = r.at("eta").get<double>();
            m.r2km.lambda = r.at("lambda").get<double>();
            m.r2km.sigma = r.at("sigma").get<double>();
            m.r2km.x_train = detail::matrix_from_json(r.at("x_train"));
            m.r2km.h = detail::matrix_from_json(r.at("h"));
            m.r2km.task = m.task;
            m.r2km.codec = m.codec;
            break;
        }
    }
    return m;
}

inline void save_model(const std::string& path, const TrainedModel& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("save_model: cannot write '" + path + "'");
    out << model_to_json(m).dump(2) << "\n";
    if (!out) throw DataError("save_model: write failed for '" + path + "'");
}

inline TrainedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("load_model: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("load_model: '" + path + "' is not valid JSON: " + e.what());
    }
    return model_from_json(j);
}

} // namespace rkm

#endif
