#include "for2for/meta_model.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "for2for/errors.hpp"

namespace for2for {

namespace {

constexpr std::string_view kMagic = "# for2for meta-model v1";

}  // namespace

std::vector<ng::NamedTensor> MetaModel::parameters() {
    return std::visit([](auto& m) { return m.parameters(); }, net);
}

std::vector<ng::Tensor*> MetaModel::parameter_tensors() {
    std::vector<ng::Tensor*> out;
    for (const auto& p : parameters()) out.push_back(p.tensor);
    return out;
}

ng::Var MetaModel::forward(ng::Tape& tape, const ng::Tensor& features, bool train) {
    if (auto* cnn = std::get_if<CnnModel>(&net)) return cnn_forward(tape, *cnn, features, train);
    return rnn_forward(tape, std::get<RnnModel>(net), features, train);
}

std::vector<double> MetaModel::predict(const Matrix& features) const {
    if (const auto* cnn = std::get_if<CnnModel>(&net)) return cnn_forward(*cnn, features);
    return rnn_forward(std::get<RnnModel>(net), features);
}

void save_model(std::ostream& out, MetaModel& model) {
    nlohmann::ordered_json header;
    header["kind"] = to_string(model.kind());
    if (const auto* cnn = std::get_if<CnnModel>(&model.net)) {
        header["horizon"] = cnn->config.horizon;
        header["n_models"] = cnn->config.n_models;
        header["n_conv_layers"] = cnn->config.n_conv_layers;
        header["conv_channels"] = cnn->config.conv_channels;
        header["residual_head"] = to_string(cnn->config.head);
    } else {
        const auto& rnn = std::get<RnnModel>(model.net);
        header["n_models"] = rnn.config.n_models;
        header["state_size"] = rnn.config.state_size;
        header["readout"] = to_string(rnn.config.readout);
    }
    header["preprocessing"] = to_string(model.mode);
    header["clip_floor"] = model.clip.floor;
    header["clip_negatives_only"] = model.clip.negatives_only;
    auto freqs = nlohmann::ordered_json::array();
    for (const auto& f : model.frequencies)
        freqs.push_back({{"name", f.label()}, {"horizon", f.horizon()}, {"seasonal_period", f.seasonal_period()}});
    header["frequencies"] = freqs;

    out << kMagic << '\n' << header.dump() << '\n';
    const auto params = model.parameters();
    ng::save_tensors(out, params);
}

void save_model(const std::filesystem::path& path, MetaModel& model) {
    std::ostringstream buffer;
    save_model(buffer, model);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
    out << buffer.str();
    if (!out) throw DataError("failed writing '" + path.string() + "'");
}

MetaModel load_model(std::istream& in, std::string_view source) {
    const std::string where(source);
    std::string line;
    if (!std::getline(in, line) || line != kMagic) throw DataError(where + ": not a for2for model file");
    if (!std::getline(in, line)) throw DataError(where + ": missing model header");

    MetaModel model;
    try {
        const auto header = nlohmann::json::parse(line);
        model.mode = parse_scale_mode(header.at("preprocessing").get<std::string>());
        model.clip.floor = header.at("clip_floor").get<double>();
        model.clip.negatives_only = header.at("clip_negatives_only").get<bool>();
        for (const auto& f : header.at("frequencies")) {
            model.frequencies.push_back(FrequencyClass::parse(f.at("name").get<std::string>())
                                            .with_seasonal_period(f.at("seasonal_period").get<int>()));
        }
        const ModelKind kind = parse_model_kind(header.at("kind").get<std::string>());
        if (kind == ModelKind::Cnn) {
            CnnConfig c;
            c.horizon = header.at("horizon").get<int>();
            c.n_models = header.at("n_models").get<int>();
            c.n_conv_layers = header.at("n_conv_layers").get<int>();
            c.conv_channels = header.at("conv_channels").get<int>();
            c.head = parse_residual_head(header.at("residual_head").get<std::string>());
            model.net = cnn_init(c, 0);
        } else {
            RnnConfig c;
            c.n_models = header.at("n_models").get<int>();
            c.state_size = header.at("state_size").get<int>();
            c.readout = parse_readout_source(header.at("readout").get<std::string>());
            model.net = rnn_init(c, 0);
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(where + ": malformed model header: " + e.what());
    }

    std::map<std::string, ng::Tensor> tensors;
    try {
        tensors = ng::load_tensors(in);
    } catch (const std::exception& e) {
        throw DataError(where + ": " + e.what());
    }
    for (auto& p : model.parameters()) {
        auto it = tensors.find(p.name);
        if (it == tensors.end()) throw DataError(where + ": missing tensor '" + p.name + "'");
        if (it->second.shape != p.tensor->shape)
            throw DataError(where + ": tensor '" + p.name + "' has shape " + ng::shape_string(it->second.shape) +
                            ", expected " + ng::shape_string(p.tensor->shape));
        p.tensor->data = std::move(it->second.data);
        tensors.erase(it);
    }
    if (!tensors.empty()) throw DataError(where + ": unexpected tensor '" + tensors.begin()->first + "'");
    return model;
}

MetaModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model file '" + path.string() + "'");
    return load_model(in, path.string());
}

}  // namespace for2for
