#pragma once

#include <filesystem>
#include <iosfwd>
#include <variant>
#include <vector>

#include "for2for/cnn_meta.hpp"
#include "for2for/config.hpp"
#include "for2for/core.hpp"
#include "for2for/rnn_meta.hpp"

namespace for2for {

/// Either meta-learner, with the preprocessing it was trained under.
struct MetaModel {
    std::variant<CnnModel, RnnModel> net;
    /// Frequency classes seen in training (one unless trained on all frequencies).
    std::vector<FrequencyClass> frequencies;
    ScaleMode mode = ScaleMode::LastObsLog;
    ClipPolicy clip;

    ModelKind kind() const noexcept {
        return std::holds_alternative<CnnModel>(net) ? ModelKind::Cnn : ModelKind::Rnn;
    }
    std::vector<ng::NamedTensor> parameters();
    std::vector<ng::Tensor*> parameter_tensors();

    /// Batched forward, features (batch, h, M) -> (batch, h).
    ng::Var forward(ng::Tape& tape, const ng::Tensor& features, bool train);
    /// Transformed-space prediction for one sample.
    std::vector<double> predict(const Matrix& features) const;
};

/// First line `# for2for meta-model v1`, then a one-line JSON header with the
/// architecture and preprocessing, then the tensors.
void save_model(std::ostream& out, MetaModel& model);
void save_model(const std::filesystem::path& path, MetaModel& model);
MetaModel load_model(std::istream& in, std::string_view source = "<stream>");
MetaModel load_model(const std::filesystem::path& path);

}  // namespace for2for
