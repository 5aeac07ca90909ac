#include "for2for/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "for2for/errors.hpp"

namespace for2for {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string_view unquote(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            cells.push_back(unquote(line.substr(start)));
            break;
        }
        cells.push_back(unquote(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return cells;
}

std::optional<double> parse_number(std::string_view cell) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    return value;
}

std::string where(std::string_view source, std::size_t row, std::size_t col) {
    return std::string(source) + ": row " + std::to_string(row) + ", column " + std::to_string(col);
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "' for reading");
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
    return out;
}

bool is_blank(std::string_view line) { return trim(line).empty(); }

}  // namespace

bool in_lexicon(std::string_view model_id) noexcept {
    return std::find(kBaseModelLexicon.begin(), kBaseModelLexicon.end(), model_id) !=
           kBaseModelLexicon.end();
}

std::size_t lexicon_index(std::string_view model_id) {
    auto it = std::find(kBaseModelLexicon.begin(), kBaseModelLexicon.end(), model_id);
    if (it == kBaseModelLexicon.end())
        throw DataError("model id '" + std::string(model_id) + "' is not a known base model");
    return static_cast<std::size_t>(it - kBaseModelLexicon.begin());
}

std::vector<std::string> lexicon_ids() {
    return {kBaseModelLexicon.begin(), kBaseModelLexicon.end()};
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::vector<TimeSeries> parse_series_csv(std::istream& in, const FrequencyClass& frequency,
                                         std::string_view source) {
    std::vector<TimeSeries> out;
    std::unordered_set<std::string> ids;
    std::string line;
    std::size_t row = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++row;
        if (is_blank(line)) continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        auto cells = split_csv_line(line);
        std::string id(cells.front());
        if (id.empty()) throw DataError(where(source, row, 1) + ": empty series id");
        while (cells.size() > 1 && cells.back().empty()) cells.pop_back();
        std::vector<double> values;
        values.reserve(cells.size() - 1);
        for (std::size_t c = 1; c < cells.size(); ++c) {
            auto v = parse_number(cells[c]);
            if (!v) {
                throw DataError(where(source, row, c + 1) + ": '" + std::string(cells[c]) +
                                "' is not a number");
            }
            if (!std::isfinite(*v)) throw DataError(where(source, row, c + 1) + ": non-finite value");
            values.push_back(*v);
        }
        if (!ids.insert(id).second)
            throw DataError(std::string(source) + ": duplicate series id '" + id + "' at row " +
                            std::to_string(row));
        try {
            out.emplace_back(std::move(id), frequency, std::move(values));
        } catch (const DataError& e) {
            throw DataError(std::string(source) + ": row " + std::to_string(row) + ": " + e.what());
        }
    }
    return out;
}

std::vector<TimeSeries> load_series_csv(const std::filesystem::path& path,
                                        const FrequencyClass& frequency) {
    auto in = open_input(path);
    return parse_series_csv(in, frequency, path.string());
}

Dataset load_dataset(const DatasetManifest& manifest) {
    Dataset ds;
    auto train = load_series_csv(manifest.train_path, manifest.frequency);
    for (auto& s : train) {
        if (manifest.id_prefix_filter && !s.id().starts_with(*manifest.id_prefix_filter)) continue;
        ds.train.push_back(std::move(s));
    }
    if (manifest.test_path) {
        std::set<std::string> known;
        for (const auto& s : ds.train) known.insert(s.id());
        auto test = load_series_csv(*manifest.test_path, manifest.frequency);
        for (auto& s : test) {
            if (manifest.id_prefix_filter && !s.id().starts_with(*manifest.id_prefix_filter)) continue;
            if (!known.count(s.id()))
                throw DataError("test series '" + s.id() + "' does not appear in the train file");
            ds.test.emplace(s.id(), s.values());
        }
    }
    return ds;
}

ExternalForecasts parse_external_forecasts(std::istream& in, int horizon, std::string_view source) {
    ExternalForecasts out;
    std::string line;
    std::size_t row = 0;
    bool header_seen = false;
    const std::size_t width = static_cast<std::size_t>(horizon) + 2;
    while (std::getline(in, line)) {
        ++row;
        if (is_blank(line)) continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        auto cells = split_csv_line(line);
        if (cells.size() != width) {
            throw DataError(std::string(source) + ": row " + std::to_string(row) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(width) + " (series_id,model_id,t1..t" +
                            std::to_string(horizon) + ")");
        }
        std::string series_id(cells[0]);
        std::string model_id(cells[1]);
        if (!in_lexicon(model_id))
            throw DataError(where(source, row, 2) + ": unknown model id '" + model_id + "'");
        std::vector<double> values;
        values.reserve(static_cast<std::size_t>(horizon));
        for (std::size_t c = 2; c < cells.size(); ++c) {
            auto v = parse_number(cells[c]);
            if (!v) {
                throw DataError(where(source, row, c + 1) + ": '" + std::string(cells[c]) +
                                "' is not a number");
            }
            if (!std::isfinite(*v)) throw DataError(where(source, row, c + 1) + ": non-finite forecast");
            values.push_back(*v);
        }
        auto& cols = out[series_id];
        if (!cols.emplace(model_id, std::move(values)).second)
            throw DataError(std::string(source) + ": duplicate forecasts for " + series_id + "/" +
                            model_id);
    }
    return out;
}

ExternalForecasts load_external_forecasts(const std::filesystem::path& path, int horizon) {
    auto in = open_input(path);
    return parse_external_forecasts(in, horizon, path.string());
}

ForecastTable load_forecast_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    ForecastTable out;
    std::string line;
    std::size_t row = 0;
    bool header_seen = false;
    std::optional<std::size_t> width;
    while (std::getline(in, line)) {
        ++row;
        if (is_blank(line)) continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        auto cells = split_csv_line(line);
        if (!width) width = cells.size();
        if (cells.size() != *width || cells.size() < 2)
            throw DataError(path.string() + ": row " + std::to_string(row) + " has inconsistent width");
        std::vector<double> values;
        for (std::size_t c = 1; c < cells.size(); ++c) {
            auto v = parse_number(cells[c]);
            if (!v || !std::isfinite(*v))
                throw DataError(where(path.string(), row, c + 1) + ": invalid forecast value");
            values.push_back(*v);
        }
        if (!out.emplace(std::string(cells[0]), std::move(values)).second)
            throw DataError(path.string() + ": duplicate series id '" + std::string(cells[0]) + "'");
    }
    return out;
}

void write_forecast_csv(std::ostream& out, const ForecastTable& forecasts) {
    std::size_t h = forecasts.empty() ? 0 : forecasts.begin()->second.size();
    for (const auto& [id, v] : forecasts) {
        if (v.size() != h)
            throw DataError("forecast for '" + id + "' has length " + std::to_string(v.size()) +
                            ", expected " + std::to_string(h));
        for (double x : v) {
            if (!std::isfinite(x)) throw DataError("refusing to write non-finite forecast for '" + id + "'");
        }
    }
    out << "series_id";
    for (std::size_t t = 1; t <= h; ++t) out << ",t" << t;
    out << '\n';
    for (const auto& [id, v] : forecasts) {
        out << id;
        for (double x : v) out << ',' << format_double(x);
        out << '\n';
    }
}

void write_forecast_csv(const std::filesystem::path& path, const ForecastTable& forecasts) {
    std::ostringstream buffer;
    write_forecast_csv(buffer, forecasts);
    auto out = open_output(path);
    out << buffer.str();
    if (!out) throw DataError("failed writing '" + path.string() + "'");
}

void write_base_forecast_csv(std::ostream& out, const std::vector<ForecastMatrix>& matrices) {
    std::size_t h = matrices.empty() ? 0 : matrices.front().horizon();
    out << "series_id,model_id";
    for (std::size_t t = 1; t <= h; ++t) out << ",t" << t;
    out << '\n';
    for (const auto& m : matrices) {
        if (m.horizon() != h) throw DataError("base forecasts with mixed horizons cannot share a file");
        for (std::size_t j = 0; j < m.model_ids().size(); ++j) {
            out << m.series_id() << ',' << m.model_ids()[j];
            for (std::size_t i = 0; i < h; ++i) out << ',' << format_double(m.values()(i, j));
            out << '\n';
        }
    }
}

namespace {

template <typename T>
T parse_int_value(std::string_view key, std::string_view value, std::string_view where_) {
    T out{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size())
        throw UsageError(std::string(where_) + ": '" + std::string(key) + "' expects an integer, got '" +
                         std::string(value) + "'");
    return out;
}

double parse_real_value(std::string_view key, std::string_view value, std::string_view where_) {
    auto v = parse_number(value);
    if (!v || !std::isfinite(*v))
        throw UsageError(std::string(where_) + ": '" + std::string(key) + "' expects a number, got '" +
                         std::string(value) + "'");
    return *v;
}

bool parse_bool_value(std::string_view key, std::string_view value, std::string_view where_) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw UsageError(std::string(where_) + ": '" + std::string(key) + "' expects true/false, got '" +
                     std::string(value) + "'");
}

}  // namespace

RunConfig parse_run_config(std::istream& in, std::string_view source) {
    RunConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view text = line;
        if (auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
        text = trim(text);
        if (text.empty()) continue;
        const std::string loc = std::string(source) + ":" + std::to_string(lineno);
        auto eq = text.find('=');
        if (eq == std::string_view::npos) throw UsageError(loc + ": expected 'key = value'");
        std::string_view key = trim(text.substr(0, eq));
        std::string_view value = trim(text.substr(eq + 1));
        if (key.empty() || value.empty()) throw UsageError(loc + ": expected 'key = value'");

        if (key == "epochs") cfg.epochs = parse_int_value<int>(key, value, loc);
        else if (key == "n_minibatches") cfg.n_minibatches = parse_int_value<int>(key, value, loc);
        else if (key == "n_instances") cfg.n_instances = parse_int_value<int>(key, value, loc);
        else if (key == "holdout_fraction") cfg.holdout_fraction = parse_real_value(key, value, loc);
        else if (key == "seed") cfg.seed = parse_int_value<std::uint64_t>(key, value, loc);
        else if (key == "model_kind") cfg.model_kind = parse_model_kind(value);
        else if (key == "all_frequencies") cfg.all_frequencies = parse_bool_value(key, value, loc);
        else if (key == "preprocessing") cfg.mode = parse_scale_mode(value);
        else if (key == "clip_floor") cfg.clip.floor = parse_real_value(key, value, loc);
        else if (key == "clip_negatives_only") cfg.clip.negatives_only = parse_bool_value(key, value, loc);
        else if (key == "learning_rate") cfg.adam.learning_rate = parse_real_value(key, value, loc);
        else if (key == "beta1") cfg.adam.beta1 = parse_real_value(key, value, loc);
        else if (key == "beta2") cfg.adam.beta2 = parse_real_value(key, value, loc);
        else if (key == "eps") cfg.adam.eps = parse_real_value(key, value, loc);
        else if (key == "stretch_k_max") cfg.stretch_k_max = parse_int_value<int>(key, value, loc);
        else if (key == "state_size") cfg.state_size = parse_int_value<int>(key, value, loc);
        else if (key == "readout") cfg.readout = parse_readout_source(value);
        else if (key == "conv_layers") cfg.conv_layers = parse_int_value<int>(key, value, loc);
        else if (key == "conv_channels") cfg.conv_channels = parse_int_value<int>(key, value, loc);
        else if (key == "residual_head") cfg.head = parse_residual_head(value);
        else if (key == "ensemble_space") {
            if (value == "original") cfg.ensemble_space = EnsembleSpace::Original;
            else if (value == "transformed") cfg.ensemble_space = EnsembleSpace::Transformed;
            else throw UsageError(loc + ": ensemble_space must be 'original' or 'transformed'");
        } else if (key == "prefer_external") cfg.prefer_external = parse_bool_value(key, value, loc);
        else if (key == "seasonal_period") cfg.seasonal_period = parse_int_value<int>(key, value, loc);
        else if (key == "validation_every") cfg.validation_every = parse_int_value<int>(key, value, loc);
        else if (key == "threads") cfg.threads = parse_int_value<int>(key, value, loc);
        else throw UsageError(loc + ": unknown key '" + std::string(key) + "'");
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config '" + path.string() + "'");
    return parse_run_config(in, path.string());
}

}  // namespace for2for
