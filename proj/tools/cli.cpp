#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>

#include "for2for/baselines.hpp"
#include "for2for/errors.hpp"
#include "for2for/ingest.hpp"
#include "for2for/log.hpp"
#include "for2for/meta_model.hpp"
#include "for2for/metrics.hpp"
#include "for2for/trainer.hpp"

namespace for2for::cli {

namespace fs = std::filesystem;

namespace {

struct BaseForecastArgs {
    std::string train;
    std::string freq;
    std::string external;
    std::string out;
    bool chop = false;
    int threads = 1;
};

struct TrainArgs {
    std::vector<std::string> train;
    std::vector<std::string> freq;
    std::vector<std::string> external;
    bool all_freqs = false;
    std::string model;
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    std::optional<int> threads;
};

struct PredictArgs {
    std::vector<std::string> train;
    std::vector<std::string> freq;
    std::vector<std::string> external;
    std::string models;
    std::string out;
    std::optional<int> horizon;
    std::string ensemble_space = "original";
    int threads = 1;
};

struct EvaluateArgs {
    std::string train;
    std::string test;
    std::string pred;
    std::string freq;
    std::string report;
};

struct CombineArgs {
    std::vector<std::string> pred;
    std::string out;
};

void ensure_parent(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

void write_text(const fs::path& path, const std::string& text) {
    ensure_parent(path);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw DataError("failed writing '" + path.string() + "'");
}

FrequencyClass frequency_for(const std::string& text, int seasonal_period) {
    auto f = FrequencyClass::parse(text);
    return seasonal_period > 0 ? f.with_seasonal_period(seasonal_period) : f;
}

void require_paired(const std::vector<std::string>& a, const std::vector<std::string>& b, std::string_view what) {
    if (!b.empty() && a.size() != b.size())
        throw UsageError("give one " + std::string(what) + " per --train file (" + std::to_string(a.size()) +
                         " --train, " + std::to_string(b.size()) + " " + std::string(what) + ")");
}

// ---- base-forecast ---------------------------------------------------------

int cmd_base_forecast(const BaseForecastArgs& a, std::ostream& out) {
    const auto freq = FrequencyClass::parse(a.freq);
    const int h = freq.horizon();
    auto series = load_series_csv(a.train, freq);
    ExternalForecasts external;
    if (!a.external.empty()) external = load_external_forecasts(a.external, h);

    std::vector<TimeSeries> inputs;
    for (const auto& s : series) {
        if (!a.chop) {
            inputs.push_back(s);
            continue;
        }
        if (s.size() < static_cast<std::size_t>(h) + 2) {
            warn("series '" + s.id() + "' has " + std::to_string(s.size()) +
                 " observations; too short to chop " + std::to_string(h) + ", skipped");
            continue;
        }
        inputs.push_back(s.head(s.size() - static_cast<std::size_t>(h)));
    }

    std::vector<std::optional<ForecastMatrix>> slots(inputs.size());
    parallel_for(inputs.size(), a.threads, [&](std::size_t i) {
        auto it = external.find(inputs[i].id());
        slots[i] = forecast_all(inputs[i], h, freq.seasonal_period(), it == external.end() ? nullptr : &it->second);
    });
    std::vector<ForecastMatrix> matrices;
    for (auto& m : slots) matrices.push_back(std::move(*m));

    std::ostringstream buffer;
    write_base_forecast_csv(buffer, matrices);
    if (a.out.empty()) out << buffer.str();
    else write_text(a.out, buffer.str());
    return 0;
}

// ---- train -----------------------------------------------------------------

void write_log(const fs::path& path, const std::vector<EpochLog>& log, bool with_validation) {
    std::ostringstream buf;
    buf << (with_validation ? "epoch,train_mae,val_mae\n" : "epoch,train_mae\n");
    for (const auto& e : log) {
        buf << e.epoch << ',' << format_double(e.train_mae);
        if (with_validation) {
            buf << ',';
            if (e.val_mae) buf << format_double(*e.val_mae);
        }
        buf << '\n';
    }
    write_text(path, buf.str());
}

int cmd_train(TrainArgs a, std::ostream& out) {
    RunConfig config = load_run_config(a.config);
    config.model_kind = parse_model_kind(a.model);
    if (a.all_freqs) config.all_frequencies = true;
    if (a.seed) config.seed = *a.seed;
    if (a.threads) config.threads = *a.threads;
    config.validate();

    if (a.train.empty()) throw UsageError("--train is required");
    if (a.freq.size() != a.train.size())
        throw UsageError("give one --freq per --train file");
    if (!config.all_frequencies && a.train.size() != 1)
        throw UsageError("several --train files need --all-freqs");
    require_paired(a.train, a.external, "--external");

    std::vector<TimeSeries> series;
    ExternalForecasts external;
    std::map<std::string, std::size_t> chopped_lengths;
    std::set<Frequency> seen;
    for (std::size_t i = 0; i < a.train.size(); ++i) {
        const auto freq = frequency_for(a.freq[i], config.seasonal_period);
        if (!seen.insert(freq.name()).second) throw UsageError("frequency " + a.freq[i] + " given twice");
        auto part = load_series_csv(a.train[i], freq);
        if (!a.external.empty()) {
            for (auto& [id, cols] : load_external_forecasts(a.external[i], freq.horizon())) external[id] = std::move(cols);
        }
        for (auto& s : part) {
            chopped_lengths[s.id()] = s.size() - std::min<std::size_t>(s.size(), static_cast<std::size_t>(freq.horizon()));
            series.push_back(std::move(s));
        }
    }

    const auto base = make_base_forecaster(external.empty() ? nullptr : &external, config.prefer_external,
                                           std::move(chopped_lengths));
    auto samples = build_training_samples(series, config, base);
    if (samples.empty()) throw DataError("no series is long enough to form a training sample");

    const fs::path dir(a.out_dir);
    fs::create_directories(dir);
    if (config.holdout_fraction > 0.0) {
        auto split = split_holdout(samples, config.holdout_fraction, config.seed);
        auto tuning = train_instance(split.train, split.validation, config, config.seed);
        write_log(dir / "log_holdout.csv", tuning.log, true);
    }
    auto instances = train_ensemble(samples, config);
    for (std::size_t i = 0; i < instances.size(); ++i) {
        std::ostringstream buf;
        save_model(buf, instances[i].model);
        write_text(dir / ("model_" + std::to_string(i) + ".txt"), buf.str());
        write_log(dir / ("log_" + std::to_string(i) + ".csv"), instances[i].log, false);
    }
    out << "trained " << instances.size() << " instance(s) on " << samples.size() << " samples from "
        << series.size() << " series into " << dir.string() << '\n';
    return 0;
}

// ---- predict ---------------------------------------------------------------

std::vector<MetaModel> load_model_dir(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw DataError("model directory '" + dir.string() + "' does not exist");
    static const std::regex pattern(R"(model_(\d+)\.txt)");
    std::vector<std::pair<long, fs::path>> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::smatch m;
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && std::regex_match(name, m, pattern)) files.emplace_back(std::stol(m[1]), entry.path());
    }
    if (files.empty()) throw DataError("no model_<i>.txt files in '" + dir.string() + "'");
    std::sort(files.begin(), files.end());
    std::vector<MetaModel> models;
    for (const auto& [_, path] : files) models.push_back(load_model(path));
    for (const auto& m : models) {
        if (m.kind() != models.front().kind() || m.mode != models.front().mode)
            throw DataError("models in '" + dir.string() + "' disagree on architecture or preprocessing");
    }
    return models;
}

FrequencyClass resolve_frequency(const std::vector<MetaModel>& models, const std::string& requested) {
    const auto& known = models.front().frequencies;
    if (requested.empty()) {
        if (known.size() != 1)
            throw UsageError("models were trained on several frequencies; pass --freq for each --train file");
        return known.front();
    }
    const auto f = FrequencyClass::parse(requested);
    for (const auto& k : known)
        if (k.name() == f.name()) return k;
    if (models.front().kind() == ModelKind::Cnn)
        throw UsageError("CNN models were trained on " + std::string(known.front().label()) +
                         " data and cannot forecast " + std::string(f.label()));
    return f;
}

int cmd_predict(const PredictArgs& a) {
    auto models = load_model_dir(a.models);
    const bool cnn = models.front().kind() == ModelKind::Cnn;
    if (a.horizon && cnn)
        throw UsageError("--horizon is only valid for RNN models; a CNN forecasts the horizon it was trained on");
    if (a.horizon && *a.horizon < 1) throw UsageError("--horizon must be positive");
    if (a.train.empty()) throw UsageError("--train is required");
    if (!a.freq.empty() && a.freq.size() != a.train.size()) throw UsageError("give one --freq per --train file");
    if (a.freq.empty() && a.train.size() != 1) throw UsageError("several --train files need one --freq each");
    require_paired(a.train, a.external, "--external");
    const auto space = parse_ensemble_space(a.ensemble_space);

    ForecastTable predictions;
    for (std::size_t i = 0; i < a.train.size(); ++i) {
        const auto freq = resolve_frequency(models, a.freq.empty() ? std::string() : a.freq[i]);
        const int h = a.horizon ? *a.horizon : freq.horizon();
        ExternalForecasts external;
        if (!a.external.empty()) external = load_external_forecasts(a.external[i], h);
        const auto series = load_series_csv(a.train[i], freq);
        const auto base = make_base_forecaster(external.empty() ? nullptr : &external, false);
        auto part = predict_series(models, series, h, base, space, a.threads);
        for (auto& [id, v] : part) {
            if (!predictions.emplace(id, std::move(v)).second)
                throw DataError("series id '" + id + "' appears in more than one --train file");
        }
    }
    std::ostringstream buf;
    write_forecast_csv(buf, predictions);
    write_text(a.out, buf.str());
    return 0;
}

// ---- evaluate / combine ----------------------------------------------------

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
    DatasetManifest manifest{a.train, fs::path(a.test), FrequencyClass::parse(a.freq), std::nullopt};
    const auto data = load_dataset(manifest);
    const auto pred = load_forecast_csv(a.pred);
    const auto evaluation = evaluate_forecasts(data.train, data.test, pred);
    write_report_table(out, evaluation.report);
    if (!a.report.empty()) {
        std::ostringstream buf;
        write_report_csv(buf, evaluation.report);
        write_text(a.report, buf.str());
    }
    return 0;
}

int cmd_combine(const CombineArgs& a) {
    if (a.pred.size() < 2) throw UsageError("combine needs at least two --pred files");
    std::vector<ForecastTable> tables;
    for (const auto& p : a.pred) tables.push_back(load_forecast_csv(p));
    ForecastTable combined;
    for (const auto& [id, first] : tables.front()) {
        std::vector<double> acc(first.size(), 0.0);
        for (std::size_t k = 0; k < tables.size(); ++k) {
            auto it = tables[k].find(id);
            if (it == tables[k].end()) throw DataError("series '" + id + "' missing from '" + a.pred[k] + "'");
            if (it->second.size() != acc.size())
                throw DataError("series '" + id + "' has different horizons across prediction files");
            for (std::size_t t = 0; t < acc.size(); ++t) acc[t] += it->second[t];
        }
        for (double& v : acc) v /= static_cast<double>(tables.size());
        combined.emplace(id, std::move(acc));
    }
    for (std::size_t k = 1; k < tables.size(); ++k) {
        if (tables[k].size() != combined.size())
            throw DataError("'" + a.pred[k] + "' holds series absent from '" + a.pred.front() + "'");
    }
    std::ostringstream buf;
    write_forecast_csv(buf, combined);
    write_text(a.out, buf.str());
    return 0;
}

int report_error(std::ostream& err, std::string_view code, std::string_view message, int exit_code) {
    std::string line(message);
    std::replace(line.begin(), line.end(), '\n', ' ');
    err << "error: " << code << ": " << line << '\n';
    return exit_code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Forecast combination with CNN/RNN meta-learners", "for2for"};
    app.require_subcommand(1);

    BaseForecastArgs bf;
    auto* base_cmd = app.add_subcommand("base-forecast", "Run the base models and write their forecasts");
    base_cmd->add_option("--train", bf.train, "Series CSV")->required();
    base_cmd->add_option("--freq", bf.freq, "Frequency class")->required();
    base_cmd->add_option("--external", bf.external, "Externally produced base forecasts");
    base_cmd->add_option("--out", bf.out, "Output CSV (stdout when omitted)");
    base_cmd->add_flag("--chop", bf.chop, "Drop the last h observations first");
    base_cmd->add_option("--threads", bf.threads, "Worker threads")->check(CLI::PositiveNumber);

    TrainArgs tr;
    auto* train_cmd = app.add_subcommand("train", "Train an ensemble of meta-learners");
    train_cmd->add_option("--train", tr.train, "Series CSV (repeat with --freq for --all-freqs)")->required();
    train_cmd->add_option("--freq", tr.freq, "Frequency class of each --train file");
    train_cmd->add_flag("--all-freqs", tr.all_freqs, "One RNN across frequency classes");
    train_cmd->add_option("--external", tr.external, "External base forecasts on chopped series");
    train_cmd->add_option("--model", tr.model, "cnn or rnn")->required();
    train_cmd->add_option("--config", tr.config, "Run configuration file")->required();
    train_cmd->add_option("--seed", tr.seed, "Base seed");
    train_cmd->add_option("--out-dir", tr.out_dir, "Directory for models and logs");
    train_cmd->add_option("--threads", tr.threads, "Worker threads")->check(CLI::PositiveNumber);

    PredictArgs pr;
    auto* predict_cmd = app.add_subcommand("predict", "Forecast complete series with trained models");
    predict_cmd->add_option("--train", pr.train, "Series CSV")->required();
    predict_cmd->add_option("--freq", pr.freq, "Frequency class of each --train file");
    predict_cmd->add_option("--models", pr.models, "Directory written by train")->required();
    predict_cmd->add_option("--external", pr.external, "External base forecasts on complete series");
    predict_cmd->add_option("--out", pr.out, "Prediction CSV")->required();
    predict_cmd->add_option("--horizon", pr.horizon, "Forecast horizon (RNN only)");
    predict_cmd->add_option("--ensemble-space", pr.ensemble_space, "original or transformed");
    predict_cmd->add_option("--threads", pr.threads, "Worker threads")->check(CLI::PositiveNumber);

    EvaluateArgs ev;
    auto* eval_cmd = app.add_subcommand("evaluate", "Score predictions with sMAPE, MASE and OWA");
    eval_cmd->add_option("--train", ev.train, "In-sample series CSV")->required();
    eval_cmd->add_option("--test", ev.test, "Actuals CSV")->required();
    eval_cmd->add_option("--pred", ev.pred, "Prediction CSV")->required();
    eval_cmd->add_option("--freq", ev.freq, "Frequency class")->required();
    eval_cmd->add_option("--report", ev.report, "Write the report as CSV");

    CombineArgs co;
    auto* combine_cmd = app.add_subcommand("combine", "Average prediction files");
    combine_cmd->add_option("--pred", co.pred, "Prediction CSV (repeat)")->required();
    combine_cmd->add_option("--out", co.out, "Output CSV")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        return report_error(err, "usage", e.what(), 1);
    }

    auto previous = set_warning_handler([&err](std::string_view msg) { err << "warning: " << msg << '\n'; });
    int code = 0;
    try {
        if (*base_cmd) code = cmd_base_forecast(bf, out);
        else if (*train_cmd) code = cmd_train(tr, out);
        else if (*predict_cmd) code = cmd_predict(pr);
        else if (*eval_cmd) code = cmd_evaluate(ev, out);
        else if (*combine_cmd) code = cmd_combine(co);
    } catch (const Error& e) {
        code = report_error(err, e.code(), e.what(), e.exit_code());
    } catch (const fs::filesystem_error& e) {
        code = report_error(err, "data", e.what(), 2);
    } catch (const std::exception& e) {
        code = report_error(err, "data", e.what(), 2);
    }
    set_warning_handler(std::move(previous));
    return code;
}

}  // namespace for2for::cli
