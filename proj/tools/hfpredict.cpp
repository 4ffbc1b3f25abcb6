// Command-line front end for the heart-failure LSTM pipeline: data validation,
// exploratory exports, death-event classification, trend forecasting, and a
// gradient self-check. Every run with an --out directory writes manifest.json
// first, then its outputs; a failed run leaves a FAILED marker next to the
// manifest. Identical flags and seed give byte-identical output files.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "hf/checkpoint.hpp"
#include "hf/dataset.hpp"
#include "hf/tasks.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw hf::DataError("cannot open '" + path.string() + "' for writing");
    out << content;
    if (!out) throw hf::DataError("write to '" + path.string() + "' failed");
}

// Resolved-config manifest, written before any other output.
void write_manifest(const fs::path& out_dir, const json& config) {
    fs::create_directories(out_dir);
    write_text(out_dir / "manifest.json", config.dump(2) + "\n");
}

void write_failure_marker(const fs::path& out_dir, const std::string& message) {
    std::error_code ec;
    if (!fs::exists(out_dir, ec)) return;
    std::ofstream out(out_dir / "FAILED", std::ios::binary);
    out << message << "\n";
}

struct TrainFlags {
    std::uint64_t seed = 1;
    std::size_t epochs = 200;
    double lr = 1e-3;
    std::size_t batch_size = 16;
    std::string optimizer = "adam";

    hf::TrainingConfig config() const {
        hf::TrainingConfig cfg;
        cfg.seed = seed;
        cfg.epochs = epochs;
        cfg.learning_rate = lr;
        cfg.batch_size = batch_size;
        cfg.optimizer = optimizer == "sgd" ? hf::OptimizerKind::Sgd : hf::OptimizerKind::Adam;
        return cfg;
    }

    void add_json(json& j) const {
        j["seed"] = seed;
        j["epochs"] = epochs;
        j["lr"] = lr;
        j["batch_size"] = batch_size;
        j["optimizer"] = optimizer;
    }
};

// ----------------------------------------------------------------- validate

int cmd_validate(const std::string& input, const std::string& out) {
    if (!out.empty()) {
        json j{{"subcommand", "validate"}, {"input", input}, {"out", out}, {"strict", true}};
        write_manifest(out, j);
    }

    hf::Cohort cohort = hf::load_cohort(input, /*strict=*/true);
    hf::CohortStats stats = hf::cohort_stats(cohort);
    std::string table = hf::stats_table(stats);

    std::cout << "valid: " << cohort.records.size() << " records from '" << input << "'\n";
    std::cout << table;
    if (!out.empty()) write_text(fs::path(out) / "report.tsv", table);
    return kExitOk;
}

// ------------------------------------------------------------------ explore

struct Pairing {
    const char* name;
    const char* x;
    const char* y;
    const char* hue;
};

constexpr Pairing kPairings[] = {
    {"age-vs-cpk", "age", "creatinine_phosphokinase", "anaemia"},
    {"age-vs-diabetes", "age", "diabetes", "anaemia"},
    {"age-vs-hbp", "age", "high_blood_pressure", "diabetes"},
    {"age-vs-platelets", "age", "platelets", "diabetes"},
    {"age-vs-serum-sodium", "age", "serum_sodium", "sex"},
};

std::string pairing_names() {
    std::string names;
    for (const Pairing& p : kPairings) {
        names += p.name;
        names += ", ";
    }
    return names + "age-histogram";
}

int cmd_explore(const std::string& input, const std::string& out, const std::string& pairing,
                double bin_width, bool strict) {
    const Pairing* found = nullptr;
    for (const Pairing& p : kPairings) {
        if (pairing == p.name) found = &p;
    }
    if (!found && pairing != "age-histogram") {
        throw hf::ParameterError("unknown pairing '" + pairing + "'; valid pairings: " +
                                 pairing_names());
    }

    json j{{"subcommand", "explore"}, {"input", input},   {"out", out},
           {"pairing", pairing},      {"bin_width", bin_width}, {"strict", strict}};
    write_manifest(out, j);

    hf::Cohort cohort = hf::load_cohort(input, strict);
    if (found) {
        auto rows = hf::explore_export(cohort, found->x, found->y, found->hue);
        write_text(fs::path(out) / (pairing + ".tsv"),
                   hf::scatter_table(rows, found->x, found->y, found->hue));
    } else {
        auto bins = hf::age_histogram(cohort, bin_width);
        write_text(fs::path(out) / "age-histogram.tsv", hf::histogram_table(bins));
    }
    std::cout << "wrote " << pairing << ".tsv (" << cohort.records.size() << " records)\n";
    return kExitOk;
}

// --------------------------------------------------------- train-classifier

int cmd_train_classifier(const std::string& input, const std::string& out,
                         const TrainFlags& flags, std::size_t hidden_dim, double test_fraction,
                         double threshold, bool time_as_feature, std::size_t folds, bool strict) {
    json j{{"subcommand", "train-classifier"},
           {"input", input},
           {"out", out},
           {"hidden_dim", hidden_dim},
           {"test_fraction", test_fraction},
           {"threshold", threshold},
           {"time_as_feature", time_as_feature},
           {"folds", folds},
           {"strict", strict}};
    flags.add_json(j);
    write_manifest(out, j);

    hf::Cohort cohort = hf::load_cohort(input, strict);
    hf::TrainingConfig cfg = flags.config();
    hf::ClassifierOptions opts;
    opts.hidden_dim = hidden_dim;
    opts.time_as_feature = time_as_feature;

    fs::path out_dir(out);
    if (folds > 0) {
        auto splits = hf::stratified_kfold(cohort, folds, cfg.seed);
        std::ostringstream summary;
        summary << "fold\taccuracy\n";
        double total = 0.0;
        for (std::size_t f = 0; f < splits.size(); ++f) {
            auto [model, trace] = hf::classify_train(splits[f].first, splits[f].second, cfg, opts);
            hf::EvalResult res = hf::classify_eval(model, splits[f].second, threshold);
            write_text(out_dir / ("confusion_fold" + std::to_string(f) + ".tsv"),
                       hf::confusion_table(res.matrix));
            write_text(out_dir / ("trace_fold" + std::to_string(f) + ".tsv"),
                       hf::trace_table(trace));
            summary << f << '\t' << hf::format_double(res.accuracy) << '\n';
            total += res.accuracy;
            std::cout << "fold " << f << ": accuracy " << res.accuracy << "\n";
        }
        double mean = total / static_cast<double>(splits.size());
        summary << "mean\t" << hf::format_double(mean) << '\n';
        write_text(out_dir / "summary.tsv", summary.str());
        std::cout << "mean accuracy " << mean << "\n";
        return kExitOk;
    }

    auto [train_c, test_c] = hf::split(cohort, test_fraction, cfg.seed);
    auto [model, trace] = hf::classify_train(train_c, test_c, cfg, opts);
    hf::EvalResult res = hf::classify_eval(model, test_c, threshold);

    hf::save_classifier(model, (out_dir / "checkpoint.ckpt").string());
    write_text(out_dir / "trace.tsv", hf::trace_table(trace));
    write_text(out_dir / "confusion.tsv", hf::confusion_table(res.matrix));

    std::cout << "trained on " << train_c.records.size() << ", evaluated on "
              << test_c.records.size() << ": accuracy " << res.accuracy << "\n";
    return kExitOk;
}

// ---------------------------------------------------------- eval-classifier

int cmd_eval_classifier(const std::string& input, const std::string& checkpoint,
                        const std::string& out, double threshold, bool strict) {
    json j{{"subcommand", "eval-classifier"}, {"input", input},   {"checkpoint", checkpoint},
           {"out", out},                      {"threshold", threshold}, {"strict", strict}};
    write_manifest(out, j);

    hf::ClassifierModel model = hf::load_classifier(checkpoint);
    hf::Cohort cohort = hf::load_cohort(input, strict);
    hf::EvalResult res = hf::classify_eval(model, cohort, threshold);

    write_text(fs::path(out) / "confusion.tsv", hf::confusion_table(res.matrix));
    std::cout << "evaluated " << cohort.records.size() << " records: accuracy " << res.accuracy
              << "\n";
    return kExitOk;
}

// ----------------------------------------------------------------- forecast

int cmd_forecast(const std::string& input, const std::string& out, const std::string& mode,
                 const TrainFlags& flags, std::size_t window, std::size_t hidden_dim,
                 double train_fraction, std::size_t horizon, bool strict) {
    if (mode != "holdout" && mode != "all-data") {
        throw hf::ParameterError("unknown mode '" + mode + "'; expected holdout or all-data");
    }

    bool all_data = mode == "all-data";
    if (all_data) train_fraction = 1.0;

    json j{{"subcommand", "forecast"},
           {"input", input},
           {"out", out},
           {"mode", mode},
           {"window", window},
           {"hidden_dim", hidden_dim},
           {"train_fraction", train_fraction},
           {"horizon", horizon},
           {"strict", strict}};
    flags.add_json(j);
    write_manifest(out, j);

    hf::Cohort cohort = hf::load_cohort(input, strict);
    hf::CumulativeEventSeries series = hf::build_cumulative_series(cohort);

    hf::ForecasterOptions opts;
    opts.window = window;
    opts.hidden_dim = hidden_dim;
    opts.train_fraction = train_fraction;

    hf::ForecastResult res = hf::forecast_train(series, flags.config(), opts);

    std::ostringstream table;
    fs::path out_dir(out);
    if (all_data) {
        std::vector<double> future = hf::forecast_extrapolate(res.model, series, horizon);
        table << "day\thistorical\tpredicted\n";
        for (std::size_t d = 0; d < series.days(); ++d) {
            table << d << '\t' << series.counts[d] << "\t\n";
        }
        for (std::size_t k = 0; k < future.size(); ++k) {
            table << series.days() + k << "\t\t" << hf::format_double(future[k]) << '\n';
        }
    } else {
        table << "day\thistorical\treal\tpredicted\n";
        for (std::size_t d = 0; d < series.days(); ++d) {
            table << d << '\t';
            if (d < res.first_holdout_day) {
                table << series.counts[d] << "\t\t\n";
            } else {
                table << '\t' << series.counts[d] << '\t'
                      << hf::format_double(res.holdout[d - res.first_holdout_day]) << '\n';
            }
        }
    }
    write_text(out_dir / "series.tsv", table.str());
    write_text(out_dir / "trace.tsv", hf::trace_table(res.trace));
    hf::save_forecaster(res.model, (out_dir / "checkpoint.ckpt").string());

    std::cout << "series of " << series.days() << " days, total events " << series.total()
              << ", mode " << mode << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- gradcheck

int cmd_gradcheck(std::uint64_t seed, std::size_t hidden_dim, std::size_t input_dim,
                  std::size_t steps, bool inject_fault, const std::string& out) {
    if (!out.empty()) {
        json j{{"subcommand", "gradcheck"}, {"seed", seed},   {"hidden_dim", hidden_dim},
               {"input_dim", input_dim},    {"steps", steps}, {"inject_fault", inject_fault},
               {"out", out}};
        write_manifest(out, j);
    }

    hf::Rng rng(seed);
    hf::LstmParams params = hf::LstmParams::init(input_dim, hidden_dim, rng);
    std::vector<hf::Vector> xs(steps, hf::Vector(input_dim));
    for (hf::Vector& x : xs) {
        for (double& v : x) v = rng.uniform(-1.0, 1.0);
    }

    hf::ScalarHead head;
    head.value = [](const hf::Vector& h) {
        double s = 0.0;
        for (double x : h) s += x * x;
        return s;
    };
    head.grad = [](const hf::Vector& h) {
        hf::Vector g(h.size());
        for (std::size_t i = 0; i < h.size(); ++i) g[i] = 2.0 * h[i];
        return g;
    };

    hf::GradCheckReport report = hf::grad_check(params, xs, head, 1e-5, 1e-5, inject_fault);

    std::ostringstream table;
    table << "tensor\tmax_rel_err\tstatus\n";
    for (const hf::GradCheckEntry& e : report.entries) {
        table << e.tensor << '\t' << hf::format_double(e.max_rel_err) << '\t'
              << (e.max_rel_err <= report.tolerance ? "pass" : "FAIL") << '\n';
    }
    std::cout << table.str();
    if (!out.empty()) write_text(fs::path(out) / "gradcheck.tsv", table.str());

    if (!report.passed()) {
        std::cerr << "gradient check failed\n";
        return kExitNumerical;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LSTM trainer and forecaster for the heart failure clinical records"};
    app.require_subcommand(1);

    // validate
    auto* validate = app.add_subcommand("validate", "strict-mode range check and cohort report");
    std::string v_input, v_out;
    validate->add_option("--input", v_input, "records csv")->required();
    validate->add_option("--out", v_out, "optional output directory");

    // explore
    auto* explore = app.add_subcommand("explore", "scatter and histogram exports");
    std::string e_input, e_out, e_pairing;
    double e_bin_width = 10.0;
    bool e_strict = false;
    explore->add_option("--input", e_input, "records csv")->required();
    explore->add_option("--out", e_out, "output directory")->required();
    explore->add_option("--pairing", e_pairing, "one of: " + pairing_names())->required();
    explore->add_option("--bin-width", e_bin_width, "age-histogram bin width in years");
    explore->add_flag("--strict", e_strict, "reject out-of-range rows instead of warning");

    // shared training flags
    auto add_train_flags = [](CLI::App* cmd, TrainFlags& f) {
        cmd->add_option("--seed", f.seed, "rng seed");
        cmd->add_option("--epochs", f.epochs, "training epochs");
        cmd->add_option("--lr", f.lr, "learning rate");
        cmd->add_option("--batch-size", f.batch_size, "minibatch size");
        cmd->add_option("--optimizer", f.optimizer, "adam or sgd")
            ->check(CLI::IsMember({"adam", "sgd"}));
    };

    // train-classifier
    auto* train_cls = app.add_subcommand("train-classifier", "fit the death-event classifier");
    std::string tc_input, tc_out;
    TrainFlags tc_flags;
    std::size_t tc_hidden = 16, tc_folds = 0;
    double tc_test_fraction = 0.2, tc_threshold = 0.5;
    bool tc_time = false, tc_strict = false;
    train_cls->add_option("--input", tc_input, "records csv")->required();
    train_cls->add_option("--out", tc_out, "output directory")->required();
    add_train_flags(train_cls, tc_flags);
    train_cls->add_option("--hidden-dim", tc_hidden, "LSTM hidden units");
    train_cls->add_option("--test-fraction", tc_test_fraction, "held-out fraction");
    train_cls->add_option("--threshold", tc_threshold, "decision threshold");
    train_cls->add_option("--folds", tc_folds, "cross-validation folds (0 = single split)");
    train_cls->add_flag("--time-as-feature", tc_time, "include follow-up time as an input");
    train_cls->add_flag("--strict", tc_strict, "reject out-of-range rows instead of warning");

    // eval-classifier
    auto* eval_cls = app.add_subcommand("eval-classifier", "evaluate a saved classifier");
    std::string ec_input, ec_ckpt, ec_out;
    double ec_threshold = 0.5;
    bool ec_strict = false;
    eval_cls->add_option("--input", ec_input, "records csv")->required();
    eval_cls->add_option("--checkpoint", ec_ckpt, "classifier checkpoint")->required();
    eval_cls->add_option("--out", ec_out, "output directory")->required();
    eval_cls->add_option("--threshold", ec_threshold, "decision threshold");
    eval_cls->add_flag("--strict", ec_strict, "reject out-of-range rows instead of warning");

    // forecast
    auto* forecast = app.add_subcommand("forecast", "cumulative trend forecasting");
    std::string f_input, f_out, f_mode = "holdout";
    TrainFlags f_flags;
    std::size_t f_window = 10, f_hidden = 32, f_horizon = 60;
    double f_train_fraction = 0.67;
    bool f_strict = false;
    forecast->add_option("--input", f_input, "records csv")->required();
    forecast->add_option("--out", f_out, "output directory")->required();
    forecast->add_option("--mode", f_mode, "holdout or all-data");
    add_train_flags(forecast, f_flags);
    forecast->add_option("--window", f_window, "input window length in days");
    forecast->add_option("--hidden-dim", f_hidden, "LSTM hidden units");
    forecast->add_option("--train-fraction", f_train_fraction, "fraction of windows trained on");
    forecast->add_option("--horizon", f_horizon, "days to extrapolate in all-data mode");
    forecast->add_flag("--strict", f_strict, "reject out-of-range rows instead of warning");

    // gradcheck
    auto* gradcheck = app.add_subcommand("gradcheck", "BPTT vs finite differences");
    std::uint64_t g_seed = 42;
    std::size_t g_hidden = 4, g_input = 3, g_steps = 5;
    bool g_fault = false;
    std::string g_out;
    gradcheck->add_option("--seed", g_seed, "rng seed");
    gradcheck->add_option("--hidden-dim", g_hidden, "LSTM hidden units");
    gradcheck->add_option("--input-dim", g_input, "input dimension");
    gradcheck->add_option("--steps", g_steps, "sequence length");
    gradcheck->add_option("--out", g_out, "optional output directory");
    gradcheck->add_flag("--inject-fault", g_fault)->group("");  // test hook, hidden from help

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    // The failure marker goes next to whichever manifest the command wrote.
    std::string out_dir;
    try {
        if (validate->parsed()) {
            out_dir = v_out;
            return cmd_validate(v_input, v_out);
        }
        if (explore->parsed()) {
            out_dir = e_out;
            return cmd_explore(e_input, e_out, e_pairing, e_bin_width, e_strict);
        }
        if (train_cls->parsed()) {
            out_dir = tc_out;
            return cmd_train_classifier(tc_input, tc_out, tc_flags, tc_hidden, tc_test_fraction,
                                        tc_threshold, tc_time, tc_folds, tc_strict);
        }
        if (eval_cls->parsed()) {
            out_dir = ec_out;
            return cmd_eval_classifier(ec_input, ec_ckpt, ec_out, ec_threshold, ec_strict);
        }
        if (forecast->parsed()) {
            out_dir = f_out;
            return cmd_forecast(f_input, f_out, f_mode, f_flags, f_window, f_hidden,
                                f_train_fraction, f_horizon, f_strict);
        }
        if (gradcheck->parsed()) {
            out_dir = g_out;
            return cmd_gradcheck(g_seed, g_hidden, g_input, g_steps, g_fault, g_out);
        }
    } catch (const hf::ParameterError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        if (!out_dir.empty()) write_failure_marker(out_dir, e.what());
        return kExitUsage;
    } catch (const hf::ShapeError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        if (!out_dir.empty()) write_failure_marker(out_dir, e.what());
        return kExitUsage;
    } catch (const hf::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        if (!out_dir.empty()) write_failure_marker(out_dir, e.what());
        return kExitData;
    } catch (const hf::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        if (!out_dir.empty()) write_failure_marker(out_dir, e.what());
        return kExitNumerical;
    }
    return kExitUsage;
}
