#include "hf/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hf/checkpoint.hpp"
#include "hf/errors.hpp"

namespace hf {

namespace {

Vector encode_record(const PatientRecord& r, const NormalizationSpec& norm) {
    Vector x(norm.features.size());
    for (std::size_t j = 0; j < norm.features.size(); ++j) {
        x[j] = norm.apply_one(j, feature_value(r, norm.features[j]));
    }
    return x;
}

std::vector<Example> encode_cohort(const Cohort& c, const NormalizationSpec& norm) {
    std::vector<Example> out;
    out.reserve(c.records.size());
    for (const PatientRecord& r : c.records) {
        out.push_back(Example{{encode_record(r, norm)}, r.death_event ? 1.0 : 0.0});
    }
    return out;
}

std::vector<Example> window_examples(const std::vector<WindowPair>& pairs, std::size_t begin,
                                     std::size_t end, const SeriesScaler& scaler) {
    std::vector<Example> out;
    out.reserve(end - begin);
    for (std::size_t k = begin; k < end; ++k) {
        Example ex;
        ex.inputs.reserve(pairs[k].inputs.size());
        for (double v : pairs[k].inputs) ex.inputs.push_back(Vector{scaler.scale(v)});
        ex.target = scaler.scale(pairs[k].target);
        out.push_back(std::move(ex));
    }
    return out;
}

}  // namespace

std::string confusion_table(const ConfusionMatrix& m) {
    std::ostringstream out;
    out << "tn\tfp\tfn\ttp\n" << m.tn << '\t' << m.fp << '\t' << m.fn << '\t' << m.tp << '\n';
    return out.str();
}

std::pair<ClassifierModel, TrainingTrace> classify_train(const Cohort& train_cohort,
                                                         const Cohort& eval_cohort,
                                                         const TrainingConfig& cfg,
                                                         const ClassifierOptions& opts) {
    if (train_cohort.records.empty()) throw ParameterError("classify_train requires a nonempty cohort");

    ClassifierModel m;
    m.features = classifier_features(opts.time_as_feature);
    m.norm = NormalizationSpec::fit(train_cohort, m.features);

    Rng rng(cfg.seed);
    m.model.lstm = LstmParams::init(m.features.size(), opts.hidden_dim, rng);
    m.model.head = DenseHead::init(1, opts.hidden_dim, rng);
    m.model.sigmoid_output = true;

    std::vector<Example> train_ex = encode_cohort(train_cohort, m.norm);
    std::vector<Example> eval_ex =
        eval_cohort.records.empty() ? train_ex : encode_cohort(eval_cohort, m.norm);

    TrainingConfig task_cfg = cfg;
    task_cfg.loss = LossKind::BinaryCrossEntropy;
    TrainingTrace trace = train(m.model, train_ex, eval_ex, task_cfg);
    return {std::move(m), std::move(trace)};
}

double classify_prob(const ClassifierModel& m, const PatientRecord& r) {
    return model_output(m.model, {encode_record(r, m.norm)});
}

EvalResult classify_eval(const ClassifierModel& m, const Cohort& cohort, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw ParameterError("threshold must lie strictly between 0 and 1");
    }
    EvalResult result;
    for (const PatientRecord& r : cohort.records) {
        bool predicted = classify_prob(m, r) >= threshold;
        if (predicted && r.death_event) ++result.matrix.tp;
        else if (predicted && !r.death_event) ++result.matrix.fp;
        else if (!predicted && r.death_event) ++result.matrix.fn;
        else ++result.matrix.tn;
    }
    result.accuracy = result.matrix.accuracy();
    return result;
}

std::vector<std::pair<Cohort, Cohort>> stratified_kfold(const Cohort& c, std::size_t k,
                                                        std::uint64_t seed) {
    if (k < 2) throw ParameterError("stratified_kfold requires k >= 2");
    if (c.records.size() < k) throw ParameterError("cohort smaller than fold count");

    // Round-robin fold assignment inside each class after a seeded shuffle.
    std::vector<std::size_t> fold_of(c.records.size(), 0);
    Rng rng(seed);
    for (bool cls : {false, true}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < c.records.size(); ++i) {
            if (c.records[i].death_event == cls) members.push_back(i);
        }
        rng.shuffle(members);
        for (std::size_t j = 0; j < members.size(); ++j) fold_of[members[j]] = j % k;
    }

    std::vector<std::pair<Cohort, Cohort>> folds(k);
    for (std::size_t f = 0; f < k; ++f) {
        folds[f].first.source = c.source + "#fold" + std::to_string(f) + "-train";
        folds[f].second.source = c.source + "#fold" + std::to_string(f) + "-test";
        for (std::size_t i = 0; i < c.records.size(); ++i) {
            (fold_of[i] == f ? folds[f].second : folds[f].first).records.push_back(c.records[i]);
        }
        folds[f].first.source_rows = folds[f].first.records.size();
        folds[f].second.source_rows = folds[f].second.records.size();
    }
    return folds;
}

std::vector<WindowPair> make_windows(const std::vector<double>& series, std::size_t window) {
    if (window < 1) throw ParameterError("window must be at least 1");
    if (series.size() <= window) {
        throw ParameterError("series length " + std::to_string(series.size()) +
                             " is too short for window " + std::to_string(window));
    }
    std::vector<WindowPair> pairs;
    pairs.reserve(series.size() - window);
    for (std::size_t t = window; t < series.size(); ++t) {
        WindowPair p;
        p.inputs.assign(series.begin() + static_cast<std::ptrdiff_t>(t - window),
                        series.begin() + static_cast<std::ptrdiff_t>(t));
        p.target = series[t];
        pairs.push_back(std::move(p));
    }
    return pairs;
}

SeriesScaler SeriesScaler::fit(const std::vector<double>& values, std::size_t count) {
    if (count == 0 || count > values.size()) {
        throw ParameterError("SeriesScaler::fit count out of range");
    }
    SeriesScaler s;
    s.min = s.max = values[0];
    for (std::size_t k = 1; k < count; ++k) {
        s.min = std::min(s.min, values[k]);
        s.max = std::max(s.max, values[k]);
    }
    return s;
}

double SeriesScaler::scale(double x) const {
    if (max == min) return 0.0;
    return (x - min) / (max - min);
}

double SeriesScaler::unscale(double s) const { return min + s * (max - min); }

ForecastResult forecast_train(const CumulativeEventSeries& series, const TrainingConfig& cfg,
                              const ForecasterOptions& opts) {
    if (!(opts.train_fraction > 0.0 && opts.train_fraction <= 1.0)) {
        throw ParameterError("train_fraction must lie in (0, 1]");
    }

    std::vector<double> values(series.counts.begin(), series.counts.end());
    std::vector<WindowPair> pairs = make_windows(values, opts.window);

    std::size_t n_train =
        opts.train_fraction >= 1.0
            ? pairs.size()
            : static_cast<std::size_t>(
                  std::llround(opts.train_fraction * static_cast<double>(pairs.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, pairs.size());

    ForecastResult result;
    result.model.window = opts.window;
    // Scale with the data the training windows can see.
    result.model.scaler = SeriesScaler::fit(values, opts.window + n_train);

    std::vector<Example> train_ex = window_examples(pairs, 0, n_train, result.model.scaler);
    std::vector<Example> holdout_ex =
        window_examples(pairs, n_train, pairs.size(), result.model.scaler);

    Rng rng(cfg.seed);
    result.model.model.lstm = LstmParams::init(1, opts.hidden_dim, rng);
    result.model.model.head = DenseHead::init(1, opts.hidden_dim, rng);
    result.model.model.sigmoid_output = false;

    TrainingConfig task_cfg = cfg;
    task_cfg.loss = LossKind::MeanSquaredError;
    result.trace = train(result.model.model, train_ex,
                         holdout_ex.empty() ? train_ex : holdout_ex, task_cfg);

    result.first_insample_day = opts.window;
    result.first_holdout_day = opts.window + n_train;
    for (const Example& ex : train_ex) {
        result.insample.push_back(result.model.scaler.unscale(model_output(result.model.model, ex.inputs)));
    }
    for (const Example& ex : holdout_ex) {
        result.holdout.push_back(result.model.scaler.unscale(model_output(result.model.model, ex.inputs)));
    }
    return result;
}

std::vector<double> forecast_extrapolate(const ForecasterModel& m,
                                         const CumulativeEventSeries& series,
                                         std::size_t horizon) {
    if (horizon < 1) throw ParameterError("horizon must be at least 1");
    if (series.counts.size() < m.window) {
        throw ParameterError("series shorter than the forecast window");
    }

    // Rolling window of scaled values, seeded with the series tail.
    std::vector<double> window(m.window);
    for (std::size_t k = 0; k < m.window; ++k) {
        window[k] = m.scaler.scale(
            static_cast<double>(series.counts[series.counts.size() - m.window + k]));
    }

    std::vector<double> out;
    out.reserve(horizon);
    for (std::size_t step = 0; step < horizon; ++step) {
        std::vector<Vector> inputs;
        inputs.reserve(m.window);
        for (double v : window) inputs.push_back(Vector{v});
        double scaled = model_output(m.model, inputs);
        out.push_back(m.scaler.unscale(scaled));
        window.erase(window.begin());
        window.push_back(scaled);
    }
    return out;
}

std::vector<ScatterRow> explore_export(const Cohort& c, const std::string& x,
                                       const std::string& y, const std::string& hue) {
    std::vector<ScatterRow> rows;
    rows.reserve(c.records.size());
    for (const PatientRecord& r : c.records) {
        rows.push_back({feature_value(r, x), feature_value(r, y), feature_value(r, hue)});
    }
    return rows;
}

std::string scatter_table(const std::vector<ScatterRow>& rows, const std::string& x,
                          const std::string& y, const std::string& hue) {
    std::ostringstream out;
    out << x << '\t' << y << '\t' << hue << '\n';
    for (const ScatterRow& r : rows) {
        out << format_double(r.x) << '\t' << format_double(r.y) << '\t' << format_double(r.hue)
            << '\n';
    }
    return out.str();
}

std::vector<AgeBin> age_histogram(const Cohort& c, double bin_width) {
    if (!(bin_width > 0.0)) throw ParameterError("bin_width must be positive");
    if (c.records.empty()) return {};

    double min_age = c.records.front().age;
    double max_age = min_age;
    for (const PatientRecord& r : c.records) {
        min_age = std::min(min_age, r.age);
        max_age = std::max(max_age, r.age);
    }
    auto lo_bin = static_cast<std::int64_t>(std::floor(min_age / bin_width));
    auto hi_bin = static_cast<std::int64_t>(std::floor(max_age / bin_width));

    std::vector<AgeBin> bins;
    for (std::int64_t b = lo_bin; b <= hi_bin; ++b) {
        bins.push_back({static_cast<double>(b) * bin_width,
                        static_cast<double>(b + 1) * bin_width, 0});
    }
    for (const PatientRecord& r : c.records) {
        if (!r.death_event) continue;
        auto b = static_cast<std::int64_t>(std::floor(r.age / bin_width));
        bins[static_cast<std::size_t>(b - lo_bin)].deaths += 1;
    }
    return bins;
}

std::string histogram_table(const std::vector<AgeBin>& bins) {
    std::ostringstream out;
    out << "age_lo\tage_hi\tdeaths\n";
    for (const AgeBin& b : bins) {
        out << format_double(b.lo) << '\t' << format_double(b.hi) << '\t' << b.deaths << '\n';
    }
    return out.str();
}

namespace {

std::string join_names(const std::vector<std::string>& names) {
    std::string out;
    for (const std::string& n : names) {
        if (!out.empty()) out += ' ';
        out += n;
    }
    return out;
}

std::vector<std::string> split_names(const std::string& joined) {
    std::vector<std::string> names;
    std::istringstream ss(joined);
    std::string n;
    while (ss >> n) names.push_back(n);
    return names;
}

}  // namespace

void save_classifier(const ClassifierModel& m, const std::string& path) {
    Checkpoint ckpt;
    ckpt.meta.emplace_back("kind", "classifier");
    ckpt.meta.emplace_back("features", join_names(m.features));
    append_lstm_tensors(m.model.lstm, ckpt);
    ckpt.tensors.push_back(tensor_from_matrix("head_W", m.model.head.w));
    ckpt.tensors.push_back(tensor_from_vector("head_b", m.model.head.b));
    ckpt.tensors.push_back(tensor_from_vector("norm_min", m.norm.mins));
    ckpt.tensors.push_back(tensor_from_vector("norm_max", m.norm.maxs));
    save_checkpoint(ckpt, path);
}

ClassifierModel load_classifier(const std::string& path) {
    Checkpoint ckpt = load_checkpoint(path);
    if (ckpt.meta_value("kind") != "classifier") {
        throw DataError("'" + path + "' is not a classifier checkpoint");
    }
    ClassifierModel m;
    m.features = split_names(ckpt.meta_value("features"));
    m.model.lstm = lstm_from_checkpoint(ckpt);
    m.model.head.w = matrix_from_tensor(ckpt.tensor("head_W"));
    m.model.head.b = vector_from_tensor(ckpt.tensor("head_b"));
    m.model.sigmoid_output = true;
    m.norm.features = m.features;
    m.norm.mins = vector_from_tensor(ckpt.tensor("norm_min"));
    m.norm.maxs = vector_from_tensor(ckpt.tensor("norm_max"));
    return m;
}

void save_forecaster(const ForecasterModel& m, const std::string& path) {
    Checkpoint ckpt;
    ckpt.meta.emplace_back("kind", "forecaster");
    ckpt.meta.emplace_back("window", std::to_string(m.window));
    ckpt.meta.emplace_back("scaler_min", format_double(m.scaler.min));
    ckpt.meta.emplace_back("scaler_max", format_double(m.scaler.max));
    append_lstm_tensors(m.model.lstm, ckpt);
    ckpt.tensors.push_back(tensor_from_matrix("head_W", m.model.head.w));
    ckpt.tensors.push_back(tensor_from_vector("head_b", m.model.head.b));
    save_checkpoint(ckpt, path);
}

ForecasterModel load_forecaster(const std::string& path) {
    Checkpoint ckpt = load_checkpoint(path);
    if (ckpt.meta_value("kind") != "forecaster") {
        throw DataError("'" + path + "' is not a forecaster checkpoint");
    }
    ForecasterModel m;
    m.window = static_cast<std::size_t>(std::stoull(ckpt.meta_value("window")));
    m.scaler.min = std::stod(ckpt.meta_value("scaler_min"));
    m.scaler.max = std::stod(ckpt.meta_value("scaler_max"));
    m.model.lstm = lstm_from_checkpoint(ckpt);
    m.model.head.w = matrix_from_tensor(ckpt.tensor("head_W"));
    m.model.head.b = vector_from_tensor(ckpt.tensor("head_b"));
    m.model.sigmoid_output = false;
    return m;
}

}  // namespace hf
