#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hf/dataset.hpp"
#include "hf/training.hpp"

namespace hf {

struct ConfusionMatrix {
    std::size_t tn = 0, fp = 0, fn = 0, tp = 0;

    std::size_t total() const { return tn + fp + fn + tp; }
    double accuracy() const {
        return total() == 0 ? 0.0 : static_cast<double>(tn + tp) / static_cast<double>(total());
    }
};

/// Tab-separated matrix with header: tn, fp, fn, tp.
std::string confusion_table(const ConfusionMatrix& m);

struct ClassifierOptions {
    std::size_t hidden_dim = 16;
    bool time_as_feature = false;  // follow-up time leaks outcome information
};

/// Death-event classifier: each patient is one single-timestep sequence whose
/// input is the normalized feature row.
struct ClassifierModel {
    SequenceModel model;
    NormalizationSpec norm;
    std::vector<std::string> features;
};

/// Trains on `train` with binary cross entropy against death_event; the trace's
/// test loss column is computed on `eval` (pass the training cohort again when
/// there is no holdout).
std::pair<ClassifierModel, TrainingTrace> classify_train(const Cohort& train, const Cohort& eval,
                                                         const TrainingConfig& cfg,
                                                         const ClassifierOptions& opts);

/// Death probability for one record.
double classify_prob(const ClassifierModel& m, const PatientRecord& r);

struct EvalResult {
    ConfusionMatrix matrix;
    double accuracy = 0.0;
};

/// Predicts 1 iff probability >= threshold; threshold must lie in (0, 1).
EvalResult classify_eval(const ClassifierModel& m, const Cohort& cohort, double threshold);

/// Deterministic stratified folds for cross-validation; every record appears
/// in exactly one test fold.
std::vector<std::pair<Cohort, Cohort>> stratified_kfold(const Cohort& c, std::size_t k,
                                                        std::uint64_t seed);

/// One supervised window: the `window` values before t as inputs, value at t
/// as target, unscaled.
struct WindowPair {
    Vector inputs;
    double target = 0.0;
};

/// Sliding windows (s[t-w..t-1] -> s[t]) over the raw series values.
/// Requires series length > window.
std::vector<WindowPair> make_windows(const std::vector<double>& series, std::size_t window);

/// Min-max scaling fitted on the training portion of a series; zero-span
/// series map to 0.
struct SeriesScaler {
    double min = 0.0;
    double max = 0.0;

    static SeriesScaler fit(const std::vector<double>& values, std::size_t count);
    double scale(double x) const;
    double unscale(double s) const;
};

struct ForecasterOptions {
    std::size_t window = 10;
    std::size_t hidden_dim = 32;
    double train_fraction = 0.67;  // 1.0 trains on every window
};

/// Trend forecaster over the cumulative event series: input_dim 1, linear head.
struct ForecasterModel {
    SequenceModel model;
    SeriesScaler scaler;
    std::size_t window = 0;
};

struct ForecastResult {
    ForecasterModel model;
    TrainingTrace trace;
    std::vector<double> insample;     // one-step predictions over training windows
    std::vector<double> holdout;      // one-step predictions over held-out windows
    std::size_t first_insample_day = 0;
    std::size_t first_holdout_day = 0;
};

/// Trains with squared error on the first train_fraction of windows and
/// predicts one step ahead over the rest; predictions come back in original
/// units. train_fraction 1.0 leaves the holdout empty.
ForecastResult forecast_train(const CumulativeEventSeries& series, const TrainingConfig& cfg,
                              const ForecasterOptions& opts);

/// Closed-loop extrapolation past the series end: each prediction feeds the
/// next window. Returns exactly `horizon` values in original units.
std::vector<double> forecast_extrapolate(const ForecasterModel& m,
                                         const CumulativeEventSeries& series,
                                         std::size_t horizon);

struct ScatterRow {
    double x = 0.0, y = 0.0, hue = 0.0;
};

/// One row per record, (x, y, hue) projected from the named features.
std::vector<ScatterRow> explore_export(const Cohort& c, const std::string& x,
                                       const std::string& y, const std::string& hue);

/// Tab-separated scatter table with the feature names as header.
std::string scatter_table(const std::vector<ScatterRow>& rows, const std::string& x,
                          const std::string& y, const std::string& hue);

struct AgeBin {
    double lo = 0.0, hi = 0.0;  // [lo, hi)
    std::size_t deaths = 0;
};

/// Death-event counts by age bin; bins are aligned to multiples of bin_width
/// and cover the cohort's age range.
std::vector<AgeBin> age_histogram(const Cohort& c, double bin_width);

std::string histogram_table(const std::vector<AgeBin>& bins);

/// Full-model checkpoints (LSTM tensors, head, normalization or scaler, and
/// the flags needed to rebuild the model).
void save_classifier(const ClassifierModel& m, const std::string& path);
ClassifierModel load_classifier(const std::string& path);
void save_forecaster(const ForecasterModel& m, const std::string& path);
ForecasterModel load_forecaster(const std::string& path);

}  // namespace hf
