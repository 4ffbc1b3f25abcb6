// Acceptance suite: runs each release criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hf/checkpoint.hpp"
#include "hf/dataset.hpp"
#include "hf/tasks.hpp"
#include "support.hpp"

using namespace hf;

namespace {

const std::string kData = HF_DATA_FILE;
const std::string kCli = HF_CLI_PATH;

struct Checker {
    std::vector<std::string> failures;

    void expect(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
    void expect_le(double value, double bound, const std::string& what) {
        if (!(value <= bound)) {
            std::ostringstream ss;
            ss << what << " (" << value << " > " << bound << ")";
            failures.push_back(ss.str());
        }
    }
};

int run_cli(const std::string& args) {
    std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
}

ScalarHead squared_norm_head() {
    ScalarHead head;
    head.value = [](const Vector& h) {
        double s = 0.0;
        for (double x : h) s += x * x;
        return s;
    };
    head.grad = [](const Vector& h) {
        Vector g(h.size());
        for (std::size_t i = 0; i < h.size(); ++i) g[i] = 2.0 * h[i];
        return g;
    };
    return head;
}

// ---------------------------------------------------------------- criteria

void gate_equations(Checker& c) {
    // zero-parameter closed form: f = i = o = 1/2, C = C_prev / 2, h = tanh(C) / 2
    for (double c_prev : {0.0, 2.0, -1.5, 0.3}) {
        LstmParams p = LstmParams::zeros(2, 1);
        LstmState prev{Vector{0.0}, Vector{c_prev}};
        auto [state, cache] = cell_forward(p, prev, {0.4, -0.2});
        c.expect(cache.f[0] == 0.5 && cache.i[0] == 0.5 && cache.o[0] == 0.5,
                 "gates are exactly 1/2 at zero parameters");
        c.expect_le(std::fabs(state.c[0] - 0.5 * c_prev), 1e-12, "C = C_prev / 2");
        c.expect_le(std::fabs(state.h[0] - 0.5 * std::tanh(0.5 * c_prev)), 1e-12,
                    "h = tanh(C) / 2");
    }

    // saturated forget gate with closed input gate holds the cell for 100 steps
    Rng rng(17);
    LstmParams p = LstmParams::init(3, 4, rng);
    for (double& b : p.b_f) b = 40.0;
    for (double& b : p.b_i) b = -40.0;
    LstmState state{Vector(4, 0.0), Vector{1.25, -0.75, 0.5, 2.0}};
    for (int step = 0; step < 100; ++step) {
        Vector x{0.3, -0.9, 0.5};
        auto [next, cache] = cell_forward(p, state, x);
        for (std::size_t k = 0; k < 4; ++k) {
            c.expect_le(std::fabs(next.c[k] - state.c[k]), 1e-9, "saturated C drift per step");
        }
        state = next;
    }
}

void bptt_vs_finite_differences(Checker& c) {
    ScalarHead head = squared_norm_head();
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Rng rng(seed);
        std::size_t hidden = 1 + rng.below(8);
        std::size_t input = 1 + rng.below(8);
        std::size_t steps = 1 + rng.below(10);

        LstmParams p = LstmParams::init(input, hidden, rng);
        std::vector<Vector> xs(steps, Vector(input));
        for (Vector& x : xs) {
            for (double& v : x) v = rng.uniform(-1.0, 1.0);
        }

        auto [state, caches] = sequence_forward(p, LstmState::zero(hidden), xs);
        LstmGrads analytic = bptt(p, caches, head.grad(state.h));

        auto eval = [&]() {
            auto [s, cs] = sequence_forward(p, LstmState::zero(hidden), xs);
            return head.value(s.h);
        };
        struct Item {
            const char* name;
            std::vector<double>* span;
            const std::vector<double>* grad;
        };
        Item items[] = {
            {"W_f", &p.w_f.data(), &analytic.w_f.data()},
            {"W_i", &p.w_i.data(), &analytic.w_i.data()},
            {"W_c", &p.w_c.data(), &analytic.w_c.data()},
            {"W_o", &p.w_o.data(), &analytic.w_o.data()},
            {"b_f", &p.b_f, &analytic.b_f},
            {"b_i", &p.b_i, &analytic.b_i},
            {"b_c", &p.b_c, &analytic.b_c},
            {"b_o", &p.b_o, &analytic.b_o},
        };
        for (Item& item : items) {
            std::vector<double> numeric = hfts::central_differences(eval, *item.span, 1e-5);
            c.expect_le(hfts::max_rel_err(*item.grad, numeric), 1e-5,
                        "seed " + std::to_string(seed) + " tensor " + item.name);
        }
    }
}

void dataset_fidelity(Checker& c) {
    Cohort cohort = load_cohort(kData, /*strict=*/true);
    c.expect(cohort.records.size() == 299, "299 records");
    c.expect(cohort.source_rows == 299, "source row count");

    CohortStats stats = cohort_stats(cohort);
    c.expect(stats.women == 105, "105 records with sex=0");
    c.expect(stats.men == 194, "194 records with sex=1");
    c.expect(stats.features[0].min == 40.0 && stats.features[0].max == 95.0,
             "age spans [40, 95]");
}

void table1_golden_rows(Checker& c) {
    hfts::TempDir dir;
    std::string path = dir.file("table1.csv");
    hfts::write_file(path, hfts::kEightRowCsv);
    Cohort cohort = load_cohort(path, true);
    c.expect(cohort.records.size() == 8, "eight rows parse");

    const PatientRecord& r = cohort.records[0];
    c.expect(r.age == 75 && !r.anaemia && r.creatinine_phosphokinase == 582 && !r.diabetes &&
                 r.ejection_fraction == 20 && r.high_blood_pressure && r.platelets == 265000 &&
                 r.serum_creatinine == 1.9 && r.serum_sodium == 130 && r.sex && !r.smoking &&
                 r.time == 4 && r.death_event,
             "row 1 exact values");
    c.expect(cohort.records[1].creatinine_phosphokinase == 7861 &&
                 cohort.records[4].serum_creatinine == 2.7 && !cohort.records[4].sex &&
                 cohort.records[5].age == 90 && cohort.records[7].ejection_fraction == 60,
             "spot values across the eight rows");

    CumulativeEventSeries series = build_cumulative_series(cohort);
    c.expect(series.counts[10] == 8, "cumulative deaths at day 10");
    c.expect(series.counts[7] == 4, "cumulative deaths at day 7");
}

void classifier_learnability(Checker& c) {
    Cohort cohort = load_cohort(kData, true);

    std::size_t deaths = 0;
    for (const PatientRecord& r : cohort.records) deaths += r.death_event;
    double baseline = static_cast<double>(std::max(deaths, cohort.records.size() - deaths)) /
                      static_cast<double>(cohort.records.size());

    TrainingConfig cfg;  // defaults: adam, lr 1e-3, 200 epochs, batch 16
    cfg.seed = 1;
    ClassifierOptions opts;  // defaults: hidden 16, no follow-up time

    auto mean_cv_accuracy = [&](const Cohort& data) {
        auto folds = stratified_kfold(data, 5, cfg.seed);
        double total = 0.0;
        for (auto& [train_c, test_c] : folds) {
            auto [model, trace] = classify_train(train_c, test_c, cfg, opts);
            total += classify_eval(model, test_c, 0.5).accuracy;
        }
        return total / 5.0;
    };

    double accuracy = mean_cv_accuracy(cohort);
    std::cerr << "  [classifier] 5-fold mean accuracy " << accuracy << " vs baseline " << baseline
              << "\n";
    c.expect(accuracy > baseline, "5-fold mean accuracy beats the majority-class baseline");

    // permutation control: shuffled labels stay near the baseline
    Cohort shuffled = cohort;
    std::vector<bool> labels;
    for (const PatientRecord& r : shuffled.records) labels.push_back(r.death_event);
    Rng rng(cfg.seed);
    rng.shuffle(labels);
    for (std::size_t i = 0; i < labels.size(); ++i) shuffled.records[i].death_event = labels[i];

    double control = mean_cv_accuracy(shuffled);
    std::cerr << "  [classifier] permutation control accuracy " << control << "\n";
    c.expect(std::fabs(control - baseline) <= 0.15,
             "label-shuffled accuracy stays within 0.15 of the baseline");
}

void forecast_trend(Checker& c) {
    // all-data mode over the shipped cohort
    Cohort cohort = load_cohort(kData, true);
    CumulativeEventSeries series = build_cumulative_series(cohort);

    std::size_t deaths = 0;
    for (const PatientRecord& r : cohort.records) deaths += r.death_event;

    for (std::size_t d = 1; d < series.days(); ++d) {
        c.expect(series.counts[d] >= series.counts[d - 1], "historical series nondecreasing");
    }
    c.expect(series.total() == static_cast<std::int64_t>(deaths),
             "historical series ends at the total death count");

    TrainingConfig cfg;
    cfg.seed = 1;
    ForecasterOptions opts;  // defaults: window 10, hidden 32
    opts.train_fraction = 1.0;
    ForecastResult fit = forecast_train(series, cfg, opts);
    c.expect(!fit.insample.empty() && fit.insample.back() >= fit.insample.front(),
             "fitted in-sample curve ends at or above its start");

    // synthetic linear trend: closed-loop extrapolation within 5% of range per step
    CumulativeEventSeries linear;
    for (int i = 0; i < 80; ++i) linear.counts.push_back(i);

    TrainingConfig lin_cfg;
    lin_cfg.seed = 2;
    lin_cfg.epochs = 400;
    lin_cfg.learning_rate = 0.01;
    ForecasterOptions lin_opts;
    lin_opts.window = 8;
    lin_opts.hidden_dim = 16;
    lin_opts.train_fraction = 1.0;
    ForecastResult lin = forecast_train(linear, lin_cfg, lin_opts);
    std::vector<double> future = forecast_extrapolate(lin.model, linear, 5);
    c.expect(future.size() == 5, "extrapolation length equals the horizon");
    double range = 79.0;
    for (std::size_t k = 0; k < future.size(); ++k) {
        double expected = 80.0 + static_cast<double>(k);
        c.expect_le(std::fabs(future[k] - expected), 0.05 * range,
                    "linear extrapolation step " + std::to_string(k));
    }
}

void determinism(Checker& c) {
    hfts::TempDir dir;
    std::string a = (dir.path / "a").string();
    std::string b = (dir.path / "b").string();

    std::string cls = "train-classifier --input " + kData + " --epochs 25 --seed 11 --out ";
    c.expect(run_cli(cls + a) == 0, "classifier run A succeeds");
    c.expect(run_cli(cls + b) == 0, "classifier run B succeeds");
    for (const char* name : {"trace.tsv", "checkpoint.ckpt", "confusion.tsv"}) {
        c.expect(hfts::read_file(a + "/" + name) == hfts::read_file(b + "/" + name),
                 std::string("classifier ") + name + " byte-identical");
    }

    std::string fa = (dir.path / "fa").string();
    std::string fb = (dir.path / "fb").string();
    std::string fc = "forecast --input " + kData + " --mode all-data --epochs 10 --seed 11 "
                     "--horizon 20 --out ";
    c.expect(run_cli(fc + fa) == 0, "forecast run A succeeds");
    c.expect(run_cli(fc + fb) == 0, "forecast run B succeeds");
    for (const char* name : {"series.tsv", "trace.tsv", "checkpoint.ckpt"}) {
        c.expect(hfts::read_file(fa + "/" + name) == hfts::read_file(fb + "/" + name),
                 std::string("forecast ") + name + " byte-identical");
    }
}

void metric_structure(Checker& c) {
    Cohort cohort = load_cohort(kData, true);
    auto [train_c, test_c] = split(cohort, 0.2, 7);

    TrainingConfig cfg;
    cfg.seed = 7;
    cfg.epochs = 40;
    ClassifierOptions opts;
    opts.hidden_dim = 8;
    auto [model, trace] = classify_train(train_c, test_c, cfg, opts);

    std::size_t prev_positives = test_c.records.size() + 1;
    for (double threshold : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
        EvalResult res = classify_eval(model, test_c, threshold);
        c.expect(res.matrix.total() == test_c.records.size(),
                 "confusion matrix sums to the evaluation-set size");
        std::size_t positives = res.matrix.tp + res.matrix.fp;
        c.expect(positives <= prev_positives, "raising the threshold never adds positives");
        prev_positives = positives;
    }
}

struct Criterion {
    std::string name;
    double budget_seconds;  // 0 = no stated budget
    std::function<void(Checker&)> run;
};

}  // namespace

int main() {
    std::vector<Criterion> criteria = {
        {"gate-equation correctness", 1.0, gate_equations},
        {"bptt vs finite-difference oracle", 30.0, bptt_vs_finite_differences},
        {"dataset fidelity", 1.0, dataset_fidelity},
        {"table-1 golden rows", 1.0, table1_golden_rows},
        {"classifier learnability", 300.0, classifier_learnability},
        {"forecast trend property", 120.0, forecast_trend},
        {"determinism", 0.0, determinism},
        {"structural metric properties", 0.0, metric_structure},
    };

    int failed = 0;
    for (Criterion& criterion : criteria) {
        Checker checker;
        auto start = std::chrono::steady_clock::now();
        try {
            criterion.run(checker);
        } catch (const std::exception& e) {
            checker.failures.push_back(std::string("exception: ") + e.what());
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (criterion.budget_seconds > 0.0 && elapsed > criterion.budget_seconds) {
            std::ostringstream ss;
            ss << "runtime " << elapsed << " s exceeds budget " << criterion.budget_seconds
               << " s";
            checker.failures.push_back(ss.str());
        }

        std::ostringstream line;
        line.setf(std::ios::fixed);
        line.precision(2);
        if (checker.failures.empty()) {
            line << "PASS  " << criterion.name << "  (" << elapsed << " s)";
            std::cout << line.str() << "\n";
        } else {
            ++failed;
            line << "FAIL  " << criterion.name << "  (" << elapsed << " s)";
            std::cout << line.str() << "\n";
            for (const std::string& f : checker.failures) std::cout << "      - " << f << "\n";
        }
    }

    std::cout << (failed == 0 ? "all criteria passed" : "criteria failed") << "\n";
    return failed == 0 ? 0 : 1;
}
