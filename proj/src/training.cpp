#include "hf/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hf/checkpoint.hpp"
#include "hf/errors.hpp"

namespace hf {

namespace {

constexpr double kProbClamp = 1e-12;

double sigmoid_scalar(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

struct ModelGrads {
    LstmGrads lstm;
    Matrix head_w;
    Vector head_b;

    static ModelGrads zeros_like(const SequenceModel& m) {
        ModelGrads g;
        g.lstm = LstmGrads::zeros_like(m.lstm);
        g.head_w = Matrix(m.head.w.rows(), m.head.w.cols());
        g.head_b = Vector(m.head.b.size(), 0.0);
        return g;
    }

    void scale(double s) {
        lstm.scale(s);
        for (double& x : head_w.data()) x *= s;
        for (double& x : head_b) x *= s;
    }
};

void accumulate(LstmGrads& dst, const LstmGrads& src) {
    const std::pair<std::vector<double>*, const std::vector<double>*> spans[] = {
        {&dst.w_f.data(), &src.w_f.data()}, {&dst.w_i.data(), &src.w_i.data()},
        {&dst.w_c.data(), &src.w_c.data()}, {&dst.w_o.data(), &src.w_o.data()},
        {&dst.b_f, &src.b_f},               {&dst.b_i, &src.b_i},
        {&dst.b_c, &src.b_c},               {&dst.b_o, &src.b_o},
    };
    for (auto [d, s] : spans) {
        for (std::size_t k = 0; k < d->size(); ++k) (*d)[k] += (*s)[k];
    }
}

// The ten trainable tensors in a fixed order shared by grads and moments.
std::vector<std::vector<double>*> tensor_refs(SequenceModel& m) {
    return {&m.lstm.w_f.data(), &m.lstm.w_i.data(), &m.lstm.w_c.data(), &m.lstm.w_o.data(),
            &m.lstm.b_f,        &m.lstm.b_i,        &m.lstm.b_c,        &m.lstm.b_o,
            &m.head.w.data(),   &m.head.b};
}

std::vector<const std::vector<double>*> tensor_refs(const ModelGrads& g) {
    return {&g.lstm.w_f.data(), &g.lstm.w_i.data(), &g.lstm.w_c.data(), &g.lstm.w_o.data(),
            &g.lstm.b_f,        &g.lstm.b_i,        &g.lstm.b_c,        &g.lstm.b_o,
            &g.head_w.data(),   &g.head_b};
}

// Scalar forward pass. Fills h_last/caches for the backward pass when asked.
double forward_example(const SequenceModel& m, const std::vector<Vector>& inputs,
                       std::vector<StepCache>* caches_out, Vector* h_out) {
    auto [state, caches] = sequence_forward(m.lstm, LstmState::zero(m.lstm.hidden_dim), inputs);
    Vector a = add(matvec(m.head.w, state.h), m.head.b);
    if (caches_out) *caches_out = std::move(caches);
    if (h_out) *h_out = state.h;
    double raw = a[0];
    return m.sigmoid_output ? sigmoid_scalar(raw) : raw;
}

// Loss and dloss/d(readout) for one example output.
std::pair<double, double> loss_at(const SequenceModel& m, double output, double target,
                                  LossKind kind) {
    if (kind == LossKind::BinaryCrossEntropy) {
        auto [loss, dldp] = bce_loss(output, target);
        double da = m.sigmoid_output ? dldp * output * (1.0 - output) : dldp;
        return {loss, da};
    }
    return mse_loss(output, target);
}

}  // namespace

DenseHead DenseHead::init(std::size_t out_dim, std::size_t hidden_dim, Rng& rng) {
    double bound = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
    DenseHead head;
    head.w = rand_uniform(rng, out_dim, hidden_dim, -bound, bound);
    head.b = Vector(out_dim, 0.0);
    return head;
}

std::string trace_table(const TrainingTrace& trace) {
    std::ostringstream out;
    out << "epoch\ttrain_loss\ttest_loss\n";
    for (const EpochRecord& e : trace.epochs) {
        out << e.epoch << '\t' << format_double(e.train_loss) << '\t'
            << format_double(e.test_loss) << '\n';
    }
    return out.str();
}

std::pair<double, double> bce_loss(double p, double y) {
    double q = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
    double loss = -(y * std::log(q) + (1.0 - y) * std::log(1.0 - q));
    double dldp = -y / q + (1.0 - y) / (1.0 - q);
    return {loss, dldp};
}

std::pair<double, double> mse_loss(double yhat, double y) {
    double r = yhat - y;
    return {r * r, 2.0 * r};
}

void sgd_step(std::vector<double>& values, const std::vector<double>& grads,
              double learning_rate) {
    if (values.size() != grads.size()) {
        throw ShapeError("sgd_step length mismatch: " + std::to_string(values.size()) + " vs " +
                         std::to_string(grads.size()));
    }
    for (std::size_t k = 0; k < values.size(); ++k) values[k] -= learning_rate * grads[k];
}

void adam_step(std::vector<double>& values, const std::vector<double>& grads, AdamSlot& slot,
               std::size_t step, const TrainingConfig& cfg) {
    if (values.size() != grads.size()) {
        throw ShapeError("adam_step length mismatch: " + std::to_string(values.size()) + " vs " +
                         std::to_string(grads.size()));
    }
    if (slot.m.empty()) {
        slot.m.assign(values.size(), 0.0);
        slot.v.assign(values.size(), 0.0);
    }
    double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
    double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
    for (std::size_t k = 0; k < values.size(); ++k) {
        slot.m[k] = cfg.beta1 * slot.m[k] + (1.0 - cfg.beta1) * grads[k];
        slot.v[k] = cfg.beta2 * slot.v[k] + (1.0 - cfg.beta2) * grads[k] * grads[k];
        double m_hat = slot.m[k] / bc1;
        double v_hat = slot.v[k] / bc2;
        values[k] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
    }
}

double model_output(const SequenceModel& m, const std::vector<Vector>& inputs) {
    return forward_example(m, inputs, nullptr, nullptr);
}

double evaluate_loss(const SequenceModel& m, const std::vector<Example>& data, LossKind loss) {
    if (data.empty()) throw ParameterError("evaluate_loss requires a nonempty set");
    double total = 0.0;
    for (const Example& ex : data) {
        double out = forward_example(m, ex.inputs, nullptr, nullptr);
        total += loss_at(m, out, ex.target, loss).first;
    }
    return total / static_cast<double>(data.size());
}

TrainingTrace train(SequenceModel& model, const std::vector<Example>& data,
                    const std::vector<Example>& eval_data, const TrainingConfig& cfg) {
    if (data.empty()) throw ParameterError("train requires a nonempty data set");
    if (!(cfg.learning_rate > 0.0)) throw ParameterError("learning_rate must be positive");
    if (cfg.epochs < 1) throw ParameterError("epochs must be at least 1");
    if (cfg.batch_size < 1) throw ParameterError("batch_size must be at least 1");

    const std::vector<Example>& eval_set = eval_data.empty() ? data : eval_data;

    std::vector<AdamSlot> slots(tensor_refs(model).size());
    std::size_t opt_step = 0;

    Rng rng(cfg.seed);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);

    TrainingTrace trace;
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        rng.shuffle(order);

        double loss_sum = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_index) {
            std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            ModelGrads grads = ModelGrads::zeros_like(model);
            double batch_loss = 0.0;

            for (std::size_t k = start; k < stop; ++k) {
                const Example& ex = data[order[k]];
                std::vector<StepCache> caches;
                Vector h_last;
                double out = forward_example(model, ex.inputs, &caches, &h_last);
                auto [loss, d_a] = loss_at(model, out, ex.target, cfg.loss);
                batch_loss += loss;

                add_outer(grads.head_w, Vector{d_a}, h_last);
                grads.head_b[0] += d_a;
                Vector d_h(model.lstm.hidden_dim);
                for (std::size_t j = 0; j < d_h.size(); ++j) d_h[j] = d_a * model.head.w(0, j);

                if (!caches.empty()) {
                    accumulate(grads.lstm, bptt(model.lstm, caches, d_h));
                }
            }

            double count = static_cast<double>(stop - start);
            batch_loss /= count;
            if (!std::isfinite(batch_loss)) {
                throw NumericalError("non-finite loss at epoch " + std::to_string(epoch) +
                                     ", batch " + std::to_string(batch_index));
            }
            loss_sum += batch_loss * count;
            grads.scale(1.0 / count);

            ++opt_step;
            auto values = tensor_refs(model);
            auto gvals = tensor_refs(static_cast<const ModelGrads&>(grads));
            for (std::size_t t = 0; t < values.size(); ++t) {
                if (cfg.optimizer == OptimizerKind::Adam) {
                    adam_step(*values[t], *gvals[t], slots[t], opt_step, cfg);
                } else {
                    sgd_step(*values[t], *gvals[t], cfg.learning_rate);
                }
            }
        }

        double train_loss = loss_sum / static_cast<double>(data.size());
        double test_loss = evaluate_loss(model, eval_set, cfg.loss);
        if (!std::isfinite(train_loss) || !std::isfinite(test_loss)) {
            throw NumericalError("non-finite epoch loss at epoch " + std::to_string(epoch));
        }
        trace.epochs.push_back({epoch, train_loss, test_loss});
    }
    return trace;
}

}  // namespace hf
