#include "hf/lstm.hpp"

#include <cmath>
#include <string>

namespace hf {

namespace {

void check_input_dim(const LstmParams& p, const Vector& x) {
    if (x.size() != p.input_dim) {
        throw ShapeError("input length " + std::to_string(x.size()) +
                         " does not match input_dim " + std::to_string(p.input_dim));
    }
}

void check_state_dim(const LstmParams& p, const LstmState& s) {
    if (s.h.size() != p.hidden_dim || s.c.size() != p.hidden_dim) {
        throw ShapeError("state dims h=" + std::to_string(s.h.size()) +
                         " c=" + std::to_string(s.c.size()) + " do not match hidden_dim " +
                         std::to_string(p.hidden_dim));
    }
}

double max_rel_err_span(const std::vector<double>& analytic, const std::vector<double>& numeric) {
    double worst = 0.0;
    for (std::size_t k = 0; k < analytic.size(); ++k) {
        double a = analytic[k];
        double n = numeric[k];
        double denom = std::max({std::fabs(a), std::fabs(n), 1e-8});
        worst = std::max(worst, std::fabs(a - n) / denom);
    }
    return worst;
}

}  // namespace

LstmParams LstmParams::zeros(std::size_t input_dim, std::size_t hidden_dim) {
    LstmParams p;
    p.input_dim = input_dim;
    p.hidden_dim = hidden_dim;
    std::size_t cols = hidden_dim + input_dim;
    p.w_f = Matrix(hidden_dim, cols);
    p.w_i = Matrix(hidden_dim, cols);
    p.w_c = Matrix(hidden_dim, cols);
    p.w_o = Matrix(hidden_dim, cols);
    p.b_f = Vector(hidden_dim, 0.0);
    p.b_i = Vector(hidden_dim, 0.0);
    p.b_c = Vector(hidden_dim, 0.0);
    p.b_o = Vector(hidden_dim, 0.0);
    return p;
}

LstmParams LstmParams::init(std::size_t input_dim, std::size_t hidden_dim, Rng& rng) {
    LstmParams p = zeros(input_dim, hidden_dim);
    std::size_t cols = hidden_dim + input_dim;
    double bound = 1.0 / std::sqrt(static_cast<double>(cols));
    p.w_f = rand_uniform(rng, hidden_dim, cols, -bound, bound);
    p.w_i = rand_uniform(rng, hidden_dim, cols, -bound, bound);
    p.w_c = rand_uniform(rng, hidden_dim, cols, -bound, bound);
    p.w_o = rand_uniform(rng, hidden_dim, cols, -bound, bound);
    return p;
}

LstmGrads LstmGrads::zeros_like(const LstmParams& p) {
    LstmGrads g;
    std::size_t cols = p.hidden_dim + p.input_dim;
    g.w_f = Matrix(p.hidden_dim, cols);
    g.w_i = Matrix(p.hidden_dim, cols);
    g.w_c = Matrix(p.hidden_dim, cols);
    g.w_o = Matrix(p.hidden_dim, cols);
    g.b_f = Vector(p.hidden_dim, 0.0);
    g.b_i = Vector(p.hidden_dim, 0.0);
    g.b_c = Vector(p.hidden_dim, 0.0);
    g.b_o = Vector(p.hidden_dim, 0.0);
    return g;
}

void LstmGrads::scale(double s) {
    for (Matrix* m : {&w_f, &w_i, &w_c, &w_o}) {
        for (double& x : m->data()) x *= s;
    }
    for (Vector* v : {&b_f, &b_i, &b_c, &b_o}) {
        for (double& x : *v) x *= s;
    }
}

std::pair<LstmState, StepCache> cell_forward(const LstmParams& p, const LstmState& prev,
                                             const Vector& x) {
    check_input_dim(p, x);
    check_state_dim(p, prev);

    StepCache cache;
    cache.x = x;
    cache.z = concat(prev.h, x);
    cache.c_prev = prev.c;
    cache.f = sigmoid(add(matvec(p.w_f, cache.z), p.b_f));
    cache.i = sigmoid(add(matvec(p.w_i, cache.z), p.b_i));
    cache.c_bar = tanh_v(add(matvec(p.w_c, cache.z), p.b_c));
    cache.c = add(hadamard(cache.f, prev.c), hadamard(cache.i, cache.c_bar));
    cache.o = sigmoid(add(matvec(p.w_o, cache.z), p.b_o));
    cache.tanh_c = tanh_v(cache.c);
    cache.h = hadamard(cache.o, cache.tanh_c);

    LstmState next{cache.h, cache.c};
    return {std::move(next), std::move(cache)};
}

std::pair<LstmState, std::vector<StepCache>> sequence_forward(const LstmParams& p,
                                                              const LstmState& init,
                                                              const std::vector<Vector>& xs) {
    check_state_dim(p, init);
    LstmState state = init;
    std::vector<StepCache> caches;
    caches.reserve(xs.size());
    for (const Vector& x : xs) {
        auto [next, cache] = cell_forward(p, state, x);
        state = std::move(next);
        caches.push_back(std::move(cache));
    }
    return {std::move(state), std::move(caches)};
}

LstmGrads bptt(const LstmParams& p, const std::vector<StepCache>& caches, const Vector& d_h_last) {
    if (caches.empty()) throw ParameterError("bptt requires at least one cached timestep");
    if (d_h_last.size() != p.hidden_dim) {
        throw ShapeError("d_h_last length " + std::to_string(d_h_last.size()) +
                         " does not match hidden_dim " + std::to_string(p.hidden_dim));
    }

    LstmGrads g = LstmGrads::zeros_like(p);
    std::size_t h = p.hidden_dim;

    Vector dh = d_h_last;
    Vector dc_next(h, 0.0);

    for (std::size_t t = caches.size(); t-- > 0;) {
        const StepCache& s = caches[t];

        // h = o . tanh(c)
        Vector d_o = hadamard(dh, s.tanh_c);
        Vector dc(h);
        for (std::size_t k = 0; k < h; ++k) {
            dc[k] = dh[k] * s.o[k] * (1.0 - s.tanh_c[k] * s.tanh_c[k]) + dc_next[k];
        }

        // c = f . c_prev + i . c_bar
        Vector d_f = hadamard(dc, s.c_prev);
        Vector d_i = hadamard(dc, s.c_bar);
        Vector d_c_bar = hadamard(dc, s.i);

        // back through the gate nonlinearities to the pre-activations
        Vector a_f(h), a_i(h), a_c(h), a_o(h);
        for (std::size_t k = 0; k < h; ++k) {
            a_f[k] = d_f[k] * s.f[k] * (1.0 - s.f[k]);
            a_i[k] = d_i[k] * s.i[k] * (1.0 - s.i[k]);
            a_c[k] = d_c_bar[k] * (1.0 - s.c_bar[k] * s.c_bar[k]);
            a_o[k] = d_o[k] * s.o[k] * (1.0 - s.o[k]);
        }

        add_outer(g.w_f, a_f, s.z);
        add_outer(g.w_i, a_i, s.z);
        add_outer(g.w_c, a_c, s.z);
        add_outer(g.w_o, a_o, s.z);
        g.b_f = add(g.b_f, a_f);
        g.b_i = add(g.b_i, a_i);
        g.b_c = add(g.b_c, a_c);
        g.b_o = add(g.b_o, a_o);

        // gradient into the concatenated input; its first h entries feed h_prev
        Vector dz = matvec_transposed(p.w_f, a_f);
        dz = add(dz, matvec_transposed(p.w_i, a_i));
        dz = add(dz, matvec_transposed(p.w_c, a_c));
        dz = add(dz, matvec_transposed(p.w_o, a_o));

        dh.assign(dz.begin(), dz.begin() + static_cast<std::ptrdiff_t>(h));
        dc_next = hadamard(dc, s.f);
    }

    return g;
}

bool GradCheckReport::passed() const {
    for (const GradCheckEntry& e : entries) {
        if (!(e.max_rel_err <= tolerance)) return false;
    }
    return true;
}

GradCheckReport grad_check(const LstmParams& p, const std::vector<Vector>& xs,
                           const ScalarHead& head, double epsilon, double tolerance,
                           bool corrupt_wf) {
    LstmState init = LstmState::zero(p.hidden_dim);

    auto loss_of = [&](const LstmParams& params) {
        auto [state, caches] = sequence_forward(params, init, xs);
        (void)caches;
        return head.value(state.h);
    };

    auto [state, caches] = sequence_forward(p, init, xs);
    LstmGrads analytic = bptt(p, caches, head.grad(state.h));
    if (corrupt_wf) {
        for (double& x : analytic.w_f.data()) x *= 2.0;
    }

    // Numeric side: central differences through a full re-run per parameter.
    LstmParams probe = p;
    auto numeric_span = [&](std::vector<double>& values) {
        std::vector<double> num(values.size());
        for (std::size_t k = 0; k < values.size(); ++k) {
            double saved = values[k];
            values[k] = saved + epsilon;
            double up = loss_of(probe);
            values[k] = saved - epsilon;
            double down = loss_of(probe);
            values[k] = saved;
            num[k] = (up - down) / (2.0 * epsilon);
        }
        return num;
    };

    GradCheckReport report;
    report.tolerance = tolerance;

    struct TensorRef {
        const char* name;
        std::vector<double>* values;
        const std::vector<double>* analytic;
    };
    const TensorRef tensors[] = {
        {"W_f", &probe.w_f.data(), &analytic.w_f.data()},
        {"W_i", &probe.w_i.data(), &analytic.w_i.data()},
        {"W_c", &probe.w_c.data(), &analytic.w_c.data()},
        {"W_o", &probe.w_o.data(), &analytic.w_o.data()},
        {"b_f", &probe.b_f, &analytic.b_f},
        {"b_i", &probe.b_i, &analytic.b_i},
        {"b_c", &probe.b_c, &analytic.b_c},
        {"b_o", &probe.b_o, &analytic.b_o},
    };
    for (const TensorRef& t : tensors) {
        std::vector<double> numeric = numeric_span(*t.values);
        report.entries.push_back({t.name, max_rel_err_span(*t.analytic, numeric)});
    }
    return report;
}

}  // namespace hf
