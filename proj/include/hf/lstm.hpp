#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "hf/numerics.hpp"

namespace hf {

/// Weights and biases of one LSTM cell. The four gate matrices act on the
/// concatenation [h_prev, x], so each is hidden_dim x (hidden_dim + input_dim).
struct LstmParams {
    std::size_t input_dim = 0;
    std::size_t hidden_dim = 0;
    Matrix w_f, w_i, w_c, w_o;
    Vector b_f, b_i, b_c, b_o;

    /// Zero-initialized parameters of the given shape.
    static LstmParams zeros(std::size_t input_dim, std::size_t hidden_dim);

    /// Weights uniform in [-1/sqrt(hidden+input), +1/sqrt(hidden+input)],
    /// biases zero.
    static LstmParams init(std::size_t input_dim, std::size_t hidden_dim, Rng& rng);
};

/// Recurrent state carried between timesteps.
struct LstmState {
    Vector h;
    Vector c;

    static LstmState zero(std::size_t hidden_dim) {
        return LstmState{Vector(hidden_dim, 0.0), Vector(hidden_dim, 0.0)};
    }
};

/// Every intermediate of one forward step, kept for the backward pass.
struct StepCache {
    Vector x;       // input at this step
    Vector z;       // concat(h_prev, x)
    Vector f;       // forget gate, in (0,1)
    Vector i;       // input gate, in (0,1)
    Vector c_bar;   // candidate state, in (-1,1)
    Vector c_prev;  // cell state entering the step
    Vector c;       // cell state leaving the step
    Vector o;       // output gate, in (0,1)
    Vector tanh_c;  // tanh of the new cell state
    Vector h;       // hidden state leaving the step
};

/// One gradient tensor per LstmParams field, shape-matched.
struct LstmGrads {
    Matrix w_f, w_i, w_c, w_o;
    Vector b_f, b_i, b_c, b_o;

    static LstmGrads zeros_like(const LstmParams& p);
    void scale(double s);
};

/// One gated step:
///   f = sigmoid(W_f [h_prev, x] + b_f)
///   i = sigmoid(W_i [h_prev, x] + b_i)
///   c_bar = tanh(W_c [h_prev, x] + b_c)
///   c = f . c_prev + i . c_bar
///   o = sigmoid(W_o [h_prev, x] + b_o)
///   h = o . tanh(c)
std::pair<LstmState, StepCache> cell_forward(const LstmParams& p, const LstmState& prev,
                                             const Vector& x);

/// Left-to-right fold of cell_forward. Empty input returns (init, {}).
std::pair<LstmState, std::vector<StepCache>> sequence_forward(const LstmParams& p,
                                                              const LstmState& init,
                                                              const std::vector<Vector>& xs);

/// Backpropagation through time under the convention that the loss depends on
/// the final hidden state only; d_h_last is the upstream gradient supplied by
/// whatever head sits on top. Gradients flow through both the h and c
/// recurrences and accumulate across all timesteps.
LstmGrads bptt(const LstmParams& p, const std::vector<StepCache>& caches, const Vector& d_h_last);

/// Scalar loss on the final hidden state: value for finite differencing,
/// gradient for the analytic path.
struct ScalarHead {
    std::function<double(const Vector&)> value;
    std::function<Vector(const Vector&)> grad;
};

struct GradCheckEntry {
    std::string tensor;
    double max_rel_err;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;  // eight, one per parameter tensor
    double tolerance;

    bool passed() const;
};

/// Compares bptt against central finite differences of the same loss, starting
/// from the zero state. Relative error is |a-n| / max(|a|, |n|, 1e-8), reported
/// as the max over each tensor. `corrupt_wf` is a test hook that doubles the
/// analytic W_f gradient so the failure path can be exercised.
GradCheckReport grad_check(const LstmParams& p, const std::vector<Vector>& xs,
                           const ScalarHead& head, double epsilon = 1e-5,
                           double tolerance = 1e-5, bool corrupt_wf = false);

}  // namespace hf
