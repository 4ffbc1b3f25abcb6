#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hf/lstm.hpp"
#include "hf/numerics.hpp"

namespace hf {

/// One named tensor; vectors are stored as 1 x len.
struct NamedTensor {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;  // row-major
};

/// Structured text checkpoint. The format is line oriented:
///
///   hfckpt 1
///   meta <key> <value with spaces allowed>
///   tensor <name> <rows> <cols>
///   <cols space-separated values>      (one line per row)
///
/// Values are written in shortest round-trip decimal form, so save followed by
/// load reproduces every double bit-exactly and identical models serialize to
/// byte-identical files.
struct Checkpoint {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<NamedTensor> tensors;

    const NamedTensor& tensor(const std::string& name) const;
    bool has_tensor(const std::string& name) const;
    std::string meta_value(const std::string& key) const;
    bool has_meta(const std::string& key) const;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double x);

NamedTensor tensor_from_matrix(const std::string& name, const Matrix& m);
NamedTensor tensor_from_vector(const std::string& name, const Vector& v);
Matrix matrix_from_tensor(const NamedTensor& t);
Vector vector_from_tensor(const NamedTensor& t);

/// The eight LSTM parameter tensors under their conventional names
/// (W_f, W_i, W_c, W_o, b_f, b_i, b_c, b_o).
void append_lstm_tensors(const LstmParams& p, Checkpoint& ckpt);
LstmParams lstm_from_checkpoint(const Checkpoint& ckpt);

}  // namespace hf
