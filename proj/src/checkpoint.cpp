#include "hf/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "hf/errors.hpp"

namespace hf {

const NamedTensor& Checkpoint::tensor(const std::string& name) const {
    for (const NamedTensor& t : tensors) {
        if (t.name == name) return t;
    }
    throw DataError("checkpoint has no tensor named '" + name + "'");
}

bool Checkpoint::has_tensor(const std::string& name) const {
    for (const NamedTensor& t : tensors) {
        if (t.name == name) return true;
    }
    return false;
}

std::string Checkpoint::meta_value(const std::string& key) const {
    for (const auto& [k, v] : meta) {
        if (k == key) return v;
    }
    throw DataError("checkpoint has no meta key '" + key + "'");
}

bool Checkpoint::has_meta(const std::string& key) const {
    for (const auto& [k, v] : meta) {
        if (k == key) return true;
    }
    return false;
}

std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc()) throw NumericalError("failed to format double");
    return std::string(buf, ptr);
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: fixed '\n' on every platform
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << "hfckpt 1\n";
    for (const auto& [k, v] : ckpt.meta) out << "meta " << k << " " << v << "\n";
    for (const NamedTensor& t : ckpt.tensors) {
        if (t.values.size() != t.rows * t.cols) {
            throw ShapeError("tensor '" + t.name + "' value count does not match its shape");
        }
        out << "tensor " << t.name << " " << t.rows << " " << t.cols << "\n";
        for (std::size_t i = 0; i < t.rows; ++i) {
            for (std::size_t j = 0; j < t.cols; ++j) {
                if (j > 0) out << ' ';
                out << format_double(t.values[i * t.cols + j]);
            }
            out << '\n';
        }
    }
    if (!out) throw DataError("write to '" + path + "' failed");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open checkpoint '" + path + "'");

    std::string line;
    if (!std::getline(in, line) || line != "hfckpt 1") {
        throw DataError("'" + path + "' is not an hfckpt-1 file");
    }

    Checkpoint ckpt;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "meta") {
            std::string key;
            ls >> key;
            std::string value;
            std::getline(ls, value);
            if (!value.empty() && value.front() == ' ') value.erase(0, 1);
            ckpt.meta.emplace_back(key, value);
        } else if (tag == "tensor") {
            NamedTensor t;
            ls >> t.name >> t.rows >> t.cols;
            if (ls.fail()) throw DataError("malformed tensor header in '" + path + "': " + line);
            t.values.resize(t.rows * t.cols);
            for (std::size_t i = 0; i < t.rows; ++i) {
                std::string row;
                if (!std::getline(in, row)) {
                    throw DataError("truncated tensor '" + t.name + "' in '" + path + "'");
                }
                const char* ptr = row.data();
                const char* end = row.data() + row.size();
                for (std::size_t j = 0; j < t.cols; ++j) {
                    while (ptr < end && *ptr == ' ') ++ptr;
                    double v = 0.0;
                    auto [next, ec] = std::from_chars(ptr, end, v);
                    if (ec != std::errc()) {
                        throw DataError("bad value in tensor '" + t.name + "' row " +
                                        std::to_string(i));
                    }
                    t.values[i * t.cols + j] = v;
                    ptr = next;
                }
            }
            ckpt.tensors.push_back(std::move(t));
        } else {
            throw DataError("unknown checkpoint line in '" + path + "': " + line);
        }
    }
    return ckpt;
}

NamedTensor tensor_from_matrix(const std::string& name, const Matrix& m) {
    return NamedTensor{name, m.rows(), m.cols(), m.data()};
}

NamedTensor tensor_from_vector(const std::string& name, const Vector& v) {
    return NamedTensor{name, 1, v.size(), v};
}

Matrix matrix_from_tensor(const NamedTensor& t) { return Matrix(t.rows, t.cols, t.values); }

Vector vector_from_tensor(const NamedTensor& t) {
    if (t.rows != 1) throw ShapeError("tensor '" + t.name + "' is not a vector");
    return t.values;
}

void append_lstm_tensors(const LstmParams& p, Checkpoint& ckpt) {
    ckpt.tensors.push_back(tensor_from_matrix("W_f", p.w_f));
    ckpt.tensors.push_back(tensor_from_matrix("W_i", p.w_i));
    ckpt.tensors.push_back(tensor_from_matrix("W_c", p.w_c));
    ckpt.tensors.push_back(tensor_from_matrix("W_o", p.w_o));
    ckpt.tensors.push_back(tensor_from_vector("b_f", p.b_f));
    ckpt.tensors.push_back(tensor_from_vector("b_i", p.b_i));
    ckpt.tensors.push_back(tensor_from_vector("b_c", p.b_c));
    ckpt.tensors.push_back(tensor_from_vector("b_o", p.b_o));
}

LstmParams lstm_from_checkpoint(const Checkpoint& ckpt) {
    LstmParams p;
    p.w_f = matrix_from_tensor(ckpt.tensor("W_f"));
    p.w_i = matrix_from_tensor(ckpt.tensor("W_i"));
    p.w_c = matrix_from_tensor(ckpt.tensor("W_c"));
    p.w_o = matrix_from_tensor(ckpt.tensor("W_o"));
    p.b_f = vector_from_tensor(ckpt.tensor("b_f"));
    p.b_i = vector_from_tensor(ckpt.tensor("b_i"));
    p.b_c = vector_from_tensor(ckpt.tensor("b_c"));
    p.b_o = vector_from_tensor(ckpt.tensor("b_o"));
    p.hidden_dim = p.b_f.size();
    if (p.w_f.cols() < p.hidden_dim) throw ShapeError("checkpoint W_f narrower than hidden_dim");
    p.input_dim = p.w_f.cols() - p.hidden_dim;
    return p;
}

}  // namespace hf
