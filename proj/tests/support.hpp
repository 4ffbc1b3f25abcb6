#pragma once

// Helpers shared by the test binaries: scratch directories, tiny file IO, the
// finite-difference oracle, and the eight-row fixture cohort.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace hfts {

struct TempDir {
    std::filesystem::path path;

    TempDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "hftest-XXXXXX").string();
        std::vector<char> buf(tmpl.begin(), tmpl.end());
        buf.push_back('\0');
        if (!mkdtemp(buf.data())) throw std::runtime_error("mkdtemp failed");
        path = buf.data();
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Central finite differences of eval() with respect to every entry of values.
/// eval must observe values by reference (it re-runs after each perturbation).
inline std::vector<double> central_differences(const std::function<double()>& eval,
                                               std::vector<double>& values, double eps) {
    std::vector<double> grads(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        double saved = values[k];
        values[k] = saved + eps;
        double up = eval();
        values[k] = saved - eps;
        double down = eval();
        values[k] = saved;
        grads[k] = (up - down) / (2.0 * eps);
    }
    return grads;
}

/// Relative error with a denominator floor. The floor absorbs central-difference
/// roundoff (about eta * |loss| / eps in absolute terms) on near-zero components.
inline double rel_err(double a, double n, double floor = 1e-8) {
    double denom = std::max({std::fabs(a), std::fabs(n), floor});
    return std::fabs(a - n) / denom;
}

inline double max_rel_err(const std::vector<double>& analytic, const std::vector<double>& numeric,
                          double floor = 1e-8) {
    double worst = 0.0;
    for (std::size_t k = 0; k < analytic.size(); ++k) {
        worst = std::max(worst, rel_err(analytic[k], numeric[k], floor));
    }
    return worst;
}

/// The eight fixture rows, all death events, follow-up days 4..10.
inline constexpr const char* kEightRowCsv =
    "age,anaemia,creatinine_phosphokinase,diabetes,ejection_fraction,high_blood_pressure,"
    "platelets,serum_creatinine,serum_sodium,sex,smoking,time,DEATH_EVENT\n"
    "75,0,582,0,20,1,265000,1.9,130,1,0,4,1\n"
    "55,0,7861,0,38,0,263358,1.1,136,1,0,6,1\n"
    "65,0,146,0,20,0,162000,1.3,129,1,1,7,1\n"
    "50,1,111,0,20,0,210000,1.9,137,1,0,7,1\n"
    "65,1,160,1,20,0,327000,2.7,116,0,0,8,1\n"
    "90,1,47,0,40,1,204000,2.1,132,1,1,8,1\n"
    "75,1,246,0,15,0,127000,1.2,137,1,0,10,1\n"
    "60,1,315,1,60,0,454000,1.1,131,1,1,10,1\n";

}  // namespace hfts
