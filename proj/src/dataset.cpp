#include "hf/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hf/checkpoint.hpp"
#include "hf/errors.hpp"

namespace hf {

namespace {

// Lowercase with spaces folded to underscores, so "Serum Creatinine" and
// "serum_creatinine" both match the canonical header.
std::string normalize_name(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char ch : s) {
        if (ch == ' ') ch = '_';
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
    return out;
}

struct FeatureRange {
    const char* name;
    double lo;
    double hi;
    bool boolean;
    bool strict_checked;  // platelets is warn-only, see load_cohort docs
};

// Documented intervals for the file's features. Platelets carry a unit
// conflict (the documented interval is in kilo-units, the file stores raw
// counts), so the check accepts either unit and never rejects.
constexpr FeatureRange kRanges[13] = {
    {"age", 40, 95, false, true},
    {"anaemia", 0, 1, true, true},
    {"creatinine_phosphokinase", 23, 7861, false, true},
    {"diabetes", 0, 1, true, true},
    {"ejection_fraction", 14, 80, false, true},
    {"high_blood_pressure", 0, 1, true, true},
    {"platelets", 25.01, 850.00, false, false},
    {"serum_creatinine", 0.50, 9.40, false, true},
    {"serum_sodium", 114, 148, false, true},
    {"sex", 0, 1, true, true},
    {"smoking", 0, 1, true, true},
    {"time", 4, 285, false, true},
    {"death_event", 0, 1, true, true},
};

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
    std::size_t begin = cell.find_first_not_of(" \t");
    std::size_t end = cell.find_last_not_of(" \t");
    if (begin == std::string::npos) {
        throw DataError("row " + std::to_string(row) + ": empty cell in column '" +
                        kColumnNames[col] + "'");
    }
    const char* first = cell.data() + begin;
    const char* last = cell.data() + end + 1;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw DataError("row " + std::to_string(row) + ": non-numeric cell '" + cell +
                        "' in column '" + kColumnNames[col] + "'");
    }
    return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

void set_field(PatientRecord& r, std::size_t canonical_index, double value) {
    switch (canonical_index) {
        case 0: r.age = value; break;
        case 1: r.anaemia = value != 0.0; break;
        case 2: r.creatinine_phosphokinase = value; break;
        case 3: r.diabetes = value != 0.0; break;
        case 4: r.ejection_fraction = value; break;
        case 5: r.high_blood_pressure = value != 0.0; break;
        case 6: r.platelets = value; break;
        case 7: r.serum_creatinine = value; break;
        case 8: r.serum_sodium = value; break;
        case 9: r.sex = value != 0.0; break;
        case 10: r.smoking = value != 0.0; break;
        case 11: r.time = value; break;
        case 12: r.death_event = value != 0.0; break;
    }
}

std::string range_text(const FeatureRange& fr) {
    return "[" + format_double(fr.lo) + ", " + format_double(fr.hi) + "]";
}

bool in_range(const FeatureRange& fr, double value) {
    if (fr.boolean) return value == 0.0 || value == 1.0;
    if (value >= fr.lo && value <= fr.hi) return true;
    if (!fr.strict_checked) {
        // unit-conflicted feature: also accept the same interval in raw units
        return value >= fr.lo * 1000.0 && value <= fr.hi * 1000.0;
    }
    return false;
}

}  // namespace

double feature_value(const PatientRecord& r, const std::string& name) {
    std::string n = normalize_name(name);
    if (n == "age") return r.age;
    if (n == "anaemia") return r.anaemia ? 1.0 : 0.0;
    if (n == "creatinine_phosphokinase") return r.creatinine_phosphokinase;
    if (n == "diabetes") return r.diabetes ? 1.0 : 0.0;
    if (n == "ejection_fraction") return r.ejection_fraction;
    if (n == "high_blood_pressure") return r.high_blood_pressure ? 1.0 : 0.0;
    if (n == "platelets") return r.platelets;
    if (n == "serum_creatinine") return r.serum_creatinine;
    if (n == "serum_sodium") return r.serum_sodium;
    if (n == "sex") return r.sex ? 1.0 : 0.0;
    if (n == "smoking") return r.smoking ? 1.0 : 0.0;
    if (n == "time") return r.time;
    if (n == "death_event") return r.death_event ? 1.0 : 0.0;

    std::string valid;
    for (const char* c : kColumnNames) {
        if (!valid.empty()) valid += ", ";
        valid += c;
    }
    throw ParameterError("unknown feature '" + name + "'; valid names: " + valid);
}

std::vector<std::string> classifier_features(bool include_time) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < kColumnNames.size(); ++i) {
        if (i == 11 || i == 12) continue;  // time handled below, label excluded
        names.emplace_back(kColumnNames[i]);
    }
    if (include_time) names.emplace_back("time");
    return names;
}

Cohort load_cohort(const std::string& path, bool strict) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open input file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw DataError("'" + path + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    // Map file columns onto canonical ones; all 13 must be present exactly once.
    std::vector<std::string> header = split_csv_line(line);
    if (header.size() != kColumnNames.size()) {
        throw DataError("header has " + std::to_string(header.size()) + " columns, expected " +
                        std::to_string(kColumnNames.size()));
    }
    std::vector<std::size_t> canonical_of(header.size());
    std::vector<bool> seen(kColumnNames.size(), false);
    for (std::size_t c = 0; c < header.size(); ++c) {
        std::string name = normalize_name(header[c]);
        bool found = false;
        for (std::size_t k = 0; k < kColumnNames.size(); ++k) {
            if (name == normalize_name(kColumnNames[k])) {
                if (seen[k]) throw DataError("duplicate header column '" + header[c] + "'");
                seen[k] = true;
                canonical_of[c] = k;
                found = true;
                break;
            }
        }
        if (!found) throw DataError("unknown header column '" + header[c] + "'");
    }

    Cohort cohort;
    cohort.source = path;

    std::size_t row = 1;  // 1-based data row numbers in diagnostics
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != kColumnNames.size()) {
            throw DataError("row " + std::to_string(row) + ": has " +
                            std::to_string(cells.size()) + " columns, expected " +
                            std::to_string(kColumnNames.size()));
        }

        PatientRecord rec;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            std::size_t k = canonical_of[c];
            double value = parse_cell(cells[c], row, k);
            const FeatureRange& fr = kRanges[k];
            if (!in_range(fr, value)) {
                std::string msg = "row " + std::to_string(row) + ": " + std::string(fr.name) +
                                  " " + format_double(value) + " outside " + range_text(fr);
                if (strict && fr.strict_checked) throw DataError(msg);
                cohort.warnings.push_back(msg);
            }
            set_field(rec, k, value);
        }
        cohort.records.push_back(rec);
        ++row;
    }

    cohort.source_rows = cohort.records.size();
    return cohort;
}

void save_cohort(const Cohort& c, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    for (std::size_t k = 0; k < kColumnNames.size(); ++k) {
        if (k > 0) out << ',';
        out << kColumnNames[k];
    }
    out << '\n';
    for (const PatientRecord& r : c.records) {
        for (std::size_t k = 0; k < kColumnNames.size(); ++k) {
            if (k > 0) out << ',';
            out << format_double(feature_value(r, kColumnNames[k]));
        }
        out << '\n';
    }
    if (!out) throw DataError("write to '" + path + "' failed");
}

CohortStats cohort_stats(const Cohort& c) {
    if (c.records.empty()) throw ParameterError("cohort_stats requires a nonempty cohort");

    CohortStats s;
    for (const char* name : kColumnNames) {
        FeatureStats fs;
        fs.name = name;
        double sum = 0.0;
        bool first = true;
        for (const PatientRecord& r : c.records) {
            double v = feature_value(r, name);
            if (first) {
                fs.min = fs.max = v;
                first = false;
            } else {
                fs.min = std::min(fs.min, v);
                fs.max = std::max(fs.max, v);
            }
            sum += v;
        }
        fs.mean = sum / static_cast<double>(c.records.size());
        s.features.push_back(std::move(fs));
    }
    for (const PatientRecord& r : c.records) {
        if (r.sex) ++s.men; else ++s.women;
        if (r.death_event) ++s.deaths; else ++s.survivors;
    }
    return s;
}

std::string stats_table(const CohortStats& s) {
    std::ostringstream out;
    out << "feature\tmin\tmax\tmean\n";
    for (const FeatureStats& f : s.features) {
        out << f.name << '\t' << format_double(f.min) << '\t' << format_double(f.max) << '\t'
            << format_double(f.mean) << '\n';
    }
    out << "count\twomen\t" << s.women << '\n';
    out << "count\tmen\t" << s.men << '\n';
    out << "count\tdeaths\t" << s.deaths << '\n';
    out << "count\tsurvivors\t" << s.survivors << '\n';
    return out.str();
}

NormalizationSpec NormalizationSpec::fit(const Cohort& c, const std::vector<std::string>& features) {
    if (c.records.empty()) throw ParameterError("NormalizationSpec::fit requires a nonempty cohort");
    NormalizationSpec spec;
    spec.features = features;
    for (const std::string& name : features) {
        double lo = feature_value(c.records.front(), name);
        double hi = lo;
        for (const PatientRecord& r : c.records) {
            double v = feature_value(r, name);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        spec.mins.push_back(lo);
        spec.maxs.push_back(hi);
    }
    return spec;
}

double NormalizationSpec::apply_one(std::size_t feature_index, double x) const {
    double lo = mins[feature_index];
    double hi = maxs[feature_index];
    if (hi == lo) return 0.0;
    return (x - lo) / (hi - lo);
}

double NormalizationSpec::invert_one(std::size_t feature_index, double scaled) const {
    double lo = mins[feature_index];
    double hi = maxs[feature_index];
    return lo + scaled * (hi - lo);
}

Matrix normalize(const Cohort& c, const NormalizationSpec& spec) {
    Matrix m(c.records.size(), spec.features.size());
    for (std::size_t i = 0; i < c.records.size(); ++i) {
        for (std::size_t j = 0; j < spec.features.size(); ++j) {
            m(i, j) = spec.apply_one(j, feature_value(c.records[i], spec.features[j]));
        }
    }
    return m;
}

std::pair<Cohort, Cohort> split(const Cohort& c, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ParameterError("test_fraction must lie strictly between 0 and 1, got " +
                             format_double(test_fraction));
    }

    std::vector<std::size_t> survivors, deaths;
    for (std::size_t i = 0; i < c.records.size(); ++i) {
        (c.records[i].death_event ? deaths : survivors).push_back(i);
    }

    Rng rng(seed);
    std::vector<bool> in_test(c.records.size(), false);
    for (std::vector<std::size_t>* cls : {&survivors, &deaths}) {
        rng.shuffle(*cls);
        auto take = static_cast<std::size_t>(
            std::llround(test_fraction * static_cast<double>(cls->size())));
        for (std::size_t k = 0; k < take; ++k) in_test[(*cls)[k]] = true;
    }

    Cohort train, test;
    train.source = c.source + "#train";
    test.source = c.source + "#test";
    for (std::size_t i = 0; i < c.records.size(); ++i) {
        (in_test[i] ? test : train).records.push_back(c.records[i]);
    }
    train.source_rows = train.records.size();
    test.source_rows = test.records.size();
    return {std::move(train), std::move(test)};
}

CumulativeEventSeries build_cumulative_series(const Cohort& c) {
    if (c.records.empty()) throw ParameterError("build_cumulative_series requires a nonempty cohort");

    std::int64_t max_day = 0;
    for (const PatientRecord& r : c.records) {
        max_day = std::max(max_day, static_cast<std::int64_t>(std::llround(r.time)));
    }

    CumulativeEventSeries series;
    series.counts.assign(static_cast<std::size_t>(max_day) + 1, 0);
    for (const PatientRecord& r : c.records) {
        if (!r.death_event) continue;
        auto day = static_cast<std::size_t>(std::llround(r.time));
        series.counts[day] += 1;
    }
    std::int64_t running = 0;
    for (std::int64_t& count : series.counts) {
        running += count;
        count = running;
    }
    return series;
}

}  // namespace hf
