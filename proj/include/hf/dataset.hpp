#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hf/numerics.hpp"

namespace hf {

/// One validated row of the heart-failure records file.
struct PatientRecord {
    double age = 0;                        // years
    bool anaemia = false;
    double creatinine_phosphokinase = 0;   // mcg/L
    bool diabetes = false;
    double ejection_fraction = 0;          // percent
    bool high_blood_pressure = false;
    double platelets = 0;                  // raw file units, see load_cohort
    double serum_creatinine = 0;           // mg/dL
    double serum_sodium = 0;               // mEq/L
    bool sex = false;                      // 0 woman, 1 man
    bool smoking = false;
    double time = 0;                       // follow-up days
    bool death_event = false;
};

/// Canonical column names, in file order.
inline constexpr std::array<const char*, 13> kColumnNames = {
    "age",       "anaemia",          "creatinine_phosphokinase",
    "diabetes",  "ejection_fraction", "high_blood_pressure",
    "platelets", "serum_creatinine", "serum_sodium",
    "sex",       "smoking",          "time",
    "DEATH_EVENT"};

/// Value of the named feature (any of the 13 columns, booleans as 0/1).
/// Unknown names raise ParameterError listing the valid ones.
double feature_value(const PatientRecord& r, const std::string& name);

/// The 12 model input features in canonical order; `time` appended on request.
std::vector<std::string> classifier_features(bool include_time);

struct Cohort {
    std::vector<PatientRecord> records;
    std::string source;                  // where the rows came from
    std::size_t source_rows = 0;         // data rows in the file, header excluded
    std::vector<std::string> warnings;   // lenient-mode range notes
};

/// Parses the 13-column comma-separated file. Header names are matched
/// case-insensitively with '_' and ' ' interchangeable, in any column order.
/// strict rejects rows outside the documented feature intervals; lenient keeps
/// them and records a warning. Platelets are never rejected: the file stores
/// raw counts while the documented interval is in kilo-units, so the range is
/// checked only as a lenient-mode warning.
Cohort load_cohort(const std::string& path, bool strict);

/// Writes records back in canonical column order with round-trip-exact values.
void save_cohort(const Cohort& c, const std::string& path);

struct FeatureStats {
    std::string name;
    double min = 0, max = 0, mean = 0;
};

struct CohortStats {
    std::vector<FeatureStats> features;  // all 13 columns
    std::size_t women = 0, men = 0;
    std::size_t deaths = 0, survivors = 0;
};

CohortStats cohort_stats(const Cohort& c);

/// Tab-separated stats table with header, one feature per line, then the
/// sex/death counts.
std::string stats_table(const CohortStats& s);

/// Per-feature min/max, learned from training rows only.
struct NormalizationSpec {
    std::vector<std::string> features;
    Vector mins;
    Vector maxs;

    static NormalizationSpec fit(const Cohort& c, const std::vector<std::string>& features);

    /// (x - min) / (max - min); features with zero span map to 0.
    double apply_one(std::size_t feature_index, double x) const;
    double invert_one(std::size_t feature_index, double scaled) const;
};

/// Record-by-feature matrix of normalized values in [0, 1].
Matrix normalize(const Cohort& c, const NormalizationSpec& spec);

/// Deterministic shuffled split, stratified on death_event so both parts keep
/// the class ratio within one record. Requires 0 < test_fraction < 1.
std::pair<Cohort, Cohort> split(const Cohort& c, double test_fraction, std::uint64_t seed);

/// Deaths-so-far indexed by follow-up day: counts[d] is the number of records
/// with death_event = 1 and time <= d, for d = 0..max(time).
struct CumulativeEventSeries {
    std::vector<std::int64_t> counts;

    std::size_t days() const { return counts.size(); }
    std::int64_t total() const { return counts.empty() ? 0 : counts.back(); }
};

CumulativeEventSeries build_cumulative_series(const Cohort& c);

}  // namespace hf
