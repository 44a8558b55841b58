#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "teamstab/cohort.hpp"
#include "teamstab/csv.hpp"
#include "teamstab/errors.hpp"
#include "teamstab/network.hpp"

namespace teamstab {

/// Default decay base: one e-fold per activity of age.
inline double default_damping() { return std::exp(-1.0); }

/// Geometric decay per activity of age. delta = 1 disables damping.
struct DampingConfig {
    double delta = 0.36787944117144233;  // exp(-1)
};

inline void validate_damping(const DampingConfig& config) {
    if (!(config.delta > 0.0 && config.delta <= 1.0))
        throw DomainError("damping delta must lie in (0,1], got " + std::to_string(config.delta));
}

/// One row of the per-student result table.
struct StabilityRow {
    StudentId student;
    double stability = 0.0;
    std::optional<double> mean_score;  // absent when the student has no score records

    friend bool operator==(const StabilityRow&, const StabilityRow&) = default;
};

/// Age-damped cooperation weight of a pair: sum over activities of
/// delta^(m-q) for each activity q the two shared a team in. Recent
/// cooperations count close to 1, old ones decay geometrically.
inline double damped_pair_weight(const ActivityAdjacency& adjacency, const DampingConfig& config,
                                 const StudentId& i, const StudentId& j) {
    if (i == j) throw DomainError("pair weight is undefined for a student with themselves");
    validate_damping(config);
    const int m = adjacency.activity_count;
    double weight = 0.0;
    for (int q = 1; q <= m; ++q)
        if (adjacency.together(q, i, j)) weight += std::pow(config.delta, m - q);
    return weight;
}

/// Centrality with time structure: total damped weight over all partners.
inline double damped_centrality(const ActivityAdjacency& adjacency, const DampingConfig& config,
                                const StudentId& i) {
    if (adjacency.students.count(i) == 0) throw LookupError("unknown student '" + i + "'");
    validate_damping(config);
    const int m = adjacency.activity_count;
    double total = 0.0;
    for (int q = 1; q <= m; ++q) {
        const auto& partners = adjacency.partners_by_activity[static_cast<std::size_t>(q) - 1];
        auto it = partners.find(i);
        if (it != partners.end())
            total += static_cast<double>(it->second.size()) * std::pow(config.delta, m - q);
    }
    return total;
}

/// Team stability factor: damped pair weight times relation strength, summed
/// over partners. Relation strength is the static value over all m
/// activities, evaluated once per pair.
inline double stability_factor(const CooperationCounts& counts,
                               const ActivityAdjacency& adjacency, const DampingConfig& config,
                               const StudentId& i) {
    if (adjacency.students.count(i) == 0 ||
        counts.participation.find(i) == counts.participation.end())
        throw LookupError("unknown student '" + i + "'");
    validate_damping(config);

    std::map<StudentId, double> weight_by_partner;
    const int m = adjacency.activity_count;
    for (int q = 1; q <= m; ++q) {
        const auto& partners = adjacency.partners_by_activity[static_cast<std::size_t>(q) - 1];
        auto it = partners.find(i);
        if (it == partners.end()) continue;
        const double decay = std::pow(config.delta, m - q);
        for (const StudentId& j : it->second) weight_by_partner[j] += decay;
    }

    double total = 0.0;
    for (const auto& [j, weight] : weight_by_partner)
        total += weight * relation_strength(counts, i, j);
    return total;
}

/// Per-student stability factors joined with mean individual scores, sorted
/// by student number. Students without any score row keep mean_score absent.
inline std::vector<StabilityRow> final_results(const Cohort& cohort,
                                               const DampingConfig& config = {}) {
    validate_damping(config);
    const CooperationCounts counts = cooperation_counts(cohort);
    const ActivityAdjacency adjacency = activity_adjacency(cohort);

    std::map<StudentId, std::pair<double, int>> score_sums;
    for (const IndividualScoreRecord& record : cohort.scores) {
        auto& [sum, count] = score_sums[record.student];
        sum += record.score;
        ++count;
    }

    std::vector<StabilityRow> rows;
    rows.reserve(cohort.students.size());
    for (const StudentId& student : cohort.students) {
        StabilityRow row;
        row.student = student;
        row.stability = stability_factor(counts, adjacency, config, student);
        auto scores = score_sums.find(student);
        if (scores != score_sums.end())
            row.mean_score = scores->second.first / scores->second.second;
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace detail {

inline std::string format_value(double value, int precision) {
    char buffer[64];
    if (precision < 0)
        std::snprintf(buffer, sizeof buffer, "%.17g", value);
    else
        std::snprintf(buffer, sizeof buffer, "%.*f", precision, value);
    return buffer;
}

}  // namespace detail

/// FinalResults table. precision < 0 emits full (round-trip) precision;
/// an absent mean score becomes an empty field.
inline void write_final_results(std::ostream& out, const std::vector<StabilityRow>& rows,
                                int precision = 2, char delim = ',') {
    csv::write_record(out, {"StudentNo", "S", "MeanScore"}, delim);
    for (const StabilityRow& row : rows)
        csv::write_record(out,
                          {row.student, detail::format_value(row.stability, precision),
                           row.mean_score ? detail::format_value(*row.mean_score, precision) : ""},
                          delim);
}

/// Full-precision report with per-pair audit: every partner's cooperation
/// count, relation strength, and damped weight, so each stability factor can
/// be recomputed by hand.
inline nlohmann::ordered_json stability_report_json(const Cohort& cohort,
                                                    const DampingConfig& config = {}) {
    validate_damping(config);
    const CooperationCounts counts = cooperation_counts(cohort);
    const ActivityAdjacency adjacency = activity_adjacency(cohort);
    const std::vector<StabilityRow> rows = final_results(cohort, config);

    nlohmann::ordered_json doc;
    doc["delta"] = config.delta;
    doc["activity_count"] = cohort.activity_count();
    doc["students"] = nlohmann::ordered_json::array();
    for (const StabilityRow& row : rows) {
        nlohmann::ordered_json entry;
        entry["student"] = row.student;
        entry["stability"] = row.stability;
        if (row.mean_score)
            entry["mean_score"] = *row.mean_score;
        else
            entry["mean_score"] = nullptr;
        entry["partners"] = nlohmann::ordered_json::array();
        std::set<StudentId> partners;
        for (const auto& by_student : adjacency.partners_by_activity) {
            auto it = by_student.find(row.student);
            if (it != by_student.end()) partners.insert(it->second.begin(), it->second.end());
        }
        for (const StudentId& j : partners) {
            entry["partners"].push_back(
                {{"student", j},
                 {"cooperation_count", counts.cooperation(row.student, j)},
                 {"relation_strength", relation_strength(counts, row.student, j)},
                 {"damped_weight", damped_pair_weight(adjacency, config, row.student, j)}});
        }
        doc["students"].push_back(std::move(entry));
    }
    return doc;
}

}  // namespace teamstab
