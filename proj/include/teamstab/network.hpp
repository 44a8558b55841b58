#pragma once

#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "teamstab/cohort.hpp"
#include "teamstab/csv.hpp"
#include "teamstab/errors.hpp"

namespace teamstab {

/// Key for an unordered student pair.
inline std::pair<StudentId, StudentId> pair_key(const StudentId& a, const StudentId& b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

/// Cooperation frequencies over the whole activity sequence: how many
/// activities each pair shared a team in, and how many activities each
/// student took part in at all.
struct CooperationCounts {
    std::map<std::pair<StudentId, StudentId>, int> pair_count;  // positive entries only
    std::map<StudentId, int> participation;                     // one entry per student
    int activity_count = 0;

    int cooperation(const StudentId& a, const StudentId& b) const {
        auto it = pair_count.find(pair_key(a, b));
        return it == pair_count.end() ? 0 : it->second;
    }
};

/// Per-activity co-membership: partners_by_activity[q-1][i] is the set of
/// students sharing a team with i in activity q. Self-pairs are excluded.
struct ActivityAdjacency {
    int activity_count = 0;
    std::set<StudentId> students;
    std::vector<std::map<StudentId, std::set<StudentId>>> partners_by_activity;

    bool together(int ordinal, const StudentId& a, const StudentId& b) const {
        const auto& partners = partners_by_activity[static_cast<std::size_t>(ordinal) - 1];
        auto it = partners.find(a);
        return it != partners.end() && it->second.count(b) > 0;
    }
};

inline CooperationCounts cooperation_counts(const Cohort& cohort) {
    CooperationCounts counts;
    counts.activity_count = cohort.activity_count();
    for (const StudentId& student : cohort.students) counts.participation[student] = 0;

    std::vector<std::set<StudentId>> active(static_cast<std::size_t>(cohort.activity_count()));
    for (const TeamRecord& team : cohort.teams) {
        auto& present = active[static_cast<std::size_t>(team.activity_ordinal) - 1];
        for (auto i = team.members.begin(); i != team.members.end(); ++i) {
            present.insert(*i);
            for (auto j = std::next(i); j != team.members.end(); ++j)
                ++counts.pair_count[pair_key(*i, *j)];
        }
    }
    for (const auto& present : active)
        for (const StudentId& student : present) ++counts.participation[student];
    return counts;
}

inline ActivityAdjacency activity_adjacency(const Cohort& cohort) {
    ActivityAdjacency adjacency;
    adjacency.activity_count = cohort.activity_count();
    adjacency.students.insert(cohort.students.begin(), cohort.students.end());
    adjacency.partners_by_activity.resize(static_cast<std::size_t>(cohort.activity_count()));
    for (const TeamRecord& team : cohort.teams) {
        auto& partners = adjacency.partners_by_activity[static_cast<std::size_t>(team.activity_ordinal) - 1];
        for (const StudentId& i : team.members)
            for (const StudentId& j : team.members)
                if (i != j) partners[i].insert(j);
    }
    return adjacency;
}

/// Salton cosine of cooperation counts: c_ij / sqrt(c_i * c_j). Zero when
/// either student never took part (no participation, no relations).
inline double relation_strength(const CooperationCounts& counts, const StudentId& i,
                                const StudentId& j) {
    if (i == j) throw DomainError("relation strength is undefined for a student with themselves");
    auto ci = counts.participation.find(i);
    auto cj = counts.participation.find(j);
    const int count_i = ci == counts.participation.end() ? 0 : ci->second;
    const int count_j = cj == counts.participation.end() ? 0 : cj->second;
    if (count_i == 0 || count_j == 0) return 0.0;
    return counts.cooperation(i, j) / std::sqrt(static_cast<double>(count_i) * count_j);
}

/// Sum of relation strengths over every partner. Students that never
/// cooperated contribute zero, so only stored pairs are visited.
inline double total_relation_strength(const CooperationCounts& counts, const StudentId& i) {
    if (counts.participation.find(i) == counts.participation.end())
        throw LookupError("unknown student '" + i + "'");
    double total = 0.0;
    for (const auto& [pair, count] : counts.pair_count) {
        if (pair.first == i)
            total += relation_strength(counts, i, pair.second);
        else if (pair.second == i)
            total += relation_strength(counts, i, pair.first);
    }
    return total;
}

/// Degree in the collapsed network: number of distinct students ever teamed
/// with i, regardless of when.
inline int degree_centrality(const ActivityAdjacency& adjacency, const StudentId& i) {
    if (adjacency.students.count(i) == 0) throw LookupError("unknown student '" + i + "'");
    std::set<StudentId> partners;
    for (const auto& by_student : adjacency.partners_by_activity) {
        auto it = by_student.find(i);
        if (it != by_student.end()) partners.insert(it->second.begin(), it->second.end());
    }
    return static_cast<int>(partners.size());
}

/// Pairwise edge list for external graph tooling.
inline void write_edge_list(std::ostream& out, const CooperationCounts& counts,
                            char delim = ',') {
    csv::write_record(out, {"StudentA", "StudentB", "Cooperations", "RelationStrength"}, delim);
    char strength[64];
    for (const auto& [pair, count] : counts.pair_count) {
        std::snprintf(strength, sizeof strength, "%.17g",
                      relation_strength(counts, pair.first, pair.second));
        csv::write_record(out, {pair.first, pair.second, std::to_string(count), strength}, delim);
    }
}

}  // namespace teamstab
