#pragma once

// Shared test fixtures: the six-student two-activity cohort used across the
// metric tests, plus a seeded random-cohort helper for property tests.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "teamstab/cohort.hpp"
#include "teamstab/rng.hpp"
#include "teamstab/synth.hpp"

namespace fixtures {

using teamstab::Cohort;
using teamstab::StudentId;
using teamstab::TeamRecord;

inline TeamRecord make_team(std::string id, int ordinal, std::set<StudentId> members) {
    TeamRecord team;
    team.team_id = std::move(id);
    team.activity_ordinal = ordinal;
    team.members = std::move(members);
    return team;
}

/// Six students A..F over two activities:
///   activity 1: {A,B,C} {D,E,F}
///   activity 2: {A,B,D} {C,E,F}
inline Cohort f6() {
    Cohort cohort;
    cohort.students = {"A", "B", "C", "D", "E", "F"};
    cohort.activities = {{1, "first"}, {2, "second"}};
    cohort.teams.push_back(make_team("t11", 1, {"A", "B", "C"}));
    cohort.teams.push_back(make_team("t12", 1, {"D", "E", "F"}));
    cohort.teams.push_back(make_team("t21", 2, {"A", "B", "D"}));
    cohort.teams.push_back(make_team("t22", 2, {"C", "E", "F"}));
    teamstab::validate_cohort(cohort);
    return cohort;
}

/// Pair cohort: students X and Y share one team in the given activities, out
/// of m total. Useful for exercising absence and single-pair arithmetic.
inline Cohort pair_cohort(int m, const std::vector<int>& together_at) {
    Cohort cohort;
    cohort.students = {"X", "Y"};
    for (int q = 1; q <= m; ++q) cohort.activities.push_back({q, "a" + std::to_string(q)});
    for (int q : together_at)
        cohort.teams.push_back(make_team("t" + std::to_string(q), q, {"X", "Y"}));
    teamstab::validate_cohort(cohort);
    return cohort;
}

/// Small random cohort with randomized policy, sizes, and churn, suitable
/// for brute-force oracle comparison. Deterministic per seed.
inline Cohort random_small(std::uint64_t seed, int max_students = 12, int max_activities = 4) {
    teamstab::Rng rng(seed ^ 0x5bd1e995u);
    teamstab::TeamingPolicy policy;
    policy.seed = seed;
    for (;;) {
        policy.team_size_min = rng.range(2, 3);
        policy.team_size_max = rng.range(policy.team_size_min, 5);
        policy.n_students = rng.range(policy.team_size_min, max_students);
        policy.m_activities = rng.range(1, max_activities);
        switch (rng.range(0, 2)) {
            case 0: policy.kind = teamstab::PolicyKind::fully_stable; break;
            case 1: policy.kind = teamstab::PolicyKind::random_each_activity; break;
            default:
                policy.kind = teamstab::PolicyKind::churn;
                policy.churn_rate = rng.uniform01();
        }
        if (teamstab::detail::partition_feasible(policy.n_students, policy.team_size_min,
                                                 policy.team_size_max))
            return teamstab::generate_cohort(policy);
    }
}

}  // namespace fixtures
