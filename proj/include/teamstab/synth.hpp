#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "teamstab/cohort.hpp"
#include "teamstab/errors.hpp"
#include "teamstab/rng.hpp"

namespace teamstab {

enum class PolicyKind {
    fully_stable,          // one partition, reused for every activity
    random_each_activity,  // fresh shuffle-and-chunk partition per activity
    churn,                 // stable base, each student moves with probability churn_rate
};

struct TeamingPolicy {
    PolicyKind kind = PolicyKind::fully_stable;
    double churn_rate = 0.0;   // only read for PolicyKind::churn
    int team_size_min = 3;
    int team_size_max = 5;
    int n_students = 30;
    int m_activities = 4;
    std::uint64_t seed = 0;
};

struct ScoreModel {
    double base = 82.114;
    double stability_coeff = 0.502;
    double noise_sd = 0.0;
    std::uint64_t seed = 0;
};

struct GeneratedScores {
    std::vector<IndividualScoreRecord> records;
    int clamped = 0;  // draws pushed back into [0,100]
};

namespace detail {

/// Can `remaining` students still be split into teams within [lo, hi]?
inline bool partition_feasible(int remaining, int lo, int hi) {
    if (remaining == 0) return true;
    if (remaining < lo) return false;
    const int min_teams = (remaining + hi - 1) / hi;
    const int max_teams = remaining / lo;
    return min_teams <= max_teams;
}

/// Shuffle-and-chunk partition: shuffle the ids, then repeatedly cut off a
/// team whose size is drawn uniformly from the sizes that keep the remainder
/// coverable. Uniform over this procedure's outcomes, not over all set
/// partitions.
inline std::vector<std::vector<StudentId>> random_partition(std::vector<StudentId> ids,
                                                            const TeamingPolicy& policy,
                                                            Rng& rng) {
    rng.shuffle(ids);
    std::vector<std::vector<StudentId>> teams;
    std::size_t cursor = 0;
    while (cursor < ids.size()) {
        const int remaining = static_cast<int>(ids.size() - cursor);
        std::vector<int> candidates;
        for (int size = policy.team_size_min; size <= std::min(policy.team_size_max, remaining);
             ++size)
            if (partition_feasible(remaining - size, policy.team_size_min, policy.team_size_max))
                candidates.push_back(size);
        if (candidates.empty())
            throw ConfigError("cannot split " + std::to_string(remaining) +
                              " students into teams of " + std::to_string(policy.team_size_min) +
                              ".." + std::to_string(policy.team_size_max));
        const int size = candidates[rng.below(candidates.size())];
        teams.emplace_back(ids.begin() + static_cast<std::ptrdiff_t>(cursor),
                           ids.begin() + static_cast<std::ptrdiff_t>(cursor) + size);
        cursor += static_cast<std::size_t>(size);
    }
    return teams;
}

inline std::string padded_number(int value, std::size_t width) {
    std::string text = std::to_string(value);
    return text.size() >= width ? text : std::string(width - text.size(), '0') + text;
}

}  // namespace detail

inline void validate_policy(const TeamingPolicy& policy) {
    if (policy.team_size_min < 2 || policy.team_size_max < policy.team_size_min)
        throw ConfigError("team size range must satisfy 2 <= min <= max");
    if (policy.n_students < policy.team_size_min)
        throw ConfigError("need at least " + std::to_string(policy.team_size_min) + " students");
    if (policy.m_activities < 1) throw ConfigError("need at least 1 activity");
    if (policy.kind == PolicyKind::churn &&
        !(policy.churn_rate >= 0.0 && policy.churn_rate <= 1.0))
        throw ConfigError("churn rate must lie in [0,1]");
    if (!detail::partition_feasible(policy.n_students, policy.team_size_min, policy.team_size_max))
        throw ConfigError("cannot split " + std::to_string(policy.n_students) +
                          " students into teams of " + std::to_string(policy.team_size_min) + ".." +
                          std::to_string(policy.team_size_max));
}

/// Deterministic synthetic cohort. Same policy and seed, same cohort,
/// bit for bit.
///
/// churn semantics per activity transition: every student is independently
/// marked a mover with probability churn_rate; a mover joins a uniformly
/// random other team unless that would leave fewer than 2 students behind.
/// When all students move at once there is no team left to join, so the
/// cohort re-forms from scratch with a fresh random partition -- which makes
/// churn(1) follow the same partition law as random_each_activity.
inline Cohort generate_cohort(const TeamingPolicy& policy) {
    validate_policy(policy);
    Rng rng(policy.seed);

    const std::size_t id_width = std::to_string(policy.n_students).size();
    std::vector<StudentId> ids;
    for (int k = 1; k <= policy.n_students; ++k)
        ids.push_back(detail::padded_number(k, id_width));

    Cohort cohort;
    cohort.students = ids;  // already sorted: fixed-width numeric strings
    for (int q = 1; q <= policy.m_activities; ++q)
        cohort.activities.push_back({q, "Activity " + std::to_string(q)});

    std::vector<std::vector<StudentId>> teams = detail::random_partition(ids, policy, rng);
    for (int q = 1; q <= policy.m_activities; ++q) {
        if (q > 1) {
            switch (policy.kind) {
                case PolicyKind::fully_stable:
                    break;
                case PolicyKind::random_each_activity:
                    teams = detail::random_partition(ids, policy, rng);
                    break;
                case PolicyKind::churn: {
                    std::vector<StudentId> movers;
                    for (const StudentId& id : ids)
                        if (rng.bernoulli(policy.churn_rate)) movers.push_back(id);
                    if (movers.size() == ids.size()) {
                        teams = detail::random_partition(ids, policy, rng);
                        break;
                    }
                    std::map<StudentId, std::size_t> team_of;
                    for (std::size_t t = 0; t < teams.size(); ++t)
                        for (const StudentId& id : teams[t]) team_of[id] = t;
                    rng.shuffle(movers);
                    for (const StudentId& mover : movers) {
                        if (teams.size() < 2) break;  // nowhere else to go
                        const std::size_t from = team_of[mover];
                        if (teams[from].size() < 3) continue;  // would strand a lone teammate
                        std::size_t to = rng.below(teams.size() - 1);
                        if (to >= from) ++to;
                        auto& origin = teams[from];
                        origin.erase(std::find(origin.begin(), origin.end(), mover));
                        teams[to].push_back(mover);
                        team_of[mover] = to;
                    }
                    break;
                }
            }
        }
        for (std::size_t t = 0; t < teams.size(); ++t) {
            TeamRecord team;
            team.team_id = std::to_string(q * 1000 + static_cast<int>(t) + 1);
            team.activity_ordinal = q;
            team.members.insert(teams[t].begin(), teams[t].end());
            team.leader = *team.members.begin();
            cohort.teams.push_back(std::move(team));
        }
    }

    std::sort(cohort.teams.begin(), cohort.teams.end(),
              [](const TeamRecord& a, const TeamRecord& b) {
                  return std::tie(a.activity_ordinal, a.team_id) <
                         std::tie(b.activity_ordinal, b.team_id);
              });
    validate_cohort(cohort);
    return cohort;
}

/// One score row per student per activity attended:
/// clamp(base + stability_coeff * S(student) + gaussian noise).
inline GeneratedScores generate_scores(const Cohort& cohort, const ScoreModel& model,
                                       const std::map<StudentId, double>& stability) {
    Rng rng(model.seed);
    GeneratedScores out;
    for (const TeamRecord& team : cohort.teams) {
        for (const StudentId& student : team.members) {
            auto it = stability.find(student);
            if (it == stability.end())
                throw LookupError("no stability value for student '" + student + "'");
            double score = model.base + model.stability_coeff * it->second +
                           (model.noise_sd > 0.0 ? rng.gaussian(0.0, model.noise_sd) : 0.0);
            if (score < 0.0 || score > 100.0) {
                score = std::min(100.0, std::max(0.0, score));
                ++out.clamped;
            }
            out.records.push_back({team.team_id, student, score});
        }
    }
    std::sort(out.records.begin(), out.records.end(),
              [](const IndividualScoreRecord& a, const IndividualScoreRecord& b) {
                  return std::tie(a.team_id, a.student) < std::tie(b.team_id, b.student);
              });
    return out;
}

}  // namespace teamstab
