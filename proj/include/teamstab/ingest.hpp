#pragma once

#include <algorithm>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "teamstab/cohort.hpp"
#include "teamstab/csv.hpp"
#include "teamstab/errors.hpp"

namespace teamstab {

/// Soft finding collected during ingestion. Hard violations throw instead.
struct Diagnostic {
    std::size_t row = 0;  // 1-based input row when tied to one, else 0
    std::string message;

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

namespace detail {

inline double parse_score_value(const std::string& text, std::size_t row) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ParseError("score '" + text + "' is not numeric", row);
    }
    if (used != text.size()) throw ParseError("score '" + text + "' is not numeric", row);
    if (value < 0.0 || value > 100.0)
        throw ParseError("score " + text + " outside [0,100]", row);
    return value;
}

inline void require_header(const std::vector<std::string>& actual,
                           const std::vector<std::string>& expected) {
    if (actual != expected) {
        std::string want;
        for (std::size_t k = 0; k < expected.size(); ++k)
            want += (k ? "," : "") + expected[k];
        throw ParseError("expected header '" + want + "'", 1);
    }
}

}  // namespace detail

inline const std::vector<std::string>& team_list_header() {
    static const std::vector<std::string> header = {"ID",    "Grade",    "Class", "Course",
                                                    "Score", "LeaderNo", "Topic"};
    return header;
}

inline const std::vector<std::string>& score_table_header() {
    static const std::vector<std::string> header = {"TeamID", "StudentNo", "Score"};
    return header;
}

/// Parses the roster file (one row per team per activity). Course names are
/// mapped to activity ordinals through `course_order`; an unknown course is a
/// hard error. Member sets stay empty here -- the roster schema has no member
/// column, membership is joined in later from the score table.
inline std::vector<TeamRecord> parse_team_list(std::istream& in,
                                               const std::vector<std::string>& course_order,
                                               std::vector<Diagnostic>& diagnostics,
                                               char delim = ',') {
    std::map<std::string, int> ordinal_of;
    for (std::size_t k = 0; k < course_order.size(); ++k) {
        if (!ordinal_of.emplace(course_order[k], static_cast<int>(k) + 1).second)
            throw ConfigError("course '" + course_order[k] + "' listed twice in course order");
    }

    const auto rows = csv::read_table(in, delim);
    if (rows.empty()) return {};
    detail::require_header(rows[0], team_list_header());

    std::vector<TeamRecord> teams;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const auto& fields = rows[k];
        const std::size_t row = k + 1;
        if (fields.size() != team_list_header().size())
            throw ParseError("expected " + std::to_string(team_list_header().size()) +
                                 " columns, found " + std::to_string(fields.size()),
                             row);
        TeamRecord team;
        team.team_id = fields[0];
        if (team.team_id.empty()) throw ParseError("empty team ID", row);
        team.grade = fields[1];
        team.class_id = fields[2];
        auto course = ordinal_of.find(fields[3]);
        if (course == ordinal_of.end())
            throw ParseError("course '" + fields[3] + "' is not in the configured course order",
                             row);
        team.activity_ordinal = course->second;
        if (!fields[4].empty()) team.team_score = detail::parse_score_value(fields[4], row);
        if (!fields[5].empty())
            team.leader = fields[5];
        else
            diagnostics.push_back({row, "team '" + team.team_id + "' has no leader"});
        if (!fields[6].empty()) team.topic = fields[6];
        teams.push_back(std::move(team));
    }
    return teams;
}

/// Parses the individual score file. Scores are kept exactly as read.
inline std::vector<IndividualScoreRecord> parse_scores(std::istream& in, char delim = ',') {
    const auto rows = csv::read_table(in, delim);
    if (rows.empty()) return {};
    detail::require_header(rows[0], score_table_header());

    std::vector<IndividualScoreRecord> records;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const auto& fields = rows[k];
        const std::size_t row = k + 1;
        if (fields.size() != score_table_header().size())
            throw ParseError("expected 3 columns, found " + std::to_string(fields.size()), row);
        if (fields[0].empty()) throw ParseError("empty team ID", row);
        if (fields[1].empty()) throw ParseError("empty student number", row);
        records.push_back({fields[0], fields[1], detail::parse_score_value(fields[2], row)});
    }
    return records;
}

/// Activity list implied by a parsed roster: ordinals 1 up to the highest
/// course observed, labelled from the course order. Earlier courses without
/// any team row still count as activities (nobody cooperated then).
inline std::vector<Activity> derive_activities(const std::vector<TeamRecord>& teams,
                                               const std::vector<std::string>& course_order) {
    int highest = 0;
    for (const TeamRecord& team : teams) highest = std::max(highest, team.activity_ordinal);
    std::vector<Activity> activities;
    for (int q = 1; q <= highest && q <= static_cast<int>(course_order.size()); ++q)
        activities.push_back({q, course_order[static_cast<std::size_t>(q) - 1]});
    return activities;
}

/// Consolidates parsed rosters and scores into a validated Cohort.
///
/// Membership is reconstructed from the score table's (TeamID, StudentNo)
/// pairs plus the roster's LeaderNo column -- the only join paths the schema
/// offers. A team whose reconstructable membership stays below 2 (typical for
/// truncated extracts) is dropped with a warning, along with any score rows
/// that pointed at it.
inline Cohort build_cohort(const std::vector<TeamRecord>& teams,
                           const std::vector<IndividualScoreRecord>& scores,
                           const std::vector<Activity>& activities,
                           std::vector<Diagnostic>& diagnostics) {
    Cohort cohort;
    cohort.activities = activities;
    std::sort(cohort.activities.begin(), cohort.activities.end(),
              [](const Activity& a, const Activity& b) { return a.ordinal < b.ordinal; });
    const int m = cohort.activity_count();
    for (int q = 0; q < m; ++q) {
        if (cohort.activities[static_cast<std::size_t>(q)].ordinal != q + 1)
            throw ConsistencyError("activity ordinals must be exactly 1.." + std::to_string(m));
    }
    if (m == 0) throw ConsistencyError("cohort needs at least 1 activity");

    std::map<TeamId, TeamRecord> team_by_id;
    for (const TeamRecord& team : teams) {
        if (team.activity_ordinal < 1 || team.activity_ordinal > m)
            throw ConsistencyError("team '" + team.team_id + "' references activity " +
                                   std::to_string(team.activity_ordinal) +
                                   " outside the activity list");
        if (!team_by_id.emplace(team.team_id, team).second)
            throw ConsistencyError("duplicate team id '" + team.team_id + "'");
    }

    std::set<std::pair<TeamId, StudentId>> score_keys;
    for (const IndividualScoreRecord& record : scores) {
        auto team = team_by_id.find(record.team_id);
        if (team == team_by_id.end())
            throw ConsistencyError("score for '" + record.student + "' references unknown team '" +
                                   record.team_id + "'");
        if (!score_keys.insert({record.team_id, record.student}).second)
            throw ConsistencyError("duplicate score for ('" + record.team_id + "', '" +
                                   record.student + "')");
        team->second.members.insert(record.student);
    }
    for (auto& [id, team] : team_by_id)
        if (team.leader) team.members.insert(*team.leader);

    std::set<TeamId> dropped;
    for (auto it = team_by_id.begin(); it != team_by_id.end();) {
        TeamRecord& team = it->second;
        if (team.members.size() < 2) {
            diagnostics.push_back({0, "team '" + team.team_id + "': only " +
                                          std::to_string(team.members.size()) +
                                          " member(s) reconstructable; dropped"});
            dropped.insert(team.team_id);
            it = team_by_id.erase(it);
            continue;
        }
        if (team.members.size() < 3 || team.members.size() > 5)
            diagnostics.push_back({0, "team '" + team.team_id + "': size " +
                                          std::to_string(team.members.size()) +
                                          " outside the usual 3..5"});
        ++it;
    }

    for (auto& [id, team] : team_by_id) cohort.teams.push_back(std::move(team));
    std::sort(cohort.teams.begin(), cohort.teams.end(),
              [](const TeamRecord& a, const TeamRecord& b) {
                  return std::tie(a.activity_ordinal, a.team_id) <
                         std::tie(b.activity_ordinal, b.team_id);
              });

    // double-membership check, with the offending student and activity named
    std::vector<std::map<StudentId, TeamId>> assignment(static_cast<std::size_t>(m));
    std::set<StudentId> student_set;
    for (const TeamRecord& team : cohort.teams) {
        auto& seen = assignment[static_cast<std::size_t>(team.activity_ordinal) - 1];
        for (const StudentId& member : team.members) {
            if (member.empty()) throw ConsistencyError("empty student id in team '" + team.team_id + "'");
            auto [it, fresh] = seen.emplace(member, team.team_id);
            if (!fresh)
                throw ConsistencyError("student '" + member + "' appears in teams '" + it->second +
                                       "' and '" + team.team_id + "' of activity " +
                                       std::to_string(team.activity_ordinal));
            student_set.insert(member);
        }
    }
    cohort.students.assign(student_set.begin(), student_set.end());

    for (const IndividualScoreRecord& record : scores) {
        if (dropped.count(record.team_id)) {
            diagnostics.push_back({0, "score for '" + record.student + "' in dropped team '" +
                                          record.team_id + "' discarded"});
            continue;
        }
        cohort.scores.push_back(record);
    }
    std::sort(cohort.scores.begin(), cohort.scores.end(),
              [](const IndividualScoreRecord& a, const IndividualScoreRecord& b) {
                  return std::tie(a.team_id, a.student) < std::tie(b.team_id, b.student);
              });

    validate_cohort(cohort);
    return cohort;
}

}  // namespace teamstab
