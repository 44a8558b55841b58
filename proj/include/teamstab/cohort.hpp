#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "teamstab/errors.hpp"

namespace teamstab {

using StudentId = std::string;
using TeamId = std::string;

/// One cooperative learning activity, position `ordinal` of m in the sequence.
struct Activity {
    int ordinal = 0;
    std::string label;

    friend bool operator==(const Activity&, const Activity&) = default;
};

struct TeamRecord {
    TeamId team_id;
    int activity_ordinal = 0;
    std::set<StudentId> members;
    std::optional<double> team_score;        // team-level score, carried but not analyzed
    std::optional<std::string> topic;
    std::optional<StudentId> leader;
    std::string grade;                       // pass-through roster fields
    std::string class_id;

    friend bool operator==(const TeamRecord&, const TeamRecord&) = default;
};

struct IndividualScoreRecord {
    TeamId team_id;
    StudentId student;
    double score = 0.0;

    friend bool operator==(const IndividualScoreRecord&, const IndividualScoreRecord&) = default;
};

/// Canonical, immutable-after-construction view of a cohort: who took part,
/// in which order the activities ran, who teamed with whom, who scored what.
struct Cohort {
    std::vector<StudentId> students;             // sorted, unique
    std::vector<Activity> activities;            // ordinals exactly 1..m
    std::vector<TeamRecord> teams;               // sorted by (activity_ordinal, team_id)
    std::vector<IndividualScoreRecord> scores;   // sorted by (team_id, student)

    int activity_count() const { return static_cast<int>(activities.size()); }

    bool has_student(const StudentId& id) const {
        return std::binary_search(students.begin(), students.end(), id);
    }

    friend bool operator==(const Cohort&, const Cohort&) = default;
};

/// Checks every structural invariant; throws ConsistencyError on the first
/// violation. The student list may be a superset of team membership (students
/// who never teamed are legal and simply have no relations).
inline void validate_cohort(const Cohort& cohort) {
    if (cohort.students.size() < 2)
        throw ConsistencyError("cohort needs at least 2 students, found " +
                               std::to_string(cohort.students.size()));
    if (cohort.activities.empty())
        throw ConsistencyError("cohort needs at least 1 activity");
    for (std::size_t k = 0; k < cohort.students.size(); ++k) {
        if (cohort.students[k].empty()) throw ConsistencyError("empty student id");
        if (k > 0 && cohort.students[k] <= cohort.students[k - 1])
            throw ConsistencyError("student list not sorted/unique at '" + cohort.students[k] + "'");
    }
    for (std::size_t k = 0; k < cohort.activities.size(); ++k) {
        if (cohort.activities[k].ordinal != static_cast<int>(k) + 1)
            throw ConsistencyError("activity ordinals must be exactly 1.." +
                                   std::to_string(cohort.activities.size()));
    }

    const int m = cohort.activity_count();
    std::set<TeamId> team_ids;
    std::map<TeamId, const TeamRecord*> team_by_id;
    // per activity: student -> team, to reject double membership
    std::vector<std::map<StudentId, TeamId>> assignment(static_cast<std::size_t>(m));
    for (const TeamRecord& team : cohort.teams) {
        if (team.team_id.empty()) throw ConsistencyError("empty team id");
        if (!team_ids.insert(team.team_id).second)
            throw ConsistencyError("duplicate team id '" + team.team_id + "'");
        team_by_id[team.team_id] = &team;
        if (team.activity_ordinal < 1 || team.activity_ordinal > m)
            throw ConsistencyError("team '" + team.team_id + "' references activity " +
                                   std::to_string(team.activity_ordinal) + " outside 1.." +
                                   std::to_string(m));
        if (team.members.size() < 2)
            throw ConsistencyError("team '" + team.team_id + "' has fewer than 2 members");
        if (team.team_score && (*team.team_score < 0.0 || *team.team_score > 100.0))
            throw ConsistencyError("team '" + team.team_id + "' score outside [0,100]");
        if (team.leader && team.members.count(*team.leader) == 0)
            throw ConsistencyError("leader '" + *team.leader + "' is not a member of team '" +
                                   team.team_id + "'");
        auto& seen = assignment[static_cast<std::size_t>(team.activity_ordinal) - 1];
        for (const StudentId& member : team.members) {
            if (!cohort.has_student(member))
                throw ConsistencyError("team member '" + member + "' missing from student list");
            auto [it, fresh] = seen.emplace(member, team.team_id);
            if (!fresh)
                throw ConsistencyError("student '" + member + "' appears in teams '" + it->second +
                                       "' and '" + team.team_id + "' of activity " +
                                       std::to_string(team.activity_ordinal));
        }
    }

    std::set<std::pair<TeamId, StudentId>> score_keys;
    for (const IndividualScoreRecord& record : cohort.scores) {
        auto team = team_by_id.find(record.team_id);
        if (team == team_by_id.end())
            throw ConsistencyError("score references unknown team '" + record.team_id + "'");
        if (team->second->members.count(record.student) == 0)
            throw ConsistencyError("score for '" + record.student + "' who is not in team '" +
                                   record.team_id + "'");
        if (record.score < 0.0 || record.score > 100.0)
            throw ConsistencyError("score for '" + record.student + "' outside [0,100]");
        if (!score_keys.insert({record.team_id, record.student}).second)
            throw ConsistencyError("duplicate score for ('" + record.team_id + "', '" +
                                   record.student + "')");
    }
}

// --- canonical JSON cohort file ---------------------------------------------

inline nlohmann::ordered_json cohort_to_json(const Cohort& cohort) {
    nlohmann::ordered_json doc;
    doc["students"] = cohort.students;
    doc["activities"] = nlohmann::ordered_json::array();
    for (const Activity& activity : cohort.activities)
        doc["activities"].push_back({{"ordinal", activity.ordinal}, {"label", activity.label}});
    doc["teams"] = nlohmann::ordered_json::array();
    for (const TeamRecord& team : cohort.teams) {
        nlohmann::ordered_json entry;
        entry["team_id"] = team.team_id;
        entry["activity_ordinal"] = team.activity_ordinal;
        entry["members"] = team.members;
        if (team.team_score) entry["team_score"] = *team.team_score;
        if (team.topic) entry["topic"] = *team.topic;
        if (team.leader) entry["leader"] = *team.leader;
        if (!team.grade.empty()) entry["grade"] = team.grade;
        if (!team.class_id.empty()) entry["class"] = team.class_id;
        doc["teams"].push_back(std::move(entry));
    }
    doc["scores"] = nlohmann::ordered_json::array();
    for (const IndividualScoreRecord& record : cohort.scores)
        doc["scores"].push_back({{"team_id", record.team_id},
                                 {"student", record.student},
                                 {"score", record.score}});
    return doc;
}

inline Cohort cohort_from_json(const nlohmann::json& doc) {
    Cohort cohort;
    try {
        cohort.students = doc.at("students").get<std::vector<StudentId>>();
        for (const auto& entry : doc.at("activities"))
            cohort.activities.push_back(
                {entry.at("ordinal").get<int>(), entry.at("label").get<std::string>()});
        for (const auto& entry : doc.at("teams")) {
            TeamRecord team;
            team.team_id = entry.at("team_id").get<TeamId>();
            team.activity_ordinal = entry.at("activity_ordinal").get<int>();
            for (const auto& member : entry.at("members"))
                team.members.insert(member.get<StudentId>());
            if (entry.contains("team_score")) team.team_score = entry["team_score"].get<double>();
            if (entry.contains("topic")) team.topic = entry["topic"].get<std::string>();
            if (entry.contains("leader")) team.leader = entry["leader"].get<StudentId>();
            if (entry.contains("grade")) team.grade = entry["grade"].get<std::string>();
            if (entry.contains("class")) team.class_id = entry["class"].get<std::string>();
            cohort.teams.push_back(std::move(team));
        }
        for (const auto& entry : doc.at("scores"))
            cohort.scores.push_back({entry.at("team_id").get<TeamId>(),
                                     entry.at("student").get<StudentId>(),
                                     entry.at("score").get<double>()});
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad cohort file: ") + e.what());
    }
    validate_cohort(cohort);
    return cohort;
}

inline void save_cohort(const Cohort& cohort, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << cohort_to_json(cohort).dump(2) << '\n';
}

inline Cohort load_cohort(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("'" + path + "' is not valid JSON: " + e.what());
    }
    return cohort_from_json(doc);
}

}  // namespace teamstab
