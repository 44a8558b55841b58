// teamstab: per-student team stability metrics over consecutive cooperative
// activities, plus the score regression and a simulation bed.
//
// Exit codes: 0 success, 1 parse/configuration/IO error, 2 consistency error,
// 3 collinear regression input.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "teamstab/cohort.hpp"
#include "teamstab/csv.hpp"
#include "teamstab/errors.hpp"
#include "teamstab/ingest.hpp"
#include "teamstab/network.hpp"
#include "teamstab/stability.hpp"
#include "teamstab/stats.hpp"
#include "teamstab/synth.hpp"

namespace {

using namespace teamstab;

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read '" + path + "'");
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    return out;
}

char single_delimiter(const std::string& text) {
    if (text.size() != 1) throw ConfigError("delimiter must be a single character");
    return text[0];
}

void print_diagnostics(const std::vector<Diagnostic>& diagnostics) {
    for (const Diagnostic& d : diagnostics) {
        if (d.row > 0)
            std::cerr << "warning: row " << d.row << ": " << d.message << '\n';
        else
            std::cerr << "warning: " << d.message << '\n';
    }
}

std::string format_fixed(double value, int decimals) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*f", decimals, value);
    return buffer;
}

// --- ingest ------------------------------------------------------------------

struct IngestArgs {
    std::string teams_path, scores_path, output = "cohort.json";
    std::string courses, courses_file, delimiter = ",";
};

void run_ingest(const IngestArgs& args) {
    std::vector<std::string> course_order;
    if (!args.courses_file.empty()) {
        auto in = open_input(args.courses_file);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) course_order.push_back(line);
        }
    } else {
        for (auto& field : csv::split_record(args.courses, ','))
            if (!field.empty()) course_order.push_back(field);
    }
    if (course_order.empty()) throw ConfigError("no course order given (--courses or --courses-file)");

    const char delim = single_delimiter(args.delimiter);
    std::vector<Diagnostic> diagnostics;
    auto teams_in = open_input(args.teams_path);
    const auto teams = parse_team_list(teams_in, course_order, diagnostics, delim);
    auto scores_in = open_input(args.scores_path);
    const auto scores = parse_scores(scores_in, delim);
    const auto activities = derive_activities(teams, course_order);

    const Cohort cohort = build_cohort(teams, scores, activities, diagnostics);
    print_diagnostics(diagnostics);
    save_cohort(cohort, args.output);
    std::cerr << "wrote " << args.output << ": " << cohort.students.size() << " students, "
              << cohort.activities.size() << " activities, " << cohort.teams.size() << " teams\n";
}

// --- compute -----------------------------------------------------------------

struct ComputeArgs {
    std::string cohort_path, output = "finalresults.csv", edges_path;
    std::string format = "csv", delimiter = ",";
    double delta = 0.36787944117144233;
    int precision = 2;
    bool full_precision = false;
};

void run_compute(const ComputeArgs& args) {
    const DampingConfig config{args.delta};
    validate_damping(config);
    const Cohort cohort = load_cohort(args.cohort_path);
    const auto rows = final_results(cohort, config);

    auto out = open_output(args.output);
    if (args.format == "json") {
        nlohmann::ordered_json doc;
        doc["delta"] = config.delta;
        doc["rows"] = nlohmann::ordered_json::array();
        for (const StabilityRow& row : rows) {
            nlohmann::ordered_json entry;
            entry["student"] = row.student;
            entry["stability"] = row.stability;
            entry["mean_score"] = row.mean_score ? nlohmann::ordered_json(*row.mean_score)
                                                 : nlohmann::ordered_json(nullptr);
            doc["rows"].push_back(std::move(entry));
        }
        out << doc.dump(2) << '\n';
    } else {
        write_final_results(out, rows, args.full_precision ? -1 : args.precision,
                            single_delimiter(args.delimiter));
    }

    if (!args.edges_path.empty()) {
        auto edges = open_output(args.edges_path);
        write_edge_list(edges, cooperation_counts(cohort), single_delimiter(args.delimiter));
    }
    std::cerr << "wrote " << args.output << ": " << rows.size() << " students\n";
}

// --- report ------------------------------------------------------------------

struct ReportArgs {
    std::string cohort_path, output = "report.json";
    double delta = 0.36787944117144233;
};

void run_report(const ReportArgs& args) {
    const DampingConfig config{args.delta};
    validate_damping(config);
    const Cohort cohort = load_cohort(args.cohort_path);
    nlohmann::ordered_json doc = stability_report_json(cohort, config);

    // attach the score regression when the data supports one
    RegressionInput input;
    std::vector<double> stability;
    for (const auto& entry : doc.at("students")) {
        if (entry.at("mean_score").is_null()) continue;
        stability.push_back(entry.at("stability").get<double>());
        input.response.push_back(entry.at("mean_score").get<double>());
    }
    doc["regression"] = nullptr;
    if (input.response.size() >= 3) {
        input.add_predictor("S", stability);
        try {
            doc["regression"] = regression_to_json(ols_fit(input));
        } catch (const Error& e) {
            std::cerr << "note: regression skipped: " << e.what() << '\n';
        }
    }
    auto out = open_output(args.output);
    out << doc.dump(2) << '\n';
    std::cerr << "wrote " << args.output << '\n';
}

// --- regress -----------------------------------------------------------------

struct RegressArgs {
    std::string input_path, json_output;
    std::vector<std::string> feature_paths;
    std::string delimiter = ",";
};

void run_regress(const RegressArgs& args) {
    const char delim = single_delimiter(args.delimiter);
    auto in = open_input(args.input_path);
    const auto rows = csv::read_table(in, delim);
    if (rows.empty()) throw ParseError("'" + args.input_path + "' is empty");
    if (rows[0] != std::vector<std::string>{"StudentNo", "S", "MeanScore"})
        throw ParseError("expected header 'StudentNo,S,MeanScore'", 1);

    std::vector<std::string> students;
    std::vector<double> s_values, responses;
    std::size_t skipped = 0;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        if (rows[k].size() != 3)
            throw ParseError("expected 3 columns, found " + std::to_string(rows[k].size()), k + 1);
        if (rows[k][2].empty()) {
            ++skipped;  // student without any score
            continue;
        }
        students.push_back(rows[k][0]);
        try {
            s_values.push_back(std::stod(rows[k][1]));
            responses.push_back(std::stod(rows[k][2]));
        } catch (const std::exception&) {
            throw ParseError("non-numeric value", k + 1);
        }
    }
    if (skipped > 0) std::cerr << "note: skipped " << skipped << " unscored student(s)\n";

    RegressionInput input;
    input.response = responses;
    input.add_predictor("S", s_values);

    for (const std::string& path : args.feature_paths) {
        auto feature_in = open_input(path);
        const auto table = csv::read_table(feature_in, delim);
        if (table.size() < 2 || table[0].size() < 2 || table[0][0] != "StudentNo")
            throw ParseError("'" + path + "': expected header 'StudentNo,<feature>[,...]'", 1);
        std::map<std::string, std::vector<double>> by_student;
        for (std::size_t k = 1; k < table.size(); ++k) {
            if (table[k].size() != table[0].size())
                throw ParseError("'" + path + "': ragged row", k + 1);
            std::vector<double> values;
            for (std::size_t c = 1; c < table[k].size(); ++c) {
                try {
                    values.push_back(std::stod(table[k][c]));
                } catch (const std::exception&) {
                    throw ParseError("'" + path + "': non-numeric value", k + 1);
                }
            }
            by_student[table[k][0]] = std::move(values);
        }
        for (std::size_t c = 1; c < table[0].size(); ++c) {
            std::vector<double> column;
            for (const std::string& student : students) {
                auto it = by_student.find(student);
                if (it == by_student.end())
                    throw ConsistencyError("'" + path + "' has no row for student '" + student +
                                           "'");
                column.push_back(it->second[c - 1]);
            }
            input.add_predictor(table[0][c], std::move(column));
        }
    }

    const RegressionResult result = multivariate_fit(input);
    std::cout << render_regression_table(result);
    if (!args.json_output.empty()) {
        auto out = open_output(args.json_output);
        out << regression_to_json(result).dump(2) << '\n';
    }
}

// --- simulate ----------------------------------------------------------------

struct SimulateArgs {
    std::string policy = "fully_stable";
    double churn_rate = 0.0;
    int students = 30, activities = 4, team_min = 3, team_max = 5;
    std::uint64_t seed = 0;
    double base = 82.114, coeff = 0.502, noise_sd = 0.0;
    double delta = 0.36787944117144233;
    std::string output = "cohort.json", teams_csv, scores_csv;
    bool fit = false;
};

void run_simulate(const SimulateArgs& args) {
    TeamingPolicy policy;
    if (args.policy == "fully_stable")
        policy.kind = PolicyKind::fully_stable;
    else if (args.policy == "random_each_activity")
        policy.kind = PolicyKind::random_each_activity;
    else if (args.policy == "churn")
        policy.kind = PolicyKind::churn;
    else
        throw ConfigError("unknown policy '" + args.policy + "'");
    policy.churn_rate = args.churn_rate;
    policy.n_students = args.students;
    policy.m_activities = args.activities;
    policy.team_size_min = args.team_min;
    policy.team_size_max = args.team_max;
    policy.seed = args.seed;

    const DampingConfig config{args.delta};
    validate_damping(config);

    Cohort cohort = generate_cohort(policy);
    const auto bare_rows = final_results(cohort, config);
    std::map<StudentId, double> stability;
    for (const StabilityRow& row : bare_rows) stability[row.student] = row.stability;

    ScoreModel model;
    model.base = args.base;
    model.stability_coeff = args.coeff;
    model.noise_sd = args.noise_sd;
    model.seed = args.seed ^ 0x9e3779b97f4a7c15ULL;  // derived stream, still one seed flag
    const GeneratedScores generated = generate_scores(cohort, model, stability);
    cohort.scores = generated.records;
    validate_cohort(cohort);
    save_cohort(cohort, args.output);

    if (!args.teams_csv.empty()) {
        auto out = open_output(args.teams_csv);
        csv::write_record(out, team_list_header(), ',');
        for (const TeamRecord& team : cohort.teams)
            csv::write_record(out,
                              {team.team_id, team.grade, team.class_id,
                               cohort.activities[static_cast<std::size_t>(team.activity_ordinal) - 1].label,
                               "", team.leader ? *team.leader : "", team.topic ? *team.topic : ""},
                              ',');
    }
    if (!args.scores_csv.empty()) {
        auto out = open_output(args.scores_csv);
        csv::write_record(out, score_table_header(), ',');
        char value[64];
        for (const IndividualScoreRecord& record : cohort.scores) {
            std::snprintf(value, sizeof value, "%.17g", record.score);
            csv::write_record(out, {record.team_id, record.student, value}, ',');
        }
    }

    double min_s = bare_rows.front().stability, max_s = min_s, sum_s = 0.0;
    for (const StabilityRow& row : bare_rows) {
        min_s = std::min(min_s, row.stability);
        max_s = std::max(max_s, row.stability);
        sum_s += row.stability;
    }
    std::cout << "policy: " << args.policy << '\n'
              << "students: " << policy.n_students << "  activities: " << policy.m_activities
              << "  teams: " << cohort.teams.size() << '\n'
              << "mean S: " << format_fixed(sum_s / static_cast<double>(bare_rows.size()), 6)
              << "  min S: " << format_fixed(min_s, 6) << "  max S: " << format_fixed(max_s, 6)
              << '\n'
              << "clamped scores: " << generated.clamped << '\n';

    if (args.fit) {
        const auto scored = final_results(cohort, config);
        RegressionInput input;
        std::vector<double> s_column;
        for (const StabilityRow& row : scored) {
            if (!row.mean_score) continue;
            s_column.push_back(row.stability);
            input.response.push_back(*row.mean_score);
        }
        input.add_predictor("S", std::move(s_column));
        try {
            const RegressionResult result = ols_fit(input);
            std::cout << "fit: slope " << format_fixed(result.coefficient("S"), 6) << "  intercept "
                      << format_fixed(result.coefficient("Constant"), 6) << "  p "
                      << format_fixed(result.p_value("S"), 6) << "  R-squared "
                      << format_fixed(result.r_squared, 6) << '\n';
        } catch (const SingularityError&) {
            std::cout << "fit: not possible (stability has no variation)\n";
        }
    }
    std::cerr << "wrote " << args.output << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"team stability metrics for consecutive cooperative learning activities"};
    app.require_subcommand(1);

    IngestArgs ingest_args;
    auto* ingest_cmd = app.add_subcommand(
        "ingest", "consolidate roster and score files into a cohort file");
    ingest_cmd->add_option("--teams", ingest_args.teams_path, "roster file (TeamList layout)")
        ->required();
    ingest_cmd->add_option("--scores", ingest_args.scores_path, "individual score file")
        ->required();
    ingest_cmd->add_option("--courses", ingest_args.courses,
                           "comma-separated course names in activity order");
    ingest_cmd->add_option("--courses-file", ingest_args.courses_file,
                           "file with one course name per line");
    ingest_cmd->add_option("-o,--output", ingest_args.output, "cohort file to write");
    ingest_cmd->add_option("--delimiter", ingest_args.delimiter, "input field delimiter");

    ComputeArgs compute_args;
    auto* compute_cmd =
        app.add_subcommand("compute", "stability factors and mean scores per student");
    compute_cmd->add_option("--cohort", compute_args.cohort_path, "cohort file")->required();
    compute_cmd->add_option("-o,--output", compute_args.output, "results file to write");
    compute_cmd->add_option("--delta", compute_args.delta, "damping base in (0,1]");
    compute_cmd->add_option("--precision", compute_args.precision, "decimals in the table");
    compute_cmd->add_flag("--full-precision", compute_args.full_precision,
                          "write round-trip precision values");
    compute_cmd->add_option("--format", compute_args.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    compute_cmd->add_option("--edges", compute_args.edges_path,
                            "also write the pairwise cooperation edge list");
    compute_cmd->add_option("--delimiter", compute_args.delimiter, "output field delimiter");

    ReportArgs report_args;
    auto* report_cmd = app.add_subcommand(
        "report", "full-precision audit report with per-pair breakdowns");
    report_cmd->add_option("--cohort", report_args.cohort_path, "cohort file")->required();
    report_cmd->add_option("-o,--output", report_args.output, "report file to write");
    report_cmd->add_option("--delta", report_args.delta, "damping base in (0,1]");

    RegressArgs regress_args;
    auto* regress_cmd =
        app.add_subcommand("regress", "regress mean score on stability (plus extra features)");
    regress_cmd->add_option("--input", regress_args.input_path, "results file from compute")
        ->required();
    regress_cmd->add_option("--features", regress_args.feature_paths,
                            "extra feature files keyed by StudentNo");
    regress_cmd->add_option("-o,--json-output", regress_args.json_output,
                            "also write the result as JSON");
    regress_cmd->add_option("--delimiter", regress_args.delimiter, "field delimiter");

    SimulateArgs simulate_args;
    auto* simulate_cmd =
        app.add_subcommand("simulate", "generate a synthetic cohort under a teaming policy");
    simulate_cmd
        ->add_option("--policy", simulate_args.policy,
                     "fully_stable, random_each_activity, or churn")
        ->check(CLI::IsMember({"fully_stable", "random_each_activity", "churn"}));
    simulate_cmd->add_option("--churn-rate", simulate_args.churn_rate,
                             "per-transition move probability (churn policy)");
    simulate_cmd->add_option("--students", simulate_args.students, "cohort size");
    simulate_cmd->add_option("--activities", simulate_args.activities, "number of activities");
    simulate_cmd->add_option("--team-min", simulate_args.team_min, "smallest team size");
    simulate_cmd->add_option("--team-max", simulate_args.team_max, "largest team size");
    simulate_cmd->add_option("--seed", simulate_args.seed, "random seed for the whole run");
    simulate_cmd->add_option("--base", simulate_args.base, "score model intercept");
    simulate_cmd->add_option("--coeff", simulate_args.coeff, "score model stability coefficient");
    simulate_cmd->add_option("--noise-sd", simulate_args.noise_sd, "score noise stddev");
    simulate_cmd->add_option("--delta", simulate_args.delta, "damping base in (0,1]");
    simulate_cmd->add_option("-o,--output", simulate_args.output, "cohort file to write");
    simulate_cmd->add_option("--teams-csv", simulate_args.teams_csv,
                             "also write a roster file in TeamList layout");
    simulate_cmd->add_option("--scores-csv", simulate_args.scores_csv,
                             "also write an individual score file");
    simulate_cmd->add_flag("--fit", simulate_args.fit, "fit mean score on S and print the slope");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (ingest_cmd->parsed()) run_ingest(ingest_args);
        if (compute_cmd->parsed()) run_compute(compute_args);
        if (report_cmd->parsed()) run_report(report_args);
        if (regress_cmd->parsed()) run_regress(regress_args);
        if (simulate_cmd->parsed()) run_simulate(simulate_args);
        return 0;
    } catch (const SingularityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const ConsistencyError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
