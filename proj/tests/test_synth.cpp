#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "teamstab/stability.hpp"
#include "teamstab/stats.hpp"
#include "teamstab/synth.hpp"

#include "fixtures.hpp"

using namespace teamstab;
using Catch::Matchers::WithinRel;

namespace {

double mean_stability(const Cohort& cohort, double delta = default_damping()) {
    const auto rows = final_results(cohort, {delta});
    double total = 0.0;
    for (const auto& row : rows) total += row.stability;
    return total / static_cast<double>(rows.size());
}

TeamingPolicy policy_of(PolicyKind kind, int n, int m, int lo, int hi, std::uint64_t seed,
                        double rate = 0.0) {
    TeamingPolicy policy;
    policy.kind = kind;
    policy.n_students = n;
    policy.m_activities = m;
    policy.team_size_min = lo;
    policy.team_size_max = hi;
    policy.seed = seed;
    policy.churn_rate = rate;
    return policy;
}

}  // namespace

TEST_CASE("same policy and seed give the identical cohort") {
    const auto policy = policy_of(PolicyKind::random_each_activity, 20, 4, 3, 5, 42);
    const Cohort first = generate_cohort(policy);
    const Cohort second = generate_cohort(policy);
    CHECK(first == second);
    CHECK(cohort_to_json(first).dump() == cohort_to_json(second).dump());

    auto other = policy;
    other.seed = 43;
    CHECK(generate_cohort(other) != first);
}

TEST_CASE("fully stable teams of three keep every stability factor at the golden value") {
    const Cohort cohort = generate_cohort(policy_of(PolicyKind::fully_stable, 6, 4, 3, 3, 7));
    const double series =
        std::exp(-3.0) + std::exp(-2.0) + std::exp(-1.0) + 1.0;  // sum of e^-(m-q)
    for (const auto& row : final_results(cohort))
        CHECK_THAT(row.stability, WithinRel(2.0 * series, 1e-12));
}

TEST_CASE("zero churn degenerates to fully stable") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Cohort stable = generate_cohort(policy_of(PolicyKind::fully_stable, 15, 3, 3, 5, seed));
        const Cohort churned =
            generate_cohort(policy_of(PolicyKind::churn, 15, 3, 3, 5, seed, 0.0));
        CHECK(stable == churned);
    }
}

TEST_CASE("infeasible partitions are configuration errors") {
    CHECK_THROWS_AS(generate_cohort(policy_of(PolicyKind::fully_stable, 4, 1, 5, 5, 1)),
                    ConfigError);
    CHECK_THROWS_AS(generate_cohort(policy_of(PolicyKind::fully_stable, 7, 1, 3, 3, 1)),
                    ConfigError);
    CHECK_THROWS_AS(generate_cohort(policy_of(PolicyKind::fully_stable, 30, 0, 3, 5, 1)),
                    ConfigError);
    CHECK_THROWS_AS(generate_cohort(policy_of(PolicyKind::churn, 30, 4, 3, 5, 1, 1.5)),
                    ConfigError);
    CHECK_THROWS_AS(generate_cohort(policy_of(PolicyKind::fully_stable, 30, 4, 5, 3, 1)),
                    ConfigError);
}

TEST_CASE("every generated cohort satisfies the ingestion invariants") {
    for (std::uint64_t seed = 500; seed < 560; ++seed) {
        const Cohort cohort = fixtures::random_small(seed, 16, 4);
        CHECK_NOTHROW(validate_cohort(cohort));
        CHECK(cohort.activities.front().ordinal == 1);
        // every student is placed exactly once per activity
        for (int q = 1; q <= cohort.activity_count(); ++q) {
            std::size_t placed = 0;
            for (const TeamRecord& team : cohort.teams)
                if (team.activity_ordinal == q) placed += team.members.size();
            CHECK(placed == cohort.students.size());
        }
    }
}

TEST_CASE("stable cohorts have higher mean stability than random ones") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const double stable =
            mean_stability(generate_cohort(policy_of(PolicyKind::fully_stable, 30, 4, 3, 5, seed)));
        const double random = mean_stability(
            generate_cohort(policy_of(PolicyKind::random_each_activity, 30, 4, 3, 5, seed)));
        CHECK(stable > random);
    }
}

TEST_CASE("full churn follows the same partition law as fresh random teams") {
    // distributional check: mean stability over many seeds must agree between
    // churn(1) and random_each_activity well within sampling noise
    const int seeds = 1000;
    std::vector<double> churn_means, random_means;
    for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
        churn_means.push_back(
            mean_stability(generate_cohort(policy_of(PolicyKind::churn, 12, 3, 3, 4, seed, 1.0))));
        random_means.push_back(mean_stability(
            generate_cohort(policy_of(PolicyKind::random_each_activity, 12, 3, 3, 4, seed ^ 0xabcd))));
    }
    auto mean_sd = [](const std::vector<double>& values) {
        const double mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
        double var = 0.0;
        for (double v : values) var += (v - mean) * (v - mean);
        return std::make_pair(mean, std::sqrt(var / (values.size() - 1)));
    };
    const auto [churn_mean, churn_sd] = mean_sd(churn_means);
    const auto [random_mean, random_sd] = mean_sd(random_means);
    const double se =
        std::sqrt(churn_sd * churn_sd / seeds + random_sd * random_sd / seeds);
    CHECK(std::fabs(churn_mean - random_mean) < 5.0 * se);
}

TEST_CASE("score generation follows the configured line exactly when noiseless") {
    const Cohort cohort = generate_cohort(policy_of(PolicyKind::fully_stable, 6, 2, 3, 3, 3));
    std::map<StudentId, double> stability;
    for (const StudentId& s : cohort.students) stability[s] = 2.0;

    ScoreModel model;  // base 82.114, coefficient 0.502, no noise
    const GeneratedScores scores = generate_scores(cohort, model, stability);
    REQUIRE(scores.records.size() == 12);  // 6 students x 2 activities
    CHECK(scores.clamped == 0);
    for (const auto& record : scores.records)
        CHECK_THAT(record.score, WithinRel(82.114 + 0.502 * 2.0, 1e-12));
}

TEST_CASE("scores are clamped into range and counted") {
    const Cohort cohort = generate_cohort(policy_of(PolicyKind::fully_stable, 6, 1, 3, 3, 3));
    std::map<StudentId, double> stability;
    for (const StudentId& s : cohort.students) stability[s] = 50.0;
    ScoreModel model;
    model.base = 90.0;
    model.stability_coeff = 1.0;  // 90 + 50 = 140 before clamping
    const GeneratedScores scores = generate_scores(cohort, model, stability);
    CHECK(scores.clamped == static_cast<int>(scores.records.size()));
    for (const auto& record : scores.records) CHECK(record.score == 100.0);
}

TEST_CASE("generated scores attach to a cohort as valid ingestion data") {
    const Cohort bare = generate_cohort(policy_of(PolicyKind::churn, 20, 4, 3, 5, 9, 0.3));
    std::map<StudentId, double> stability;
    for (const auto& row : final_results(bare)) stability[row.student] = row.stability;
    ScoreModel model;
    model.noise_sd = 4.0;
    model.seed = 10;

    Cohort cohort = bare;
    cohort.scores = generate_scores(bare, model, stability).records;
    CHECK_NOTHROW(validate_cohort(cohort));

    // same model seed, same records
    CHECK(generate_scores(bare, model, stability).records == cohort.scores);
}

TEST_CASE("unknown stability entry is a lookup error") {
    const Cohort cohort = generate_cohort(policy_of(PolicyKind::fully_stable, 6, 1, 3, 3, 3));
    std::map<StudentId, double> stability;  // empty on purpose
    CHECK_THROWS_AS(generate_scores(cohort, {}, stability), LookupError);
}

TEST_CASE("a zero coefficient leaves the fitted slope near zero") {
    const Cohort bare = generate_cohort(policy_of(PolicyKind::churn, 60, 4, 3, 5, 21, 0.4));
    std::map<StudentId, double> stability;
    std::vector<double> s_column;
    for (const auto& row : final_results(bare)) {
        stability[row.student] = row.stability;
        s_column.push_back(row.stability);
    }
    ScoreModel model;
    model.stability_coeff = 0.0;
    model.noise_sd = 3.0;
    model.seed = 77;
    const GeneratedScores scores = generate_scores(bare, model, stability);

    std::map<StudentId, std::pair<double, int>> sums;
    for (const auto& record : scores.records) {
        sums[record.student].first += record.score;
        sums[record.student].second += 1;
    }
    RegressionInput input;
    for (const auto& row : final_results(bare)) {
        const auto& [sum, count] = sums.at(row.student);
        input.response.push_back(sum / count);
    }
    input.add_predictor("S", s_column);
    const auto fit = ols_fit(input);
    CHECK(std::fabs(fit.coefficient("S")) <= 4.0 * fit.std_errors[1]);
}
