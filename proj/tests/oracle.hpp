#pragma once

// Independent reference implementations used only by tests. Everything here
// enumerates straight over Cohort::teams / raw vectors, on purpose: these
// must not share a code path with the library functions they check.

#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "teamstab/cohort.hpp"

namespace oracle {

using teamstab::Cohort;
using teamstab::StudentId;
using teamstab::TeamRecord;

inline bool together_in_activity(const Cohort& cohort, int ordinal, const StudentId& a,
                                 const StudentId& b) {
    for (const TeamRecord& team : cohort.teams)
        if (team.activity_ordinal == ordinal && team.members.count(a) && team.members.count(b))
            return true;
    return false;
}

inline bool present_in_activity(const Cohort& cohort, int ordinal, const StudentId& a) {
    for (const TeamRecord& team : cohort.teams)
        if (team.activity_ordinal == ordinal && team.members.count(a)) return true;
    return false;
}

inline int cooperation_count(const Cohort& cohort, const StudentId& a, const StudentId& b) {
    int count = 0;
    for (int q = 1; q <= cohort.activity_count(); ++q)
        if (together_in_activity(cohort, q, a, b)) ++count;
    return count;
}

inline int participation_count(const Cohort& cohort, const StudentId& a) {
    int count = 0;
    for (int q = 1; q <= cohort.activity_count(); ++q)
        if (present_in_activity(cohort, q, a)) ++count;
    return count;
}

inline double relation_strength(const Cohort& cohort, const StudentId& a, const StudentId& b) {
    const int ca = participation_count(cohort, a);
    const int cb = participation_count(cohort, b);
    if (ca == 0 || cb == 0) return 0.0;
    return cooperation_count(cohort, a, b) / std::sqrt(static_cast<double>(ca) * cb);
}

inline double total_relation_strength(const Cohort& cohort, const StudentId& a) {
    double total = 0.0;
    for (const StudentId& b : cohort.students)
        if (b != a) total += relation_strength(cohort, a, b);
    return total;
}

inline int degree_centrality(const Cohort& cohort, const StudentId& a) {
    int degree = 0;
    for (const StudentId& b : cohort.students)
        if (b != a && cooperation_count(cohort, a, b) > 0) ++degree;
    return degree;
}

inline double damped_pair_weight(const Cohort& cohort, double delta, const StudentId& a,
                                 const StudentId& b) {
    const int m = cohort.activity_count();
    double weight = 0.0;
    for (int q = 1; q <= m; ++q)
        if (together_in_activity(cohort, q, a, b)) weight += std::pow(delta, m - q);
    return weight;
}

inline double damped_centrality(const Cohort& cohort, double delta, const StudentId& a) {
    double total = 0.0;
    for (const StudentId& b : cohort.students)
        if (b != a) total += damped_pair_weight(cohort, delta, a, b);
    return total;
}

inline double stability_factor(const Cohort& cohort, double delta, const StudentId& a) {
    double total = 0.0;
    for (const StudentId& b : cohort.students)
        if (b != a) total += damped_pair_weight(cohort, delta, a, b) * relation_strength(cohort, a, b);
    return total;
}

// --- naive normal-equations least squares -----------------------------------

struct NaiveFit {
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    double r_squared = 0.0;
    double adj_r_squared = 0.0;
    double f_statistic = 0.0;
};

/// Solves (X^T X) beta = X^T y by Gauss-Jordan elimination with partial
/// pivoting, inverting X^T X along the way for the standard errors.
inline NaiveFit normal_equations_fit(const std::vector<std::vector<double>>& columns,
                                     const std::vector<double>& response, bool intercept = true) {
    const std::size_t n = response.size();
    std::vector<std::vector<double>> design;
    if (intercept) design.push_back(std::vector<double>(n, 1.0));
    for (const auto& column : columns) design.push_back(column);
    const std::size_t p = design.size();

    std::vector<std::vector<double>> xtx(p, std::vector<double>(p, 0.0));
    std::vector<double> xty(p, 0.0);
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = 0; b < p; ++b)
            for (std::size_t i = 0; i < n; ++i) xtx[a][b] += design[a][i] * design[b][i];
        for (std::size_t i = 0; i < n; ++i) xty[a] += design[a][i] * response[i];
    }

    // augment with identity, reduce, read off inverse and solution
    std::vector<std::vector<double>> work(p, std::vector<double>(2 * p + 1, 0.0));
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = 0; b < p; ++b) work[a][b] = xtx[a][b];
        work[a][p + a] = 1.0;
        work[a][2 * p] = xty[a];
    }
    for (std::size_t col = 0; col < p; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < p; ++r)
            if (std::fabs(work[r][col]) > std::fabs(work[pivot][col])) pivot = r;
        if (work[pivot][col] == 0.0) throw std::runtime_error("oracle: singular normal equations");
        std::swap(work[col], work[pivot]);
        const double lead = work[col][col];
        for (auto& cell : work[col]) cell /= lead;
        for (std::size_t r = 0; r < p; ++r) {
            if (r == col) continue;
            const double factor = work[r][col];
            if (factor == 0.0) continue;
            for (std::size_t c = 0; c <= 2 * p; ++c) work[r][c] -= factor * work[col][c];
        }
    }

    NaiveFit fit;
    fit.coefficients.resize(p);
    for (std::size_t a = 0; a < p; ++a) fit.coefficients[a] = work[a][2 * p];

    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double fitted = 0.0;
        for (std::size_t a = 0; a < p; ++a) fitted += design[a][i] * fit.coefficients[a];
        ssr += (response[i] - fitted) * (response[i] - fitted);
    }
    const double df = static_cast<double>(n - p);
    const double sigma2 = ssr / df;
    fit.std_errors.resize(p);
    for (std::size_t a = 0; a < p; ++a) fit.std_errors[a] = std::sqrt(sigma2 * work[a][p + a]);

    double sst = 0.0;
    if (intercept) {
        double mean = 0.0;
        for (double y : response) mean += y;
        mean /= static_cast<double>(n);
        for (double y : response) sst += (y - mean) * (y - mean);
    } else {
        for (double y : response) sst += y * y;
    }
    fit.r_squared = sst > 0.0 ? 1.0 - ssr / sst : 0.0;
    const double df_model = static_cast<double>(p) - (intercept ? 1.0 : 0.0);
    if (df_model > 0.0) {
        fit.adj_r_squared =
            1.0 - (1.0 - fit.r_squared) * (static_cast<double>(n) - (intercept ? 1.0 : 0.0)) / df;
        fit.f_statistic = (fit.r_squared / df_model) / ((1.0 - fit.r_squared) / df);
    }
    return fit;
}

}  // namespace oracle
