#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "teamstab/distributions.hpp"
#include "teamstab/errors.hpp"

namespace teamstab {

struct NamedColumn {
    std::string name;
    std::vector<double> values;
};

struct RegressionInput {
    std::vector<double> response;
    std::vector<NamedColumn> predictors;
    bool intercept = true;

    void add_predictor(std::string name, std::vector<double> values) {
        predictors.push_back({std::move(name), std::move(values)});
    }
};

struct RegressionResult {
    std::vector<std::string> names;  // "Constant" first when an intercept was fitted
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    std::vector<double> t_values;
    std::vector<double> p_values;
    double f_statistic = 0.0;
    double f_p_value = 1.0;
    double r_squared = 0.0;
    double adj_r_squared = 0.0;
    std::size_t n_obs = 0;
    int df_residual = 0;

    std::size_t index_of(const std::string& name) const {
        for (std::size_t k = 0; k < names.size(); ++k)
            if (names[k] == name) return k;
        throw LookupError("no coefficient named '" + name + "'");
    }
    double coefficient(const std::string& name) const { return coefficients[index_of(name)]; }
    double t_value(const std::string& name) const { return t_values[index_of(name)]; }
    double p_value(const std::string& name) const { return p_values[index_of(name)]; }
};

namespace detail {

// Dense row-major matrix, just big enough for the QR below.
struct DenseMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> cells;

    DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), cells(r * c, 0.0) {}
    double& at(std::size_t i, std::size_t j) { return cells[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return cells[i * cols + j]; }
};

inline void validate_regression_input(const RegressionInput& input) {
    if (input.predictors.empty()) throw InputError("regression needs at least one predictor");
    const std::size_t n = input.response.size();
    std::set<std::string> seen;
    for (const NamedColumn& column : input.predictors) {
        if (column.name.empty()) throw InputError("predictor with empty name");
        if (input.intercept && column.name == "Constant")
            throw InputError("predictor name 'Constant' collides with the intercept");
        if (!seen.insert(column.name).second)
            throw InputError("duplicated column name '" + column.name + "'");
        if (column.values.size() != n)
            throw InputError("column '" + column.name + "' has " +
                             std::to_string(column.values.size()) + " values, response has " +
                             std::to_string(n));
        for (double v : column.values)
            if (!std::isfinite(v)) throw InputError("non-finite value in column '" + column.name + "'");
    }
    for (double v : input.response)
        if (!std::isfinite(v)) throw InputError("non-finite value in response");

    const std::size_t p = input.predictors.size() + (input.intercept ? 1 : 0);
    if (n < p + 1)
        throw SampleSizeError("need at least " + std::to_string(p + 1) + " observations for " +
                              std::to_string(p) + " coefficients, got " + std::to_string(n));
}

}  // namespace detail

/// Ordinary least squares with the classical diagnostic set. The solve goes
/// through a Householder QR factorization; coefficients, standard errors,
/// two-sided t p-values, the overall F test, and (adjusted) R-squared come
/// out in one pass. Collinear designs are rejected with the name of the
/// first dependent column.
inline RegressionResult ols_fit(const RegressionInput& input) {
    detail::validate_regression_input(input);

    const std::size_t n = input.response.size();
    const std::size_t p = input.predictors.size() + (input.intercept ? 1 : 0);

    std::vector<std::string> names;
    if (input.intercept) names.push_back("Constant");
    for (const NamedColumn& column : input.predictors) names.push_back(column.name);

    detail::DenseMatrix design(n, p);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = 0;
        if (input.intercept) design.at(i, j++) = 1.0;
        for (const NamedColumn& column : input.predictors) design.at(i, j++) = column.values[i];
    }
    const detail::DenseMatrix original = design;
    std::vector<double> qty = input.response;

    // Householder QR, reflectors applied to the response as we go.
    for (std::size_t k = 0; k < p; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < n; ++i) norm += design.at(i, k) * design.at(i, k);
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;  // exactly dependent column; caught by the rank check
        const double alpha = design.at(k, k) >= 0.0 ? -norm : norm;
        std::vector<double> v(n - k);
        v[0] = design.at(k, k) - alpha;
        for (std::size_t i = k + 1; i < n; ++i) v[i - k] = design.at(i, k);
        double vtv = 0.0;
        for (double value : v) vtv += value * value;
        design.at(k, k) = alpha;
        for (std::size_t i = k + 1; i < n; ++i) design.at(i, k) = 0.0;
        if (vtv == 0.0) continue;
        for (std::size_t j = k + 1; j < p; ++j) {
            double dot = 0.0;
            for (std::size_t i = k; i < n; ++i) dot += v[i - k] * design.at(i, j);
            const double scale = 2.0 * dot / vtv;
            for (std::size_t i = k; i < n; ++i) design.at(i, j) -= scale * v[i - k];
        }
        double dot = 0.0;
        for (std::size_t i = k; i < n; ++i) dot += v[i - k] * qty[i];
        const double scale = 2.0 * dot / vtv;
        for (std::size_t i = k; i < n; ++i) qty[i] -= scale * v[i - k];
    }

    double largest_diagonal = 0.0;
    for (std::size_t k = 0; k < p; ++k)
        largest_diagonal = std::max(largest_diagonal, std::fabs(design.at(k, k)));
    for (std::size_t k = 0; k < p; ++k) {
        if (std::fabs(design.at(k, k)) < 1e-10 * largest_diagonal || largest_diagonal == 0.0)
            throw SingularityError("design matrix is rank deficient at column '" + names[k] + "'",
                                   names[k]);
    }

    // back substitution: R beta = (Q^T y)[0..p)
    std::vector<double> beta(p, 0.0);
    for (std::size_t k = p; k-- > 0;) {
        double value = qty[k];
        for (std::size_t j = k + 1; j < p; ++j) value -= design.at(k, j) * beta[j];
        beta[k] = value / design.at(k, k);
    }

    // (X^T X)^-1 = R^-1 R^-T; we need its diagonal for the standard errors.
    detail::DenseMatrix rinv(p, p);
    for (std::size_t j = 0; j < p; ++j) {
        rinv.at(j, j) = 1.0 / design.at(j, j);
        for (std::size_t k = j; k-- > 0;) {
            double sum = 0.0;
            for (std::size_t i = k + 1; i <= j; ++i) sum += design.at(k, i) * rinv.at(i, j);
            rinv.at(k, j) = -sum / design.at(k, k);
        }
    }

    std::vector<double> residuals(n);
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double fitted = 0.0;
        for (std::size_t j = 0; j < p; ++j) fitted += original.at(i, j) * beta[j];
        residuals[i] = input.response[i] - fitted;
        ssr += residuals[i] * residuals[i];
    }

    double sst = 0.0;
    if (input.intercept) {
        double mean = 0.0;
        for (double y : input.response) mean += y;
        mean /= static_cast<double>(n);
        for (double y : input.response) sst += (y - mean) * (y - mean);
    } else {
        for (double y : input.response) sst += y * y;
    }

    RegressionResult result;
    result.names = std::move(names);
    result.coefficients = beta;
    result.n_obs = n;
    result.df_residual = static_cast<int>(n - p);

    const double sigma2 = ssr / result.df_residual;
    result.std_errors.resize(p);
    result.t_values.resize(p);
    result.p_values.resize(p);
    for (std::size_t k = 0; k < p; ++k) {
        double diag = 0.0;
        for (std::size_t j = k; j < p; ++j) diag += rinv.at(k, j) * rinv.at(k, j);
        result.std_errors[k] = std::sqrt(sigma2 * diag);
        if (result.std_errors[k] == 0.0) {
            result.t_values[k] = beta[k] == 0.0 ? 0.0
                                                : std::copysign(
                                                      std::numeric_limits<double>::infinity(),
                                                      beta[k]);
        } else {
            result.t_values[k] = beta[k] / result.std_errors[k];
        }
        result.p_values[k] = t_two_sided_p(result.t_values[k], result.df_residual);
    }

    result.r_squared = sst > 0.0 ? 1.0 - ssr / sst : 0.0;
    const int df_model = static_cast<int>(p) - (input.intercept ? 1 : 0);
    if (df_model > 0) {
        result.adj_r_squared =
            1.0 - (1.0 - result.r_squared) *
                      (static_cast<double>(n) - (input.intercept ? 1.0 : 0.0)) / result.df_residual;
        if (result.r_squared >= 1.0) {
            result.f_statistic = std::numeric_limits<double>::infinity();
            result.f_p_value = 0.0;
        } else {
            result.f_statistic =
                (result.r_squared / df_model) / ((1.0 - result.r_squared) / result.df_residual);
            result.f_p_value = f_distribution_sf(result.f_statistic, df_model, result.df_residual);
        }
    }
    return result;
}

/// Multivariate fit over any set of named feature columns. Identical
/// contract to ols_fit; the single-column case reduces to it exactly.
inline RegressionResult multivariate_fit(const RegressionInput& input) { return ols_fit(input); }

/// Plain-text report: one row per coefficient, then the overall F test and
/// the goodness-of-fit pair.
inline std::string render_regression_table(const RegressionResult& result) {
    auto fmt = [](double value) {
        char buffer[64];
        std::snprintf(buffer, sizeof buffer, "%.3f", value);
        return std::string(buffer);
    };
    std::size_t label_width = 13;  // fits "Adj-R-squared"
    for (const std::string& name : result.names) label_width = std::max(label_width, name.size());

    std::ostringstream out;
    auto row = [&](const std::string& label, const std::string& a, const std::string& b,
                   const std::string& c) {
        out << label << std::string(label_width - label.size(), ' ');
        for (const std::string* cell : {&a, &b, &c})
            out << std::string(cell->size() < 15 ? 15 - cell->size() : 1, ' ') << *cell;
        out << '\n';
    };
    row("", "Coefficients", "T-value", "Sig");
    for (std::size_t k = 0; k < result.names.size(); ++k)
        row(result.names[k], fmt(result.coefficients[k]), fmt(result.t_values[k]),
            fmt(result.p_values[k]));
    row("F", fmt(result.f_statistic), "Sig", fmt(result.f_p_value));
    row("R-squared", fmt(result.r_squared), "Adj-R-squared", fmt(result.adj_r_squared));
    return out.str();
}

inline nlohmann::ordered_json regression_to_json(const RegressionResult& result) {
    nlohmann::ordered_json doc;
    for (const char* field : {"coefficients", "std_errors", "t_values", "p_values"})
        doc[field] = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < result.names.size(); ++k) {
        doc["coefficients"][result.names[k]] = result.coefficients[k];
        doc["std_errors"][result.names[k]] = result.std_errors[k];
        doc["t_values"][result.names[k]] = result.t_values[k];
        doc["p_values"][result.names[k]] = result.p_values[k];
    }
    doc["f_statistic"] = result.f_statistic;
    doc["f_p_value"] = result.f_p_value;
    doc["r_squared"] = result.r_squared;
    doc["adj_r_squared"] = result.adj_r_squared;
    doc["n_obs"] = result.n_obs;
    doc["df_residual"] = result.df_residual;
    return doc;
}

}  // namespace teamstab
