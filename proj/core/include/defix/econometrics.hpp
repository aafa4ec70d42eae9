#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "defix/date.hpp"
#include "defix/series.hpp"

namespace defix {

/// Regressors stored column-wise; every column has the same length.
struct DesignMatrix {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;

    std::size_t rows() const noexcept { return columns.empty() ? 0 : columns.front().size(); }
    std::size_t cols() const noexcept { return columns.size(); }
    void add(std::string name, std::vector<double> column);
};

struct LagSpec {
    std::string name;
    Series series;
    std::vector<int> lags;
};

/// Dependent variable aligned with lagged regressors. Column "name(t-l)" at
/// date t holds the regressor's value l buckets before t. Rows with any
/// missing value are dropped listwise.
struct LaggedDesign {
    std::vector<Date> dates;
    std::vector<double> y;
    DesignMatrix x;

    std::size_t n() const noexcept { return y.size(); }
};

/// Throws Error{SeriesTooShort} when a lag reaches past a regressor's
/// history or no complete row survives; Error{InvalidConfig} for lags < 1.
LaggedDesign make_lags(const Series& y, const std::vector<LagSpec>& regressors, Frequency frequency);

std::string lag_label(std::string_view name, int lag);

struct RegressionResult {
    std::vector<std::string> names;  // "const" first when an intercept is fitted
    std::vector<double> coef;
    std::vector<double> se;
    std::vector<double> t;
    std::vector<double> p;  // two-sided Student-t, df = n - k
    double r2 = 0.0;
    std::size_t n = 0;
    std::size_t df = 0;
    std::vector<double> fitted;
    std::vector<double> residuals;

    std::size_t index_of(std::string_view name) const;
};

/// Least squares through a column-pivoted Householder QR, classical
/// (homoskedastic) standard errors. Rank tolerance is 1e-10 relative to the
/// largest column norm.
/// Throws Error{TooFewObservations} (n <= k) / Error{RankDeficient}.
RegressionResult ols(std::span<const double> y, const DesignMatrix& x, bool intercept = true);

/// "***" for p <= 0.01, "**" for p <= 0.05, "*" for p <= 0.10, else "".
std::string_view significance_stars(double p) noexcept;

/// Two-sided p-value of a Pearson r via t = r sqrt(n-2) / sqrt(1-r^2).
double pearson_p_value(double r, std::size_t n);
double student_t_two_sided(double t, double df);
double student_t_quantile(double probability, double df);

struct CorrMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> r;
    std::vector<std::vector<double>> p;
    std::vector<std::vector<std::size_t>> n;
    std::vector<std::vector<std::string>> stars;
};

/// Pairwise-complete Pearson correlations. Columns are aligned by position
/// with NaN marking missing entries.
/// Throws Error{TooFewObservations} (< 3 pairs) / Error{ZeroVariance}.
CorrMatrix pearson_matrix(const std::vector<std::string>& labels,
                          const std::vector<std::vector<double>>& columns);

struct PanelObservation {
    std::string entity;
    Date period;
    double y = 0.0;
    std::vector<double> x;
};

struct PanelData {
    std::vector<std::string> regressor_names;
    std::vector<PanelObservation> rows;
};

struct PanelEntity {
    std::string name;
    Series y;
    Series x;
};

/// Stacks per-entity lagged designs. Entities without a complete row are
/// skipped and listed in `skipped`.
PanelData build_lagged_panel(const std::vector<PanelEntity>& entities, const std::string& regressor,
                             const std::vector<int>& lags, Frequency frequency,
                             std::vector<std::string>* skipped = nullptr);

struct PanelResult {
    std::vector<std::string> names;  // const + regressors; time effects are not reported
    std::vector<double> coef;
    std::vector<double> se;
    std::vector<double> t;
    std::vector<double> p;
    std::vector<double> ci_low;   // 95%
    std::vector<double> ci_high;  // 95%
    double r2 = 0.0;              // full model, time effects included
    double r2_between = 0.0;      // squared corr of entity-mean fitted vs outcome
    std::size_t n = 0;
    std::size_t df = 0;
    std::size_t entities = 0;
    std::size_t periods = 0;
    std::size_t time_dummies = 0;
    std::vector<Date> dropped_dummies;
    std::vector<std::string> warnings;
};

/// Pooled OLS on [const, regressors, one dummy per period except the first].
/// A dummy that is collinear with the columns before it is dropped with a
/// warning; a collinear regressor throws Error{RankDeficient}. Fewer than two
/// entities throws Error{TooFewEntities}.
PanelResult panel_ols_time_effects(const PanelData& panel);

}  // namespace defix
