#include "defix/econometrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "defix/error.hpp"

namespace defix {

void DesignMatrix::add(std::string name, std::vector<double> column) {
    if (!columns.empty() && column.size() != rows()) {
        throw Error(ErrorCode::InvalidConfig, "column '" + name + "' has the wrong length");
    }
    names.push_back(std::move(name));
    columns.push_back(std::move(column));
}

std::string lag_label(std::string_view name, int lag) {
    return std::string(name) + "(t-" + std::to_string(lag) + ")";
}

// ─── lag construction ────────────────────────────────────────────────────────

LaggedDesign make_lags(const Series& y, const std::vector<LagSpec>& regressors,
                       Frequency frequency) {
    if (regressors.empty()) {
        throw Error(ErrorCode::InvalidConfig, "make_lags needs at least one regressor");
    }
    for (const auto& spec : regressors) {
        if (spec.lags.empty()) {
            throw Error(ErrorCode::InvalidConfig, "empty lag set for '" + spec.name + "'");
        }
        for (int lag : spec.lags) {
            if (lag < 1) throw Error(ErrorCode::InvalidConfig, "lags must be >= 1");
            if (static_cast<std::size_t>(lag) >= spec.series.size()) {
                throw Error(ErrorCode::SeriesTooShort,
                            "lag " + std::to_string(lag) + " on '" + spec.name + "' with " +
                                std::to_string(spec.series.size()) + " observations");
            }
        }
    }

    LaggedDesign out;
    std::vector<std::vector<double>> cols;
    for (const auto& spec : regressors) {
        for (int lag : spec.lags) {
            out.x.names.push_back(lag_label(spec.name, lag));
            cols.emplace_back();
        }
    }
    std::vector<double> row(cols.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (is_missing(y.values[i])) continue;
        const Date t = y.dates[i];
        bool complete = true;
        std::size_t c = 0;
        for (const auto& spec : regressors) {
            for (int lag : spec.lags) {
                const double v = spec.series.value_at(shift_bucket(t, frequency, -lag));
                complete = complete && !is_missing(v);
                row[c++] = v;
            }
        }
        if (!complete) continue;
        out.dates.push_back(t);
        out.y.push_back(y.values[i]);
        for (std::size_t j = 0; j < row.size(); ++j) cols[j].push_back(row[j]);
    }
    if (out.y.empty()) {
        throw Error(ErrorCode::SeriesTooShort, "no complete observation after lagging");
    }
    out.x.columns = std::move(cols);
    return out;
}

// ─── distributions ───────────────────────────────────────────────────────────

double student_t_two_sided(double t, double df) {
    if (std::isnan(t) || !(df > 0.0)) return kMissing;
    if (std::isinf(t)) return 0.0;
    const boost::math::students_t_distribution<double> dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

double student_t_quantile(double probability, double df) {
    const boost::math::students_t_distribution<double> dist(df);
    return boost::math::quantile(dist, probability);
}

std::string_view significance_stars(double p) noexcept {
    if (std::isnan(p)) return "";
    if (p <= 0.01) return "***";
    if (p <= 0.05) return "**";
    if (p <= 0.10) return "*";
    return "";
}

double pearson_p_value(double r, std::size_t n) {
    if (n < 3) {
        throw Error(ErrorCode::TooFewObservations, "correlation test needs at least 3 pairs");
    }
    if (std::fabs(r) >= 1.0) return 0.0;
    const double t = r * std::sqrt(static_cast<double>(n) - 2.0) / std::sqrt(1.0 - r * r);
    return student_t_two_sided(t, static_cast<double>(n) - 2.0);
}

// ─── OLS ─────────────────────────────────────────────────────────────────────

std::size_t RegressionResult::index_of(std::string_view name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
        throw Error(ErrorCode::InvalidConfig, "no regressor named '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - names.begin());
}

namespace {

constexpr double kRankTolerance = 1e-10;

}  // namespace

RegressionResult ols(std::span<const double> y, const DesignMatrix& x, bool intercept) {
    const std::size_t n = y.size();
    const std::size_t k = x.cols() + (intercept ? 1 : 0);
    if (k == 0) throw Error(ErrorCode::InvalidConfig, "no regressors");
    if (x.cols() > 0 && x.rows() != n) {
        throw Error(ErrorCode::InvalidConfig, "design rows do not match the response length");
    }
    if (n <= k) {
        throw Error(ErrorCode::TooFewObservations,
                    std::to_string(n) + " observations for " + std::to_string(k) + " coefficients");
    }

    Eigen::MatrixXd a(n, k);
    Eigen::VectorXd b(n);
    RegressionResult res;
    std::size_t c = 0;
    if (intercept) {
        a.col(c++).setOnes();
        res.names.emplace_back("const");
    }
    for (std::size_t j = 0; j < x.cols(); ++j, ++c) {
        for (std::size_t i = 0; i < n; ++i) a(i, c) = x.columns[j][i];
        res.names.push_back(x.names.size() > j ? x.names[j] : "x" + std::to_string(j + 1));
    }
    for (std::size_t i = 0; i < n; ++i) b(i) = y[i];
    if (!a.allFinite() || !b.allFinite()) {
        throw Error(ErrorCode::InvalidConfig, "non-finite value in regression input");
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(kRankTolerance);
    if (static_cast<std::size_t>(qr.rank()) < k) {
        std::string dependent;
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index j = qr.rank(); j < static_cast<Eigen::Index>(k); ++j) {
            if (!dependent.empty()) dependent += ", ";
            dependent += res.names[static_cast<std::size_t>(perm(j))];
        }
        throw Error(ErrorCode::RankDeficient, "collinear regressors: " + dependent);
    }

    const Eigen::VectorXd beta = qr.solve(b);
    const Eigen::VectorXd fitted = a * beta;
    const Eigen::VectorXd resid = b - fitted;
    const double rss = resid.squaredNorm();
    const double df = static_cast<double>(n - k);
    const double sigma2 = rss / df;

    // (A'A)^-1 = P R^-1 R^-T P'
    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::MatrixXd inner = r_inv * r_inv.transpose();
    const auto& perm = qr.colsPermutation().indices();

    res.coef.resize(k);
    res.se.resize(k);
    res.t.resize(k);
    res.p.resize(k);
    for (std::size_t j = 0; j < k; ++j) res.coef[j] = beta(static_cast<Eigen::Index>(j));
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(k); ++j) {
        const auto original = static_cast<std::size_t>(perm(j));
        res.se[original] = std::sqrt(sigma2 * inner(j, j));
    }
    for (std::size_t j = 0; j < k; ++j) {
        if (res.se[j] > 0.0) {
            res.t[j] = res.coef[j] / res.se[j];
            res.p[j] = student_t_two_sided(res.t[j], df);
        } else {
            res.t[j] = kMissing;
            res.p[j] = kMissing;
        }
    }

    double tss = 0.0;
    if (intercept) {
        const double mean = b.mean();
        tss = (b.array() - mean).square().sum();
    } else {
        tss = b.squaredNorm();
    }
    res.r2 = tss > 0.0 ? std::clamp(1.0 - rss / tss, 0.0, 1.0) : 0.0;
    res.n = n;
    res.df = n - k;
    res.fitted.assign(fitted.data(), fitted.data() + n);
    res.residuals.assign(resid.data(), resid.data() + n);
    return res;
}

// ─── Pearson ─────────────────────────────────────────────────────────────────

CorrMatrix pearson_matrix(const std::vector<std::string>& labels,
                          const std::vector<std::vector<double>>& columns) {
    const std::size_t m = columns.size();
    if (labels.size() != m) {
        throw Error(ErrorCode::InvalidConfig, "label count does not match column count");
    }
    for (const auto& col : columns) {
        if (col.size() != columns.front().size()) {
            throw Error(ErrorCode::InvalidConfig, "columns must have equal length");
        }
    }
    CorrMatrix out;
    out.labels = labels;
    out.r.assign(m, std::vector<double>(m, 1.0));
    out.p.assign(m, std::vector<double>(m, 0.0));
    out.n.assign(m, std::vector<std::size_t>(m, 0));
    out.stars.assign(m, std::vector<std::string>(m));

    for (std::size_t i = 0; i < m; ++i) {
        std::size_t present = 0;
        for (double v : columns[i]) present += is_missing(v) ? 0 : 1;
        out.n[i][i] = present;
        for (std::size_t j = i + 1; j < m; ++j) {
            const auto& a = columns[i];
            const auto& b = columns[j];
            double sa = 0.0, sb = 0.0;
            std::size_t cnt = 0;
            for (std::size_t t = 0; t < a.size(); ++t) {
                if (is_missing(a[t]) || is_missing(b[t])) continue;
                sa += a[t];
                sb += b[t];
                ++cnt;
            }
            if (cnt < 3) {
                throw Error(ErrorCode::TooFewObservations,
                            labels[i] + " / " + labels[j] + ": fewer than 3 complete pairs");
            }
            const double ma = sa / static_cast<double>(cnt);
            const double mb = sb / static_cast<double>(cnt);
            double saa = 0.0, sbb = 0.0, sab = 0.0;
            for (std::size_t t = 0; t < a.size(); ++t) {
                if (is_missing(a[t]) || is_missing(b[t])) continue;
                const double da = a[t] - ma;
                const double db = b[t] - mb;
                saa += da * da;
                sbb += db * db;
                sab += da * db;
            }
            if (saa == 0.0 || sbb == 0.0) {
                throw Error(ErrorCode::ZeroVariance,
                            (saa == 0.0 ? labels[i] : labels[j]) + " has zero variance");
            }
            const double r = std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
            const double p = pearson_p_value(r, cnt);
            out.r[i][j] = out.r[j][i] = r;
            out.p[i][j] = out.p[j][i] = p;
            out.n[i][j] = out.n[j][i] = cnt;
            out.stars[i][j] = out.stars[j][i] = std::string(significance_stars(p));
        }
    }
    return out;
}

// ─── panel with time effects ─────────────────────────────────────────────────

PanelData build_lagged_panel(const std::vector<PanelEntity>& entities, const std::string& regressor,
                             const std::vector<int>& lags, Frequency frequency,
                             std::vector<std::string>* skipped) {
    PanelData out;
    for (int lag : lags) out.regressor_names.push_back(lag_label(regressor, lag));
    for (const auto& entity : entities) {
        LaggedDesign design;
        try {
            design = make_lags(entity.y, {LagSpec{regressor, entity.x, lags}}, frequency);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::SeriesTooShort) throw;
            if (skipped) skipped->push_back(entity.name);
            continue;
        }
        for (std::size_t i = 0; i < design.n(); ++i) {
            PanelObservation obs{entity.name, design.dates[i], design.y[i], {}};
            obs.x.reserve(design.x.cols());
            for (const auto& col : design.x.columns) obs.x.push_back(col[i]);
            out.rows.push_back(std::move(obs));
        }
    }
    return out;
}

namespace {

/// Columns of `a` (in order) that are linearly independent of the columns
/// kept before them, by twice-iterated modified Gram-Schmidt.
std::vector<bool> greedy_independent(const Eigen::MatrixXd& a) {
    std::vector<Eigen::VectorXd> basis;
    std::vector<bool> keep(static_cast<std::size_t>(a.cols()), false);
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        Eigen::VectorXd v = a.col(j);
        const double norm0 = v.norm();
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& q : basis) v -= q.dot(v) * q;
        }
        const double norm = v.norm();
        if (norm0 > 0.0 && norm > kRankTolerance * norm0) {
            basis.push_back(v / norm);
            keep[static_cast<std::size_t>(j)] = true;
        }
    }
    return keep;
}

}  // namespace

PanelResult panel_ols_time_effects(const PanelData& panel) {
    const std::size_t k_reg = panel.regressor_names.size();
    std::vector<const PanelObservation*> rows;
    rows.reserve(panel.rows.size());
    for (const auto& r : panel.rows) {
        if (r.x.size() != k_reg) {
            throw Error(ErrorCode::InvalidConfig, "panel row width does not match regressor names");
        }
        bool complete = !is_missing(r.y);
        for (double v : r.x) complete = complete && !is_missing(v);
        if (complete) rows.push_back(&r);
    }

    std::set<std::string> entity_set;
    std::set<Date> period_set;
    for (const auto* r : rows) {
        entity_set.insert(r->entity);
        period_set.insert(r->period);
    }
    if (entity_set.size() < 2) {
        throw Error(ErrorCode::TooFewEntities,
                    std::to_string(entity_set.size()) + " entity with complete rows (need 2)");
    }
    const std::vector<Date> periods(period_set.begin(), period_set.end());
    std::map<Date, std::size_t> period_index;
    for (std::size_t i = 0; i < periods.size(); ++i) period_index[periods[i]] = i;

    // Column order: const, regressors, dummies for periods[1..].
    const std::size_t n = rows.size();
    const std::size_t n_dummies = periods.size() - 1;
    const std::size_t base = 1 + k_reg;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(base + n_dummies));
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        a(ii, 0) = 1.0;
        for (std::size_t j = 0; j < k_reg; ++j) a(ii, static_cast<Eigen::Index>(1 + j)) = rows[i]->x[j];
        const std::size_t p = period_index[rows[i]->period];
        if (p > 0) a(ii, static_cast<Eigen::Index>(base + p - 1)) = 1.0;
    }

    PanelResult out;
    std::vector<bool> keep(base + n_dummies, true);
    {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
        qr.setThreshold(kRankTolerance);
        if (static_cast<std::size_t>(qr.rank()) < base + n_dummies) {
            keep = greedy_independent(a);
            for (std::size_t j = 0; j < base; ++j) {
                if (!keep[j]) {
                    throw Error(ErrorCode::RankDeficient,
                                (j == 0 ? std::string("const") : panel.regressor_names[j - 1]) +
                                    " is collinear with the preceding regressors");
                }
            }
            for (std::size_t d = 0; d < n_dummies; ++d) {
                if (!keep[base + d]) {
                    out.dropped_dummies.push_back(periods[d + 1]);
                    out.warnings.push_back("time dummy " + format_date(periods[d + 1]) +
                                           " is collinear and was dropped");
                }
            }
        }
    }

    DesignMatrix design;
    for (std::size_t j = 0; j < k_reg; ++j) {
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = rows[i]->x[j];
        design.add(panel.regressor_names[j], std::move(col));
    }
    for (std::size_t d = 0; d < n_dummies; ++d) {
        if (!keep[base + d]) continue;
        std::vector<double> col(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (period_index[rows[i]->period] == d + 1) col[i] = 1.0;
        }
        design.add("time:" + format_date(periods[d + 1]), std::move(col));
    }
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = rows[i]->y;

    const RegressionResult fit = ols(y, design, true);

    const double tcrit = student_t_quantile(0.975, static_cast<double>(fit.df));
    for (std::size_t j = 0; j < base; ++j) {
        out.names.push_back(fit.names[j]);
        out.coef.push_back(fit.coef[j]);
        out.se.push_back(fit.se[j]);
        out.t.push_back(fit.t[j]);
        out.p.push_back(fit.p[j]);
        out.ci_low.push_back(fit.coef[j] - tcrit * fit.se[j]);
        out.ci_high.push_back(fit.coef[j] + tcrit * fit.se[j]);
    }
    out.r2 = fit.r2;
    out.n = fit.n;
    out.df = fit.df;
    out.entities = entity_set.size();
    out.periods = periods.size();
    out.time_dummies = design.cols() - k_reg;

    // Between R^2 on entity means.
    std::map<std::string, std::pair<double, double>> sums;  // fitted, outcome
    std::map<std::string, std::size_t> counts;
    for (std::size_t i = 0; i < n; ++i) {
        auto& s = sums[rows[i]->entity];
        s.first += fit.fitted[i];
        s.second += y[i];
        ++counts[rows[i]->entity];
    }
    std::vector<double> mf, my;
    for (const auto& [entity, s] : sums) {
        const double c = static_cast<double>(counts[entity]);
        mf.push_back(s.first / c);
        my.push_back(s.second / c);
    }
    double af = 0.0, ay = 0.0;
    for (std::size_t i = 0; i < mf.size(); ++i) {
        af += mf[i];
        ay += my[i];
    }
    af /= static_cast<double>(mf.size());
    ay /= static_cast<double>(my.size());
    double sff = 0.0, syy = 0.0, sfy = 0.0;
    for (std::size_t i = 0; i < mf.size(); ++i) {
        sff += (mf[i] - af) * (mf[i] - af);
        syy += (my[i] - ay) * (my[i] - ay);
        sfy += (mf[i] - af) * (my[i] - ay);
    }
    out.r2_between = (sff > 0.0 && syy > 0.0) ? (sfy * sfy) / (sff * syy) : kMissing;
    return out;
}

}  // namespace defix
