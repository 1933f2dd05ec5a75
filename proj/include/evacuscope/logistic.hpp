#pragma once
// Binary logistic regression by Newton/IRLS with step halving, Wald standard
// errors from the inverse observed information, AIC, McFadden pseudo-R2, and
// a likelihood-ratio test for nested fits. The likelihood pieces are exposed
// as free functions so tests can difference them numerically.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "evacuscope/analytics.hpp"
#include "evacuscope/linalg.hpp"
#include "evacuscope/stats.hpp"

namespace evacuscope {

// Design matrix without the intercept column; fit_logistic prepends one.
struct Design {
    std::vector<std::string> names;
    std::vector<double> x;  // row-major n x names.size()
    std::vector<double> y;
    size_t n = 0;

    size_t cols() const { return names.size(); }
};

inline double softplus(double v) {
    return v > 0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
}

// LL(beta) = sum_i [ y_i eta_i - ln(1 + exp(eta_i)) ], eta = X beta.
// x is row-major n x k and includes whatever columns beta covers.
inline double bernoulli_ll(size_t n, size_t k, const double* x, const double* y, const double* beta) {
    double ll = 0;
    for (size_t i = 0; i < n; ++i) {
        double eta = 0;
        for (size_t j = 0; j < k; ++j) eta += x[i * k + j] * beta[j];
        ll += y[i] * eta - softplus(eta);
    }
    return ll;
}

// score_j = sum_i (y_i - p_i) x_ij
inline void bernoulli_score(size_t n, size_t k, const double* x, const double* y, const double* beta,
                            double* score) {
    std::fill(score, score + k, 0.0);
    for (size_t i = 0; i < n; ++i) {
        double eta = 0;
        for (size_t j = 0; j < k; ++j) eta += x[i * k + j] * beta[j];
        double r = y[i] - 1.0 / (1.0 + std::exp(-eta));
        for (size_t j = 0; j < k; ++j) score[j] += r * x[i * k + j];
    }
}

// Observed information = X^T W X with W = diag(p_i (1 - p_i)).
inline void bernoulli_information(size_t n, size_t k, const double* x, const double* beta,
                                  SquareMatrix& info) {
    info = SquareMatrix(k);
    for (size_t i = 0; i < n; ++i) {
        double eta = 0;
        for (size_t j = 0; j < k; ++j) eta += x[i * k + j] * beta[j];
        double p = 1.0 / (1.0 + std::exp(-eta));
        double w = p * (1.0 - p);
        for (size_t a = 0; a < k; ++a) {
            double wxa = w * x[i * k + a];
            for (size_t b = a; b < k; ++b) info.at(a, b) += wxa * x[i * k + b];
        }
    }
    for (size_t a = 0; a < k; ++a)
        for (size_t b = 0; b < a; ++b) info.at(a, b) = info.at(b, a);
}

struct LogisticOptions {
    double tol = 1e-8;     // convergence: max |score| <= tol * n
    size_t max_iter = 50;
};

struct LogisticFit {
    std::vector<std::string> names;  // "Intercept" first
    std::vector<double> beta, se, z, p;
    double log_likelihood = 0;
    double ll_null = 0;  // intercept-only likelihood on the same rows
    size_t n = 0, k = 0;
    double aic = 0;
    double mcfadden = 0;
    size_t iterations = 0;
    bool converged = false;
};

inline double aic_of(double log_likelihood, size_t k) {
    return 2.0 * static_cast<double>(k) - 2.0 * log_likelihood;
}

// Closed-form intercept-only likelihood: n (p ln p + (1-p) ln(1-p)).
inline double intercept_only_ll(const std::vector<double>& y) {
    double s = 0;
    for (double v : y) s += v;
    double n = static_cast<double>(y.size());
    double pbar = s / n;
    if (pbar <= 0.0 || pbar >= 1.0) return 0.0;  // degenerate response
    return n * (pbar * std::log(pbar) + (1.0 - pbar) * std::log(1.0 - pbar));
}

inline LogisticFit fit_logistic(const Design& d, const LogisticOptions& opts = {}) {
    size_t n = d.n, k = d.cols() + 1;
    if (n == 0) throw std::runtime_error("empty design: no complete rows to fit");
    if (n <= k) throw std::runtime_error("design has fewer rows than parameters");

    std::vector<double> ax(n * k);
    for (size_t i = 0; i < n; ++i) {
        ax[i * k] = 1.0;
        for (size_t j = 1; j < k; ++j) ax[i * k + j] = d.x[i * (k - 1) + (j - 1)];
    }
    LogisticFit fit;
    fit.n = n;
    fit.k = k;
    fit.names.reserve(k);
    fit.names.push_back("Intercept");
    fit.names.insert(fit.names.end(), d.names.begin(), d.names.end());

    std::vector<double> beta(k, 0.0);
    {
        double pbar = 0;
        for (double v : d.y) pbar += v;
        pbar = std::clamp(pbar / static_cast<double>(n), 1e-6, 1.0 - 1e-6);
        beta[0] = std::log(pbar / (1.0 - pbar));
    }
    double ll = bernoulli_ll(n, k, ax.data(), d.y.data(), beta.data());
    std::vector<double> score(k), delta(k), trial(k);
    SquareMatrix info(k);
    double score_tol = opts.tol * static_cast<double>(n);

    for (fit.iterations = 0; fit.iterations < opts.max_iter; ++fit.iterations) {
        bernoulli_score(n, k, ax.data(), d.y.data(), beta.data(), score);
        double smax = 0;
        for (double v : score) smax = std::max(smax, std::abs(v));
        if (smax <= score_tol) {
            fit.converged = true;
            break;
        }
        bernoulli_information(n, k, ax.data(), beta.data(), info);
        SquareMatrix chol = info;
        if (auto bad = cholesky(chol))
            throw std::runtime_error("design is rank deficient at column '" + fit.names[*bad] + "'");
        delta = cholesky_solve(chol, score);

        // step halving keeps the likelihood non-decreasing
        double step = 1.0, ll_new = ll;
        bool improved = false;
        for (int h = 0; h < 40; ++h) {
            for (size_t j = 0; j < k; ++j) trial[j] = beta[j] + step * delta[j];
            ll_new = bernoulli_ll(n, k, ax.data(), d.y.data(), trial.data());
            if (ll_new >= ll - 1e-12 * (1.0 + std::abs(ll))) {
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;  // no ascent direction left; score check decides below
        beta = trial;
        ll = ll_new;
    }
    if (!fit.converged) {
        bernoulli_score(n, k, ax.data(), d.y.data(), beta.data(), score);
        double smax = 0;
        for (double v : score) smax = std::max(smax, std::abs(v));
        fit.converged = smax <= score_tol;
    }

    fit.beta = beta;
    fit.log_likelihood = ll;
    bernoulli_information(n, k, ax.data(), beta.data(), info);
    SquareMatrix chol = info;
    if (auto bad = cholesky(chol))
        throw std::runtime_error("design is rank deficient at column '" + fit.names[*bad] + "'");
    SquareMatrix cov = cholesky_inverse(chol);
    fit.se.resize(k);
    fit.z.resize(k);
    fit.p.resize(k);
    for (size_t j = 0; j < k; ++j) {
        fit.se[j] = std::sqrt(cov.at(j, j));
        fit.z[j] = fit.beta[j] / fit.se[j];
        fit.p[j] = two_sided_p(fit.z[j]);
    }
    fit.ll_null = intercept_only_ll(d.y);
    fit.aic = aic_of(fit.log_likelihood, fit.k);
    fit.mcfadden = fit.ll_null != 0.0 ? 1.0 - fit.log_likelihood / fit.ll_null : 0.0;
    return fit;
}

struct LrTest {
    double chi2 = 0;
    size_t df = 0;
    double p = 1;
};

// Likelihood-ratio test; models must be nested fits on identical rows.
inline LrTest compare_models(const LogisticFit& small, const LogisticFit& big) {
    if (small.n != big.n) throw std::runtime_error("models are not nested: fit on different rows");
    if (big.k <= small.k) throw std::runtime_error("models are not nested: larger model has no extra parameters");
    LrTest t;
    t.chi2 = std::max(0.0, 2.0 * (big.log_likelihood - small.log_likelihood));
    t.df = big.k - small.k;
    t.p = chi2_sf(t.df, t.chi2);
    return t;
}

inline LrTest lr_from_ll(double ll_small, size_t k_small, double ll_big, size_t k_big) {
    LrTest t;
    t.chi2 = std::max(0.0, 2.0 * (ll_big - ll_small));
    t.df = k_big - k_small;
    t.p = chi2_sf(t.df, t.chi2);
    return t;
}

// Predictor column names in model order.
inline std::vector<std::string> model1_predictors(bool order_dummies = false) {
    std::vector<std::string> v;
    if (order_dummies)
        v = {"order_voluntary", "order_mandatory"};
    else
        v = {"evac_order"};
    v.insert(v.end(), {"elevation_m", "median_age", "median_income", "vehicle_pct", "race_white"});
    return v;
}

inline std::vector<std::string> model2_predictors(bool order_dummies = false) {
    std::vector<std::string> v = model1_predictors(order_dummies);
    v.insert(v.end(), {"avg_trips", "avg_hull_km2"});
    return v;
}

// Rows = active devices with every model-2 predictor present, so nested model
// designs built by column selection share rows exactly. Returns the dropped
// (incomplete) active-device count through `dropped`.
inline Design assemble_design(const std::vector<DeviceRecord>& records, bool order_dummies,
                              uint64_t& dropped) {
    Design d;
    d.names = model2_predictors(order_dummies);
    dropped = 0;
    for (const auto& r : records) {
        if (!r.active) continue;
        if (!r.elevation_m || !r.median_age || !r.median_income || !r.vehicle_pct || !r.race_white ||
            !r.avg_trips || !r.avg_hull_km2) {
            ++dropped;
            continue;
        }
        if (order_dummies) {
            d.x.push_back(r.order == OrderType::kVoluntary ? 1.0 : 0.0);
            d.x.push_back(r.order == OrderType::kMandatory ? 1.0 : 0.0);
        } else {
            d.x.push_back(static_cast<double>(static_cast<int>(r.order)));
        }
        d.x.insert(d.x.end(), {*r.elevation_m, *r.median_age, *r.median_income, *r.vehicle_pct,
                               *r.race_white, *r.avg_trips, *r.avg_hull_km2});
        d.y.push_back(r.evacuated ? 1.0 : 0.0);
        ++d.n;
    }
    return d;
}

inline Design select_columns(const Design& d, const std::vector<std::string>& names) {
    Design out;
    out.names = names;
    out.n = d.n;
    out.y = d.y;
    std::vector<size_t> idx;
    for (const auto& name : names) {
        auto it = std::find(d.names.begin(), d.names.end(), name);
        if (it == d.names.end()) throw std::runtime_error("unknown design column '" + name + "'");
        idx.push_back(static_cast<size_t>(it - d.names.begin()));
    }
    size_t kin = d.cols();
    out.x.reserve(d.n * idx.size());
    for (size_t i = 0; i < d.n; ++i)
        for (size_t j : idx) out.x.push_back(d.x[i * kin + j]);
    return out;
}

}  // namespace evacuscope
