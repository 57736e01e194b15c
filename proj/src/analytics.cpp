#include "scholrel/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace scholrel {

using nlohmann::json;

ModelCoefficients load_model_coefficients(std::istream& in) {
    json j = json::parse(in);
    ModelCoefficients c;
    auto get = [&](const char* key) { return j.value(key, 0.0); };
    c.intercept = get("intercept");
    c.beta_feat = get("beta_feat");
    c.beta_feat2 = get("beta_feat2");
    c.beta_npapers = get("beta_npapers");
    c.beta_claimed = get("beta_claimed");
    c.beta_hindex = get("beta_hindex");
    c.feat_x_claimed = get("feat_x_claimed");
    c.feat2_x_claimed = get("feat2_x_claimed");
    c.feat_x_hindex = get("feat_x_hindex");
    c.feat2_x_hindex = get("feat2_x_hindex");
    return c;
}

DiDCoefficients load_did_coefficients(std::istream& in) {
    json j = json::parse(in);
    DiDCoefficients c;
    c.intercept = j.value("intercept", 0.0);
    c.early_exposure = j.value("early_exposure", 0.0);
    c.message = j.value("message", 0.0);
    c.interaction = j.value("interaction", 0.0);
    for (bool early : {false, true})
        for (bool treated : {false, true}) {
            const double p = c.cell(early, treated);
            if (p < 0.0 || p > 1.0)
                throw ConfigError("implied cell probability outside [0,1]: " +
                                  std::to_string(p));
        }
    return c;
}

std::vector<EngagementRecord> load_engagement_log(std::istream& in) {
    std::vector<EngagementRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw IngestError("malformed log record", lineno);
        EngagementRecord r;
        r.email_id = j.value("email_id", "");
        r.user_id = j.value("user_id", "");
        auto cond = condition_from_string(j.value("condition", ""));
        if (!cond)
            throw IngestError("unknown condition '" + j.value("condition", "") + "'", lineno);
        r.condition = *cond;
        r.early = j.value("early", false);
        r.opened = j.value("opened", false);
        r.clicked = j.value("clicked", false);
        r.pct_featured = j.value("pct_featured", 0.0);
        r.n_papers = j.value("n_papers", 0);
        r.claimed = j.value("claimed", false);
        r.h_norm = j.value("h_norm", 0.0);
        r.n_norm = j.value("n_norm", 0.0);
        if (j.contains("max_author_h") && !j["max_author_h"].is_null())
            r.max_author_h = j["max_author_h"].get<double>();
        if (j.contains("mean_author_h") && !j["mean_author_h"].is_null())
            r.mean_author_h = j["mean_author_h"].get<double>();
        records.push_back(std::move(r));
    }
    return records;
}

void write_engagement_log(std::ostream& out, const std::vector<EngagementRecord>& records) {
    for (const auto& r : records) {
        json j{{"email_id", r.email_id},
               {"user_id", r.user_id},
               {"condition", to_string(r.condition)},
               {"early", r.early},
               {"opened", r.opened},
               {"clicked", r.clicked},
               {"pct_featured", r.pct_featured},
               {"n_papers", r.n_papers},
               {"claimed", r.claimed},
               {"h_norm", r.h_norm},
               {"n_norm", r.n_norm}};
        if (r.max_author_h)
            j["max_author_h"] = *r.max_author_h;
        if (r.mean_author_h)
            j["mean_author_h"] = *r.mean_author_h;
        out << j.dump() << "\n";
    }
}

namespace {

double logit_value(const ModelCoefficients& c, double x, double n_norm, bool claimed,
                   double h_norm) {
    const double cl = claimed ? 1.0 : 0.0;
    return c.intercept + c.beta_feat * x + c.beta_feat2 * x * x + c.beta_npapers * n_norm +
           c.beta_claimed * cl + c.beta_hindex * h_norm +
           cl * (c.feat_x_claimed * x + c.feat2_x_claimed * x * x) +
           h_norm * (c.feat_x_hindex * x + c.feat2_x_hindex * x * x);
}

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

} // namespace

double predict_ctr(const ModelCoefficients& coeffs, double pct_featured, double n_norm,
                   bool claimed, double h_norm) {
    return logistic(logit_value(coeffs, pct_featured, n_norm, claimed, h_norm));
}

std::optional<double> peak_pct_featured(const ModelCoefficients& coeffs, bool claimed,
                                        double h_norm) {
    const double cl = claimed ? 1.0 : 0.0;
    const double b1 = coeffs.beta_feat + cl * coeffs.feat_x_claimed + h_norm * coeffs.feat_x_hindex;
    const double b2 =
        coeffs.beta_feat2 + cl * coeffs.feat2_x_claimed + h_norm * coeffs.feat2_x_hindex;

    auto f = [&](double x) { return logit_value(coeffs, x, 0.0, claimed, h_norm); };

    constexpr double step = 1e-4;
    double best_x = 0.0;
    double best_f = f(0.0);
    for (int i = 1; i <= 10000; ++i) {
        const double x = static_cast<double>(i) * step;
        const double v = f(x);
        if (v > best_f) {
            best_f = v;
            best_x = x;
        }
    }
    if (b2 >= 0.0) {
        const double slope = b1 + 2.0 * b2 * best_x;
        const bool runs_off = (best_x >= 1.0 - step && slope > 0.0) ||
                              (best_x <= step && slope < 0.0);
        if (runs_off)
            return std::nullopt; // non-concave, no interior peak
        return best_x;
    }
    // golden-section refinement around the grid winner
    double lo = std::max(0.0, best_x - step);
    double hi = std::min(1.0, best_x + step);
    constexpr double phi = 0.61803398874989484820;
    double x1 = hi - phi * (hi - lo);
    double x2 = lo + phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int iter = 0; iter < 100 && hi - lo > 1e-12; ++iter) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        }
    }
    return 0.5 * (lo + hi);
}

DiDCoefficients did_fit(const std::vector<EngagementRecord>& logs) {
    double sum[2][2] = {};
    long n[2][2] = {};
    for (const auto& r : logs) {
        const int e = r.early ? 1 : 0;
        const int t = r.condition == Condition::Control ? 0 : 1;
        sum[e][t] += r.opened ? 1.0 : 0.0;
        ++n[e][t];
    }
    const char* names[2][2] = {{"(late, control)", "(late, treatment)"},
                               {"(early, control)", "(early, treatment)"}};
    for (int e = 0; e < 2; ++e)
        for (int t = 0; t < 2; ++t)
            if (n[e][t] == 0)
                throw std::runtime_error(std::string("empty cell ") + names[e][t]);
    const double late_ctl = sum[0][0] / n[0][0];
    const double early_ctl = sum[1][0] / n[1][0];
    const double late_trt = sum[0][1] / n[0][1];
    const double early_trt = sum[1][1] / n[1][1];
    DiDCoefficients c;
    c.intercept = late_ctl;
    c.early_exposure = early_ctl - late_ctl;
    c.message = late_trt - late_ctl;
    c.interaction = early_trt - c.intercept - c.early_exposure - c.message;
    return c;
}

namespace {

// Continued fraction for the incomplete beta function (Lentz's method).
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin)
        d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin)
            d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin)
            c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin)
            d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin)
            c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps)
            return h;
    }
    throw std::runtime_error("incomplete_beta: continued fraction did not converge");
}

} // namespace

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0)
        return 0.0;
    if (x >= 1.0)
        return 1.0;
    const double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                               a * std::log(x) + b * std::log(1.0 - x));
    if (x < (a + 1.0) / (a + b + 2.0))
        return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double t_two_tailed_p(double t, double df) {
    return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

WelchResult welch_t(std::span<const double> a, std::span<const double> b) {
    const std::size_t na = a.size(), nb = b.size();
    if (na < 2 || nb < 2)
        throw std::invalid_argument("welch_t: samples must contain at least 2 values");
    auto mean = [](std::span<const double> s) {
        return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    };
    auto var = [&](std::span<const double> s, double m) {
        double acc = 0.0;
        for (double v : s)
            acc += (v - m) * (v - m);
        return acc / static_cast<double>(s.size() - 1);
    };
    const double ma = mean(a), mb = mean(b);
    const double va = var(a, ma), vb = var(b, mb);
    const double sa = va / static_cast<double>(na);
    const double sb = vb / static_cast<double>(nb);
    if (sa + sb == 0.0)
        throw std::invalid_argument("welch_t: zero pooled variance");
    WelchResult r;
    r.t = (ma - mb) / std::sqrt(sa + sb);
    r.df = (sa + sb) * (sa + sb) /
           (sa * sa / static_cast<double>(na - 1) + sb * sb / static_cast<double>(nb - 1));
    r.p = t_two_tailed_p(r.t, r.df);
    return r;
}

std::vector<double> lowess(const std::vector<std::pair<double, double>>& points,
                           double frac, int iterations) {
    const std::size_t n = points.size();
    if (n < 2)
        throw std::invalid_argument("lowess: need at least 2 points");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return points[i].first < points[j].first;
    });
    std::vector<double> x(n), y(n);
    for (std::size_t k = 0; k < n; ++k) {
        x[k] = points[order[k]].first;
        y[k] = points[order[k]].second;
    }
    const std::size_t span =
        std::min(n, std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(frac * n))));

    std::vector<double> robust(n, 1.0);
    std::vector<double> fitted(n, 0.0);
    for (int iter = 0; iter <= iterations; ++iter) {
        std::size_t lo = 0, hi = span - 1;
        for (std::size_t i = 0; i < n; ++i) {
            // slide the window so it holds the `span` nearest x's
            while (hi < n - 1 && x[hi + 1] - x[i] < x[i] - x[lo]) {
                ++lo;
                ++hi;
            }
            const double radius = std::max(x[i] - x[lo], x[hi] - x[i]);
            double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
            for (std::size_t k = lo; k <= hi; ++k) {
                double w = 1.0;
                if (radius > 0.0) {
                    const double d = std::fabs(x[k] - x[i]) / radius;
                    if (d >= 1.0)
                        w = 0.0;
                    else {
                        const double u = 1.0 - d * d * d;
                        w = u * u * u; // tricube
                    }
                }
                w *= robust[k];
                sw += w;
                swx += w * x[k];
                swy += w * y[k];
                swxx += w * x[k] * x[k];
                swxy += w * x[k] * y[k];
            }
            const double denom = sw * swxx - swx * swx;
            if (sw <= 0.0)
                fitted[i] = y[i];
            else if (std::fabs(denom) <= 1e-12 * sw * swxx + 1e-300)
                fitted[i] = swy / sw; // degenerate local design, fall back to weighted mean
            else {
                const double slope = (sw * swxy - swx * swy) / denom;
                const double intercept = (swy - slope * swx) / sw;
                fitted[i] = intercept + slope * x[i];
            }
        }
        if (iter == iterations)
            break;
        // bisquare robustness weights from the residuals
        std::vector<double> absres(n);
        for (std::size_t k = 0; k < n; ++k)
            absres[k] = std::fabs(y[k] - fitted[k]);
        std::vector<double> sorted = absres;
        std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
        const double s = 6.0 * sorted[n / 2] + 1e-300;
        for (std::size_t k = 0; k < n; ++k) {
            const double u = absres[k] / s;
            robust[k] = u >= 1.0 ? 0.0 : (1.0 - u * u) * (1.0 - u * u);
        }
    }
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k)
        out[order[k]] = fitted[k];
    return out;
}

std::map<Condition, ConditionSummary> engagement_summary(
    const std::vector<EngagementRecord>& logs) {
    struct Acc {
        long n = 0;
        long opened = 0;
        long clicked = 0;
        double messages = 0.0;
        double pct = 0.0;
    };
    std::map<Condition, Acc> acc;
    for (const auto& r : logs) {
        Acc& a = acc[r.condition];
        ++a.n;
        a.opened += r.opened ? 1 : 0;
        a.clicked += r.clicked ? 1 : 0; // unopened emails stay in the denominator
        a.messages += r.pct_featured * r.n_papers;
        a.pct += r.pct_featured;
    }
    std::map<Condition, ConditionSummary> out;
    for (const auto& [cond, a] : acc) {
        ConditionSummary s;
        s.n_emails = static_cast<int>(a.n);
        s.open_rate = static_cast<double>(a.opened) / a.n;
        s.ctr = static_cast<double>(a.clicked) / a.n;
        s.mean_messages = a.messages / a.n;
        s.mean_pct_featured = a.pct / a.n;
        out[cond] = s;
    }
    return out;
}

HSample aggregate_h(const std::vector<std::string>& paper_ids, const CorpusIndex& index,
                    HAggregation aggregation) {
    HSample sample;
    for (const auto& pid : paper_ids) {
        const Paper* p = index.find_paper(pid);
        if (!p) {
            ++sample.excluded;
            continue;
        }
        std::vector<double> hs;
        for (const auto& aid : p->authors)
            if (index.authors.count(aid))
                hs.push_back(static_cast<double>(index.author_h(aid)));
        if (hs.empty()) {
            ++sample.excluded;
            continue;
        }
        if (aggregation == HAggregation::Max)
            sample.values.push_back(*std::max_element(hs.begin(), hs.end()));
        else
            sample.values.push_back(std::accumulate(hs.begin(), hs.end(), 0.0) / hs.size());
    }
    return sample;
}

GroupStats group_stats(const std::vector<double>& values) {
    GroupStats s;
    s.n = static_cast<int>(values.size());
    if (values.empty())
        return s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
    if (values.size() > 1) {
        double acc = 0.0;
        for (double v : values)
            acc += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(acc / (values.size() - 1));
    }
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    s.median = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    return s;
}

FairnessReport fairness_report(const HSample& background,
                               const std::map<std::string, HSample>& clicked_by_group) {
    FairnessReport report;
    report.background = group_stats(background.values);
    report.background_excluded = background.excluded;
    for (const auto& [name, sample] : clicked_by_group) {
        report.clicked[name] = group_stats(sample.values);
        report.clicked_excluded[name] = sample.excluded;
        if (background.values.size() >= 2 && sample.values.size() >= 2)
            report.tests.emplace_back("background", name,
                                      welch_t(background.values, sample.values));
    }
    for (auto a = clicked_by_group.begin(); a != clicked_by_group.end(); ++a)
        for (auto b = std::next(a); b != clicked_by_group.end(); ++b)
            if (a->second.values.size() >= 2 && b->second.values.size() >= 2)
                report.tests.emplace_back(a->first, b->first,
                                          welch_t(a->second.values, b->second.values));
    return report;
}

} // namespace scholrel
