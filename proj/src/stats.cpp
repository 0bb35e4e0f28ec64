#include "ldis/stats.hpp"

#include "ldis/error.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <fmt/format.h>
#include <random>

namespace ldis {

std::string Coefficient::stars() const {
    if (p_value < 0.01) return "***";
    if (p_value < 0.05) return "**";
    if (p_value < 0.1) return "*";
    return "";
}

DiDResult did_fit(std::span<const PanelRow> panel) {
    std::array<long long, 4> cell_count{};
    for (const auto& r : panel) {
        if ((r.g != 0 && r.g != 1) || (r.t != 0 && r.t != 1)) {
            throw DegeneratePanel(fmt::format("unit '{}': g and t must be 0 or 1", r.unit_id));
        }
        if (!std::isfinite(r.y)) throw DegeneratePanel(fmt::format("unit '{}': non-finite outcome", r.unit_id));
        ++cell_count[static_cast<std::size_t>(2 * r.g + r.t)];
    }
    for (int g = 0; g < 2; ++g) {
        for (int t = 0; t < 2; ++t) {
            if (cell_count[static_cast<std::size_t>(2 * g + t)] == 0) {
                throw DegeneratePanel(fmt::format("empty cell g={} ({}), t={} ({})", g,
                                                  g ? "treated" : "control", t, t ? "post" : "pre"));
            }
        }
    }

    const Eigen::Index n = static_cast<Eigen::Index>(panel.size());
    const Eigen::Index p = 4;
    Eigen::MatrixXd x(n, p);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = panel[static_cast<std::size_t>(i)];
        x(i, 0) = 1.0;
        x(i, 1) = r.g;
        x(i, 2) = r.t;
        x(i, 3) = r.g * r.t;
        y(i) = r.y;
    }

    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
    const Eigen::VectorXd beta = qr.solve(y);
    const Eigen::VectorXd resid = y - x * beta;
    const double rss = resid.squaredNorm();
    const double ybar = y.mean();
    const double tss = (y.array() - ybar).square().sum();
    const double df = static_cast<double>(n - p);

    DiDResult out;
    out.n_obs = n;
    static const char* names[] = {"intercept", "g", "t", "g:t"};

    // (X'X)^-1 = R^-1 R^-T
    const Eigen::MatrixXd r_mat = qr.matrixQR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        r_mat.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
    const Eigen::MatrixXd xtx_inv = r_inv * r_inv.transpose();
    const double sigma2 = df > 0 ? rss / df : 0.0;
    out.residual_se = std::sqrt(sigma2);

    for (Eigen::Index k = 0; k < p; ++k) {
        Coefficient& c = out.coef[static_cast<std::size_t>(k)];
        c.name = names[k];
        c.estimate = beta(k);
        c.se = std::sqrt(sigma2 * xtx_inv(k, k));
        if (c.se > 0.0 && df > 0) {
            c.t_value = c.estimate / c.se;
            const boost::math::students_t dist(df);
            c.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(c.t_value)));
        } else {
            c.t_value = 0.0;
            c.p_value = 1.0;
        }
    }
    if (tss > 0.0) {
        out.r2 = 1.0 - rss / tss;
        out.adj_r2 = df > 0 ? 1.0 - (1.0 - out.r2) * static_cast<double>(n - 1) / df : out.r2;
        out.f_stat = rss > 0.0 && df > 0 ? ((tss - rss) / static_cast<double>(p - 1)) / (rss / df) : 0.0;
    }
    return out;
}

// ---------------------------------------------------------------------------

double stable_mean(std::span<const double> values) noexcept {
    double m = 0.0;
    std::size_t k = 0;
    for (double v : values) {
        ++k;
        m += (v - m) / static_cast<double>(k);
    }
    return m;
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw InsufficientData("quantile of empty data");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    if (frac == 0.0 || sorted[lo] == sorted[hi]) return sorted[lo];
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::pair<double, double> bootstrap_mean_ci(std::span<const double> samples, double level, int reps,
                                            std::uint64_t seed) {
    if (samples.size() < 2) throw InsufficientData("bootstrap needs at least two samples");
    if (!(level > 0.0 && level < 1.0)) throw Error("bootstrap level must lie in (0, 1)");
    if (reps < 1) throw Error("bootstrap needs at least one replicate");

    const std::size_t n = samples.size();
    std::vector<double> means(static_cast<std::size_t>(reps));
#pragma omp parallel for schedule(static)
    for (int r = 0; r < reps; ++r) {
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        // Running mean as in stable_mean, fused with the draw. Indices come
        // from the high half of a 64x64 product (bias below n / 2^64).
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>((static_cast<unsigned __int128>(rng()) * n) >> 64);
            m += (samples[k] - m) / static_cast<double>(i + 1);
        }
        means[static_cast<std::size_t>(r)] = m;
    }
    std::sort(means.begin(), means.end());
    const double alpha = 1.0 - level;
    return {quantile_sorted(means, alpha / 2.0), quantile_sorted(means, 1.0 - alpha / 2.0)};
}

// ---------------------------------------------------------------------------

SyntheticControl synthetic_control_series(std::span<const ControlPoint> controls,
                                          std::span<const double> site_ndvi_at_planting, int n_buckets) {
    if (n_buckets < 1) throw Error("synthetic control needs at least one bucket");
    SyntheticControl out;
    const auto nb = static_cast<std::size_t>(n_buckets);
    out.bin_weights.assign(nb, 0.0);
    out.controls_per_bin.assign(nb, 0);

    std::size_t periods = 0;
    for (const auto& c : controls) periods = std::max(periods, c.series.size());
    out.series.assign(periods, std::nullopt);
    if (site_ndvi_at_planting.empty()) {
        out.warnings.push_back("no site values at planting");
        return out;
    }

    const auto [mn_it, mx_it] = std::minmax_element(site_ndvi_at_planting.begin(), site_ndvi_at_planting.end());
    const double lo = *mn_it, hi = *mx_it;
    const double width = (hi - lo) / n_buckets;
    auto bin_of = [&](double v) -> std::optional<std::size_t> {
        if (!(v >= lo && v <= hi)) return std::nullopt;
        if (width == 0.0) return 0;
        const auto b = static_cast<std::size_t>(std::floor((v - lo) / width));
        return std::min(b, nb - 1);
    };

    for (double v : site_ndvi_at_planting) out.bin_weights[*bin_of(v)] += 1.0;
    for (double& w : out.bin_weights) w /= static_cast<double>(site_ndvi_at_planting.size());

    // values[bin][period], sorted before summation for order independence.
    std::vector<std::vector<std::vector<double>>> values(nb, std::vector<std::vector<double>>(periods));
    for (const auto& c : controls) {
        const auto b = bin_of(c.at_planting);
        if (!b) {
            ++out.controls_outside_range;
            continue;
        }
        ++out.controls_per_bin[*b];
        for (std::size_t p = 0; p < c.series.size(); ++p) values[*b][p].push_back(c.series[p]);
    }

    for (std::size_t b = 0; b < nb; ++b) {
        if (out.bin_weights[b] > 0.0 && out.controls_per_bin[b] == 0) {
            out.warnings.push_back(fmt::format("bucket {} has site weight {:.4f} but no controls; renormalised out",
                                               b, out.bin_weights[b]));
        }
    }
    for (std::size_t p = 0; p < periods; ++p) {
        double acc = 0.0, wsum = 0.0;
        for (std::size_t b = 0; b < nb; ++b) {
            auto& v = values[b][p];
            if (v.empty() || out.bin_weights[b] == 0.0) continue;
            std::sort(v.begin(), v.end());
            acc += out.bin_weights[b] * stable_mean(v);
            wsum += out.bin_weights[b];
        }
        if (wsum > 0.0) out.series[p] = acc / wsum;
    }
    if (std::none_of(out.series.begin(), out.series.end(), [](const auto& v) { return v.has_value(); })) {
        out.warnings.push_back("all buckets empty of controls; series not evaluable");
    }
    return out;
}

ConfusionMetrics confusion_metrics(const ConfusionCounts& c) {
    if (c.tp < 0 || c.fp < 0 || c.fn < 0 || c.tn < 0) throw InsufficientData("negative confusion counts");
    if (c.total() == 0) throw InsufficientData("confusion counts are all zero");
    ConfusionMetrics m;
    m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
    const long long denom = 2 * c.tp + c.fp + c.fn;
    if (c.tp + c.fp + c.fn > 0) m.f1 = 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
    return m;
}

}  // namespace ldis
