#pragma once

// Statistical validation: difference-in-differences regression, percentile
// bootstrap, synthetic-control series and confusion-matrix agreement.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ldis {

struct PanelRow {
    std::string unit_id;
    int g = 0;  // 1 treated (site), 0 control (annulus)
    int t = 0;  // 1 post, 0 pre
    double y = 0.0;
};

using DiDPanel = std::vector<PanelRow>;

struct Coefficient {
    std::string name;
    double estimate = 0.0;
    double se = 0.0;
    double t_value = 0.0;
    double p_value = 1.0;

    /// "***" p<0.01, "**" p<0.05, "*" p<0.1.
    std::string stars() const;
};

struct DiDResult {
    // intercept, g, t, g*t
    std::array<Coefficient, 4> coef;
    double r2 = 0.0;
    double adj_r2 = 0.0;
    double f_stat = 0.0;
    long long n_obs = 0;
    double residual_se = 0.0;

    double beta0() const { return coef[0].estimate; }
    double beta_g() const { return coef[1].estimate; }
    double beta_t() const { return coef[2].estimate; }
    double beta_gt() const { return coef[3].estimate; }
};

/// OLS of y on [1, g, t, g*t] via Householder QR with classical standard
/// errors. Throws DegeneratePanel naming the first empty g x t cell.
DiDResult did_fit(std::span<const PanelRow> panel);

/// Percentile bootstrap CI of the mean. Replicate r draws from its own stream
/// seeded from (seed, r), so results do not depend on the thread count.
/// Throws InsufficientData for fewer than two samples.
std::pair<double, double> bootstrap_mean_ci(std::span<const double> samples, double level = 0.95,
                                            int reps = 1000, std::uint64_t seed = 0);

/// Mean computed so that constant input returns the constant exactly.
double stable_mean(std::span<const double> values) noexcept;

/// Linear-interpolation quantile of sorted data (type 7).
double quantile_sorted(std::span<const double> sorted, double q);

/// Stream seed for task `index` derived from a base seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

struct ControlPoint {
    double at_planting = 0.0;
    std::vector<double> series;  // one value per period
};

struct SyntheticControl {
    std::vector<std::optional<double>> series;  // per period; nullopt when not evaluable
    std::vector<double> bin_weights;            // site share per bin
    std::vector<long long> controls_per_bin;
    long long controls_outside_range = 0;
    std::vector<std::string> warnings;
};

/// Equal-width bins over the range of site NDVI at planting; each period's
/// value is the site-share-weighted mean of per-bin control means, with bins
/// lacking controls renormalised out. Controls outside the site range are
/// not assigned to any bin.
SyntheticControl synthetic_control_series(std::span<const ControlPoint> controls,
                                          std::span<const double> site_ndvi_at_planting, int n_buckets = 10);

struct ConfusionCounts {
    long long tp = 0, fp = 0, fn = 0, tn = 0;
    long long total() const noexcept { return tp + fp + fn + tn; }
};

struct ConfusionMetrics {
    double accuracy = 0.0;
    std::optional<double> f1;  // undefined when tp + fp + fn == 0
};

/// Throws InsufficientData for all-zero counts.
ConfusionMetrics confusion_metrics(const ConfusionCounts& c);

}  // namespace ldis
