#pragma once

// Run orchestration: ingest -> geometry -> relations -> augment -> vegetation
// -> scoring -> reports. Stages run in sequence; work inside a stage is
// spread over OpenMP threads and merged in site order, so outputs do not
// depend on the worker count.

#include "ldis/catalog.hpp"
#include "ldis/config.hpp"
#include "ldis/overlay.hpp"
#include "ldis/relations.hpp"
#include "ldis/scoring.hpp"
#include "ldis/site.hpp"
#include "ldis/stats.hpp"
#include "ldis/vegetation.hpp"

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace ldis {

enum class Stage { ingest, relate, augment, veg, score, report };

struct StageSet {
    bool relate = false;
    bool augment = false;
    bool veg = false;
    bool score = false;
    bool report = false;

    static StageSet all() { return {true, true, true, true, true}; }
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFatal = 1;
inline constexpr int kExitPartial = 2;

struct FilterLogEntry {
    std::string site_id;
    FilterDecision decision;
};

struct RunState {
    std::vector<SiteRecord> sites;  // retained, sorted by id
    std::vector<FilterLogEntry> filter_log;
    std::vector<GeometryQuality> quality;  // parallel to sites
    std::vector<std::string> warnings;

    std::optional<RelationsResult> relations;
    std::vector<std::optional<SiteRelations>> site_relations;  // parallel to sites when relations ran
    std::vector<std::optional<AdminMatch>> admin;     // parallel to sites when an admin layer is set
    std::vector<AugmentationRecord> augment;          // parallel to sites when augment ran
    std::vector<ZoneIndexSeries> veg;                 // sorted by (site, zone, period, index)
    std::vector<ScoredSite> scores;                   // parallel to sites when scoring ran
};

class Pipeline {
public:
    explicit Pipeline(RunConfig cfg);

    /// Runs the selected stages (ingest always) and writes their outputs.
    /// Throws on fatal errors; the message names the failing stage.
    int run(const StageSet& stages);

    const RunState& state() const noexcept { return state_; }
    const RunConfig& config() const noexcept { return cfg_; }

    void ingest();
    void relate();
    void augment();
    void vegetation();
    void score();

    nlohmann::json summary() const;
    /// Per-horizon DiD fits on the NDVI site/annulus series.
    nlohmann::json did_report() const;

    void write_outputs(const StageSet& stages) const;

private:
    RunConfig cfg_;
    RunState state_;
};

/// Panel for one horizon: pre = planting year and post = planting + h for
/// h > 0; pre = planting - 1 and post = planting for h = -1. Units missing any
/// of the four (zone, time) values are dropped.
DiDPanel did_panel_from_series(std::span<const ZoneIndexSeries> series, int horizon,
                               VegIndex index = VegIndex::ndvi);

nlohmann::json did_to_json(const DiDResult& r);

/// Rebuilds summary.json from sites.csv, ldis_scores.csv and (when present)
/// veg_series.csv in `out_dir`.
nlohmann::json summary_from_outputs(const std::filesystem::path& out_dir, std::uint64_t seed = 0,
                                    int bootstrap_reps = 1000, double bootstrap_level = 0.95);

/// Reads veg_series.csv written by the pipeline.
std::vector<ZoneIndexSeries> read_veg_series(const std::filesystem::path& path);

/// Sets the global log level from LDIS_LOG (trace, debug, info, warn, error,
/// off). Defaults to warn.
void init_logging();

}  // namespace ldis
