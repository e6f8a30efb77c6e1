#pragma once

#include "twinspace/cluster/distance.hpp"
#include "twinspace/cluster/hclust.hpp"
#include "twinspace/cluster/stats.hpp"
#include "twinspace/core/coords.hpp"
#include "twinspace/core/dataset.hpp"
#include "twinspace/core/scores.hpp"
#include "twinspace/nldr/embedding.hpp"
#include "twinspace/nldr/registry.hpp"
#include "twinspace/session/settings.hpp"

#include "json.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace twinspace::session {

// Uploaded input: the raw table plus an optional precomputed distance matrix
// for the clustering space.
struct InputData {
    core::Dataset table;
    std::optional<cluster::DistanceMatrix> precomputed;
};

// Everything derived from (input, settings), memoized by keys that name the
// complete settings each result depends on. Not thread-safe; the owning
// session serializes access.
class Analysis {
public:
    explicit Analysis(std::shared_ptr<const InputData> input);

    const InputData& input() const noexcept { return *input_; }
    std::shared_ptr<const InputData> input_ptr() const noexcept { return input_; }

    std::shared_ptr<const core::SpacedDataset> spaced(const Settings& s);
    std::shared_ptr<const core::CoordinateMatrix> coords(const Settings& s, core::Space space);
    std::shared_ptr<const cluster::DistanceMatrix> distances(const Settings& s, core::Space space,
                                                             cluster::Metric metric);
    std::shared_ptr<const cluster::MergeTree> tree(const Settings& s, const ClusterSetting& c);
    cluster::ClusterSolution solution(const Settings& s, const ClusterSetting& c);
    cluster::ClusterSolution solution(const Settings& s) { return solution(s, s.clustering); }
    std::optional<core::GroupAssignment> groups(const Settings& s);
    std::optional<core::ScoreVector> score(const Settings& s);
    std::optional<core::BinAssignment> bins(const Settings& s);

    // Cache keys; equal keys mean equal results.
    static std::string roles_key(const Settings& s);
    static std::string coords_key(const Settings& s, core::Space space);
    static std::string distances_key(const Settings& s, core::Space space, cluster::Metric metric);
    static std::string tree_key(const Settings& s, const ClusterSetting& c);

    // Drops entries not reachable from any of the given settings.
    void retain(const std::vector<const Settings*>& live);
    std::set<std::string> cached_keys() const;

private:
    std::shared_ptr<const InputData> input_;
    std::map<std::string, std::shared_ptr<const core::SpacedDataset>> spaced_;
    std::map<std::string, std::shared_ptr<const core::CoordinateMatrix>> coords_;
    std::map<std::string, std::shared_ptr<const cluster::DistanceMatrix>> distances_;
    std::map<std::string, std::shared_ptr<const cluster::MergeTree>> trees_;
};

// Observation ids as shown to users: the label column or 1-based row numbers.
std::vector<std::string> observation_ids(const core::SpacedDataset& data);

nlohmann::json overview_payload(Analysis& a, const Settings& s, const ClusterSetting& c);
nlohmann::json stats_payload(Analysis& a, const Settings& s, std::optional<int> k_max);
nlohmann::json benchmarks_payload(Analysis& a, const Settings& s);

struct CoordinateViewOptions {
    std::string variable;
    bool center = false;
    bool scale = false;
    std::set<int> hidden_clusters;
};

nlohmann::json coordinate_view_payload(Analysis& a, const Settings& s, const CoordinateViewOptions& o);
nlohmann::json breakdown_payload(Analysis& a, const Settings& s, int cluster_id);
nlohmann::json comparison_payload(Analysis& a, const Settings& s);

// Colour classes per observation for tour and embedding panels.
std::vector<int> colour_classes(Analysis& a, const Settings& s, const std::string& colour_by);

struct ExportBundle {
    std::string assignments_csv; // id,cluster,group,score,bin
    std::string settings;        // canonical settings document
    std::map<std::string, nlohmann::json> plots;
};

std::string assignments_csv(Analysis& a, const Settings& s);

// Immutable snapshot a tour job works from.
struct TourJobInput {
    TourSpec spec;
    Matrix coords;
    std::vector<int> guide_groups; // guided only
    std::optional<tour::ProjectionFrame> start;
    Eigen::Index variable = -1;    // radial only, 0-based
};

// Validates the spec against the data and snapshots what the job needs.
// Throws when a guided tour has fewer than two groups or the index is not
// defined for the requested dimension.
TourJobInput prepare_tour(Analysis& a, const Settings& s, const TourSpec& spec,
                          std::optional<tour::ProjectionFrame> start = std::nullopt);
tour::TourPath run_tour(const TourJobInput& in, JobControl* ctl = nullptr);

// Path document plus the last frame and the data projected onto it.
nlohmann::json tour_payload(const tour::TourPath& path, const Matrix& coords,
                            const std::vector<int>& colours, const std::string& colour_by,
                            core::Space space);

struct EmbeddingJobInput {
    std::string method;
    std::uint64_t seed = 0;
    core::Space space = core::Space::clustering;
    std::shared_ptr<const core::CoordinateMatrix> coords;
    std::shared_ptr<const cluster::DistanceMatrix> distances;
    std::string cache_key;
};

EmbeddingJobInput prepare_embedding(Analysis& a, const Settings& s, core::Space space,
                                    const NldrSpec& spec);

// Everything a headless run produces, computed exactly as the service does.
ExportBundle build_bundle(Analysis& a, const Settings& s, const nldr::NldrRegistry& registry,
                          bool with_plots);

} // namespace twinspace::session
