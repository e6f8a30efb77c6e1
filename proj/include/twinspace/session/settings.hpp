#pragma once

#include "twinspace/cluster/distance.hpp"
#include "twinspace/cluster/hclust.hpp"
#include "twinspace/core/coords.hpp"
#include "twinspace/core/dataset.hpp"
#include "twinspace/tour/index.hpp"
#include "twinspace/tour/tours.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace twinspace::session {

inline constexpr int kSettingsVersion = 1;

enum class TransformKind { none, center_scale, pull };

struct TransformSpec {
    TransformKind kind = TransformKind::center_scale;
    bool center = true;
    bool scale = true;
    std::optional<core::CovarianceSpec> covariance; // pull only
};

enum class ScoreKind { chi2, external };

struct ScoreSpec {
    ScoreKind kind = ScoreKind::external;
    std::string column; // external only
    std::string name;
};

struct TourSpec {
    tour::TourKind kind = tour::TourKind::grand;
    core::Space space = core::Space::linked;
    tour::IndexSpec index;
    Eigen::Index d = 2;
    std::uint64_t seed = 0;
    int n_bases = tour::kDefaultBases;
    int max_iter = 500;
    std::string guide_by = "cluster"; // cluster | group
    std::string variable;             // radial only
};

struct NldrSpec {
    std::string method = "tsne";
    std::uint64_t seed = 0;
};

struct ClusterSetting {
    cluster::Metric metric = cluster::Metric::euclidean;
    cluster::Linkage linkage = cluster::Linkage::ward;
    int k = 4;
};

// The analysis configuration. Serialized as a canonical key-sorted document
// whose hash keys the result caches.
struct Settings {
    core::RoleSpec roles;
    TransformSpec clustering_transform;
    TransformSpec linked_transform;
    ClusterSetting clustering;
    bool precomputed_distances = false;
    std::string display_x;
    std::string display_y;
    std::optional<ScoreSpec> score;
    int n_bins = 4;
    bool hull = false;
    std::optional<TourSpec> tour;
    std::optional<NldrSpec> nldr_clustering;
    std::optional<NldrSpec> nldr_linked;
    std::optional<ClusterSetting> comparison;

    const TransformSpec& transform(core::Space s) const
    {
        return s == core::Space::clustering ? clustering_transform : linked_transform;
    }
};

nlohmann::json to_json(const Settings& s);
nlohmann::json to_json(const TransformSpec& t);
nlohmann::json to_json(const TourSpec& t);

// Strict parse: unknown keys and wrong types raise SchemaError with the path.
Settings settings_from_json(const nlohmann::json& j);
TourSpec tour_spec_from_json(const nlohmann::json& j, const std::string& path = "/tour");

// Checks the settings against the data (variables exist, display variables
// belong to the linked space, k range, covariance shapes, group limit).
void validate(const Settings& s, const core::Dataset& data);

// Defaults for the given roles: center+scale both spaces, euclidean ward.D2,
// k = 4 (clamped to n), display pair = first two linked variables.
Settings default_settings(const core::RoleSpec& roles, std::size_t n);

std::string canonical(const Settings& s);
std::string settings_hash(const Settings& s);
std::string fnv1a_hex(const std::string& text);

} // namespace twinspace::session
