#pragma once

#include "twinspace/nldr/registry.hpp"
#include "twinspace/session/analysis.hpp"
#include "twinspace/session/settings.hpp"
#include "twinspace/tour/tours.hpp"

#include "json.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace twinspace::session {

struct Event {
    std::uint64_t seq = 0;
    std::string type; // selection | config | data | job
    nlohmann::json data;
};

enum class JobState { running, done, failed, cancelled };

const char* to_string(JobState s);

struct ConfigUpdate {
    std::uint64_t revision = 0;
    std::vector<std::string> plan; // stages that will be recomputed
};

class Session;

// Owns every analysis session. Mutations of one session are serialized by
// that session's lock; computation jobs run on their own threads against
// immutable snapshots and publish results back under the lock.
class Service {
public:
    Service();
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    std::string create_session();
    void delete_session(const std::string& id);
    std::uint64_t revision(const std::string& id) const;

    // Body fields: csv (required), roles, settings (merge patch over the
    // defaults), distances_csv.
    nlohmann::json upload_data(const std::string& id, const nlohmann::json& body);
    nlohmann::json get_config(const std::string& id) const;
    ConfigUpdate set_config(const std::string& id, const nlohmann::json& patch);

    nlohmann::json get_overview(const std::string& id);
    nlohmann::json get_stats(const std::string& id, std::optional<int> k_max = std::nullopt);
    nlohmann::json get_benchmarks(const std::string& id);
    nlohmann::json get_coordinate_view(const std::string& id, const CoordinateViewOptions& opts);
    nlohmann::json get_breakdown(const std::string& id, int cluster_id);
    nlohmann::json get_comparison(const std::string& id);

    // Returns a job id. `panel` names the space ("clustering" or "linked").
    std::string compute_embedding(const std::string& id, const std::string& panel,
                                  const nlohmann::json& body = nlohmann::json::object());
    // Tours run only when requested. Body: tour spec fields, "color_by",
    // "start_from": {"panel", "position"}, or "copy_from": panel.
    std::string compute_tour(const std::string& id, const std::string& panel,
                             const nlohmann::json& body = nlohmann::json::object());
    nlohmann::json job_status(const std::string& id, const std::string& job) const;
    void cancel_job(const std::string& id, const std::string& job);
    nlohmann::json wait_job(const std::string& id, const std::string& job,
                            std::chrono::milliseconds timeout = std::chrono::minutes(5));

    // 1-based position along the panel's interpolated path.
    nlohmann::json hold_frame(const std::string& id, const std::string& panel, std::size_t position,
                              bool with_slice = false, std::optional<double> slice_h = std::nullopt);

    // Ids are 1-based observation indices.
    std::uint64_t set_selection(const std::string& id, const std::vector<long>& ids,
                                const std::string& origin);
    nlohmann::json get_selection(const std::string& id) const;

    // Events with seq > after, waiting up to `timeout` for at least one.
    std::vector<Event> events_after(const std::string& id, std::uint64_t after,
                                    std::chrono::milliseconds timeout) const;

    ExportBundle export_results(const std::string& id);

    nldr::NldrRegistry& registry() noexcept { return registry_; }

private:
    std::shared_ptr<Session> find(const std::string& id) const;

    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    nldr::NldrRegistry registry_;
    std::uint64_t next_session_ = 0;
};

} // namespace twinspace::session
