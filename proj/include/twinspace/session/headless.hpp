#pragma once

#include "twinspace/session/analysis.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace twinspace::session {

// Runs the full analysis described by a settings document without a service.
ExportBundle headless_run(const std::string& csv, const std::string& settings_text,
                          const std::optional<std::string>& distances_csv = std::nullopt,
                          bool with_plots = true);

// assignments.csv, settings.json and plots/<name>.json under `dir`.
void write_bundle(const ExportBundle& bundle, const std::filesystem::path& dir);

} // namespace twinspace::session
