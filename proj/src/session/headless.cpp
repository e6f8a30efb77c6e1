#include "twinspace/session/headless.hpp"

#include "twinspace/error.hpp"

#include <fstream>

namespace twinspace::session {

using nlohmann::json;

ExportBundle headless_run(const std::string& csv, const std::string& settings_text,
                          const std::optional<std::string>& distances_csv, bool with_plots)
{
    json doc;
    try {
        doc = json::parse(settings_text);
    } catch (const json::parse_error& e) {
        throw SchemaError("/", std::string("settings document is not valid JSON: ") + e.what());
    }
    const Settings settings = settings_from_json(doc);
    auto input = std::make_shared<InputData>();
    input->table = core::parse_dataset(csv);
    if (distances_csv) input->precomputed = cluster::parse_distance_csv(*distances_csv);
    validate(settings, input->table);
    Analysis analysis(input);
    nldr::NldrRegistry registry;
    return build_bundle(analysis, settings, registry, with_plots);
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("failed writing " + path.string());
}

} // namespace

void write_bundle(const ExportBundle& bundle, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir / "plots");
    write_file(dir / "assignments.csv", bundle.assignments_csv);
    write_file(dir / "settings.json", bundle.settings);
    for (const auto& [name, doc] : bundle.plots) {
        write_file(dir / "plots" / (name + ".json"), doc.dump(2) + "\n");
    }
}

} // namespace twinspace::session
