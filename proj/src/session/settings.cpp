#include "twinspace/session/settings.hpp"

#include "twinspace/core/scores.hpp"
#include "twinspace/error.hpp"

#include <cstdio>
#include <set>

namespace twinspace::session {

using nlohmann::json;

namespace {

// Small reader that tracks its location in the document for error messages.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) throw SchemaError(where(), "expected an object");
    }

    void allow(std::initializer_list<const char*> keys) const
    {
        std::set<std::string> ok(keys.begin(), keys.end());
        for (const auto& [k, v] : j_.items()) {
            if (!ok.count(k)) throw SchemaError(path_ + "/" + k, "unknown field");
        }
    }

    bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
    std::string at(const char* key) const { return path_ + "/" + key; }

    const json& raw(const char* key) const
    {
        if (!j_.contains(key)) throw SchemaError(at(key), "missing required field");
        return j_.at(key);
    }

    std::string str(const char* key) const
    {
        const json& v = raw(key);
        if (!v.is_string()) throw SchemaError(at(key), "expected a string");
        return v.get<std::string>();
    }

    std::string str(const char* key, std::string fallback) const
    {
        return has(key) ? str(key) : fallback;
    }

    bool boolean(const char* key, bool fallback) const
    {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_boolean()) throw SchemaError(at(key), "expected true or false");
        return v.get<bool>();
    }

    long long integer(const char* key, long long fallback) const
    {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_number_integer()) throw SchemaError(at(key), "expected an integer");
        return v.get<long long>();
    }

    double number(const char* key, double fallback) const
    {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_number()) throw SchemaError(at(key), "expected a number");
        return v.get<double>();
    }

    std::vector<std::string> strings(const char* key) const
    {
        if (!has(key)) return {};
        const json& v = j_.at(key);
        if (!v.is_array()) throw SchemaError(at(key), "expected an array of strings");
        std::vector<std::string> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_string()) {
                throw SchemaError(at(key) + "/" + std::to_string(i), "expected a string");
            }
            out.push_back(v[i].get<std::string>());
        }
        return out;
    }

    std::string where() const { return path_.empty() ? "/" : path_; }

private:
    const json& j_;
    std::string path_;
};

template <typename F>
auto guarded(const std::string& path, F&& f)
{
    try {
        return f();
    } catch (const SchemaError&) {
        throw;
    } catch (const Error& e) {
        throw SchemaError(path, e.what());
    }
}

const char* to_string(TransformKind k)
{
    switch (k) {
    case TransformKind::none: return "none";
    case TransformKind::center_scale: return "center_scale";
    case TransformKind::pull: return "pull";
    }
    return "?";
}

json cluster_setting_json(const ClusterSetting& c)
{
    return {{"metric", cluster::to_string(c.metric)},
            {"linkage", cluster::to_string(c.linkage)},
            {"k", c.k}};
}

ClusterSetting cluster_setting_from(const Reader& r)
{
    ClusterSetting c;
    c.metric = guarded(r.at("metric"), [&] { return cluster::metric_from_string(r.str("metric", "euclidean")); });
    c.linkage = guarded(r.at("linkage"), [&] { return cluster::linkage_from_string(r.str("linkage", "ward.D2")); });
    c.k = static_cast<int>(r.integer("k", 4));
    if (c.k < 1) throw SchemaError(r.at("k"), "k must be at least 1");
    return c;
}

Matrix matrix_from(const json& j, const std::string& path)
{
    if (!j.is_array() || j.empty()) throw SchemaError(path, "expected a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    Matrix m(rows, rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        const std::string rp = path + "/" + std::to_string(i);
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows) {
            throw SchemaError(rp, "expected a row of " + std::to_string(rows) + " numbers");
        }
        for (Eigen::Index c = 0; c < rows; ++c) {
            if (!row[static_cast<std::size_t>(c)].is_number()) {
                throw SchemaError(rp + "/" + std::to_string(c), "expected a number");
            }
            m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
        }
    }
    return m;
}

TransformSpec transform_from(const json& j, const std::string& path)
{
    Reader r(j, path);
    r.allow({"kind", "center", "scale", "covariance", "reference"});
    TransformSpec t;
    const std::string kind = r.str("kind", "center_scale");
    if (kind == "none") {
        t.kind = TransformKind::none;
        t.center = t.scale = false;
    } else if (kind == "center_scale") {
        t.kind = TransformKind::center_scale;
        t.center = r.boolean("center", true);
        t.scale = r.boolean("scale", true);
    } else if (kind == "pull") {
        t.kind = TransformKind::pull;
        t.center = t.scale = false;
        const Matrix cov = matrix_from(r.raw("covariance"), r.at("covariance"));
        const json& ref = r.raw("reference");
        if (!ref.is_array()) throw SchemaError(r.at("reference"), "expected an array of numbers");
        Vector z(static_cast<Eigen::Index>(ref.size()));
        for (std::size_t i = 0; i < ref.size(); ++i) {
            if (!ref[i].is_number()) {
                throw SchemaError(r.at("reference") + "/" + std::to_string(i), "expected a number");
            }
            z(static_cast<Eigen::Index>(i)) = ref[i].get<double>();
        }
        t.covariance = guarded(r.at("covariance"), [&] { return core::CovarianceSpec(cov, z); });
    } else {
        throw SchemaError(r.at("kind"), "unknown transform '" + kind + "'");
    }
    return t;
}

NldrSpec nldr_from(const json& j, const std::string& path)
{
    Reader r(j, path);
    r.allow({"method", "seed"});
    NldrSpec s;
    s.method = r.str("method", "tsne");
    const long long seed = r.integer("seed", 0);
    if (seed < 0) throw SchemaError(r.at("seed"), "seed must be non-negative");
    s.seed = static_cast<std::uint64_t>(seed);
    return s;
}

json nldr_json(const NldrSpec& s)
{
    return {{"method", s.method}, {"seed", s.seed}};
}

} // namespace

json to_json(const TransformSpec& t)
{
    json j{{"kind", to_string(t.kind)}};
    if (t.kind == TransformKind::center_scale) {
        j["center"] = t.center;
        j["scale"] = t.scale;
    }
    if (t.kind == TransformKind::pull && t.covariance) {
        json rows = json::array();
        const Matrix& m = t.covariance->matrix();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            json row = json::array();
            for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
            rows.push_back(std::move(row));
        }
        j["covariance"] = std::move(rows);
        const Vector& z = t.covariance->reference();
        j["reference"] = std::vector<double>(z.data(), z.data() + z.size());
    }
    return j;
}

json to_json(const TourSpec& t)
{
    json j{{"kind", tour::to_string(t.kind)},
           {"space", core::to_string(t.space)},
           {"index", tour::to_string(t.index.kind)},
           {"lambda", t.index.lambda},
           {"d", t.d},
           {"seed", t.seed},
           {"n_bases", t.n_bases},
           {"max_iter", t.max_iter},
           {"guide_by", t.guide_by}};
    if (!t.variable.empty()) j["variable"] = t.variable;
    return j;
}

TourSpec tour_spec_from_json(const json& j, const std::string& path)
{
    Reader r(j, path);
    r.allow({"kind", "space", "index", "lambda", "d", "seed", "n_bases", "max_iter", "guide_by",
             "variable"});
    TourSpec t;
    t.kind = guarded(r.at("kind"), [&] { return tour::tour_kind_from_string(r.str("kind", "grand")); });
    t.space = guarded(r.at("space"), [&] { return core::space_from_string(r.str("space", "linked")); });
    t.index.kind = guarded(r.at("index"), [&] { return tour::index_from_string(r.str("index", "lda")); });
    t.index.lambda = r.number("lambda", 0.1);
    if (!(t.index.lambda >= 0.0 && t.index.lambda < 1.0)) {
        throw SchemaError(r.at("lambda"), "lambda must lie in [0, 1)");
    }
    t.d = static_cast<Eigen::Index>(r.integer("d", 2));
    if (t.d != 2 && t.d != 3) throw SchemaError(r.at("d"), "tour dimension must be 2 or 3");
    if (t.kind == tour::TourKind::guided && !tour::index_defined_for(t.index.kind, t.d)) {
        throw SchemaError(r.at("index"), "index is not defined for d=" + std::to_string(t.d));
    }
    const long long seed = r.integer("seed", 0);
    if (seed < 0) throw SchemaError(r.at("seed"), "seed must be non-negative");
    t.seed = static_cast<std::uint64_t>(seed);
    t.n_bases = static_cast<int>(r.integer("n_bases", tour::kDefaultBases));
    if (t.n_bases < 1) throw SchemaError(r.at("n_bases"), "n_bases must be positive");
    t.max_iter = static_cast<int>(r.integer("max_iter", 500));
    if (t.max_iter < 1) throw SchemaError(r.at("max_iter"), "max_iter must be positive");
    t.guide_by = r.str("guide_by", "cluster");
    if (t.guide_by != "cluster" && t.guide_by != "group") {
        throw SchemaError(r.at("guide_by"), "expected 'cluster' or 'group'");
    }
    t.variable = r.str("variable", "");
    if (t.kind == tour::TourKind::radial && t.variable.empty()) {
        throw SchemaError(r.at("variable"), "radial tours need a variable");
    }
    return t;
}

json to_json(const Settings& s)
{
    json j;
    j["version"] = kSettingsVersion;
    j["roles"] = {{"clustering", s.roles.clustering},
                  {"linked", s.roles.linked},
                  {"label", s.roles.label ? json(*s.roles.label) : json(nullptr)},
                  {"flags", s.roles.flags}};
    j["transform"] = {{"clustering", to_json(s.clustering_transform)},
                      {"linked", to_json(s.linked_transform)}};
    j["clustering"] = cluster_setting_json(s.clustering);
    j["precomputed_distances"] = s.precomputed_distances;
    j["display"] = {s.display_x, s.display_y};
    if (s.score) {
        json sc{{"kind", s.score->kind == ScoreKind::chi2 ? "chi2" : "external"}, {"name", s.score->name}};
        if (s.score->kind == ScoreKind::external) sc["column"] = s.score->column;
        j["score"] = std::move(sc);
    } else {
        j["score"] = nullptr;
    }
    j["n_bins"] = s.n_bins;
    j["hull"] = s.hull;
    j["tour"] = s.tour ? to_json(*s.tour) : json(nullptr);
    j["nldr"] = {{"clustering", s.nldr_clustering ? nldr_json(*s.nldr_clustering) : json(nullptr)},
                 {"linked", s.nldr_linked ? nldr_json(*s.nldr_linked) : json(nullptr)}};
    j["comparison"] = s.comparison ? cluster_setting_json(*s.comparison) : json(nullptr);
    return j;
}

Settings settings_from_json(const json& j)
{
    Reader top(j, "");
    top.allow({"version", "roles", "transform", "clustering", "precomputed_distances", "display",
               "score", "n_bins", "hull", "tour", "nldr", "comparison"});
    if (top.integer("version", kSettingsVersion) != kSettingsVersion) {
        throw SchemaError("/version", "unsupported settings version");
    }
    Settings s;

    Reader roles(top.raw("roles"), "/roles");
    roles.allow({"clustering", "linked", "label", "flags"});
    s.roles.clustering = roles.strings("clustering");
    s.roles.linked = roles.strings("linked");
    if (s.roles.clustering.empty()) throw SchemaError("/roles/clustering", "clustering space is empty");
    if (s.roles.linked.empty()) throw SchemaError("/roles/linked", "linked space is empty");
    if (roles.has("label")) s.roles.label = roles.str("label");
    s.roles.flags = roles.strings("flags");

    if (top.has("transform")) {
        Reader tr(top.raw("transform"), "/transform");
        tr.allow({"clustering", "linked"});
        if (tr.has("clustering")) s.clustering_transform = transform_from(tr.raw("clustering"), "/transform/clustering");
        if (tr.has("linked")) s.linked_transform = transform_from(tr.raw("linked"), "/transform/linked");
    }
    if (top.has("clustering")) {
        Reader c(top.raw("clustering"), "/clustering");
        c.allow({"metric", "linkage", "k"});
        s.clustering = cluster_setting_from(c);
    }
    s.precomputed_distances = top.boolean("precomputed_distances", false);

    const auto display = top.strings("display");
    if (display.size() == 2) {
        s.display_x = display[0];
        s.display_y = display[1];
    } else if (!display.empty()) {
        throw SchemaError("/display", "expected exactly two variable names");
    } else {
        s.display_x = s.roles.linked.front();
        s.display_y = s.roles.linked.size() > 1 ? s.roles.linked[1] : s.roles.linked.front();
    }

    if (top.has("score")) {
        Reader sc(top.raw("score"), "/score");
        sc.allow({"kind", "column", "name"});
        ScoreSpec spec;
        const std::string kind = sc.str("kind");
        if (kind == "chi2") {
            spec.kind = ScoreKind::chi2;
            spec.name = sc.str("name", "chi2");
        } else if (kind == "external") {
            spec.kind = ScoreKind::external;
            spec.column = sc.str("column");
            spec.name = sc.str("name", spec.column);
        } else {
            throw SchemaError("/score/kind", "unknown score kind '" + kind + "'");
        }
        s.score = spec;
    }
    s.n_bins = static_cast<int>(top.integer("n_bins", 4));
    if (s.n_bins < 2) throw SchemaError("/n_bins", "at least two bins are required");
    s.hull = top.boolean("hull", false);
    if (top.has("tour")) s.tour = tour_spec_from_json(top.raw("tour"), "/tour");
    if (top.has("nldr")) {
        Reader nl(top.raw("nldr"), "/nldr");
        nl.allow({"clustering", "linked"});
        if (nl.has("clustering")) s.nldr_clustering = nldr_from(nl.raw("clustering"), "/nldr/clustering");
        if (nl.has("linked")) s.nldr_linked = nldr_from(nl.raw("linked"), "/nldr/linked");
    }
    if (top.has("comparison")) {
        Reader c(top.raw("comparison"), "/comparison");
        c.allow({"metric", "linkage", "k"});
        s.comparison = cluster_setting_from(c);
    }
    if (s.score && s.score->kind == ScoreKind::chi2 &&
        s.clustering_transform.kind != TransformKind::pull) {
        throw SchemaError("/score/kind", "chi2 scores need a pull transform on the clustering space");
    }
    return s;
}

void validate(const Settings& s, const core::Dataset& data)
{
    auto numeric = [&](const std::string& name, const std::string& path) {
        if (!data.has_column(name)) throw SchemaError(path, "unknown variable '" + name + "'");
        if (!data.column(name).numeric) throw SchemaError(path, "variable '" + name + "' is not numeric");
    };
    std::set<std::string> seen;
    for (std::size_t i = 0; i < s.roles.clustering.size(); ++i) {
        const auto path = "/roles/clustering/" + std::to_string(i);
        numeric(s.roles.clustering[i], path);
        if (!seen.insert(s.roles.clustering[i]).second) throw SchemaError(path, "variable listed twice");
    }
    for (std::size_t i = 0; i < s.roles.linked.size(); ++i) {
        const auto path = "/roles/linked/" + std::to_string(i);
        numeric(s.roles.linked[i], path);
        if (!seen.insert(s.roles.linked[i]).second) {
            throw SchemaError(path, "variable '" + s.roles.linked[i] +
                                        "' assigned to both clustering and linked spaces");
        }
    }
    if (s.roles.label && !data.has_column(*s.roles.label)) {
        throw SchemaError("/roles/label", "unknown variable '" + *s.roles.label + "'");
    }
    for (std::size_t i = 0; i < s.roles.flags.size(); ++i) {
        if (!data.has_column(s.roles.flags[i])) {
            throw SchemaError("/roles/flags/" + std::to_string(i), "unknown variable '" + s.roles.flags[i] + "'");
        }
    }
    if (!s.roles.flags.empty()) {
        std::vector<std::vector<std::string>> flags;
        for (const auto& f : s.roles.flags) flags.push_back(data.column(f).text);
        guarded("/roles/flags", [&] { return core::cross_groups(flags); });
    }

    const auto in_linked = [&](const std::string& v) {
        return std::find(s.roles.linked.begin(), s.roles.linked.end(), v) != s.roles.linked.end();
    };
    if (!in_linked(s.display_x)) throw SchemaError("/display/0", "'" + s.display_x + "' is not a linked-space variable");
    if (!in_linked(s.display_y)) throw SchemaError("/display/1", "'" + s.display_y + "' is not a linked-space variable");

    const int n = static_cast<int>(data.n_rows());
    if (s.clustering.k > n) throw SchemaError("/clustering/k", "k exceeds the number of observations");
    if (s.comparison && s.comparison->k > n) throw SchemaError("/comparison/k", "k exceeds the number of observations");

    auto check_cov = [&](const TransformSpec& t, std::size_t p, const char* path) {
        if (t.kind == TransformKind::pull && static_cast<std::size_t>(t.covariance->dim()) != p) {
            throw SchemaError(path, "covariance is " + std::to_string(t.covariance->dim()) +
                                        "-dimensional but the space has " + std::to_string(p) + " variables");
        }
    };
    check_cov(s.clustering_transform, s.roles.clustering.size(), "/transform/clustering/covariance");
    check_cov(s.linked_transform, s.roles.linked.size(), "/transform/linked/covariance");

    if (s.score && s.score->kind == ScoreKind::external) numeric(s.score->column, "/score/column");
    if (s.score && s.n_bins > n) throw SchemaError("/n_bins", "more bins than observations");

    if (s.tour) {
        const std::size_t p = s.tour->space == core::Space::clustering ? s.roles.clustering.size()
                                                                     : s.roles.linked.size();
        if (static_cast<std::size_t>(s.tour->d) >= p && s.tour->kind == tour::TourKind::grand) {
            throw SchemaError("/tour/d", "tour dimension must be below the space dimension");
        }
        if (static_cast<std::size_t>(s.tour->d) > p) throw SchemaError("/tour/d", "tour dimension exceeds the space dimension");
        if (s.tour->kind == tour::TourKind::radial) {
            const auto& vars = s.tour->space == core::Space::clustering ? s.roles.clustering : s.roles.linked;
            if (std::find(vars.begin(), vars.end(), s.tour->variable) == vars.end()) {
                throw SchemaError("/tour/variable", "'" + s.tour->variable + "' is not in the tour space");
            }
        }
        if (s.tour->guide_by == "group" && s.roles.flags.empty()) {
            throw SchemaError("/tour/guide_by", "no grouping flags configured");
        }
    }
}

Settings default_settings(const core::RoleSpec& roles, std::size_t n)
{
    if (roles.clustering.empty()) throw SchemaError("/roles/clustering", "clustering space is empty");
    if (roles.linked.empty()) throw SchemaError("/roles/linked", "linked space is empty");
    Settings s;
    s.roles = roles;
    s.clustering.k = static_cast<int>(std::min<std::size_t>(4, n));
    s.display_x = roles.linked.front();
    s.display_y = roles.linked.size() > 1 ? roles.linked[1] : roles.linked.front();
    return s;
}

std::string canonical(const Settings& s)
{
    return to_json(s).dump(2) + "\n";
}

std::string fnv1a_hex(const std::string& text)
{
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string settings_hash(const Settings& s)
{
    return fnv1a_hex(canonical(s));
}

} // namespace twinspace::session
