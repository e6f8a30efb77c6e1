#include "twinspace/core/dataset.hpp"

#include "twinspace/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_set>

namespace twinspace::core {

namespace {

std::vector<std::vector<std::string>> split_records(std::string_view raw)
{
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> fields;
    std::string cell;
    bool in_quotes = false;
    bool any = false;

    auto end_record = [&] {
        fields.push_back(std::move(cell));
        cell.clear();
        // Blank lines carry no data.
        if (!(fields.size() == 1 && fields[0].empty() && !any)) {
            records.push_back(std::move(fields));
        }
        fields.clear();
        any = false;
    };

    for (std::size_t i = 0; i < raw.size(); ++i) {
        const char c = raw[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < raw.size() && raw[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cell.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            in_quotes = true;
            any = true;
            break;
        case ',':
            fields.push_back(std::move(cell));
            cell.clear();
            any = true;
            break;
        case '\r':
            break;
        case '\n':
            end_record();
            break;
        default:
            cell.push_back(c);
            any = true;
        }
    }
    if (in_quotes) {
        throw ParseError("unterminated quoted field", records.empty() ? 0 : records.size());
    }
    if (!cell.empty() || !fields.empty() || any) {
        end_record();
    }
    return records;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

bool parse_number(std::string_view s, double& out)
{
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

} // namespace

bool is_missing_token(std::string_view cell)
{
    cell = trim(cell);
    return cell.empty() || cell == "NA";
}

Dataset::Dataset(std::vector<Column> columns) : columns_(std::move(columns))
{
    std::unordered_set<std::string> seen;
    for (const auto& c : columns_) {
        if (!seen.insert(c.name).second) {
            throw Error("duplicate column name '" + c.name + "'");
        }
    }
    if (!columns_.empty()) {
        n_rows_ = columns_.front().text.size();
        for (const auto& c : columns_) {
            if (c.text.size() != n_rows_ || (c.numeric && c.values.size() != n_rows_)) {
                throw Error("column '" + c.name + "' has a different length");
            }
        }
    }
}

const Column& Dataset::column(std::string_view name) const
{
    for (const auto& c : columns_) {
        if (c.name == name) return c;
    }
    throw NotFound("unknown variable '" + std::string(name) + "'");
}

bool Dataset::has_column(std::string_view name) const
{
    return std::any_of(columns_.begin(), columns_.end(),
                       [&](const Column& c) { return c.name == name; });
}

Dataset parse_dataset(std::string_view raw)
{
    auto records = split_records(raw);
    if (records.empty()) {
        throw ParseError("missing header row", 0);
    }
    const auto& header = records.front();
    if (records.size() < 2) {
        throw ParseError("no data rows", 0);
    }
    const std::size_t width = header.size();
    const std::size_t n = records.size() - 1;

    std::vector<Column> columns(width);
    for (std::size_t j = 0; j < width; ++j) {
        columns[j].name = std::string(trim(header[j]));
        columns[j].text.reserve(n);
    }
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != width) {
            throw ParseError("row " + std::to_string(r) + " has " +
                                 std::to_string(records[r].size()) + " fields, expected " +
                                 std::to_string(width),
                             r);
        }
        for (std::size_t j = 0; j < width; ++j) {
            columns[j].text.push_back(records[r][j]);
        }
    }

    for (auto& col : columns) {
        std::vector<double> values(n, std::numeric_limits<double>::quiet_NaN());
        bool numeric = true;
        bool any_value = false;
        for (std::size_t i = 0; i < n && numeric; ++i) {
            if (is_missing_token(col.text[i])) continue;
            any_value = true;
            numeric = parse_number(col.text[i], values[i]) && std::isfinite(values[i]);
        }
        col.numeric = numeric && any_value;
        if (col.numeric) col.values = std::move(values);
    }
    return Dataset(std::move(columns));
}

Matrix impute_missing(const Matrix& m, const std::vector<std::string>& names)
{
    Matrix out = m;
    std::vector<double> present;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        present.clear();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (!std::isnan(m(i, j))) present.push_back(m(i, j));
        }
        if (present.size() == static_cast<std::size_t>(m.rows())) continue;
        if (present.empty()) {
            const std::string name = static_cast<std::size_t>(j) < names.size()
                                         ? names[j]
                                         : "#" + std::to_string(j + 1);
            throw Error("column '" + name + "' has no non-missing values to impute from");
        }
        std::sort(present.begin(), present.end());
        const std::size_t h = present.size() / 2;
        const double median = present.size() % 2 == 1 ? present[h]
                                                      : 0.5 * (present[h - 1] + present[h]);
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (std::isnan(out(i, j))) out(i, j) = median;
        }
    }
    return out;
}

namespace {

Matrix extract(const Dataset& ds, const std::vector<std::string>& names, const char* role)
{
    Matrix m(static_cast<Eigen::Index>(ds.n_rows()), static_cast<Eigen::Index>(names.size()));
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (!ds.has_column(names[j])) {
            throw NotFound(std::string(role) + " variable '" + names[j] + "' does not exist");
        }
        const Column& c = ds.column(names[j]);
        if (!c.numeric) {
            throw Error(std::string(role) + " variable '" + names[j] + "' is not numeric");
        }
        for (std::size_t i = 0; i < ds.n_rows(); ++i) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c.values[i];
        }
    }
    return impute_missing(m, names);
}

} // namespace

SpacedDataset assign_roles(const Dataset& ds, const RoleSpec& roles)
{
    if (roles.clustering.empty()) throw Error("clustering space is empty");
    if (roles.linked.empty()) throw Error("linked space is empty");

    std::set<std::string> used;
    for (const auto& v : roles.clustering) {
        if (!used.insert(v).second) throw Error("variable '" + v + "' listed twice");
    }
    for (const auto& v : roles.linked) {
        if (!used.insert(v).second) {
            throw Error("variable '" + v + "' assigned to both clustering and linked spaces");
        }
    }

    SpacedDataset out;
    out.n = ds.n_rows();
    out.clustering = extract(ds, roles.clustering, "clustering");
    out.linked = extract(ds, roles.linked, "linked");
    out.clustering_names = roles.clustering;
    out.linked_names = roles.linked;

    if (roles.label) {
        out.labels = ds.column(*roles.label).text;
    }
    for (const auto& c : ds.columns()) {
        if (c.numeric && !used.count(c.name) && c.name != roles.label.value_or("")) {
            out.extras_names.push_back(c.name);
        }
    }
    out.extras = extract(ds, out.extras_names, "extra");

    for (const auto& f : roles.flags) {
        out.flag_names.push_back(f);
        out.flag_columns.push_back(ds.column(f).text);
    }
    return out;
}

} // namespace twinspace::core
