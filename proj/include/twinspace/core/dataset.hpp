#pragma once

#include "twinspace/common.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace twinspace::core {

// One input column. Every cell keeps its raw text; numeric columns also
// carry parsed values with NaN marking missing cells.
struct Column {
    std::string name;
    bool numeric = false;
    std::vector<double> values;
    std::vector<std::string> text;
};

class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::vector<Column> columns);

    std::size_t n_rows() const noexcept { return n_rows_; }
    const std::vector<Column>& columns() const noexcept { return columns_; }
    const Column& column(std::string_view name) const;
    bool has_column(std::string_view name) const;

private:
    std::size_t n_rows_ = 0;
    std::vector<Column> columns_;
};

bool is_missing_token(std::string_view cell);

// Comma-separated text with a header row. "NA" and empty cells are missing.
// Double-quoted fields may contain commas and doubled quotes.
Dataset parse_dataset(std::string_view raw);

struct RoleSpec {
    std::vector<std::string> clustering;
    std::vector<std::string> linked;
    std::optional<std::string> label;
    std::vector<std::string> flags;
};

struct SpacedDataset {
    std::size_t n = 0;
    Matrix clustering;
    Matrix linked;
    Matrix extras;
    std::vector<std::string> clustering_names;
    std::vector<std::string> linked_names;
    std::vector<std::string> extras_names;
    std::optional<std::vector<std::string>> labels;
    std::vector<std::string> flag_names;
    std::vector<std::vector<std::string>> flag_columns;
};

// Extracts the role matrices (in role order) and median-imputes them.
// Numeric columns not named in either space, and not the label, go to extras.
SpacedDataset assign_roles(const Dataset& ds, const RoleSpec& roles);

// Replaces NaN cells with their column median. `names` is only used in
// error messages and may be empty.
Matrix impute_missing(const Matrix& m, const std::vector<std::string>& names = {});

} // namespace twinspace::core
