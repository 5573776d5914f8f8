#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dynlogit/panel.hpp"
#include "dynlogit/terms.hpp"

namespace dynlogit {

enum class RowKind : std::uint8_t { vertex, edge };

/// Identifies the Bernoulli observation behind one design row. `j` is unused on vertex rows.
struct RowTag {
    RowKind kind = RowKind::vertex;
    int t = 0;
    VertexIndex i = 0;
    VertexIndex j = 0;

    bool operator==(const RowTag&) const = default;
};

/// Compressed sparse rows holding nonzeros only; columns ascend within a row.
struct SparseRows {
    std::size_t cols = 0;
    std::vector<std::uint64_t> row_ptr{0};
    std::vector<std::uint32_t> col_idx;
    std::vector<double> values;

    std::size_t rows() const noexcept { return row_ptr.size() - 1; }
    std::size_t nonzeros() const noexcept { return values.size(); }
    std::span<const std::uint32_t> row_cols(std::size_t r) const {
        return {col_idx.data() + row_ptr[r], static_cast<std::size_t>(row_ptr[r + 1] - row_ptr[r])};
    }
    std::span<const double> row_values(std::size_t r) const {
        return {values.data() + row_ptr[r], static_cast<std::size_t>(row_ptr[r + 1] - row_ptr[r])};
    }
    double row_dot(std::size_t r, std::span<const double> coef) const;
    /// Appends a row, dropping zero entries.
    void push_row(std::span<const std::uint32_t> cols_in, std::span<const double> vals_in);

    bool operator==(const SparseRows&) const = default;
};

/// Stacked Bernoulli regression problem: all vertex rows first, then all edge rows.
struct DesignMatrix {
    std::vector<std::uint8_t> responses;
    SparseRows features;
    std::vector<RowTag> tags;
    std::vector<std::string> column_names;
    std::size_t vertex_columns = 0;  // columns [0, vertex_columns) are vertex terms
    std::vector<std::string> vertex_labels;

    std::size_t rows() const noexcept { return responses.size(); }
    std::size_t cols() const noexcept { return column_names.size(); }
    std::size_t vertex_rows() const;

    bool operator==(const DesignMatrix&) const = default;
};

struct DesignOptions {
    LagPolicy lag_policy = LagPolicy::exclude;
    std::size_t threads = 0;
    /// Restricts rows to steps usable at this lag order as well, so models with
    /// different lags can share one set of observations.
    int window_lag = 0;
};

/// Throws EmptyDesignError when no transition step is usable.
DesignMatrix build_design(const NetworkPanel& panel, const ModelSpec& spec, const DesignOptions& options = {});

/// Vertex-only and edge-only designs, each with its own columns.
std::pair<DesignMatrix, DesignMatrix> split_design(const DesignMatrix& dm);

/// Writes `<prefix>.triplets.csv` (row,col,value; 0-based), `<prefix>.columns.csv`
/// and `<prefix>.tags.csv` (row,kind,t,i,j,response with vertex labels).
void write_design_dump(const DesignMatrix& dm, const std::filesystem::path& prefix);

}  // namespace dynlogit
