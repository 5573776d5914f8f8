#include "dynlogit/design.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "dynlogit/error.hpp"
#include "dynlogit/parallel.hpp"
#include "text_util.hpp"

namespace dynlogit {

double SparseRows::row_dot(std::size_t r, std::span<const double> coef) const {
    double s = 0.0;
    for (auto k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += values[k] * coef[col_idx[k]];
    return s;
}

void SparseRows::push_row(std::span<const std::uint32_t> cols_in, std::span<const double> vals_in) {
    for (std::size_t k = 0; k < cols_in.size(); ++k) {
        if (vals_in[k] == 0.0) continue;
        col_idx.push_back(cols_in[k]);
        values.push_back(vals_in[k]);
    }
    row_ptr.push_back(values.size());
}

std::size_t DesignMatrix::vertex_rows() const {
    std::size_t n = 0;
    for (const auto& tag : tags)
        if (tag.kind == RowKind::vertex) ++n;
    return n;
}

namespace {

struct Block {
    std::vector<std::uint8_t> responses;
    std::vector<RowTag> tags;
    SparseRows rows;
};

void append(DesignMatrix& dm, Block& b) {
    auto& f = dm.features;
    const auto base = f.values.size();
    f.col_idx.insert(f.col_idx.end(), b.rows.col_idx.begin(), b.rows.col_idx.end());
    f.values.insert(f.values.end(), b.rows.values.begin(), b.rows.values.end());
    for (std::size_t r = 1; r < b.rows.row_ptr.size(); ++r) f.row_ptr.push_back(base + b.rows.row_ptr[r]);
    dm.responses.insert(dm.responses.end(), b.responses.begin(), b.responses.end());
    dm.tags.insert(dm.tags.end(), b.tags.begin(), b.tags.end());
    b = Block{};
}

}  // namespace

DesignMatrix build_design(const NetworkPanel& panel, const ModelSpec& spec, const DesignOptions& options) {
    const auto expanded = expand_model(spec, panel);
    const CompiledModel model(expanded, panel.risk_set());
    const int window = std::max(model.max_lag(), options.window_lag);
    const auto times = usable_times(panel, window, options.lag_policy);
    if (times.empty()) {
        throw EmptyDesignError("no usable transition steps (max lag " + std::to_string(window) + ", " +
                               std::to_string(panel.snapshots().size()) + " observed snapshots)");
    }
    const auto nv = static_cast<std::uint32_t>(model.vertex_columns());
    const auto ne = static_cast<std::uint32_t>(model.edge_columns());
    const std::size_t universe = panel.risk_set().size();

    std::vector<Block> vertex_blocks(times.size());
    std::vector<Block> edge_blocks(times.size());
    parallel_for(times.size(), options.threads, [&](std::size_t k) {
        const int t = times[k];
        const Snapshot& now = *panel.find(t);
        std::vector<std::shared_ptr<const LaggedGraph>> storage;
        const auto ctx = observed_context(model, panel, t, options.lag_policy, storage);

        std::vector<std::uint32_t> vcols(nv);
        std::vector<std::uint32_t> ecols(ne);
        for (std::uint32_t c = 0; c < nv; ++c) vcols[c] = c;
        for (std::uint32_t c = 0; c < ne; ++c) ecols[c] = nv + c;
        std::vector<double> buf(std::max(nv, ne));

        auto& vb = vertex_blocks[k];
        vb.responses.reserve(universe);
        for (VertexIndex p = 0; p < universe; ++p) {
            model.vertex_features(ctx, p, {buf.data(), nv});
            vb.rows.push_row(vcols, {buf.data(), nv});
            vb.responses.push_back(now.present.contains(p) ? 1 : 0);
            vb.tags.push_back({RowKind::vertex, t, p, 0});
        }

        auto& eb = edge_blocks[k];
        const auto members = now.present.members();
        std::size_t next_edge = 0;
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                const VertexIndex i = members[a];
                const VertexIndex j = members[b];
                model.edge_features(ctx, i, j, {buf.data(), ne});
                eb.rows.push_row(ecols, {buf.data(), ne});
                // Edges and pair enumeration are both lexicographic in (i, j).
                bool y = next_edge < now.edges.size() && now.edges[next_edge].i == i && now.edges[next_edge].j == j;
                if (y) ++next_edge;
                eb.responses.push_back(y ? 1 : 0);
                eb.tags.push_back({RowKind::edge, t, i, j});
            }
        }
    });

    DesignMatrix dm;
    dm.column_names = expanded.column_names();
    dm.vertex_columns = nv;
    dm.features.cols = dm.column_names.size();
    dm.vertex_labels = panel.risk_set().labels();
    for (auto& b : vertex_blocks) append(dm, b);
    for (auto& b : edge_blocks) append(dm, b);
    if (dm.rows() == 0) throw EmptyDesignError("design has no rows");
    return dm;
}

std::pair<DesignMatrix, DesignMatrix> split_design(const DesignMatrix& dm) {
    DesignMatrix parts[2];
    const std::size_t nv = dm.vertex_columns;
    for (int k = 0; k < 2; ++k) {
        auto& p = parts[k];
        p.vertex_labels = dm.vertex_labels;
        if (k == 0) {
            p.column_names.assign(dm.column_names.begin(), dm.column_names.begin() + static_cast<std::ptrdiff_t>(nv));
            p.vertex_columns = nv;
        } else {
            p.column_names.assign(dm.column_names.begin() + static_cast<std::ptrdiff_t>(nv), dm.column_names.end());
            p.vertex_columns = 0;
        }
        p.features.cols = p.column_names.size();
    }
    std::vector<std::uint32_t> cols;
    for (std::size_t r = 0; r < dm.rows(); ++r) {
        const bool vertex = dm.tags[r].kind == RowKind::vertex;
        auto& p = parts[vertex ? 0 : 1];
        auto rc = dm.features.row_cols(r);
        cols.assign(rc.begin(), rc.end());
        if (!vertex) {
            for (auto& c : cols) c -= static_cast<std::uint32_t>(nv);
        }
        p.features.push_row(cols, dm.features.row_values(r));
        p.responses.push_back(dm.responses[r]);
        p.tags.push_back(dm.tags[r]);
    }
    return {std::move(parts[0]), std::move(parts[1])};
}

void write_design_dump(const DesignMatrix& dm, const std::filesystem::path& prefix) {
    auto path = [&](const char* suffix) {
        auto p = prefix;
        p += suffix;
        return p;
    };
    std::ostringstream trip;
    trip.precision(17);
    trip << "row,col,value\n";
    for (std::size_t r = 0; r < dm.rows(); ++r) {
        auto c = dm.features.row_cols(r);
        auto v = dm.features.row_values(r);
        for (std::size_t k = 0; k < c.size(); ++k) trip << r << ',' << c[k] << ',' << v[k] << '\n';
    }
    detail::write_file(path(".triplets.csv"), trip.str());

    std::ostringstream cols;
    cols << "col,name,block\n";
    for (std::size_t c = 0; c < dm.cols(); ++c) {
        cols << c << ',' << dm.column_names[c] << ',' << (c < dm.vertex_columns ? "vertex" : "edge") << '\n';
    }
    detail::write_file(path(".columns.csv"), cols.str());

    std::ostringstream tags;
    tags << "row,kind,t,i,j,response\n";
    for (std::size_t r = 0; r < dm.rows(); ++r) {
        const auto& tag = dm.tags[r];
        const bool edge = tag.kind == RowKind::edge;
        tags << r << ',' << (edge ? "edge" : "vertex") << ',' << tag.t << ',' << dm.vertex_labels.at(tag.i) << ','
             << (edge ? dm.vertex_labels.at(tag.j) : std::string()) << ',' << int(dm.responses[r]) << '\n';
    }
    detail::write_file(path(".tags.csv"), tags.str());
}

}  // namespace dynlogit
