#include "treestrat/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "treestrat/csv.hpp"

namespace treestrat {

int FeatureTable::column_index(const std::string& name) const {
    for (size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    return -1;
}

namespace {

bool is_missing(const std::string& field) {
    return field.empty() || field == "NA" || field == "NaN" || field == "nan";
}

} // namespace

FeatureTable FeatureTable::from_csv(const std::string& text) {
    const auto t = csv::parse(text);
    const int id_col = t.column("id");
    const int cloud_col = t.column("cloud_id");
    FeatureTable ft;
    std::vector<int> feature_cols;
    for (size_t c = 0; c < t.header.size(); ++c) {
        if (static_cast<int>(c) == id_col || static_cast<int>(c) == cloud_col) continue;
        feature_cols.push_back(static_cast<int>(c));
        ft.columns.push_back(t.header[c]);
    }
    if (ft.columns.empty()) throw ValidationError("feature table has no feature columns");
    const int n = static_cast<int>(t.rows.size());
    ft.values.resize(n, static_cast<int>(feature_cols.size()));
    for (int r = 0; r < n; ++r) {
        ft.row_ids.push_back(id_col >= 0 ? t.rows[r][id_col] : std::to_string(r));
        ft.cloud_ids.push_back(cloud_col >= 0 ? t.rows[r][cloud_col] : "all");
        for (size_t c = 0; c < feature_cols.size(); ++c) {
            const std::string& f = t.rows[r][feature_cols[c]];
            ft.values(r, static_cast<int>(c)) =
                is_missing(f) ? std::numeric_limits<double>::quiet_NaN()
                              : csv::parse_double(f, "feature table row " + std::to_string(r + 1));
        }
    }
    return ft;
}

FeatureTable FeatureTable::read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open feature table: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_csv(ss.str());
}

std::string FeatureTable::to_csv() const {
    csv::Table t;
    t.header = {"id", "cloud_id"};
    for (const auto& c : columns) t.header.push_back(c);
    for (int r = 0; r < rows(); ++r) {
        std::vector<std::string> row{row_ids[r], cloud_ids[r]};
        for (int c = 0; c < cols(); ++c) {
            const double v = values(r, c);
            row.push_back(std::isnan(v) ? "NA" : csv::format_double(v));
        }
        t.rows.push_back(std::move(row));
    }
    return csv::to_string(t);
}

void FeatureTable::write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write feature table: " + path);
    out << to_csv();
}

const std::vector<std::string>& ViewSpec::default_view_names() {
    static const std::vector<std::string> names{"first_order", "shape",  "glcm",
                                                "glrlm",       "glzlm", "ngldm"};
    return names;
}

ViewSpec ViewSpec::from_csv(const std::string& text, int components_per_view) {
    const auto t = csv::parse(text);
    const int fcol = t.column("feature_name");
    const int vcol = t.column("view_name");
    if (fcol < 0 || vcol < 0)
        throw ValidationError("view spec csv needs columns feature_name and view_name");
    ViewSpec spec;
    spec.components_per_view = components_per_view;
    for (const auto& row : t.rows) {
        const std::string& view = row[vcol];
        auto it = std::find_if(spec.views.begin(), spec.views.end(),
                               [&](const View& v) { return v.name == view; });
        if (it == spec.views.end()) {
            spec.views.push_back({view, {}});
            it = spec.views.end() - 1;
        }
        it->columns.push_back(row[fcol]);
    }
    if (spec.views.empty()) throw ValidationError("view spec is empty");
    return spec;
}

ViewSpec ViewSpec::read_file(const std::string& path, int components_per_view) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open view spec: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_csv(ss.str(), components_per_view);
}

void ViewSpec::check_against(const FeatureTable& table) const {
    if (components_per_view < 1) throw ValidationError("components per view must be >= 1");
    std::set<std::string> assigned;
    for (const auto& view : views) {
        if (static_cast<int>(view.columns.size()) < components_per_view)
            throw ValidationError("view '" + view.name + "' has " +
                                  std::to_string(view.columns.size()) + " columns, fewer than " +
                                  std::to_string(components_per_view) + " components");
        for (const auto& col : view.columns) {
            if (table.column_index(col) < 0)
                throw ValidationError("view '" + view.name + "' names unknown column '" + col + "'");
            if (!assigned.insert(col).second)
                throw ValidationError("column '" + col + "' assigned to more than one view");
        }
    }
    for (const auto& col : table.columns)
        if (!assigned.count(col))
            throw ValidationError("column '" + col + "' is not assigned to any view");
}

FeatureTable impute(const FeatureTable& table) {
    if (table.rows() < 1) throw ValidationError("no lesions in feature table");
    FeatureTable out = table;
    for (int c = 0; c < table.cols(); ++c) {
        std::vector<double> observed;
        for (int r = 0; r < table.rows(); ++r)
            if (!std::isnan(table.values(r, c))) observed.push_back(table.values(r, c));
        if (observed.empty())
            throw ValidationError("column uninformative: '" + table.columns[c] +
                                  "' has no observed values");
        std::sort(observed.begin(), observed.end());
        const size_t m = observed.size();
        const double median =
            m % 2 ? observed[m / 2] : 0.5 * (observed[m / 2 - 1] + observed[m / 2]);
        for (int r = 0; r < table.rows(); ++r)
            if (std::isnan(out.values(r, c))) out.values(r, c) = median;
    }
    return out;
}

ZscoreResult zscore(const FeatureTable& table, bool sample_sd) {
    if (table.values.hasNaN())
        throw ValidationError("zscore requires an imputed table (missing values present)");
    ZscoreResult res;
    res.table = table;
    const int n = table.rows();
    for (int c = 0; c < table.cols(); ++c) {
        const double mean = table.values.col(c).mean();
        double ss = (table.values.col(c).array() - mean).square().sum();
        const double denom = sample_sd ? std::max(1, n - 1) : n;
        const double sd = std::sqrt(ss / denom);
        if (sd == 0.0) {
            res.table.values.col(c).setZero();
            res.warnings.push_back("column '" + table.columns[c] +
                                   "' is constant; mapped to zeros");
        } else {
            res.table.values.col(c) = (table.values.col(c).array() - mean) / sd;
        }
    }
    return res;
}

ViewPcaResult view_pca(const FeatureTable& table, const ViewSpec& spec) {
    spec.check_against(table);
    if (table.values.hasNaN()) throw ValidationError("view_pca requires an imputed table");
    const int n = table.rows();
    const int k = spec.components_per_view;
    ViewPcaResult res;
    res.table.row_ids = table.row_ids;
    res.table.cloud_ids = table.cloud_ids;
    res.table.values.resize(n, static_cast<int>(spec.views.size()) * k);
    int out_col = 0;
    for (const auto& view : spec.views) {
        const int m = static_cast<int>(view.columns.size());
        Eigen::MatrixXd block(n, m);
        for (int c = 0; c < m; ++c)
            block.col(c) = table.values.col(table.column_index(view.columns[c]));
        const Eigen::RowVectorXd mean = block.colwise().mean();
        const Eigen::MatrixXd centered = block.rowwise() - mean;
        const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
        if (es.info() != Eigen::Success)
            throw ValidationError("eigendecomposition failed for view '" + view.name + "'");
        const auto& evals = es.eigenvalues(); // ascending
        double total_var = 0.0;
        for (int i = 0; i < m; ++i) total_var += std::max(0.0, evals(i));
        ViewPcaResult::ViewReport report{view.name, {}};
        for (int comp = 0; comp < k; ++comp) {
            Eigen::VectorXd dir = es.eigenvectors().col(m - 1 - comp);
            int arg = 0;
            for (int i = 1; i < m; ++i)
                if (std::abs(dir(i)) > std::abs(dir(arg))) arg = i;
            if (dir(arg) < 0.0) dir = -dir;
            res.table.values.col(out_col) = centered * dir;
            res.table.columns.push_back(view.name + "_pc" + std::to_string(comp + 1));
            report.explained_fraction.push_back(
                total_var > 0.0 ? std::max(0.0, evals(m - 1 - comp)) / total_var : 0.0);
            ++out_col;
        }
        res.reports.push_back(std::move(report));
    }
    return res;
}

} // namespace treestrat
