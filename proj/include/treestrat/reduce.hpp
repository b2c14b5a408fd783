#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "treestrat/errors.hpp"

namespace treestrat {

/// Lesion-by-feature table. Missing values are NaN until imputed. Every row
/// carries the cloud (patient) it belongs to.
struct FeatureTable {
    std::vector<std::string> columns;
    std::vector<std::string> row_ids;
    std::vector<std::string> cloud_ids;
    Eigen::MatrixXd values;

    int rows() const { return static_cast<int>(values.rows()); }
    int cols() const { return static_cast<int>(values.cols()); }
    int column_index(const std::string& name) const;

    /// CSV with optional `id` and `cloud_id` columns; empty, NA, NaN and nan
    /// fields are missing values.
    static FeatureTable from_csv(const std::string& text);
    static FeatureTable read_file(const std::string& path);
    std::string to_csv() const;
    void write_file(const std::string& path) const;
};

/// Partition of the feature columns into named semantic views, with a fixed
/// number of principal components retained per view.
struct ViewSpec {
    struct View {
        std::string name;
        std::vector<std::string> columns;
    };
    std::vector<View> views;
    int components_per_view = 2;

    /// CSV with columns (feature_name, view_name).
    static ViewSpec from_csv(const std::string& text, int components_per_view = 2);
    static ViewSpec read_file(const std::string& path, int components_per_view = 2);

    /// The six radiomic view names shipped as the default.
    static const std::vector<std::string>& default_view_names();

    /// Views must partition the table's columns; every view needs at least
    /// components_per_view columns.
    void check_against(const FeatureTable& table) const;
};

/// Replace missing values by the column median of the observed entries.
/// A fully missing column is uninformative and raises ValidationError.
FeatureTable impute(const FeatureTable& table);

struct ZscoreResult {
    FeatureTable table;
    std::vector<std::string> warnings; // constant columns mapped to zeros
};

/// Column-wise Z-transform: mean 0, population (divide-by-n) standard
/// deviation 1; sample_sd switches to the n-1 convention.
ZscoreResult zscore(const FeatureTable& table, bool sample_sd = false);

struct ViewPcaResult {
    FeatureTable table;
    struct ViewReport {
        std::string view;
        std::vector<double> explained_fraction; // per retained component
    };
    std::vector<ViewReport> reports;
};

/// Per-view PCA keeping components_per_view directions per view. Component
/// signs are fixed by making the largest-magnitude loading positive.
/// Explained-variance fractions are reported but never drive selection.
ViewPcaResult view_pca(const FeatureTable& table, const ViewSpec& spec);

} // namespace treestrat
