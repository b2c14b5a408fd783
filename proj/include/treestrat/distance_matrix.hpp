#pragma once

#include <string>
#include <vector>

namespace treestrat {

/// Dense symmetric nonnegative matrix with zero diagonal and item ids.
/// set() mirrors both entries, so symmetry is exact by construction.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(int n, std::vector<std::string> ids = {});

    int size() const { return n_; }
    double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * n_ + j]; }
    void set(int i, int j, double v);

    const std::vector<std::string>& ids() const { return ids_; }

    /// Symmetry within 1e-12, diagonal exactly 0, entries finite and >= 0.
    void check() const;

    bool all_zero() const;

    std::string to_csv() const;
    static DistanceMatrix from_csv(const std::string& text);
    static DistanceMatrix read_file(const std::string& path);
    void write_file(const std::string& path) const;

private:
    int n_ = 0;
    std::vector<double> data_;
    std::vector<std::string> ids_;
};

} // namespace treestrat
