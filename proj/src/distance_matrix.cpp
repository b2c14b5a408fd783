#include "treestrat/distance_matrix.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "treestrat/csv.hpp"
#include "treestrat/errors.hpp"

namespace treestrat {

DistanceMatrix::DistanceMatrix(int n, std::vector<std::string> ids) : n_(n), ids_(std::move(ids)) {
    if (n < 0) throw ValidationError("distance matrix size must be >= 0");
    data_.assign(static_cast<size_t>(n) * n, 0.0);
    if (ids_.empty()) {
        ids_.reserve(n);
        for (int i = 0; i < n; ++i) ids_.push_back(std::to_string(i));
    }
    if (static_cast<int>(ids_.size()) != n)
        throw ValidationError("distance matrix id count differs from size");
}

void DistanceMatrix::set(int i, int j, double v) {
    if (i == j && v != 0.0) throw ValidationError("distance matrix diagonal must be 0");
    data_[static_cast<size_t>(i) * n_ + j] = v;
    data_[static_cast<size_t>(j) * n_ + i] = v;
}

void DistanceMatrix::check() const {
    for (int i = 0; i < n_; ++i) {
        if ((*this)(i, i) != 0.0)
            throw ValidationError("distance matrix diagonal entry " + std::to_string(i) +
                                  " is not exactly 0");
        for (int j = 0; j < n_; ++j) {
            const double v = (*this)(i, j);
            if (!std::isfinite(v) || v < 0.0)
                throw ValidationError("distance matrix entry (" + std::to_string(i) + "," +
                                      std::to_string(j) + ") is not finite and nonnegative");
            if (std::abs(v - (*this)(j, i)) > 1e-12)
                throw ValidationError("distance matrix asymmetry at (" + std::to_string(i) + "," +
                                      std::to_string(j) + ") exceeds 1e-12");
        }
    }
}

bool DistanceMatrix::all_zero() const {
    for (double v : data_)
        if (v != 0.0) return false;
    return true;
}

std::string DistanceMatrix::to_csv() const {
    csv::Table t;
    t.header.push_back("id");
    for (const auto& id : ids_) t.header.push_back(id);
    for (int i = 0; i < n_; ++i) {
        std::vector<std::string> row;
        row.push_back(ids_[i]);
        for (int j = 0; j < n_; ++j) row.push_back(csv::format_double((*this)(i, j)));
        t.rows.push_back(std::move(row));
    }
    return csv::to_string(t);
}

DistanceMatrix DistanceMatrix::from_csv(const std::string& text) {
    const auto t = csv::parse(text);
    const int n = static_cast<int>(t.rows.size());
    if (static_cast<int>(t.header.size()) != n + 1)
        throw ValidationError("distance matrix csv must be square with an id column");
    std::vector<std::string> ids(t.header.begin() + 1, t.header.end());
    DistanceMatrix m(n, ids);
    for (int i = 0; i < n; ++i) {
        if (t.rows[i][0] != ids[i])
            throw ValidationError("distance matrix csv row ids do not match header order");
        for (int j = 0; j < n; ++j) {
            const double v = csv::parse_double(t.rows[i][j + 1], "distance matrix");
            m.data_[static_cast<size_t>(i) * n + j] = v;
        }
    }
    m.check();
    return m;
}

DistanceMatrix DistanceMatrix::read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open distance matrix: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_csv(ss.str());
}

void DistanceMatrix::write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write distance matrix: " + path);
    out << to_csv();
}

} // namespace treestrat
