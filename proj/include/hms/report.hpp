#pragma once

#include <string>
#include <vector>

namespace hms {

struct CheckRow {
    std::string name;
    double residual;
    double tolerance;
    bool pass;
};

/// Residual table produced by the verification routines.
struct Report {
    std::vector<CheckRow> rows;
    void add(std::string name, double residual, double tolerance) {
        rows.push_back({std::move(name), residual, tolerance, residual <= tolerance});
    }
    bool all_pass() const {
        for (const auto& r : rows)
            if (!r.pass) return false;
        return true;
    }
    double max_residual() const {
        double m = 0;
        for (const auto& r : rows) m = std::max(m, r.residual);
        return m;
    }
};

} // namespace hms
