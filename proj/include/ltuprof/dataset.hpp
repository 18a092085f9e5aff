#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ltuprof/common.hpp"

namespace ltuprof {

// Dense row-major feature matrix with a named, hashed column schema. Models
// refuse to predict on a matrix whose schema differs from training.
struct FeatureMatrix {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<double> values;
    std::vector<std::string> names;

    double at(std::size_t i, std::size_t j) const { return values[i * n_cols + j]; }
    double& at(std::size_t i, std::size_t j) { return values[i * n_cols + j]; }
    std::span<const double> row(std::size_t i) const {
        return {values.data() + i * n_cols, n_cols};
    }

    std::uint64_t schema_hash() const {
        std::uint64_t h = kFnvOffset;
        for (const auto& name : names) {
            h = fnv1a64(name, h);
            h = fnv1a64("\x1f", h);
        }
        return h;
    }

    FeatureMatrix select_rows(std::span<const std::uint32_t> rows) const {
        FeatureMatrix out;
        out.n_rows = rows.size();
        out.n_cols = n_cols;
        out.names = names;
        out.values.resize(out.n_rows * n_cols);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const double* src = values.data() + static_cast<std::size_t>(rows[r]) * n_cols;
            std::copy(src, src + n_cols, out.values.data() + r * n_cols);
        }
        return out;
    }
};

}  // namespace ltuprof
