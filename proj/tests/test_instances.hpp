#pragma once

// Shared helpers for building small random layered-graph instances with
// known cluster sizes.

#include <cstdint>
#include <vector>

#include "gnm/dataset.hpp"
#include "gnm/graph.hpp"
#include "gnm/util.hpp"

namespace gnm_test {

struct RandomInstance {
    gnm::PhysicalDataset physical;
    gnm::ModelDataset model;
    double lambda = 0.0;
    std::vector<std::size_t> cluster_sizes;
};

// Physical inputs sit at 0, 1, ..., m-1; each cluster's model points jitter
// within +-0.45 of their physical x, so the nearest-input assignment
// reproduces the intended clusters exactly and none is empty.
inline RandomInstance make_random_instance(std::uint64_t seed, std::size_t max_m = 6,
                                           std::size_t max_cluster = 5) {
    gnm::SplitMix64 rng(seed);
    RandomInstance inst;
    const std::size_t m = 2 + rng.below(max_m - 1);

    std::vector<gnm::PhysicalPoint> phys(m);
    for (std::size_t j = 0; j < m; ++j) {
        phys[j] = {static_cast<double>(j), rng.uniform()};
    }

    std::vector<gnm::ModelPoint> model;
    inst.cluster_sizes.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t size = 1 + rng.below(max_cluster);
        inst.cluster_sizes[j] = size;
        for (std::size_t c = 0; c < size; ++c) {
            const double x = static_cast<double>(j) + rng.uniform(-0.45, 0.45);
            model.push_back({x, rng.uniform(), rng.uniform()});
        }
    }

    inst.physical = gnm::PhysicalDataset::from_points(std::move(phys));
    inst.model = gnm::ModelDataset::from_points(std::move(model));
    inst.lambda = rng.uniform();
    return inst;
}

// Same but with every cluster holding exactly `size` points.
inline RandomInstance make_uniform_instance(std::uint64_t seed, std::size_t m,
                                            std::size_t size) {
    gnm::SplitMix64 rng(seed);
    RandomInstance inst;

    std::vector<gnm::PhysicalPoint> phys(m);
    for (std::size_t j = 0; j < m; ++j) {
        phys[j] = {static_cast<double>(j), rng.uniform()};
    }
    std::vector<gnm::ModelPoint> model;
    inst.cluster_sizes.assign(m, size);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t c = 0; c < size; ++c) {
            const double x = static_cast<double>(j) + rng.uniform(-0.45, 0.45);
            model.push_back({x, rng.uniform(), rng.uniform()});
        }
    }
    inst.physical = gnm::PhysicalDataset::from_points(std::move(phys));
    inst.model = gnm::ModelDataset::from_points(std::move(model));
    inst.lambda = rng.uniform();
    return inst;
}

}  // namespace gnm_test
