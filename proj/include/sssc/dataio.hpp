#pragma once

#include "sssc/types.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace sssc::dataio {

/// Deterministic partition of {0, ..., n-1}. Both lists are sorted ascending.
struct SampleSplit {
    std::vector<Index> in_sample;
    std::vector<Index> out_of_sample;
    std::uint64_t seed = 0;
};

/// Generated union-of-subspaces data with ground truth.
struct LabeledDataset {
    DataMatrix data;
    ClusterAssignment truth;
    std::vector<int> subspace_dims;
    /// Orthonormal basis (ambient x dim) for each subspace.
    std::vector<Matrix> bases;
    /// True for columns replaced by outliers.
    std::vector<bool> corrupted;
};

struct SynthParams {
    int k = 2;
    int ambient = 50;
    std::vector<int> dim_per;
    std::vector<int> points_per;
    double noise_sigma = 0.0;
    double corrupt_frac = 0.0;
    std::uint64_t seed = 0;
};

/// Reads a CSV whose rows are samples. The result stores samples as columns,
/// so an r-row, c-column file yields a c x r DataMatrix.
DataMatrix load_csv(const std::filesystem::path& path, bool has_header = false);

/// Writes samples (columns) as CSV rows using shortest round-trip formatting.
void save_csv(const std::filesystem::path& path, const DataMatrix& data);

/// One integer per line. `k` is inferred as max label + 1.
ClusterAssignment load_labels(const std::filesystem::path& path);
void save_labels(const std::filesystem::path& path, const std::vector<int>& labels);

/// Centers columns by the mean sample and projects onto the fewest leading
/// principal directions whose squared singular values reach `energy` of the total.
DataMatrix pca_retain_energy(const DataMatrix& y, double energy);

/// Draws p of n indices uniformly without replacement.
SampleSplit uniform_split(Index n, Index p, std::uint64_t seed);

/// Independent subspaces: disjoint coordinate blocks under one shared random
/// rotation, unit-norm samples, optional isotropic noise and outlier columns
/// drawn uniformly on the unit sphere. Samples are ordered by subspace.
LabeledDataset synth_subspaces(const SynthParams& params);

/// Number of columns `corrupt_frac` selects out of n (rounded to nearest).
Index corrupted_count(Index n, double corrupt_frac);

}  // namespace sssc::dataio
