#pragma once
// Bundled reference data: aggregated accuracy results (mean over three runs,
// with spread) for seven pruning algorithms across four architectures, five
// sparsity ratios, and three datasets, plus the matching architecture configs.

#include <string>
#include <vector>

#include "analysis.hpp"

namespace snntopo {

std::vector<std::string> fixture_datasets();
std::vector<std::string> fixture_algorithms();
std::vector<double> fixture_sparsities();

// One row per <architecture, dataset, algorithm, sparsity> with run = 0 and
// acc_std carrying the published spread. Combinations the source tables leave
// blank are omitted.
std::vector<AccuracyRecord> fixture_accuracy();
std::string fixture_accuracy_csv();

double fixture_dense_accuracy(const std::string& architecture, const std::string& dataset);

// Builtin architecture config serialized as JSON (32x32 input, 10 classes).
std::string fixture_architecture_json(const std::string& name);

}  // namespace snntopo
