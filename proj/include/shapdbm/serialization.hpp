#pragma once

#include "shapdbm/boundary_map.hpp"
#include "shapdbm/classifier.hpp"
#include "shapdbm/inverse_projection.hpp"
#include "shapdbm/map_metrics.hpp"
#include "shapdbm/shapley.hpp"
#include "shapdbm/tsne.hpp"

#include <filesystem>
#include <string>

namespace shapdbm {

// Length-prefixed little-endian binary container, magic "SDBM".  Each file
// holds one artifact; the kind byte keeps loaders honest when stages are
// re-run against stale directories.  CSV twins of the same artifacts are for
// human auditing; digests are computed over the binary form.

void save_dataset(const std::filesystem::path& path, const Dataset& data);
Dataset load_dataset(const std::filesystem::path& path);

void save_shapley(const std::filesystem::path& path, const ShapleyMatrix& matrix);
ShapleyMatrix load_shapley(const std::filesystem::path& path);

void save_embedding(const std::filesystem::path& path, const Embedding& embedding);
Embedding load_embedding(const std::filesystem::path& path);

void save_classifier(const std::filesystem::path& path, const NetworkModel& model);
NetworkModel load_classifier(const std::filesystem::path& path);

void save_inverse(const std::filesystem::path& path, const InverseModel& model);
InverseModel load_inverse(const std::filesystem::path& path);

void save_decision_map(const std::filesystem::path& path, const DecisionMap& map);
DecisionMap load_decision_map(const std::filesystem::path& path);

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double value);

void write_text(const std::filesystem::path& path, const std::string& text);

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_csv(const std::filesystem::path& path);

/// Features plus a final integer label column.
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);

/// One row per sample, final column holds the base value.
void write_shapley_csv(const std::filesystem::path& path, const ShapleyMatrix& matrix);

/// x,y per row, in input order.
void write_embedding_csv(const std::filesystem::path& path, const Embedding& embedding);

void write_map_labels_csv(const std::filesystem::path& path, const DecisionMap& map);
void write_map_confidence_csv(const std::filesystem::path& path, const DecisionMap& map);

}  // namespace shapdbm
