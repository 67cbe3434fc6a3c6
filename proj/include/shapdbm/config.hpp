#pragma once

#include "shapdbm/boundary_map.hpp"
#include "shapdbm/classifier.hpp"
#include "shapdbm/dataset.hpp"
#include "shapdbm/inverse_projection.hpp"
#include "shapdbm/shapley.hpp"
#include "shapdbm/tsne.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace shapdbm {

enum class RunMode { Data, Shapley, Both };
enum class DataSource { Idx, Csv, Synthetic };

struct DatasetConfig {
    DataSource source = DataSource::Synthetic;
    // idx
    std::filesystem::path images_path;
    std::filesystem::path labels_path;
    // csv
    std::filesystem::path csv_path;
    int label_column = 0;
    bool header_row = false;
    // synthetic
    SyntheticSpec synthetic;
    double test_fraction = 0.2;
    int limit = 0;  // keep only the first k samples after loading (0 = all)
};

struct GridConfig {
    int resolution = 500;
    int locations_per_pixel = 1;
    double margin = 0.05;  // bounds expansion fraction
};

/// Everything one pipeline run needs, parsed from the sectioned key=value
/// config format.  Every key has a default; unknown keys are errors.
struct RunConfig {
    DatasetConfig dataset;

    RunMode mode = RunMode::Both;
    std::filesystem::path out_dir = "runs/out";
    std::uint64_t master_seed = 42;
    int threads = 0;
    bool metrics_on_test = false;
    int roundtrip_samples = 8;

    std::vector<int> classifier_hidden = {256, 128};
    Activation classifier_activation = Activation::Relu;
    TrainConfig train;

    int shapley_background = 100;
    ShapleyConfig shapley;

    TsneConfig projection;
    InvTrainConfig inverse;
    GridConfig grid;

    // raw text + overrides, kept for the manifest snapshot
    std::string source_text;
    std::vector<std::string> overrides;

    bool wants_data_branch() const { return mode != RunMode::Shapley; }
    bool wants_shapley_branch() const { return mode != RunMode::Data; }
};

/// Parses config text, applying `overrides` ("section.key=value") on top.
/// Unknown sections or keys raise ConfigError.
RunConfig parse_run_config(const std::string& text,
                           const std::vector<std::string>& overrides = {});

RunConfig load_run_config(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides = {});

/// A fully commented config with every key at its default value.
std::string default_config_text();

}  // namespace shapdbm
