#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "coldstart/al_loop.hpp"
#include "coldstart/dataset.hpp"
#include "coldstart/metrics.hpp"
#include "coldstart/models.hpp"
#include "coldstart/select.hpp"

namespace coldstart::io {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path);
// Writes through a temporary file and renames it into place.
void write_file(const fs::path& path, std::string_view contents);

// Embeddings: "id,f0,...,f{d-1}" header, one row per sample.
EmbeddingDataset parse_embeddings(std::string_view text, Provenance provenance = Provenance::kCustom);
std::string format_embeddings(const EmbeddingDataset& ds);
EmbeddingDataset load_embeddings(const fs::path& path, Provenance provenance = Provenance::kCustom);
void save_embeddings(const EmbeddingDataset& ds, const fs::path& path);

// Labels: "id,label" header, label in {0,1}.
LabelMap parse_labels(std::string_view text);
std::string format_labels(const LabelMap& labels);
LabelMap load_labels(const fs::path& path);

// Scores: "id,probability" header, used by the eval verb.
std::map<SampleId, double> parse_scores(std::string_view text);
std::string format_scores(const std::map<SampleId, double>& scores);

// Split: "id,part" header, part in {train,validation,test}.
std::string format_split(const DataSplit& split);
DataSplit parse_split(std::string_view text);

// Plan:
//   #coldstart-plan v1
//   method,<random|clustering>
//   seed,<u64>
//   provenance,<tag|none>
//   rank,id,k_source
//   1,<id>,<k|random>
//   ...
std::string format_plan(const SelectionPlan& plan);
SelectionPlan parse_plan(std::string_view text);
void save_plan(const SelectionPlan& plan, const fs::path& path);
SelectionPlan load_plan(const fs::path& path);

// Probability map: "h w" then h lines of w values in [0,1].
std::string format_probability_map(const ProbabilityMap& map);
ProbabilityMap parse_probability_map(std::string_view text);
ProbabilityMap load_probability_map(const fs::path& path);

// ASCII PGM (P2). Masks threshold at maxval / 2; images scale to [0,1].
BinaryMask parse_mask(std::string_view text);
GrayImage parse_image(std::string_view text);
std::string format_mask(const BinaryMask& mask);
std::string format_image(const GrayImage& image);
BinaryMask load_mask(const fs::path& path);
GrayImage load_image(const fs::path& path);

}  // namespace coldstart::io
