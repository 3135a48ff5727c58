#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "coldstart/dataset.hpp"
#include "coldstart/metrics.hpp"
#include "coldstart/models.hpp"
#include "coldstart/rng.hpp"

namespace coldstart::synthetic {

struct BlobSpec {
  std::size_t n = 500;
  std::size_t clusters = 5;
  std::size_t dim = 8;
  double stddev = 1.0;
  // Minimum distance between any two centres, in multiples of stddev.
  double separation = 20.0;
  // Class of each cluster; empty means no labels.
  std::vector<int> cluster_labels;
};

struct Blobs {
  EmbeddingDataset dataset;
  std::vector<std::size_t> cluster;  // generating cluster per row
  Matrix centers;
};

// Isotropic Gaussian blobs. Cluster sizes differ by at most one; ids are
// "s0000", "s0001", ... in row order.
Blobs make_blobs(const BlobSpec& spec, RngSeed seed);

struct SegmentationToy {
  std::vector<SampleId> ids;
  std::map<SampleId, GrayImage> images;
  std::map<SampleId, BinaryMask> masks;
  EmbeddingDataset pixels;  // flattened intensities, raw-pixels provenance, every label 1
};

// Dim noisy background with one bright disc per image; the mask is the
// intensity thresholded at 0.5.
SegmentationToy make_segmentation_toy(std::size_t n_images, std::size_t height, std::size_t width,
                                      RngSeed seed);

}  // namespace coldstart::synthetic
