#include "coldstart/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "coldstart/error.hpp"
#include "coldstart/kmeans.hpp"

namespace coldstart::synthetic {

Blobs make_blobs(const BlobSpec& spec, RngSeed seed) {
  if (spec.clusters == 0 || spec.n < spec.clusters || spec.dim == 0) {
    throw InvalidArgument("make_blobs: need n >= clusters >= 1 and dim >= 1");
  }
  if (!spec.cluster_labels.empty() && spec.cluster_labels.size() != spec.clusters) {
    throw InvalidArgument("make_blobs: one label per cluster required");
  }
  Rng rng(seed);
  const double min_dist = spec.separation * spec.stddev;
  const double half_side = min_dist * static_cast<double>(spec.clusters);

  Blobs out;
  out.centers = Matrix(spec.clusters, spec.dim);
  for (std::size_t c = 0; c < spec.clusters; ++c) {
    for (int attempt = 0;; ++attempt) {
      if (attempt > 100000) throw Error("make_blobs: could not place separated centres");
      auto row = out.centers.row(c);
      for (auto& v : row) v = (2.0 * rng.uniform01() - 1.0) * half_side;
      bool ok = true;
      for (std::size_t o = 0; o < c && ok; ++o) {
        ok = std::sqrt(squared_distance(row, out.centers.row(o))) >= min_dist;
      }
      if (ok) break;
    }
  }

  auto& ds = out.dataset;
  ds.vectors = Matrix(spec.n, spec.dim);
  ds.ids.reserve(spec.n);
  out.cluster.reserve(spec.n);
  LabelMap labels;
  for (std::size_t i = 0; i < spec.n; ++i) {
    const std::size_t c = i % spec.clusters;
    ds.ids.emplace_back(fmt::format("s{:04}", i));
    out.cluster.push_back(c);
    for (std::size_t j = 0; j < spec.dim; ++j) {
      ds.vectors(i, j) = out.centers(c, j) + spec.stddev * rng.normal();
    }
    if (!spec.cluster_labels.empty()) labels.emplace(ds.ids.back(), spec.cluster_labels[c]);
  }
  if (!spec.cluster_labels.empty()) ds.labels = std::move(labels);
  ds.provenance = Provenance::kCustom;
  return out;
}

SegmentationToy make_segmentation_toy(std::size_t n_images, std::size_t height, std::size_t width,
                                      RngSeed seed) {
  if (n_images == 0 || height < 4 || width < 4) throw InvalidArgument("make_segmentation_toy: too small");
  Rng rng(seed);
  SegmentationToy toy;
  toy.pixels.provenance = Provenance::kRawPixels;
  toy.pixels.vectors = Matrix(n_images, height * width);
  LabelMap labels;
  for (std::size_t i = 0; i < n_images; ++i) {
    const SampleId id(fmt::format("img{:03}", i));
    const double cy = 1.0 + rng.uniform01() * static_cast<double>(height - 2);
    const double cx = 1.0 + rng.uniform01() * static_cast<double>(width - 2);
    const double radius = 1.5 + rng.uniform01() * static_cast<double>(std::min(height, width)) / 4.0;
    GrayImage image{height, width, std::vector<double>(height * width)};
    std::vector<std::uint8_t> cells(height * width);
    for (std::size_t r = 0; r < height; ++r) {
      for (std::size_t c = 0; c < width; ++c) {
        const double dy = static_cast<double>(r) - cy;
        const double dx = static_cast<double>(c) - cx;
        const bool inside = dx * dx + dy * dy <= radius * radius;
        const double base = inside ? 0.8 : 0.2;
        const double v = std::clamp(base + 0.08 * rng.normal(), 0.0, 1.0);
        image.values[r * width + c] = v;
        cells[r * width + c] = v >= 0.5 ? 1 : 0;
      }
    }
    if (std::count(cells.begin(), cells.end(), std::uint8_t{1}) == 0) {
      // Guarantee a non-empty lesion.
      const auto r = static_cast<std::size_t>(cy);
      const auto c = static_cast<std::size_t>(cx);
      image.values[r * width + c] = 0.8;
      cells[r * width + c] = 1;
    }
    std::copy(image.values.begin(), image.values.end(), toy.pixels.vectors.row(i).begin());
    toy.pixels.ids.push_back(id);
    labels.emplace(id, 1);
    toy.ids.push_back(id);
    toy.images.emplace(id, std::move(image));
    toy.masks.emplace(id, BinaryMask(height, width, std::move(cells)));
  }
  toy.pixels.labels = std::move(labels);
  return toy;
}

}  // namespace coldstart::synthetic
