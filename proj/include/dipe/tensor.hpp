#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dipe {

/// Spatial extent of one slice plus its class count.
struct Shape {
  std::uint32_t classes = 0;
  std::uint32_t height = 0;
  std::uint32_t width = 0;

  std::size_t plane_size() const noexcept { return std::size_t{height} * width; }
  std::size_t size() const noexcept { return plane_size() * classes; }
  bool operator==(const Shape&) const = default;
};

/// Per-class foreground probabilities for one slice, class-major and
/// row-major within each plane. Values are kept in [0,1] by every producer.
class ProbabilityMap {
 public:
  ProbabilityMap() = default;
  ProbabilityMap(Shape shape, std::vector<float> values);
  ProbabilityMap(Shape shape, float fill);

  const Shape& shape() const noexcept { return shape_; }
  std::span<const float> values() const noexcept { return values_; }
  std::span<float> values() noexcept { return values_; }
  std::span<const float> plane(std::uint32_t c) const noexcept {
    return std::span<const float>(values_).subspan(c * shape_.plane_size(), shape_.plane_size());
  }

  bool operator==(const ProbabilityMap&) const = default;

 private:
  Shape shape_;
  std::vector<float> values_;
};

/// One binary plane, row-major, one byte per pixel holding 0 or 1.
struct BinaryPlane {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<std::uint8_t> pixels;

  bool operator==(const BinaryPlane&) const = default;
};

/// C binary planes for one slice (ground truth or a thresholded prediction).
class BinaryMaskSet {
 public:
  BinaryMaskSet() = default;
  explicit BinaryMaskSet(Shape shape);
  BinaryMaskSet(Shape shape, std::vector<std::uint8_t> pixels);

  const Shape& shape() const noexcept { return shape_; }
  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }
  std::span<const std::uint8_t> plane(std::uint32_t c) const noexcept {
    return std::span<const std::uint8_t>(pixels_).subspan(c * shape_.plane_size(), shape_.plane_size());
  }
  std::span<std::uint8_t> plane(std::uint32_t c) noexcept {
    return std::span<std::uint8_t>(pixels_).subspan(c * shape_.plane_size(), shape_.plane_size());
  }
  void set_plane(std::uint32_t c, const BinaryPlane& plane);

  bool operator==(const BinaryMaskSet&) const = default;

 private:
  Shape shape_;
  std::vector<std::uint8_t> pixels_;
};

}  // namespace dipe
